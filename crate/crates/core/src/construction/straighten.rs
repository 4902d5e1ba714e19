use std::collections::HashMap;

use num_rational::BigRational;

use crate::geometry::{apply_field, pick_independent, polynomial_invariants, Distribution};
use crate::model::DiscreteTimeSystem;
use crate::symbolic::{solve_algebraic, Atom, Expr, Symbol, SymbolicMatrix};

use super::{ConstructionError, Namer};

/// New state coordinates `x̄ = (x̄₁, …, x̄_k̄)` in which `Δ_k` is spanned by
/// the coordinate fields of the first `k` blocks.
#[derive(Clone, Debug)]
pub struct StateTransformation {
    pub states: Vec<Symbol>,
    /// Symbols of `x̄_k`, for `k = 1 ..= k̄`.
    pub blocks: Vec<Vec<Symbol>>,
    /// `x̄_k` as functions of `x`.
    pub forward: Vec<Vec<Expr>>,
    /// `x` as functions of `x̄`.
    pub inverse: Vec<(Symbol, Expr)>,
}

impl StateTransformation {
    pub fn symbols(&self) -> Vec<Symbol> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn forward_exprs(&self) -> Vec<Expr> {
        self.forward.iter().flatten().cloned().collect()
    }

    pub fn forward_map(&self) -> HashMap<Symbol, Expr> {
        self.symbols()
            .into_iter()
            .zip(self.forward_exprs())
            .collect()
    }

    pub fn inverse_map(&self) -> HashMap<Symbol, Expr> {
        self.inverse.iter().cloned().collect()
    }

    /// The system in the new coordinates, block by block.
    pub fn transformed_system(
        &self,
        s: &DiscreteTimeSystem,
    ) -> Result<Vec<Vec<Expr>>, ConstructionError> {
        let to_f: HashMap<Symbol, Expr> = s
            .states
            .iter()
            .copied()
            .zip(s.update.iter().cloned())
            .collect();
        let inv = self.inverse_map();
        self.forward
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|phi| Ok(phi.subs(&to_f)?.subs(&inv)?))
                    .collect()
            })
            .collect()
    }

    /// True when every field of `delta` only moves the first `k` blocks.
    pub fn straightens(&self, delta: &Distribution, k: usize) -> bool {
        let later: Vec<Expr> = self.forward[k..].iter().flatten().cloned().collect();
        let jac = SymbolicMatrix::jacobian(&later, &self.states);
        delta.basis().iter().all(|v| {
            (0..jac.nrows()).all(|i| {
                (0..jac.ncols())
                    .fold(Expr::zero(), |acc, j| &acc + &(jac.entry(i, j) * &v[j]))
                    .is_zero()
            })
        })
    }
}

/// Leaves tried before giving up on a rational inverse.
const SEARCH_BUDGET: usize = 512;
/// Alternatives tried per block and degree.
const SUBSETS_PER_BLOCK: usize = 16;
/// Invariants combined pairwise into further candidates.
const COMBINED: usize = 8;

/// Invariants of `fields` up to degree `d`, followed by sums and
/// differences of the leading ones.
fn candidates(vars: &[Symbol], fields: &[Vec<Expr>], d: u32) -> Vec<Expr> {
    let mut out = polynomial_invariants(vars, fields, d);
    let head: Vec<Expr> = out.iter().take(COMBINED).cloned().collect();
    for (i, a) in head.iter().enumerate() {
        for b in &head[i + 1..] {
            for c in [a + b, a - b] {
                if !c.is_constant() && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Functions read off the chosen components that are invariants of
/// `fields`: partial derivatives, and `v + b/a` whenever a component is
/// `a·v + b` with `a` dividing `b`. Constant factors and constant terms are
/// dropped.
fn derived_candidates(vars: &[Symbol], fields: &[Vec<Expr>], chosen: &[Expr]) -> Vec<Expr> {
    let origin: HashMap<Symbol, Expr> = vars.iter().map(|v| (*v, Expr::zero())).collect();
    let mut out: Vec<Expr> = Vec::new();
    let mut push = |e: Expr| {
        if !e.is_polynomial() || e.is_constant() {
            return;
        }
        let Ok(at_origin) = e.subs(&origin) else {
            return;
        };
        let shifted = &e - &at_origin;
        let c = Expr::from_poly(shifted.num().primitive_integer().1);
        if fields.iter().all(|f| apply_field(vars, f, &c).is_zero()) && !out.contains(&c) {
            out.push(c);
        }
    };
    for e in chosen {
        if !e.is_polynomial() {
            continue;
        }
        for v in vars {
            push(e.diff(*v));
            let cs = e.num().coeffs_in(&Atom::Var(*v));
            if cs.len() == 2 && !cs[1].is_constant() {
                if let Some(q) = cs[0].div_exact(&cs[1]) {
                    push(&Expr::var(*v) + &Expr::from_poly(q));
                }
            }
        }
    }
    out
}

/// Subsets of `count` candidates that extend `base` independently, in
/// lexicographic order of candidate positions.
fn independent_subsets(
    cands: &[Expr],
    base: &[Expr],
    vars: &[Symbol],
    count: usize,
    anchors: &[HashMap<Symbol, BigRational>],
    limit: usize,
) -> Vec<Vec<Expr>> {
    fn go(
        cands: &[Expr],
        from: usize,
        current: &mut Vec<Expr>,
        picked: &mut Vec<Expr>,
        ctx: (&[Symbol], usize, &[HashMap<Symbol, BigRational>], usize),
        out: &mut Vec<Vec<Expr>>,
    ) {
        let (vars, count, anchors, limit) = ctx;
        if picked.len() == count {
            out.push(picked.clone());
            return;
        }
        for i in from..cands.len() {
            if out.len() >= limit {
                return;
            }
            if pick_independent(&cands[i..=i], current, vars, 1, anchors).len() == 1 {
                current.push(cands[i].clone());
                picked.push(cands[i].clone());
                go(cands, i + 1, current, picked, ctx, out);
                picked.pop();
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut current = base.to_vec();
    go(
        cands,
        0,
        &mut current,
        &mut Vec::new(),
        (vars, count, anchors, limit),
        &mut out,
    );
    out
}

/// Answer of an [`Acceptor`] to a candidate transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Acceptance {
    Accept,
    /// The candidate fails for a reason that involves only `x̄_k, …, x̄_k̄`;
    /// the search resumes with the next choice of `x̄_k`.
    Reject {
        from_block: usize,
    },
}

/// Decides whether a candidate transformation is kept.
pub type Acceptor<'a> =
    dyn FnMut(&StateTransformation) -> Result<Acceptance, ConstructionError> + 'a;

struct Search<'a, 'b> {
    s: &'a DiscreteTimeSystem,
    chain: &'a [Distribution],
    blocks: Vec<Vec<Symbol>>,
    accept: &'a mut Acceptor<'b>,
    fields: Vec<Vec<Vec<Expr>>>,
    rho: Vec<usize>,
    anchors: Vec<HashMap<Symbol, BigRational>>,
    max_degree: u32,
    syms: Vec<Symbol>,
    budget: usize,
    missing: Option<usize>,
    unwind: usize,
}

impl Search<'_, '_> {
    /// Picks blocks `k, k-1, …, 1` on top of `chosen`; returns the
    /// transformation once every block is filled, `x` is a rational function
    /// of `x̄` and the acceptor agrees.
    fn run(
        &mut self,
        k: usize,
        chosen: &mut Vec<Expr>,
        forward: &mut Vec<Vec<Expr>>,
    ) -> Result<Option<StateTransformation>, ConstructionError> {
        if k == 0 {
            self.budget = self.budget.saturating_sub(1);
            let exprs: Vec<Expr> = forward.iter().flatten().cloned().collect();
            let eqs: Vec<Expr> = self
                .syms
                .iter()
                .zip(&exprs)
                .map(|(v, e)| Expr::var(*v) - e)
                .collect();
            let sol = solve_algebraic(&eqs, &self.s.states)?;
            if !sol.is_complete() {
                return Ok(None);
            }
            let inv = sol.as_map();
            for (v, e) in self.syms.iter().zip(&exprs) {
                if e.subs(&inv)? != Expr::var(*v) {
                    return Ok(None);
                }
            }
            let st = StateTransformation {
                states: self.s.states.clone(),
                blocks: self.blocks.clone(),
                forward: forward.clone(),
                inverse: self.s.states.iter().map(|x| (*x, inv[x].clone())).collect(),
            };
            for (k, delta) in self.chain.iter().enumerate() {
                if !st.straightens(delta, k + 1) {
                    return Err(ConstructionError::Inconsistent(format!(
                        "state transformation does not straighten Delta_{}",
                        k + 1
                    )));
                }
            }
            return match (self.accept)(&st)? {
                Acceptance::Accept => Ok(Some(st)),
                Acceptance::Reject { from_block } => {
                    self.unwind = from_block;
                    Ok(None)
                }
            };
        }
        let mut found_any = false;
        for d in 1..=self.max_degree.max(1) {
            let mut cands = candidates(&self.s.states, &self.fields[k - 1], d);
            for c in derived_candidates(&self.s.states, &self.fields[k - 1], chosen) {
                if !cands.contains(&c) {
                    cands.push(c);
                }
            }
            let subsets = independent_subsets(
                &cands,
                chosen,
                &self.s.states,
                self.rho[k - 1],
                &self.anchors,
                SUBSETS_PER_BLOCK,
            );
            for sub in subsets {
                found_any = true;
                let len = chosen.len();
                chosen.extend(sub.iter().cloned());
                forward[k - 1] = sub;
                if let Some(st) = self.run(k - 1, chosen, forward)? {
                    return Ok(Some(st));
                }
                chosen.truncate(len);
                if self.budget == 0 || self.unwind > k {
                    return Ok(None);
                }
                self.unwind = 0;
            }
        }
        if !found_any {
            self.missing.get_or_insert(k);
        }
        Ok(None)
    }
}

/// Straightens `Δ₁ ⊂ … ⊂ Δ_k̄` (`chain[k-1] = Δ_k`, the last one of full
/// dimension).
///
/// Blocks are chosen from `x̄_k̄` downwards: `x̄_k` collects invariants of
/// `Δ_{k-1}` that are independent of the blocks chosen so far, searched by
/// a polynomial ansatz. The first choice in candidate order is kept unless
/// it leads to a state transformation without a rational inverse, in which
/// case alternatives are searched, first with all blocks of degree one, then
/// with the degree bound raised step by step.
pub fn straighten_distribution_chain(
    s: &DiscreteTimeSystem,
    chain: &[Distribution],
    max_degree: u32,
    namer: &Namer,
) -> Result<StateTransformation, ConstructionError> {
    straighten_distribution_chain_with(s, chain, max_degree, namer, &mut |_| Ok(Acceptance::Accept))
}

/// Like [`straighten_distribution_chain`], but keeps searching until
/// `accept` takes a candidate.
pub fn straighten_distribution_chain_with(
    s: &DiscreteTimeSystem,
    chain: &[Distribution],
    max_degree: u32,
    namer: &Namer,
    accept: &mut Acceptor<'_>,
) -> Result<StateTransformation, ConstructionError> {
    let n = s.n();
    let kbar = chain.len();
    if kbar == 0 || chain[kbar - 1].dim() != n {
        return Err(ConstructionError::Inconsistent(
            "the distribution chain does not reach the full state space".into(),
        ));
    }
    let dims: Vec<usize> = std::iter::once(0)
        .chain(chain.iter().map(|d| d.dim()))
        .collect();
    let blocks: Vec<Vec<Symbol>> = (1..=kbar)
        .map(|k| {
            (1..=dims[k] - dims[k - 1])
                .map(|i| namer.indexed("xb", k, i))
                .collect()
        })
        .collect();
    let mut search = Search {
        s,
        chain,
        blocks: blocks.clone(),
        accept,
        fields: (1..=kbar)
            .map(|k| {
                if k == 1 {
                    Vec::new()
                } else {
                    chain[k - 2].basis().to_vec()
                }
            })
            .collect(),
        rho: (1..=kbar).map(|k| dims[k] - dims[k - 1]).collect(),
        anchors: vec![s.state_equilibrium()],
        max_degree,
        syms: blocks.iter().flatten().copied().collect(),
        budget: SEARCH_BUDGET,
        missing: None,
        unwind: 0,
    };
    let mut forward: Vec<Vec<Expr>> = vec![Vec::new(); kbar];
    let mut found = None;
    for cap in 1..=max_degree.max(1) {
        search.max_degree = cap;
        search.missing = None;
        search.unwind = 0;
        found = search.run(kbar, &mut Vec::new(), &mut forward)?;
        if found.is_some() || search.budget == 0 {
            break;
        }
    }
    match found {
        Some(st) => Ok(st),
        None => {
            let what = match search.missing {
                Some(k) => format!("state block {k}"),
                None => "inverse of the state transformation".into(),
            };
            Err(ConstructionError::Straightening {
                what,
                degree: max_degree,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisOptions};
    use crate::symbolic::parse::{any_symbol, parse_expr};

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    fn chain_of(s: &DiscreteTimeSystem) -> Vec<Distribution> {
        let r = analyze(s, &AnalysisOptions::default()).unwrap();
        (1..=r.kbar).map(|k| r.delta(k).clone()).collect()
    }

    #[test]
    fn four_state_example_matches_known_coordinates() {
        let s = DiscreteTimeSystem::from_strings(
            "t",
            &["x1", "x2", "x3", "x4"],
            &["u1", "u2"],
            &[
                "(x2 + x3 + 3*x4)/(u1 + 2*u2 + 1)",
                "x1*(x3 + 1)*(u1 + 2*u2 - 3) + x4 - 3*u2",
                "u1 + 2*u2",
                "x1*(x3 + 1) + u2",
            ],
        )
        .unwrap();
        let st = straighten_distribution_chain(&s, &chain_of(&s), 3, &Namer::new(s.variables()))
            .unwrap();
        assert_eq!(
            st.forward,
            vec![
                vec![p("x4")],
                vec![p("x2 + 3*x4"), p("x3")],
                vec![p("x1*x3 + x1")]
            ]
        );
        let f = st.transformed_system(&s).unwrap();
        assert_eq!(f[2], vec![p("xb2_1 + xb2_2")]);
        assert_eq!(f[1], vec![p("xb1_1 + xb3_1*(u1 + 2*u2)"), p("u1 + 2*u2")]);
        assert_eq!(f[0], vec![p("xb3_1 + u2")]);
    }

    #[test]
    fn chain_already_straight() {
        let s = DiscreteTimeSystem::from_strings("t", &["x1", "x2"], &["u"], &["x2", "u"]).unwrap();
        let st = straighten_distribution_chain(&s, &chain_of(&s), 3, &Namer::new(s.variables()))
            .unwrap();
        assert_eq!(st.forward, vec![vec![p("x2")], vec![p("x1")]]);
    }

    #[test]
    fn quadratic_straightening() {
        let s = DiscreteTimeSystem::from_strings("t", &["x1", "x2"], &["u"], &["u", "x2 + u^2/2"])
            .unwrap();
        let chain = chain_of(&s);
        assert!(matches!(
            straighten_distribution_chain(&s, &chain, 1, &Namer::new(s.variables())),
            Err(ConstructionError::Straightening { .. })
        ));
        let st = straighten_distribution_chain(&s, &chain, 2, &Namer::new(s.variables())).unwrap();
        assert_eq!(st.forward, vec![vec![p("x1")], vec![p("x1^2 - 2*x2")]]);
        assert!(st.straightens(&chain[0], 1));
    }
}
