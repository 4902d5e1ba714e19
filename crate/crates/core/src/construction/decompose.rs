use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;

use crate::analysis::FlatnessReport;
use crate::geometry::{
    generic_jacobian_rank, pick_independent, polynomial_invariants, reduced_basis,
};
use crate::symbolic::{solve_algebraic, Expr, Symbol, SymbolicMatrix};

use super::{ConstructionError, FlatOutput, Namer, StateTransformation};

/// Variables introduced while decomposing step `k`.
#[derive(Clone, Debug, Default)]
pub struct DecompositionStep {
    pub k: usize,
    /// Inputs `(x̄_k, η_{k-1})` of the subsystem `f_{k+1}, …, f_k̄`.
    pub inputs: Vec<Symbol>,
    /// `ζ_k` with their definitions in terms of the inputs and the remaining
    /// states; equal to the inputs when nothing is redundant.
    pub zeta: Vec<(Symbol, Expr)>,
    /// Redundant inputs `y_k`, each a renamed input.
    pub y: Vec<(Symbol, Expr)>,
    /// `η_k` in terms of `ζ_k` and the remaining states.
    pub eta: Vec<(Symbol, Expr)>,
    /// `ẑ_k`, each a renamed component of `ζ_k`.
    pub zhat: Vec<(Symbol, Expr)>,
}

/// The complete decomposition of a flat system.
#[derive(Clone, Debug)]
pub struct DecompositionTrace {
    pub kbar: usize,
    pub steps: Vec<DecompositionStep>,
    /// Symbols of `x̄_k` (index `k - 1`).
    pub xbar_blocks: Vec<Vec<Symbol>>,
    /// Inputs of the decomposed system.
    pub inputs: Vec<Symbol>,
    /// `y_k` for `k = 1 ..= k̄` (index `k - 1`); the last one is `(x̄_k̄, η_{k̄-1})`.
    pub y_blocks: Vec<Vec<Symbol>>,
    /// `ẑ_k` for `k = 0 .. k̄`.
    pub zhat_blocks: Vec<Vec<Symbol>>,
    /// Final coordinates on `X × U` as functions of the original `(x, u)`.
    pub forward: Vec<(Symbol, Expr)>,
    /// `x`, `u` and `x̄` in the final coordinates.
    pub back: HashMap<Symbol, Expr>,
    /// The straightened system, block `k` at index `k - 1`, in the final
    /// coordinates.
    pub fbar: Vec<Vec<Expr>>,
    /// `y = (y_k̄, …, y_1)` in the original variables.
    pub flat_output: FlatOutput,
}

impl DecompositionTrace {
    /// `z = (y_k̄, (y_{k̄-1}, ẑ_{k̄-1}), …, (y_1, ẑ_1), ẑ_0)`.
    pub fn z_order(&self) -> Vec<Symbol> {
        let mut z = Vec::new();
        for k in (0..=self.kbar).rev() {
            if k >= 1 {
                z.extend(self.y_blocks[k - 1].iter().copied());
            }
            if k < self.kbar {
                z.extend(self.zhat_blocks[k].iter().copied());
            }
        }
        z
    }

    /// Flat output symbols in the order `(y_k̄, …, y_1)`.
    pub fn outputs(&self) -> Vec<Symbol> {
        self.y_blocks.iter().rev().flatten().copied().collect()
    }

    /// The combined transformation: `x̄` and `u` in terms of `z`.
    pub fn combined(&self) -> Vec<(Symbol, Expr)> {
        self.xbar_blocks
            .iter()
            .flatten()
            .chain(&self.inputs)
            .copied()
            .map(|v| (v, self.back[&v].clone()))
            .collect()
    }
}

struct Work {
    coords: Vec<Symbol>,
    fwd: HashMap<Symbol, Expr>,
    back: HashMap<Symbol, Expr>,
    fbar: Vec<Vec<Expr>>,
    eq: HashMap<Symbol, BigRational>,
    max_degree: u32,
}

impl Work {
    /// Replaces the coordinates `old` by `defs` (new symbol, definition in
    /// the current coordinates).
    fn change(&mut self, old: &[Symbol], defs: &[(Symbol, Expr)]) -> Result<(), ConstructionError> {
        let eqs: Vec<Expr> = defs.iter().map(|(v, e)| Expr::var(*v) - e).collect();
        let sol = solve_algebraic(&eqs, old)?;
        if !sol.is_complete() {
            let names: Vec<String> = defs.iter().map(|(v, e)| format!("{v} = {e}")).collect();
            return Err(ConstructionError::Straightening {
                what: format!("inverse of {}", names.join(", ")),
                degree: self.max_degree,
            });
        }
        let map = sol.as_map();
        for (v, e) in defs {
            if e.subs(&map)? != Expr::var(*v) {
                return Err(ConstructionError::Inconsistent(format!(
                    "coordinate change for {v} is not invertible"
                )));
            }
        }
        let fwd_all = self.fwd.clone();
        for (v, e) in defs {
            self.fwd.insert(*v, e.subs(&fwd_all)?);
        }
        for o in old {
            self.fwd.remove(o);
        }
        for e in self.back.values_mut() {
            *e = e.subs(&map)?;
        }
        for block in &mut self.fbar {
            for e in block.iter_mut() {
                *e = e.subs(&map)?;
            }
        }
        self.coords.retain(|c| !old.contains(c));
        self.coords.extend(defs.iter().map(|(v, _)| *v));
        Ok(())
    }

    fn anchor(&self) -> Vec<HashMap<Symbol, BigRational>> {
        let mut pt = HashMap::new();
        for c in &self.coords {
            match self.fwd[c].eval_rational(&self.eq) {
                Some(v) => {
                    pt.insert(*c, v);
                }
                None => return Vec::new(),
            }
        }
        vec![pt]
    }

    fn depends_only_on(&self, e: &Expr, allowed: &[Symbol]) -> bool {
        e.symbols().iter().all(|s| allowed.contains(s))
    }
}

/// Invariants of `fields` (acting on `moving`, with `params` as parameters)
/// that are independent of `base` with respect to `moving`.
fn find_invariants(
    params: &[Symbol],
    moving: &[Symbol],
    fields: &[Vec<Expr>],
    base: &[Expr],
    count: usize,
    anchors: &[HashMap<Symbol, BigRational>],
    max_degree: u32,
) -> Vec<Expr> {
    let vars: Vec<Symbol> = params.iter().chain(moving).copied().collect();
    let padded: Vec<Vec<Expr>> = fields
        .iter()
        .map(|f| {
            let mut v = vec![Expr::zero(); params.len()];
            v.extend(f.iter().cloned());
            v
        })
        .collect();
    let mut picked = Vec::new();
    for d in 1..=max_degree.max(1) {
        let cands: Vec<Expr> = polynomial_invariants(&vars, &padded, d)
            .into_iter()
            .filter(|c| moving.iter().any(|m| c.depends_on(*m)))
            .collect();
        picked = pick_independent(&cands, base, moving, count, anchors);
        if picked.len() == count {
            break;
        }
    }
    picked
}

/// Runs `Ψ_k` and `Φ_k` for `k = 0 … k̄-1` on the straightened system.
pub fn decompose(
    report: &FlatnessReport,
    st: &StateTransformation,
    max_degree: u32,
    namer: &Namer,
) -> Result<DecompositionTrace, ConstructionError> {
    decompose_tracking(report, st, max_degree, namer, &mut 0)
}

/// [`decompose`], leaving the index of the last step it entered in `step`.
pub fn decompose_tracking(
    report: &FlatnessReport,
    st: &StateTransformation,
    max_degree: u32,
    namer: &Namer,
    step: &mut usize,
) -> Result<DecompositionTrace, ConstructionError> {
    let s = &report.system;
    let kbar = report.kbar;
    let mut w = Work {
        coords: st
            .symbols()
            .into_iter()
            .chain(s.inputs.iter().copied())
            .collect(),
        fwd: st
            .forward_map()
            .into_iter()
            .chain(s.inputs.iter().map(|u| (*u, Expr::var(*u))))
            .collect(),
        back: st
            .inverse
            .iter()
            .cloned()
            .chain(st.symbols().into_iter().map(|v| (v, Expr::var(v))))
            .chain(s.inputs.iter().map(|u| (*u, Expr::var(*u))))
            .collect(),
        fbar: st.transformed_system(s)?,
        eq: s.equilibrium(),
        max_degree,
    };
    let xu = s.variables();
    let rho: Vec<usize> = (0..=kbar).map(|k| report.delta(k).dim()).collect();
    let rho: Vec<usize> = (0..=kbar)
        .map(|k| if k == 0 { 0 } else { rho[k] - rho[k - 1] })
        .collect();

    let mut steps = Vec::new();
    let mut y_blocks: Vec<Vec<Symbol>> = vec![Vec::new(); kbar];
    let mut zhat_blocks: Vec<Vec<Symbol>> = vec![Vec::new(); kbar];
    let mut eta_prev: Vec<Symbol> = Vec::new();
    let mut done: Vec<Symbol> = Vec::new();

    for k in 0..kbar {
        *step = k;
        let mut step = DecompositionStep {
            k,
            ..Default::default()
        };
        let inputs: Vec<Symbol> = if k == 0 {
            s.inputs.clone()
        } else {
            st.blocks[k - 1]
                .iter()
                .copied()
                .chain(eta_prev.iter().copied())
                .collect()
        };
        let params: Vec<Symbol> = st.blocks[k..].iter().flatten().copied().collect();
        step.inputs = inputs.clone();
        let allowed: Vec<Symbol> = params.iter().chain(&inputs).copied().collect();
        let g: Vec<Expr> = w.fbar[k..].iter().flatten().cloned().collect();
        if let Some(bad) = g.iter().find(|e| !w.depends_only_on(e, &allowed)) {
            return Err(ConstructionError::Inconsistent(format!(
                "subsystem {} depends on eliminated variables: {bad}",
                k + 1
            )));
        }

        // Ψ_k: split off redundant inputs
        let jac = SymbolicMatrix::jacobian(&g, &inputs);
        let kernel = jac.nullspace()?;
        if k == 0 && !kernel.is_empty() {
            return Err(ConstructionError::Inconsistent(
                "the input Jacobian is rank deficient".into(),
            ));
        }
        let zeta: Vec<Symbol> = if kernel.is_empty() {
            step.zeta = inputs.iter().map(|v| (*v, Expr::var(*v))).collect();
            inputs.clone()
        } else {
            let count = inputs.len() - kernel.len();
            let anchors = w.anchor();
            let mut defs =
                find_invariants(&params, &inputs, &kernel, &[], count, &anchors, max_degree);
            if defs.len() < count {
                defs = pick_independent(&g, &[], &inputs, count, &anchors);
            }
            if defs.len() < count {
                return Err(ConstructionError::Inconsistent(format!(
                    "no input combination removes the redundant inputs of subsystem {}",
                    k + 1
                )));
            }
            let input_exprs: Vec<Expr> = inputs.iter().map(|v| Expr::var(*v)).collect();
            let ys = pick_independent(&input_exprs, &defs, &inputs, kernel.len(), &anchors);
            if ys.len() < kernel.len() {
                return Err(ConstructionError::Inconsistent(format!(
                    "redundant inputs of subsystem {} cannot be completed to a chart",
                    k + 1
                )));
            }
            let zeta_defs: Vec<(Symbol, Expr)> = defs
                .into_iter()
                .enumerate()
                .map(|(i, e)| (namer.indexed("zeta", k, i + 1), e))
                .collect();
            let y_defs: Vec<(Symbol, Expr)> = ys
                .into_iter()
                .enumerate()
                .map(|(i, e)| (namer.indexed("y", k, i + 1), e))
                .collect();
            let all: Vec<(Symbol, Expr)> = zeta_defs.iter().chain(&y_defs).cloned().collect();
            w.change(&inputs, &all)?;
            y_blocks[k - 1] = y_defs.iter().map(|(v, _)| *v).collect();
            done.extend(y_blocks[k - 1].iter().copied());
            step.zeta = zeta_defs.clone();
            step.y = y_defs;
            zeta_defs.iter().map(|(v, _)| *v).collect()
        };

        // Φ_k: straighten D_k inside the ζ_k directions
        let d_rows = transform_fields(&w, report.steps[k].d.basis(), &xu)?;
        let others: Vec<Symbol> = done.clone();
        let order: Vec<Symbol> = others
            .iter()
            .copied()
            .chain(zeta.iter().rev().copied())
            .chain(params.iter().copied())
            .collect();
        let permuted: Vec<Vec<Expr>> = d_rows
            .iter()
            .map(|r| order.iter().map(|c| r[c].clone()).collect())
            .collect();
        let basis = reduced_basis(order.len(), permuted)?;
        let zstart = others.len();
        let zend = zstart + zeta.len();
        let mut zeta_rows: Vec<Vec<Expr>> = Vec::new();
        let mut pivots: Vec<Symbol> = Vec::new();
        for row in &basis {
            let pc = row
                .iter()
                .position(|e| !e.is_zero())
                .expect("nonzero basis row");
            if pc >= zend {
                return Err(ConstructionError::Inconsistent(format!(
                    "D_{k} moves the states {}",
                    order[pc]
                )));
            }
            if pc < zstart {
                continue;
            }
            if row[..zstart].iter().any(|e| !e.is_zero()) {
                return Err(ConstructionError::Inconsistent(format!(
                    "D_{k} is not straightened by the previous steps"
                )));
            }
            let zpart: Vec<Expr> = zeta
                .iter()
                .map(|z| row[order.iter().position(|c| c == z).unwrap()].clone())
                .collect();
            let coeff_vars: Vec<Symbol> = params.iter().chain(&zeta).copied().collect();
            if let Some(bad) = zpart.iter().find(|e| !w.depends_only_on(e, &coeff_vars)) {
                return Err(ConstructionError::Inconsistent(format!(
                    "D_{k} has a coefficient depending on eliminated variables: {bad}"
                )));
            }
            zeta_rows.push(zpart);
            pivots.push(order[pc]);
        }
        if pivots.len() != rho[k + 1] {
            return Err(ConstructionError::Inconsistent(format!(
                "D_{k} has {} directions in the new inputs, expected {}",
                pivots.len(),
                rho[k + 1]
            )));
        }
        pivots.sort_by_key(|p| zeta.iter().position(|z| z == p));
        let n_eta = zeta.len() - pivots.len();
        let anchors = w.anchor();
        let pivot_exprs: Vec<Expr> = pivots.iter().map(|p| Expr::var(*p)).collect();
        let eta_defs_raw = if n_eta == 0 {
            Vec::new()
        } else {
            find_invariants(
                &params,
                &zeta,
                &zeta_rows,
                &pivot_exprs,
                n_eta,
                &anchors,
                max_degree,
            )
        };
        if eta_defs_raw.len() < n_eta {
            return Err(ConstructionError::Straightening {
                what: format!("input transformation straightening D_{k}"),
                degree: max_degree,
            });
        }
        let eta_defs: Vec<(Symbol, Expr)> = eta_defs_raw
            .into_iter()
            .enumerate()
            .map(|(i, e)| (namer.indexed("eta", k, i + 1), e))
            .collect();
        let zhat_defs: Vec<(Symbol, Expr)> = pivots
            .iter()
            .enumerate()
            .map(|(i, p)| (namer.indexed("zh", k, i + 1), Expr::var(*p)))
            .collect();
        let all: Vec<(Symbol, Expr)> = eta_defs.iter().chain(&zhat_defs).cloned().collect();
        w.change(&zeta, &all)?;
        zhat_blocks[k] = zhat_defs.iter().map(|(v, _)| *v).collect();
        done.extend(zhat_blocks[k].iter().copied());
        eta_prev = eta_defs.iter().map(|(v, _)| *v).collect();
        step.eta = eta_defs;
        step.zhat = zhat_defs;

        // f_{k+2}, … no longer see anything that has been split off
        let later: Vec<Symbol> = st.blocks[k..]
            .iter()
            .flatten()
            .copied()
            .chain(eta_prev.iter().copied())
            .collect();
        for (j, block) in w.fbar.iter().enumerate().skip(k + 1) {
            if let Some(bad) = block.iter().find(|e| !w.depends_only_on(e, &later)) {
                return Err(ConstructionError::Inconsistent(format!(
                    "block {} still depends on split-off variables after step {k}: {bad}",
                    j + 1
                )));
            }
        }
        let r = generic_jacobian_rank(&w.fbar[k], &zhat_blocks[k]);
        if r != rho[k + 1] {
            return Err(ConstructionError::Inconsistent(format!(
                "rank condition fails for block {}: {r} != {}",
                k + 1,
                rho[k + 1]
            )));
        }
        steps.push(step);
    }

    let top: Vec<Symbol> = st.blocks[kbar - 1]
        .iter()
        .copied()
        .chain(eta_prev.iter().copied())
        .collect();
    let top_defs: Vec<(Symbol, Expr)> = top
        .iter()
        .enumerate()
        .map(|(i, v)| (namer.indexed("y", kbar, i + 1), Expr::var(*v)))
        .collect();
    w.change(&top, &top_defs)?;
    y_blocks[kbar - 1] = top_defs.iter().map(|(v, _)| *v).collect();

    let names: Vec<Symbol> = y_blocks.iter().rev().flatten().copied().collect();
    let components: Vec<Expr> = names.iter().map(|y| w.fwd[y].clone()).collect();
    let coords: BTreeSet<Symbol> = w.coords.iter().copied().collect();
    let z: BTreeSet<Symbol> = y_blocks
        .iter()
        .chain(&zhat_blocks)
        .flatten()
        .copied()
        .collect();
    if coords != z {
        return Err(ConstructionError::Inconsistent(
            "leftover coordinates after the decomposition".into(),
        ));
    }
    let mut trace = DecompositionTrace {
        kbar,
        steps,
        xbar_blocks: st.blocks.clone(),
        inputs: s.inputs.clone(),
        y_blocks,
        zhat_blocks,
        forward: Vec::new(),
        back: w.back,
        fbar: w.fbar,
        flat_output: FlatOutput::new(components, names),
    };
    trace.forward = trace
        .z_order()
        .into_iter()
        .map(|v| (v, w.fwd[&v].clone()))
        .collect();
    Ok(trace)
}

/// Rewrites fields given in the original `(x, u)` in the current coordinates.
fn transform_fields(
    w: &Work,
    fields: &[Vec<Expr>],
    xu: &[Symbol],
) -> Result<Vec<HashMap<Symbol, Expr>>, ConstructionError> {
    let inv: HashMap<Symbol, Expr> = xu.iter().map(|v| (*v, w.back[v].clone())).collect();
    let mut out = Vec::new();
    for v in fields {
        let mut row = HashMap::new();
        for c in &w.coords {
            let phi = &w.fwd[c];
            let mut acc = Expr::zero();
            for (var, comp) in xu.iter().zip(v) {
                if comp.is_zero() {
                    continue;
                }
                let d = phi.diff(*var);
                if !d.is_zero() {
                    acc = &acc + &(&d * comp);
                }
            }
            row.insert(*c, acc.subs(&inv)?);
        }
        out.push(row);
    }
    Ok(out)
}
