//! Charts on `X × U` adapted to the system map.
//!
//! In adapted coordinates `(θ, ξ)` with `θ = f(x, u)` the map `f` becomes
//! the projection onto `θ`, and `W = ker f_*` is spanned by `∂ξ`.

use std::collections::HashMap;

use crate::model::DiscreteTimeSystem;
use crate::symbolic::{solve_algebraic, Expr, Symbol, SymbolicMatrix};

use super::GeometryError;

#[derive(Clone, Debug)]
pub struct AdaptedChart {
    /// Original coordinates: states followed by inputs.
    pub original: Vec<Symbol>,
    pub theta: Vec<Symbol>,
    pub xi: Vec<Symbol>,
    /// The original coordinates reused as `ξ`.
    pub xi_source: Vec<Symbol>,
    /// `(θ, ξ)` as functions of `(x, u)`.
    pub forward: Vec<Expr>,
    /// `(x, u)` as functions of `(θ, ξ)`.
    pub inverse: HashMap<Symbol, Expr>,
    jacobian: SymbolicMatrix,
}

impl AdaptedChart {
    /// Picks `ξ` among the original coordinates.
    ///
    /// Subsets are tried in lexicographic order (states before inputs). A
    /// subset qualifies when the completed Jacobian is regular generically
    /// and at the equilibrium and the chart can be inverted. Subsets whose
    /// Jacobian determinant has a constant numerator are preferred, since
    /// the inverse then has no extra singularities.
    pub fn build(
        s: &DiscreteTimeSystem,
        xi_override: Option<&[Symbol]>,
    ) -> Result<Self, GeometryError> {
        let vars = s.variables();
        let m = s.m();
        if let Some(src) = xi_override {
            if src.len() != m || src.iter().any(|v| !vars.contains(v)) {
                return Err(GeometryError::Chart(format!(
                    "a chart completion needs {m} distinct system variables"
                )));
            }
            return Self::try_subset(s, src)?.ok_or_else(|| {
                GeometryError::Chart(
                    "the supplied completion is singular or cannot be inverted".into(),
                )
            });
        }
        let eq = s.equilibrium();
        let mut regular: Vec<(Vec<Symbol>, bool)> = Vec::new();
        for combo in combinations(vars.len(), m) {
            let src: Vec<Symbol> = combo.iter().map(|&i| vars[i]).collect();
            let rest: Vec<Symbol> = vars.iter().filter(|v| !src.contains(v)).copied().collect();
            let det = SymbolicMatrix::jacobian(&s.update, &rest).determinant()?;
            if det.is_zero() {
                continue;
            }
            match det.eval_rational(&eq) {
                Some(v) if v != num_rational::BigRational::from_integer(0.into()) => {}
                _ => continue,
            }
            let constant = det.num().is_constant();
            regular.push((src, constant));
        }
        for pass in [true, false] {
            for (src, constant) in &regular {
                if *constant != pass {
                    continue;
                }
                if let Some(chart) = Self::try_subset(s, src)? {
                    return Ok(chart);
                }
            }
        }
        if regular.is_empty() {
            Err(GeometryError::Chart(
                "no choice of coordinates completes f to a regular chart".into(),
            ))
        } else {
            Err(GeometryError::Chart(
                "chart inversion failed for every regular completion".into(),
            ))
        }
    }

    fn try_subset(s: &DiscreteTimeSystem, src: &[Symbol]) -> Result<Option<Self>, GeometryError> {
        let vars = s.variables();
        let theta: Vec<Symbol> = (1..=s.n())
            .map(|i| Symbol::new(&format!("_th{i}")))
            .collect();
        let xi: Vec<Symbol> = (1..=s.m())
            .map(|j| Symbol::new(&format!("_xi{j}")))
            .collect();
        let mut forward = s.update.clone();
        forward.extend(src.iter().map(|v| Expr::var(*v)));
        let eqs: Vec<Expr> = theta
            .iter()
            .chain(&xi)
            .zip(&forward)
            .map(|(c, f)| Expr::var(*c) - f)
            .collect();
        let sol = solve_algebraic(&eqs, &vars)?;
        if !sol.is_complete() {
            return Ok(None);
        }
        let inverse = sol.as_map();
        for (c, f) in theta.iter().chain(&xi).zip(&forward) {
            if f.subs(&inverse)? != Expr::var(*c) {
                return Ok(None);
            }
        }
        let jacobian = SymbolicMatrix::jacobian(&forward, &vars);
        if jacobian.rank()? < vars.len() {
            return Ok(None);
        }
        Ok(Some(AdaptedChart {
            original: vars,
            theta,
            xi,
            xi_source: src.to_vec(),
            forward,
            inverse,
            jacobian,
        }))
    }

    /// `(θ, ξ)`.
    pub fn adapted(&self) -> Vec<Symbol> {
        self.theta.iter().chain(&self.xi).copied().collect()
    }

    /// Substitution `θ ↦ f, ξ ↦ source`, expressing adapted-chart functions
    /// in the original coordinates.
    pub fn forward_map(&self) -> HashMap<Symbol, Expr> {
        self.theta
            .iter()
            .chain(&self.xi)
            .copied()
            .zip(self.forward.iter().cloned())
            .collect()
    }

    /// Components of a field given in `(x, u)` rewritten in `(θ, ξ)`.
    pub fn to_adapted(&self, v: &[Expr]) -> Result<Vec<Expr>, GeometryError> {
        let n = self.original.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Expr::zero();
            for (k, vk) in v.iter().enumerate() {
                let j = self.jacobian.entry(i, k);
                if vk.is_zero() || j.is_zero() {
                    continue;
                }
                acc = &acc + &(j * vk);
            }
            out.push(acc.subs(&self.inverse)?);
        }
        Ok(out)
    }

    /// Rewrites a function of `(θ, ξ)` in the original coordinates.
    pub fn pull_back(&self, e: &Expr) -> Result<Expr, GeometryError> {
        Ok(e.subs(&self.forward_map())?)
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::{any_symbol, parse_expr};

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    fn four_state() -> DiscreteTimeSystem {
        DiscreteTimeSystem::from_strings(
            "four_state",
            &["x1", "x2", "x3", "x4"],
            &["u1", "u2"],
            &[
                "(x2 + x3 + 3*x4)/(u1 + 2*u2 + 1)",
                "x1*(x3 + 1)*(u1 + 2*u2 - 3) + x4 - 3*u2",
                "u1 + 2*u2",
                "x1*(x3 + 1) + u2",
            ],
        )
        .unwrap()
    }

    #[test]
    fn four_state_chart_uses_x1_x3() {
        let c = AdaptedChart::build(&four_state(), None).unwrap();
        assert_eq!(c.xi_source, vec![Symbol::new("x1"), Symbol::new("x3")]);
        assert_eq!(c.inverse[&Symbol::new("u2")], p("_th4 - _xi1*_xi2 - _xi1"));
    }

    #[test]
    fn input_fields_in_adapted_coordinates() {
        let c = AdaptedChart::build(&four_state(), None).unwrap();
        let du1 = vec![p("0"), p("0"), p("0"), p("0"), p("1"), p("0")];
        let a = c.to_adapted(&du1).unwrap();
        assert_eq!(
            a[..4].to_vec(),
            vec![p("-_th1/(_th3 + 1)"), p("_xi1*(_xi2 + 1)"), p("1"), p("0")]
        );
        let comb = vec![p("0"), p("0"), p("0"), p("0"), p("-2"), p("1")];
        let a = c.to_adapted(&comb).unwrap();
        assert_eq!(a[..4].to_vec(), vec![p("0"), p("-3"), p("0"), p("1")]);
    }

    #[test]
    fn shift_register_chart() {
        let s = DiscreteTimeSystem::from_strings("s", &["x1"], &["u1"], &["u1"]).unwrap();
        let c = AdaptedChart::build(&s, None).unwrap();
        assert_eq!(c.xi_source, vec![Symbol::new("x1")]);
        assert_eq!(c.inverse[&Symbol::new("u1")], p("_th1"));
        assert_eq!(c.inverse[&Symbol::new("x1")], p("_xi1"));
    }

    #[test]
    fn two_integrators_accept_first_state() {
        let s =
            DiscreteTimeSystem::from_strings("s", &["x1", "x2"], &["u1"], &["x1 + u1", "x2 + u1"])
                .unwrap();
        let c = AdaptedChart::build(&s, None).unwrap();
        assert_eq!(c.xi_source, vec![Symbol::new("x1")]);
    }
}
