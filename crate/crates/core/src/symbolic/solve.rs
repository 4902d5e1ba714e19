//! Elimination for algebraic systems that are successively linear in the
//! unknowns.
//!
//! Each round picks an equation that is of degree one in some unknown,
//! solves for it and substitutes the result everywhere. When the preferred
//! order of eliminations gets stuck, a few alternative orders are tried.
//! Equations that never become linear are reported back instead of being
//! guessed at.

use std::collections::HashMap;

use super::expr::{Atom, Expr};
use super::poly::{gcd, Poly};
use super::symbol::Symbol;
use super::SymbolicError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Solution {
    /// Solved unknowns, in the order they were requested.
    pub assignments: Vec<(Symbol, Expr)>,
    /// Unknowns that could not be isolated.
    pub unsolved: Vec<Symbol>,
    /// Equations left over after elimination, as numerators.
    pub residual: Vec<Expr>,
    /// A nonzero constant appeared as an equation.
    pub inconsistent: bool,
}

impl Solution {
    /// True when every unknown is determined and nothing is left over.
    pub fn is_complete(&self) -> bool {
        !self.inconsistent && self.unsolved.is_empty() && self.residual.is_empty()
    }

    pub fn as_map(&self) -> HashMap<Symbol, Expr> {
        self.assignments.iter().cloned().collect()
    }

    pub fn get(&self, s: Symbol) -> Option<&Expr> {
        self.assignments
            .iter()
            .find(|(k, _)| *k == s)
            .map(|(_, e)| e)
    }
}

/// Solves `equations = 0` for `unknowns`; the list order of unknowns is the
/// elimination priority.
pub fn solve_algebraic(equations: &[Expr], unknowns: &[Symbol]) -> Result<Solution, SymbolicError> {
    for eq in equations {
        for a in eq.atoms() {
            if let Atom::Func(_, arg) = &a {
                if let Some(u) = unknowns.iter().find(|u| arg.depends_on(**u)) {
                    return Err(SymbolicError::Unsupported {
                        equation: eq.to_string(),
                        unknown: u.to_string(),
                    });
                }
            }
        }
    }
    let eqs: Vec<Poly> = equations.iter().map(|e| e.num().clone()).collect();
    let nonzero: Vec<Expr> = equations
        .iter()
        .filter(|e| !e.den().is_constant())
        .map(|e| Expr::from_poly(e.den().clone()))
        .collect();
    let mut search = Search {
        budget: SEARCH_BUDGET,
        first: None,
    };
    let found = search.run(eqs, unknowns.to_vec(), Vec::new(), nonzero)?;
    let (solved, open, eqs, inconsistent) = found
        .or(search.first)
        .expect("at least one path is explored");

    let assignments = unknowns
        .iter()
        .filter_map(|u| solved.iter().find(|(s, _)| s == u).cloned())
        .collect();
    Ok(Solution {
        assignments,
        unsolved: open,
        residual: eqs.into_iter().map(Expr::from_poly).collect(),
        inconsistent,
    })
}

/// Elimination paths tried after the preferred one fails.
const SEARCH_BUDGET: usize = 16;
/// Alternative pivots tried at each elimination step.
const BRANCHING: usize = 2;

type Path = (Vec<(Symbol, Expr)>, Vec<Symbol>, Vec<Poly>, bool);

struct Search {
    budget: usize,
    /// The preferred path, reported when no path eliminates everything.
    first: Option<Path>,
}

impl Search {
    fn finish(&mut self, path: Path) -> Option<Path> {
        self.budget = self.budget.saturating_sub(1);
        let complete = !path.3 && path.1.is_empty() && path.2.is_empty();
        if complete {
            return Some(path);
        }
        self.first.get_or_insert(path);
        None
    }

    /// `nonzero` holds denominators of the equations and pivot coefficients;
    /// their factors are removed from the remaining equations.
    fn run(
        &mut self,
        mut eqs: Vec<Poly>,
        open: Vec<Symbol>,
        solved: Vec<(Symbol, Expr)>,
        nonzero: Vec<Expr>,
    ) -> Result<Option<Path>, SymbolicError> {
        eqs.retain(|p| !p.is_zero());
        if eqs.iter().any(|p| p.is_constant()) {
            return Ok(self.finish((solved, open, eqs, true)));
        }
        // (coefficient is constant, unknowns in the equation, unknown priority, equation index)
        let mut pivots: Vec<(bool, usize, usize, usize)> = Vec::new();
        for (ei, p) in eqs.iter().enumerate() {
            let atoms = p.atoms();
            let involved = open
                .iter()
                .filter(|u| atoms.contains(&Atom::Var(**u)))
                .count();
            for (ui, u) in open.iter().enumerate() {
                let a = Atom::Var(*u);
                if p.degree_in(&a) == 1 {
                    pivots.push((!is_const_coeff(p, &a), involved, ui, ei));
                }
            }
        }
        if pivots.is_empty() {
            return Ok(self.finish((solved, open, eqs, false)));
        }
        pivots.sort();
        for &(_, _, ui, ei) in pivots.iter().take(BRANCHING) {
            if self.budget == 0 {
                break;
            }
            let u = open[ui];
            let cs = eqs[ei].coeffs_in(&Atom::Var(u));
            let value = -(Expr::from_poly(cs[0].clone()) / Expr::from_poly(cs[1].clone()));
            let sub: HashMap<Symbol, Expr> = [(u, value.clone())].into_iter().collect();
            let mut nonzero_next = Vec::with_capacity(nonzero.len() + 1);
            for e in nonzero
                .iter()
                .chain(std::iter::once(&Expr::from_poly(cs[1].clone())))
            {
                let e = e.subs(&sub)?;
                if !e.is_constant() {
                    nonzero_next.push(Expr::from_poly(e.num().clone()));
                }
            }
            let mut next = Vec::with_capacity(eqs.len() - 1);
            for (i, p) in eqs.iter().enumerate() {
                if i != ei {
                    let reduced = Expr::from_poly(p.clone()).subs(&sub)?.num().clone();
                    next.push(remove_factors(reduced, &nonzero_next));
                }
            }
            let mut solved_next = Vec::with_capacity(solved.len() + 1);
            for (s, e) in &solved {
                solved_next.push((*s, e.subs(&sub)?));
            }
            solved_next.push((u, value));
            let mut open_next = open.clone();
            open_next.remove(ui);
            if let Some(path) = self.run(next, open_next, solved_next, nonzero_next)? {
                return Ok(Some(path));
            }
        }
        Ok(None)
    }
}

/// Divides `p` by its common factors with the known nonzero polynomials.
fn remove_factors(mut p: Poly, nonzero: &[Expr]) -> Poly {
    if p.is_zero() {
        return p;
    }
    for nz in nonzero {
        loop {
            let g = gcd(&p, nz.num());
            if g.is_constant() {
                break;
            }
            p = p.div_exact(&g).expect("gcd divides");
        }
    }
    p
}

fn is_const_coeff(p: &Poly, a: &Atom) -> bool {
    p.coeffs_in(a)[1].is_constant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::{any_symbol, parse_expr};

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    fn syms(names: &[&str]) -> Vec<Symbol> {
        names.iter().map(|n| Symbol::new(n)).collect()
    }

    #[test]
    fn chart_inversion() {
        let eqs = [
            p("th3 - (u1 + 2*u2)"),
            p("th4 - (x1*(x3+1) + u2)"),
            p("xi1 - x1"),
            p("xi2 - x3"),
        ];
        let sol = solve_algebraic(&eqs, &syms(&["x1", "x3", "u1", "u2"])).unwrap();
        assert!(sol.is_complete());
        assert_eq!(sol.get(Symbol::new("x1")), Some(&p("xi1")));
        assert_eq!(sol.get(Symbol::new("x3")), Some(&p("xi2")));
        assert_eq!(sol.get(Symbol::new("u2")), Some(&p("th4 - xi1*(xi2+1)")));
        assert_eq!(
            sol.get(Symbol::new("u1")),
            Some(&p("th3 - 2*th4 + 2*xi1*(xi2+1)"))
        );
    }

    #[test]
    fn identity_equation() {
        let sol = solve_algebraic(&[p("th1 - x1")], &syms(&["x1"])).unwrap();
        assert_eq!(sol.get(Symbol::new("x1")), Some(&p("th1")));
    }

    #[test]
    fn contradiction() {
        let sol = solve_algebraic(&[p("1")], &syms(&["x1"])).unwrap();
        assert!(sol.inconsistent);
        assert!(sol.assignments.is_empty());
    }

    #[test]
    fn nonrational_dependence_is_unsupported() {
        let r = solve_algebraic(&[p("sin(x1) - th")], &syms(&["x1"]));
        assert!(matches!(r, Err(SymbolicError::Unsupported { .. })));
    }

    #[test]
    fn quadratic_left_as_residual() {
        let sol = solve_algebraic(&[p("x1^2 - th")], &syms(&["x1"])).unwrap();
        assert_eq!(sol.unsolved, syms(&["x1"]));
        assert_eq!(sol.residual.len(), 1);
    }

    #[test]
    fn nonzero_denominators_are_cancelled() {
        let eqs = [
            p("t2 - (z1 + z3)/(u1 + 2*u2 + 1)"),
            p("t1 - (u1 + 2*u2) - (z1 + z3)/(u1 + 2*u2 + 1)"),
            p("t3 - (z2*z1 + u2)"),
            p("a - z1"),
            p("b - z2"),
        ];
        let sol = solve_algebraic(&eqs, &syms(&["z1", "z2", "z3", "u1", "u2"])).unwrap();
        assert!(sol.is_complete(), "{sol:?}");
        assert_eq!(
            sol.get(Symbol::new("u1")),
            Some(&p("t1 - t2 - 2*t3 + 2*a*b"))
        );
    }
}
