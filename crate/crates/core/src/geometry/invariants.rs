//! Polynomial first integrals of families of vector fields.
//!
//! A function `φ` is an invariant of fields `v₁, …, v_r` when `⟨dφ, v_i⟩ = 0`
//! for all `i`. Invariants are searched among polynomials of bounded degree
//! with rational coefficients: after clearing denominators the condition is
//! a linear system for the coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::symbolic::expr::Atom;
use crate::symbolic::poly::{gcd, Monomial, Poly};
use crate::symbolic::{Expr, QMatrix, Symbol};

use super::{generic_jacobian_rank, jacobian_rank_at};

/// Exponent vectors of total degree `1..=max_degree`, sorted so that later
/// coordinates are more significant and larger monomials come first.
fn monomials(nvars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut cur = vec![0; nvars];
    rec(0, max_degree, &mut cur, &mut out);
    out.retain(|e| e.iter().sum::<u32>() > 0);
    out.sort_by(|a, b| exp_cmp(b, a));
    out
}

fn exp_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

fn monomial_poly(vars: &[Symbol], e: &[u32]) -> Poly {
    let mut m = Monomial::one();
    for (v, k) in vars.iter().zip(e) {
        if *k > 0 {
            m = m.mul(&Monomial::atom(Atom::Var(*v), *k));
        }
    }
    Poly::term(m, BigRational::one())
}

/// A basis of the polynomial invariants of `fields` of degree at most
/// `max_degree` without constant term.
///
/// The basis is in reduced echelon form with respect to the monomial order
/// above; elements are sorted by increasing degree of their leading monomial
/// and then by decreasing leading monomial, and scaled to coprime integer
/// coefficients with a positive leading coefficient.
pub fn polynomial_invariants(vars: &[Symbol], fields: &[Vec<Expr>], max_degree: u32) -> Vec<Expr> {
    if max_degree == 0 {
        return Vec::new();
    }
    let monos = monomials(vars.len(), max_degree);
    let mono_polys: Vec<Poly> = monos.iter().map(|e| monomial_poly(vars, e)).collect();
    let mut rows: BTreeMap<(usize, Monomial), Vec<BigRational>> = BTreeMap::new();
    for (fi, field) in fields.iter().enumerate() {
        let mut den = Poly::one();
        for c in field {
            if !c.den().is_one() {
                let g = gcd(&den, c.den());
                den = den.mul(&c.den().div_exact(&g).expect("gcd divides"));
            }
        }
        let comps: Vec<Poly> = field
            .iter()
            .map(|c| {
                let scaled = c * &Expr::from_poly(den.clone());
                scaled.num().clone()
            })
            .collect();
        for (col, mp) in mono_polys.iter().enumerate() {
            let mut acc = Poly::zero();
            for (k, v) in vars.iter().enumerate() {
                if comps[k].is_zero() {
                    continue;
                }
                let d = mp.derivative(&Atom::Var(*v));
                if !d.is_zero() {
                    acc = acc.add(&d.mul(&comps[k]));
                }
            }
            for (m, c) in acc.terms() {
                rows.entry((fi, m.clone()))
                    .or_insert_with(|| vec![BigRational::zero(); monos.len()])[col] += c;
            }
        }
    }
    let ns = if rows.is_empty() {
        identity(monos.len())
    } else {
        QMatrix::from_rows(rows.into_values().collect(), monos.len()).nullspace()
    };
    if ns.is_empty() {
        return Vec::new();
    }
    let mut basis = QMatrix::from_rows(ns, monos.len());
    let pivots = basis.rref();
    let mut found: Vec<(u32, usize, Expr)> = pivots
        .iter()
        .enumerate()
        .map(|(i, &pc)| {
            let row = basis.row(i);
            let poly = Poly::from_terms(
                row.iter()
                    .zip(&mono_polys)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, mp)| {
                        let (m, _) = &mp.terms()[0];
                        (m.clone(), c.clone())
                    }),
            );
            let (_, prim) = poly.primitive_integer();
            let deg: u32 = monos[pc].iter().sum();
            (
                deg,
                pc,
                Expr::from_poly(normalize_leading(&prim, &mono_polys[pc])),
            )
        })
        .collect();
    found.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    found.into_iter().map(|(_, _, e)| e).collect()
}

/// Makes the coefficient of `lead` positive.
fn normalize_leading(p: &Poly, lead: &Poly) -> Poly {
    let m = &lead.terms()[0].0;
    let c = p
        .terms()
        .iter()
        .find(|(t, _)| t == m)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(BigRational::one);
    if c < BigRational::zero() {
        p.neg()
    } else {
        p.clone()
    }
}

fn identity(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Greedily extends `base` by candidates that raise the Jacobian rank with
/// respect to `wrt`, both generically and at every point of `anchors`.
/// Stops after `count` picks.
pub fn pick_independent(
    candidates: &[Expr],
    base: &[Expr],
    wrt: &[Symbol],
    count: usize,
    anchors: &[HashMap<Symbol, BigRational>],
) -> Vec<Expr> {
    let mut current: Vec<Expr> = base.to_vec();
    let mut picked = Vec::new();
    let mut rank = generic_jacobian_rank(&current, wrt);
    let mut anchor_ranks: Vec<usize> = anchors
        .iter()
        .map(|a| jacobian_rank_at(&current, wrt, a).unwrap_or(0))
        .collect();
    for c in candidates {
        if picked.len() == count {
            break;
        }
        current.push(c.clone());
        let r = generic_jacobian_rank(&current, wrt);
        let ars: Vec<Option<usize>> = anchors
            .iter()
            .map(|a| jacobian_rank_at(&current, wrt, a))
            .collect();
        let ok = r == rank + 1
            && ars
                .iter()
                .zip(&anchor_ranks)
                .all(|(n, o)| *n == Some(o + 1));
        if ok {
            rank = r;
            anchor_ranks = ars.into_iter().map(|x| x.unwrap_or(0)).collect();
            picked.push(c.clone());
        } else {
            current.pop();
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::apply_field;
    use crate::symbolic::parse::{any_symbol, parse_expr};

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    fn syms(names: &[&str]) -> Vec<Symbol> {
        names.iter().map(|n| Symbol::new(n)).collect()
    }

    #[test]
    fn linear_invariants_of_a_constant_field() {
        let v = syms(&["x1", "x2", "x3", "x4"]);
        let field = vec![p("0"), p("-3"), p("0"), p("1")];
        let inv = polynomial_invariants(&v, &[field], 1);
        assert_eq!(inv, vec![p("x2 + 3*x4"), p("x3"), p("x1")]);
    }

    #[test]
    fn quadratic_invariant_needs_degree_two() {
        let v = syms(&["x1", "x2"]);
        let field = vec![p("1"), p("x1")];
        assert!(polynomial_invariants(&v, std::slice::from_ref(&field), 1).is_empty());
        let inv = polynomial_invariants(&v, std::slice::from_ref(&field), 2);
        assert_eq!(inv.len(), 1);
        assert!(apply_field(&v, &field, &inv[0]).is_zero());
        assert_eq!(inv[0], p("x1^2 - 2*x2"));
    }

    #[test]
    fn rational_fields() {
        let v = syms(&["x1", "x2", "x3", "x4"]);
        let fields = vec![
            vec![p("0"), p("-3"), p("0"), p("1")],
            vec![p("x1/(x3+1)"), p("0"), p("-1"), p("0")],
        ];
        let inv = polynomial_invariants(&v, &fields, 2);
        assert_eq!(inv[0], p("x2 + 3*x4"));
        assert!(inv.contains(&p("x1*x3 + x1")));
    }

    #[test]
    fn greedy_selection() {
        let v = syms(&["x1", "x2"]);
        let origin: HashMap<Symbol, BigRational> =
            v.iter().map(|s| (*s, BigRational::zero())).collect();
        let cands = vec![p("x1^2"), p("x1"), p("x1 + x2"), p("x2")];
        let picked = pick_independent(&cands, &[], &v, 2, &[origin]);
        assert_eq!(picked, vec![p("x1"), p("x1 + x2")]);
    }
}
