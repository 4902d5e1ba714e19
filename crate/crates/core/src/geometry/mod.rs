//! Vector fields, distributions and the fibration `f: X × U → X⁺`.
//!
//! A [`Distribution`] is stored as the nonzero rows of the reduced row echelon
//! form of its component matrix, so two distributions over the same chart are
//! equal exactly when their bases are equal.

pub mod chart;
pub mod fibration;
pub mod invariants;

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;

use thiserror::Error;

use crate::symbolic::{Expr, QMatrix, Symbol, SymbolicError, SymbolicMatrix};

pub use chart::AdaptedChart;
pub use fibration::Fibration;
pub use invariants::{pick_independent, polynomial_invariants};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("adapted chart: {0}")]
    Chart(String),
    #[error(
        "vector field is not projectable: component `{component}` depends on the fibre coordinates"
    )]
    NotProjectable { component: String },
    #[error("projectable basis extraction failed")]
    ExtractionFailed,
}

/// Component vector of a vector field over an ordered coordinate list.
pub type VectorField = Vec<Expr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    coords: Vec<Symbol>,
    basis: Vec<VectorField>,
}

impl Distribution {
    pub fn zero(coords: &[Symbol]) -> Self {
        Distribution {
            coords: coords.to_vec(),
            basis: Vec::new(),
        }
    }

    /// Span of `fields`, reduced to canonical form.
    pub fn span(coords: &[Symbol], fields: Vec<VectorField>) -> Result<Self, SymbolicError> {
        let basis = reduced_basis(coords.len(), fields)?;
        Ok(Distribution {
            coords: coords.to_vec(),
            basis,
        })
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn basis(&self) -> &[VectorField] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &VectorField) -> Result<bool, SymbolicError> {
        if v.iter().all(Expr::is_zero) {
            return Ok(true);
        }
        let mut rows = self.basis.clone();
        rows.push(v.clone());
        Ok(SymbolicMatrix::from_rows(rows, self.coords.len()).rank()? == self.dim())
    }

    pub fn is_subset_of(&self, other: &Distribution) -> Result<bool, SymbolicError> {
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_involutive(&self) -> Result<bool, SymbolicError> {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let b = lie_bracket(&self.coords, &self.basis[i], &self.basis[j]);
                if !self.contains(&b)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Rank at a point of the fields regular there. Rows of the reduced
    /// basis are cleared of denominators and contents; if that loses rank,
    /// bases reduced with rotated column orders are added, since a pivot
    /// choice can put a pole on a direction that stays in the span.
    pub fn rank_at(&self, point: &HashMap<Symbol, BigRational>) -> Option<usize> {
        let n = self.coords.len();
        let eval = |rows: &[VectorField]| -> Option<Vec<Vec<BigRational>>> {
            rows.iter()
                .map(|row| {
                    clear_row(row)
                        .iter()
                        .map(|e| e.eval_rational(point))
                        .collect()
                })
                .collect()
        };
        let mut values = eval(&self.basis)?;
        let mut rank = QMatrix::from_rows(values.clone(), n).rank();
        for shift in 1..n {
            if rank == self.dim() {
                break;
            }
            let rotated: Vec<VectorField> = self.basis.iter().map(|v| rotate(v, shift)).collect();
            let Ok(rows) = reduced_basis(n, rotated) else {
                continue;
            };
            let rows: Vec<VectorField> = rows.iter().map(|v| rotate(v, n - shift)).collect();
            values.extend(eval(&rows)?);
            rank = QMatrix::from_rows(values.clone(), n).rank();
        }
        Some(rank)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.coords.iter().copied().collect();
        for v in &self.basis {
            for e in v {
                out.extend(e.symbols());
            }
        }
        out
    }
}

/// Canonical basis: nonzero rows of the reduced row echelon form.
pub fn reduced_basis(
    ncols: usize,
    fields: Vec<VectorField>,
) -> Result<Vec<VectorField>, SymbolicError> {
    if fields.is_empty() {
        return Ok(Vec::new());
    }
    let r = SymbolicMatrix::from_rows(fields, ncols).rref()?;
    Ok(r.basis_rows())
}

fn rotate(v: &[Expr], shift: usize) -> VectorField {
    let mut out = v.to_vec();
    out.rotate_left(shift);
    out
}

/// Scales a row to polynomial entries without common factor.
pub fn clear_row(row: &[Expr]) -> Vec<Expr> {
    clear_row_with_scale(row).0
}

/// [`clear_row`] together with the factor `λ` such that the result is `λ · row`.
pub fn clear_row_with_scale(row: &[Expr]) -> (Vec<Expr>, Expr) {
    use crate::symbolic::poly::{gcd, Poly};
    let mut den = Poly::one();
    for e in row {
        if !e.den().is_one() {
            let g = gcd(&den, e.den());
            den = den.mul(&e.den().div_exact(&g).expect("gcd divides"));
        }
    }
    let den = Expr::from_poly(den);
    let scaled: Vec<Expr> = row.iter().map(|e| e * &den).collect();
    let mut content = Poly::zero();
    for e in &scaled {
        content = gcd(&content, e.num());
    }
    if content.is_zero() || content.is_one() {
        return (scaled, den);
    }
    let c = Expr::from_poly(content);
    (scaled.iter().map(|e| e / &c).collect(), &den / &c)
}

/// `[v, w]` in the given coordinates.
pub fn lie_bracket(coords: &[Symbol], v: &[Expr], w: &[Expr]) -> VectorField {
    coords
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let mut acc = Expr::zero();
            for (k, xk) in coords.iter().enumerate() {
                if !v[k].is_zero() {
                    let d = w[i].diff(*xk);
                    if !d.is_zero() {
                        acc = &acc + &(&v[k] * &d);
                    }
                }
                if !w[k].is_zero() {
                    let d = v[i].diff(*xk);
                    if !d.is_zero() {
                        acc = &acc - &(&w[k] * &d);
                    }
                }
            }
            acc
        })
        .collect()
}

/// Directional derivative `⟨dφ, v⟩`.
pub fn apply_field(coords: &[Symbol], v: &[Expr], phi: &Expr) -> Expr {
    let mut acc = Expr::zero();
    for (k, xk) in coords.iter().enumerate() {
        if v[k].is_zero() {
            continue;
        }
        let d = phi.diff(*xk);
        if !d.is_zero() {
            acc = &acc + &(&v[k] * &d);
        }
    }
    acc
}

/// A deterministic pseudo-random rational point, keyed by symbol names.
pub fn generic_point(
    symbols: impl IntoIterator<Item = Symbol>,
    salt: u64,
) -> HashMap<Symbol, BigRational> {
    symbols
        .into_iter()
        .map(|s| {
            let mut h: u64 = 0xcbf29ce484222325 ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
            for b in s.name().bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
            h ^= h >> 29;
            let num = (h % 181) as i64 + 2;
            let den = ((h >> 20) % 59) as i64 + 3;
            let sign = if (h >> 40) & 1 == 1 { -1 } else { 1 };
            (
                s,
                BigRational::new(BigInt::from(sign * num), BigInt::from(den)),
            )
        })
        .collect()
}

/// Rank of the Jacobian of `exprs` with respect to `vars` at `point`.
pub fn jacobian_rank_at(
    exprs: &[Expr],
    vars: &[Symbol],
    point: &HashMap<Symbol, BigRational>,
) -> Option<usize> {
    if exprs.is_empty() {
        return Some(0);
    }
    let j = SymbolicMatrix::jacobian(exprs, vars);
    Some(j.eval_rational(point)?.rank())
}

/// Generic Jacobian rank estimated at several deterministic points.
pub fn generic_jacobian_rank(exprs: &[Expr], vars: &[Symbol]) -> usize {
    let mut syms: BTreeSet<Symbol> = vars.iter().copied().collect();
    for e in exprs {
        syms.extend(e.symbols());
    }
    let mut best = 0;
    let mut hits = 0;
    for salt in 0..8 {
        let pt = generic_point(syms.iter().copied(), salt);
        if let Some(r) = jacobian_rank_at(exprs, vars, &pt) {
            best = best.max(r);
            hits += 1;
            if hits == 2 {
                break;
            }
        }
    }
    best
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
    fn brackets() {
        let c = syms(&["xi1", "xi2"]);
        assert!(lie_bracket(&c, &[p("1"), p("0")], &[p("0"), p("1")])
            .iter()
            .all(Expr::is_zero));
        let c = syms(&["th1", "xi1"]);
        let b = lie_bracket(&c, &[p("0"), p("1")], &[p("xi1"), p("0")]);
        assert_eq!(b, vec![p("1"), p("0")]);
        let c = syms(&["x1", "x2"]);
        let b = lie_bracket(&c, &[p("0"), p("x1")], &[p("x2"), p("0")]);
        assert_eq!(b, vec![p("x1"), p("-x2")]);
    }

    #[test]
    fn involutivity() {
        let c = syms(&["x1", "x2", "x3"]);
        let d = Distribution::span(
            &c,
            vec![vec![p("1"), p("0"), p("0")], vec![p("0"), p("1"), p("0")]],
        )
        .unwrap();
        assert!(d.is_involutive().unwrap());
        let d = Distribution::span(
            &c,
            vec![vec![p("1"), p("0"), p("0")], vec![p("0"), p("1"), p("x1")]],
        )
        .unwrap();
        assert!(!d.is_involutive().unwrap());
    }

    #[test]
    fn rank_at_point_clears_denominators() {
        let c = syms(&["x1", "x2"]);
        let d = Distribution::span(&c, vec![vec![p("x1"), p("x1^2")]]).unwrap();
        let origin: HashMap<Symbol, BigRational> = c
            .iter()
            .map(|s| (*s, BigRational::from_integer(0.into())))
            .collect();
        assert_eq!(d.rank_at(&origin), Some(1));
    }

    #[test]
    fn rank_at_point_survives_an_unlucky_pivot() {
        let c = syms(&["z1", "z2", "z3"]);
        let d = Distribution::span(
            &c,
            vec![
                vec![p("z1 + z2"), p("0"), p("-z3 - 1")],
                vec![p("-1"), p("1"), p("0")],
            ],
        )
        .unwrap();
        let origin: HashMap<Symbol, BigRational> = c
            .iter()
            .map(|s| (*s, BigRational::from_integer(0.into())))
            .collect();
        assert_eq!(d.rank_at(&origin), Some(2));
    }
}
