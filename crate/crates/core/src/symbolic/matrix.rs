//! Dense matrices over the rational-function field and over ℚ.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::expr::{Expr, ZeroTest};
use super::symbol::Symbol;
use super::SymbolicError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolicMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: SymbolicMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Nonzero rows of the reduced matrix.
    pub fn basis_rows(&self) -> Vec<Vec<Expr>> {
        (0..self.rank()).map(|i| self.matrix.row(i)).collect()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Expr>> {
        let cols = self.matrix.cols;
        let mut out = Vec::new();
        for j in (0..cols).filter(|j| !self.pivots.contains(j)) {
            let mut v = vec![Expr::zero(); cols];
            v[j] = Expr::one();
            for (i, &p) in self.pivots.iter().enumerate() {
                v[p] = -self.matrix.get(i, j);
            }
            out.push(v);
        }
        out
    }
}

impl SymbolicMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymbolicMatrix {
            rows,
            cols,
            data: vec![Expr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Expr::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<Expr>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        SymbolicMatrix {
            rows: r,
            cols,
            data,
        }
    }

    /// Jacobian of `exprs` with respect to `vars`.
    pub fn jacobian(exprs: &[Expr], vars: &[Symbol]) -> Self {
        let rows = exprs
            .iter()
            .map(|e| vars.iter().map(|v| e.diff(*v)).collect())
            .collect();
        Self::from_rows(rows, vars.len())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Expr {
        self.data[i * self.cols + j].clone()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> Vec<Expr> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Expr> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Keeps the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows = (0..self.rows)
            .map(|i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        Self::from_rows(rows, cols.len())
    }

    pub fn mul(&self, other: &SymbolicMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Expr::zero();
                for k in 0..self.cols {
                    let a = self.entry(i, k);
                    let b = other.entry(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    /// Row reduction with the deterministic pivot rule: leftmost column,
    /// then the candidate row with the fewest terms, then the lowest index.
    pub fn rref(&self) -> Result<Rref, SymbolicError> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<(usize, usize)> = None;
            for i in r..m.rows {
                let e = m.entry(i, c);
                match e.zero_test() {
                    ZeroTest::Zero => continue,
                    ZeroTest::Unknown => {
                        return Err(SymbolicError::IndeterminateRank {
                            entry: e.to_string(),
                        })
                    }
                    ZeroTest::NonZero => {
                        let s = e.size();
                        if best.is_none_or(|(bs, _)| s < bs) {
                            best = Some((s, i));
                        }
                    }
                }
            }
            let Some((_, p)) = best else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip()?;
            for j in c..m.cols {
                let v = m.entry(r, j);
                if !v.is_zero() {
                    let scaled = v * &inv;
                    m.set(r, j, scaled);
                }
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let pv = m.entry(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let updated = m.entry(i, j) - &(&factor * pv);
                    m.set(i, j, updated);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok(Rref { matrix: m, pivots })
    }

    /// Determinant of a square matrix by elimination.
    pub fn determinant(&self) -> Result<Expr, SymbolicError> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = Expr::one();
        for c in 0..m.cols {
            let mut pivot = None;
            for i in c..m.rows {
                match m.entry(i, c).zero_test() {
                    ZeroTest::Zero => {}
                    ZeroTest::NonZero => {
                        pivot = Some(i);
                        break;
                    }
                    ZeroTest::Unknown => {
                        return Err(SymbolicError::IndeterminateRank {
                            entry: m.entry(i, c).to_string(),
                        })
                    }
                }
            }
            let Some(p) = pivot else {
                return Ok(Expr::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pv = m.get(c, c);
            det = &det * &pv;
            let inv = pv.recip()?;
            for i in c + 1..m.rows {
                let factor = m.entry(i, c) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let updated = m.entry(i, j) - &(&factor * m.entry(c, j));
                    m.set(i, j, updated);
                }
            }
        }
        Ok(det)
    }

    pub fn rank(&self) -> Result<usize, SymbolicError> {
        Ok(self.rref()?.rank())
    }

    pub fn nullspace(&self) -> Result<Vec<Vec<Expr>>, SymbolicError> {
        Ok(self.rref()?.nullspace())
    }

    /// Basis of `{c : cᵀ M = 0}`.
    pub fn left_kernel(&self) -> Result<Vec<Vec<Expr>>, SymbolicError> {
        self.transpose().nullspace()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn subs(&self, map: &HashMap<Symbol, Expr>) -> Result<Self, SymbolicError> {
        let data = self
            .data
            .iter()
            .map(|e| e.subs(map))
            .collect::<Result<_, _>>()?;
        Ok(SymbolicMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Exact evaluation at a point; `None` at a pole.
    pub fn eval_rational(&self, point: &HashMap<Symbol, BigRational>) -> Option<QMatrix> {
        let data = self
            .data
            .iter()
            .map(|e| e.eval_rational(point))
            .collect::<Option<Vec<_>>>()?;
        Some(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl fmt::Debug for SymbolicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Dense matrix over ℚ, used for ranks at specific points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        QMatrix {
            rows: r,
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(r * self.cols + j, p * self.cols + j);
            }
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &factor * self.get(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut out = Vec::new();
        for j in (0..self.cols).filter(|j| !pivots.contains(j)) {
            let mut v = vec![BigRational::zero(); self.cols];
            v[j] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m.get(i, j).clone();
            }
            out.push(v);
        }
        out
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|v| v.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::{any_symbol, parse_expr};

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    fn m(rows: &[&[&str]]) -> SymbolicMatrix {
        let cols = rows[0].len();
        SymbolicMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| p(s)).collect())
                .collect(),
            cols,
        )
    }

    #[test]
    fn identity_is_reduced() {
        let r = SymbolicMatrix::identity(2).rref().unwrap();
        assert_eq!(r.matrix, SymbolicMatrix::identity(2));
        assert_eq!(r.pivots, vec![0, 1]);
        assert!(r.nullspace().is_empty());
    }

    #[test]
    fn proportional_rows() {
        let r = m(&[&["1", "xi1"], &["2", "2*xi1"]]).rref().unwrap();
        assert_eq!(r.matrix, m(&[&["1", "xi1"], &["0", "0"]]));
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.nullspace(), vec![vec![p("-xi1"), p("1")]]);
    }

    #[test]
    fn adapted_input_fields_have_rank_two() {
        let a = m(&[
            &["-th1/(th3+1)", "xi1*(xi2+1)", "1", "0"],
            &["-2*th1/(th3+1)", "2*xi1*(xi2+1)-3", "2", "1"],
        ]);
        assert_eq!(a.rank().unwrap(), 2);
        let mut pt = HashMap::new();
        for (s, v) in [("th1", 3), ("th3", 2), ("xi1", 5), ("xi2", 7)] {
            pt.insert(Symbol::new(s), BigRational::from_integer(v.into()));
        }
        assert_eq!(a.eval_rational(&pt).unwrap().rank(), 2);
    }

    #[test]
    fn nullspace_annihilates() {
        let a = m(&[&["x", "y", "x*y"], &["1", "x", "y"]]);
        let ns = a.nullspace().unwrap();
        assert_eq!(ns.len(), 1);
        let n = SymbolicMatrix::from_rows(ns, 3).transpose();
        assert!(a.mul(&n).is_zero());
    }
}
