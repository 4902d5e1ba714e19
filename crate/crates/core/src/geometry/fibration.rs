//! Projectability, pushforward and lifting along `f: X × U → X⁺`.
//!
//! Distributions on `X × U` are kept in the original coordinates `(x, u)`;
//! distributions on `X⁺` use the state names as coordinates.

use std::collections::HashMap;

use crate::model::DiscreteTimeSystem;
use crate::symbolic::{Expr, Symbol, SymbolicMatrix};

use super::{
    clear_row, clear_row_with_scale, reduced_basis, AdaptedChart, Distribution, GeometryError,
    VectorField,
};

pub struct Fibration<'a> {
    pub system: &'a DiscreteTimeSystem,
    pub chart: AdaptedChart,
    vars: Vec<Symbol>,
}

impl<'a> Fibration<'a> {
    pub fn new(system: &'a DiscreteTimeSystem, chart: AdaptedChart) -> Self {
        Fibration {
            system,
            chart,
            vars: system.variables(),
        }
    }

    /// Coordinates of `X × U`.
    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    fn n(&self) -> usize {
        self.system.n()
    }

    /// `π_*⁻¹(Δ)`: the fields of `Δ` read on `X × U`, together with `∂u`.
    pub fn lift(&self, delta: &Distribution) -> Result<Distribution, GeometryError> {
        let (n, m) = (self.n(), self.system.m());
        let mut rows: Vec<VectorField> = delta
            .basis()
            .iter()
            .map(|v| {
                let mut r = v.clone();
                r.extend((0..m).map(|_| Expr::zero()));
                r
            })
            .collect();
        for j in 0..m {
            let mut r = vec![Expr::zero(); n + m];
            r[n + j] = Expr::one();
            rows.push(r);
        }
        Ok(Distribution::span(&self.vars, rows)?)
    }

    fn theta_part(&self, adapted: &[Expr]) -> Vec<Expr> {
        adapted[..self.n()].to_vec()
    }

    /// True when the `θ`-components do not depend on `ξ`.
    pub fn is_projectable(&self, v: &[Expr]) -> Result<bool, GeometryError> {
        let a = self.chart.to_adapted(v)?;
        Ok(self.non_projectable_component(&a).is_none())
    }

    fn non_projectable_component(&self, adapted: &[Expr]) -> Option<Expr> {
        self.theta_part(adapted)
            .into_iter()
            .find(|c| self.chart.xi.iter().any(|x| !c.diff(*x).is_zero()))
    }

    fn theta_to_state(&self, e: &Expr) -> Expr {
        let map: HashMap<Symbol, Symbol> = self
            .chart
            .theta
            .iter()
            .copied()
            .zip(self.system.states.iter().copied())
            .collect();
        e.rename(&|s| map.get(&s).copied().unwrap_or(s))
    }

    /// `f_* v` as a field on `X⁺`.
    pub fn pushforward_field(&self, v: &[Expr]) -> Result<VectorField, GeometryError> {
        let a = self.chart.to_adapted(v)?;
        if let Some(c) = self.non_projectable_component(&a) {
            return Err(GeometryError::NotProjectable {
                component: c.to_string(),
            });
        }
        Ok(self
            .theta_part(&a)
            .iter()
            .map(|c| self.theta_to_state(c))
            .collect())
    }

    /// The largest projectable subdistribution.
    ///
    /// Descends through `D ⊇ D' ⊇ …` with
    /// `D' = {v ∈ D : [∂ξ_j, v] ∈ D + W for all j}` until the dimension is
    /// stable. Writing `v = Σ c_i V_i`, the condition only involves the
    /// `θ`-block `A` of the basis: `cᵀ (∂ξ_j A) N = 0` where the columns of
    /// `N` span the right kernel of `A`.
    pub fn largest_projectable(&self, d: &Distribution) -> Result<Distribution, GeometryError> {
        let n = self.n();
        let mut rows: Vec<VectorField> = d.basis().to_vec();
        let back = self.chart.forward_map();
        loop {
            if rows.is_empty() {
                return Ok(Distribution::zero(&self.vars));
            }
            let adapted: Vec<Vec<Expr>> = rows
                .iter()
                .map(|r| self.chart.to_adapted(r))
                .collect::<Result<_, _>>()?;
            // Rescaling row i of A by λ_i only rescales row i of the condition
            // (the derivative of λ_i multiplies A N = 0), so A and N can be
            // kept polynomial and the combinations rescaled afterwards.
            let (theta_rows, scales): (Vec<Vec<Expr>>, Vec<Expr>) = adapted
                .iter()
                .map(|r| clear_row_with_scale(&self.theta_part(r)))
                .unzip();
            let a = SymbolicMatrix::from_rows(theta_rows, n);
            let kernel: Vec<Vec<Expr>> = a.nullspace()?.iter().map(|v| clear_row(v)).collect();
            if kernel.is_empty() {
                break;
            }
            let nmat = SymbolicMatrix::from_rows(kernel, n).transpose();
            let mut blocks: Vec<Vec<Expr>> = vec![Vec::new(); rows.len()];
            for x in &self.chart.xi {
                let da = SymbolicMatrix::from_rows(
                    a.rows()
                        .iter()
                        .map(|r| r.iter().map(|e| e.diff(*x)).collect())
                        .collect(),
                    n,
                );
                let prod = da.mul(&nmat);
                for (i, block) in blocks.iter_mut().enumerate() {
                    block.extend(prod.row(i));
                }
            }
            let width = blocks[0].len();
            let mmat = SymbolicMatrix::from_rows(blocks, width);
            if mmat.is_zero() {
                break;
            }
            let combos = mmat.left_kernel()?;
            if combos.len() == rows.len() {
                break;
            }
            let mut next = Vec::with_capacity(combos.len());
            for c in combos {
                let c: Vec<Expr> = c
                    .iter()
                    .zip(&scales)
                    .map(|(e, l)| (e * l).subs(&back))
                    .collect::<Result<_, _>>()?;
                let mut v = vec![Expr::zero(); self.vars.len()];
                for (ci, r) in c.iter().zip(&rows) {
                    if ci.is_zero() {
                        continue;
                    }
                    for (vk, rk) in v.iter_mut().zip(r) {
                        if !rk.is_zero() {
                            *vk = &*vk + &(ci * rk);
                        }
                    }
                }
                next.push(v);
            }
            rows = reduced_basis(self.vars.len(), next)?;
        }
        Ok(Distribution::span(&self.vars, rows)?)
    }

    /// A basis of projectable fields, given in adapted coordinates: the
    /// reduced echelon form with `θ` columns first.
    pub fn projectable_basis(&self, d: &Distribution) -> Result<Vec<VectorField>, GeometryError> {
        let adapted: Vec<Vec<Expr>> = d
            .basis()
            .iter()
            .map(|r| self.chart.to_adapted(r))
            .collect::<Result<_, _>>()?;
        let basis = reduced_basis(self.vars.len(), adapted)?;
        for r in &basis {
            if self.non_projectable_component(r).is_some() {
                return Err(GeometryError::ExtractionFailed);
            }
        }
        Ok(basis)
    }

    /// `f_*(D)` for a projectable `D`.
    pub fn pushforward(&self, d: &Distribution) -> Result<Distribution, GeometryError> {
        let basis = self.projectable_basis(d)?;
        let rows: Vec<VectorField> = basis
            .iter()
            .map(|r| {
                self.theta_part(r)
                    .iter()
                    .map(|c| self.theta_to_state(c))
                    .collect()
            })
            .collect();
        Ok(Distribution::span(&self.system.states, rows)?)
    }

    pub fn is_projectable_distribution(&self, d: &Distribution) -> Result<bool, GeometryError> {
        match self.projectable_basis(d) {
            Ok(_) => Ok(true),
            Err(GeometryError::ExtractionFailed) => Ok(false),
            Err(e) => Err(e),
        }
    }
}
