//! The distribution sequence `Δ_k → E_k → D_k → Δ_{k+1}` and the flatness
//! verdict.
//!
//! Starting from `Δ₀ = 0`, each step lifts `Δ_k` to `E_k = π_*⁻¹(Δ_k)`, takes
//! its largest projectable subdistribution `D_k` and pushes it forward. The
//! sequence stops once `Δ` stops growing; the system is flat exactly when
//! the final `Δ` fills the state space.

use std::fmt;

use thiserror::Error;

use crate::geometry::{AdaptedChart, Distribution, Fibration, GeometryError};
use crate::model::{eliminate_redundant_inputs, DiscreteTimeSystem, InputReduction, ModelError};
use crate::symbolic::{Symbol, SymbolicError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("constant-dimension assumption violated at step {k}: {what} has generic dimension {generic} but dimension {at_point} at the equilibrium")]
    DimensionDrop {
        k: usize,
        what: &'static str,
        generic: usize,
        at_point: usize,
    },
    #[error("{what} has a pole at the equilibrium (step {k})")]
    Pole { k: usize, what: &'static str },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Flat,
    NotFlat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Flat => "FLAT",
            Verdict::NotFlat => "NOT_FLAT",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SequenceStep {
    pub k: usize,
    /// `Δ_k` on `X⁺`, in state coordinates.
    pub delta: Distribution,
    pub e: Distribution,
    pub d: Distribution,
    /// `Δ_{k+1} = f_*(D_k)`.
    pub delta_next: Distribution,
    pub rho: usize,
    pub mu: i64,
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub max_steps: Option<usize>,
    /// Original coordinates to use as `ξ` in the adapted chart.
    pub xi: Option<Vec<Symbol>>,
    /// Degree cap for the polynomial ansatz used when removing redundant inputs.
    pub max_degree: u32,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            max_steps: None,
            xi: None,
            max_degree: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatnessReport {
    /// The system the sequence ran on (after removing redundant inputs).
    pub system: DiscreteTimeSystem,
    pub chart: Option<AdaptedChart>,
    pub steps: Vec<SequenceStep>,
    pub kbar: usize,
    pub verdict: Verdict,
    pub sfl: bool,
    pub reduction: Option<InputReduction>,
    pub diagnostics: Vec<String>,
}

impl FlatnessReport {
    pub fn dims_delta(&self) -> Vec<usize> {
        self.steps.iter().skip(1).map(|s| s.delta.dim()).collect()
    }

    /// `Δ_k` for `k = 0 ..= k̄ + 1`.
    pub fn delta(&self, k: usize) -> &Distribution {
        if k < self.steps.len() {
            &self.steps[k].delta
        } else {
            &self.steps[self.steps.len() - 1].delta_next
        }
    }

    pub fn rho(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.rho).collect()
    }

    pub fn mu(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.mu).collect()
    }

    /// Rank `m − (μ₀ + … + μ_k)` of the input Jacobian of each subsystem.
    pub fn subsystem_ranks(&self) -> Vec<i64> {
        let m = self.system.m() as i64;
        let mut acc = 0;
        self.steps
            .iter()
            .map(|s| {
                acc += s.mu;
                m - acc
            })
            .collect()
    }

    /// One-paragraph human readable summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let dims: Vec<String> = self.dims_delta().iter().map(|d| d.to_string()).collect();
        match self.verdict {
            Verdict::Flat => out.push_str(&format!(
                "FLAT, kbar={}, dims {}{}\n",
                self.kbar,
                dims.join(","),
                if self.sfl {
                    ", static feedback linearizable"
                } else {
                    ""
                }
            )),
            Verdict::NotFlat => out.push_str(&format!(
                "NOT_FLAT (stagnation at k={}), dims {}\n",
                self.kbar,
                if dims.is_empty() {
                    "-".to_string()
                } else {
                    dims.join(",")
                }
            )),
        }
        out.push_str(" k  dim_delta  dim_E  dim_D  rho  mu  rank\n");
        for (s, r) in self.steps.iter().zip(self.subsystem_ranks()) {
            out.push_str(&format!(
                "{:>2}  {:>9}  {:>5}  {:>5}  {:>3}  {:>2}  {:>4}\n",
                s.k,
                s.delta.dim(),
                s.e.dim(),
                s.d.dim(),
                s.rho,
                s.mu,
                r
            ));
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        out
    }
}

/// Validates the system, removes redundant inputs if necessary and runs the
/// sequence.
pub fn analyze(
    s: &DiscreteTimeSystem,
    opts: &AnalysisOptions,
) -> Result<FlatnessReport, AnalysisError> {
    let report = s.validate()?;
    let failures = report.failures();
    if !failures.is_empty() {
        return Err(AnalysisError::Validation(failures));
    }
    if !report.has_redundant_inputs() {
        return run_algorithm1(s, opts);
    }
    if report.input_rank == 0 {
        return Ok(FlatnessReport {
            system: s.clone(),
            chart: None,
            steps: Vec::new(),
            kbar: 0,
            verdict: Verdict::NotFlat,
            sfl: false,
            reduction: None,
            diagnostics: vec!["no input influences the dynamics".into()],
        });
    }
    let reduction = eliminate_redundant_inputs(s, opts.max_degree)?;
    let mut r = run_algorithm1(&reduction.reduced, opts)?;
    let names: Vec<String> = reduction.eliminated.iter().map(|u| u.to_string()).collect();
    r.diagnostics.insert(
        0,
        format!(
            "rank of the input Jacobian is {} < m = {}; redundant inputs {} are appended to the flat output",
            report.input_rank,
            s.m(),
            names.join(", ")
        ),
    );
    r.reduction = Some(reduction);
    Ok(r)
}

/// Runs the sequence on a system whose input Jacobian has full rank.
pub fn run_algorithm1(
    s: &DiscreteTimeSystem,
    opts: &AnalysisOptions,
) -> Result<FlatnessReport, AnalysisError> {
    let chart = AdaptedChart::build(s, opts.xi.as_deref())?;
    let fib = Fibration::new(s, chart.clone());
    let max_steps = opts.max_steps.unwrap_or(s.n() + 1);
    let eq = s.equilibrium();
    let xeq = s.state_equilibrium();
    let check =
        |k: usize,
         what: &'static str,
         d: &Distribution,
         at: &std::collections::HashMap<Symbol, num_rational::BigRational>| {
            match d.rank_at(at) {
                None => Err(AnalysisError::Pole { k, what }),
                Some(r) if r != d.dim() => Err(AnalysisError::DimensionDrop {
                    k,
                    what,
                    generic: d.dim(),
                    at_point: r,
                }),
                Some(_) => Ok(()),
            }
        };

    let mut steps: Vec<SequenceStep> = Vec::new();
    let mut delta = Distribution::zero(&s.states);
    let mut diagnostics = Vec::new();
    let mut k = 0;
    let kbar = loop {
        if k > max_steps {
            return Err(AnalysisError::Internal(format!(
                "sequence did not stabilize within {max_steps} steps"
            )));
        }
        let e = fib.lift(&delta)?;
        check(k, "E", &e, &eq)?;
        if !e.is_involutive()? {
            diagnostics.push(format!("E_{k} is not involutive"));
        }
        let d = fib.largest_projectable(&e)?;
        check(k, "D", &d, &eq)?;
        let delta_next = fib.pushforward(&d)?;
        check(k + 1, "Delta", &delta_next, &xeq)?;
        if !delta.is_subset_of(&delta_next)? {
            return Err(AnalysisError::Internal(format!(
                "Delta_{k} is not contained in Delta_{}",
                k + 1
            )));
        }
        let prev_delta = steps.last().map(|s| s.delta.dim()).unwrap_or(0);
        let rho = delta.dim() - prev_delta;
        let excess = d.dim() as i64 - delta_next.dim() as i64;
        let prev_excess = steps
            .last()
            .map(|s| s.d.dim() as i64 - s.delta_next.dim() as i64)
            .unwrap_or(0);
        let mu = excess - prev_excess;
        let stop = delta_next.dim() == delta.dim();
        steps.push(SequenceStep {
            k,
            delta: delta.clone(),
            e,
            d,
            delta_next: delta_next.clone(),
            rho,
            mu,
        });
        if stop {
            break k;
        }
        delta = delta_next;
        k += 1;
    };

    let flat = steps[kbar].delta.dim() == s.n();
    let sfl = flat && steps.iter().all(|st| st.d.dim() == st.e.dim());
    Ok(FlatnessReport {
        system: s.clone(),
        chart: Some(chart),
        steps,
        kbar,
        verdict: if flat {
            Verdict::Flat
        } else {
            Verdict::NotFlat
        },
        sfl,
        reduction: None,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(states: &[&str], inputs: &[&str], f: &[&str]) -> DiscreteTimeSystem {
        DiscreteTimeSystem::from_strings("t", states, inputs, f).unwrap()
    }

    #[test]
    fn four_state_example() {
        let s = sys(
            &["x1", "x2", "x3", "x4"],
            &["u1", "u2"],
            &[
                "(x2 + x3 + 3*x4)/(u1 + 2*u2 + 1)",
                "x1*(x3 + 1)*(u1 + 2*u2 - 3) + x4 - 3*u2",
                "u1 + 2*u2",
                "x1*(x3 + 1) + u2",
            ],
        );
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.dims_delta(), vec![1, 3, 4]);
        assert_eq!(r.kbar, 3);
        assert_eq!(r.verdict, Verdict::Flat);
        assert!(!r.sfl);
        assert_eq!(r.steps[2].d.dim(), 5);
        assert_eq!(r.rho(), vec![0, 1, 2, 1]);
        assert_eq!(r.mu(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn chain_is_static_feedback_linearizable() {
        let s = sys(&["x1", "x2"], &["u"], &["x2", "u"]);
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Flat);
        assert!(r.sfl);
        assert_eq!(r.dims_delta(), vec![1, 2]);
    }

    #[test]
    fn bilinear_example_stagnates() {
        let s = sys(&["x1", "x2"], &["u"], &["u", "x2 + x1*u"]);
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotFlat);
        assert_eq!(r.kbar, 0);
        assert_eq!(r.steps[0].d.dim(), 0);
    }

    #[test]
    fn redundant_inputs_are_removed_first() {
        let s = sys(&["x1"], &["u1", "u2"], &["u1 + u2"]);
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Flat);
        assert_eq!(r.reduction.unwrap().eliminated, vec![Symbol::new("u2")]);
    }
}
