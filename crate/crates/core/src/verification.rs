//! Independent checks of flat outputs and forward simulation.
//!
//! A flat output is certified symbolically by showing that `x` and `u`
//! are functions of `y` and finitely many shifts; the numeric check replays
//! random flat-output trajectories through the parametrization and the
//! system equations.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::construction::FlatOutput;
use crate::geometry::{generic_point, jacobian_rank_at};
use crate::model::DiscreteTimeSystem;
use crate::symbolic::{solve_algebraic, Expr, QMatrix, Symbol, SymbolicError, SymbolicMatrix};

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("{0}")]
    Dimension(String),
    #[error("pole of the system equations at step {step}")]
    Pole { step: usize },
    #[error("every sample in trial {trial} hit a pole of the parametrization")]
    Resampling { trial: usize },
}

/// `x = F_x(y_[0,R-1])`, `u = F_u(y_[0,R])`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatParametrization {
    pub outputs: Vec<Symbol>,
    pub states: Vec<Symbol>,
    pub fx: Vec<Expr>,
    pub inputs: Vec<Symbol>,
    pub fu: Vec<Expr>,
    pub r: Vec<u32>,
}

impl FlatParametrization {
    pub fn new(
        outputs: Vec<Symbol>,
        states: Vec<Symbol>,
        fx: Vec<Expr>,
        inputs: Vec<Symbol>,
        fu: Vec<Expr>,
    ) -> Self {
        let r = outputs
            .iter()
            .map(|y| {
                fx.iter()
                    .chain(&fu)
                    .flat_map(|e| e.symbols())
                    .filter(|s| s.base() == *y)
                    .map(|s| s.shift())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        FlatParametrization {
            outputs,
            states,
            fx,
            inputs,
            fu,
            r,
        }
    }

    /// The jet coordinates `y_[0,R]`.
    pub fn jet(&self) -> Vec<Symbol> {
        self.outputs
            .iter()
            .zip(&self.r)
            .flat_map(|(y, r)| (0..=*r).map(move |k| y.shifted(k)))
            .collect()
    }

    /// Adds `y^j` to `F_u^j`; used to check that corrupted parametrizations
    /// are rejected.
    pub fn perturbed(&self) -> Self {
        let fu = self
            .fu
            .iter()
            .zip(&self.outputs)
            .map(|(f, y)| f + &Expr::var(*y))
            .collect();
        FlatParametrization::new(
            self.outputs.clone(),
            self.states.clone(),
            self.fx.clone(),
            self.inputs.clone(),
            fu,
        )
    }
}

/// `δ_y` applied `count` times: every jet coordinate moves up by `count`.
pub fn shift_y(g: &Expr, count: u32) -> Expr {
    if count == 0 {
        return g.clone();
    }
    g.rename(&|s| s.shifted(count))
}

/// `δ_xu` applied `count` times.
pub fn shift_xu(s: &DiscreteTimeSystem, g: &Expr, count: usize) -> Result<Expr, SymbolicError> {
    s.shift_xu_n(g, count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolicVerdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for SymbolicVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolicVerdict::Pass => "PASS",
            SymbolicVerdict::Fail => "FAIL",
            SymbolicVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// The structural properties a parametrization must have.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParametrizationChecks {
    /// `δ_y(F_x) - f ∘ F ≡ 0`.
    pub identity: bool,
    /// `(F_x, F_u)` has full row rank with respect to `y_[0,R]`.
    pub submersion: bool,
    /// `∂F_x / ∂y_[R] ≡ 0`.
    pub top_shifts_in_inputs_only: bool,
    /// `F` composed with the shifts of `φ` gives back `x` and `u`.
    pub inverts_flat_output: bool,
}

impl ParametrizationChecks {
    pub fn all(&self) -> bool {
        self.identity
            && self.submersion
            && self.top_shifts_in_inputs_only
            && self.inverts_flat_output
    }
}

#[derive(Clone, Debug)]
pub struct SymbolicReport {
    pub verdict: SymbolicVerdict,
    pub parametrization: Option<FlatParametrization>,
    pub checks: ParametrizationChecks,
    pub notes: Vec<String>,
}

fn check_dims(s: &DiscreteTimeSystem, p: &FlatParametrization) -> Result<(), VerificationError> {
    if p.fx.len() != s.n() || p.fu.len() != s.m() || p.outputs.len() != s.m() {
        return Err(VerificationError::Dimension(format!(
            "parametrization has {} state, {} input and {} output components for a system with n = {}, m = {}",
            p.fx.len(),
            p.fu.len(),
            p.outputs.len(),
            s.n(),
            s.m()
        )));
    }
    Ok(())
}

/// Checks the identity, submersivity and shift structure of `p`.
pub fn check_parametrization(
    s: &DiscreteTimeSystem,
    flat: &FlatOutput,
    p: &FlatParametrization,
) -> Result<ParametrizationChecks, VerificationError> {
    check_dims(s, p)?;
    let mut values: HashMap<Symbol, Expr> = HashMap::new();
    for (x, e) in s.states.iter().zip(&p.fx) {
        values.insert(*x, e.clone());
    }
    for (u, e) in s.inputs.iter().zip(&p.fu) {
        values.insert(*u, e.clone());
    }
    let mut identity = true;
    for (fx, f) in p.fx.iter().zip(&s.update) {
        if shift_y(fx, 1) != f.subs(&values)? {
            identity = false;
            break;
        }
    }
    let jet = p.jet();
    let all: Vec<Expr> = p.fx.iter().chain(&p.fu).cloned().collect();
    let submersion = generic_rank(&all, &jet) == s.n() + s.m();
    let top: Vec<Symbol> = p
        .outputs
        .iter()
        .zip(&p.r)
        .map(|(y, r)| y.shifted(*r))
        .collect();
    let top_shifts_in_inputs_only = p.fx.iter().all(|e| top.iter().all(|t| !e.depends_on(*t)));
    let inverts_flat_output = composes_to_identity(s, flat, p)?;
    Ok(ParametrizationChecks {
        identity,
        submersion,
        top_shifts_in_inputs_only,
        inverts_flat_output,
    })
}

fn generic_rank(exprs: &[Expr], vars: &[Symbol]) -> usize {
    let mut syms: BTreeSet<Symbol> = vars.iter().copied().collect();
    for e in exprs {
        syms.extend(e.symbols());
    }
    (0..8)
        .filter_map(|salt| {
            jacobian_rank_at(exprs, vars, &generic_point(syms.iter().copied(), salt))
        })
        .take(2)
        .max()
        .unwrap_or(0)
}

/// `F(δ^α φ) = (x, u)` identically.
fn composes_to_identity(
    s: &DiscreteTimeSystem,
    flat: &FlatOutput,
    p: &FlatParametrization,
) -> Result<bool, VerificationError> {
    let mut sub: HashMap<Symbol, Expr> = HashMap::new();
    for ((y, phi), r) in p.outputs.iter().zip(&flat.components).zip(&p.r) {
        let mut e = phi.clone();
        for k in 0..=*r {
            sub.insert(y.shifted(k), e.clone());
            if k < *r {
                e = s.shift_xu(&e)?;
            }
        }
    }
    for (x, fx) in s.states.iter().zip(&p.fx) {
        if fx.subs(&sub)? != Expr::var(*x) {
            return Ok(false);
        }
    }
    for (u, fu) in s.inputs.iter().zip(&p.fu) {
        if fu.subs(&sub)? != Expr::var(*u) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certifies `flat` as a flat output of `s`.
///
/// With a candidate parametrization the composition `F ∘ (φ, δφ, …)` is
/// checked directly. Otherwise the stacked equations `y_[α] = δ^α φ` are
/// solved for `x` and `u` with a growing number of shifts; a generic rank
/// test decides beforehand whether a solution can exist at all.
pub fn verify_flat_output_symbolic(
    s: &DiscreteTimeSystem,
    flat: &FlatOutput,
    candidate: Option<&FlatParametrization>,
) -> Result<SymbolicReport, VerificationError> {
    if flat.components.len() != s.m() {
        return Err(VerificationError::Dimension(format!(
            "a flat output needs {} components, got {}",
            s.m(),
            flat.components.len()
        )));
    }
    let mut notes = Vec::new();
    if let Some(p) = candidate {
        let checks = check_parametrization(s, flat, p)?;
        if checks.all() {
            return Ok(SymbolicReport {
                verdict: SymbolicVerdict::Pass,
                parametrization: Some(p.clone()),
                checks,
                notes,
            });
        }
        notes.push("the supplied parametrization does not verify; solving from scratch".into());
    }
    let n = s.n();
    let q = flat.q as usize;
    let cap = n + q + 1;
    let mut shifted: Vec<Vec<Expr>> = vec![flat.components.clone()];
    for bound in 0..=cap {
        if bound > 0 {
            let next = shifted[bound - 1]
                .iter()
                .map(|e| s.shift_xu(e))
                .collect::<Result<Vec<_>, _>>()?;
            shifted.push(next);
        }
        let unknowns: Vec<Symbol> = s
            .states
            .iter()
            .copied()
            .chain(
                (0..=(q + bound) as u32).flat_map(|k| s.inputs.iter().map(move |u| u.shifted(k))),
            )
            .collect();
        let exprs: Vec<Expr> = shifted.iter().flatten().cloned().collect();
        match expressible(&exprs, &unknowns, n + s.m()) {
            Some(true) => {}
            Some(false) => continue,
            None => {
                notes.push(format!(
                    "shift bound {bound}: every sample point hit a pole"
                ));
                continue;
            }
        }
        let mut eqs = Vec::new();
        for (a, row) in shifted.iter().enumerate() {
            for (y, e) in flat.names.iter().zip(row) {
                eqs.push(&Expr::var(y.shifted(a as u32)) - e);
            }
        }
        let sol = match solve_algebraic(&eqs, &unknowns) {
            Ok(sol) => sol,
            Err(SymbolicError::Unsupported { .. }) => {
                notes.push(
                    "the stacked equations involve transcendental functions of the unknowns".into(),
                );
                return inconclusive(notes);
            }
            Err(e) => return Err(e.into()),
        };
        if sol.inconsistent {
            notes.push("the stacked equations are inconsistent".into());
            return Ok(SymbolicReport {
                verdict: SymbolicVerdict::Fail,
                parametrization: None,
                checks: ParametrizationChecks::default(),
                notes,
            });
        }
        let wanted: Vec<Symbol> = s.variables();
        let free_of_unknowns = |e: &Expr| unknowns.iter().all(|u| !e.depends_on(*u));
        let got: Option<Vec<Expr>> = wanted
            .iter()
            .map(|v| sol.get(*v).filter(|e| free_of_unknowns(e)).cloned())
            .collect();
        let Some(values) = got else {
            notes.push(format!(
                "shift bound {bound}: x and u are determined by the flat output but elimination did not isolate them"
            ));
            return inconclusive(notes);
        };
        let p = FlatParametrization::new(
            flat.names.clone(),
            s.states.clone(),
            values[..n].to_vec(),
            s.inputs.clone(),
            values[n..].to_vec(),
        );
        let checks = check_parametrization(s, flat, &p)?;
        let verdict = if checks.all() {
            SymbolicVerdict::Pass
        } else {
            notes.push("the eliminated parametrization fails its identity checks".into());
            SymbolicVerdict::Inconclusive
        };
        return Ok(SymbolicReport {
            verdict,
            parametrization: Some(p),
            checks,
            notes,
        });
    }
    notes.push(format!(
        "x and u are not functions of the flat output and its first {cap} shifts"
    ));
    Ok(SymbolicReport {
        verdict: SymbolicVerdict::Fail,
        parametrization: None,
        checks: ParametrizationChecks::default(),
        notes,
    })
}

fn inconclusive(notes: Vec<String>) -> Result<SymbolicReport, VerificationError> {
    Ok(SymbolicReport {
        verdict: SymbolicVerdict::Inconclusive,
        parametrization: None,
        checks: ParametrizationChecks::default(),
        notes,
    })
}

/// Whether the first `k` unknowns lie in the span of the differentials of
/// `exprs`, tested at deterministic sample points.
fn expressible(exprs: &[Expr], unknowns: &[Symbol], k: usize) -> Option<bool> {
    let mut syms: BTreeSet<Symbol> = unknowns.iter().copied().collect();
    for e in exprs {
        syms.extend(e.symbols());
    }
    let jac = SymbolicMatrix::jacobian(exprs, unknowns);
    let mut answers = Vec::new();
    for salt in 0..8 {
        let pt = generic_point(syms.iter().copied(), salt);
        let Some(j) = jac.eval_rational(&pt) else {
            continue;
        };
        let base = j.rank();
        let mut rows: Vec<Vec<BigRational>> = (0..j.nrows()).map(|i| j.row(i)).collect();
        for i in 0..k {
            let mut r = vec![BigRational::zero(); unknowns.len()];
            r[i] = BigRational::from_integer(BigInt::from(1));
            rows.push(r);
        }
        let ext = QMatrix::from_rows(rows, unknowns.len()).rank();
        answers.push(ext == base);
        if answers.len() == 2 {
            break;
        }
    }
    if answers.is_empty() {
        None
    } else {
        Some(answers.iter().all(|a| *a))
    }
}

#[derive(Clone, Debug)]
pub struct NumericOptions {
    pub trials: usize,
    pub horizon: usize,
    pub tol: f64,
    pub seed: u64,
    pub radius: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            trials: 20,
            horizon: 20,
            tol: 1e-9,
            seed: 0,
            radius: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub index: usize,
    /// `max_k ‖x(k+1) - f(x(k), u(k))‖_∞`.
    pub residual: f64,
    /// `max_k ‖φ(x(k), u(k), …) - y(k)‖_∞`.
    pub replay_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct NumericReport {
    pub trials: Vec<TrialResult>,
    pub max_residual: f64,
    pub pass: bool,
}

/// State and input trajectories induced by a flat-output trajectory.
#[derive(Clone, Debug)]
pub struct Replay {
    pub x: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub residual: f64,
    pub replay_residual: f64,
}

fn eval_at(e: &Expr, values: &HashMap<Symbol, f64>) -> f64 {
    e.eval_f64(&|s| values.get(&s).copied().unwrap_or(f64::NAN))
}

/// Maps `y(0), …, y(L-1)` through `F` and measures how well the result
/// satisfies the system equations over `horizon` steps. `None` when a pole
/// is hit.
pub fn replay(
    s: &DiscreteTimeSystem,
    flat: &FlatOutput,
    p: &FlatParametrization,
    y: &[Vec<f64>],
    horizon: usize,
) -> Option<Replay> {
    let q = flat.q as usize;
    let rmax = p.r.iter().copied().max().unwrap_or(0) as usize;
    if y.len() < horizon + q + rmax + 1 {
        return None;
    }
    let jet_at = |k: usize| -> HashMap<Symbol, f64> {
        let mut m = HashMap::new();
        for (j, name) in p.outputs.iter().enumerate() {
            for a in 0..=rmax {
                m.insert(name.shifted(a as u32), y[k + a][j]);
            }
        }
        m
    };
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for k in 0..=horizon + q {
        let jet = jet_at(k);
        let x: Vec<f64> = p.fx.iter().map(|e| eval_at(e, &jet)).collect();
        let u: Vec<f64> = p.fu.iter().map(|e| eval_at(e, &jet)).collect();
        if x.iter().chain(&u).any(|v| !v.is_finite()) {
            return None;
        }
        xs.push(x);
        us.push(u);
    }
    let mut residual: f64 = 0.0;
    for k in 0..horizon {
        let mut vals = HashMap::new();
        for (i, x) in s.states.iter().enumerate() {
            vals.insert(*x, xs[k][i]);
        }
        for (j, u) in s.inputs.iter().enumerate() {
            vals.insert(*u, us[k][j]);
        }
        for (i, f) in s.update.iter().enumerate() {
            let v = eval_at(f, &vals);
            if !v.is_finite() {
                return None;
            }
            residual = residual.max((xs[k + 1][i] - v).abs());
        }
    }
    let mut replay_residual: f64 = 0.0;
    for k in 0..=horizon {
        let mut vals = HashMap::new();
        for (i, x) in s.states.iter().enumerate() {
            vals.insert(*x, xs[k][i]);
        }
        for a in 0..=q {
            for (j, u) in s.inputs.iter().enumerate() {
                vals.insert(u.shifted(a as u32), us[k + a][j]);
            }
        }
        for (j, phi) in flat.components.iter().enumerate() {
            let v = eval_at(phi, &vals);
            if !v.is_finite() {
                return None;
            }
            replay_residual = replay_residual.max((v - y[k][j]).abs());
        }
    }
    xs.truncate(horizon + 1);
    us.truncate(horizon + 1);
    Some(Replay {
        x: xs,
        u: us,
        residual,
        replay_residual,
    })
}

/// `φ` at the equilibrium.
pub fn equilibrium_output(s: &DiscreteTimeSystem, flat: &FlatOutput) -> Vec<f64> {
    let mut vals: HashMap<Symbol, f64> = HashMap::new();
    for (x, v) in s.states.iter().zip(&s.x0) {
        vals.insert(*x, v.to_f64().unwrap_or(f64::NAN));
    }
    for a in 0..=flat.q {
        for (u, v) in s.inputs.iter().zip(&s.u0) {
            vals.insert(u.shifted(a), v.to_f64().unwrap_or(f64::NAN));
        }
    }
    flat.components.iter().map(|e| eval_at(e, &vals)).collect()
}

const MAX_RESAMPLES: usize = 50;

/// Replays random flat-output trajectories near the equilibrium image.
///
/// Trial `i` draws from its own ChaCha stream derived from `seed` and `i`,
/// so results do not depend on how trials are scheduled.
pub fn verify_flat_output_numeric(
    s: &DiscreteTimeSystem,
    flat: &FlatOutput,
    p: &FlatParametrization,
    opts: &NumericOptions,
) -> Result<NumericReport, VerificationError> {
    check_dims(s, p)?;
    let y0 = equilibrium_output(s, flat);
    let rmax = p.r.iter().copied().max().unwrap_or(0) as usize;
    let len = opts.horizon + flat.q as usize + rmax + 1;
    let results: Vec<Result<TrialResult, VerificationError>> = (0..opts.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            for _ in 0..MAX_RESAMPLES {
                let y: Vec<Vec<f64>> = (0..len)
                    .map(|_| {
                        y0.iter()
                            .map(|c| c + rng.gen_range(-opts.radius..=opts.radius))
                            .collect()
                    })
                    .collect();
                if let Some(r) = replay(s, flat, p, &y, opts.horizon) {
                    let pass = r.residual <= opts.tol && r.replay_residual <= opts.tol;
                    return Ok(TrialResult {
                        index: i,
                        residual: r.residual,
                        replay_residual: r.replay_residual,
                        pass,
                    });
                }
            }
            Err(VerificationError::Resampling { trial: i })
        })
        .collect();
    let trials: Vec<TrialResult> = results.into_iter().collect::<Result<_, _>>()?;
    let max_residual = trials
        .iter()
        .map(|t| t.residual.max(t.replay_residual))
        .fold(0.0, f64::max);
    let pass = trials.iter().all(|t| t.pass);
    Ok(NumericReport {
        trials,
        max_residual,
        pass,
    })
}

/// A number produced by simulation: exact while possible.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(v) => *v,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Float(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `x(0), …, x(K)`.
    pub x: Vec<Vec<Value>>,
    /// `u(0), …, u(K-1)`.
    pub u: Vec<Vec<Value>>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.u.len()
    }

    /// CSV with one row per step; the last row has no input.
    pub fn to_csv(&self, s: &DiscreteTimeSystem) -> String {
        let mut out = String::from("k");
        for v in s.states.iter().chain(&s.inputs) {
            out.push(',');
            out.push_str(v.name());
        }
        out.push('\n');
        for (k, x) in self.x.iter().enumerate() {
            out.push_str(&k.to_string());
            for v in x {
                out.push(',');
                out.push_str(&v.to_string());
            }
            match self.u.get(k) {
                Some(u) => {
                    for v in u {
                        out.push(',');
                        out.push_str(&v.to_string());
                    }
                }
                None => out.push_str(&",".repeat(s.m())),
            }
            out.push('\n');
        }
        out
    }
}

/// Exact rationals grow quickly under nonlinear maps; beyond this many bits
/// the simulation continues in floating point.
const EXACT_BITS: u64 = 1024;

fn too_big(r: &BigRational) -> bool {
    r.numer().bits() > EXACT_BITS || r.denom().bits() > EXACT_BITS
}

/// Evaluates `x(k+1) = f(x(k), u(k))`.
pub fn simulate(
    s: &DiscreteTimeSystem,
    x0: &[Value],
    inputs: &[Vec<Value>],
) -> Result<Trajectory, VerificationError> {
    if x0.len() != s.n() {
        return Err(VerificationError::Dimension(format!(
            "initial state has {} components, expected {}",
            x0.len(),
            s.n()
        )));
    }
    if let Some(k) = inputs.iter().position(|u| u.len() != s.m()) {
        return Err(VerificationError::Dimension(format!(
            "input at step {k} has {} components, expected {}",
            inputs[k].len(),
            s.m()
        )));
    }
    let mut xs = vec![x0.to_vec()];
    for (k, u) in inputs.iter().enumerate() {
        let x = &xs[k];
        let all_exact = x.iter().chain(u).all(|v| matches!(v, Value::Exact(_)))
            && s.update.iter().all(Expr::is_rational);
        let next = if all_exact {
            let mut vals = HashMap::new();
            for (sym, v) in s.states.iter().zip(x).chain(s.inputs.iter().zip(u)) {
                if let Value::Exact(r) = v {
                    vals.insert(*sym, r.clone());
                }
            }
            s.update
                .iter()
                .map(|f| {
                    f.eval_rational(&vals)
                        .map(|r| {
                            if too_big(&r) {
                                Value::Float(r.to_f64().unwrap_or(f64::NAN))
                            } else {
                                Value::Exact(r)
                            }
                        })
                        .ok_or(VerificationError::Pole { step: k })
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            let mut vals = HashMap::new();
            for (sym, v) in s.states.iter().zip(x).chain(s.inputs.iter().zip(u)) {
                vals.insert(*sym, v.to_f64());
            }
            s.update
                .iter()
                .map(|f| {
                    let v = eval_at(f, &vals);
                    if v.is_finite() {
                        Ok(Value::Float(v))
                    } else {
                        Err(VerificationError::Pole { step: k })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        xs.push(next);
    }
    Ok(Trajectory {
        x: xs,
        u: inputs.to_vec(),
    })
}
