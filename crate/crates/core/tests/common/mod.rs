//! Model loading, system transformations and the bodies of the randomized
//! property checks shared by the property suites and the acceptance runner.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use flatcheck::analysis::{analyze, AnalysisOptions, FlatnessReport, Verdict};
use flatcheck::construction::construct;
use flatcheck::geometry::chart::combinations;
use flatcheck::geometry::{lie_bracket, AdaptedChart, Distribution, Fibration};
use flatcheck::model::DiscreteTimeSystem;
use flatcheck::symbolic::parse::any_symbol;
use flatcheck::symbolic::{parse_expr, Expr, Symbol};
use flatcheck::verification::{verify_flat_output_symbolic, SymbolicVerdict};

pub fn model_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(format!("{name}.sys"))
}

pub fn model(name: &str) -> DiscreteTimeSystem {
    let text = std::fs::read_to_string(model_path(name)).unwrap();
    DiscreteTimeSystem::parse(&text).unwrap()
}

pub fn p(s: &str) -> Expr {
    parse_expr(s, &any_symbol).unwrap()
}

pub const FLAT_CORPUS: [&str; 5] = [
    "chain",
    "sfl_quadratic",
    "four_state",
    "shift_register",
    "redundant_input",
];
pub const CORPUS: [&str; 6] = [
    "chain",
    "sfl_quadratic",
    "four_state",
    "shift_register",
    "redundant_input",
    "nonflat_bilinear",
];

pub fn report(s: &DiscreteTimeSystem) -> FlatnessReport {
    analyze(s, &AnalysisOptions::default()).unwrap()
}

/// Builds a system with a zero equilibrium from update expressions.
pub fn system(
    name: &str,
    states: Vec<Symbol>,
    inputs: Vec<Symbol>,
    update: Vec<Expr>,
) -> DiscreteTimeSystem {
    DiscreteTimeSystem {
        name: name.into(),
        x0: vec![BigRational::zero(); states.len()],
        u0: vec![BigRational::zero(); inputs.len()],
        states,
        inputs,
        update,
    }
}

/// A unimodular integer matrix `L U` with unit diagonals, from `n²` small
/// integers.
pub fn unimodular(n: usize, entries: &[i64]) -> Vec<Vec<i64>> {
    let mut l = vec![vec![0i64; n]; n];
    let mut u = vec![vec![0i64; n]; n];
    let mut it = entries.iter().copied().cycle();
    for i in 0..n {
        l[i][i] = 1;
        u[i][i] = 1;
        for v in &mut l[i][..i] {
            *v = it.next().unwrap();
        }
        for v in &mut u[i][i + 1..] {
            *v = it.next().unwrap();
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| l[i][k] * u[k][j]).sum())
                .collect()
        })
        .collect()
}

/// A signed permutation followed by the shear `z_i += c·z_j`.
#[derive(Clone, Debug)]
pub struct StateChange {
    pub order: Vec<usize>,
    pub flips: Vec<bool>,
    pub shear: (usize, usize, i64),
}

pub fn state_change() -> impl Strategy<Value = StateChange> {
    (
        Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
        prop::collection::vec(any::<bool>(), 8),
        (0..8usize, 0..8usize, -2i64..=2),
    )
        .prop_map(|(order, flips, shear)| StateChange {
            order,
            flips,
            shear,
        })
}

impl StateChange {
    pub fn matrix(&self, n: usize) -> Vec<Vec<i64>> {
        let order: Vec<usize> = self.order.iter().copied().filter(|i| *i < n).collect();
        let mut t = vec![vec![0i64; n]; n];
        for (i, j) in order.iter().enumerate() {
            t[i][*j] = if self.flips[i] { -1 } else { 1 };
        }
        let (a, b, c) = (self.shear.0 % n, self.shear.1 % n, self.shear.2);
        if a != b {
            for row in t.iter_mut() {
                row[b] += c * row[a];
            }
        }
        t
    }
}

/// Inverse of a unimodular integer matrix by exact Gauss-Jordan elimination.
pub fn inverse(t: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = t.len();
    let mut a: Vec<Vec<BigRational>> = t
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> = r
                .iter()
                .map(|v| BigRational::from_integer((*v).into()))
                .collect();
            row.extend((0..n).map(|j| BigRational::from_integer(((i == j) as i64).into())));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|r| !a[*r][c].is_zero()).unwrap();
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(&pivot_row) {
                    *v = &*v - &(&f * pv);
                }
            }
        }
    }
    a.iter()
        .map(|r| {
            r[n..]
                .iter()
                .map(|v| v.to_integer().try_into().unwrap())
                .collect()
        })
        .collect()
}

/// `z⁺ = T⁻¹ f(T z, u)` in new states `z1, …, zn`.
pub fn linear_change(s: &DiscreteTimeSystem, t: &[Vec<i64>]) -> DiscreteTimeSystem {
    let n = s.n();
    let z: Vec<Symbol> = (1..=n).map(|i| Symbol::new(&format!("z{i}"))).collect();
    let sub: HashMap<Symbol, Expr> = s
        .states
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let e = (0..n).fold(Expr::zero(), |acc, j| {
                &acc + &(&Expr::int(t[i][j]) * &Expr::var(z[j]))
            });
            (*x, e)
        })
        .collect();
    let fz: Vec<Expr> = s.update.iter().map(|f| f.subs(&sub).unwrap()).collect();
    let ti = inverse(t);
    let update = (0..n)
        .map(|i| {
            (0..n).fold(Expr::zero(), |acc, j| {
                &acc + &(&Expr::int(ti[i][j]) * &fz[j])
            })
        })
        .collect();
    system(&format!("{}_changed", s.name), z, s.inputs.clone(), update)
}

/// Appends the integrator `w⁺ = v` as a new state and input.
pub fn extend_integrator(s: &DiscreteTimeSystem) -> DiscreteTimeSystem {
    let w = Symbol::new("w_ext");
    let v = Symbol::new("v_ext");
    let mut states = s.states.clone();
    states.push(w);
    let mut inputs = s.inputs.clone();
    inputs.push(v);
    let mut update = s.update.clone();
    update.push(Expr::var(v));
    system(&format!("{}_extended", s.name), states, inputs, update)
}

/// Replaces the first input `u` by `u + c·v^d` with a new input `v`.
pub fn add_redundant_input(s: &DiscreteTimeSystem, c: i64, d: i32) -> DiscreteTimeSystem {
    let v = Symbol::new("v_red");
    let u = s.inputs[0];
    let mix = &Expr::var(u) + &(&Expr::int(c) * &Expr::var(v).pow(d).unwrap());
    let sub: HashMap<Symbol, Expr> = [(u, mix)].into_iter().collect();
    let mut inputs = s.inputs.clone();
    inputs.push(v);
    let update = s.update.iter().map(|f| f.subs(&sub).unwrap()).collect();
    system(
        &format!("{}_redundant", s.name),
        s.states.clone(),
        inputs,
        update,
    )
}

/// Random polynomial expression in `vars` from `(coefficient, exponents)`
/// terms.
pub fn polynomial(vars: &[Symbol], terms: &[(i64, Vec<u32>)]) -> Expr {
    terms.iter().fold(Expr::zero(), |acc, (c, exps)| {
        let mono = vars.iter().zip(exps).fold(Expr::int(*c), |m, (v, e)| {
            &m * &Expr::var(*v).pow(*e as i32).unwrap()
        });
        &acc + &mono
    })
}

pub fn terms(nvars: usize) -> impl Strategy<Value = Vec<(i64, Vec<u32>)>> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0u32..=2, nvars)), 0..4)
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn vec_sub(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vec_add3(a: &[Expr], b: &[Expr], c: &[Expr]) -> Vec<Expr> {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| &(x + y) + z)
        .collect()
}

// 1. Lie bracket antisymmetry and the Jacobi identity.

pub type FieldTriple = [Vec<Vec<(i64, Vec<u32>)>>; 3];

pub fn field_triple() -> impl Strategy<Value = FieldTriple> {
    let field = || prop::collection::vec(terms(3), 3);
    [field(), field(), field()]
}

pub fn prop_bracket(fields: &FieldTriple) -> Result<(), TestCaseError> {
    let coords: Vec<Symbol> = ["a1", "a2", "a3"].iter().map(|n| Symbol::new(n)).collect();
    let f: Vec<Vec<Expr>> = fields
        .iter()
        .map(|v| v.iter().map(|t| polynomial(&coords, t)).collect())
        .collect();
    let (u, v, w) = (&f[0], &f[1], &f[2]);
    let uv = lie_bracket(&coords, u, v);
    let vu = lie_bracket(&coords, v, u);
    if !uv.iter().zip(&vu).all(|(a, b)| (a + b).is_zero()) {
        return Err(fail("bracket is not antisymmetric".into()));
    }
    let j = vec_add3(
        &lie_bracket(&coords, u, &lie_bracket(&coords, v, w)),
        &lie_bracket(&coords, v, &lie_bracket(&coords, w, u)),
        &lie_bracket(&coords, w, &lie_bracket(&coords, u, v)),
    );
    if !j.iter().all(Expr::is_zero) {
        return Err(fail(format!("Jacobi identity fails: {j:?}")));
    }
    Ok(())
}

// 2. f_*[v, w] = [f_*v, f_*w] for projectable v, w.

#[derive(Clone, Debug)]
pub struct PushCase {
    pub model: usize,
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub c1: Vec<i64>,
    pub c2: Vec<i64>,
}

pub fn push_case() -> impl Strategy<Value = PushCase> {
    (
        0..FLAT_CORPUS.len() - 1,
        0usize..4,
        0usize..8,
        0usize..8,
        prop::collection::vec(-2i64..=2, 5),
        prop::collection::vec(-2i64..=2, 5),
    )
        .prop_map(|(model, k, i, j, c1, c2)| PushCase {
            model,
            k,
            i,
            j,
            c1,
            c2,
        })
}

/// `c₀ + Σ cᵢ fᵢ(x, u)`: a function constant on the fibres of `f`.
fn fibre_constant(s: &DiscreteTimeSystem, c: &[i64]) -> (Expr, Expr) {
    let mut on_xu = Expr::int(c[0]);
    let mut on_x = Expr::int(c[0]);
    for ((f, x), ci) in s.update.iter().zip(&s.states).zip(&c[1..]) {
        on_xu = &on_xu + &(&Expr::int(*ci) * f);
        on_x = &on_x + &(&Expr::int(*ci) * &Expr::var(*x));
    }
    (on_xu, on_x)
}

pub fn prop_pushforward_bracket(case: &PushCase) -> Result<(), TestCaseError> {
    let s = model(FLAT_CORPUS[case.model]);
    let r = report(&s);
    let fib = Fibration::new(&r.system, r.chart.clone().unwrap());
    let step = &r.steps[case.k % r.steps.len()];
    let fields: Vec<Vec<Expr>> = step
        .d
        .basis()
        .iter()
        .filter(|v| fib.is_projectable(v).unwrap())
        .cloned()
        .collect();
    if fields.is_empty() {
        return Ok(());
    }
    let (g1, h1) = fibre_constant(&s, &case.c1);
    let (g2, h2) = fibre_constant(&s, &case.c2);
    let v: Vec<Expr> = fields[case.i % fields.len()]
        .iter()
        .map(|e| &g1 * e)
        .collect();
    let w: Vec<Expr> = fields[case.j % fields.len()]
        .iter()
        .map(|e| &g2 * e)
        .collect();
    let pv = fib.pushforward_field(&v).map_err(|e| fail(e.to_string()))?;
    let pw = fib.pushforward_field(&w).map_err(|e| fail(e.to_string()))?;
    let base_v = fib
        .pushforward_field(&fields[case.i % fields.len()])
        .unwrap();
    let scaled: Vec<Expr> = base_v.iter().map(|e| &h1 * e).collect();
    if vec_sub(&pv, &scaled).iter().any(|e| !e.is_zero()) {
        return Err(fail(
            "pushforward is not linear over fibre-constant functions".into(),
        ));
    }
    let base_w = fib
        .pushforward_field(&fields[case.j % fields.len()])
        .unwrap();
    let scaled: Vec<Expr> = base_w.iter().map(|e| &h2 * e).collect();
    if vec_sub(&pw, &scaled).iter().any(|e| !e.is_zero()) {
        return Err(fail(
            "pushforward is not linear over fibre-constant functions".into(),
        ));
    }
    let vw = lie_bracket(fib.vars(), &v, &w);
    let lhs = fib
        .pushforward_field(&vw)
        .map_err(|e| fail(format!("bracket not projectable: {e}")))?;
    let rhs = lie_bracket(&r.system.states, &pv, &pw);
    if vec_sub(&lhs, &rhs).iter().any(|e| !e.is_zero()) {
        return Err(fail(format!(
            "f_*[v,w] = {lhs:?} but [f_*v, f_*w] = {rhs:?}"
        )));
    }
    Ok(())
}

// 3. The largest projectable subdistribution does not depend on the chart
// or the basis it is computed from.

#[derive(Clone, Debug)]
pub struct ChartCase {
    pub model: usize,
    pub chart: usize,
    pub k: usize,
    pub mix: Vec<i64>,
}

pub fn chart_case() -> impl Strategy<Value = ChartCase> {
    (
        0..CORPUS.len(),
        0usize..64,
        0usize..4,
        prop::collection::vec(-3i64..=3, 64),
    )
        .prop_map(|(model, chart, k, mix)| ChartCase {
            model,
            chart,
            k,
            mix,
        })
}

fn chart_choice(s: &DiscreteTimeSystem, idx: usize) -> Option<AdaptedChart> {
    let vars = s.variables();
    let valid: Vec<AdaptedChart> = combinations(vars.len(), s.m())
        .into_iter()
        .filter_map(|c| {
            let xi: Vec<Symbol> = c.iter().map(|i| vars[*i]).collect();
            AdaptedChart::build(s, Some(&xi)).ok()
        })
        .collect();
    if valid.is_empty() {
        None
    } else {
        Some(valid[idx % valid.len()].clone())
    }
}

/// `E` mixed by an upper bidiagonal matrix with `±1` on the diagonal and
/// state-dependent entries `c·(1 + x)` above it.
fn mixed_fields(d: &Distribution, mix: &[i64]) -> Vec<Vec<Expr>> {
    let b = d.basis();
    let r = b.len();
    let coords = d.coords();
    (0..r)
        .map(|i| {
            let sign = if mix[i + r] % 2 == 0 {
                Expr::one()
            } else {
                Expr::int(-1)
            };
            let mut v: Vec<Expr> = b[i].iter().map(|e| &sign * e).collect();
            if i + 1 < r && mix[i] != 0 {
                let scale =
                    &Expr::int(mix[i]) * &(&Expr::one() + &Expr::var(coords[i % coords.len()]));
                for (vk, rk) in v.iter_mut().zip(&b[i + 1]) {
                    *vk = &*vk + &(&scale * rk);
                }
            }
            v
        })
        .collect()
}

pub fn prop_uniqueness(case: &ChartCase) -> Result<(), TestCaseError> {
    let s = model(CORPUS[case.model]);
    let r = report(&s);
    if r.steps.is_empty() {
        return Ok(());
    }
    let step = &r.steps[case.k % r.steps.len()];
    let Some(chart) = chart_choice(&r.system, case.chart) else {
        return Ok(());
    };
    let fib = Fibration::new(&r.system, chart);
    let e = Distribution::span(fib.vars(), mixed_fields(&step.e, &case.mix)).unwrap();
    if e != step.e {
        return Err(fail("basis mixing changed the span".into()));
    }
    let d = fib
        .largest_projectable(&e)
        .map_err(|e| fail(e.to_string()))?;
    if d != step.d {
        return Err(fail(format!(
            "largest projectable part differs with xi = {:?}: {:?} vs {:?}",
            fib.chart.xi_source,
            d.basis(),
            step.d.basis()
        )));
    }
    Ok(())
}

// 4. Idempotence of the largest projectable subdistribution.

#[derive(Clone, Debug)]
pub struct IdemCase {
    pub model: usize,
    pub k: usize,
    pub keep: Vec<bool>,
    pub extra: Vec<i64>,
}

pub fn idem_case() -> impl Strategy<Value = IdemCase> {
    (
        0..CORPUS.len(),
        0usize..4,
        prop::collection::vec(any::<bool>(), 8),
        prop::collection::vec(-2i64..=2, 8),
    )
        .prop_map(|(model, k, keep, extra)| IdemCase {
            model,
            k,
            keep,
            extra,
        })
}

pub fn prop_idempotence(case: &IdemCase) -> Result<(), TestCaseError> {
    let s = model(CORPUS[case.model]);
    let r = report(&s);
    let Some(chart) = r.chart.clone() else {
        return Ok(());
    };
    let fib = Fibration::new(&r.system, chart);
    let step = &r.steps[case.k % r.steps.len()];
    let vars = fib.vars().to_vec();
    let mut fields: Vec<Vec<Expr>> = step
        .e
        .basis()
        .iter()
        .zip(&case.keep)
        .filter(|(_, k)| **k)
        .map(|(v, _)| v.clone())
        .collect();
    let extra: Vec<Expr> = vars
        .iter()
        .zip(case.extra.iter().cycle())
        .map(|(v, c)| &Expr::int(*c) * &Expr::var(*v))
        .collect();
    fields.push(extra);
    let d = Distribution::span(&vars, fields).unwrap();
    let once = fib
        .largest_projectable(&d)
        .map_err(|e| fail(e.to_string()))?;
    let twice = fib
        .largest_projectable(&once)
        .map_err(|e| fail(e.to_string()))?;
    if once != twice {
        return Err(fail(
            "largest projectable computation is not idempotent".into(),
        ));
    }
    if !once.is_subset_of(&d).unwrap() {
        return Err(fail("result is not contained in the input".into()));
    }
    if !fib.is_projectable_distribution(&once).unwrap() {
        return Err(fail("result is not projectable".into()));
    }
    Ok(())
}

// 5. Verdict and dimensions are invariant under linear state changes.

#[derive(Clone, Debug)]
pub struct ChangeCase {
    pub model: usize,
    pub change: StateChange,
}

pub fn change_case() -> impl Strategy<Value = ChangeCase> {
    (0..CORPUS.len(), state_change()).prop_map(|(model, change)| ChangeCase { model, change })
}

pub fn prop_linear_change(case: &ChangeCase) -> Result<(), TestCaseError> {
    let s = model(CORPUS[case.model]);
    let t = case.change.matrix(s.n());
    let z = linear_change(&s, &t);
    let a = report(&s);
    let b =
        analyze(&z, &AnalysisOptions::default()).map_err(|e| fail(format!("{e} for T = {t:?}")))?;
    let key = |r: &FlatnessReport| {
        (
            r.verdict,
            r.kbar,
            r.sfl,
            r.dims_delta(),
            r.steps
                .iter()
                .map(|s| (s.e.dim(), s.d.dim()))
                .collect::<Vec<_>>(),
        )
    };
    if key(&a) != key(&b) {
        return Err(fail(format!("T = {t:?}: {:?} vs {:?}", key(&a), key(&b))));
    }
    Ok(())
}

// 6. Appending an integrator preserves the verdict.

pub fn prop_integrator_extension(case: &ChangeCase) -> Result<(), TestCaseError> {
    let s = model(CORPUS[case.model]);
    let base = linear_change(&s, &case.change.matrix(s.n()));
    let ext = extend_integrator(&base);
    let a = report(&base);
    let b = analyze(&ext, &AnalysisOptions::default()).map_err(|e| fail(e.to_string()))?;
    if a.verdict != b.verdict {
        return Err(fail(format!(
            "verdict changed from {} to {}",
            a.verdict, b.verdict
        )));
    }
    if b.verdict == Verdict::Flat {
        let c = construct(&b, 3).map_err(|e| fail(e.to_string()))?;
        let v =
            verify_flat_output_symbolic(&ext, &c.flat_output, Some(&c.parametrization)).unwrap();
        if v.verdict != SymbolicVerdict::Pass {
            return Err(fail(
                "flat output of the extended system does not verify".into(),
            ));
        }
    }
    Ok(())
}

// 7. A redundant input becomes a flat-output component.

#[derive(Clone, Debug)]
pub struct RedundantCase {
    pub model: usize,
    pub c: i64,
    pub d: i32,
    pub change: StateChange,
}

pub fn redundant_case() -> impl Strategy<Value = RedundantCase> {
    (
        0..FLAT_CORPUS.len() - 1,
        prop_oneof![-3i64..=-1, 1i64..=3],
        1i32..=3,
        state_change(),
    )
        .prop_map(|(model, c, d, change)| RedundantCase {
            model,
            c,
            d,
            change,
        })
}

pub fn prop_redundant_input(case: &RedundantCase) -> Result<(), TestCaseError> {
    let s = model(FLAT_CORPUS[case.model]);
    let base = linear_change(&s, &case.change.matrix(s.n()));
    let red = add_redundant_input(&base, case.c, case.d);
    let r = analyze(&red, &AnalysisOptions::default()).map_err(|e| fail(e.to_string()))?;
    if r.verdict != Verdict::Flat || r.reduction.is_none() {
        return Err(fail(
            "redundant input not detected or verdict changed".into(),
        ));
    }
    let c = construct(&r, 3).map_err(|e| fail(e.to_string()))?;
    let eliminated = &r.reduction.as_ref().unwrap().eliminated;
    for u in eliminated {
        if !c.flat_output.components.contains(&Expr::var(*u)) {
            return Err(fail(format!(
                "eliminated input {u} is not a flat-output component"
            )));
        }
    }
    let v = verify_flat_output_symbolic(&red, &c.flat_output, Some(&c.parametrization)).unwrap();
    if v.verdict != SymbolicVerdict::Pass {
        return Err(fail(format!(
            "extended flat output does not verify: {:?}",
            v.notes
        )));
    }
    Ok(())
}
