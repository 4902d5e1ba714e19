//! Runs every acceptance criterion and prints one PASS/FAIL line for each.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use common::*;
use flatcheck::analysis::{analyze, AnalysisOptions, FlatnessReport, Verdict};
use flatcheck::construction::{construct, Construction};
use flatcheck::model::DiscreteTimeSystem;
use flatcheck::symbolic::{Expr, Symbol};
use flatcheck::verification::{
    check_parametrization, verify_flat_output_numeric, verify_flat_output_symbolic, NumericOptions,
    SymbolicVerdict,
};

type Check = Result<String, String>;

fn exit_code(cmd: &str, model: &str) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_flatcheck"))
        .args([cmd, model_path(model).to_str().unwrap()])
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn four_state() -> (DiscreteTimeSystem, FlatnessReport, Construction) {
    let s = model("four_state");
    let r = report(&s);
    let c = construct(&r, 3).unwrap();
    (s, r, c)
}

fn analysis_reproduction() -> Check {
    let s = model("four_state");
    let start = Instant::now();
    let r = analyze(&s, &AnalysisOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        r.dims_delta() == vec![1, 3, 4],
        format!("dims {:?}", r.dims_delta()),
    )?;
    ensure(r.kbar == 3, format!("kbar {}", r.kbar))?;
    ensure(r.verdict == Verdict::Flat && !r.sfl, "verdict or sfl")?;
    ensure(
        r.steps[2].d.dim() == 5,
        format!("dim D2 = {}", r.steps[2].d.dim()),
    )?;
    let d0 = r.steps[0].d.basis();
    let expected: Vec<Expr> = ["0", "0", "0", "0", "1", "-1/2"]
        .iter()
        .map(|e| p(e))
        .collect();
    ensure(
        d0.len() == 1 && d0[0] == expected,
        format!("D0 basis {d0:?}"),
    )?;
    ensure(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    ensure(exit_code("analyze", "four_state") == 0, "analyze exit code")?;
    Ok(format!(
        "dims (1,3,4), kbar=3, D0 ~ (-2,1), {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn construction_reproduction() -> Check {
    let (s, _, c) = four_state();
    let expected = vec![p("x1*(x3 + 1)"), p("x2 + 3*x4")];
    ensure(
        c.flat_output.components == expected,
        format!("flat output {:?}", c.flat_output.components),
    )?;
    let blocks: Vec<Vec<Expr>> = c
        .triangular
        .blocks
        .iter()
        .map(|b| b.equations.clone())
        .collect();
    let display = vec![
        vec![p("y3_1[1] - zh2_1")],
        vec![
            p("y2_1[1] - y3_1*zh1_2 - zh1_1"),
            p("zh2_1[1] - y2_1[1] - zh1_2"),
        ],
        vec![p("zh1_1[1] - y3_1 - zh0_1")],
    ];
    ensure(blocks == display, format!("triangular form {blocks:?}"))?;
    let coords: Vec<(Symbol, Expr)> = ["y3_1", "y2_1", "zh2_1", "zh1_1", "zh1_2", "zh0_1"]
        .iter()
        .zip([
            "x1*(x3 + 1)",
            "x2 + 3*x4",
            "x2 + x3 + 3*x4",
            "x4",
            "u1 + 2*u2",
            "u2",
        ])
        .map(|(v, e)| (Symbol::new(v), p(e)))
        .collect();
    ensure(
        c.coordinates == coords,
        format!("coordinates {:?}", c.coordinates),
    )?;
    let v = verify_flat_output_symbolic(&s, &c.flat_output, Some(&c.parametrization))
        .map_err(|e| e.to_string())?;
    ensure(v.verdict == SymbolicVerdict::Pass, "symbolic verification")?;
    ensure(exit_code("extract", "four_state") == 0, "extract exit code")?;
    Ok("y = (x1(x3+1), x2+3x4), four-block form matches, PASS".into())
}

fn identity_check() -> Check {
    let (s, _, c) = four_state();
    let checks =
        check_parametrization(&s, &c.flat_output, &c.parametrization).map_err(|e| e.to_string())?;
    ensure(checks.identity, "shift identity")?;
    ensure(checks.submersion, "submersion")?;
    ensure(checks.top_shifts_in_inputs_only, "highest shifts in F_x")?;
    ensure(
        checks.inverts_flat_output,
        "composition with the flat output",
    )?;
    Ok(format!(
        "exact identity, submersion, R = {:?}",
        c.parametrization.r
    ))
}

fn numeric_correspondence() -> Check {
    let (s, _, c) = four_state();
    let opts = NumericOptions::default();
    let r = verify_flat_output_numeric(&s, &c.flat_output, &c.parametrization, &opts)
        .map_err(|e| e.to_string())?;
    ensure(
        r.trials.len() == 20 && opts.seed == 0 && opts.horizon == 20 && opts.radius == 0.1,
        "options",
    )?;
    ensure(
        r.pass && r.max_residual < 1e-9,
        format!("max residual {:e}", r.max_residual),
    )?;
    Ok(format!("20 trials, max residual {:e}", r.max_residual))
}

/// `f̄_k` depends on `x̄_{k-1}, …, x̄_k̄` only, and `u` enters `f̄_1` only.
fn static_triangular_pattern(c: &Construction, s: &DiscreteTimeSystem) -> bool {
    let st = &c.transformation;
    let f = st.transformed_system(s).unwrap();
    let kbar = st.blocks.len();
    (2..=kbar).all(|k| {
        let allowed: Vec<Symbol> = st.blocks[k - 2..].iter().flatten().copied().collect();
        f[k - 1]
            .iter()
            .all(|e| e.symbols().iter().all(|v| allowed.contains(v)))
    })
}

fn sfl_path() -> Check {
    for name in ["chain", "sfl_quadratic"] {
        let s = model(name);
        let r = report(&s);
        ensure(
            r.verdict == Verdict::Flat && r.sfl,
            format!("{name}: verdict/sfl"),
        )?;
        ensure(
            r.steps.iter().all(|st| st.d == st.e),
            format!("{name}: D_k != E_k"),
        )?;
        let c = construct(&r, 3).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            static_triangular_pattern(&c, &s),
            format!("{name}: triangular pattern"),
        )?;
        let v = verify_flat_output_symbolic(&s, &c.flat_output, Some(&c.parametrization)).unwrap();
        ensure(
            v.verdict == SymbolicVerdict::Pass,
            format!("{name}: verification"),
        )?;
    }
    Ok("chain and x1+=u, x2+=x1+u^2: FLAT, sfl, D_k = E_k, static triangular pattern".into())
}

fn not_flat_path() -> Check {
    let r = report(&model("nonflat_bilinear"));
    ensure(r.steps[0].d.dim() == 0, "D0 is not zero")?;
    ensure(r.kbar == 0 && r.verdict == Verdict::NotFlat, "verdict")?;
    ensure(exit_code("analyze", "nonflat_bilinear") == 1, "exit code")?;
    Ok("D0 = 0, stagnation at k=0, NOT_FLAT, exit 1".into())
}

const CASES: u32 = 50;

fn suite<S: Strategy>(
    name: &str,
    strategy: S,
    body: fn(&S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, |v| body(&v))
        .map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Check {
    suite("bracket", field_triple(), prop_bracket)?;
    suite("pushforward", push_case(), prop_pushforward_bracket)?;
    suite("uniqueness", chart_case(), prop_uniqueness)?;
    suite("idempotence", idem_case(), prop_idempotence)?;
    suite("linear state change", change_case(), prop_linear_change)?;
    suite(
        "integrator extension",
        change_case(),
        prop_integrator_extension,
    )?;
    suite("redundant input", redundant_case(), prop_redundant_input)?;
    Ok(format!("7 suites x {CASES} cases"))
}

fn mutation() -> Check {
    let (s, _, c) = four_state();
    let bad = c.parametrization.perturbed();
    let r = verify_flat_output_numeric(&s, &c.flat_output, &bad, &NumericOptions::default())
        .map_err(|e| e.to_string())?;
    let worst = r
        .trials
        .iter()
        .map(|t| t.residual)
        .fold(f64::INFINITY, f64::min);
    ensure(
        !r.pass && r.trials.iter().all(|t| !t.pass && t.residual > 1e-3),
        format!("smallest residual {worst:e}"),
    )?;
    Ok(format!("all 20 trials fail, smallest residual {worst:.3e}"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 8] = [
        ("analysis of the four-state example", analysis_reproduction),
        ("flat output and triangular form", construction_reproduction),
        ("parametrization identities", identity_check),
        ("numeric correspondence", numeric_correspondence),
        ("static feedback linearizable path", sfl_path),
        ("not flat path", not_flat_path),
        ("property suites", property_suites),
        ("mutation falsification", mutation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
