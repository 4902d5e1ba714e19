//! Command-line front end and the JSON report document.
//!
//! Exit codes: 0 for FLAT or PASS, 1 for NOT_FLAT or FAIL, 2 for errors and
//! indeterminate results, 3 when a FLAT system could not be brought into
//! triangular form within the ansatz limits.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{analyze, AnalysisError, AnalysisOptions, FlatnessReport, Verdict};
use crate::construction::{construct, Construction, ConstructionError, FlatOutput};
use crate::geometry::Distribution;
use crate::model::{DiscreteTimeSystem, ModelError};
use crate::symbolic::parse::{parse_expr, parse_rational};
use crate::symbolic::{Expr, Symbol, SymbolicError};
use crate::verification::{
    simulate, verify_flat_output_numeric, verify_flat_output_symbolic, FlatParametrization,
    NumericOptions, NumericReport, SymbolicReport, SymbolicVerdict, Value, VerificationError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_STRAIGHTENING: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Verification(#[from] VerificationError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Construction(ConstructionError::Straightening { .. })
            | CliError::Construction(ConstructionError::ImplicitSolve { .. }) => EXIT_STRAIGHTENING,
            CliError::Construction(ConstructionError::NotFlat) => EXIT_NEGATIVE,
            _ => EXIT_ERROR,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "flatcheck",
    version,
    about = "Difference-flatness analysis for x+ = f(x, u)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the distribution sequence and report the verdict.
    Analyze(CommonArgs),
    /// Construct a flat output, the triangular form and the parametrization.
    Extract {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Check a candidate flat output.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Semicolon separated components, e.g. "x1*(x3+1); x2+3*x4".
        #[arg(long)]
        output: String,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Simulate the system and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma separated initial state; defaults to the equilibrium.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// CSV file with one input vector per row.
        #[arg(long)]
        inputs_file: Option<PathBuf>,
        /// Number of steps with equilibrium inputs when no input file is given.
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Trajectory destination; standard output when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    pub model: PathBuf,
    /// Write the JSON report to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Degree cap of the polynomial invariant ansatz.
    #[arg(long, default_value_t = 3)]
    pub max_ansatz_degree: u32,
    /// Include wall-clock timings in the JSON report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Radius of the sampling box around the equilibrium image.
    #[arg(long = "box", default_value_t = 0.1)]
    pub radius: f64,
}

impl NumericArgs {
    fn options(&self) -> NumericOptions {
        NumericOptions {
            trials: self.trials,
            horizon: self.horizon,
            tol: self.tol,
            seed: self.seed,
            radius: self.radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub version: String,
    pub model: ModelInfo,
    pub algorithm1: Algorithm1Doc,
    pub flat_output: Option<FlatOutputDoc>,
    pub triangular: Option<TriangularDoc>,
    pub parametrization: Option<ParametrizationDoc>,
    pub verification: Option<VerificationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub name: String,
    pub digest: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Algorithm1Doc {
    /// Coordinates of the `Δ_k` basis vectors.
    pub delta_coordinates: Vec<String>,
    /// Coordinates of the `D_k` basis vectors.
    pub d_coordinates: Vec<String>,
    pub steps: Vec<StepDoc>,
    pub kbar: usize,
    pub verdict: String,
    pub sfl: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub k: usize,
    pub dim_delta: usize,
    #[serde(rename = "dim_E")]
    pub dim_e: usize,
    #[serde(rename = "dim_D")]
    pub dim_d: usize,
    pub rho: usize,
    pub mu: i64,
    pub delta_basis: Vec<Vec<String>>,
    #[serde(rename = "D_basis")]
    pub d_basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatOutputDoc {
    pub names: Vec<String>,
    pub components: Vec<String>,
    pub q: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularDoc {
    pub variables: Vec<String>,
    /// Definitions of the triangular-form variables in `(x, u)`.
    pub coordinates: Vec<[String; 2]>,
    pub blocks: Vec<BlockDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub k: usize,
    pub solves_for: Vec<String>,
    pub equations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametrizationDoc {
    pub outputs: Vec<String>,
    #[serde(rename = "Fx")]
    pub fx: Vec<String>,
    #[serde(rename = "Fu")]
    pub fu: Vec<String>,
    #[serde(rename = "R")]
    pub r: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub symbolic: String,
    pub notes: Vec<String>,
    pub numeric: Option<NumericDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericDoc {
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
    #[serde(rename = "box")]
    pub radius: f64,
    pub tol: f64,
    pub max_residual: f64,
    pub pass: bool,
}

fn strings(exprs: &[Expr]) -> Vec<String> {
    exprs.iter().map(|e| e.to_string()).collect()
}

fn names(syms: &[Symbol]) -> Vec<String> {
    syms.iter().map(|s| s.to_string()).collect()
}

fn basis(d: &Distribution) -> Vec<Vec<String>> {
    d.basis().iter().map(|v| strings(v)).collect()
}

/// Hex SHA-256 of the model file contents.
pub fn digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

impl AnalysisDocument {
    pub fn new(s: &DiscreteTimeSystem, text: &str, report: &FlatnessReport) -> Self {
        let (delta_coordinates, d_coordinates) = match report.steps.first() {
            Some(st) => (names(st.delta.coords()), names(st.d.coords())),
            None => (names(&s.states), names(&s.variables())),
        };
        AnalysisDocument {
            version: env!("CARGO_PKG_VERSION").to_string(),
            model: ModelInfo {
                name: s.name.clone(),
                digest: digest(text),
                n: s.n(),
                m: s.m(),
            },
            algorithm1: Algorithm1Doc {
                delta_coordinates,
                d_coordinates,
                steps: report
                    .steps
                    .iter()
                    .map(|st| StepDoc {
                        k: st.k,
                        dim_delta: st.delta.dim(),
                        dim_e: st.e.dim(),
                        dim_d: st.d.dim(),
                        rho: st.rho,
                        mu: st.mu,
                        delta_basis: basis(&st.delta),
                        d_basis: basis(&st.d),
                    })
                    .collect(),
                kbar: report.kbar,
                verdict: report.verdict.to_string(),
                sfl: report.sfl,
                diagnostics: report.diagnostics.clone(),
            },
            flat_output: None,
            triangular: None,
            parametrization: None,
            verification: None,
            timings: None,
        }
    }

    pub fn set_flat_output(&mut self, flat: &FlatOutput) {
        self.flat_output = Some(FlatOutputDoc {
            names: names(&flat.names),
            components: strings(&flat.components),
            q: flat.q,
        });
    }

    pub fn set_construction(&mut self, c: &Construction) {
        self.set_flat_output(&c.flat_output);
        self.triangular = Some(TriangularDoc {
            variables: names(&c.triangular.variables),
            coordinates: c
                .coordinates
                .iter()
                .map(|(v, e)| [v.to_string(), e.to_string()])
                .collect(),
            blocks: c
                .triangular
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    k: b.k,
                    solves_for: names(&b.solves_for),
                    equations: strings(&b.equations),
                })
                .collect(),
        });
        self.set_parametrization(&c.parametrization);
    }

    pub fn set_parametrization(&mut self, p: &FlatParametrization) {
        self.parametrization = Some(ParametrizationDoc {
            outputs: names(&p.outputs),
            fx: strings(&p.fx),
            fu: strings(&p.fu),
            r: p.r.clone(),
        });
    }

    pub fn set_verification(
        &mut self,
        sym: &SymbolicReport,
        num: Option<(&NumericReport, &NumericOptions)>,
    ) {
        self.verification = Some(VerificationDoc {
            symbolic: sym.verdict.to_string(),
            notes: sym.notes.clone(),
            numeric: num.map(|(r, o)| NumericDoc {
                trials: r.trials.len(),
                horizon: o.horizon,
                seed: o.seed,
                radius: o.radius,
                tol: o.tol,
                max_residual: r.max_residual,
                pass: r.pass,
            }),
        });
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

struct Loaded {
    system: DiscreteTimeSystem,
    text: String,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let system = DiscreteTimeSystem::parse(&text).map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Loaded { system, text })
}

fn write_json(path: &Option<PathBuf>, doc: &AnalysisDocument) -> Result<(), CliError> {
    if let Some(p) = path {
        fs::write(p, doc.to_json()?).map_err(|source| CliError::Write {
            path: p.clone(),
            source,
        })?;
    }
    Ok(())
}

struct Clock {
    enabled: bool,
    start: Instant,
    marks: BTreeMap<String, f64>,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Clock {
            enabled,
            start: Instant::now(),
            marks: BTreeMap::new(),
        }
    }

    fn mark(&mut self, what: &str) {
        let now = Instant::now();
        self.marks.insert(
            what.to_string(),
            now.duration_since(self.start).as_secs_f64(),
        );
        self.start = now;
    }

    fn finish(self, doc: &mut AnalysisDocument) {
        if self.enabled {
            doc.timings = Some(self.marks);
        }
    }
}

fn options(common: &CommonArgs) -> AnalysisOptions {
    AnalysisOptions {
        max_degree: common.max_ansatz_degree,
        ..AnalysisOptions::default()
    }
}

/// Parses and runs the command line, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_ERROR,
            };
        }
    };
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::Analyze(common) => cmd_analyze(common),
        Command::Extract { common, numeric } => cmd_extract(common, numeric),
        Command::Verify {
            common,
            output,
            numeric,
        } => cmd_verify(common, output, numeric),
        Command::Simulate {
            common,
            x0,
            inputs_file,
            steps,
            csv,
        } => cmd_simulate(
            common,
            x0.as_deref(),
            inputs_file.as_deref(),
            *steps,
            csv.as_deref(),
        ),
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Flat => EXIT_OK,
        Verdict::NotFlat => EXIT_NEGATIVE,
    }
}

pub fn cmd_analyze(common: &CommonArgs) -> Result<i32, CliError> {
    let mut clock = Clock::new(common.timings);
    let l = load(&common.model)?;
    let report = analyze(&l.system, &options(common))?;
    clock.mark("analysis");
    print!("{}", report.summary());
    let mut doc = AnalysisDocument::new(&l.system, &l.text, &report);
    clock.finish(&mut doc);
    write_json(&common.json, &doc)?;
    Ok(verdict_code(report.verdict))
}

fn print_construction(c: &Construction) {
    println!("flat output:");
    for (y, e) in c.flat_output.names.iter().zip(&c.flat_output.components) {
        println!("  {y} = {e}");
    }
    println!("coordinates:");
    for (v, e) in &c.coordinates {
        println!("  {v} = {e}");
    }
    println!("implicit triangular form:");
    for b in &c.triangular.blocks {
        let solves: Vec<String> = names(&b.solves_for);
        println!("  block {} (solved for {}):", b.k, solves.join(", "));
        for e in &b.equations {
            println!("    0 = {e}");
        }
    }
    print_parametrization(&c.parametrization);
}

fn print_parametrization(p: &FlatParametrization) {
    let r: Vec<String> = p.r.iter().map(|v| v.to_string()).collect();
    println!("parametrization (R = {}):", r.join(","));
    for (x, e) in p.states.iter().zip(&p.fx) {
        println!("  {x} = {e}");
    }
    for (u, e) in p.inputs.iter().zip(&p.fu) {
        println!("  {u} = {e}");
    }
}

fn print_verification(sym: &SymbolicReport, num: Option<&NumericReport>) {
    println!("symbolic verification: {}", sym.verdict);
    for n in &sym.notes {
        println!("  note: {n}");
    }
    if let Some(r) = num {
        println!(
            "numeric verification: {} ({} trials, max residual {:e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.trials.len(),
            r.max_residual
        );
    }
}

pub fn cmd_extract(common: &CommonArgs, numeric: &NumericArgs) -> Result<i32, CliError> {
    let mut clock = Clock::new(common.timings);
    let l = load(&common.model)?;
    let report = analyze(&l.system, &options(common))?;
    clock.mark("analysis");
    print!("{}", report.summary());
    let mut doc = AnalysisDocument::new(&l.system, &l.text, &report);
    if report.verdict == Verdict::NotFlat {
        clock.finish(&mut doc);
        write_json(&common.json, &doc)?;
        return Ok(EXIT_NEGATIVE);
    }
    let c = match construct(&report, common.max_ansatz_degree) {
        Ok(c) => c,
        Err(e) => {
            clock.finish(&mut doc);
            write_json(&common.json, &doc)?;
            return Err(e.into());
        }
    };
    clock.mark("construction");
    print_construction(&c);
    doc.set_construction(&c);
    let sym = verify_flat_output_symbolic(&l.system, &c.flat_output, Some(&c.parametrization))?;
    clock.mark("symbolic verification");
    let opts = numeric.options();
    let num = verify_flat_output_numeric(&l.system, &c.flat_output, &c.parametrization, &opts)?;
    clock.mark("numeric verification");
    print_verification(&sym, Some(&num));
    doc.set_verification(&sym, Some((&num, &opts)));
    clock.finish(&mut doc);
    write_json(&common.json, &doc)?;
    if sym.verdict == SymbolicVerdict::Pass && num.pass {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: the constructed flat output did not verify");
        Ok(EXIT_ERROR)
    }
}

/// Resolves states and (possibly shifted) inputs of `s`.
fn output_resolver(s: &DiscreteTimeSystem) -> impl Fn(&str) -> Option<Symbol> + '_ {
    move |name: &str| {
        let sym = Symbol::new(name);
        let base = sym.base();
        if s.inputs.contains(&base) || (sym.shift() == 0 && s.states.contains(&base)) {
            Some(sym)
        } else {
            None
        }
    }
}

/// Parses `"expr; expr; …"` into a candidate flat output named `y1, …, ym`.
pub fn parse_output(s: &DiscreteTimeSystem, text: &str) -> Result<FlatOutput, CliError> {
    let resolve = output_resolver(s);
    let parts: Vec<&str> = text
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() != s.m() {
        return Err(CliError::Usage(format!(
            "--output needs {} components separated by `;`, got {}",
            s.m(),
            parts.len()
        )));
    }
    let taken: Vec<Symbol> = s.variables();
    let components = parts
        .iter()
        .map(|p| parse_expr(p, &resolve))
        .collect::<Result<Vec<Expr>, SymbolicError>>()
        .map_err(|e| CliError::Usage(format!("--output: {e}")))?;
    let names = (1..=s.m())
        .map(|j| {
            let base = format!("y{j}");
            let sym = Symbol::new(&base);
            if taken.contains(&sym) {
                Symbol::new(&format!("_{base}"))
            } else {
                sym
            }
        })
        .collect();
    Ok(FlatOutput::new(components, names))
}

pub fn cmd_verify(
    common: &CommonArgs,
    output: &str,
    numeric: &NumericArgs,
) -> Result<i32, CliError> {
    let mut clock = Clock::new(common.timings);
    let l = load(&common.model)?;
    let flat = parse_output(&l.system, output)?;
    let report = analyze(&l.system, &options(common))?;
    clock.mark("analysis");
    let mut doc = AnalysisDocument::new(&l.system, &l.text, &report);
    doc.set_flat_output(&flat);
    let sym = verify_flat_output_symbolic(&l.system, &flat, None)?;
    clock.mark("symbolic verification");
    let opts = numeric.options();
    let num = match &sym.parametrization {
        Some(p) if sym.verdict == SymbolicVerdict::Pass => {
            doc.set_parametrization(p);
            print_parametrization(p);
            Some(verify_flat_output_numeric(&l.system, &flat, p, &opts)?)
        }
        _ => None,
    };
    clock.mark("numeric verification");
    print_verification(&sym, num.as_ref());
    doc.set_verification(&sym, num.as_ref().map(|r| (r, &opts)));
    clock.finish(&mut doc);
    write_json(&common.json, &doc)?;
    let pass = sym.verdict == SymbolicVerdict::Pass && num.map(|r| r.pass).unwrap_or(false);
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_NEGATIVE })
}

/// Reads a number, exactly when it is a rational literal.
pub fn parse_value(text: &str) -> Option<Value> {
    let t = text.trim();
    if let Some(r) = parse_rational(t) {
        return Some(Value::Exact(r));
    }
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Value::Float)
}

fn parse_vector(text: &str, what: &str, len: usize) -> Result<Vec<Value>, CliError> {
    let vals = text
        .split(',')
        .map(|p| {
            parse_value(p)
                .ok_or_else(|| CliError::Usage(format!("{what}: `{}` is not a number", p.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if vals.len() != len {
        return Err(CliError::Usage(format!(
            "{what} has {} components, expected {len}",
            vals.len()
        )));
    }
    Ok(vals)
}

/// Input vectors from a CSV file; a first row that is not numeric is taken
/// as a header.
pub fn read_inputs(path: &Path, m: usize) -> Result<Vec<Vec<Value>>, CliError> {
    let data = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(data.as_slice());
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Option<Vec<Value>> = rec.iter().map(parse_value).collect();
        match parsed {
            Some(v) if v.len() == m => rows.push(v),
            Some(v) => {
                return Err(CliError::Usage(format!(
                    "{}: row {} has {} values, expected {m}",
                    path.display(),
                    i + 1,
                    v.len()
                )))
            }
            None if i == 0 => continue,
            None => {
                return Err(CliError::Usage(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(rows)
}

pub fn cmd_simulate(
    common: &CommonArgs,
    x0: Option<&str>,
    inputs_file: Option<&Path>,
    steps: usize,
    csv_path: Option<&Path>,
) -> Result<i32, CliError> {
    let l = load(&common.model)?;
    let s = &l.system;
    let exact = |v: &BigRational| Value::Exact(v.clone());
    let x0 = match x0 {
        Some(t) => parse_vector(t, "--x0", s.n())?,
        None => s.x0.iter().map(exact).collect(),
    };
    let inputs = match inputs_file {
        Some(p) => read_inputs(p, s.m())?,
        None => vec![s.u0.iter().map(exact).collect(); steps],
    };
    let traj = simulate(s, &x0, &inputs)?;
    let out = traj.to_csv(s);
    match csv_path {
        Some(p) => fs::write(p, out).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        })?,
        None => print!("{out}"),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_state() -> DiscreteTimeSystem {
        DiscreteTimeSystem::from_strings(
            "t",
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
    fn output_parsing() {
        let s = four_state();
        let f = parse_output(&s, "x1*(x3+1); x2+3*x4").unwrap();
        assert_eq!(f.components.len(), 2);
        assert_eq!(f.q, 0);
        assert_eq!(parse_output(&s, "x1 + u1[2]; x2").unwrap().q, 2);
        assert!(parse_output(&s, "x1").is_err());
        assert!(parse_output(&s, "x1; z").is_err());
        assert!(parse_output(&s, "x1[1]; x2").is_err());
    }

    #[test]
    fn values() {
        assert!(matches!(parse_value("-3/4"), Some(Value::Exact(_))));
        assert!(matches!(parse_value("1e-3"), Some(Value::Float(_))));
        assert!(parse_value("abc").is_none());
    }

    #[test]
    fn exit_codes_follow_error_class() {
        let straight = CliError::Construction(ConstructionError::Straightening {
            what: "x".into(),
            degree: 0,
        });
        assert_eq!(straight.exit_code(), EXIT_STRAIGHTENING);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_ERROR);
        assert_eq!(
            CliError::Construction(ConstructionError::NotFlat).exit_code(),
            EXIT_NEGATIVE
        );
    }
}
