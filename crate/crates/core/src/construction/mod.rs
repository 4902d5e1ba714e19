//! Flat outputs, the stepwise decomposition behind them and the implicit
//! triangular form.
//!
//! The pipeline is: straighten the `Δ` chain with a state transformation,
//! then alternate redundant-input elimination (`Ψ_k`) and straightening of
//! `D_k` (`Φ_k`) until only the flat output is left, and finally rewrite
//! the implicit system equations in the resulting coordinates.

mod decompose;
mod straighten;
mod triangular;

use std::collections::HashSet;

use thiserror::Error;

use crate::analysis::{FlatnessReport, Verdict};
use crate::geometry::GeometryError;
use crate::symbolic::{Expr, Symbol, SymbolicError};
use crate::verification::FlatParametrization;

pub use decompose::{decompose, decompose_tracking, DecompositionStep, DecompositionTrace};
pub use straighten::{
    straighten_distribution_chain, straighten_distribution_chain_with, Acceptance, Acceptor,
    StateTransformation,
};
pub use triangular::{
    parametrize_from_triangular, to_implicit_triangular, ImplicitTriangularForm, TriangularBlock,
};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("straightening not found within ansatz degree {degree} ({what})")]
    Straightening { what: String, degree: u32 },
    #[error("the system is not flat")]
    NotFlat,
    #[error("implicit solve failed for block {block}: {}", .equations.join(", "))]
    ImplicitSolve {
        block: usize,
        equations: Vec<String>,
    },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `m` functions `φ(x, u, u[1], …, u[q])` together with the names used for
/// them in parametrizations.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatOutput {
    pub components: Vec<Expr>,
    pub names: Vec<Symbol>,
    pub q: u32,
}

impl FlatOutput {
    pub fn new(components: Vec<Expr>, names: Vec<Symbol>) -> Self {
        let q = components
            .iter()
            .flat_map(|c| c.symbols())
            .map(|s| s.shift())
            .max()
            .unwrap_or(0);
        FlatOutput {
            components,
            names,
            q,
        }
    }
}

/// Produces readable names for generated variables that cannot clash with
/// the model's own identifiers.
#[derive(Clone, Debug)]
pub struct Namer {
    taken: HashSet<&'static str>,
}

impl Namer {
    pub fn new(reserved: impl IntoIterator<Item = Symbol>) -> Self {
        Namer {
            taken: reserved.into_iter().map(|s| s.name()).collect(),
        }
    }

    pub fn name(&self, base: &str) -> Symbol {
        if self.taken.contains(base) {
            Symbol::new(&format!("_{base}"))
        } else {
            Symbol::new(base)
        }
    }

    pub fn indexed(&self, stem: &str, k: usize, i: usize) -> Symbol {
        self.name(&format!("{stem}{k}_{i}"))
    }
}

/// Everything produced for a flat system.
#[derive(Clone, Debug)]
pub struct Construction {
    pub transformation: StateTransformation,
    pub trace: DecompositionTrace,
    pub triangular: ImplicitTriangularForm,
    /// Triangular-form variables in terms of the original `(x, u)`.
    pub coordinates: Vec<(Symbol, Expr)>,
    /// Flat output of the analyzed system in its original variables.
    pub flat_output: FlatOutput,
    /// Parametrization of the original system.
    pub parametrization: FlatParametrization,
}

/// Runs the full construction for a FLAT report.
pub fn construct(
    report: &FlatnessReport,
    max_degree: u32,
) -> Result<Construction, ConstructionError> {
    if report.verdict != Verdict::Flat {
        return Err(ConstructionError::NotFlat);
    }
    let s = &report.system;
    let original_vars: Vec<Symbol> = match &report.reduction {
        Some(r) => {
            let mut v = s.states.clone();
            v.extend(r.inverse.iter().map(|(u, _)| *u));
            v
        }
        None => s.variables(),
    };
    let namer = Namer::new(original_vars);
    let chain: Vec<_> = (1..=report.kbar).map(|k| report.delta(k).clone()).collect();
    let mut built = None;
    let mut rejection = None;
    let st = straighten_distribution_chain_with(s, &chain, max_degree, &namer, &mut |st| {
        let mut failed_step = 0;
        let attempt = decompose_tracking(report, st, max_degree, &namer, &mut failed_step);
        let decomposed = attempt.is_ok();
        let attempt = attempt.and_then(|trace| {
            let triangular = to_implicit_triangular(&trace)?;
            let param = parametrize_from_triangular(&triangular, &trace, st)?;
            Ok((trace, triangular, param))
        });
        match attempt {
            Ok(parts) => {
                built = Some(parts);
                Ok(Acceptance::Accept)
            }
            Err(
                e @ (ConstructionError::Straightening { .. }
                | ConstructionError::ImplicitSolve { .. }),
            ) => {
                rejection.get_or_insert(e);
                let from_block = if decomposed { 1 } else { failed_step.max(1) };
                Ok(Acceptance::Reject { from_block })
            }
            Err(e) => Err(e),
        }
    });
    let st = match (st, rejection) {
        (Ok(st), _) => st,
        (Err(ConstructionError::Straightening { .. }), Some(first)) => return Err(first),
        (Err(e), _) => return Err(e),
    };
    let (trace, triangular, reduced_param) = built.expect("accepted transformations are built");
    let (flat_output, parametrization, coordinates) = match &report.reduction {
        None => (
            trace.flat_output.clone(),
            reduced_param,
            trace.forward.clone(),
        ),
        Some(red) => {
            let (f, p) = extend_redundant(&trace.flat_output, &reduced_param, red, &namer)?;
            let hat: std::collections::HashMap<Symbol, Expr> =
                red.hat_inputs.iter().cloned().collect();
            let coords = trace
                .forward
                .iter()
                .map(|(v, e)| Ok((*v, e.subs(&hat)?)))
                .collect::<Result<_, ConstructionError>>()?;
            (f, p, coords)
        }
    };
    Ok(Construction {
        transformation: st,
        trace,
        triangular,
        coordinates,
        flat_output,
        parametrization,
    })
}

/// Appends the eliminated inputs to a flat output of the reduced system and
/// rewrites everything in the original inputs.
fn extend_redundant(
    flat: &FlatOutput,
    param: &FlatParametrization,
    red: &crate::model::InputReduction,
    namer: &Namer,
) -> Result<(FlatOutput, FlatParametrization), ConstructionError> {
    let hat: std::collections::HashMap<Symbol, Expr> = red.hat_inputs.iter().cloned().collect();
    let mut components: Vec<Expr> = flat
        .components
        .iter()
        .map(|c| c.subs(&hat))
        .collect::<Result<_, _>>()?;
    let mut names = flat.names.clone();
    let mut extra = Vec::new();
    for (i, u) in red.eliminated.iter().enumerate() {
        let y = namer.name(&format!("yt{}", i + 1));
        components.push(Expr::var(*u));
        names.push(y);
        extra.push((*u, Expr::var(y)));
    }
    let mut values: std::collections::HashMap<Symbol, Expr> = param
        .states
        .iter()
        .copied()
        .zip(param.fx.iter().cloned())
        .collect();
    for (u, e) in param.inputs.iter().zip(&param.fu) {
        values.insert(*u, e.clone());
    }
    values.extend(extra.iter().cloned());
    let fu: Vec<Expr> = red
        .inverse
        .iter()
        .map(|(_, e)| e.subs(&values))
        .collect::<Result<_, _>>()?;
    let inputs: Vec<Symbol> = red.inverse.iter().map(|(u, _)| *u).collect();
    let p = FlatParametrization::new(
        names.clone(),
        param.states.clone(),
        param.fx.clone(),
        inputs,
        fu,
    );
    Ok((FlatOutput::new(components, names), p))
}
