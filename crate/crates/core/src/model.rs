//! Discrete-time systems `x⁺ = f(x, u)`: parsing, validation and removal of
//! redundant inputs.
//!
//! Model files are line oriented:
//!
//! ```text
//! system chain
//! states: x1 x2
//! inputs: u
//! equilibrium: all zero
//! next x1 = x2
//! next x2 = u      # comments run to the end of the line
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::geometry::invariants::{pick_independent, polynomial_invariants};
use crate::geometry::{generic_jacobian_rank, jacobian_rank_at};
use crate::symbolic::parse::{parse_expr_at, parse_rational};
use crate::symbolic::{solve_algebraic, Expr, FuncKind, Symbol, SymbolicError, SymbolicMatrix};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Definition { line: usize, message: String },
    #[error("{0}")]
    Incomplete(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteTimeSystem {
    pub name: String,
    pub states: Vec<Symbol>,
    pub inputs: Vec<Symbol>,
    pub update: Vec<Expr>,
    pub x0: Vec<BigRational>,
    pub u0: Vec<BigRational>,
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

impl DiscreteTimeSystem {
    /// Parses a model file.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut name: Option<String> = None;
        let mut states: Option<Vec<Symbol>> = None;
        let mut inputs: Option<Vec<Symbol>> = None;
        let mut equilibrium: Option<(usize, EquilibriumSpec)> = None;
        let mut nexts: Vec<(usize, usize, String, usize, String)> = Vec::new();

        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let syntax = |column: usize, message: String| ModelError::Syntax {
                line,
                column,
                message,
            };
            if let Some(rest) = strip_keyword(trimmed, "system") {
                let id = rest.trim();
                if !is_ident(id) {
                    return Err(syntax(indent + 8, format!("invalid system name `{id}`")));
                }
                if name.replace(id.to_string()).is_some() {
                    return Err(ModelError::Definition {
                        line,
                        message: "duplicate `system` line".into(),
                    });
                }
            } else if let Some(rest) = trimmed.strip_prefix("states:") {
                let vars = ident_list(rest, line, indent + 7)?;
                if states.replace(vars).is_some() {
                    return Err(ModelError::Definition {
                        line,
                        message: "duplicate `states:` declaration".into(),
                    });
                }
            } else if let Some(rest) = trimmed.strip_prefix("inputs:") {
                let vars = ident_list(rest, line, indent + 7)?;
                if inputs.replace(vars).is_some() {
                    return Err(ModelError::Definition {
                        line,
                        message: "duplicate `inputs:` declaration".into(),
                    });
                }
            } else if let Some(rest) = trimmed.strip_prefix("equilibrium:") {
                let spec = parse_equilibrium(rest, line, indent + 12)?;
                if equilibrium.replace((line, spec)).is_some() {
                    return Err(ModelError::Definition {
                        line,
                        message: "duplicate `equilibrium:` declaration".into(),
                    });
                }
            } else if let Some(rest) = strip_keyword(trimmed, "next") {
                let Some((lhs, rhs)) = rest.split_once('=') else {
                    return Err(syntax(
                        indent + 1,
                        "expected `next <state> = <expr>`".into(),
                    ));
                };
                let target = lhs.trim().to_string();
                let rhs_col = indent + 4 + lhs.len() + 1;
                nexts.push((line, indent + 6, target, rhs_col, rhs.to_string()));
            } else {
                return Err(syntax(indent + 1, format!("unrecognized line `{trimmed}`")));
            }
        }

        let states =
            states.ok_or_else(|| ModelError::Incomplete("missing `states:` line".into()))?;
        let inputs =
            inputs.ok_or_else(|| ModelError::Incomplete("missing `inputs:` line".into()))?;
        let mut seen = BTreeSet::new();
        for s in states.iter().chain(&inputs) {
            if !seen.insert(*s) {
                return Err(ModelError::Incomplete(format!(
                    "variable `{s}` declared twice"
                )));
            }
        }
        let declared: HashMap<&str, Symbol> = states
            .iter()
            .chain(&inputs)
            .map(|s| (s.name(), *s))
            .collect();
        let resolve = |n: &str| declared.get(n).copied();

        let mut update: Vec<Option<Expr>> = vec![None; states.len()];
        for (line, tcol, target, rcol, rhs) in nexts {
            let Some(i) = states.iter().position(|s| s.name() == target) else {
                return Err(ModelError::Syntax {
                    line,
                    column: tcol,
                    message: format!("`{target}` is not a declared state"),
                });
            };
            if update[i].is_some() {
                return Err(ModelError::Definition {
                    line,
                    message: format!("duplicate definition of `next {target}`"),
                });
            }
            let e = parse_expr_at(&rhs, line, rcol, &resolve).map_err(|e| match e {
                SymbolicError::Parse {
                    line,
                    column,
                    message,
                } => ModelError::Syntax {
                    line,
                    column,
                    message,
                },
                other => ModelError::Symbolic(other),
            })?;
            update[i] = Some(e);
        }
        let update = update
            .into_iter()
            .zip(&states)
            .map(|(e, s)| e.ok_or_else(|| ModelError::Incomplete(format!("missing `next {s}`"))))
            .collect::<Result<Vec<_>, _>>()?;

        let (eq_line, eq) = equilibrium
            .ok_or_else(|| ModelError::Incomplete("missing `equilibrium:` line".into()))?;
        let mut values: HashMap<Symbol, BigRational> = HashMap::new();
        if let Some(pairs) = eq {
            for (n, v) in pairs {
                let Some(s) = resolve(&n) else {
                    return Err(ModelError::Definition {
                        line: eq_line,
                        message: format!("equilibrium names undeclared variable `{n}`"),
                    });
                };
                if values.insert(s, v).is_some() {
                    return Err(ModelError::Definition {
                        line: eq_line,
                        message: format!("equilibrium assigns `{n}` twice"),
                    });
                }
            }
            if let Some(s) = states
                .iter()
                .chain(&inputs)
                .find(|s| !values.contains_key(s))
            {
                return Err(ModelError::Definition {
                    line: eq_line,
                    message: format!("equilibrium misses `{s}`"),
                });
            }
        }
        let get = |s: &Symbol| values.get(s).cloned().unwrap_or_else(BigRational::zero);
        let x0 = states.iter().map(get).collect();
        let u0 = inputs.iter().map(get).collect();

        Ok(DiscreteTimeSystem {
            name: name.unwrap_or_else(|| "model".into()),
            states,
            inputs,
            update,
            x0,
            u0,
        })
    }

    /// Builds a system from update expressions in model-grammar syntax with a
    /// zero equilibrium.
    pub fn from_strings(
        name: &str,
        states: &[&str],
        inputs: &[&str],
        update: &[&str],
    ) -> Result<Self, ModelError> {
        let mut text = format!(
            "system {name}\nstates: {}\ninputs: {}\nequilibrium: all zero\n",
            states.join(" "),
            inputs.join(" ")
        );
        for (s, f) in states.iter().zip(update) {
            text.push_str(&format!("next {s} = {f}\n"));
        }
        Self::parse(&text)
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    /// States followed by inputs.
    pub fn variables(&self) -> Vec<Symbol> {
        self.states.iter().chain(&self.inputs).copied().collect()
    }

    pub fn equilibrium(&self) -> HashMap<Symbol, BigRational> {
        self.states
            .iter()
            .zip(&self.x0)
            .chain(self.inputs.iter().zip(&self.u0))
            .map(|(s, v)| (*s, v.clone()))
            .collect()
    }

    pub fn state_equilibrium(&self) -> HashMap<Symbol, BigRational> {
        self.states
            .iter()
            .zip(&self.x0)
            .map(|(s, v)| (*s, v.clone()))
            .collect()
    }

    /// One application of the forward shift: states are replaced by `f` and
    /// every input shift is advanced by one.
    pub fn shift_xu(&self, g: &Expr) -> Result<Expr, SymbolicError> {
        let mut map: HashMap<Symbol, Expr> = HashMap::new();
        let bases: BTreeSet<Symbol> = self.inputs.iter().copied().collect();
        for s in g.symbols() {
            if let Some(i) = self.states.iter().position(|x| *x == s) {
                map.insert(s, self.update[i].clone());
            } else if bases.contains(&s.base()) {
                map.insert(s, Expr::var(s.shifted(1)));
            }
        }
        g.subs(&map)
    }

    pub fn shift_xu_n(&self, g: &Expr, count: usize) -> Result<Expr, SymbolicError> {
        let mut e = g.clone();
        for _ in 0..count {
            e = self.shift_xu(&e)?;
        }
        Ok(e)
    }

    /// Checks submersivity and the equilibrium identity.
    pub fn validate(&self) -> Result<ValidationReport, SymbolicError> {
        let vars = self.variables();
        let jac = SymbolicMatrix::jacobian(&self.update, &vars);
        let generic_rank = jac.rank()?;
        let eq = self.equilibrium();
        let rank_at_equilibrium = jac.eval_rational(&eq).map(|m| m.rank());
        let residuals = self
            .update
            .iter()
            .zip(&self.x0)
            .map(|(f, x)| f.eval_rational(&eq).map(|v| v - x))
            .collect();
        let input_rank = SymbolicMatrix::jacobian(&self.update, &self.inputs).rank()?;
        Ok(ValidationReport {
            n: self.n(),
            m: self.m(),
            generic_rank,
            rank_at_equilibrium,
            residuals,
            input_rank,
            non_rational: (1..=self.n())
                .filter(|i| !self.update[i - 1].is_rational())
                .collect(),
        })
    }
}

fn strip_keyword<'a>(line: &'a str, kw: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(kw)?;
    if rest.starts_with(char::is_whitespace) {
        Some(rest)
    } else {
        None
    }
}

fn ident_list(rest: &str, line: usize, col0: usize) -> Result<Vec<Symbol>, ModelError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in rest.split(|c: char| c.is_whitespace() || c == ',') {
        let col = col0 + offset + 1;
        offset += tok.len() + 1;
        if tok.is_empty() {
            continue;
        }
        if !is_ident(tok) {
            return Err(ModelError::Syntax {
                line,
                column: col,
                message: format!("invalid identifier `{tok}`"),
            });
        }
        if tok.starts_with('_') || FuncKind::from_name(tok).is_some() {
            return Err(ModelError::Syntax {
                line,
                column: col,
                message: format!("`{tok}` is a reserved name"),
            });
        }
        out.push(Symbol::new(tok));
    }
    if out.is_empty() {
        return Err(ModelError::Syntax {
            line,
            column: col0 + 1,
            message: "expected at least one identifier".into(),
        });
    }
    Ok(out)
}

type EquilibriumSpec = Option<Vec<(String, BigRational)>>;

fn parse_equilibrium(rest: &str, line: usize, col0: usize) -> Result<EquilibriumSpec, ModelError> {
    let words: Vec<&str> = rest.split_whitespace().collect();
    if words == ["all", "zero"] {
        return Ok(None);
    }
    let err = |message: String| ModelError::Syntax {
        line,
        column: col0 + 1,
        message,
    };
    // `a = 1 b = -1/2` or `a=1, b=-1/2`
    let flat = rest.replace(',', " ");
    let mut pairs = Vec::new();
    let mut toks = flat.split('=').map(str::trim).peekable();
    let mut name = toks
        .next()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| err("expected `<ident> = <rational>` pairs or `all zero`".into()))?
        .to_string();
    let parts: Vec<&str> = toks.collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        let (value, next) = if last {
            (*part, "")
        } else {
            match part.rsplit_once(char::is_whitespace) {
                Some((v, n)) => (v.trim(), n.trim()),
                None => return Err(err(format!("malformed equilibrium near `{part}`"))),
            }
        };
        if !is_ident(&name) {
            return Err(err(format!("invalid identifier `{name}`")));
        }
        let v = parse_rational(value).ok_or_else(|| err(format!("invalid rational `{value}`")))?;
        pairs.push((name.clone(), v));
        name = next.to_string();
    }
    if pairs.is_empty() {
        return Err(err(
            "expected `<ident> = <rational>` pairs or `all zero`".into()
        ));
    }
    Ok(Some(pairs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub n: usize,
    pub m: usize,
    pub generic_rank: usize,
    pub rank_at_equilibrium: Option<usize>,
    /// `f(x₀, u₀) − x₀`, `None` where `f` has a pole.
    pub residuals: Vec<Option<BigRational>>,
    pub input_rank: usize,
    /// Components involving `sin`, `cos`, `exp` or `ln`, 1-based.
    pub non_rational: Vec<usize>,
}

impl ValidationReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.non_rational.is_empty() {
            let list: Vec<String> = self.non_rational.iter().map(|i| i.to_string()).collect();
            out.push(format!(
                "not a rational map (component {}); the analysis supports rational functions only",
                list.join(", ")
            ));
            return out;
        }
        if self.generic_rank < self.n {
            out.push(format!(
                "not a submersion: generic rank of the Jacobian is {} < n = {}",
                self.generic_rank, self.n
            ));
        }
        match self.rank_at_equilibrium {
            None => out.push("the update map has a pole at the equilibrium".into()),
            Some(r) if r < self.generic_rank => out.push(format!(
                "rank drop at equilibrium: rank {} there versus generic rank {}",
                r, self.generic_rank
            )),
            _ => {}
        }
        for (i, r) in self.residuals.iter().enumerate() {
            match r {
                Some(v) if v.is_zero() => {}
                Some(v) => out.push(format!(
                    "equilibrium identity fails for component {}: residual {}",
                    i + 1,
                    v
                )),
                None => out.push(format!("component {} has a pole at the equilibrium", i + 1)),
            }
        }
        out
    }

    pub fn passes(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn has_redundant_inputs(&self) -> bool {
        self.input_rank < self.m
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank d(x,u)f = {} (n = {}), at equilibrium {}, rank d_u f = {} (m = {})",
            self.generic_rank,
            self.n,
            self.rank_at_equilibrium
                .map(|r| r.to_string())
                .unwrap_or_else(|| "undefined".into()),
            self.input_rank,
            self.m
        )
    }
}

/// Result of removing redundant inputs.
#[derive(Clone, Debug)]
pub struct InputReduction {
    pub reduced: DiscreteTimeSystem,
    /// New inputs `û` and their definitions in the original variables.
    pub hat_inputs: Vec<(Symbol, Expr)>,
    /// Inputs `ũ` that do not influence the dynamics.
    pub eliminated: Vec<Symbol>,
    /// Original inputs in terms of `x`, `û` and `ũ`.
    pub inverse: Vec<(Symbol, Expr)>,
}

/// Replaces the inputs by `m̂ = rank ∂_u f` combinations that actually enter
/// `f`; the remaining inputs drop out of the dynamics.
pub fn eliminate_redundant_inputs(
    s: &DiscreteTimeSystem,
    max_degree: u32,
) -> Result<InputReduction, ModelError> {
    let ju = SymbolicMatrix::jacobian(&s.update, &s.inputs);
    let rref = ju.rref()?;
    let mhat = rref.rank();
    if mhat == s.m() {
        return Err(ModelError::Incomplete(
            "no redundancy: rank of the input Jacobian equals the number of inputs".into(),
        ));
    }
    let pivot_inputs: Vec<Symbol> = rref.pivots.iter().map(|&j| s.inputs[j]).collect();
    let eliminated: Vec<Symbol> = (0..s.m())
        .filter(|j| !rref.pivots.contains(j))
        .map(|j| s.inputs[j])
        .collect();
    // kernel fields act on the inputs only; states are parameters
    let vars = s.variables();
    let fields: Vec<Vec<Expr>> = rref
        .nullspace()
        .into_iter()
        .map(|k| {
            let mut v = vec![Expr::zero(); s.n()];
            v.extend(k);
            v
        })
        .collect();
    let eq = s.equilibrium();
    let mut chosen: Vec<Expr> = Vec::new();
    for d in 1..=max_degree.max(1) {
        let cands: Vec<Expr> = polynomial_invariants(&vars, &fields, d)
            .into_iter()
            .filter(|c| c.symbols().iter().any(|x| s.inputs.contains(x)))
            .collect();
        chosen = pick_independent(&cands, &[], &pivot_inputs, mhat, std::slice::from_ref(&eq));
        if chosen.len() == mhat {
            break;
        }
    }
    if chosen.len() < mhat {
        return Err(ModelError::Incomplete(format!(
            "no polynomial input combination of degree <= {max_degree} removes the redundant inputs"
        )));
    }
    let mut hat_inputs = Vec::new();
    for (i, e) in chosen.iter().enumerate() {
        let name = match e.as_symbol() {
            Some(v) if s.inputs.contains(&v) => v,
            _ => Symbol::new(&format!("_uh{}", i + 1)),
        };
        hat_inputs.push((name, e.clone()));
    }
    // inputs kept under their own name need no equation
    let kept = |u: &Symbol| {
        hat_inputs
            .iter()
            .any(|(h, e)| h == u && e.as_symbol() == Some(*u))
    };
    let eqs: Vec<Expr> = hat_inputs
        .iter()
        .filter(|(h, _)| !kept(h))
        .map(|(h, e)| Expr::var(*h) - e)
        .collect();
    let unknowns: Vec<Symbol> = pivot_inputs.iter().filter(|u| !kept(u)).copied().collect();
    let sol = solve_algebraic(&eqs, &unknowns)?;
    if sol.inconsistent || !sol.residual.is_empty() {
        return Err(ModelError::Incomplete(
            "input transformation could not be inverted".into(),
        ));
    }
    let map = sol.as_map();
    let inverse: Vec<(Symbol, Expr)> = s
        .inputs
        .iter()
        .map(|u| (*u, map.get(u).cloned().unwrap_or_else(|| Expr::var(*u))))
        .collect();
    let update = s
        .update
        .iter()
        .map(|f| f.subs(&map))
        .collect::<Result<Vec<_>, _>>()?;
    for f in &update {
        if let Some(u) = eliminated.iter().find(|u| f.depends_on(**u)) {
            return Err(ModelError::Incomplete(format!(
                "reduced dynamics still depend on `{u}`"
            )));
        }
    }
    let u0: Vec<BigRational> = hat_inputs
        .iter()
        .map(|(_, e)| e.eval_rational(&eq).unwrap_or_else(BigRational::zero))
        .collect();
    let reduced = DiscreteTimeSystem {
        name: s.name.clone(),
        states: s.states.clone(),
        inputs: hat_inputs.iter().map(|(h, _)| *h).collect(),
        update,
        x0: s.x0.clone(),
        u0,
    };
    Ok(InputReduction {
        reduced,
        hat_inputs,
        eliminated,
        inverse,
    })
}

/// Rank of `∂_u f` at the equilibrium, used to route redundant inputs.
pub fn input_rank_at_equilibrium(s: &DiscreteTimeSystem) -> Option<usize> {
    jacobian_rank_at(&s.update, &s.inputs, &s.equilibrium())
}

/// Generic rank of `∂_u f`.
pub fn input_rank(s: &DiscreteTimeSystem) -> usize {
    generic_jacobian_rank(&s.update, &s.inputs)
}
