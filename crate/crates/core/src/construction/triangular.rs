use std::collections::HashMap;

use crate::geometry::generic_jacobian_rank;
use crate::symbolic::{solve_algebraic, Expr, Symbol};
use crate::verification::{shift_y, FlatParametrization};

use super::{ConstructionError, DecompositionTrace, StateTransformation};

/// One block `Ξ_k` of equations `w_k = 0`, solvable for `ẑ_{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularBlock {
    pub k: usize,
    pub solves_for: Vec<Symbol>,
    pub equations: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitTriangularForm {
    /// `z = (y_k̄, (y_{k̄-1}, ẑ_{k̄-1}), …, ẑ_0)`.
    pub variables: Vec<Symbol>,
    pub outputs: Vec<Symbol>,
    /// `Ξ_k̄, …, Ξ_1`.
    pub blocks: Vec<TriangularBlock>,
}

fn shift_all(e: &Expr) -> Expr {
    e.rename(&|s| s.shifted(1))
}

/// `z_k`: `y_k` together with `ẑ_k` (only `y_k̄` at the top, only `ẑ_0` at
/// the bottom).
fn z_block(trace: &DecompositionTrace, k: usize) -> Vec<Symbol> {
    let mut out = Vec::new();
    if k >= 1 {
        out.extend(trace.y_blocks[k - 1].iter().copied());
    }
    if k < trace.kbar {
        out.extend(trace.zhat_blocks[k].iter().copied());
    }
    out
}

/// Rewrites `x̄_k⁺ - f_k(x̄, u) = 0` in the decomposition coordinates, both
/// for the shifted and the unshifted variables.
pub fn to_implicit_triangular(
    trace: &DecompositionTrace,
) -> Result<ImplicitTriangularForm, ConstructionError> {
    let kbar = trace.kbar;
    let mut blocks = Vec::new();
    for k in (1..=kbar).rev() {
        let xb_syms = &trace.xbar_blocks[k - 1];
        let equations: Vec<Expr> = xb_syms
            .iter()
            .zip(&trace.fbar[k - 1])
            .map(|(x, f)| &shift_all(&trace.back[x]) - f)
            .collect();
        let solves_for = trace.zhat_blocks[k - 1].clone();
        let mut allowed: Vec<Symbol> = Vec::new();
        for j in k..=kbar {
            for v in z_block(trace, j) {
                allowed.push(v);
                allowed.push(v.shifted(1));
            }
        }
        allowed.extend(solves_for.iter().copied());
        for e in &equations {
            if let Some(bad) = e.symbols().into_iter().find(|s| !allowed.contains(s)) {
                return Err(ConstructionError::Inconsistent(format!(
                    "block {k} of the triangular form depends on {bad}"
                )));
            }
        }
        let rank = generic_jacobian_rank(&equations, &solves_for);
        if rank != solves_for.len() || equations.len() != solves_for.len() {
            return Err(ConstructionError::Inconsistent(format!(
                "rank condition fails for block {k} of the triangular form"
            )));
        }
        blocks.push(TriangularBlock {
            k,
            solves_for,
            equations,
        });
    }
    Ok(ImplicitTriangularForm {
        variables: trace.z_order(),
        outputs: trace.outputs(),
        blocks,
    })
}

/// Solves the blocks from the top down and composes with the inverse
/// transformations.
pub fn parametrize_from_triangular(
    t: &ImplicitTriangularForm,
    trace: &DecompositionTrace,
    st: &StateTransformation,
) -> Result<FlatParametrization, ConstructionError> {
    let mut known: HashMap<Symbol, Expr> = HashMap::new();
    for block in &t.blocks {
        let mut sub: HashMap<Symbol, Expr> = HashMap::new();
        for e in &block.equations {
            for s in e.symbols() {
                if let Some(p) = known.get(&s.base()) {
                    sub.insert(s, shift_y(p, s.shift()));
                }
            }
        }
        let eqs: Vec<Expr> = block
            .equations
            .iter()
            .map(|e| e.subs(&sub))
            .collect::<Result<_, _>>()?;
        let sol = solve_algebraic(&eqs, &block.solves_for)?;
        if !sol.is_complete() {
            return Err(ConstructionError::ImplicitSolve {
                block: block.k,
                equations: eqs.iter().map(|e| format!("{e} = 0")).collect(),
            });
        }
        for (v, e) in sol.assignments {
            known.insert(v, e);
        }
    }
    let param_z = |e: &Expr| -> Result<Expr, ConstructionError> { Ok(e.subs(&known)?) };
    let xbar: HashMap<Symbol, Expr> = st
        .symbols()
        .into_iter()
        .map(|v| Ok((v, param_z(&trace.back[&v])?)))
        .collect::<Result<_, ConstructionError>>()?;
    let fx: Vec<Expr> = st
        .inverse
        .iter()
        .map(|(_, e)| Ok(e.subs(&xbar)?))
        .collect::<Result<_, ConstructionError>>()?;
    let inputs = trace.inputs.clone();
    let fu: Vec<Expr> = inputs
        .iter()
        .map(|u| param_z(&trace.back[u]))
        .collect::<Result<_, _>>()?;
    Ok(FlatParametrization::new(
        t.outputs.clone(),
        st.states.clone(),
        fx,
        inputs,
        fu,
    ))
}

#[cfg(test)]
mod tests {
    use crate::analysis::{analyze, AnalysisOptions};
    use crate::construction::construct;
    use crate::model::DiscreteTimeSystem;
    use crate::symbolic::parse::{any_symbol, parse_expr};
    use crate::symbolic::Expr;

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    #[test]
    fn four_state_example_blocks() {
        let s = DiscreteTimeSystem::from_strings(
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
        .unwrap();
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        let c = construct(&r, 3).unwrap();
        let eqs: Vec<Vec<Expr>> = c
            .triangular
            .blocks
            .iter()
            .map(|b| b.equations.clone())
            .collect();
        assert_eq!(
            eqs,
            vec![
                vec![p("y3_1[1] - zh2_1")],
                vec![
                    p("y2_1[1] - y3_1*zh1_2 - zh1_1"),
                    p("zh2_1[1] - y2_1[1] - zh1_2")
                ],
                vec![p("zh1_1[1] - y3_1 - zh0_1")],
            ]
        );
        assert_eq!(c.parametrization.r, vec![3, 2]);
        assert_eq!(
            c.parametrization.fx[3],
            p("y2_1[1] - y3_1*y3_1[2] + y3_1*y2_1[1]")
        );
    }

    #[test]
    fn single_integrator() {
        let s = DiscreteTimeSystem::from_strings("t", &["x1"], &["u"], &["u"]).unwrap();
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        let c = construct(&r, 3).unwrap();
        assert_eq!(c.triangular.blocks.len(), 1);
        assert_eq!(c.triangular.blocks[0].equations, vec![p("y1_1[1] - zh0_1")]);
        assert_eq!(c.parametrization.fx, vec![p("y1_1")]);
        assert_eq!(c.parametrization.fu, vec![p("y1_1[1]")]);
        assert_eq!(c.parametrization.r, vec![1]);
    }
}
