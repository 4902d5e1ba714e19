mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(fields in field_triple()) {
        prop_bracket(&fields)?;
    }

    #[test]
    fn pushforward_commutes_with_bracket(case in push_case()) {
        prop_pushforward_bracket(&case)?;
    }

    #[test]
    fn largest_projectable_is_chart_and_basis_independent(case in chart_case()) {
        prop_uniqueness(&case)?;
    }

    #[test]
    fn largest_projectable_is_idempotent(case in idem_case()) {
        prop_idempotence(&case)?;
    }

    #[test]
    fn verdict_survives_linear_state_changes(case in change_case()) {
        prop_linear_change(&case)?;
    }

    #[test]
    fn appended_integrator_keeps_the_verdict(case in change_case()) {
        prop_integrator_extension(&case)?;
    }

    #[test]
    fn redundant_input_is_a_flat_output_component(case in redundant_case()) {
        prop_redundant_input(&case)?;
    }
}

#[test]
fn unimodular_inverse_round_trip() {
    let t = unimodular(3, &[1, -2, 2, 1, 0, -1]);
    let ti = inverse(&t);
    for (i, row) in t.iter().enumerate() {
        for j in 0..3 {
            let v: i64 = row.iter().zip(&ti).map(|(a, b)| a * b[j]).sum();
            assert_eq!(v, (i == j) as i64);
        }
    }
}
