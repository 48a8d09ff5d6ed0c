use poisfol::testkit;
use proptest::prelude::*;

fn run(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn schouten_bracket_is_graded_lie_and_leibniz(seed in any::<u64>()) {
        run(testkit::check_schouten_identities(seed))?;
    }

    #[test]
    fn lichnerowicz_differential_squares_to_zero(seed in any::<u64>()) {
        run(testkit::check_dpi_squared(seed))?;
    }

    #[test]
    fn brackets_shift_bigrades(seed in any::<u64>()) {
        run(testkit::check_bigrading(seed))?;
    }

    #[test]
    fn good_multivectors_are_closed_under_brackets(seed in any::<u64>()) {
        run(testkit::check_good_closure(seed))?;
    }

    #[test]
    fn generalized_jacobi_holds_up_to_arity_four(seed in any::<u64>()) {
        run(testkit::check_linfty_jacobi(seed))?;
    }

    #[test]
    fn phi_is_a_strict_morphism(seed in any::<u64>()) {
        run(testkit::check_strict_morphism(seed))?;
    }

    #[test]
    fn anchor_maps_are_compatible(seed in any::<u64>()) {
        run(testkit::check_anchor_compatibility(seed))?;
    }

    #[test]
    fn exponential_rank_and_mc_equivalences(seed in any::<u64>()) {
        testkit::check_exp_equivalences(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn dirac_fiber_lemmas(seed in any::<u64>()) {
        run(testkit::check_dirac_fiber(seed))?;
    }

    #[test]
    fn kuranishi_classes_agree_on_t3(seed in any::<u64>()) {
        testkit::check_kuranishi_agreement(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn averaging_never_flags_a_coboundary(seed in any::<u64>()) {
        run(testkit::check_averaging_soundness(seed))?;
    }

    #[test]
    fn canonical_printing_round_trips(seed in any::<u64>()) {
        run(testkit::check_roundtrip(seed))?;
    }

    #[test]
    fn two_parameter_family_matches_closed_forms(seed in any::<u64>()) {
        run(testkit::check_two_parameter_family(seed))?;
    }
}

#[test]
fn courant_tensor_detects_noninvolutive_complements() {
    testkit::check_upsilon_involutive().unwrap();
}
