mod support;

use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

use support::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: Some(Box::new(FileFailurePersistence::Direct(
            "tests/properties.proptest-regressions",
        ))),
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(10_000))]

    #[test]
    fn printing_round_trips(f in formula(6, 5, 32)) {
        round_trip(&f)?;
    }

    #[test]
    fn every_applicable_move_preserves_meaning(f in formula(6, 4, 16)) {
        moves_preserve_meaning(&f)?;
    }

    #[test]
    fn normal_forms_agree_with_truth_tables(f in formula(6, 4, 20)) {
        normal_forms_equivalent(&f)?;
    }

    #[test]
    fn index_sets_partition_rows(f in formula(6, 4, 20), n in 1usize..=6) {
        index_partition(&f, n)?;
    }
}

proptest! {
    #![proptest_config(config(2_000))]

    #[test]
    fn normal_form_traces_validate_strictly(f in formula(4, 3, 10)) {
        normal_form_traces_validate(&f)?;
    }

    #[test]
    fn principal_forms_list_the_right_rows(f in formula(4, 3, 12), n in 1usize..=4) {
        principal_forms(&f, n)?;
    }

    #[test]
    fn consequence_methods_respect_the_oracle((premises, conclusion) in argument(5)) {
        consequence_methods(&premises, &conclusion)?;
    }
}
