use kecover_core::criteria::{
    check_single_cover, check_transverse_system, check_with_exponent, decide, exponent_lower_bound, CoverDescriptor,
    CoverSystem,
};
use kecover_core::divisor_algebra::{int, ratio, BetaValue, Rational};
use proptest::prelude::*;

fn beta_strategy() -> impl Strategy<Value = BetaValue> {
    (1i64..40, 1i64..12).prop_map(|(p, q)| BetaValue::from_ratio(p, q).unwrap())
}

fn transverse(covers: Vec<CoverDescriptor>) -> CoverSystem {
    CoverSystem::new(covers, false, true).unwrap()
}

proptest! {
    #[test]
    fn one_transverse_cover_agrees_with_single_cover(d in 2u32..12, beta in beta_strategy()) {
        let cover = CoverDescriptor::ideal(d, beta).unwrap();
        let single = check_single_cover(&cover);
        let system = check_transverse_system(&transverse(vec![cover]));
        prop_assert_eq!(single.ke_proven, system.ke_proven);
    }

    #[test]
    fn adding_a_cover_never_loses_a_proof(
        ds in prop::collection::vec(2u32..8, 1..5),
        betas in prop::collection::vec(beta_strategy(), 5),
        extra_d in 2u32..8,
        extra_bump in 0i64..5,
    ) {
        let covers: Vec<CoverDescriptor> = ds
            .iter()
            .zip(&betas)
            .map(|(&d, b)| CoverDescriptor::ideal(d, b.clone()).unwrap())
            .collect();
        let mut system = transverse(covers);
        let before = check_transverse_system(&system);
        let extra_beta = BetaValue::new(system.min_beta() + int(extra_bump)).unwrap();
        system.push(CoverDescriptor::ideal(extra_d, extra_beta).unwrap()).unwrap();
        let after = check_transverse_system(&system);
        prop_assert!(!before.ke_proven || after.ke_proven);
        prop_assert_eq!(after.recheck(), after.ke_proven);
    }

    #[test]
    fn single_exponent_bound_times_order_is_one(d in 2u32..40, beta in beta_strategy()) {
        let system = CoverSystem::single(CoverDescriptor::ideal(d, beta).unwrap());
        prop_assert_eq!(exponent_lower_bound(&system) * int(d as i64 - 1), int(1));
    }

    #[test]
    fn exponent_check_is_strict_in_beta(c_num in 1i64..30, c_den in 1i64..30, d in 2u32..6) {
        let c = ratio(c_num, c_den);
        let at = |beta: Rational| {
            let system = CoverSystem::single(CoverDescriptor::ideal(d, BetaValue::new(beta).unwrap()).unwrap());
            check_with_exponent(&system, &c).unwrap().ke_proven
        };
        let boundary = c.recip();
        prop_assert!(!at(boundary.clone()));
        prop_assert!(at(&boundary + ratio(1, 1000)));
    }

    #[test]
    fn decide_is_self_consistent(
        ds in prop::collection::vec(2u32..8, 1..4),
        betas in prop::collection::vec(beta_strategy(), 4),
        disjoint in any::<bool>(),
        transverse_flag in any::<bool>(),
    ) {
        let covers: Vec<CoverDescriptor> = ds
            .iter()
            .zip(&betas)
            .map(|(&d, b)| CoverDescriptor::ideal(d, b.clone()).unwrap())
            .collect();
        let system = CoverSystem::new(covers, disjoint, transverse_flag).unwrap();
        let verdict = decide(&system);
        prop_assert_eq!(verdict.recheck(), verdict.ke_proven);
        let json = serde_json::to_string(&system).unwrap();
        let back: CoverSystem = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, system);
    }
}

#[test]
fn missing_hypothesis_blocks_every_criterion() {
    let mut cover = CoverDescriptor::ideal(2, BetaValue::from_ratio(5, 1).unwrap()).unwrap();
    assert!(check_single_cover(&cover).ke_proven);
    cover.base_has_ke = false;
    let verdict = check_single_cover(&cover);
    assert!(!verdict.ke_proven);
    assert!(verdict.failed.is_some());
}
