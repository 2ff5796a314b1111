use kecover_core::divisor_algebra::{
    anticanonical_degree, beta_integral, class_scaling_factor, cp_sum, hurwitz_check, int, model_beta, ratio,
    standard_cover, FanoModel, QClass, Rational,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn binomial(n: i64, k: i64) -> Rational {
    (0..k).fold(Rational::one(), |acc, j| acc * ratio(n - j, j + 1))
}

/// `int_0^1 s^{p+1} (1-s)^k ds` by expanding `(1-s)^k` and integrating monomials.
fn beta_integral_by_expansion(p: u32, k: u32) -> Rational {
    (0..=k as i64).fold(Rational::zero(), |acc, j| {
        let sign = if j % 2 == 0 { int(1) } else { int(-1) };
        acc + sign * binomial(k as i64, j) * ratio(1, p as i64 + j + 2)
    })
}

/// Telescoped closed form `(n - p) / (n + 1)`.
fn cp_sum_closed(n: u32, p: u32) -> Rational {
    ratio(n as i64 - p as i64, n as i64 + 1)
}

fn catalog_models(max_n: u32) -> Vec<(FanoModel, Rational)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let ni = n as i64;
        for d in 2..=n + 1 {
            let di = d as i64;
            out.push((FanoModel::HypersurfaceInP { n, d }, ratio(di - 1, ni + 2 - di)));
        }
        for m in 2..=n + 2 {
            for d in 2..=n + m {
                let (mi, di) = (m as i64, d as i64);
                if ni + mi + 1 - mi * di <= 0 {
                    continue;
                }
                out.push((
                    FanoModel::CompleteIntersectionInP { n, m, d },
                    ratio(di - 1, ni + mi + 1 - mi * di),
                ));
            }
        }
        for d in 1..=n {
            let di = d as i64;
            out.push((FanoModel::DoubleCoverOfP { n, d }, ratio(di, ni + 1 - di)));
        }
        for d in 1..n {
            let di = d as i64;
            out.push((FanoModel::DoubleCoverOfQuadric { n, d }, ratio(di, ni - di)));
        }
    }
    out
}

#[test]
fn beta_integral_matches_expansion_up_to_ten() {
    for p in 0..=10 {
        for k in 0..=10 {
            assert_eq!(beta_integral(p, k), beta_integral_by_expansion(p, k), "p={p} k={k}");
        }
    }
}

#[test]
fn cp_sum_matches_telescoped_form_up_to_twelve() {
    for n in 1..=12 {
        for p in 0..n {
            assert_eq!(cp_sum(n, p).unwrap(), cp_sum_closed(n, p), "n={n} p={p}");
        }
    }
    assert!(cp_sum(3, 3).is_err());
    assert!(cp_sum(0, 0).is_err());
}

#[test]
fn beta_formulas_across_the_catalog() {
    let models = catalog_models(8);
    assert!(models.len() > 100);
    for (model, expected) in models {
        assert_eq!(*model_beta(&model).unwrap().get(), expected, "{model:?}");
    }
}

#[test]
fn hurwitz_holds_and_breaks_under_unit_perturbation() {
    for (model, _) in catalog_models(8)
        .into_iter()
        .chain([(FanoModel::FermatCoverP1 { d: 4 }, int(3))])
    {
        let cover = standard_cover(&model).unwrap();
        let anti = anticanonical_degree(&model).unwrap();
        assert!(hurwitz_check(
            &cover.pullback_anticanonical_base,
            &anti,
            &cover.ramification
        ));
        let unit = QClass::from_int(1);
        let bumped = &cover.ramification + &unit;
        let lowered = &cover.ramification - &unit;
        assert!(!hurwitz_check(&cover.pullback_anticanonical_base, &anti, &bumped));
        assert!(!hurwitz_check(&cover.pullback_anticanonical_base, &anti, &lowered));
    }
}

#[test]
fn non_fano_models_are_rejected() {
    assert!(model_beta(&FanoModel::HypersurfaceInP { n: 3, d: 9 }).is_err());
    assert!(model_beta(&FanoModel::CompleteIntersectionInP { n: 2, m: 3, d: 2 }).is_err());
}

proptest! {
    #[test]
    fn hurwitz_fails_for_any_nonzero_perturbation(
        n in 1u32..9, d_off in 0u32..8, num in -50i64..50, den in 1i64..20,
    ) {
        prop_assume!(num != 0);
        let d = 2 + d_off % n;
        let model = FanoModel::HypersurfaceInP { n, d };
        let cover = standard_cover(&model).unwrap();
        let anti = anticanonical_degree(&model).unwrap();
        let perturbed = &cover.ramification + &QClass::new(ratio(num, den));
        prop_assert!(!hurwitz_check(&cover.pullback_anticanonical_base, &anti, &perturbed));
    }

    #[test]
    fn hypersurface_beta_increases_with_degree(n in 2u32..20) {
        let mut previous = Rational::zero();
        for d in 2..=n + 1 {
            let beta = model_beta(&FanoModel::HypersurfaceInP { n, d }).unwrap().get().clone();
            prop_assert!(beta > previous);
            previous = beta;
        }
    }

    #[test]
    fn scaling_factor_is_pullback_ratio(n in 1u32..12, d_off in 0u32..12) {
        // pi^*(-K_N) = (1 + beta)(-K_M)
        let d = 2 + d_off % n;
        let model = FanoModel::HypersurfaceInP { n, d };
        let cover = standard_cover(&model).unwrap();
        let anti = anticanonical_degree(&model).unwrap();
        let beta = model_beta(&model).unwrap();
        prop_assert_eq!(anti.scale(&class_scaling_factor(&beta)), cover.pullback_anticanonical_base);
    }

    #[test]
    fn cp_sum_stays_below_one(n in 1u32..40, p_off in 0u32..40) {
        let p = p_off % n;
        let value = cp_sum(n, p).unwrap();
        prop_assert!(value > Rational::zero() && value < Rational::one());
        prop_assert_eq!(value, cp_sum_closed(n, p));
    }
}
