use kecover_core::kahler1d::{
    convergence_table, doubling_changes, run_identity_suite, BumpProfile, BumpSampler, Calculus, Grid, IdentityConfig,
    ReducedForm, Stencil,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn full_identity_suite() {
    let start = std::time::Instant::now();
    let config = IdentityConfig::new(Grid::new(12.0, 4096).unwrap(), 100, 42);
    let result = run_identity_suite(&Calculus::default(), &config).unwrap();
    for (name, value) in &result.worst {
        println!("{name}: {value:e}");
    }
    assert!(result.all_passed(), "{:?}", result.passed);
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn functionals_are_stable_under_grid_doubling() {
    let calc = Calculus::default();
    let grid = Grid::new(12.0, 2048).unwrap();
    let form = ReducedForm::fubini_study(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let profiles: Vec<BumpProfile> = BumpSampler::default().draw_many(&mut rng, 10, &calc, &form);
    assert!(doubling_changes(&calc, grid, &profiles, 1e-3).unwrap() < 1e-6);
}

#[test]
fn fourth_order_stencil_converges_faster() {
    let second = convergence_table(12.0, 128, 4, Stencil::Second).unwrap();
    let fourth = convergence_table(12.0, 128, 4, Stencil::Fourth).unwrap();
    for row in &fourth[1..] {
        assert!(row.ratio.unwrap() > 12.0, "{fourth:?}");
    }
    assert!(fourth[3].error < 1e-3 * second[3].error);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_ordering_holds_for_random_potentials(seed in any::<u64>()) {
        let calc = Calculus::default();
        let grid = Grid::new(12.0, 1024).unwrap();
        let form = ReducedForm::fubini_study(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profile = BumpSampler::default().draw_admissible(&mut rng, &calc, &form);
        let phi = profile.sample(grid);
        let i = calc.functional_i(&form, &phi).unwrap();
        let j = calc.functional_j(&form, &phi).unwrap();
        prop_assert!(j.parts >= 0.0);
        prop_assert!(i >= j.parts);
        // (n + 1)/n J <= I <= (n + 1) J with n = 1
        prop_assert!(i <= 2.0 * j.parts * (1.0 + 1e-6) + 1e-12);
        prop_assert!(i >= 2.0 * j.parts * (1.0 - 1e-6) - 1e-12);
    }
}
