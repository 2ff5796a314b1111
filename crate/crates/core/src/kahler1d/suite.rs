//! Seeded batch verification of the functional identities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::form::{round_density, RadialPotential, ReducedForm};
use super::grid::{Grid, Stencil};
use super::sampling::{BumpProfile, BumpSampler};
use super::{relative_difference, Calculus, KahlerError, Tolerances};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub grid: Grid,
    pub samples: usize,
    pub seed: u64,
    pub sampler: BumpSampler,
    pub tolerances: Tolerances,
    pub constants: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl IdentityConfig {
    pub fn new(grid: Grid, samples: usize, seed: u64) -> Self {
        IdentityConfig {
            grid,
            samples,
            seed,
            sampler: BumpSampler::default(),
            tolerances: Tolerances::default(),
            constants: vec![-3.0, 0.7, 10.0],
            lambdas: vec![0.5, 3.0, 10.0],
        }
    }
}

/// Residuals for one sampled potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub index: usize,
    pub j_spread: f64,
    pub f0_relative: f64,
    pub f0_absolute: f64,
    pub cocycle: f64,
    pub scaling: f64,
    pub constant_shift: f64,
    pub mass: f64,
    /// `I >= J >= 0` up to `1e-12`.
    pub ordered: bool,
    pub i: f64,
    pub j: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentitySuiteResult {
    pub records: Vec<IdentityRecord>,
    /// Worst residual per identity, in a fixed order.
    pub worst: Vec<(String, f64)>,
    /// Pass flag per identity, same order as `worst`.
    pub passed: Vec<(String, bool)>,
}

impl IdentitySuiteResult {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|(_, ok)| *ok)
    }

    pub fn worst_of(&self, name: &str) -> Option<f64> {
        self.worst.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Bounded potential `2 log(1 + e^{t+c}) - 2 log(1 + e^t)`, which moves the
/// round form to its translate `rho(t + c)`.
pub fn dilation_potential(grid: Grid, c: f64) -> RadialPotential {
    let softplus = |x: f64| {
        if x > 0.0 {
            x + (-x).exp().ln_1p()
        } else {
            x.exp().ln_1p()
        }
    };
    RadialPotential::from_fn(grid, |t| 2.0 * (softplus(t + c) - softplus(t)))
}

fn record(
    calc: &Calculus,
    config: &IdentityConfig,
    form: &ReducedForm,
    ricci: &RadialPotential,
    index: usize,
    phi: &RadialPotential,
    partner: &RadialPotential,
) -> Result<IdentityRecord, KahlerError> {
    let report = calc.functional_f_with(form, phi, ricci)?;
    let j = super::JValues {
        quadrature: report.j_quadrature,
        donaldson: report.j_donaldson,
        parts: report.j_parts,
    };
    let mut scaling: f64 = 0.0;
    for &lambda in &config.lambdas {
        scaling = scaling.max(calc.scaling_check(lambda, form, phi)?);
    }
    let mut constant_shift: f64 = 0.0;
    for &c in &config.constants {
        let moved = calc.functional_f_with(form, &phi.shifted(c), ricci)?;
        constant_shift = constant_shift.max((moved.f - report.f).abs());
    }
    let moved = calc.ma_density(form, phi)?;
    Ok(IdentityRecord {
        index,
        j_spread: j.spread(),
        f0_relative: relative_difference(report.f0_definition, report.f0_donaldson),
        f0_absolute: (report.f0_definition - report.f0_donaldson).abs(),
        cocycle: calc.cocycle_check(form, phi, partner)?,
        scaling,
        constant_shift,
        mass: (moved.mass() - form.mass()).abs() / form.mass(),
        ordered: report.j_parts >= -1e-12 && report.i - report.j_parts >= -1e-12,
        i: report.i,
        j: report.j_parts,
        f: report.f,
    })
}

/// Runs every identity over `config.samples` seeded bump potentials on the
/// round form, plus two checks that pin `kappa`: the Ricci potential of the
/// round form vanishes, and a dilation potential moves the round form to
/// its translate.
pub fn run_identity_suite(calc: &Calculus, config: &IdentityConfig) -> Result<IdentitySuiteResult, KahlerError> {
    if config.samples == 0 {
        return Err(KahlerError::InvalidParameter("need at least one sample".into()));
    }
    let form = ReducedForm::fubini_study(config.grid);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let profiles: Vec<BumpProfile> = config.sampler.draw_many(&mut rng, config.samples, calc, &form);
    let potentials: Vec<RadialPotential> = profiles.iter().map(|s| s.sample(config.grid)).collect();

    let round_ricci = calc.ricci_potential(&form)?;
    let ricci_round = round_ricci.sup_norm();

    let shift = 1.0;
    let dilated = calc.ma_density(&form, &dilation_potential(config.grid, shift))?;
    let expected = config.grid.sample(|t| round_density(t + shift));
    let scale = expected.iter().cloned().fold(0.0, f64::max);
    let density_match = dilated
        .density
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;

    let count = potentials.len();
    let records: Vec<IdentityRecord> = (0..count)
        .into_par_iter()
        .map(|k| {
            record(
                calc,
                config,
                &form,
                &round_ricci,
                k,
                &potentials[k],
                &potentials[(k + 1) % count],
            )
        })
        .collect::<Result<_, _>>()?;

    let tol = &config.tolerances;
    let worst = |f: &dyn Fn(&IdentityRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let f0_ok = records
        .iter()
        .all(|r| r.f0_relative <= tol.f0 || r.f0_absolute <= tol.f0_absolute);
    let worst_values = vec![
        ("j_three_way".to_string(), worst(&|r| r.j_spread)),
        ("f0_two_way".to_string(), worst(&|r| r.f0_relative)),
        ("cocycle".to_string(), worst(&|r| r.cocycle)),
        ("scaling".to_string(), worst(&|r| r.scaling)),
        ("constant_invariance".to_string(), worst(&|r| r.constant_shift)),
        ("mass_conservation".to_string(), worst(&|r| r.mass)),
        (
            "i_ge_j_ge_0".to_string(),
            records.iter().filter(|r| !r.ordered).count() as f64,
        ),
        ("ricci_round".to_string(), ricci_round),
        ("dilation_density".to_string(), density_match),
    ];
    let passed = vec![
        ("j_three_way".to_string(), worst_values[0].1 < tol.j),
        ("f0_two_way".to_string(), f0_ok),
        ("cocycle".to_string(), worst_values[2].1 < tol.cocycle),
        ("scaling".to_string(), worst_values[3].1 < tol.scaling),
        ("constant_invariance".to_string(), worst_values[4].1 < tol.constant),
        ("mass_conservation".to_string(), worst_values[5].1 < tol.mass),
        ("i_ge_j_ge_0".to_string(), worst_values[6].1 == 0.0),
        ("ricci_round".to_string(), ricci_round < tol.f0),
        ("dilation_density".to_string(), density_match < tol.density_match),
    ];
    Ok(IdentitySuiteResult {
        records,
        worst: worst_values,
        passed,
    })
}

/// One row of a finite-difference convergence study.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub intervals: usize,
    pub step: f64,
    pub error: f64,
    /// Error of the previous (coarser) row divided by this one.
    pub ratio: Option<f64>,
}

/// Sup-norm error of the discrete `u''` for `u = sin(t) exp(-t^2 / 4)`
/// on `levels` successively doubled grids.
pub fn convergence_table(
    half_width: f64,
    intervals: usize,
    levels: usize,
    stencil: Stencil,
) -> Result<Vec<ConvergenceRow>, KahlerError> {
    let u = |t: f64| t.sin() * (-t * t / 4.0).exp();
    // (sin t e^{-t^2/4})'' = e^{-t^2/4} [(t^2/4 - 3/2) sin t - t cos t]
    let exact = |t: f64| (-t * t / 4.0).exp() * ((t * t / 4.0 - 1.5) * t.sin() - t * t.cos());
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    let mut grid = Grid::new(half_width, intervals)?;
    for _ in 0..levels {
        let values = grid.sample(u);
        let d2 = stencil.second_derivative(&values, grid.step());
        let error = (0..grid.len())
            .map(|i| (d2[i] - exact(grid.point(i))).abs())
            .fold(0.0, f64::max);
        let ratio = rows.last().map(|prev| prev.error / error);
        rows.push(ConvergenceRow {
            intervals: grid.intervals,
            step: grid.step(),
            error,
            ratio,
        });
        grid = grid.refined();
    }
    Ok(rows)
}

/// Largest relative change of `I`, `J`, `F^0`, `A`, `F` when the grid is
/// refined once, over the given potentials. Values below `floor` in
/// magnitude are compared against `floor`.
pub fn doubling_changes(calc: &Calculus, grid: Grid, profiles: &[BumpProfile], floor: f64) -> Result<f64, KahlerError> {
    let coarse_form = ReducedForm::fubini_study(grid);
    let fine_form = ReducedForm::fubini_study(grid.refined());
    let coarse_ricci = calc.ricci_potential(&coarse_form)?;
    let fine_ricci = calc.ricci_potential(&fine_form)?;
    let mut worst: f64 = 0.0;
    for profile in profiles {
        let a = calc.functional_f_with(&coarse_form, &profile.sample(grid), &coarse_ricci)?;
        let b = calc.functional_f_with(&fine_form, &profile.sample(grid.refined()), &fine_ricci)?;
        let pairs = [
            (a.i, b.i),
            (a.j_parts, b.j_parts),
            (a.j_quadrature, b.j_quadrature),
            (a.f0_definition, b.f0_definition),
            (a.a, b.a),
            (a.f, b.f),
        ];
        for (x, y) in pairs {
            worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(floor));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let config = IdentityConfig::new(Grid::new(12.0, 4096).unwrap(), 8, 3);
        let result = run_identity_suite(&Calculus::default(), &config).unwrap();
        assert!(result.all_passed(), "{:?}", result.worst);
    }

    #[test]
    fn broken_kappa_is_detected() {
        let config = IdentityConfig::new(Grid::new(12.0, 1024).unwrap(), 4, 3);
        let calc = Calculus::default().with_kappa_factor(1.1);
        let result = run_identity_suite(&calc, &config).unwrap();
        assert!(!result.all_passed());
    }

    #[test]
    fn second_order_convergence() {
        let rows = convergence_table(12.0, 256, 4, Stencil::Second).unwrap();
        for row in &rows[1..] {
            let ratio = row.ratio.unwrap();
            assert!((ratio - 4.0).abs() < 0.4, "{rows:?}");
        }
    }
}
