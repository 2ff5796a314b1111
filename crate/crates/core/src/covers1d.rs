//! The cyclic cover `z -> z^d` of `P^1` in the reduced coordinate.
//!
//! On `t = log |z|^2` the map is `t -> d t`. A base grid on `[-d T, d T]`
//! and a grid on `[-T, T]` with the same sample count correspond point by
//! point, so pull-backs and descents are exact reindexings:
//! `(pi^* rho_N)(t) = d^2 rho_N(d t)` and `(pi^* psi)(t) = psi(d t)`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor_algebra::{class_scaling_factor, model_beta, to_f64, BetaValue, FanoModel};
use crate::kahler1d::{
    relative_difference, BumpProfile, BumpSampler, Calculus, Grid, KahlerError, RadialPotential, ReducedForm,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("cover degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("base grid does not match the cover: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Kahler(#[from] KahlerError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermatCover {
    d: u32,
}

impl FermatCover {
    /// `d = 1` is the identity and is accepted for testing.
    pub fn new(d: u32) -> Result<Self, CoverError> {
        if d == 0 {
            return Err(CoverError::InvalidDegree(d));
        }
        Ok(FermatCover { d })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn factor(&self) -> f64 {
        self.d as f64
    }

    /// `beta = d - 1`, from the divisor arithmetic of the cover.
    pub fn beta(&self) -> Option<BetaValue> {
        if self.d < 2 {
            return None;
        }
        Some(model_beta(&FanoModel::FermatCoverP1 { d: self.d }).expect("Fermat covers are Fano"))
    }

    /// `1 + beta`, equal to `d`.
    pub fn scaling(&self) -> f64 {
        self.beta().map_or(1.0, |b| to_f64(&class_scaling_factor(&b)))
    }

    /// Grid of `M` matching a base grid.
    pub fn upstairs_grid(&self, base: Grid) -> Grid {
        base.scaled(1.0 / self.factor())
    }

    /// Grid of the base matching a grid of `M`.
    pub fn base_grid(&self, upstairs: Grid) -> Grid {
        upstairs.scaled(self.factor())
    }

    /// `pi^* omega_N`, with density `d^2 rho_N(d t)`.
    pub fn pullback_form(&self, base_form: &ReducedForm) -> ReducedForm {
        let d = self.factor();
        ReducedForm {
            grid: self.upstairs_grid(base_form.grid),
            density: base_form.density.iter().map(|v| d * d * v).collect(),
            tails: [base_form.tails[0].scaled(d * d, d), base_form.tails[1].scaled(d * d, d)],
        }
    }

    /// `pi^* psi`, i.e. `psi(d t)`.
    pub fn pullback_potential(&self, psi: &RadialPotential) -> RadialPotential {
        let d = self.factor();
        RadialPotential {
            grid: self.upstairs_grid(psi.grid),
            values: psi.values.clone(),
            tail_slopes: [psi.tail_slopes[0] * d, psi.tail_slopes[1] * d],
        }
    }

    /// `u` with `pi^* omega_N = (1 + beta) omega + i ddbar u` for the round
    /// forms of mass `4 pi` on both sides:
    /// `u(t) = 2 [log(1 + e^{d t}) - d log(1 + e^t)]`, bounded with limit
    /// `0` at both ends.
    pub fn u_potential(&self, grid: Grid) -> RadialPotential {
        let d = self.factor();
        RadialPotential::from_fn(grid, |t| 2.0 * (softplus(d * t) - d * softplus(t)))
    }

    /// `psi` on the base grid with `(1 + beta) phi - u = pi^* psi`.
    pub fn descend_potential(&self, phi: &RadialPotential) -> RadialPotential {
        let scale = self.scaling();
        let u = self.u_potential(phi.grid);
        let d = self.factor();
        let upstairs = phi.combine(&u, scale, -1.0).expect("same grid");
        RadialPotential {
            grid: self.base_grid(phi.grid),
            values: upstairs.values,
            tail_slopes: [upstairs.tail_slopes[0] / d, upstairs.tail_slopes[1] / d],
        }
    }

    /// `(u + pi^* psi) / (1 + beta)`.
    pub fn lift_potential(&self, psi: &RadialPotential) -> RadialPotential {
        let pulled = self.pullback_potential(psi);
        let u = self.u_potential(pulled.grid);
        u.combine(&pulled, 1.0 / self.scaling(), 1.0 / self.scaling())
            .expect("same grid")
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Round form of mass `4 pi` on the base grid of a cover over `upstairs`.
pub fn round_base(cover: &FermatCover, upstairs: Grid) -> ReducedForm {
    ReducedForm::fubini_study(cover.base_grid(upstairs))
}

/// Relative residual of `F0_{pi^* omega_N}(pi^* psi) = F0_{omega_N}(psi)`.
/// The pulled-back form degenerates at the ramification points, so no
/// positivity check is made on the left.
pub fn pullback_f0_check(
    calc: &Calculus,
    cover: &FermatCover,
    psi: &RadialPotential,
    base_form: &ReducedForm,
) -> Result<(f64, f64, f64), CoverError> {
    if !psi.grid.compatible(&base_form.grid) {
        return Err(CoverError::GridMismatch("psi and base form".into()));
    }
    let lhs = calc
        .functional_f0(&cover.pullback_form(base_form), &cover.pullback_potential(psi))?
        .definition;
    let rhs = calc.functional_f0(base_form, psi)?.definition;
    let residual = if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300)
    };
    Ok((lhs, rhs, residual))
}

/// Sup-norm relative mismatch between `(1 + beta) omega + i ddbar u` and
/// `pi^* omega_N` on the window.
pub fn u_density_mismatch(calc: &Calculus, cover: &FermatCover, upstairs: Grid) -> Result<f64, CoverError> {
    let base = round_base(cover, upstairs);
    let pulled = cover.pullback_form(&base);
    let scaled_round = ReducedForm::fubini_study(upstairs).scaled(cover.scaling());
    let built = calc.ma_density(&scaled_round, &cover.u_potential(upstairs))?;
    let scale = pulled.density.iter().cloned().fold(0.0, f64::max);
    Ok(built
        .density
        .iter()
        .zip(&pulled.density)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale)
}

/// `F0_omega(phi) - (1 / (1 + beta)) log[(2 pi / V) int e^{-(1 + beta) phi} pi^* rho_N]`
/// on `M` with the round form `omega`.
pub fn lifting_margin(calc: &Calculus, cover: &FermatCover, phi: &RadialPotential) -> Result<f64, CoverError> {
    let omega = ReducedForm::fubini_study(phi.grid);
    let pulled = cover.pullback_form(&round_base(cover, phi.grid));
    let scale = cover.scaling();
    let f0 = calc.functional_f0(&omega, phi)?.definition;
    let integral = pulled.integrate_exp(&phi.scaled(-scale));
    Ok(f0 - (2.0 * PI / omega.mass() * integral).ln() / scale)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftingProbe {
    pub margins: Vec<f64>,
    /// `-min margin`: a lower bound for the constant of the inequality on
    /// the sampled family, not the constant itself.
    pub empirical_constant: f64,
}

pub fn lifting_inequality_probe(
    calc: &Calculus,
    cover: &FermatCover,
    phis: &[RadialPotential],
) -> Result<LiftingProbe, CoverError> {
    let margins: Vec<f64> = phis
        .par_iter()
        .map(|phi| lifting_margin(calc, cover, phi))
        .collect::<Result<_, _>>()?;
    let min = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LiftingProbe {
        margins,
        empirical_constant: -min,
    })
}

/// Configuration of the seeded covering suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverSuiteConfig {
    pub degree: u32,
    /// Grid on `M`; the base uses `d` times the window.
    pub grid: Grid,
    pub samples: usize,
    pub seed: u64,
    pub pullback_tolerance: f64,
    pub mass_tolerance: f64,
    pub roundtrip_tolerance: f64,
    pub density_tolerance: f64,
    pub stability_tolerance: f64,
}

impl CoverSuiteConfig {
    pub fn new(degree: u32, grid: Grid, samples: usize, seed: u64) -> Self {
        CoverSuiteConfig {
            degree,
            grid,
            samples,
            seed,
            pullback_tolerance: 1e-6,
            mass_tolerance: 1e-9,
            roundtrip_tolerance: 1e-8,
            density_tolerance: 1e-7,
            stability_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverSuiteResult {
    pub degree: u32,
    pub beta: f64,
    pub mass_ratio: f64,
    pub mass_error: f64,
    pub u_density_mismatch: f64,
    pub worst_pullback_residual: f64,
    pub worst_roundtrip: f64,
    pub probe: LiftingProbe,
    /// Empirical constant on the doubled grid.
    pub refined_constant: f64,
    pub stability: f64,
    pub passed: Vec<(String, bool)>,
}

impl CoverSuiteResult {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|(_, ok)| *ok)
    }
}

/// Pull-back mass, the `u` density identity, `F^0` invariance under
/// pull-back, descent round trips and the lifting probe with its grid
/// stability, over seeded samples.
pub fn run_cover_suite(calc: &Calculus, config: &CoverSuiteConfig) -> Result<CoverSuiteResult, CoverError> {
    let cover = FermatCover::new(config.degree)?;
    let grid = config.grid;
    let base_grid = cover.base_grid(grid);
    let base = ReducedForm::fubini_study(base_grid);
    let pulled = cover.pullback_form(&base);
    let mass_ratio = pulled.mass() / base.mass();
    let mass_error = (mass_ratio - cover.factor()).abs() / cover.factor();
    let density = u_density_mismatch(calc, &cover, grid)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sampler = BumpSampler::default();
    let base_profiles = sampler.draw_many(&mut rng, config.samples, calc, &base);
    let omega = ReducedForm::fubini_study(grid);
    let lift_sampler = BumpSampler::default().with_amplitude(0.1, 2.0);
    let lift_profiles: Vec<BumpProfile> = lift_sampler.draw_many(&mut rng, config.samples, calc, &omega);

    let pullback: Vec<f64> = base_profiles
        .par_iter()
        .map(|profile| pullback_f0_check(calc, &cover, &profile.sample(base_grid), &base).map(|r| r.2))
        .collect::<Result<_, _>>()?;
    let roundtrip: Vec<f64> = lift_profiles
        .par_iter()
        .map(|profile| {
            let phi = profile.sample(grid);
            cover.lift_potential(&cover.descend_potential(&phi)).sup_distance(&phi)
        })
        .collect();

    let phis: Vec<RadialPotential> = lift_profiles.iter().map(|s| s.sample(grid)).collect();
    let probe = lifting_inequality_probe(calc, &cover, &phis)?;
    let refined: Vec<RadialPotential> = lift_profiles.iter().map(|s| s.sample(grid.refined())).collect();
    let refined_probe = lifting_inequality_probe(calc, &cover, &refined)?;
    let stability = relative_difference(probe.empirical_constant, refined_probe.empirical_constant);

    let worst = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let worst_pullback = worst(&pullback);
    let worst_roundtrip = worst(&roundtrip);
    let bounded = probe.margins.iter().all(|m| m.is_finite());
    let passed = vec![
        ("pullback_mass".to_string(), mass_error < config.mass_tolerance),
        ("u_density".to_string(), density < config.density_tolerance),
        ("pullback_f0".to_string(), worst_pullback < config.pullback_tolerance),
        (
            "descent_roundtrip".to_string(),
            worst_roundtrip < config.roundtrip_tolerance,
        ),
        ("lifting_bounded".to_string(), bounded),
        ("lifting_stable".to_string(), stability < config.stability_tolerance),
    ];
    Ok(CoverSuiteResult {
        degree: config.degree,
        beta: cover.scaling() - 1.0,
        mass_ratio,
        mass_error,
        u_density_mismatch: density,
        worst_pullback_residual: worst_pullback,
        worst_roundtrip,
        probe,
        refined_constant: refined_probe.empirical_constant,
        stability,
        passed,
    })
}
