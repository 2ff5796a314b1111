//! Seeded random Gaussian-bump potentials.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::form::{RadialPotential, ReducedForm};
use super::grid::Grid;
use super::Calculus;

/// `u(t) = sum_j a_j exp(-((t - c_j) / w_j)^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub bumps: Vec<Bump>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl BumpProfile {
    pub fn eval(&self, t: f64) -> f64 {
        self.bumps
            .iter()
            .map(|b| {
                let x = (t - b.center) / b.width;
                b.amplitude * (-x * x).exp()
            })
            .sum()
    }

    pub fn sample(&self, grid: Grid) -> RadialPotential {
        RadialPotential::from_fn(grid, |t| self.eval(t))
    }

    pub fn scaled(&self, factor: f64) -> BumpProfile {
        BumpProfile {
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump {
                    amplitude: b.amplitude * factor,
                    ..*b
                })
                .collect(),
        }
    }

    pub fn max_amplitude(&self) -> f64 {
        self.bumps.iter().map(|b| b.amplitude.abs()).fold(0.0, f64::max)
    }
}

/// Distribution of random bump potentials. Amplitudes are drawn with a
/// random sign and magnitude in `amplitude`; a draw is halved until
/// `rho_phi >= margin * rho` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSampler {
    pub max_bumps: usize,
    pub center: (f64, f64),
    pub width: (f64, f64),
    pub amplitude: (f64, f64),
    pub margin: f64,
}

impl Default for BumpSampler {
    fn default() -> Self {
        BumpSampler {
            max_bumps: 3,
            center: (-3.0, 3.0),
            width: (0.8, 1.6),
            amplitude: (0.05, 1.0),
            margin: 0.1,
        }
    }
}

impl BumpSampler {
    pub fn with_amplitude(mut self, low: f64, high: f64) -> Self {
        self.amplitude = (low, high);
        self
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> BumpProfile {
        let count = rng.gen_range(1..=self.max_bumps);
        let bumps = (0..count)
            .map(|_| {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                Bump {
                    center: rng.gen_range(self.center.0..self.center.1),
                    width: rng.gen_range(self.width.0..self.width.1),
                    amplitude: sign * rng.gen_range(self.amplitude.0..self.amplitude.1),
                }
            })
            .collect();
        BumpProfile { bumps }
    }

    /// Draws a profile admissible for `form` with the sampler's margin.
    pub fn draw_admissible<R: Rng>(&self, rng: &mut R, calculus: &Calculus, form: &ReducedForm) -> BumpProfile {
        let mut profile = self.draw(rng);
        loop {
            let phi = profile.sample(form.grid);
            let moved = calculus
                .ma_density(form, &phi)
                .expect("profile sampled on the form's grid");
            let ok = moved
                .density
                .iter()
                .zip(&form.density)
                .all(|(m, r)| *m >= self.margin * r && *m > 0.0);
            if ok {
                return profile;
            }
            profile = profile.scaled(0.5);
        }
    }

    pub fn draw_many<R: Rng>(
        &self,
        rng: &mut R,
        count: usize,
        calculus: &Calculus,
        form: &ReducedForm,
    ) -> Vec<BumpProfile> {
        (0..count).map(|_| self.draw_admissible(rng, calculus, form)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_admissible_and_reproducible() {
        let calc = Calculus::default();
        let form = ReducedForm::fubini_study(Grid::new(12.0, 1024).unwrap());
        let sampler = BumpSampler::default();
        let a = sampler.draw_many(&mut ChaCha8Rng::seed_from_u64(9), 20, &calc, &form);
        let b = sampler.draw_many(&mut ChaCha8Rng::seed_from_u64(9), 20, &calc, &form);
        assert_eq!(a, b);
        for profile in &a {
            assert!(calc.is_admissible(&form, &profile.sample(form.grid)));
            assert!(profile.eval(12.0).abs() < 1e-12 && profile.eval(-12.0).abs() < 1e-12);
        }
    }
}
