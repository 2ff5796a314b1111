//! Circle-invariant forms and potentials on `P^1` in the coordinate
//! `t = log |z|^2`.
//!
//! A form is `rho(t) dt ^ dtheta` sampled on a window `[-T, T]`. Beyond the
//! window the density is continued as `r_pm exp(-a_pm (|t| - T))`, and a
//! potential is continued linearly with its end slopes. Since continued
//! potentials are affine, `omega + i ddbar u` keeps the tails of `omega`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{Grid, Stencil};
use super::KahlerError;

/// Total mass of a form in the class `2 pi c_1(P^1)`.
pub const ANTICANONICAL_MASS: f64 = 4.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub grid: Grid,
    pub density: Vec<f64>,
    /// Continuation beyond `-T` and `+T`.
    pub tails: [Tail; 2],
}

/// `rho(t) = edge exp(-rate (|t| - T))` beyond the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub edge: f64,
    pub rate: f64,
}

impl Tail {
    pub const NONE: Tail = Tail { edge: 0.0, rate: 0.0 };

    pub fn scaled(&self, density_factor: f64, rate_factor: f64) -> Tail {
        Tail {
            edge: self.edge * density_factor,
            rate: self.rate * rate_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// `u'` beyond `-T` and `+T`.
    pub tail_slopes: [f64; 2],
}

impl ReducedForm {
    /// Wraps samples, estimating tail rates from the logarithmic slope at
    /// each end. Ends where the density is not positive and decaying get no
    /// tail.
    pub fn from_samples(grid: Grid, density: Vec<f64>) -> Result<Self, KahlerError> {
        if density.len() != grid.len() {
            return Err(KahlerError::GridMismatch);
        }
        if density.iter().any(|v| !v.is_finite()) {
            return Err(KahlerError::NonFinite);
        }
        let rates = estimate_tail_rates(&grid, &density);
        let n = grid.intervals;
        let tails = [
            Tail {
                edge: density[0],
                rate: rates[0],
            },
            Tail {
                edge: density[n],
                rate: rates[1],
            },
        ];
        Ok(ReducedForm { grid, density, tails })
    }

    pub fn with_tails(grid: Grid, density: Vec<f64>, tails: [Tail; 2]) -> Result<Self, KahlerError> {
        if density.len() != grid.len() {
            return Err(KahlerError::GridMismatch);
        }
        if density.iter().any(|v| !v.is_finite()) {
            return Err(KahlerError::NonFinite);
        }
        Ok(ReducedForm { grid, density, tails })
    }

    /// Twice the round form `i dz ^ dzbar / (1 + |z|^2)^2`, so that the total
    /// mass is `4 pi`: `rho(t) = 2 e^t / (1 + e^t)^2`.
    pub fn fubini_study(grid: Grid) -> Self {
        let density = grid.sample(round_density);
        let edge = round_density(grid.half_width);
        ReducedForm {
            grid,
            density,
            tails: [Tail { edge, rate: 1.0 }; 2],
        }
    }

    fn tail_integral(&self, values: Option<(&RadialPotential, Weight)>) -> f64 {
        let n = self.grid.intervals;
        let mut total = 0.0;
        for (side, edge) in [(0usize, 0usize), (1, n)] {
            let a = self.tails[side].rate;
            let rho = self.tails[side].edge;
            if a <= 0.0 || rho == 0.0 {
                continue;
            }
            total += match values {
                None => rho / a,
                Some((phi, weight)) => {
                    // outward slope of phi
                    let slope = if side == 0 {
                        -phi.tail_slopes[0]
                    } else {
                        phi.tail_slopes[1]
                    };
                    weight.tail(phi.values[edge], slope, rho, a)
                }
            };
        }
        total
    }

    /// `V = int int rho dt dtheta`, tails included.
    pub fn mass(&self) -> f64 {
        2.0 * PI * (self.grid.integrate(&self.density) + self.tail_integral(None))
    }

    /// `int u rho dt` (without the angular factor), tails included.
    pub fn integrate_potential(&self, phi: &RadialPotential) -> f64 {
        let window = self.grid.integrate_product(&phi.values, &self.density);
        window + self.tail_integral(Some((phi, Weight::Linear)))
    }

    /// `int e^{u} rho dt` (without the angular factor), tails included.
    pub fn integrate_exp(&self, phi: &RadialPotential) -> f64 {
        let values: Vec<f64> = phi.values.iter().zip(&self.density).map(|(u, r)| u.exp() * r).collect();
        self.grid.integrate(&values) + self.tail_integral(Some((phi, Weight::Exp)))
    }

    pub fn scaled(&self, factor: f64) -> ReducedForm {
        ReducedForm {
            grid: self.grid,
            density: self.density.iter().map(|v| v * factor).collect(),
            tails: [self.tails[0].scaled(factor, 1.0), self.tails[1].scaled(factor, 1.0)],
        }
    }

    pub fn min_density(&self) -> f64 {
        self.density.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy)]
enum Weight {
    Linear,
    Exp,
}

impl Weight {
    /// `int_0^inf g(u_e + s x) rho_e e^{-a x} dx` with `g = id` or `g = exp`.
    fn tail(self, u_edge: f64, slope: f64, rho: f64, a: f64) -> f64 {
        match self {
            Weight::Linear => rho * (u_edge / a + slope / (a * a)),
            Weight::Exp if a > slope => rho * u_edge.exp() / (a - slope),
            Weight::Exp => f64::INFINITY,
        }
    }
}

fn estimate_tail_rates(grid: &Grid, density: &[f64]) -> [f64; 2] {
    let n = density.len();
    let h = grid.step();
    let slope = |window: &[f64], row: usize| -> Option<f64> {
        if window.iter().any(|v| *v <= 0.0) {
            return None;
        }
        let logs: Vec<f64> = window.iter().map(|v| v.ln()).collect();
        Some(Stencil::Fourth.first_derivative(&logs, h)[row])
    };
    // log rho increases towards the window at a decaying left end
    let left = slope(&density[..6], 0).filter(|d| *d > 0.0).unwrap_or(0.0);
    let right = slope(&density[n - 6..], 5).filter(|d| *d < 0.0).map_or(0.0, |d| -d);
    [left, right]
}

pub fn round_density(t: f64) -> f64 {
    // 2 e^t / (1 + e^t)^2 = 1 / (2 cosh^2(t / 2))
    let c = (0.5 * t).cosh();
    0.5 / (c * c)
}

impl RadialPotential {
    pub fn new(grid: Grid, values: Vec<f64>, tail_slopes: [f64; 2]) -> Result<Self, KahlerError> {
        if values.len() != grid.len() {
            return Err(KahlerError::GridMismatch);
        }
        if values.iter().chain(&tail_slopes).any(|v| !v.is_finite()) {
            return Err(KahlerError::NonFinite);
        }
        Ok(RadialPotential {
            grid,
            values,
            tail_slopes,
        })
    }

    /// A potential constant outside the window.
    pub fn bounded(grid: Grid, values: Vec<f64>) -> Result<Self, KahlerError> {
        Self::new(grid, values, [0.0, 0.0])
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.sample(f);
        RadialPotential {
            grid,
            values,
            tail_slopes: [0.0, 0.0],
        }
    }

    pub fn zero(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        RadialPotential {
            grid,
            values: vec![c; grid.len()],
            tail_slopes: [0.0, 0.0],
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RadialPotential {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            tail_slopes: [self.tail_slopes[0] * factor, self.tail_slopes[1] * factor],
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        RadialPotential {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
            tail_slopes: self.tail_slopes,
        }
    }

    pub fn combine(&self, other: &RadialPotential, a: f64, b: f64) -> Result<Self, KahlerError> {
        if !self.grid.compatible(&other.grid) {
            return Err(KahlerError::GridMismatch);
        }
        Ok(RadialPotential {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            tail_slopes: [
                a * self.tail_slopes[0] + b * other.tail_slopes[0],
                a * self.tail_slopes[1] + b * other.tail_slopes[1],
            ],
        })
    }

    pub fn sup_distance(&self, other: &RadialPotential) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}
