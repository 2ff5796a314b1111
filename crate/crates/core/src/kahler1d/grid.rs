//! Uniform grids on `[-T, T]`, finite-difference stencils and quadrature.

use serde::{Deserialize, Serialize};

use super::KahlerError;

/// `intervals + 1` equally spaced samples on `[-half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_width: f64,
    pub intervals: usize,
}

pub const MIN_INTERVALS: usize = 64;

impl Grid {
    pub fn new(half_width: f64, intervals: usize) -> Result<Self, KahlerError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(KahlerError::InvalidGrid(format!("half width {half_width}")));
        }
        if intervals < MIN_INTERVALS || !intervals.is_multiple_of(2) {
            return Err(KahlerError::InvalidGrid(format!(
                "interval count must be even and at least {MIN_INTERVALS}, got {intervals}"
            )));
        }
        Ok(Grid { half_width, intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.intervals as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.point(i))).collect()
    }

    /// Same sample count on `[-s T, s T]`.
    pub fn scaled(&self, factor: f64) -> Grid {
        Grid {
            half_width: self.half_width * factor,
            intervals: self.intervals,
        }
    }

    pub fn refined(&self) -> Grid {
        Grid {
            half_width: self.half_width,
            intervals: 2 * self.intervals,
        }
    }

    pub fn compatible(&self, other: &Grid) -> bool {
        self.intervals == other.intervals && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }

    /// Composite Simpson rule.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let n = self.intervals;
        let mut odd = 0.0;
        let mut even = 0.0;
        for (i, v) in values.iter().enumerate().take(n).skip(1) {
            if i % 2 == 1 {
                odd += v;
            } else {
                even += v;
            }
        }
        self.step() / 3.0 * (values[0] + values[n] + 4.0 * odd + 2.0 * even)
    }

    pub fn integrate_product(&self, a: &[f64], b: &[f64]) -> f64 {
        let product: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        self.integrate(&product)
    }

    /// `F(t_i) = int_{-T}^{t_i} g`, fourth order on each interval.
    pub fn cumulative(&self, g: &[f64]) -> Vec<f64> {
        let n = self.intervals;
        let h = self.step();
        let mut out = vec![0.0; n + 1];
        for i in 0..n {
            let piece = if i == 0 {
                h * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]) / 24.0
            } else if i == n - 1 {
                h * (9.0 * g[n] + 19.0 * g[n - 1] - 5.0 * g[n - 2] + g[n - 3]) / 24.0
            } else {
                h * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]) / 24.0
            };
            out[i + 1] = out[i] + piece;
        }
        out
    }
}

/// Finite-difference scheme for first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// Three-point centered differences.
    Second,
    /// Five-point centered differences with fourth-order one-sided rows
    /// at the two samples nearest each end.
    Fourth,
}

impl Stencil {
    pub fn second_derivative(&self, values: &[f64], h: f64) -> Vec<f64> {
        let n = values.len();
        let u = values;
        let mut out = vec![0.0; n];
        match self {
            Stencil::Second => {
                let h2 = h * h;
                for i in 1..n - 1 {
                    out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2;
                }
                out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2;
                out[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / h2;
            }
            Stencil::Fourth => {
                let h2 = 12.0 * h * h;
                for i in 2..n - 2 {
                    out[i] = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / h2;
                }
                let edge0 = |v: &dyn Fn(usize) -> f64| {
                    (45.0 * v(0) - 154.0 * v(1) + 214.0 * v(2) - 156.0 * v(3) + 61.0 * v(4) - 10.0 * v(5)) / h2
                };
                let edge1 = |v: &dyn Fn(usize) -> f64| {
                    (10.0 * v(0) - 15.0 * v(1) - 4.0 * v(2) + 14.0 * v(3) - 6.0 * v(4) + v(5)) / h2
                };
                let fwd = |k: usize| u[k];
                let bwd = |k: usize| u[n - 1 - k];
                out[0] = edge0(&fwd);
                out[1] = edge1(&fwd);
                out[n - 1] = edge0(&bwd);
                out[n - 2] = edge1(&bwd);
            }
        }
        out
    }

    pub fn first_derivative(&self, values: &[f64], h: f64) -> Vec<f64> {
        let n = values.len();
        let u = values;
        let mut out = vec![0.0; n];
        match self {
            Stencil::Second => {
                for i in 1..n - 1 {
                    out[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
                }
                out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
                out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
            }
            Stencil::Fourth => {
                let h12 = 12.0 * h;
                for i in 2..n - 2 {
                    out[i] = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / h12;
                }
                out[0] = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / h12;
                out[1] = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / h12;
                out[n - 1] =
                    -(-25.0 * u[n - 1] + 48.0 * u[n - 2] - 36.0 * u[n - 3] + 16.0 * u[n - 4] - 3.0 * u[n - 5]) / h12;
                out[n - 2] = -(-3.0 * u[n - 1] - 10.0 * u[n - 2] + 18.0 * u[n - 3] - 6.0 * u[n - 4] + u[n - 5]) / h12;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let grid = Grid::new(2.0, 64).unwrap();
        let values = grid.sample(|t| t * t * t - 2.0 * t * t + 1.0);
        let exact = -2.0 * 16.0 / 3.0 + 4.0;
        assert!((grid.integrate(&values) - exact).abs() < 1e-12);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let grid = Grid::new(3.0, 128).unwrap();
        let g = grid.sample(|t| t.cos());
        let cumulative = grid.cumulative(&g);
        for (i, value) in cumulative.iter().enumerate() {
            let t = grid.point(i);
            assert!((value - (t.sin() + 3.0f64.sin())).abs() < 1e-7);
        }
    }

    #[test]
    fn stencils_are_exact_on_low_degree_polynomials() {
        let grid = Grid::new(1.0, 64).unwrap();
        let h = grid.step();
        let u = grid.sample(|t| t.powi(4) - t.powi(3) + 2.0 * t);
        let d2 = Stencil::Fourth.second_derivative(&u, h);
        let d1 = Stencil::Fourth.first_derivative(&u, h);
        for i in 0..grid.len() {
            let t = grid.point(i);
            assert!((d2[i] - (12.0 * t * t - 6.0 * t)).abs() < 1e-8, "d2 at {i}");
            assert!(
                (d1[i] - (4.0 * t.powi(3) - 3.0 * t * t + 2.0)).abs() < 1e-9,
                "d1 at {i}"
            );
        }
        let q = grid.sample(|t| t * t - t);
        let d2 = Stencil::Second.second_derivative(&q, h);
        let d1 = Stencil::Second.first_derivative(&q, h);
        for i in 0..grid.len() {
            assert!((d2[i] - 2.0).abs() < 1e-8);
            assert!((d1[i] - (2.0 * grid.point(i) - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(12.0, 63).is_err());
        assert!(Grid::new(12.0, 32).is_err());
        assert!(Grid::new(-1.0, 128).is_err());
    }
}
