//! Circle-invariant Kähler calculus on `P^1`.
//!
//! In the coordinate `t = log |z|^2` a circle-invariant function `u(t)` has
//! `i ddbar u = u''(t) dt ^ dtheta`: from `u_{z zbar} = u''(t) / |z|^2`,
//! `i dz ^ dzbar = 2 r dr ^ dtheta` and `dt = 2 dr / r`. The reduced
//! Monge-Ampère density of `omega + i ddbar u` is therefore
//! `rho + KAPPA u''` with `KAPPA = 1`. The value is pinned by tests: mass
//! conservation for decaying potentials, `Ric = omega` for the round form,
//! and the closed-form potential of the Fermat cover in `covers1d`.

mod form;
mod functionals;
mod grid;
pub mod io;
mod sampling;
mod suite;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use form::{round_density, RadialPotential, ReducedForm, Tail, ANTICANONICAL_MASS};
pub use functionals::{F0Values, FunctionalReport, JValues};
pub use grid::{Grid, Stencil, MIN_INTERVALS};
pub use sampling::{BumpProfile, BumpSampler};
pub use suite::{
    convergence_table, doubling_changes, run_identity_suite, ConvergenceRow, IdentityConfig, IdentityRecord,
    IdentitySuiteResult,
};

/// Factor relating `i ddbar u` to `u''(t) dt ^ dtheta`.
pub const KAPPA: f64 = 1.0;
pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_INTERVALS: usize = 4096;
pub const DEFAULT_S_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KahlerError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("potential and form live on different grids")]
    GridMismatch,
    #[error("samples must be finite")]
    NonFinite,
    #[error("potential is not admissible: omega_phi has minimum density {0:e}")]
    NotAdmissible(f64),
    #[error("form is not positive: minimum density {0:e}")]
    NonPositiveForm(f64),
    #[error("form has mass {found}, expected {expected} for the class 2 pi c_1")]
    ClassMismatch { found: f64, expected: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("csv error: {0}")]
    Csv(String),
}

/// Discretization choices shared by every functional.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calculus {
    pub kappa: f64,
    pub stencil: Stencil,
    /// Reject potentials with `omega_phi <= 0` before evaluating `I`, `J`,
    /// `A` and `F`. `F^0` is always evaluated.
    pub enforce_positivity: bool,
    s_rule: Vec<(f64, f64)>,
}

impl Default for Calculus {
    fn default() -> Self {
        Calculus::new(KAPPA, Stencil::Fourth, DEFAULT_S_NODES).expect("default is valid")
    }
}

impl Calculus {
    pub fn new(kappa: f64, stencil: Stencil, s_nodes: usize) -> Result<Self, KahlerError> {
        if s_nodes < DEFAULT_S_NODES {
            return Err(KahlerError::InvalidParameter(format!(
                "need at least {DEFAULT_S_NODES} nodes for the s-integral, got {s_nodes}"
            )));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(KahlerError::InvalidParameter(format!("kappa {kappa}")));
        }
        let rule = gauss_quad::GaussLegendre::new(std::num::NonZeroUsize::new(s_nodes).expect("positive"));
        let s_rule = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Ok(Calculus {
            kappa,
            stencil,
            enforce_positivity: true,
            s_rule,
        })
    }

    /// Same discretization with `kappa` multiplied by `factor`.
    pub fn with_kappa_factor(mut self, factor: f64) -> Self {
        self.kappa *= factor;
        self
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn s_nodes(&self) -> usize {
        self.s_rule.len()
    }
}

/// Acceptance thresholds of the identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative spread of the three `J` evaluations.
    pub j: f64,
    /// Relative spread of the two `F^0` evaluations.
    pub f0: f64,
    /// Absolute fallback for `F^0` values near zero.
    pub f0_absolute: f64,
    pub cocycle: f64,
    pub scaling: f64,
    /// `|F(phi + c) - F(phi)|`.
    pub constant: f64,
    /// Relative change of the total mass under `omega -> omega_phi`.
    pub mass: f64,
    /// Sup-norm relative mismatch of Monge-Ampère densities against a closed form.
    pub density_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            j: 1e-6,
            f0: 1e-6,
            f0_absolute: 1e-9,
            cocycle: 1e-6,
            scaling: 1e-8,
            constant: 1e-8,
            mass: 1e-8,
            density_match: 1e-7,
        }
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
