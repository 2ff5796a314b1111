//! Existence criteria for Kähler-Einstein metrics on Fano manifolds with
//! Galois coverings, and one-dimensional numerical checks of the energy
//! functionals, covering identities and singularity-exponent integrals.

pub mod covers1d;
pub mod criteria;
pub mod divisor_algebra;
pub mod families;
pub mod kahler1d;
pub mod singexp;
