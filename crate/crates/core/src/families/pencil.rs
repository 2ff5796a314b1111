//! Simultaneous diagonalization of a pencil of quadrics `A + t B`.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

/// Entrywise tolerance for the symmetry of the generators.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Members whose condition number exceeds this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Relative separation below which two eigenvalues count as equal.
pub const COLLISION_TOLERANCE: f64 = 1e-8;
const RANDOM_MEMBERS: usize = 32;

pub type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error("generators must be square matrices of equal size")]
    Shape,
    #[error("generator is not symmetric: deviation {0:e}")]
    NotSymmetric(f64),
    #[error("no invertible member found in the pencil")]
    NoInvertibleMember,
    #[error("pencil is singular: eigenvalues {0} and {1} coincide")]
    SingularPencil(usize, usize),
}

#[derive(Debug, Clone)]
pub struct PencilOfQuadrics {
    a: DMatrix<C64>,
    b: DMatrix<C64>,
}

impl PencilOfQuadrics {
    pub fn new(a: DMatrix<C64>, b: DMatrix<C64>) -> Result<Self, PencilError> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(PencilError::Shape);
        }
        for m in [&a, &b] {
            let deviation = (m - m.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if deviation > SYMMETRY_TOLERANCE {
                return Err(PencilError::NotSymmetric(deviation));
            }
        }
        Ok(PencilOfQuadrics { a, b })
    }

    /// The pencil `I + t diag(lambdas)`.
    pub fn diagonal(lambdas: &[C64]) -> Self {
        let n = lambdas.len();
        PencilOfQuadrics {
            a: DMatrix::identity(n, n),
            b: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambdas)),
        }
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<C64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<C64> {
        &self.b
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalForm {
    /// Parameter of the member `A + t B` that was inverted.
    pub member: f64,
    /// Generalized eigenvalues `lambda` with `det(B - lambda A) = 0`,
    /// sorted by real then imaginary part.
    pub lambdas: Vec<(f64, f64)>,
}

fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn member_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    for k in 1..=4 {
        let v = k as f64;
        grid.extend([v, -v, 1.0 / (v + 1.0), -1.0 / (v + 1.0)]);
    }
    grid
}

/// Finds coordinates in which both quadrics are diagonal, returning the
/// generalized eigenvalues. Coinciding eigenvalues mean the base locus
/// of the pencil is singular.
pub fn two_quadrics_normal_form<R: Rng>(pencil: &PencilOfQuadrics, rng: &mut R) -> Result<NormalForm, PencilError> {
    let mut candidates = member_grid();
    candidates.extend((0..RANDOM_MEMBERS).map(|_| rng.gen_range(-3.0..3.0)));
    let (t, inverse) = candidates
        .into_iter()
        .find_map(|t| {
            let member = &pencil.a + &pencil.b * C64::new(t, 0.0);
            if condition_number(&member) >= CONDITION_LIMIT {
                return None;
            }
            member.try_inverse().map(|inv| (t, inv))
        })
        .ok_or(PencilError::NoInvertibleMember)?;

    // eigenvalues mu of (A + tB)^{-1} B relate to lambda by lambda = mu / (1 - t mu)
    let product = inverse * &pencil.b;
    let mus: Vec<C64> = product
        .schur()
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .cloned()
        .collect();
    let scale = mus.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..mus.len() {
        for j in i + 1..mus.len() {
            if (mus[i] - mus[j]).norm() <= COLLISION_TOLERANCE * scale {
                return Err(PencilError::SingularPencil(i, j));
            }
        }
    }
    let mut lambdas: Vec<(f64, f64)> = mus
        .iter()
        .map(|mu| {
            let l = mu / (C64::new(1.0, 0.0) - mu * t);
            (l.re, l.im)
        })
        .collect();
    lambdas.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(NormalForm { member: t, lambdas })
}

/// `(S^T A S, S^T B S)` for a random complex `S` with condition number below `1e4`.
pub fn random_congruence<R: Rng>(pencil: &PencilOfQuadrics, rng: &mut R) -> PencilOfQuadrics {
    let n = pencil.size();
    loop {
        let s = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if condition_number(&s) > 1e4 {
            continue;
        }
        let st = s.transpose();
        let a = &st * &pencil.a * &s;
        let b = &st * &pencil.b * &s;
        // symmetrize away rounding so the result passes the symmetry check
        let a = (&a + a.transpose()) * C64::new(0.5, 0.0);
        let b = (&b + b.transpose()) * C64::new(0.5, 0.0);
        return PencilOfQuadrics { a, b };
    }
}
