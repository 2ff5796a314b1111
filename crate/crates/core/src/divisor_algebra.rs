//! Exact divisor-class bookkeeping on Picard-rank-one models.
//!
//! Every class is a single rational number: a multiple of the hyperplane
//! class `O(1)` of the ambient model (for the double covers, of the pull-back
//! of `O(1)` from the base; for the Fermat cover of `P^1`, the degree of a
//! divisor on `P^1`). Arithmetic is carried out over arbitrary-precision
//! rationals so that strict inequalities in the existence criteria are
//! decided exactly.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational used throughout the exact modules.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivisorError {
    #[error("model is not Fano: anticanonical degree {degree} is not positive")]
    NotFano { degree: String },
    #[error("ramification class {class} is not effective")]
    NotEffective { class: String },
    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("no standard covering is attached to a custom model")]
    NoStandardCover,
}

/// Builds the rational `num / den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational, DivisorError> {
    let trimmed = text.trim();
    let parsed = match trimmed.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| DivisorError::Parse(text.into()))?;
            let den = BigInt::from_str(den.trim()).map_err(|_| DivisorError::Parse(text.into()))?;
            if den.is_zero() {
                return Err(DivisorError::Parse(text.into()));
            }
            Rational::new(num, den)
        }
        None => Rational::from_integer(BigInt::from_str(trimmed).map_err(|_| DivisorError::Parse(text.into()))?),
    };
    Ok(parsed)
}

/// Lossy conversion used only for reporting.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter that keeps rationals exact on the wire as `"p/q"` strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// A divisor class as a rational multiple of the model's generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QClass(pub Rational);

impl QClass {
    pub fn new(coeff: Rational) -> Self {
        QClass(coeff)
    }

    pub fn from_int(value: i64) -> Self {
        QClass(int(value))
    }

    pub fn coeff(&self) -> &Rational {
        &self.0
    }

    pub fn scale(&self, factor: &Rational) -> QClass {
        QClass(&self.0 * factor)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl fmt::Display for QClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for &QClass {
    type Output = QClass;
    fn add(self, rhs: &QClass) -> QClass {
        QClass(&self.0 + &rhs.0)
    }
}

impl Sub for &QClass {
    type Output = QClass;
    fn sub(self, rhs: &QClass) -> QClass {
        QClass(&self.0 - &rhs.0)
    }
}

impl Neg for &QClass {
    type Output = QClass;
    fn neg(self) -> QClass {
        QClass(-&self.0)
    }
}

impl Serialize for QClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        rational_string::serialize(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for QClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        rational_string::deserialize(deserializer).map(QClass)
    }
}

/// The ratio `beta` in `R(pi) = -beta K_M`; always strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BetaValue(Rational);

impl BetaValue {
    pub fn new(beta: Rational) -> Result<Self, DivisorError> {
        if beta.is_positive() {
            Ok(BetaValue(beta))
        } else {
            Err(DivisorError::NonPositiveBeta(beta.to_string()))
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, DivisorError> {
        Self::new(ratio(num, den))
    }

    pub fn get(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for BetaValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        rational_string::serialize(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for BetaValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = rational_string::deserialize(deserializer)?;
        BetaValue::new(value).map_err(serde::de::Error::custom)
    }
}

/// The Fano models of the example catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FanoModel {
    /// Degree `d` hypersurface in `P^{n+1}`.
    HypersurfaceInP {
        n: u32,
        d: u32,
    },
    /// Complete intersection of `m` degree-`d` hypersurfaces in `P^{n+m}`.
    CompleteIntersectionInP {
        n: u32,
        m: u32,
        d: u32,
    },
    /// Double cover of `P^n` branched along a smooth hypersurface of degree `2d`.
    DoubleCoverOfP {
        n: u32,
        d: u32,
    },
    /// Double cover of the quadric `Q_n` branched along a degree-`2d` section.
    DoubleCoverOfQuadric {
        n: u32,
        d: u32,
    },
    /// `P^1` with the cyclic cover `z -> z^d` onto `P^1`.
    FermatCoverP1 {
        d: u32,
    },
    Custom {
        n: u32,
        anticanonical_degree: QClass,
    },
}

impl FanoModel {
    pub fn dimension(&self) -> u32 {
        match self {
            FanoModel::HypersurfaceInP { n, .. }
            | FanoModel::CompleteIntersectionInP { n, .. }
            | FanoModel::DoubleCoverOfP { n, .. }
            | FanoModel::DoubleCoverOfQuadric { n, .. }
            | FanoModel::Custom { n, .. } => *n,
            FanoModel::FermatCoverP1 { .. } => 1,
        }
    }

    fn validate(&self) -> Result<(), DivisorError> {
        let positive = |name: &str, value: u32| {
            if value == 0 {
                Err(DivisorError::InvalidParameter(format!("{name} must be positive")))
            } else {
                Ok(())
            }
        };
        match self {
            FanoModel::HypersurfaceInP { n, d }
            | FanoModel::DoubleCoverOfP { n, d }
            | FanoModel::DoubleCoverOfQuadric { n, d } => {
                positive("n", *n)?;
                positive("d", *d)
            }
            FanoModel::CompleteIntersectionInP { n, m, d } => {
                positive("n", *n)?;
                positive("m", *m)?;
                positive("d", *d)
            }
            FanoModel::FermatCoverP1 { d } => positive("d", *d),
            FanoModel::Custom { n, .. } => positive("n", *n),
        }
    }
}

/// `-K_M` in the model's units, by adjunction.
pub fn anticanonical_degree(model: &FanoModel) -> Result<QClass, DivisorError> {
    model.validate()?;
    let degree = match model {
        FanoModel::HypersurfaceInP { n, d } => int(*n as i64 + 2 - *d as i64),
        FanoModel::CompleteIntersectionInP { n, m, d } => int(*n as i64 + *m as i64 + 1 - (*m as i64) * (*d as i64)),
        // -K_M = pi^* O(n + 1 - d)
        FanoModel::DoubleCoverOfP { n, d } => int(*n as i64 + 1 - *d as i64),
        // -K_M = phi^* O(n - d) with phi the composite to P^{n+1}
        FanoModel::DoubleCoverOfQuadric { n, d } => int(*n as i64 - *d as i64),
        FanoModel::FermatCoverP1 { .. } => int(2),
        FanoModel::Custom {
            anticanonical_degree, ..
        } => anticanonical_degree.0.clone(),
    };
    if degree.is_positive() {
        Ok(QClass(degree))
    } else {
        Err(DivisorError::NotFano {
            degree: degree.to_string(),
        })
    }
}

/// Divisor data of the covering each catalog model comes with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardCover {
    /// Degree of the covering, equal to the order of the Galois group.
    pub degree: u32,
    pub ramification: QClass,
    /// `pi^*(-K_N)` expressed in the units of `M`.
    pub pullback_anticanonical_base: QClass,
}

/// The covering used for each catalog family: coordinate projection for
/// the diagonal hypersurfaces and complete intersections, the double cover
/// itself for the double covers, and `z -> z^d` for the Fermat model.
pub fn standard_cover(model: &FanoModel) -> Result<StandardCover, DivisorError> {
    anticanonical_degree(model)?;
    let (degree, ramification, pullback) = match model {
        FanoModel::HypersurfaceInP { n, d } => (*d, *d as i64 - 1, *n as i64 + 1),
        FanoModel::CompleteIntersectionInP { n, m, d } => {
            let (n, m, d) = (*n as i64, *m as i64, *d as i64);
            // base: complete intersection of m - 1 degree-d hypersurfaces in P^{n+m-1}
            (d as u32, d - 1, n + m - (m - 1) * d)
        }
        FanoModel::DoubleCoverOfP { n, d } => (2, *d as i64, *n as i64 + 1),
        FanoModel::DoubleCoverOfQuadric { n, d } => (2, *d as i64, *n as i64),
        FanoModel::FermatCoverP1 { d } => (*d, 2 * (*d as i64 - 1), 2 * *d as i64),
        FanoModel::Custom { .. } => return Err(DivisorError::NoStandardCover),
    };
    Ok(StandardCover {
        degree,
        ramification: QClass::from_int(ramification),
        pullback_anticanonical_base: QClass::from_int(pullback),
    })
}

/// `beta = R / (-K_M)`.
pub fn beta_of_cover(ramification: &QClass, anticanonical: &QClass) -> Result<BetaValue, DivisorError> {
    if !anticanonical.is_positive() {
        return Err(DivisorError::NotFano {
            degree: anticanonical.to_string(),
        });
    }
    if !ramification.is_positive() {
        return Err(DivisorError::NotEffective {
            class: ramification.to_string(),
        });
    }
    BetaValue::new(&ramification.0 / &anticanonical.0)
}

/// `beta` of a catalog model's standard covering.
pub fn model_beta(model: &FanoModel) -> Result<BetaValue, DivisorError> {
    let cover = standard_cover(model)?;
    beta_of_cover(&cover.ramification, &anticanonical_degree(model)?)
}

/// Hurwitz: `pi^* K_N = K_M - R`, i.e. `pi^*(-K_N) = -K_M + R`.
pub fn hurwitz_check(
    pullback_anticanonical_base: &QClass,
    anticanonical_total: &QClass,
    ramification: &QClass,
) -> bool {
    *pullback_anticanonical_base == anticanonical_total + ramification
}

/// `1 + beta`, the factor in `pi^*[omega_N] = (1 + beta)[omega]`.
pub fn class_scaling_factor(beta: &BetaValue) -> Rational {
    Rational::one() + beta.get()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `int_0^1 s^{p+1} (1 - s)^k ds = (p+1)! k! / (p+k+2)!`.
pub fn beta_integral(p: u32, k: u32) -> Rational {
    let (p, k) = (p as u64, k as u64);
    Rational::new(factorial(p + 1) * factorial(k), factorial(p + k + 2))
}

/// `sum_{k=0}^{n-p-1} (p+1) / ((p+k+1)(p+k+2))`, summed term by term.
pub fn cp_sum(n: u32, p: u32) -> Result<Rational, DivisorError> {
    if n == 0 || p >= n {
        return Err(DivisorError::InvalidParameter(format!(
            "cp_sum needs 0 <= p <= n - 1, got n={n}, p={p}"
        )));
    }
    let (n, p) = (n as i64, p as i64);
    Ok((0..n - p).fold(Rational::zero(), |acc, k| acc + ratio(p + 1, (p + k + 1) * (p + k + 2))))
}

/// `n! / ((n - p)! (p + 1)!)`, the weight of `phi omega^{n-p} (i ddbar phi)^p`
/// in the expanded energy.
pub fn energy_expansion_coefficient(n: u32, p: u32) -> Rational {
    assert!(p <= n);
    let (n, p) = (n as u64, p as u64);
    Rational::new(factorial(n), factorial(n - p) * factorial(p + 1))
}
