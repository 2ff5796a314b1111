//! Convergence of `int_{[0,1]^k} prod s_i^{2/m_i - 1} (s_1 + ... + s_k)^{-2 lambda} ds`.
//!
//! This is the integral of `(|z_1|^{m_1} + ... + |z_k|^{m_k})^{-2 lambda}`
//! after polar coordinates and `s_i = t_i^{m_i}`. It is finite exactly when
//! `lambda < sum 1/m_i`: near the corner the integrand is homogeneous of
//! degree `sum 2/m_i - k - 2 lambda`.
//!
//! The estimate at level `L` integrates over `[0,1]^k` minus the box
//! `[0, 2^{-6L}]^k`. Each level adds one shell, tiled by six dyadic cells and
//! one inner cell per axis. Dyadic cells use Gauss-Legendre; the inner cell
//! uses Gauss-Jacobi with the weight `s^{2/m - 1}`, so no node sits on a
//! singular face. Convergence is read off the ratios of successive
//! estimates: a finite integral gives ratios tending to `1`, a divergent one
//! gives ratios tending to `2^{6 (2 lambda - sum 2/m_i)} > 1`.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor_algebra::{BetaValue, Rational};

/// Each level shrinks the excluded corner box by `2^GRADING_BITS`.
pub const GRADING_BITS: usize = 6;
pub const MAX_DIMENSION: usize = 4;
pub const MAX_LEVELS: usize = 12;
pub const DEFAULT_LEVELS: usize = 12;
/// A converging estimate changes by well under 2% per level at `lambda`
/// ten percent below the threshold; near-threshold logarithmic growth
/// changes by about `1/L`, which stays above this band.
pub const CONVERGENCE_BAND: f64 = 0.02;
/// Ten percent above the threshold the shells grow by at least `2^{0.4}`
/// per level for every tuple with `m_i <= 6`.
pub const GROWTH_RATIO: f64 = 1.1;

/// Exponent tuples probed at the threshold by the acceptance checks.
pub const THRESHOLD_CATALOG: [&[u32]; 6] = [&[1], &[2], &[2, 2], &[3, 3], &[2, 3], &[3, 3, 3]];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SingexpError {
    #[error("invalid exponents: {0}")]
    InvalidMonomial(String),
    #[error(
        "quadrature budget exceeded: dimension {dimension} (max {MAX_DIMENSION}), levels {levels} (max {MAX_LEVELS})"
    )]
    BudgetExceeded { dimension: usize, levels: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Exponents `m_1, ..., m_k` of `|z_1|^{m_1} + ... + |z_k|^{m_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MonomialSum {
    exponents: Vec<u32>,
}

impl MonomialSum {
    pub fn new(exponents: Vec<u32>) -> Result<Self, SingexpError> {
        if exponents.is_empty() {
            return Err(SingexpError::InvalidMonomial("need at least one exponent".into()));
        }
        if exponents.contains(&0) {
            return Err(SingexpError::InvalidMonomial("exponents must be positive".into()));
        }
        Ok(MonomialSum { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }
}

impl TryFrom<Vec<u32>> for MonomialSum {
    type Error = SingexpError;

    fn try_from(exponents: Vec<u32>) -> Result<Self, SingexpError> {
        MonomialSum::new(exponents)
    }
}

impl From<MonomialSum> for Vec<u32> {
    fn from(m: MonomialSum) -> Vec<u32> {
        m.exponents
    }
}

impl fmt::Display for MonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MonomialSum {
    type Err = SingexpError;

    /// Comma-separated exponents, e.g. `2,3`.
    fn from_str(s: &str) -> Result<Self, SingexpError> {
        let exponents = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|e| SingexpError::InvalidMonomial(format!("{part:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MonomialSum::new(exponents)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Convergent,
    Divergent,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Classification::Convergent => "Convergent",
            Classification::Divergent => "Divergent",
            Classification::Inconclusive => "Inconclusive",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub lambda: f64,
    /// Estimate after each level, coarsest first.
    pub estimates: Vec<f64>,
    /// `estimates[l + 1] / estimates[l]`.
    pub growth_ratios: Vec<f64>,
    pub classification: Classification,
}

/// `sum 1/m_i`, the proven lower bound for the singularity exponent.
pub fn threshold(m: &MonomialSum) -> Rational {
    m.exponents
        .iter()
        .fold(Rational::zero(), |acc, &e| acc + Rational::new(1.into(), e.into()))
}

/// `1 / ord`: the exponent bound from the vanishing order alone.
pub fn ord_bound(order: u32) -> Result<Rational, SingexpError> {
    if order == 0 {
        return Err(SingexpError::InvalidParameter("order must be at least 1".into()));
    }
    Ok(Rational::new(1.into(), order.into()))
}

/// Whether `c = threshold(m)` satisfies `1/c < beta`.
pub fn exponent_to_criterion(m: &MonomialSum, beta: &BetaValue) -> bool {
    threshold(m).recip() < *beta.get()
}

/// Ratio-based classification of a sequence of estimates.
pub fn classify(estimates: &[f64]) -> Classification {
    let ratios = growth_ratios(estimates);
    let n = ratios.len();
    if n >= 2 && ratios[n - 2..].iter().all(|r| (r - 1.0).abs() <= CONVERGENCE_BAND) {
        return Classification::Convergent;
    }
    if n >= 3 && ratios[n - 3..].iter().all(|&r| r >= GROWTH_RATIO) {
        return Classification::Divergent;
    }
    Classification::Inconclusive
}

fn growth_ratios(estimates: &[f64]) -> Vec<f64> {
    estimates.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Quadrature node on one axis, with the factor `s^{2/m - 1}` folded into
/// the weight. `inner` marks nodes of the cell touching `s = 0`.
#[derive(Debug, Clone, Copy)]
struct AxisNode {
    s: f64,
    weight: f64,
    inner: bool,
}

struct AxisRule {
    alpha: f64,
    legendre: Vec<(f64, f64)>,
    jacobi: Vec<(f64, f64)>,
}

impl AxisRule {
    fn new(m: u32, q: usize) -> Self {
        let alpha = 2.0 / m as f64 - 1.0;
        let degree = NonZeroUsize::new(q).expect("positive");
        let jacobi = GaussJacobi::new(
            degree,
            FiniteAboveNegOneF64::new(0.0).expect("finite"),
            FiniteAboveNegOneF64::new(alpha).expect("alpha > -1 for m >= 1"),
        );
        AxisRule {
            alpha,
            legendre: GaussLegendre::new(degree).as_node_weight_pairs().to_vec(),
            jacobi: jacobi.as_node_weight_pairs().to_vec(),
        }
    }

    /// Nodes tiling `[0, outer]`: dyadic cells down to `outer 2^{-6}` and
    /// the inner cell below it.
    fn shell(&self, outer: f64) -> Vec<AxisNode> {
        let mut nodes = Vec::with_capacity((GRADING_BITS + 1) * self.legendre.len());
        let mut hi = outer;
        for _ in 0..GRADING_BITS {
            let lo = 0.5 * hi;
            let half = 0.5 * (hi - lo);
            for &(x, w) in &self.legendre {
                let s = lo + half * (x + 1.0);
                nodes.push(AxisNode {
                    s,
                    weight: half * w * s.powf(self.alpha),
                    inner: false,
                });
            }
            hi = lo;
        }
        // int_0^b s^alpha g(s) ds = (b/2)^{alpha+1} int_{-1}^1 (1+x)^alpha g(b(1+x)/2) dx
        let half = 0.5 * hi;
        let scale = half.powf(self.alpha + 1.0);
        for &(x, w) in &self.jacobi {
            nodes.push(AxisNode {
                s: half * (x + 1.0),
                weight: scale * w,
                inner: true,
            });
        }
        nodes
    }
}

fn nodes_per_axis(dimension: usize) -> usize {
    match dimension {
        1 | 2 => 8,
        3 => 6,
        _ => 5,
    }
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Integral over `[0, outer]^k` minus `[0, outer 2^{-6}]^k`.
fn shell_integral(axes: &[Vec<AxisNode>], lambda: f64) -> f64 {
    let k = axes.len();
    let partials: Vec<f64> = axes[0]
        .par_iter()
        .map(|first| {
            let mut index = vec![0usize; k - 1];
            let mut total = 0.0;
            loop {
                let mut sum = first.s;
                let mut weight = first.weight;
                let mut all_inner = first.inner;
                for (axis, &i) in axes[1..].iter().zip(&index) {
                    let node = axis[i];
                    sum += node.s;
                    weight *= node.weight;
                    all_inner &= node.inner;
                }
                if !all_inner {
                    total += weight * sum.powf(-2.0 * lambda);
                }
                // odometer over the remaining axes
                let mut j = 0;
                while j < k - 1 {
                    index[j] += 1;
                    if index[j] < axes[j + 1].len() {
                        break;
                    }
                    index[j] = 0;
                    j += 1;
                }
                if j == k - 1 {
                    break;
                }
            }
            total
        })
        .collect();
    pairwise_sum(&partials)
}

/// Graded-mesh estimates of the reduced integral on `levels` shells.
pub fn reduced_integral(m: &MonomialSum, lambda: f64, levels: usize) -> Result<QuadratureResult, SingexpError> {
    let k = m.dimension();
    if k > MAX_DIMENSION || levels > MAX_LEVELS {
        return Err(SingexpError::BudgetExceeded { dimension: k, levels });
    }
    if levels == 0 {
        return Err(SingexpError::InvalidParameter("need at least one level".into()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(SingexpError::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let q = nodes_per_axis(k);
    let rules: Vec<AxisRule> = m.exponents.iter().map(|&e| AxisRule::new(e, q)).collect();
    let mut estimates = Vec::with_capacity(levels);
    let mut total = 0.0;
    let mut outer = 1.0f64;
    for _ in 0..levels {
        let axes: Vec<Vec<AxisNode>> = rules.iter().map(|r| r.shell(outer)).collect();
        total += shell_integral(&axes, lambda);
        estimates.push(total);
        outer /= (1u64 << GRADING_BITS) as f64;
    }
    let classification = classify(&estimates);
    Ok(QuadratureResult {
        lambda,
        growth_ratios: growth_ratios(&estimates),
        estimates,
        classification,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProbe {
    pub threshold: f64,
    pub below: QuadratureResult,
    pub above: QuadratureResult,
}

impl ThresholdProbe {
    /// Convergent below and divergent above.
    pub fn is_sharp(&self) -> bool {
        self.below.classification == Classification::Convergent
            && self.above.classification == Classification::Divergent
    }
}

/// Classifications at `lambda = threshold (1 -+ epsilon)`.
pub fn classify_at_threshold(m: &MonomialSum, epsilon: f64, levels: usize) -> Result<ThresholdProbe, SingexpError> {
    if !(epsilon > 0.0 && epsilon <= 0.2) {
        return Err(SingexpError::InvalidParameter(format!(
            "epsilon must lie in (0, 0.2], got {epsilon}"
        )));
    }
    let t = crate::divisor_algebra::to_f64(&threshold(m));
    Ok(ThresholdProbe {
        threshold: t,
        below: reduced_integral(m, t * (1.0 - epsilon), levels)?,
        above: reduced_integral(m, t * (1.0 + epsilon), levels)?,
    })
}

/// Whether `lambda < sum 1/m_i`, decided exactly for rational `lambda`.
pub fn converges_exactly(m: &MonomialSum, lambda: &Rational) -> bool {
    *lambda < threshold(m) && *lambda > Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor_algebra::{int, ratio};

    fn ms(v: &[u32]) -> MonomialSum {
        MonomialSum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold(&ms(&[1])), int(1));
        assert_eq!(threshold(&ms(&[2, 2])), int(1));
        assert_eq!(threshold(&ms(&[2, 3, 6])), int(1));
        assert_eq!(threshold(&ms(&[3, 3])), ratio(2, 3));
    }

    #[test]
    fn ord_bound_examples() {
        assert_eq!(ord_bound(1).unwrap(), int(1));
        assert_eq!(ord_bound(2 - 1).unwrap(), int(1));
        assert_eq!(ord_bound(5).unwrap(), ratio(1, 5));
        assert!(ord_bound(0).is_err());
    }

    #[test]
    fn exponent_to_criterion_examples() {
        let beta = |p, q| BetaValue::from_ratio(p, q).unwrap();
        assert!(exponent_to_criterion(&ms(&[1]), &beta(3, 1)));
        assert!(!exponent_to_criterion(&ms(&[2, 2]), &beta(1, 1)));
        assert!(exponent_to_criterion(&ms(&[1, 1, 1]), &beta(1, 2)));
    }

    #[test]
    fn parses_and_rejects() {
        assert_eq!("2, 3".parse::<MonomialSum>().unwrap(), ms(&[2, 3]));
        assert!("".parse::<MonomialSum>().is_err());
        assert!("2,0".parse::<MonomialSum>().is_err());
        assert!(MonomialSum::new(vec![]).is_err());
        assert_eq!(ms(&[2, 3]).to_string(), "2,3");
    }

    #[test]
    fn one_dimensional_estimates_match_closed_form() {
        // int_eps^1 s^a ds = (1 - eps^{a+1}) / (a+1), a = 2/m - 1 - 2 lambda
        for (m, lambda) in [(1u32, 0.4), (2, 0.45), (3, 0.2), (2, 0.6)] {
            let result = reduced_integral(&ms(&[m]), lambda, 6).unwrap();
            let p = 2.0 / m as f64 - 2.0 * lambda;
            for (l, estimate) in result.estimates.iter().enumerate() {
                let eps = 2f64.powi(-(GRADING_BITS as i32) * (l as i32 + 1));
                let exact = (1.0 - eps.powf(p)) / p;
                assert!((estimate - exact).abs() < 1e-10 * exact.abs(), "m={m} l={l}");
            }
        }
    }

    #[test]
    fn documented_classifications() {
        let at = |v: &[u32], lambda| reduced_integral(&ms(v), lambda, DEFAULT_LEVELS).unwrap().classification;
        assert_eq!(at(&[1], 0.4), Classification::Convergent);
        assert_eq!(at(&[2], 0.45), Classification::Convergent);
        assert_eq!(at(&[2], 0.55), Classification::Divergent);
        assert_eq!(at(&[2, 2], 0.9), Classification::Convergent);
        assert_eq!(at(&[2, 2], 1.1), Classification::Divergent);
    }

    #[test]
    fn at_the_threshold_is_inconclusive() {
        let result = reduced_integral(&ms(&[2, 2]), 1.0, DEFAULT_LEVELS).unwrap();
        assert_eq!(result.classification, Classification::Inconclusive);
    }

    #[test]
    fn budget_and_parameter_errors() {
        assert!(matches!(
            reduced_integral(&ms(&[1, 1, 1, 1, 1]), 0.5, 4),
            Err(SingexpError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            reduced_integral(&ms(&[1]), 0.5, 13),
            Err(SingexpError::BudgetExceeded { .. })
        ));
        assert!(reduced_integral(&ms(&[1]), 0.0, 4).is_err());
        assert!(classify_at_threshold(&ms(&[1]), 0.3, 4).is_err());
    }

    #[test]
    fn classify_rules() {
        assert_eq!(classify(&[1.0, 1.5, 1.6, 1.6001]), Classification::Inconclusive);
        assert_eq!(classify(&[1.0, 1.0, 1.001, 1.0015]), Classification::Convergent);
        assert_eq!(classify(&[1.0, 2.0, 4.0, 8.0]), Classification::Divergent);
        assert_eq!(classify(&[1.0]), Classification::Inconclusive);
    }

    #[test]
    fn exact_convergence_condition() {
        assert!(converges_exactly(&ms(&[2, 2]), &ratio(9, 10)));
        assert!(!converges_exactly(&ms(&[2, 2]), &int(1)));
    }
}
