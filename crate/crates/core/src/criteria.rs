//! Sufficient conditions for the existence of a Kähler-Einstein metric on a
//! Fano manifold carrying Galois coverings, decided in exact arithmetic.
//!
//! Geometric facts (disjointness, transversality, smoothness of the reduced
//! ramification, a common compact group) are inputs asserted by the caller.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor_algebra::{rational_string, BetaValue, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(String),
    #[error("alpha must lie in (0, 1), got {0}")]
    DomainError(String),
    #[error("invalid cover system: {0}")]
    InvalidSystem(String),
}

/// One Galois covering `pi_i : M -> M / G_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CoverWire", into = "CoverWire")]
pub struct CoverDescriptor {
    pub group_order: u32,
    pub beta: BetaValue,
    pub base_has_ke: bool,
    pub is_galois: bool,
    pub group_in_common_compact: bool,
    pub reduced_ramification_smooth: bool,
}

impl CoverDescriptor {
    /// A covering with every geometric flag set.
    pub fn ideal(group_order: u32, beta: BetaValue) -> Result<Self, CriteriaError> {
        if group_order < 2 {
            return Err(CriteriaError::InvalidSystem(format!(
                "group order must be at least 2, got {group_order}"
            )));
        }
        Ok(CoverDescriptor {
            group_order,
            beta,
            base_has_ke: true,
            is_galois: true,
            group_in_common_compact: true,
            reduced_ramification_smooth: true,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CoverWire {
    d: u32,
    #[serde(with = "rational_string")]
    beta: Rational,
    base_ke: bool,
    galois: bool,
    compact_group: bool,
    smooth_reduced: bool,
}

impl TryFrom<CoverWire> for CoverDescriptor {
    type Error = CriteriaError;

    fn try_from(wire: CoverWire) -> Result<Self, Self::Error> {
        if wire.d < 2 {
            return Err(CriteriaError::InvalidSystem(format!(
                "group order must be at least 2, got {}",
                wire.d
            )));
        }
        let beta = BetaValue::new(wire.beta).map_err(|e| CriteriaError::InvalidSystem(e.to_string()))?;
        Ok(CoverDescriptor {
            group_order: wire.d,
            beta,
            base_has_ke: wire.base_ke,
            is_galois: wire.galois,
            group_in_common_compact: wire.compact_group,
            reduced_ramification_smooth: wire.smooth_reduced,
        })
    }
}

impl From<CoverDescriptor> for CoverWire {
    fn from(cover: CoverDescriptor) -> Self {
        CoverWire {
            d: cover.group_order,
            beta: cover.beta.get().clone(),
            base_ke: cover.base_has_ke,
            galois: cover.is_galois,
            compact_group: cover.group_in_common_compact,
            smooth_reduced: cover.reduced_ramification_smooth,
        }
    }
}

/// A family of coverings of the same manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemWire", into = "SystemWire")]
pub struct CoverSystem {
    covers: Vec<CoverDescriptor>,
    pub ramifications_disjoint: bool,
    pub ramifications_transverse_smooth: bool,
}

#[derive(Serialize, Deserialize)]
struct SystemWire {
    covers: Vec<CoverDescriptor>,
    disjoint: bool,
    transverse: bool,
}

impl TryFrom<SystemWire> for CoverSystem {
    type Error = CriteriaError;

    fn try_from(wire: SystemWire) -> Result<Self, Self::Error> {
        CoverSystem::new(wire.covers, wire.disjoint, wire.transverse)
    }
}

impl From<CoverSystem> for SystemWire {
    fn from(system: CoverSystem) -> Self {
        SystemWire {
            covers: system.covers,
            disjoint: system.ramifications_disjoint,
            transverse: system.ramifications_transverse_smooth,
        }
    }
}

impl CoverSystem {
    pub fn new(
        covers: Vec<CoverDescriptor>,
        ramifications_disjoint: bool,
        ramifications_transverse_smooth: bool,
    ) -> Result<Self, CriteriaError> {
        if covers.is_empty() {
            return Err(CriteriaError::InvalidSystem("no covers given".into()));
        }
        if let Some(bad) = covers.iter().find(|c| c.group_order < 2) {
            return Err(CriteriaError::InvalidSystem(format!(
                "group order must be at least 2, got {}",
                bad.group_order
            )));
        }
        Ok(CoverSystem {
            covers,
            ramifications_disjoint,
            ramifications_transverse_smooth,
        })
    }

    pub fn single(cover: CoverDescriptor) -> Self {
        CoverSystem {
            covers: vec![cover],
            ramifications_disjoint: false,
            ramifications_transverse_smooth: false,
        }
    }

    pub fn covers(&self) -> &[CoverDescriptor] {
        &self.covers
    }

    pub fn push(&mut self, cover: CoverDescriptor) -> Result<(), CriteriaError> {
        if cover.group_order < 2 {
            return Err(CriteriaError::InvalidSystem("group order below 2".into()));
        }
        self.covers.push(cover);
        Ok(())
    }

    pub fn min_beta(&self) -> Rational {
        self.covers
            .iter()
            .map(|c| c.beta.get().clone())
            .min()
            .expect("cover system is non-empty")
    }

    /// `sum_i 1 / (d_i - 1)`.
    pub fn harmonic_sum(&self) -> Rational {
        self.covers.iter().fold(Rational::zero(), |acc, c| {
            acc + Rational::new(1.into(), (c.group_order as i64 - 1).into())
        })
    }
}

/// Hypotheses of the existence criteria, numbered as they are usually listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// (1) each quotient is Fano and Kähler-Einstein.
    BaseKahlerEinstein,
    /// (2) each covering is Galois.
    Galois,
    /// (3) the groups sit in a common compact subgroup of `Aut(M)`.
    CommonCompactGroup,
    /// (4) ramification geometry: empty common intersection, or smooth
    /// reduced divisors meeting transversally.
    RamificationGeometry,
    /// (5) the numerical inequality between orders and `beta`.
    Numerical,
}

impl Hypothesis {
    pub fn number(&self) -> u8 {
        match self {
            Hypothesis::BaseKahlerEinstein => 1,
            Hypothesis::Galois => 2,
            Hypothesis::CommonCompactGroup => 3,
            Hypothesis::RamificationGeometry => 4,
            Hypothesis::Numerical => 5,
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Hypothesis::BaseKahlerEinstein => "base Kahler-Einstein",
            Hypothesis::Galois => "Galois",
            Hypothesis::CommonCompactGroup => "common compact group",
            Hypothesis::RamificationGeometry => "ramification geometry",
            Hypothesis::Numerical => "numerical inequality",
        };
        write!(f, "hypothesis ({}) {}", self.number(), text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    Disjoint,
    SingleCover,
    TransverseSystem,
    ExplicitExponent,
    None,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Criterion::Disjoint => "disjoint",
            Criterion::SingleCover => "single_cover",
            Criterion::TransverseSystem => "transverse_system",
            Criterion::ExplicitExponent => "explicit_exponent",
            Criterion::None => "none",
        };
        f.write_str(text)
    }
}

/// Outcome of a criterion. `ke_proven = false` means "unknown", never
/// "no Kähler-Einstein metric": the criteria are sufficient only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ke_proven: bool,
    pub criterion_used: Criterion,
    #[serde(serialize_with = "serialize_witness", deserialize_with = "deserialize_witness")]
    pub witness: BTreeMap<String, Rational>,
    pub failed: Option<Hypothesis>,
}

fn serialize_witness<S: serde::Serializer>(
    witness: &BTreeMap<String, Rational>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = serializer.serialize_map(Some(witness.len()))?;
    for (key, value) in witness {
        map.serialize_entry(key, &value.to_string())?;
    }
    map.end()
}

fn deserialize_witness<'de, D: serde::Deserializer<'de>>(
    deserializer: D,
) -> Result<BTreeMap<String, Rational>, D::Error> {
    let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
    raw.into_iter()
        .map(|(k, v)| {
            crate::divisor_algebra::parse_rational(&v)
                .map(|r| (k, r))
                .map_err(serde::de::Error::custom)
        })
        .collect()
}

impl Verdict {
    fn proven(criterion: Criterion, witness: BTreeMap<String, Rational>) -> Self {
        Verdict {
            ke_proven: true,
            criterion_used: criterion,
            witness,
            failed: None,
        }
    }

    fn failed(hypothesis: Hypothesis, witness: BTreeMap<String, Rational>) -> Self {
        Verdict {
            ke_proven: false,
            criterion_used: Criterion::None,
            witness,
            failed: Some(hypothesis),
        }
    }

    /// Re-derives the strict inequality from the stored witness values.
    pub fn recheck(&self) -> bool {
        let w = &self.witness;
        match self.criterion_used {
            Criterion::None => false,
            Criterion::Disjoint => w.get("min_beta").is_some_and(|b| b.is_positive()),
            Criterion::SingleCover => match (w.get("d_minus_one"), w.get("beta")) {
                (Some(lhs), Some(rhs)) => lhs < rhs,
                _ => false,
            },
            Criterion::TransverseSystem => match (w.get("harmonic_sum"), w.get("inverse_min_beta")) {
                (Some(lhs), Some(rhs)) => lhs > rhs,
                _ => false,
            },
            Criterion::ExplicitExponent => match (w.get("inverse_c"), w.get("min_beta")) {
                (Some(lhs), Some(rhs)) => lhs < rhs,
                _ => false,
            },
        }
    }
}

/// First failing group-theoretic hypothesis among (1)-(3), if any.
fn common_hypotheses(covers: &[CoverDescriptor]) -> Option<Hypothesis> {
    if covers.iter().any(|c| !c.base_has_ke) {
        return Some(Hypothesis::BaseKahlerEinstein);
    }
    if covers.iter().any(|c| !c.is_galois) {
        return Some(Hypothesis::Galois);
    }
    if covers.iter().any(|c| !c.group_in_common_compact) {
        return Some(Hypothesis::CommonCompactGroup);
    }
    None
}

/// Coverings whose ramification divisors have empty common intersection.
pub fn check_disjoint_system(system: &CoverSystem) -> Verdict {
    let min_beta = system.min_beta();
    let witness = BTreeMap::from([("min_beta".to_string(), min_beta)]);
    if let Some(h) = common_hypotheses(&system.covers) {
        return Verdict::failed(h, witness);
    }
    if !system.ramifications_disjoint {
        return Verdict::failed(Hypothesis::RamificationGeometry, witness);
    }
    Verdict::proven(Criterion::Disjoint, witness)
}

/// A single Galois covering of degree `d` with `d - 1 < beta`.
pub fn check_single_cover(cover: &CoverDescriptor) -> Verdict {
    let d_minus_one = Rational::from_integer((cover.group_order as i64 - 1).into());
    let beta = cover.beta.get().clone();
    let witness = BTreeMap::from([
        ("d_minus_one".to_string(), d_minus_one.clone()),
        ("beta".to_string(), beta.clone()),
    ]);
    if !cover.base_has_ke {
        return Verdict::failed(Hypothesis::BaseKahlerEinstein, witness);
    }
    if !cover.is_galois {
        return Verdict::failed(Hypothesis::Galois, witness);
    }
    if d_minus_one < beta {
        Verdict::proven(Criterion::SingleCover, witness)
    } else {
        Verdict::failed(Hypothesis::Numerical, witness)
    }
}

/// Smooth transverse reduced ramification with
/// `sum 1/(d_i - 1) > 1/min beta_i`.
pub fn check_transverse_system(system: &CoverSystem) -> Verdict {
    let min_beta = system.min_beta();
    let harmonic = system.harmonic_sum();
    let inverse = min_beta.recip();
    let witness = BTreeMap::from([
        ("min_beta".to_string(), min_beta),
        ("harmonic_sum".to_string(), harmonic.clone()),
        ("inverse_min_beta".to_string(), inverse.clone()),
    ]);
    if let Some(h) = common_hypotheses(&system.covers) {
        return Verdict::failed(h, witness);
    }
    if !system.ramifications_transverse_smooth || system.covers.iter().any(|c| !c.reduced_ramification_smooth) {
        return Verdict::failed(Hypothesis::RamificationGeometry, witness);
    }
    if harmonic > inverse {
        Verdict::proven(Criterion::TransverseSystem, witness)
    } else {
        Verdict::failed(Hypothesis::Numerical, witness)
    }
}

/// Criterion through a known lower bound `c` for the integrability exponent
/// of the averaged ramification density: `1/c < min beta_i`.
pub fn check_with_exponent(system: &CoverSystem, c: &Rational) -> Result<Verdict, CriteriaError> {
    if !c.is_positive() {
        return Err(CriteriaError::NonPositiveExponent(c.to_string()));
    }
    let min_beta = system.min_beta();
    let inverse_c = c.recip();
    let witness = BTreeMap::from([
        ("c".to_string(), c.clone()),
        ("inverse_c".to_string(), inverse_c.clone()),
        ("min_beta".to_string(), min_beta.clone()),
    ]);
    if let Some(h) = common_hypotheses(&system.covers) {
        return Ok(Verdict::failed(h, witness));
    }
    if inverse_c < min_beta {
        Ok(Verdict::proven(Criterion::ExplicitExponent, witness))
    } else {
        Ok(Verdict::failed(Hypothesis::Numerical, witness))
    }
}

/// Lower bound for the integrability exponent from the local shape of the
/// ramification: a factor of order at most `d - 1` for one cover, and the
/// sum of reciprocal orders for smooth transverse divisors. Without either
/// structure the bound of the worst single factor is used.
pub fn exponent_lower_bound(system: &CoverSystem) -> Rational {
    let covers = &system.covers;
    if covers.len() == 1 {
        return Rational::new(1.into(), (covers[0].group_order as i64 - 1).into());
    }
    if system.ramifications_transverse_smooth && covers.iter().all(|c| c.reduced_ramification_smooth) {
        return system.harmonic_sum();
    }
    let max_d = covers.iter().map(|c| c.group_order).max().expect("non-empty");
    Rational::new(1.into(), (max_d as i64 - 1).into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaConstants {
    #[serde(with = "rational_string")]
    pub p: Rational,
    #[serde(with = "rational_string")]
    pub c1: Rational,
}

/// `p = 1 + (1 - alpha)/beta` and `C_1 = alpha beta / (1 - alpha)`.
pub fn alpha_constants(alpha: &Rational, beta: &BetaValue) -> Result<AlphaConstants, CriteriaError> {
    if !alpha.is_positive() || alpha >= &Rational::one() {
        return Err(CriteriaError::DomainError(alpha.to_string()));
    }
    let one_minus = Rational::one() - alpha;
    Ok(AlphaConstants {
        p: Rational::one() + &one_minus / beta.get(),
        c1: alpha * beta.get() / one_minus,
    })
}

/// Tries every applicable criterion in turn: disjoint, single cover,
/// transverse system, then the exponent bound from [`exponent_lower_bound`].
pub fn decide(system: &CoverSystem) -> Verdict {
    let disjoint = check_disjoint_system(system);
    if disjoint.ke_proven {
        return disjoint;
    }
    if system.covers.len() == 1 {
        let single = check_single_cover(&system.covers[0]);
        if single.ke_proven {
            return single;
        }
    }
    let transverse = check_transverse_system(system);
    if transverse.ke_proven {
        return transverse;
    }
    let bound = exponent_lower_bound(system);
    let exponent = check_with_exponent(system, &bound).expect("bound is positive");
    if exponent.ke_proven {
        return exponent;
    }
    // Report the most specific failure.
    if system.covers.len() == 1 {
        check_single_cover(&system.covers[0])
    } else if system.ramifications_transverse_smooth {
        transverse
    } else {
        disjoint
    }
}
