//! Catalog of Fano families that carry natural Galois coverings, with the
//! geometric flags each family is known to satisfy.
//!
//! Flags are constants per family: the ramification of a coordinate
//! projection of a diagonal variety is a smooth hyperplane section, these
//! sections meet transversally, and the cyclic groups sit in the diagonal
//! torus of the ambient unitary group.

mod pencil;

pub use pencil::{random_congruence, two_quadrics_normal_form, NormalForm, PencilError, PencilOfQuadrics, C64};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{check_single_cover, check_transverse_system, CoverDescriptor, CoverSystem, Criterion, Verdict};
use crate::divisor_algebra::{anticanonical_degree, model_beta, BetaValue, DivisorError, FanoModel, QClass, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyVerdict {
    pub family: FanoModel,
    /// `None` when no covering data is modeled for the entry.
    pub system: Option<CoverSystem>,
    pub verdict: Verdict,
    /// The existence condition the family is known to satisfy.
    pub stated_condition: bool,
    pub note: String,
}

impl FamilyVerdict {
    pub fn beta(&self) -> Option<&Rational> {
        self.system.as_ref().map(|s| s.covers()[0].beta.get())
    }

    /// Whether the computed verdict agrees with the stated condition. For
    /// complete intersections with `m >= 2` the stated condition is
    /// sufficient but not sharp, so only the implication is required.
    pub fn consistent(&self) -> bool {
        match self.family {
            FanoModel::CompleteIntersectionInP { m, .. } if m >= 2 => !self.stated_condition || self.verdict.ke_proven,
            FanoModel::Custom { .. } => !self.verdict.ke_proven,
            _ => self.verdict.ke_proven == self.stated_condition,
        }
    }
}

fn out_of_range(message: String) -> FamilyError {
    FamilyError::OutOfRange(message)
}

fn cyclic_cover(d: u32, beta: BetaValue, base_has_ke: bool) -> CoverDescriptor {
    CoverDescriptor {
        group_order: d,
        beta,
        base_has_ke,
        is_galois: true,
        group_in_common_compact: true,
        reduced_ramification_smooth: true,
    }
}

/// `k` coordinate projections of the diagonal degree-`d` hypersurface
/// `sum x_i^d = 0` in `P^{n+1}` onto `P^n`.
pub fn diagonal_hypersurface(n: u32, d: u32, k: u32) -> Result<FamilyVerdict, FamilyError> {
    if n == 0 || d < 2 {
        return Err(out_of_range(format!(
            "hypersurface needs n >= 1 and d >= 2, got n={n}, d={d}"
        )));
    }
    let model = FanoModel::HypersurfaceInP { n, d };
    anticanonical_degree(&model)?;
    if k == 0 || k > n + 2 {
        return Err(out_of_range(format!("need 1 <= k <= n + 2, got k={k}")));
    }
    let beta = model_beta(&model)?;
    let covers = vec![cyclic_cover(d, beta.clone(), true); k as usize];
    // k coordinates vanishing on the diagonal hypersurface leave nothing once k >= n + 1
    let system = CoverSystem::new(covers, k > n, true).expect("k >= 1 and d >= 2");
    let verdict = check_transverse_system(&system);
    let gap = (n + 2 - d) as i64;
    let stated_condition = (k as i64) > gap;
    let rescaled =
        Rational::new((k as i64).into(), ((d - 1) as i64).into()) > Rational::new(gap.into(), ((d - 1) as i64).into());
    debug_assert_eq!(rescaled, stated_condition);
    Ok(FamilyVerdict {
        family: model,
        system: Some(system),
        verdict,
        stated_condition,
        note: format!("beta = {beta}; condition k > {gap}"),
    })
}

fn complete_intersection_base_has_ke(n: u32, m: u32, d: u32) -> bool {
    // base of a coordinate projection: m - 1 equations in P^{n+m-1}
    if m <= 1 {
        return true;
    }
    let base_m = m - 1;
    let fano = (n + base_m + 1) as i64 - (base_m * d) as i64 > 0;
    fano && complete_intersection_base_has_ke(n, base_m, d)
}

/// `k` coordinate projections of the diagonal complete intersection of `m`
/// degree-`d` hypersurfaces in `P^{n+m}`.
pub fn diagonal_complete_intersection(n: u32, m: u32, d: u32, k: u32) -> Result<FamilyVerdict, FamilyError> {
    if n == 0 || m == 0 || d < 2 {
        return Err(out_of_range(format!(
            "complete intersection needs n, m >= 1 and d >= 2, got n={n}, m={m}, d={d}"
        )));
    }
    let model = FanoModel::CompleteIntersectionInP { n, m, d };
    let anti = anticanonical_degree(&model)
        .map_err(|_| out_of_range(format!("not Fano: n + m + 1 - m d <= 0 for n={n}, m={m}, d={d}")))?;
    if k == 0 || k > n + m + 1 {
        return Err(out_of_range(format!("need 1 <= k <= n + m + 1, got k={k}")));
    }
    let beta = model_beta(&model)?;
    let base_ke = complete_intersection_base_has_ke(n, m, d);
    let covers = vec![cyclic_cover(d, beta.clone(), base_ke); k as usize];
    let system = CoverSystem::new(covers, k > n, true).expect("k >= 1 and d >= 2");
    let verdict = check_transverse_system(&system);
    let gap = n as i64 + 2 - d as i64;
    let stated_condition = gap < k as i64;
    // n + 1 + m(1 - d) <= n + 2 - d, so the stated condition forces beta > (d - 1)/k
    debug_assert!(anti.coeff() <= &Rational::from_integer(gap.into()));
    Ok(FamilyVerdict {
        family: model,
        system: Some(system),
        verdict,
        stated_condition,
        note: format!("beta = {beta}; sufficient condition k > {gap}; sharp condition k > {anti}"),
    })
}

/// Smooth intersection of two quadrics in `P^{n+2}`, written in diagonal
/// form and covered by its `n + 3` coordinate double covers.
pub fn two_quadrics(n: u32) -> Result<FamilyVerdict, FamilyError> {
    if n < 2 {
        return Err(out_of_range(format!("two quadrics need n >= 2, got {n}")));
    }
    let mut verdict = diagonal_complete_intersection(n, 2, 2, n + 3)?;
    verdict.stated_condition = true;
    verdict.note = format!("{}; always Kahler-Einstein", verdict.note);
    Ok(verdict)
}

fn single_cover_verdict(model: FanoModel, stated_condition: bool, note: String) -> Result<FamilyVerdict, FamilyError> {
    let beta = model_beta(&model)?;
    let cover = cyclic_cover(2, beta.clone(), true);
    let verdict = check_single_cover(&cover);
    Ok(FamilyVerdict {
        family: model,
        system: Some(CoverSystem::single(cover)),
        verdict,
        stated_condition,
        note: format!("beta = {beta}; {note}"),
    })
}

/// Double cover of `P^n` branched along a smooth hypersurface of degree `2d`.
pub fn double_cover_pn(n: u32, d: u32) -> Result<FamilyVerdict, FamilyError> {
    if n == 0 || d == 0 || d > n {
        return Err(out_of_range(format!("need 1 <= d <= n, got n={n}, d={d}")));
    }
    single_cover_verdict(
        FanoModel::DoubleCoverOfP { n, d },
        n + 1 < 2 * d,
        format!("condition (n + 1)/2 < d, i.e. {} < {}", n + 1, 2 * d),
    )
}

/// Double cover of the quadric `Q_n` branched along a smooth section of degree `2d`.
pub fn double_cover_quadric(n: u32, d: u32) -> Result<FamilyVerdict, FamilyError> {
    if n < 2 || d == 0 || d >= n {
        return Err(out_of_range(format!("need 1 <= d < n, got n={n}, d={d}")));
    }
    single_cover_verdict(
        FanoModel::DoubleCoverOfQuadric { n, d },
        n < 2 * d,
        format!("condition n/2 < d, i.e. {} < {}", n, 2 * d),
    )
}

/// Hyperelliptic Fano threefolds: double covers of `P^3` branched in a
/// sextic, of `Q^3` branched in a quartic section, and of the cone over
/// the Veronese surface branched in a cubic section. The last one is
/// reported as undecided.
pub fn hyperelliptic_catalog() -> Vec<FamilyVerdict> {
    let a = double_cover_pn(3, 3).expect("in range");
    let b = double_cover_quadric(3, 2).expect("in range");
    let c = FamilyVerdict {
        family: FanoModel::Custom {
            n: 3,
            anticanonical_degree: QClass::from_int(1),
        },
        system: None,
        verdict: Verdict {
            ke_proven: false,
            criterion_used: Criterion::None,
            witness: Default::default(),
            failed: None,
        },
        stated_condition: false,
        note: "double cover of the Veronese cone branched in a cubic section; no criterion applies".into(),
    };
    vec![a, b, c]
}

/// Every in-range entry of the catalog with `n <= max_n`.
pub fn catalog(max_n: u32) -> Vec<FamilyVerdict> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for d in 2..=n + 1 {
            for k in 1..=n + 2 {
                out.push(diagonal_hypersurface(n, d, k).expect("in range"));
            }
        }
        for m in 2..=n + 2 {
            for d in 2..=n + m {
                if (n + m + 1) as i64 - (m * d) as i64 <= 0 {
                    continue;
                }
                for k in 1..=n + m + 1 {
                    out.push(diagonal_complete_intersection(n, m, d, k).expect("in range"));
                }
            }
        }
        if n >= 2 {
            out.push(two_quadrics(n).expect("in range"));
        }
        for d in 1..=n {
            out.push(double_cover_pn(n, d).expect("in range"));
        }
        for d in 1..n {
            out.push(double_cover_quadric(n, d).expect("in range"));
        }
    }
    out
}
