//! Capacity-region membership and boundary tracing.
//!
//! A load vector is in the capacity region when every group's target is
//! reachable and the coupling matrix has spectral radius below 1. For two
//! classes the eigenvalue condition collapses to an explicit formula,
//! which this module implements directly; the generic spectral-radius
//! route stays available as an independent check. Region boundaries are
//! traced by bisection in the class-2 load, valid because membership is
//! monotone decreasing in every load.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasibility::{build_coupling, spectral_radius};
use crate::model::{derive_params, GroupParams, ReceiverKind, SystemModel};

/// System architecture whose capacity region is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchitectureKind {
    /// Groupwise cancellation with LMMSE receivers inside groups.
    GsicLmmse,
    /// Groupwise cancellation with matched filters inside groups.
    GsicMf,
    /// No cancellation at all: matched filters with every group's
    /// interference at full power (residual forced to 1).
    AllMf,
    /// Single LMMSE receiver bank; the high-rate class rides `codes`
    /// parallel codes and counts as `codes` virtual users per real user.
    MulticodeLmmse { codes: u32 },
}

impl ArchitectureKind {
    pub fn label(&self) -> String {
        match self {
            ArchitectureKind::GsicLmmse => "gsic-lmmse".into(),
            ArchitectureKind::GsicMf => "gsic-mf".into(),
            ArchitectureKind::AllMf => "all-mf".into(),
            ArchitectureKind::MulticodeLmmse { codes } => format!("multicode-m{codes}"),
        }
    }
}

/// One boundary point of a two-class region sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSample {
    /// Class-1 load of the sweep point.
    pub alpha1: f64,
    /// Largest class-2 load still inside the region (0 when even the
    /// class-1 load alone is outside).
    pub alpha2_max: f64,
    pub architecture: ArchitectureKind,
    /// Class parameters the sweep was run with (loads ignored).
    pub class1: GroupParams,
    pub class2: GroupParams,
}

/// Two-class membership under GSIC with LMMSE receivers:
/// `a1*L1 + a2*L2 + sqrt(D) < 2` with
/// `D = (a1*L1 + a2*L2)^2 + 4*a1*a2*(t1*t2*e1 - L1*L2)`.
///
/// `D` equals `(a1*L1 - a2*L2)^2 + 4*a1*a2*t1*t2*e1`, hence nonnegative;
/// rounding can still produce a tiny negative value near `e1 = 0`, which
/// is clamped. The loads carried inside `class1`/`class2` are ignored.
pub fn member_two_class_gsic_lmmse(
    alpha1: f64,
    alpha2: f64,
    class1: &GroupParams,
    class2: &GroupParams,
) -> Result<bool> {
    explicit_two_class(alpha1, alpha2, class1, class2, ReceiverKind::Lmmse)
}

/// Two-class membership under GSIC with matched filters: the same
/// formula with the matched-filter dimension costs.
pub fn member_two_class_gsic_mf(
    alpha1: f64,
    alpha2: f64,
    class1: &GroupParams,
    class2: &GroupParams,
) -> Result<bool> {
    explicit_two_class(alpha1, alpha2, class1, class2, ReceiverKind::MatchedFilter)
}

fn explicit_two_class(
    alpha1: f64,
    alpha2: f64,
    class1: &GroupParams,
    class2: &GroupParams,
    kind: ReceiverKind,
) -> Result<bool> {
    check_load(alpha1)?;
    check_load(alpha2)?;
    let d1 = derive_params(class1, kind)?;
    let d2 = derive_params(class2, kind)?;
    let a = alpha1 * d1.lambda(kind);
    let b = alpha2 * d2.lambda(kind);
    let disc = (a + b).powi(2)
        + 4.0
            * alpha1
            * alpha2
            * (d1.theta * d2.theta * class1.epsilon() - d1.lambda(kind) * d2.lambda(kind));
    Ok(a + b + disc.max(0.0).sqrt() < 2.0)
}

/// Membership for the no-cancellation matched-filter system, any number
/// of classes: the matched-filter coupling matrix with every residual
/// forced to 1 must have spectral radius below 1.
pub fn member_all_mf(alphas: &[f64], classes: &[GroupParams]) -> Result<bool> {
    if alphas.len() != classes.len() || classes.is_empty() {
        return Err(Error::InvalidParameter {
            name: "alphas/classes".into(),
            reason: format!(
                "need matching nonempty lists, got {} loads and {} classes",
                alphas.len(),
                classes.len()
            ),
        });
    }
    let mut groups = Vec::with_capacity(classes.len());
    for (&alpha, class) in alphas.iter().zip(classes) {
        check_load(alpha)?;
        groups.push(class.with_alpha(alpha)?.with_epsilon_override(1.0)?);
    }
    let system = SystemModel::new(groups, 1.0)?;
    let order = system.identity_order();
    let coupling = build_coupling(&system, &order, ReceiverKind::MatchedFilter)?;
    Ok(spectral_radius(&coupling)? < 1.0)
}

/// Membership for the multicode LMMSE system: the high-rate class counts
/// `codes`-fold, and the single receiver bank imposes the linear budget
/// `codes*a1*L1 + a2*L2 < 1` with LMMSE dimension costs.
pub fn member_multicode(
    alpha1: f64,
    alpha2: f64,
    codes: u32,
    class1: &GroupParams,
    class2: &GroupParams,
) -> Result<bool> {
    if codes < 1 {
        return Err(Error::InvalidParameter {
            name: "codes".into(),
            reason: "need at least one code".into(),
        });
    }
    check_load(alpha1)?;
    check_load(alpha2)?;
    let d1 = derive_params(class1, ReceiverKind::Lmmse)?;
    let d2 = derive_params(class2, ReceiverKind::Lmmse)?;
    Ok(codes as f64 * alpha1 * d1.lambda_lmmse + alpha2 * d2.lambda_lmmse < 1.0)
}

/// Membership dispatch for any architecture at a two-class point.
pub fn member(
    architecture: ArchitectureKind,
    alpha1: f64,
    alpha2: f64,
    class1: &GroupParams,
    class2: &GroupParams,
) -> Result<bool> {
    match architecture {
        ArchitectureKind::GsicLmmse => member_two_class_gsic_lmmse(alpha1, alpha2, class1, class2),
        ArchitectureKind::GsicMf => member_two_class_gsic_mf(alpha1, alpha2, class1, class2),
        ArchitectureKind::AllMf => {
            member_all_mf(&[alpha1, alpha2], &[class1.clone(), class2.clone()])
        }
        ArchitectureKind::MulticodeLmmse { codes } => {
            member_multicode(alpha1, alpha2, codes, class1, class2)
        }
    }
}

/// Traces the region boundary over a strictly increasing class-1 load
/// grid: for each grid point, bisects the largest member class-2 load to
/// within `bisect_tol`. Grid points are independent and evaluated in
/// parallel; the output is sorted by `alpha1`.
pub fn trace_boundary(
    architecture: ArchitectureKind,
    grid: &[f64],
    class1: &GroupParams,
    class2: &GroupParams,
    bisect_tol: f64,
) -> Result<Vec<RegionSample>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            reason: "need at least one sweep point".into(),
        });
    }
    for w in grid.windows(2) {
        // partial_cmp is None for NaN, which must also be rejected.
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidParameter {
                name: "grid".into(),
                reason: format!(
                    "sweep values must strictly increase, got {} then {}",
                    w[0], w[1]
                ),
            });
        }
    }
    check_load(grid[0])?;
    if !(bisect_tol.is_finite() && bisect_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bisect_tol".into(),
            reason: format!("must be finite and > 0, got {bisect_tol}"),
        });
    }

    // Upper bracket: once alpha2 * lambda2 reaches 1, no architecture
    // admits the point, so the class-2 single-class bound plus margin is
    // always on the outside.
    let kind2 = match architecture {
        ArchitectureKind::GsicMf | ArchitectureKind::AllMf => ReceiverKind::MatchedFilter,
        _ => ReceiverKind::Lmmse,
    };
    let cap = 1.0 / derive_params(class2, kind2)?.lambda(kind2) + 0.01;

    let mut samples = grid
        .par_iter()
        .map(|&alpha1| {
            let sample = |alpha2_max: f64| RegionSample {
                alpha1,
                alpha2_max,
                architecture,
                class1: class1.clone(),
                class2: class2.clone(),
            };
            if !member(architecture, alpha1, 0.0, class1, class2)? {
                return Ok(sample(0.0));
            }
            let mut lo = 0.0_f64;
            let mut hi = cap;
            while hi - lo > bisect_tol {
                let mid = 0.5 * (lo + hi);
                if member(architecture, alpha1, mid, class1, class2)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(sample(lo))
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.alpha1.total_cmp(&b.alpha1));
    Ok(samples)
}

fn check_load(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha".into(),
            reason: format!("load must be finite and >= 0, got {alpha}"),
        })
    }
}
