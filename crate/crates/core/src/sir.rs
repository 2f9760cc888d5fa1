//! Independent SIR verification for a power allocation.
//!
//! The solvers in this crate never touch the large-system SIR expression
//! directly; they work with the algebraically reduced power conditions.
//! This module goes the other way: given received powers, it rebuilds the
//! enhanced noise seen by each detection group, solves the multiuser
//! efficiency fixed point, and evaluates the SIR each group actually
//! achieves. If the reduction is right, a solver output must come back
//! with every deviation at numerical zero. That closure is the crate's
//! primary cross-check and is wired into the acceptance suite.

use crate::error::{Error, Result};
use crate::model::{GroupParams, ReceiverKind, SystemModel};

/// Relative convergence tolerance on consecutive fixed-point iterates.
/// Relative because the fixed point scales like the inverse received
/// power: near the feasibility boundary it sits many orders of magnitude
/// below 1 and an absolute cutoff would stop far too early.
pub const BETA_TOL: f64 = 1e-12;
/// Iteration cap for the fixed point.
pub const BETA_MAX_ITER: usize = 10_000;

/// Solution of the multiuser-efficiency fixed point for one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSolution {
    /// The fixed point, in `(0, 1/noise]`.
    pub beta: f64,
    /// Iterations consumed.
    pub iterations: usize,
    /// `|beta - F(beta)|` at termination.
    pub residual: f64,
}

/// Effective white-noise power a detection group sees: background noise
/// plus cancellation residuals of earlier groups plus full power of later
/// groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhancedNoise {
    pub value: f64,
}

/// Enhanced noise for the group at detection position `position`, given
/// received powers `q` in detection order.
pub fn enhanced_noise(
    position: usize,
    q: &[f64],
    system: &SystemModel,
    order: &[usize],
) -> Result<EnhancedNoise> {
    system.validate_order(order)?;
    if q.len() != order.len() || position >= order.len() {
        return Err(Error::InvalidParameter {
            name: "q/position".into(),
            reason: format!(
                "expected {} powers and position < {}, got {} and {}",
                order.len(),
                order.len(),
                q.len(),
                position
            ),
        });
    }
    let mut value = system.sigma2;
    for (l, &label) in order.iter().enumerate() {
        if l == position {
            continue;
        }
        let g = &system.groups[label];
        let weight = if l < position { g.epsilon() } else { 1.0 };
        value += weight * g.alpha * q[l];
    }
    Ok(EnhancedNoise { value })
}

/// One application of the fixed-point map `F` whose root characterizes the
/// multiuser efficiency: with `I(p) = p / (1 + p*beta)` under LMMSE and
/// `I(p) = p` under matched filtering,
/// `F(beta) = 1 / (noise + alpha * ((L-1) * I(q*nu) + I(q*(1+nu))))`.
pub fn beta_map(group: &GroupParams, q: f64, noise: f64, kind: ReceiverKind, beta: f64) -> f64 {
    let nu = group.nu();
    let l = group.paths as f64;
    let interf = |p: f64| match kind {
        ReceiverKind::Lmmse => p / (1.0 + p * beta),
        ReceiverKind::MatchedFilter => p,
    };
    1.0 / (noise + group.alpha * ((l - 1.0) * interf(q * nu) + interf(q * (1.0 + nu))))
}

/// Solves the fixed point by plain iteration from `1/noise`.
///
/// `F` is monotone in `beta` and bounded above by `1/noise`, so the
/// iterates decrease monotonically onto the unique fixed point. Under
/// matched filtering `F` is constant and the loop exits after two steps.
pub fn solve_beta(
    group: &GroupParams,
    q: f64,
    noise: &EnhancedNoise,
    kind: ReceiverKind,
) -> Result<BetaSolution> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter {
            name: "q".into(),
            reason: format!("received power must be finite and > 0, got {q}"),
        });
    }
    if !(noise.value.is_finite() && noise.value > 0.0) {
        return Err(Error::InvalidParameter {
            name: "noise".into(),
            reason: format!("noise must be finite and > 0, got {}", noise.value),
        });
    }
    let mut beta = 1.0 / noise.value;
    for n in 1..=BETA_MAX_ITER {
        let next = beta_map(group, q, noise.value, kind, beta);
        let residual = (next - beta).abs();
        beta = next;
        if residual <= BETA_TOL * beta {
            return Ok(BetaSolution {
                beta,
                iterations: n,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: BETA_MAX_ITER,
        residual: (beta_map(group, q, noise.value, kind, beta) - beta).abs(),
        estimate: beta,
    })
}

/// SIR delivered by received power `q` at multiuser efficiency `beta`
/// under estimation ratio `nu`: `q*beta / (1 + q*nu*beta)`. Estimation
/// self-noise caps this at `1/nu`.
pub fn achieved_sir(q: f64, beta: f64, nu: f64) -> f64 {
    q * beta / (1.0 + q * nu * beta)
}

/// Per-group comparison of achieved SIR against target.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `achieved - target` per group, in detection order.
    pub deviations: Vec<f64>,
    pub max_abs_deviation: f64,
    /// True when `max_abs_deviation <= tol`.
    pub pass: bool,
}

/// Recomputes every group's achieved SIR from scratch and reports the
/// deviation from target.
pub fn verify_allocation(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
    q: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    system.validate_order(order)?;
    let mut deviations = Vec::with_capacity(order.len());
    for (pos, &label) in order.iter().enumerate() {
        let g = &system.groups[label];
        let noise = enhanced_noise(pos, q, system, order)?;
        let beta = solve_beta(g, q[pos], &noise, kind)?;
        let sir = achieved_sir(q[pos], beta.beta, g.nu());
        deviations.push(sir - g.gamma);
    }
    let max_abs_deviation = deviations.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    Ok(VerificationReport {
        pass: max_abs_deviation <= tol,
        deviations,
        max_abs_deviation,
    })
}
