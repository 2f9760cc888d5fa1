//! Closed-form recursive power solver.
//!
//! Each group's required power is a fixed multiple of the previous
//! group's, so the whole allocation collapses to the first group's power
//! and a chain of ratios. This route shares no code with the matrix
//! solve in [`crate::feasibility`]; componentwise agreement between the
//! two is the crate's central consistency property.
//!
//! With `margin_i = (1 - alpha_i * lambda_i) / theta_i` in detection
//! order, the ratio from position `i` to `i+1` is
//! `(margin_i + epsilon_i * alpha_i) / (margin_{i+1} + alpha_{i+1})`,
//! and the first power is `sigma2 / d` where `d` subtracts the ratio
//! chain, load-weighted, from `margin_0`.

use crate::error::{Error, Result};
use crate::feasibility::PowerAllocation;
use crate::model::{ReceiverKind, SystemModel};

struct Chain {
    /// Margins, cancellation errors and loads in detection order.
    margin: Vec<f64>,
    epsilon: Vec<f64>,
    alpha: Vec<f64>,
}

fn chain(system: &SystemModel, order: &[usize], kind: ReceiverKind) -> Result<Chain> {
    system.validate_order(order)?;
    let derived = system.derive_all(kind)?;
    let mut margin = Vec::with_capacity(order.len());
    let mut epsilon = Vec::with_capacity(order.len());
    let mut alpha = Vec::with_capacity(order.len());
    for &label in order {
        let d = &derived[label];
        if d.margin <= 0.0 {
            return Err(Error::RecursionInfeasible {
                denominator: d.margin,
                reason: format!("group {label} has nonpositive margin"),
            });
        }
        margin.push(d.margin);
        epsilon.push(d.epsilon);
        alpha.push(system.groups[label].alpha);
    }
    Ok(Chain {
        margin,
        epsilon,
        alpha,
    })
}

/// Ratio of consecutive powers at detection position `i`.
fn step_ratio(c: &Chain, i: usize) -> f64 {
    (c.margin[i] + c.epsilon[i] * c.alpha[i]) / (c.margin[i + 1] + c.alpha[i + 1])
}

/// Solves for the received powers by the ratio recursion.
pub fn solve_powers_recursive(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<PowerAllocation> {
    let c = chain(system, order, kind)?;
    let n = c.margin.len();

    // Running product of step ratios gives Q_i / Q_0; the first-group
    // denominator folds the load-weighted chain back into margin_0.
    let mut relative = Vec::with_capacity(n);
    let mut acc = 1.0_f64;
    relative.push(acc);
    for i in 0..n - 1 {
        acc *= step_ratio(&c, i);
        relative.push(acc);
    }
    let mut d = c.margin[0];
    for (alpha, rel) in c.alpha.iter().zip(&relative).skip(1) {
        d -= alpha * rel;
    }
    if d <= 0.0 {
        return Err(Error::RecursionInfeasible {
            denominator: d,
            reason: "first-group denominator is nonpositive".into(),
        });
    }
    let q1 = system.sigma2 / d;
    let q: Vec<f64> = relative.iter().map(|r| r * q1).collect();
    Ok(PowerAllocation::from_detection_powers(q, system, order))
}

/// Total received power `sum_i alpha_i * Q_i` via the recursion.
pub fn total_power(system: &SystemModel, order: &[usize], kind: ReceiverKind) -> Result<f64> {
    Ok(solve_powers_recursive(system, order, kind)?.total)
}

/// Total received power from the first group alone:
/// `Q_0 * (alpha_0 + margin_0) - sigma2`.
pub fn total_power_from_first(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<f64> {
    let c = chain(system, order, kind)?;
    let q = solve_powers_recursive(system, order, kind)?;
    Ok(q.q[0] * (c.alpha[0] + c.margin[0]) - system.sigma2)
}

/// Total received power evaluated as one closed-form expression, with the
/// ratio chain re-accumulated left to right from scratch.
pub fn total_power_closed_form(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<f64> {
    let c = chain(system, order, kind)?;
    let n = c.margin.len();
    let lead = c.alpha[0] + c.margin[0];
    let mut weighted = 0.0;
    let mut product = 1.0;
    for i in 1..n {
        product *=
            (c.margin[i - 1] + c.epsilon[i - 1] * c.alpha[i - 1]) / (c.margin[i] + c.alpha[i]);
        weighted += c.alpha[i] * product;
    }
    let denom = c.margin[0] / lead - weighted / lead;
    if denom <= 0.0 {
        return Err(Error::RecursionInfeasible {
            denominator: denom,
            reason: "closed-form denominator is nonpositive".into(),
        });
    }
    Ok(system.sigma2 / denom - system.sigma2)
}
