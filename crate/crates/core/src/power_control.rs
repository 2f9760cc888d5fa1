//! Distributed iterative power control.
//!
//! Each group repeatedly sets its power to the minimum that meets its
//! target SIR given everyone else's current power. That update map is a
//! standard interference function (positive, monotone, scalable), so on
//! feasible instances the iteration converges to the minimal power vector
//! from any starting point, under synchronous and asynchronous schedules
//! alike. That limit is the solvers' fixed point, reached without any
//! matrix assembly.

use crate::error::{Error, Result};
use crate::model::{ReceiverKind, SystemModel};

/// Iterates are declared divergent once any component exceeds
/// `DIVERGENCE_CAP_FACTOR * sigma2`.
pub const DIVERGENCE_CAP_FACTOR: f64 = 1e12;

/// Which groups update at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateSchedule {
    /// All groups update together from the previous iterate.
    Synchronous,
    /// One group per step, cycling through detection positions.
    RoundRobin,
    /// One uniformly chosen group per step; fully determined by the seed.
    RandomAsync { seed: u64 },
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationOutcome {
    Converged,
    Diverged,
    MaxIterations,
}

/// One recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// Step index, starting at 1.
    pub iter: usize,
    /// Powers after the step, in detection order.
    pub q: Vec<f64>,
    /// Relative change of this step: over all components for synchronous
    /// updates, of the single updated component otherwise.
    pub max_rel_change: f64,
}

/// Full iteration history.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
    pub outcome: IterationOutcome,
    pub final_q: Vec<f64>,
}

/// SplitMix64: the 64-bit mixing generator from Steele, Lea and Flood's
/// "Fast splittable pseudorandom number generators"; tiny, seedable and
/// reproducible, which is all the async schedule needs.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in `0..n` by the widening-multiply reduction.
    fn next_below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

/// The minimum power for each group that meets its target SIR given the
/// other groups' powers `q` (detection order):
/// `theta_j * (sigma2 + residual + uncancelled) / (1 - alpha_j * lambda_j)`.
///
/// Its unique fixed point is the minimal power allocation.
pub fn interference_function(
    q: &[f64],
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<Vec<f64>> {
    system.validate_order(order)?;
    if q.len() != order.len() {
        return Err(Error::InvalidParameter {
            name: "q".into(),
            reason: format!("expected {} powers, got {}", order.len(), q.len()),
        });
    }
    let derived = system.derive_all(kind)?;
    let mut out = Vec::with_capacity(order.len());
    for (j, &label) in order.iter().enumerate() {
        out.push(update_component(
            q, system, order, &derived, kind, j, label,
        )?);
    }
    Ok(out)
}

fn update_component(
    q: &[f64],
    system: &SystemModel,
    order: &[usize],
    derived: &[crate::model::DerivedParams],
    kind: ReceiverKind,
    position: usize,
    label: usize,
) -> Result<f64> {
    let d = &derived[label];
    let own = system.groups[label].alpha * d.lambda(kind);
    if own >= 1.0 {
        return Err(Error::DegenerateGroup {
            group: label,
            load: own,
        });
    }
    let mut noise = system.sigma2;
    for (l, &other) in order.iter().enumerate() {
        if l == position {
            continue;
        }
        let g = &system.groups[other];
        let weight = if l < position { g.epsilon() } else { 1.0 };
        noise += weight * g.alpha * q[l];
    }
    Ok(d.theta * noise / (1.0 - own))
}

/// Runs the power-control iteration from `q0` until the relative change
/// falls below `tol`, a component passes the divergence cap, or
/// `max_iter` steps elapse.
///
/// Asynchronous schedules update one group per step, so their convergence
/// check looks at a sliding window of the last `J` single-component
/// changes: the window must be quiet and touch every position. The
/// coverage requirement matters for the random schedule: the update is a
/// direct best response, so re-updating the same group twice in a row
/// yields a zero change that says nothing about the others.
pub fn run_power_control(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
    q0: &[f64],
    schedule: UpdateSchedule,
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace> {
    system.validate_order(order)?;
    let n = order.len();
    if q0.len() != n {
        return Err(Error::InvalidParameter {
            name: "q0".into(),
            reason: format!("expected {} initial powers, got {}", n, q0.len()),
        });
    }
    if q0.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "q0".into(),
            reason: "initial powers must be finite and >= 0".into(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol".into(),
            reason: format!("tolerance must be finite and > 0, got {tol}"),
        });
    }
    let derived = system.derive_all(kind)?;
    let cap = DIVERGENCE_CAP_FACTOR * system.sigma2;
    let mut rng = match schedule {
        UpdateSchedule::RandomAsync { seed } => Some(SplitMix64::new(seed)),
        _ => None,
    };

    let mut q = q0.to_vec();
    let mut rows = Vec::new();
    // Last J (position, change) pairs for the async window test.
    let mut window: Vec<(usize, f64)> = Vec::with_capacity(n);
    let mut outcome = IterationOutcome::MaxIterations;

    for step in 1..=max_iter {
        let change = match schedule {
            UpdateSchedule::Synchronous => {
                let next = interference_function(&q, system, order, kind)?;
                let mut max_change = 0.0_f64;
                for (old, new) in q.iter().zip(&next) {
                    max_change = max_change.max(rel_change(*old, *new));
                }
                q = next;
                max_change
            }
            UpdateSchedule::RoundRobin | UpdateSchedule::RandomAsync { .. } => {
                let position = match rng.as_mut() {
                    Some(r) => r.next_below(n),
                    None => (step - 1) % n,
                };
                let new =
                    update_component(&q, system, order, &derived, kind, position, order[position])?;
                let change = rel_change(q[position], new);
                q[position] = new;
                window.push((position, change));
                if window.len() > n {
                    window.remove(0);
                }
                change
            }
        };
        rows.push(TraceRow {
            iter: step,
            q: q.clone(),
            max_rel_change: change,
        });

        if q.iter().any(|&v| v > cap) {
            outcome = IterationOutcome::Diverged;
            break;
        }

        let converged = match schedule {
            UpdateSchedule::Synchronous => change <= tol,
            _ => {
                window.len() == n
                    && window.iter().all(|&(_, c)| c <= tol)
                    && (0..n).all(|p| window.iter().any(|&(wp, _)| wp == p))
            }
        };
        if converged {
            outcome = IterationOutcome::Converged;
            break;
        }
    }

    Ok(IterationTrace {
        final_q: q,
        rows,
        outcome,
    })
}

fn rel_change(old: f64, new: f64) -> f64 {
    if new == 0.0 {
        if old == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (new - old).abs() / new.abs()
    }
}
