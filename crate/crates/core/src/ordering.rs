//! Detection-order search.
//!
//! The total received power depends on the order in which groups are
//! detected and cancelled. `brute_force_order` evaluates every
//! permutation; `sorted_order` applies the ascending-cancellation-error
//! rule, which is optimal when the groups differ only in their
//! cancellation errors and is one of the evaluated candidates otherwise.

use crate::error::{Error, Result};
use crate::model::{ReceiverKind, SystemModel};
use crate::recursion::total_power;

/// Permutation cap: the search walks all `J!` orders.
pub const MAX_BRUTE_FORCE_GROUPS: usize = 8;

/// Outcome of an order search.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingResult {
    /// Minimizing detection order (`best_order[position] = class label`).
    pub best_order: Vec<usize>,
    /// Total received power under `best_order`.
    pub best_total: f64,
    /// Every evaluated permutation with its total; infeasible orders
    /// carry `f64::INFINITY`. Present in brute-force mode only.
    pub all_totals: Option<Vec<(Vec<usize>, f64)>>,
}

/// Advances `perm` to its lexicographic successor; false once exhausted.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Exhaustive search over all detection orders, minimizing total received
/// power. Ties resolve to the lexicographically smallest permutation.
pub fn brute_force_order(system: &SystemModel, kind: ReceiverKind) -> Result<OrderingResult> {
    let n = system.len();
    if n > MAX_BRUTE_FORCE_GROUPS {
        return Err(Error::TooManyGroups {
            count: n,
            max: MAX_BRUTE_FORCE_GROUPS,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best_order: Option<Vec<usize>> = None;
    let mut best_total = f64::INFINITY;
    let mut all = Vec::new();
    loop {
        let total = total_power(system, &perm, kind).unwrap_or(f64::INFINITY);
        all.push((perm.clone(), total));
        // Lexicographic enumeration plus strict comparison keeps the
        // smallest permutation on exact ties.
        if total < best_total {
            best_total = total;
            best_order = Some(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    match best_order {
        Some(order) => Ok(OrderingResult {
            best_order: order,
            best_total,
            all_totals: Some(all),
        }),
        None => Err(Error::AllInfeasible),
    }
}

/// Class labels sorted by cancellation error, ascending; ties keep the
/// original label order. The group easiest to cancel is detected first.
pub fn sorted_order(system: &SystemModel) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..system.len()).collect();
    labels.sort_by(|&a, &b| {
        system.groups[a]
            .epsilon()
            .total_cmp(&system.groups[b].epsilon())
    });
    labels
}
