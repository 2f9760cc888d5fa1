//! Shared random-instance generation for the integration suites.

use rand::{rngs::StdRng, Rng, SeedableRng};

use gsic_core::{
    check_feasibility, derive_params, solve_powers, GroupParams, ReceiverKind, SystemModel,
};

pub struct Instance {
    pub system: SystemModel,
    pub order: Vec<usize>,
    pub kind: ReceiverKind,
}

/// One class with target in [1, 20], per-path error variance in [0, 0.02],
/// 1-4 paths, and load uniform in [0, load_scale / lambda].
pub fn random_group(rng: &mut StdRng, kind: ReceiverKind, load_scale: f64) -> GroupParams {
    let gamma = rng.random_range(1.0..=20.0);
    let xi2 = rng.random_range(0.0..=0.02);
    let paths = rng.random_range(1..=4u32);
    let shell = GroupParams::new(0.0, gamma, 1.0, xi2, paths).expect("valid shell");
    let lambda = derive_params(&shell, kind)
        .expect("gamma < 1/nu in range")
        .lambda(kind);
    let alpha = rng.random_range(0.0..=1.0) * load_scale / lambda;
    GroupParams::new(alpha, gamma, 1.0, xi2, paths).expect("valid group")
}

pub fn random_order(rng: &mut StdRng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    order
}

/// Draws random instances with per-group loads in `[0, load_scale/lambda]`,
/// keeping those whose spectral radius falls in `rho_range` and which the
/// direct solver accepts (when `rho_range` ends below 1).
pub fn random_instances(
    seed: u64,
    count: usize,
    load_scale: f64,
    rho_range: std::ops::Range<f64>,
) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 400_000,
            "instance generation stalled after {} accepted",
            out.len()
        );
        let j = rng.random_range(1..=6usize);
        let kind = if rng.random_range(0..2) == 0 {
            ReceiverKind::Lmmse
        } else {
            ReceiverKind::MatchedFilter
        };
        let groups: Vec<GroupParams> = (0..j)
            .map(|_| random_group(&mut rng, kind, load_scale))
            .collect();
        let system = match SystemModel::new(groups, 1.0) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let order = random_order(&mut rng, j);
        let report = match check_feasibility(&system, &order, kind) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let rho = match report.spectral_radius {
            Some(r) => r,
            None => continue,
        };
        if !rho_range.contains(&rho) {
            continue;
        }
        if rho_range.end <= 1.0 && solve_powers(&system, &order, kind).is_err() {
            continue;
        }
        out.push(Instance {
            system,
            order,
            kind,
        });
    }
    out
}
