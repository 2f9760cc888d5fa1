//! Property tests for the model algebra and region structure.

use proptest::prelude::*;

use gsic_core::{
    check_feasibility, derive_params, member_two_class_gsic_lmmse, member_two_class_gsic_mf,
    solve_powers_recursive, sorted_order, GroupParams, ReceiverKind, SystemModel,
};

/// Parameters with a reachable target: gamma strictly below 1/nu.
fn valid_class() -> impl Strategy<Value = GroupParams> {
    (1u32..=6, 0.01f64..=30.0, 0.5f64..=2.0, 0.0f64..=0.05).prop_filter_map(
        "target must stay below the estimation cap",
        |(paths, gamma, hbar2, xi2)| {
            let g = GroupParams::new(0.0, gamma, hbar2, xi2, paths).ok()?;
            (g.nu() * gamma < 0.999).then_some(g)
        },
    )
}

proptest! {
    // The matched filter never beats LMMSE on per-user dimension cost.
    #[test]
    fn lmmse_cost_strictly_below_mf(class in valid_class()) {
        let d = derive_params(&class, ReceiverKind::Lmmse).unwrap();
        prop_assert!(d.lambda_lmmse < d.lambda_mf);
    }

    // Dimension cost grows with estimation error, target and path count.
    #[test]
    fn lambda_monotone_in_parameters(class in valid_class()) {
        let d = derive_params(&class, ReceiverKind::Lmmse).unwrap();

        let mut noisier = class.clone();
        noisier.xi2 += 0.002;
        if noisier.nu() * noisier.gamma < 0.999 {
            let dn = derive_params(&noisier, ReceiverKind::Lmmse).unwrap();
            prop_assert!(dn.lambda_lmmse > d.lambda_lmmse);
        }

        let mut greedier = class.clone();
        greedier.gamma += 0.5;
        if greedier.nu() * greedier.gamma < 0.999 {
            let dg = derive_params(&greedier, ReceiverKind::Lmmse).unwrap();
            prop_assert!(dg.lambda_lmmse > d.lambda_lmmse);
        }

        if class.xi2 > 0.0 {
            let mut longer = class.clone();
            longer.paths += 1;
            let dl = derive_params(&longer, ReceiverKind::Lmmse).unwrap();
            prop_assert!(dl.lambda_lmmse > d.lambda_lmmse);
        }
    }

    // With perfect estimation the LMMSE cost collapses to gamma/(1+gamma),
    // which stays below one dimension per user.
    #[test]
    fn perfect_estimation_cost(gamma in 0.01f64..=50.0, paths in 1u32..=6) {
        let g = GroupParams::new(0.0, gamma, 1.0, 0.0, paths).unwrap();
        let d = derive_params(&g, ReceiverKind::Lmmse).unwrap();
        prop_assert!((d.lambda_lmmse - gamma / (1.0 + gamma)).abs() <= 1e-15 * d.lambda_lmmse.max(1.0));
        prop_assert!(d.lambda_lmmse < 1.0);
        prop_assert!(d.epsilon == 0.0);
    }

    // The derived cancellation error is sqrt(paths * xi2) capped at 1.
    #[test]
    fn epsilon_formula(xi2 in 0.0f64..=1.5, paths in 1u32..=6) {
        let g = GroupParams::new(0.0, 1.0, 2.0, xi2, paths).unwrap();
        let raw = (paths as f64 * xi2).sqrt();
        prop_assert_eq!(g.epsilon(), raw.min(1.0));
    }

    // The per-group reachability flags ignore the detection order.
    #[test]
    fn sir_flags_order_invariant(
        classes in prop::collection::vec(valid_class(), 2..=5),
        seed in 0u64..1000,
    ) {
        let n = classes.len();
        let groups: Vec<GroupParams> = classes
            .iter()
            .map(|c| c.with_alpha(0.01).unwrap())
            .collect();
        let sys = SystemModel::new(groups, 1.0).unwrap();
        let identity: Vec<usize> = (0..n).collect();
        let mut shuffled = identity.clone();
        // Cheap deterministic shuffle.
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(31).wrapping_add(i * 7) % (i + 1));
        }
        let a = check_feasibility(&sys, &identity, ReceiverKind::Lmmse).unwrap();
        let b = check_feasibility(&sys, &shuffled, ReceiverKind::Lmmse).unwrap();
        prop_assert_eq!(a.per_group_sir_ok, b.per_group_sir_ok);
    }

    // Growing the estimation error never enlarges the two-class region.
    #[test]
    fn region_shrinks_with_estimation_error(
        gamma in 1.0f64..=15.0,
        xi2_low in 0.0f64..=0.005,
        bump in 0.0001f64..=0.01,
        a1 in 0.0f64..=1.0,
        a2 in 0.0f64..=1.0,
    ) {
        let lo = GroupParams::new(0.0, gamma, 1.0, xi2_low, 3).unwrap();
        let hi = GroupParams::new(0.0, gamma, 1.0, xi2_low + bump, 3).unwrap();
        if member_two_class_gsic_lmmse(a1, a2, &hi, &hi).unwrap() {
            prop_assert!(member_two_class_gsic_lmmse(a1, a2, &lo, &lo).unwrap());
        }
    }

    // Matched-filter membership implies LMMSE membership pointwise.
    #[test]
    fn mf_region_inside_lmmse_region(
        c1 in valid_class(),
        c2 in valid_class(),
        a1 in 0.0f64..=0.5,
        a2 in 0.0f64..=0.5,
    ) {
        if member_two_class_gsic_mf(a1, a2, &c1, &c2).unwrap() {
            prop_assert!(member_two_class_gsic_lmmse(a1, a2, &c1, &c2).unwrap());
        }
    }

    // sorted_order always returns a permutation sorted by epsilon.
    #[test]
    fn sorted_order_is_a_sorted_permutation(
        eps in prop::collection::vec(0.0f64..=1.0, 1..=8),
    ) {
        let groups: Vec<GroupParams> = eps
            .iter()
            .map(|&e| {
                GroupParams::new(0.1, 5.0, 1.0, 0.0, 2)
                    .unwrap()
                    .with_epsilon_override(e)
                    .unwrap()
            })
            .collect();
        let n = groups.len();
        let sys = SystemModel::new(groups, 1.0).unwrap();
        let order = sorted_order(&sys);
        let mut seen = order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        for w in order.windows(2) {
            prop_assert!(eps[w[0]] <= eps[w[1]]);
        }
    }

    // Received powers from the recursive route scale linearly in the
    // background noise.
    #[test]
    fn recursive_solve_scales_with_noise(scale in 0.1f64..=10.0) {
        let mk = |sigma2: f64| SystemModel::new(
            vec![
                GroupParams::new(0.1, 6.0, 1.0, 0.002, 3).unwrap(),
                GroupParams::new(0.08, 4.0, 1.0, 0.004, 2).unwrap(),
            ],
            sigma2,
        ).unwrap();
        let base = solve_powers_recursive(&mk(1.0), &[0, 1], ReceiverKind::Lmmse).unwrap();
        let scaled = solve_powers_recursive(&mk(scale), &[0, 1], ReceiverKind::Lmmse).unwrap();
        for (b, s) in base.q.iter().zip(&scaled.q) {
            prop_assert!((s - scale * b).abs() <= 1e-12 * s.abs());
        }
    }
}
