//! Deterministic text and CSV emission. Floats go through Rust's shortest
//! round-trip formatting, lines end in LF, and identical inputs produce
//! byte-identical files.

use std::fmt::Write as _;

use gsic_core::{IterationTrace, PowerAllocation, RegionSample, SystemModel};

/// Powers table: one row per group in detection order, received power and
/// the transmit power that produces it through unit path loss, both in
/// noise-normalized units.
pub fn powers_csv(alloc: &PowerAllocation, system: &SystemModel, order: &[usize]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sigma2={}", system.sigma2);
    out.push_str("group,Q,transmit_equivalent\n");
    for (pos, &label) in order.iter().enumerate() {
        let normalized = alloc.q[pos] / system.sigma2;
        let transmit = normalized / system.groups[label].hbar2;
        let _ = writeln!(out, "{label},{normalized},{transmit}");
    }
    out
}

/// Iteration trace: one row per step with the full normalized power vector.
pub fn trace_csv(trace: &IterationTrace, system: &SystemModel) -> String {
    let n = system.len();
    let mut out = String::new();
    let _ = writeln!(out, "# sigma2={}", system.sigma2);
    out.push_str("iter");
    for j in 1..=n {
        let _ = write!(out, ",Q_{j}");
    }
    out.push_str(",max_rel_change\n");
    for row in &trace.rows {
        let _ = write!(out, "{}", row.iter);
        for q in &row.q {
            let _ = write!(out, ",{}", q / system.sigma2);
        }
        let _ = writeln!(out, ",{}", row.max_rel_change);
    }
    out
}

/// Region boundary samples.
pub fn region_csv(samples: &[RegionSample]) -> String {
    let mut out = String::from("alpha1,alpha2_max\n");
    for s in samples {
        let _ = writeln!(out, "{},{}", s.alpha1, s.alpha2_max);
    }
    out
}

/// Figure dataset: several labelled boundary curves in one file.
pub fn figure_csv(curves: &[(String, f64, Vec<RegionSample>)]) -> String {
    let mut out = String::from("arch,xi2,alpha1,alpha2_max\n");
    for (arch, xi2, samples) in curves {
        for s in samples {
            let _ = writeln!(out, "{arch},{xi2},{},{}", s.alpha1, s.alpha2_max);
        }
    }
    out
}

/// All brute-force permutation totals, best first left to the caller.
pub fn order_csv(all: &[(Vec<usize>, f64)]) -> String {
    let mut out = String::from("order,Q_T\n");
    for (perm, total) in all {
        let labels: Vec<String> = perm.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "{},{}", labels.join("-"), total);
    }
    out
}
