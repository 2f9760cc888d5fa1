//! Feasibility test and optimal power allocation via the coupling matrix.
//!
//! Requiring every class to meet its target SIR with equality turns the
//! per-group power conditions into a linear system `(I - A) q = sigma2 * u`
//! over the received powers, where `A` is nonnegative and laid out in
//! detection order: a group sees already-detected groups only through
//! their cancellation residuals (`epsilon` factors below the diagonal)
//! and not-yet-detected groups at full power (above the diagonal).
//!
//! A positive solution exists iff every per-group target is reachable
//! (`gamma < 1/nu`) and the spectral radius of `A` is below 1; when it
//! exists it is the componentwise-minimal power allocation.

use crate::error::{Error, Result};
use crate::model::{ReceiverKind, SystemModel};

/// Spectral-radius tolerance: the Collatz-Wielandt bracket is tightened
/// until its width falls below this.
pub const SPECTRAL_TOL: f64 = 1e-12;
/// Iteration cap for the power method.
pub const SPECTRAL_MAX_ITER: usize = 100_000;
/// `solve_powers` refuses instances with `1 - rho(A)` below this margin;
/// the linear system is too ill-conditioned to trust.
pub const SINGULAR_MARGIN: f64 = 1e-9;
/// Group-count cap for the dense direct solve.
pub const MAX_GROUPS: usize = 16;

/// The coupling matrix `A` and target vector `u` of the power-control
/// system, laid out in detection order (row/column 0 = first detected).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    /// Row-major `J x J` nonnegative matrix.
    pub a: Vec<Vec<f64>>,
    /// Effective targets `u[j] = theta_j`, all positive.
    pub u: Vec<f64>,
    /// `order[position] = class label` detected at that position.
    pub order: Vec<usize>,
}

impl CouplingMatrix {
    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// Outcome of the two-part feasibility test.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `gamma < 1/nu` per class, indexed by class label.
    pub per_group_sir_ok: Vec<bool>,
    /// `rho(A)`; `None` when some per-group target is unreachable and the
    /// coupling matrix is undefined.
    pub spectral_radius: Option<f64>,
    /// True iff all per-group flags hold and `rho(A) < 1`.
    pub feasible: bool,
}

/// A received-power allocation, indexed by detection position.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// Received power per group, in detection order. Scales linearly
    /// with `sigma2`.
    pub q: Vec<f64>,
    /// Load-weighted total `sum_j alpha_j * q_j`.
    pub total: f64,
}

impl PowerAllocation {
    pub fn from_detection_powers(q: Vec<f64>, system: &SystemModel, order: &[usize]) -> Self {
        let total = q
            .iter()
            .zip(order)
            .map(|(&qi, &label)| system.groups[label].alpha * qi)
            .sum();
        PowerAllocation { q, total }
    }
}

/// Builds the coupling matrix for a detection order.
///
/// Row `j` (detection position) couples to position `l` with
/// `epsilon_l * alpha_l * theta_j` when `l` was detected earlier,
/// `theta_j * alpha_l` when `l` comes later, and `alpha_j * lambda_j`
/// on the diagonal.
pub fn build_coupling(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<CouplingMatrix> {
    system.validate_order(order)?;
    let derived = system.derive_all(kind)?;
    let n = order.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut u = vec![0.0; n];
    for j in 0..n {
        let dj = &derived[order[j]];
        u[j] = dj.theta;
        for l in 0..n {
            let gl = &system.groups[order[l]];
            let dl = &derived[order[l]];
            a[j][l] = match l.cmp(&j) {
                std::cmp::Ordering::Less => dl.epsilon * gl.alpha * dj.theta,
                std::cmp::Ordering::Equal => gl.alpha * dj.lambda(kind),
                std::cmp::Ordering::Greater => dj.theta * gl.alpha,
            };
        }
    }
    Ok(CouplingMatrix {
        a,
        u,
        order: order.to_vec(),
    })
}

/// Perron root of the nonnegative coupling matrix.
///
/// The matrix is first split into strongly connected components; the
/// spectral radius is the maximum of the component Perron roots, each
/// obtained by power iteration with Collatz-Wielandt bracketing (the
/// bracket encloses the root from both sides, so the returned midpoint
/// carries a certified error bound). The decomposition matters: with
/// perfect cancellation the matrix is reducible and plain power iteration
/// on the whole matrix stalls at harmonic rate, while every nontrivial
/// component here has a positive diagonal and therefore converges
/// geometrically.
pub fn spectral_radius(m: &CouplingMatrix) -> Result<f64> {
    spectral_radius_of(&m.a)
}

/// Spectral radius of an arbitrary nonnegative square matrix.
pub fn spectral_radius_of(a: &[Vec<f64>]) -> Result<f64> {
    let n = a.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidParameter {
                name: "a".into(),
                reason: format!("row {i} has length {} in a {n}x{n} matrix", row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "a".into(),
                    reason: format!("entry ({i},{j}) = {v} is not a finite nonnegative value"),
                });
            }
        }
    }
    if n == 0 {
        return Ok(0.0);
    }

    let mut rho: f64 = 0.0;
    for block in strongly_connected_components(a) {
        let r = match block.len() {
            1 => a[block[0]][block[0]],
            _ => perron_root(a, &block)?,
        };
        rho = rho.max(r);
    }
    Ok(rho)
}

/// Mutual-reachability classes of the nonzero pattern, via transitive
/// closure (the matrix is at most 16x16, so the cubic pass is free).
fn strongly_connected_components(a: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = a.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = true;
        for j in 0..n {
            if a[i][j] > 0.0 {
                reach[i][j] = true;
            }
        }
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (dst, &src) in row.iter_mut().zip(&via) {
                    *dst = *dst || src;
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut components = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut comp = Vec::new();
        for j in 0..n {
            if reach[i][j] && reach[j][i] && !assigned[j] {
                assigned[j] = true;
                comp.push(j);
            }
        }
        components.push(comp);
    }
    components
}

/// Power iteration on one irreducible diagonal block.
fn perron_root(a: &[Vec<f64>], block: &[usize]) -> Result<f64> {
    let n = block.len();
    let mut v = vec![1.0_f64; n];
    let mut best = 0.0;
    let mut width = f64::INFINITY;
    for _ in 0..SPECTRAL_MAX_ITER {
        let mut w = vec![0.0_f64; n];
        for (wi, &i) in w.iter_mut().zip(block) {
            let mut acc = 0.0;
            for (&j, vj) in block.iter().zip(&v) {
                acc += a[i][j] * vj;
            }
            *wi = acc;
        }
        // Collatz-Wielandt: min and max of w_i / v_i bracket the root.
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for (wi, vi) in w.iter().zip(&v) {
            let r = wi / vi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        best = 0.5 * (lo + hi);
        width = hi - lo;
        if width <= SPECTRAL_TOL * hi.max(1.0) {
            return Ok(best);
        }
        if hi == 0.0 {
            return Ok(0.0);
        }
        let scale = 1.0 / w.iter().cloned().fold(0.0_f64, f64::max);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi * scale;
        }
    }
    Err(Error::NonConvergence {
        iterations: SPECTRAL_MAX_ITER,
        residual: width,
        estimate: best,
    })
}

/// Evaluates both feasibility conditions: per-group target reachability
/// and the spectral-radius bound. Infeasibility is a report outcome,
/// never an error.
pub fn check_feasibility(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<FeasibilityReport> {
    system.validate_order(order)?;
    let per_group_sir_ok: Vec<bool> = system
        .groups
        .iter()
        .map(|g| g.nu() * g.gamma < 1.0)
        .collect();
    if per_group_sir_ok.iter().any(|ok| !ok) {
        return Ok(FeasibilityReport {
            per_group_sir_ok,
            spectral_radius: None,
            feasible: false,
        });
    }
    let coupling = build_coupling(system, order, kind)?;
    let rho = spectral_radius(&coupling)?;
    Ok(FeasibilityReport {
        per_group_sir_ok,
        spectral_radius: Some(rho),
        feasible: rho < 1.0,
    })
}

/// Solves `(I - A) q = sigma2 * u` for the minimal positive power vector.
pub fn solve_powers(
    system: &SystemModel,
    order: &[usize],
    kind: ReceiverKind,
) -> Result<PowerAllocation> {
    let n = system.len();
    if n > MAX_GROUPS {
        return Err(Error::TooManyGroups {
            count: n,
            max: MAX_GROUPS,
        });
    }
    let report = check_feasibility(system, order, kind)?;
    if !report.feasible {
        let reason = match report.spectral_radius {
            Some(rho) => format!("spectral radius {rho} >= 1"),
            None => "a group's target SIR exceeds its estimation cap".to_string(),
        };
        return Err(Error::InfeasibleSystem { reason });
    }
    let rho = report
        .spectral_radius
        .expect("feasible implies rho computed");
    if 1.0 - rho < SINGULAR_MARGIN {
        return Err(Error::SingularSystem {
            rho,
            margin: SINGULAR_MARGIN,
        });
    }

    let coupling = build_coupling(system, order, kind)?;
    let mut mat = vec![vec![0.0_f64; n + 1]; n];
    for (i, row) in mat.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().take(n).enumerate() {
            *cell = if i == j {
                1.0 - coupling.a[i][j]
            } else {
                -coupling.a[i][j]
            };
        }
        row[n] = system.sigma2 * coupling.u[i];
    }
    let q = gaussian_solve(&mut mat)?;
    Ok(PowerAllocation::from_detection_powers(q, system, order))
}

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)`
/// system, in place.
fn gaussian_solve(mat: &mut [Vec<f64>]) -> Result<Vec<f64>> {
    let n = mat.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
            .expect("nonempty range");
        if mat[pivot][col].abs() == 0.0 {
            return Err(Error::SingularSystem {
                rho: f64::NAN,
                margin: SINGULAR_MARGIN,
            });
        }
        mat.swap(col, pivot);
        let (upper, lower) = mat.split_at_mut(col + 1);
        let lead = &upper[col];
        for row in lower.iter_mut() {
            let factor = row[col] / lead[col];
            if factor == 0.0 {
                continue;
            }
            for (dst, src) in row[col..=n].iter_mut().zip(&lead[col..=n]) {
                *dst -= factor * src;
            }
        }
    }
    let mut x = vec![0.0_f64; n];
    for row in (0..n).rev() {
        let mut acc = mat[row][n];
        for col in row + 1..n {
            acc -= mat[row][col] * x[col];
        }
        x[row] = acc / mat[row][row];
    }
    Ok(x)
}
