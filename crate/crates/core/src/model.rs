//! System model for a groupwise successive interference cancellation (GSIC)
//! cell: user classes, channel-estimation statistics, and the per-group
//! derived quantities every solver consumes.
//!
//! A class `j` is described by its load `alpha = K/N` (users per dimension),
//! target SIR `gamma`, estimated average power gain `hbar2 = sum_l |h_l|^2`
//! over `paths` resolvable multipath components, and per-path estimation
//! error variance `xi2`. Imperfect estimation shows up twice: it caps the
//! achievable SIR at `1/nu` (`nu = xi2/hbar2`) and it leaves a fractional
//! residual `epsilon = sqrt(paths * xi2)` when a detected group is
//! subtracted from the received signal.

use crate::error::{Error, Result};

/// Receiver used inside each detection group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverKind {
    /// Linear MMSE multiuser detection within the group.
    Lmmse,
    /// Plain matched filtering within the group.
    MatchedFilter,
}

/// Parameters of one user class.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupParams {
    /// Load: users per dimension, `K/N`.
    pub alpha: f64,
    /// Target SIR (linear scale).
    pub gamma: f64,
    /// Estimated average power gain aggregated over all paths.
    pub hbar2: f64,
    /// Per-path channel-estimation error variance.
    pub xi2: f64,
    /// Number of resolvable multipath components.
    pub paths: u32,
    /// Optional cancellation error in `[0, 1]`; when absent the error is
    /// derived from the estimation statistics.
    pub epsilon_override: Option<f64>,
}

impl GroupParams {
    pub fn new(alpha: f64, gamma: f64, hbar2: f64, xi2: f64, paths: u32) -> Result<Self> {
        let g = GroupParams {
            alpha,
            gamma,
            hbar2,
            xi2,
            paths,
            epsilon_override: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Replaces the derived cancellation error with an explicit value.
    pub fn with_epsilon_override(mut self, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon_override".into(),
                reason: format!("must lie in [0, 1], got {epsilon}"),
            });
        }
        self.epsilon_override = Some(epsilon);
        Ok(self)
    }

    /// Returns a copy with the load replaced (used by region sweeps).
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let mut g = self.clone();
        g.alpha = alpha;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name: &str, reason: String| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: name.into(),
                    reason,
                })
            }
        };
        check(
            self.alpha.is_finite() && self.alpha >= 0.0,
            "alpha",
            format!("load must be finite and >= 0, got {}", self.alpha),
        )?;
        check(
            self.gamma.is_finite() && self.gamma > 0.0,
            "gamma",
            format!("target SIR must be finite and > 0, got {}", self.gamma),
        )?;
        check(
            self.hbar2.is_finite() && self.hbar2 > 0.0,
            "hbar2",
            format!(
                "average power gain must be finite and > 0, got {}",
                self.hbar2
            ),
        )?;
        check(
            self.xi2.is_finite() && self.xi2 >= 0.0,
            "xi2",
            format!("error variance must be finite and >= 0, got {}", self.xi2),
        )?;
        check(
            self.paths >= 1,
            "paths",
            format!("need >= 1 path, got {}", self.paths),
        )?;
        if let Some(e) = self.epsilon_override {
            check(
                e.is_finite() && (0.0..=1.0).contains(&e),
                "epsilon_override",
                format!("must lie in [0, 1], got {e}"),
            )?;
        }
        Ok(())
    }

    /// Estimation-to-signal ratio `nu = xi2 / hbar2`. Caps the achievable
    /// SIR at `1/nu`.
    pub fn nu(&self) -> f64 {
        self.xi2 / self.hbar2
    }

    /// Fractional residual power after cancelling this group: the override
    /// when present, otherwise `sqrt(paths * xi2)` clamped to `[0, 1]`.
    ///
    /// The clamp matters: a residual above 1 would mean cancellation adds
    /// interference, which the bookkeeping below never models.
    pub fn epsilon(&self) -> f64 {
        match self.epsilon_override {
            Some(e) => e,
            None => (self.paths as f64 * self.xi2).sqrt().min(1.0),
        }
    }

    /// True when the derived cancellation error had to be clamped to 1.
    pub fn epsilon_clamped(&self) -> bool {
        self.epsilon_override.is_none() && (self.paths as f64 * self.xi2).sqrt() > 1.0
    }
}

/// One cell: the ordered list of user classes plus the background noise.
///
/// The list index is the class label. Detection order is a separate
/// permutation handed to the solvers, so the same `SystemModel` can be
/// evaluated under every ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub groups: Vec<GroupParams>,
    /// Background noise power.
    pub sigma2: f64,
}

impl SystemModel {
    pub fn new(groups: Vec<GroupParams>, sigma2: f64) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidParameter {
                name: "groups".into(),
                reason: "need at least one group".into(),
            });
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma2".into(),
                reason: format!("noise power must be finite and > 0, got {sigma2}"),
            });
        }
        for g in &groups {
            g.validate()?;
        }
        Ok(SystemModel { groups, sigma2 })
    }

    /// Number of classes.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// The identity detection order: classes detected in label order.
    pub fn identity_order(&self) -> Vec<usize> {
        (0..self.groups.len()).collect()
    }

    /// Derives the closed-form quantities for every class.
    pub fn derive_all(&self, kind: ReceiverKind) -> Result<Vec<DerivedParams>> {
        self.groups
            .iter()
            .enumerate()
            .map(|(j, g)| {
                derive_params(g, kind).map_err(|e| match e {
                    Error::InfeasibleTargetSir { gamma, limit, .. } => Error::InfeasibleTargetSir {
                        group: j,
                        gamma,
                        limit,
                    },
                    other => other,
                })
            })
            .collect()
    }

    /// Checks that `order` is a permutation of the class labels.
    pub fn validate_order(&self, order: &[usize]) -> Result<()> {
        let n = self.groups.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidOrder {
                order: order.to_vec(),
                expected: n,
            });
        }
        for &label in order {
            if label >= n || seen[label] {
                return Err(Error::InvalidOrder {
                    order: order.to_vec(),
                    expected: n,
                });
            }
            seen[label] = true;
        }
        Ok(())
    }
}

/// Closed-form per-group quantities shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `nu = xi2 / hbar2`.
    pub nu: f64,
    /// Cancellation error in `[0, 1]`.
    pub epsilon: f64,
    /// Effective power-control target `theta = gamma / (1 - nu * gamma)`.
    pub theta: f64,
    /// Per-user dimension cost under LMMSE detection:
    /// `(L - 1) * nu * gamma + (1 + nu) * gamma / (1 + gamma)`.
    pub lambda_lmmse: f64,
    /// Per-user dimension cost under matched filtering:
    /// `theta * (L * nu + 1)`. Always exceeds `lambda_lmmse`.
    pub lambda_mf: f64,
    /// Normalized feasibility margin `(1 - alpha * lambda) / theta` for the
    /// selected receiver; positive exactly when the group fits on its own.
    pub margin: f64,
}

impl DerivedParams {
    /// Dimension cost for the selected receiver.
    pub fn lambda(&self, kind: ReceiverKind) -> f64 {
        match kind {
            ReceiverKind::Lmmse => self.lambda_lmmse,
            ReceiverKind::MatchedFilter => self.lambda_mf,
        }
    }
}

/// Computes the derived quantities for one class.
///
/// Fails with [`Error::InfeasibleTargetSir`] when `gamma >= 1/nu`: no finite
/// power reaches the target once estimation self-noise dominates.
pub fn derive_params(g: &GroupParams, kind: ReceiverKind) -> Result<DerivedParams> {
    g.validate()?;
    let nu = g.nu();
    let nu_gamma = nu * g.gamma;
    if nu_gamma >= 1.0 {
        return Err(Error::InfeasibleTargetSir {
            group: 0,
            gamma: g.gamma,
            limit: 1.0 / nu,
        });
    }
    let theta = g.gamma / (1.0 - nu_gamma);
    let l = g.paths as f64;
    let lambda_lmmse = (l - 1.0) * nu_gamma + (1.0 + nu) * g.gamma / (1.0 + g.gamma);
    let lambda_mf = theta * (l * nu + 1.0);
    let lambda = match kind {
        ReceiverKind::Lmmse => lambda_lmmse,
        ReceiverKind::MatchedFilter => lambda_mf,
    };
    Ok(DerivedParams {
        nu,
        epsilon: g.epsilon(),
        theta,
        lambda_lmmse,
        lambda_mf,
        margin: (1.0 - g.alpha * lambda) / theta,
    })
}

/// Inverts the link budget: transmit power that yields received power `q`
/// through path-loss gain `z` and average channel gain `hbar2`.
pub fn recover_transmit_power(q: f64, g: &GroupParams, z: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonPositivePathLoss(z));
    }
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "q".into(),
            reason: format!("received power must be finite and >= 0, got {q}"),
        });
    }
    Ok(q / (z * g.hbar2))
}
