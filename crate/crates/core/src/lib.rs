//! Power allocation, feasibility and capacity regions for groupwise
//! successive interference cancellation (GSIC) systems under imperfect
//! channel estimation.
//!
//! Users are grouped into classes detected one group at a time; each
//! detected group is reconstructed and subtracted before the next is
//! detected, leaving a fractional residual set by the channel-estimation
//! quality. In the large-system limit the per-class SIR targets turn
//! into closed-form power conditions, and this crate provides:
//!
//! - [`model`]: class parameters and the derived per-group quantities;
//! - [`feasibility`]: the coupling matrix, its spectral-radius
//!   feasibility test, and the direct linear power solve;
//! - [`recursion`]: an independent closed-form recursive solver for the
//!   same powers and the total received power;
//! - [`sir`]: the from-scratch SIR oracle that cross-checks any
//!   allocation against the targets;
//! - [`power_control`]: distributed iterative power control with
//!   synchronous and asynchronous schedules;
//! - [`ordering`]: detection-order search (exhaustive and by ascending
//!   cancellation error);
//! - [`regions`]: capacity-region membership and boundary tracing for
//!   GSIC-LMMSE, GSIC-MF, all-MF and multicode-LMMSE architectures.
//!
//! Powers scale linearly in the background noise `sigma2`; with the
//! default `sigma2 = 1` all reported powers are noise-normalized.

pub mod error;
pub mod feasibility;
pub mod model;
pub mod ordering;
pub mod power_control;
pub mod recursion;
pub mod regions;
pub mod sir;

pub use error::{Error, Result};
pub use feasibility::{
    build_coupling, check_feasibility, solve_powers, spectral_radius, CouplingMatrix,
    FeasibilityReport, PowerAllocation,
};
pub use model::{
    derive_params, recover_transmit_power, DerivedParams, GroupParams, ReceiverKind, SystemModel,
};
pub use ordering::{brute_force_order, sorted_order, OrderingResult};
pub use power_control::{
    interference_function, run_power_control, IterationOutcome, IterationTrace, TraceRow,
    UpdateSchedule,
};
pub use recursion::{
    solve_powers_recursive, total_power, total_power_closed_form, total_power_from_first,
};
pub use regions::{
    member, member_all_mf, member_multicode, member_two_class_gsic_lmmse, member_two_class_gsic_mf,
    trace_boundary, ArchitectureKind, RegionSample,
};
pub use sir::{
    achieved_sir, beta_map, enhanced_noise, solve_beta, verify_allocation, BetaSolution,
    EnhancedNoise, VerificationReport,
};
