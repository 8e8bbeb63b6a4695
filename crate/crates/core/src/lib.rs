//! Rate maximization for a STAR-RIS assisted NOMA downlink where the base
//! station superposes user data and the RIS controller's command.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: geometry, path loss and seeded Rician fading.
//! - [`phy`]: configuration types and the closed-form SNR / rate formulas.
//! - [`power`]: feasibility test and closed-form NOMA power split.
//! - [`star`]: phase alignment and the amplitude-splitting subproblem
//!   (dual bisection solver plus a brute-force grid oracle).
//! - [`optimizer`]: the alternating optimization loop and post-hoc
//!   constraint certification.
//! - [`harness`]: Monte Carlo sweeps, config files and CSV output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod harness;
pub mod optimizer;
pub mod phy;
pub mod power;
pub mod rng;
pub mod star;

pub use error::{Error, Result};
