//! Closed-form NOMA power split for fixed STAR coefficients.
//!
//! For a given transmitted cascade gain `S2` the two MC constraints bound the
//! information share from both sides:
//!
//! ```text
//! γth1 (S2 Pₛ + N₀) / (S2 Pₛ (1 + γth1))  <  α₁  <  1 − γth2 N₀ / (S2 Pₛ)
//! ```
//!
//! The interval is non-empty iff `S2 > (γth1 γth2 + γth1 + γth2) N₀ / Pₛ`.
//! The UE SINR is increasing in `α₁`, so the optimum sits at the upper end,
//! where the control constraint is tight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::{PowerSplit, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub s2_required: f64,
    pub s2_actual: f64,
    pub feasible: bool,
    /// Lower end of the admissible `α₁` interval, clamped to `[0, 1]`.
    pub a1_lower: f64,
    /// Upper end of the admissible `α₁` interval, clamped to `[0, 1]`.
    pub a1_upper: f64,
    /// `S2` is zero: there is no transmitted path to the MC at all.
    pub degenerate: bool,
}

/// Minimum `S2` for which some power split satisfies both MC constraints.
pub fn feasibility_threshold(p: &SystemParams) -> f64 {
    let (g1, g2) = (p.gamma_th1, p.gamma_th2);
    (g1 * g2 + g1 + g2) * p.n0_watts / p.ps_watts
}

pub fn check_feasibility(s2: f64, p: &SystemParams) -> FeasibilityReport {
    let snr = s2 * p.ps_watts;
    let degenerate = !(snr > 0.0);
    let (lower, upper) = if degenerate {
        (1.0, 0.0)
    } else {
        let lower = p.gamma_th1 * (snr + p.n0_watts) / (snr * (1.0 + p.gamma_th1));
        let upper = 1.0 - p.gamma_th2 * p.n0_watts / snr;
        (lower.clamp(0.0, 1.0), upper.clamp(0.0, 1.0))
    };
    FeasibilityReport {
        s2_required: feasibility_threshold(p),
        s2_actual: s2,
        // the admissible interval is open, so equal endpoints are rejected
        feasible: !degenerate && lower < upper,
        a1_lower: lower,
        a1_upper: upper,
        degenerate,
    }
}

/// `α₂ = γth2 N₀ / (S2 Pₛ)`, `α₁ = 1 − α₂`.
pub fn optimal_power_split(s2: f64, p: &SystemParams) -> Result<PowerSplit> {
    let report = check_feasibility(s2, p);
    if !report.feasible {
        return Err(Error::InfeasiblePowerSplit(report));
    }
    PowerSplit::from_a2(p.gamma_th2 * p.n0_watts / (s2 * p.ps_watts))
}
