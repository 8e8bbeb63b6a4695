//! Configuration types and the closed-form SNR / rate expressions of the
//! two-phase protocol.
//!
//! During the SICS phase the UE sees the reflected cascade
//! `S1 = |Σ h1ᵢ h2ᵢ Rᵢ|²` and the MC sees the transmitted cascade
//! `S2 = |Σ h1ᵢ gᵢ Tᵢ|²`. The UE treats the control stream as interference;
//! the MC first decodes the information stream and then, after SIC, the
//! control stream.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

/// Tolerance on `|Rᵢ|² + |Tᵢ|² = 1`.
pub const ENERGY_TOL: f64 = 1e-9;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Per-element STAR coefficients: reflection `Rᵢ` towards the UE and
/// transmission `Tᵢ` towards the MC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    pub refl: Vec<Complex64>,
    pub trans: Vec<Complex64>,
}

impl StarConfig {
    pub fn new(refl: Vec<Complex64>, trans: Vec<Complex64>) -> Result<Self> {
        if refl.len() != trans.len() {
            return Err(Error::DimensionMismatch { expected: refl.len(), got: trans.len() });
        }
        let cfg = Self { refl, trans };
        let residual = cfg.energy_residual();
        if !(residual <= ENERGY_TOL) {
            return Err(Error::InvalidParameter(format!(
                "energy conservation violated by {residual:e}"
            )));
        }
        Ok(cfg)
    }

    /// Builds a configuration from transmission magnitudes `tᵢ` and phases;
    /// reflection magnitudes follow as `√(1 − tᵢ²)`.
    pub fn from_polar(t: &[f64], refl_phase: &[f64], trans_phase: &[f64]) -> Result<Self> {
        let n = t.len();
        for v in [refl_phase, trans_phase] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        if let Some(bad) = t.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidParameter(format!("transmission magnitude {bad} outside [0, 1]")));
        }
        let refl = t
            .iter()
            .zip(refl_phase)
            .map(|(&ti, &ph)| Complex64::from_polar((1.0 - ti * ti).sqrt(), wrap_phase(ph)))
            .collect();
        let trans = t
            .iter()
            .zip(trans_phase)
            .map(|(&ti, &ph)| Complex64::from_polar(ti, wrap_phase(ph)))
            .collect();
        Ok(Self { refl, trans })
    }

    pub fn len(&self) -> usize {
        self.refl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.refl.is_empty()
    }

    /// `maxᵢ | |Rᵢ|² + |Tᵢ|² − 1 |`.
    pub fn energy_residual(&self) -> f64 {
        self.refl
            .iter()
            .zip(&self.trans)
            .map(|(r, t)| (r.norm_sqr() + t.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn trans_magnitudes(&self) -> Vec<f64> {
        self.trans.iter().map(|t| t.norm()).collect()
    }

    pub fn refl_magnitudes(&self) -> Vec<f64> {
        self.refl.iter().map(|r| r.norm()).collect()
    }

    pub fn refl_phases(&self) -> Vec<f64> {
        self.refl.iter().map(|r| wrap_phase(r.arg())).collect()
    }

    pub fn trans_phases(&self) -> Vec<f64> {
        self.trans.iter().map(|t| wrap_phase(t.arg())).collect()
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// NOMA power split. Only the control share `α₂` is stored so that the pair
/// sums to one by construction; `α₂` is the small quantity and keeps full
/// relative precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    a2: f64,
}

impl PowerSplit {
    pub fn from_a1(a1: f64) -> Result<Self> {
        Self::from_a2(1.0 - a1)
    }

    pub fn from_a2(a2: f64) -> Result<Self> {
        if !(a2 > 0.0 && a2 < 1.0) {
            return Err(Error::InvalidParameter(format!("power fraction a2 = {a2} outside (0, 1)")));
        }
        Ok(Self { a2 })
    }

    /// Information-stream share.
    pub fn a1(&self) -> f64 {
        1.0 - self.a2
    }

    /// Control-stream share.
    pub fn a2(&self) -> f64 {
        self.a2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub ps_watts: f64,
    pub n0_watts: f64,
    /// Linear SNR the MC needs to decode (and cancel) the information stream.
    pub gamma_th1: f64,
    /// Linear SNR the MC needs to decode the control stream.
    pub gamma_th2: f64,
    pub n_elements: usize,
    /// Relative tolerance on the amplitude equality constraint.
    pub tol_bisect: f64,
    pub tol_fixed_point: f64,
    pub max_iters: usize,
    /// Double `d` and `H` and set `Q` to twice the larger of the control and
    /// SIC targets. Off by default; the optimum is unchanged whenever the
    /// control constraint dominates.
    pub listing_scaling: bool,
}

impl SystemParams {
    pub fn new(ps_watts: f64, n0_watts: f64, gamma_th1: f64, gamma_th2: f64, n_elements: usize) -> Result<Self> {
        let p = Self {
            ps_watts,
            n0_watts,
            gamma_th1,
            gamma_th2,
            n_elements,
            tol_bisect: 1e-12,
            tol_fixed_point: 1e-10,
            max_iters: 2,
            listing_scaling: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ps_watts", self.ps_watts),
            ("n0_watts", self.n0_watts),
            ("gamma_th1", self.gamma_th1),
            ("gamma_th2", self.gamma_th2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("tol_bisect", self.tol_bisect), ("tol_fixed_point", self.tol_fixed_point)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1e-2], got {v}")));
            }
        }
        if self.n_elements == 0 {
            return Err(Error::InvalidParameter("n_elements must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub s1: f64,
    pub s2: f64,
    pub gamma1: f64,
    pub gamma21: f64,
    pub gamma22: f64,
    pub rate_user: f64,
    pub rate_mc: f64,
}

impl SnrReport {
    pub fn evaluate(ch: &ChannelRealization, cfg: &StarConfig, split: PowerSplit, p: &SystemParams) -> Result<Self> {
        let s1 = aggregate_gain_s1(ch, cfg)?;
        let s2 = aggregate_gain_s2(ch, cfg)?;
        let gamma1 = snr_user(s1, split, p);
        let gamma22 = snr_mc_ctrl(s2, split, p);
        Ok(Self {
            s1,
            s2,
            gamma1,
            gamma21: snr_mc_info(s2, split, p),
            gamma22,
            rate_user: rate_user(gamma1),
            rate_mc: rate_mc(gamma22),
        })
    }
}

fn coherent_power(a: &[Complex64], b: &[Complex64], coef: &[Complex64]) -> Result<f64> {
    if b.len() != a.len() || coef.len() != a.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: coef.len().min(b.len()) });
    }
    let sum: Complex64 = a.iter().zip(b).zip(coef).map(|((x, y), c)| x * y * c).sum();
    Ok(sum.norm_sqr())
}

/// `S1 = |Σ h1ᵢ h2ᵢ Rᵢ|²`.
pub fn aggregate_gain_s1(ch: &ChannelRealization, cfg: &StarConfig) -> Result<f64> {
    coherent_power(&ch.h1, &ch.h2, &cfg.refl)
}

/// `S2 = |Σ h1ᵢ gᵢ Tᵢ|²`.
pub fn aggregate_gain_s2(ch: &ChannelRealization, cfg: &StarConfig) -> Result<f64> {
    coherent_power(&ch.h1, &ch.g, &cfg.trans)
}

/// UE SINR with the control stream as residual interference:
/// `S1 α₁ Pₛ / (S1 α₂ Pₛ + N₀)`.
pub fn snr_user(s1: f64, split: PowerSplit, p: &SystemParams) -> f64 {
    s1 * split.a1() * p.ps_watts / (s1 * split.a2() * p.ps_watts + p.n0_watts)
}

/// MC SINR on the information stream: `S2 α₁ Pₛ / (S2 α₂ Pₛ + N₀)`.
pub fn snr_mc_info(s2: f64, split: PowerSplit, p: &SystemParams) -> f64 {
    s2 * split.a1() * p.ps_watts / (s2 * split.a2() * p.ps_watts + p.n0_watts)
}

/// MC SNR on the control stream after SIC: `S2 α₂ Pₛ / N₀`.
pub fn snr_mc_ctrl(s2: f64, split: PowerSplit, p: &SystemParams) -> f64 {
    s2 * split.a2() * p.ps_watts / p.n0_watts
}

pub fn spectral_efficiency(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

pub fn rate_user(gamma1: f64) -> f64 {
    spectral_efficiency(gamma1)
}

pub fn rate_mc(gamma22: f64) -> f64 {
    spectral_efficiency(gamma22)
}

/// Rate of the data-transmission phase once the RIS has switched to full,
/// phase-aligned reflection: `log₂(1 + (Σ|h1ᵢ||h2ᵢ|)² Pₛ/N₀)`.
pub fn data_phase_rate(ch: &ChannelRealization, p: &SystemParams) -> f64 {
    let amp: f64 = ch.h1.iter().zip(&ch.h2).map(|(a, b)| a.norm() * b.norm()).sum();
    spectral_efficiency(amp * amp * p.ps_watts / p.n0_watts)
}
