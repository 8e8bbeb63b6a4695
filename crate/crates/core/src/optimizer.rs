//! Alternating optimization of the power split and the STAR coefficients
//! for one channel realization.
//!
//! Each pass first sets the power split in closed form for the current
//! transmitted gain `S2`, then re-solves the amplitude program for that
//! split. The amplitude program pins `Σ Hᵢ tᵢ = √(γth2 N₀ / (α₂ Pₛ))`, which
//! with the closed-form `α₂` equals the current `√S2`; the next pass therefore
//! reproduces the same split and the iteration is stationary after one pass.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::phy::{aggregate_gain_s2, PowerSplit, SnrReport, StarConfig, SystemParams, ENERGY_TOL};
use crate::power::{check_feasibility, feasibility_threshold, optimal_power_split};
use crate::rng::substream;
use crate::star::{align_phases, build_amplitude_problem, solve_amplitudes, stationarity_residual, AmplitudeProblem};

/// Relative slack accepted when checking that the control constraint
/// dominates the information-decoding one.
const DOMINANCE_TOL: f64 = 1e-9;
/// Relative margin above the feasibility threshold targeted when the initial
/// configuration cannot support any power split.
const RECOVERY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    SolverFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Control share after the power-split step.
    pub a2: f64,
    /// Transmitted gain after the amplitude step.
    pub s2: f64,
    pub amplitude_updated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub split: PowerSplit,
    pub config: StarConfig,
    pub report: SnrReport,
    pub status: SolveStatus,
    pub iterations_used: usize,
    /// `|α₂ᵏ − α₂ᵏ⁻¹|`, or after a single pass the change the next
    /// power-split step would make.
    pub fixed_point_gap: f64,
    /// Multiplier of the last amplitude solve (NaN if none ran).
    pub dual: f64,
    pub kkt_residual: f64,
    pub trace: Vec<IterationRecord>,
    pub message: Option<String>,
}

/// Starting point: the given split and uniformly random reflection
/// magnitudes, with phases already aligned since their optimum does not
/// depend on the split.
pub fn initialize(
    ch: &ChannelRealization,
    p: &SystemParams,
    a1_init: f64,
    rng_seed: u64,
) -> Result<(PowerSplit, StarConfig)> {
    if !(a1_init > 0.0 && a1_init < 1.0) {
        return Err(Error::InvalidParameter(format!("a1_init = {a1_init} outside (0, 1)")));
    }
    if ch.len() != p.n_elements {
        return Err(Error::DimensionMismatch { expected: p.n_elements, got: ch.len() });
    }
    let split = PowerSplit::from_a1(a1_init)?;
    let mut rng = substream(rng_seed, 0);
    let t: Vec<f64> = (0..ch.len())
        .map(|_| {
            let r: f64 = rng.sample(Open01);
            (1.0 - r * r).sqrt()
        })
        .collect();
    Ok((split, align_phases(ch, &t)?))
}

fn cascade_weights(ch: &ChannelRealization) -> (Vec<f64>, Vec<f64>) {
    let d = ch.h1.iter().zip(&ch.h2).map(|(a, b)| a.norm() * b.norm()).collect();
    let h = ch.h1.iter().zip(&ch.g).map(|(a, b)| (a * b).norm()).collect();
    (d, h)
}

enum Halt {
    Infeasible(String),
    Failure(String),
}

/// Runs the alternating optimization. Invalid inputs are errors; infeasible
/// channels and numerical failures are reported through the outcome status.
pub fn optimize(ch: &ChannelRealization, p: &SystemParams, a1_init: f64, rng_seed: u64) -> Result<SolveOutcome> {
    p.validate()?;
    let (mut split, mut config) = initialize(ch, p, a1_init, rng_seed)?;
    let threshold = feasibility_threshold(p);

    let mut trace: Vec<IterationRecord> = Vec::with_capacity(p.max_iters);
    let mut split_set = false;
    let mut dual = f64::NAN;
    let mut kkt_residual = f64::NAN;
    let mut halt: Option<Halt> = None;

    for k in 1..=p.max_iters {
        let mut s2 = aggregate_gain_s2(ch, &config)?;
        if !split_set && !check_feasibility(s2, p).feasible {
            // Spend the transmission budget on just enough gain for the MC.
            let (d, h) = cascade_weights(ch);
            let target = AmplitudeProblem::new(d, h, (threshold * (1.0 + RECOVERY_MARGIN)).sqrt())?;
            if !target.is_solvable() {
                halt = Some(Halt::Infeasible(format!(
                    "maximum transmitted gain {:e} is below the required {threshold:e}",
                    target.capacity().powi(2)
                )));
                break;
            }
            match solve_amplitudes(&target, p.tol_bisect) {
                Ok(sol) => {
                    config = align_phases(ch, &sol.t)?;
                    s2 = aggregate_gain_s2(ch, &config)?;
                }
                Err(e) => {
                    halt = Some(Halt::Failure(e.to_string()));
                    break;
                }
            }
        }

        let feasibility = check_feasibility(s2, p);
        if feasibility.feasible {
            split = optimal_power_split(s2, p)?;
            split_set = true;
        } else if !split_set {
            halt = Some(Halt::Infeasible(format!("S2 = {s2:e} below the required {threshold:e}")));
            break;
        }

        let mut updated = false;
        if split.a1() / split.a2() > feasibility.a1_lower {
            let prob = build_amplitude_problem(ch, split, p)?;
            if !prob.dominance_holds(DOMINANCE_TOL) {
                halt = Some(Halt::Failure(format!(
                    "information constraint amplitude {:e} exceeds control amplitude {:e}",
                    prob.q_info, prob.q
                )));
                break;
            }
            match solve_amplitudes(&prob, p.tol_bisect) {
                Ok(sol) => {
                    config = align_phases(ch, &sol.t)?;
                    dual = sol.dual;
                    kkt_residual = sol.kkt_residual;
                    updated = true;
                }
                Err(e) => {
                    halt = Some(Halt::Failure(e.to_string()));
                    break;
                }
            }
        }

        trace.push(IterationRecord { iteration: k, a2: split.a2(), s2: aggregate_gain_s2(ch, &config)?, amplitude_updated: updated });
        if let [.., prev, last] = trace.as_slice() {
            if (last.a2 - prev.a2).abs() <= p.tol_fixed_point {
                break;
            }
        }
    }

    let fixed_point_gap = match trace.as_slice() {
        [.., prev, last] => (last.a2 - prev.a2).abs(),
        [only] => {
            let next = p.gamma_th2 * p.n0_watts / (only.s2 * p.ps_watts);
            (next - only.a2).abs()
        }
        [] => f64::INFINITY,
    };

    let (status, message) = match halt {
        Some(Halt::Infeasible(m)) => (SolveStatus::Infeasible, Some(m)),
        Some(Halt::Failure(m)) => (SolveStatus::SolverFailure, Some(m)),
        None if fixed_point_gap <= p.tol_fixed_point => (SolveStatus::Optimal, None),
        None => (
            SolveStatus::SolverFailure,
            Some(format!("fixed point not reached after {} iterations (gap {fixed_point_gap:e})", trace.len())),
        ),
    };

    Ok(SolveOutcome {
        report: SnrReport::evaluate(ch, &config, split, p)?,
        split,
        config,
        status,
        iterations_used: trace.len(),
        fixed_point_gap,
        dual,
        kkt_residual,
        trace,
        message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Residual {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), value, tolerance }
    }

    pub fn ok(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// Re-derives every constraint of the joint problem from the outcome's
/// split and configuration. Each residual is a violation measure; zero
/// means satisfied exactly.
pub fn verify_outcome(outcome: &SolveOutcome, ch: &ChannelRealization, p: &SystemParams) -> Result<Vec<Residual>> {
    let cfg = &outcome.config;
    if cfg.len() != ch.len() {
        return Err(Error::DimensionMismatch { expected: ch.len(), got: cfg.len() });
    }
    let split = outcome.split;
    let report = SnrReport::evaluate(ch, cfg, split, p)?;

    let over_one = |v: Vec<f64>| v.into_iter().map(|m| (m - 1.0).max(0.0)).fold(0.0, f64::max);
    let a1 = split.a1();
    let a2 = split.a2();
    let box_violation = if a1 > 0.0 && a1 < 1.0 && a2 > 0.0 && a2 < 1.0 { 0.0 } else { 1.0 };

    let (d, _) = cascade_weights(ch);
    let coherent: f64 = d.iter().zip(cfg.refl_magnitudes()).map(|(d, r)| d * r).sum();
    let alignment = if coherent > 0.0 { (report.s1.sqrt() - coherent).abs() / coherent } else { 0.0 };

    let prob = build_amplitude_problem(ch, split, p)?;
    let kkt = stationarity_residual(&prob, &cfg.trans_magnitudes(), outcome.dual);

    Ok(vec![
        Residual::new("C1 energy conservation", cfg.energy_residual(), ENERGY_TOL),
        Residual::new("C2 reflection magnitude", over_one(cfg.refl_magnitudes()), 1e-12),
        Residual::new("C3 transmission magnitude", over_one(cfg.trans_magnitudes()), 1e-12),
        Residual::new("C4 information SIC at MC", (1.0 - report.gamma21 / p.gamma_th1).max(0.0), 1e-9),
        Residual::new("C5 control decoding tightness", (report.gamma22 / p.gamma_th2 - 1.0).abs(), 1e-9),
        Residual::new("C6 split sums to one", (a1 + a2 - 1.0).abs(), 1e-15),
        Residual::new("C7 split inside (0, 1)", box_violation, 0.0),
        Residual::new("phase alignment", alignment, 1e-9),
        Residual::new("KKT stationarity", kkt, 1e-8),
        Residual::new("fixed point gap", outcome.fixed_point_gap, p.tol_fixed_point),
    ])
}
