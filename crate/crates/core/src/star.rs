//! STAR coefficient design for a fixed power split.
//!
//! Phases have a closed form: aligning every cascaded term makes both
//! coherent sums real and nonnegative, so the magnitudes alone decide the
//! SNRs. What remains is the amplitude-splitting program
//!
//! ```text
//! maximize   Σ dᵢ √(1 − tᵢ²)
//! subject to Σ Hᵢ tᵢ = Q,   0 ≤ tᵢ < 1
//! ```
//!
//! with `dᵢ = |h1ᵢ||h2ᵢ|`, `Hᵢ = |h1ᵢ gᵢ|` and `Q = √(γth2 N₀ / (α₂ Pₛ))`.
//! The objective is a sum of concave terms, so stationarity is sufficient:
//! `dᵢ tᵢ = μ Hᵢ √(1 − tᵢ²)`, i.e. `tᵢ(μ) = μ Hᵢ / √(dᵢ² + μ² Hᵢ²)`. The
//! response `g(μ) = Σ Hᵢ tᵢ(μ)` rises strictly from 0 towards `Σ Hᵢ`, and a
//! scalar bisection on `μ` recovers the global optimum in `O(N)` per step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::phy::{PowerSplit, StarConfig, SystemParams};

/// Margin kept between zero-weight entries and the `t = 1` boundary.
pub const BOUNDARY_GUARD: f64 = 1e-9;
/// Largest transmission magnitude ever returned.
pub const T_MAX: f64 = 1.0 - 1e-12;
pub const MAX_BISECTIONS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeProblem {
    /// Reflected-path weights `|h1ᵢ||h2ᵢ|`.
    pub d: Vec<f64>,
    /// Transmitted-path weights `|h1ᵢ gᵢ|`.
    pub h_cap: Vec<f64>,
    /// Required transmitted amplitude `√S2`.
    pub q: f64,
    /// Amplitude the information-decoding constraint alone would require;
    /// `+∞` when that constraint cannot be met for the current split.
    pub q_info: f64,
}

impl AmplitudeProblem {
    pub fn new(d: Vec<f64>, h_cap: Vec<f64>, q: f64) -> Result<Self> {
        let p = Self { d, h_cap, q, q_info: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d.len() != self.h_cap.len() {
            return Err(Error::DimensionMismatch { expected: self.d.len(), got: self.h_cap.len() });
        }
        if self.d.is_empty() {
            return Err(Error::InvalidParameter("amplitude problem has no elements".into()));
        }
        if self.d.iter().chain(&self.h_cap).any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
        }
        if !(self.q.is_finite() && self.q >= 0.0) {
            return Err(Error::InvalidParameter(format!("target Q = {} must be finite and nonnegative", self.q)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// `Σ Hᵢ`, the supremum of the attainable transmitted amplitude.
    pub fn capacity(&self) -> f64 {
        self.h_cap.iter().sum()
    }

    pub fn is_solvable(&self) -> bool {
        self.q < self.capacity()
    }

    /// Whether the control constraint is at least as strong as the
    /// information-decoding constraint, `Q ≥ Q₂`, up to a relative `tol`.
    pub fn dominance_holds(&self, tol: f64) -> bool {
        self.q_info <= self.q * (1.0 + tol)
    }

    /// `Σ dᵢ √(1 − tᵢ²)`.
    pub fn objective(&self, t: &[f64]) -> f64 {
        self.d.iter().zip(t).map(|(&d, &t)| d * reflect_amplitude(t)).sum()
    }

    /// `Σ Hᵢ tᵢ`.
    pub fn transmitted(&self, t: &[f64]) -> f64 {
        self.h_cap.iter().zip(t).map(|(h, t)| h * t).sum()
    }

    /// Stationary magnitudes `tᵢ(μ)` for a given multiplier.
    pub fn stationary_point(&self, mu: f64) -> Vec<f64> {
        self.d.iter().zip(&self.h_cap).map(|(&d, &h)| stationary_t(d, h, mu)).collect()
    }

    /// Dual response `g(μ) = Σ Hᵢ tᵢ(μ)`.
    pub fn dual_response(&self, mu: f64) -> f64 {
        self.d.iter().zip(&self.h_cap).map(|(&d, &h)| h * stationary_t(d, h, mu)).sum()
    }
}

fn stationary_t(d: f64, h: f64, mu: f64) -> f64 {
    if h == 0.0 || mu <= 0.0 {
        return 0.0;
    }
    if d == 0.0 {
        return 1.0;
    }
    // μH/√(d² + μ²H²) written in terms of the ratio to stay finite for
    // extreme weights.
    let r = d / h;
    mu / mu.hypot(r)
}

fn reflect_amplitude(t: f64) -> f64 {
    ((1.0 - t) * (1.0 + t)).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSolution {
    /// Transmission magnitudes `tᵢ = |Tᵢ|`.
    pub t: Vec<f64>,
    pub objective: f64,
    /// Multiplier of the equality constraint; NaN for the grid oracle.
    pub dual: f64,
    /// Worst normalised stationarity residual; NaN for the grid oracle.
    pub kkt_residual: f64,
    /// `|Σ Hᵢ tᵢ − Q|`.
    pub constraint_residual: f64,
}

/// Builds the amplitude program for the current split.
pub fn build_amplitude_problem(ch: &ChannelRealization, split: PowerSplit, p: &SystemParams) -> Result<AmplitudeProblem> {
    let control_power = split.a2() * p.ps_watts;
    if !(control_power > 0.0) {
        return Err(Error::Degenerate("control stream power a2·Ps is zero".into()));
    }
    let mut d: Vec<f64> = ch.h1.iter().zip(&ch.h2).map(|(a, b)| a.norm() * b.norm()).collect();
    let mut h_cap: Vec<f64> = ch.h1.iter().zip(&ch.g).map(|(a, b)| (a * b).norm()).collect();
    let mut q = (p.gamma_th2 * p.n0_watts / control_power).sqrt();
    let info_margin = split.a1() - split.a2() * p.gamma_th1;
    let q_info = if info_margin > 0.0 {
        (p.gamma_th1 * p.n0_watts / (p.ps_watts * info_margin)).sqrt()
    } else {
        f64::INFINITY
    };
    if p.listing_scaling {
        d.iter_mut().for_each(|x| *x *= 2.0);
        h_cap.iter_mut().for_each(|x| *x *= 2.0);
        q = 2.0 * q.max(q_info);
    }
    let prob = AmplitudeProblem { d, h_cap, q, q_info };
    prob.validate()?;
    Ok(prob)
}

/// Solves the amplitude program by bisection on the dual multiplier.
///
/// `tol` is relative to `Q`: the returned point satisfies
/// `|Σ Hᵢ tᵢ − Q| ≤ tol · Q`.
pub fn solve_amplitudes(prob: &AmplitudeProblem, tol: f64) -> Result<AmplitudeSolution> {
    prob.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let cap = prob.capacity();
    if !(prob.q < cap) {
        return Err(Error::InfeasibleAmplitude { q: prob.q, cap });
    }
    let n = prob.len();
    let mut t = vec![0.0; n];
    if prob.q == 0.0 {
        return Ok(finish(prob, t, 0.0));
    }

    // Entries with no reflected weight cost nothing; spend budget on them first.
    let free: Vec<usize> = (0..n).filter(|&i| prob.d[i] == 0.0 && prob.h_cap[i] > 0.0).collect();
    let free_weight: f64 = free.iter().map(|&i| prob.h_cap[i]).sum();
    let free_cap = free_weight * (1.0 - BOUNDARY_GUARD);
    if !free.is_empty() && free_cap >= prob.q {
        let level = prob.q / free_weight;
        for &i in &free {
            t[i] = level;
        }
        return Ok(finish(prob, t, 0.0));
    }
    for &i in &free {
        t[i] = 1.0 - BOUNDARY_GUARD;
    }
    let target = prob.q - free_cap;

    let active: Vec<usize> = (0..n).filter(|&i| prob.d[i] > 0.0 && prob.h_cap[i] > 0.0).collect();
    let active_cap: f64 = active.iter().map(|&i| prob.h_cap[i]).sum();
    if !(target < active_cap) {
        return Err(Error::InfeasibleAmplitude { q: prob.q, cap });
    }
    let ratios: Vec<(f64, f64)> = active.iter().map(|&i| (prob.h_cap[i], prob.d[i] / prob.h_cap[i])).collect();
    let response = |mu: f64| -> f64 { ratios.iter().map(|&(h, r)| h * mu / mu.hypot(r)).sum() };

    let mut lo = 0.0;
    let mut hi = ratios.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let mut doublings = 0;
    while response(hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::SolverFailure { iterations: doublings, residual: target - response(lo) });
        }
    }

    let goal = tol * target;
    let mut mu = hi;
    let mut residual = response(hi) - target;
    let mut iterations = 0;
    while residual.abs() > goal && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = response(mid) - target;
        if r.abs() < residual.abs() || iterations == 0 {
            mu = mid;
            residual = r;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    if residual.abs() > goal {
        return Err(Error::SolverFailure { iterations, residual: residual.abs() });
    }

    for (&i, &(_, r)) in active.iter().zip(&ratios) {
        t[i] = (mu / mu.hypot(r)).min(T_MAX);
    }
    Ok(finish(prob, t, mu))
}

fn finish(prob: &AmplitudeProblem, t: Vec<f64>, mu: f64) -> AmplitudeSolution {
    AmplitudeSolution {
        objective: prob.objective(&t),
        dual: mu,
        kkt_residual: stationarity_residual(prob, &t, mu),
        constraint_residual: (prob.transmitted(&t) - prob.q).abs(),
        t,
    }
}

/// `maxᵢ |dᵢ tᵢ − μ Hᵢ √(1 − tᵢ²)| / (dᵢ + μ Hᵢ)` over entries with positive
/// reflected weight. Zero-weight entries sit on the box boundary and are
/// excluded.
pub fn stationarity_residual(prob: &AmplitudeProblem, t: &[f64], mu: f64) -> f64 {
    prob.d
        .iter()
        .zip(&prob.h_cap)
        .zip(t)
        .filter(|((&d, _), _)| d > 0.0)
        .map(|((&d, &h), &t)| {
            let scale = d + mu * h;
            (d * t - mu * h * reflect_amplitude(t)).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Exhaustive grid search used to cross-check [`solve_amplitudes`].
///
/// Every `t ∈ {0, s, 2s, …} ∩ [0, 1)` with `|Σ Hᵢ tᵢ − Q| ≤ max(H)·s` is a
/// candidate. The coordinate with the largest `H` is resolved analytically:
/// for fixed other coordinates the objective does not increase along it, so
/// only the smallest admissible grid index can win.
pub fn oracle_solve(prob: &AmplitudeProblem, grid_step: f64) -> Result<AmplitudeSolution> {
    prob.validate()?;
    let n = prob.len();
    if n > 3 {
        return Err(Error::OracleScope(n));
    }
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::InvalidParameter(format!("grid step {grid_step} outside (0, 0.01]")));
    }
    let last = (1.0 / grid_step).ceil() as i64 - 1;
    let last = if (last as f64 + 1.0) * grid_step < 1.0 { last + 1 } else { last };
    let h_max = prob.h_cap.iter().cloned().fold(0.0, f64::max);
    let window = h_max * grid_step;
    let pivot = (0..n).max_by(|&a, &b| prob.h_cap[a].total_cmp(&prob.h_cap[b])).unwrap_or(0);
    let others: Vec<usize> = (0..n).filter(|&i| i != pivot).collect();

    let admissible = |sum: f64| (sum - prob.q).abs() <= window;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut idx = vec![0i64; others.len()];
    loop {
        let mut t = vec![0.0; n];
        for (&i, &k) in others.iter().zip(&idx) {
            t[i] = k as f64 * grid_step;
        }
        let partial: f64 = prob.transmitted(&t);
        let h_p = prob.h_cap[pivot];
        let candidate = if h_p > 0.0 {
            let k = ((prob.q - window - partial) / (h_p * grid_step)).ceil().max(0.0) as i64;
            // step back over rounding at the window edge
            (k.saturating_sub(1)..=k + 1).filter(|&k| (0..=last).contains(&k)).find(|&k| {
                admissible(partial + h_p * k as f64 * grid_step)
            })
        } else if admissible(partial) {
            Some(0)
        } else {
            None
        };
        if let Some(k) = candidate {
            t[pivot] = k as f64 * grid_step;
            let obj = prob.objective(&t);
            if best.as_ref().is_none_or(|(b, _)| obj > *b) {
                best = Some((obj, t));
            }
        }

        // odometer over the remaining coordinates
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return match best {
                    Some((objective, t)) => Ok(AmplitudeSolution {
                        objective,
                        dual: f64::NAN,
                        kkt_residual: f64::NAN,
                        constraint_residual: (prob.transmitted(&t) - prob.q).abs(),
                        t,
                    }),
                    None => Err(Error::InfeasibleAmplitude { q: prob.q, cap: prob.capacity() }),
                };
            }
            idx[pos] += 1;
            if idx[pos] <= last {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Phase-aligned STAR coefficients for the given transmission magnitudes:
/// `θ_Rᵢ = −θ_h1ᵢ − θ_h2ᵢ`, `θ_Tᵢ = −θ_h1ᵢ − θ_gᵢ`, `|Rᵢ| = √(1 − tᵢ²)`.
pub fn align_phases(ch: &ChannelRealization, t: &[f64]) -> Result<StarConfig> {
    if t.len() != ch.len() {
        return Err(Error::DimensionMismatch { expected: ch.len(), got: t.len() });
    }
    let arg = |z: &Complex64| z.arg();
    let refl_phase: Vec<f64> = ch.h1.iter().zip(&ch.h2).map(|(a, b)| -arg(a) - arg(b)).collect();
    let trans_phase: Vec<f64> = ch.h1.iter().zip(&ch.g).map(|(a, b)| -arg(a) - arg(b)).collect();
    StarConfig::from_polar(t, &refl_phase, &trans_phase)
}
