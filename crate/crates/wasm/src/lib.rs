//! Browser bindings. The page in `www/` calls three operations: a rate and
//! power split curve against transmit power, a single optimized realization
//! summarized as JSON, and the per-element transmission amplitudes of that
//! realization. Each has a plain Rust twin so it can be tested natively.

use serde::Serialize;
use sics_core::channel::{generate_channels_for, FadingParams, NodeGeometry};
use sics_core::harness::{init_seed, run_sweep, SweepConfig};
use sics_core::optimizer::{optimize, SolveStatus};
use sics_core::phy::{db_to_linear, dbm_to_watts, SystemParams};
use sics_core::Result;
use wasm_bindgen::prelude::*;

const A1_INIT: f64 = 0.9;

/// Scenario knobs shared by every operation.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub n: usize,
    pub gamma_th1_db: f64,
    pub gamma_th2_db: f64,
    pub n0_dbm: f64,
    pub seed: u64,
}

impl Scenario {
    fn params(&self, ps_watts: f64) -> Result<SystemParams> {
        SystemParams::new(
            ps_watts,
            dbm_to_watts(self.n0_dbm),
            db_to_linear(self.gamma_th1_db),
            db_to_linear(self.gamma_th2_db),
            self.n,
        )
    }
}

/// One row per transmit power: `[ps, mean rate, mean α₁, feasible fraction]`,
/// flattened.
pub fn rate_curve(s: &Scenario, ps_min: f64, ps_max: f64, points: usize, realizations: usize) -> Result<Vec<f64>> {
    let points = points.max(2);
    let ps_grid = (0..points).map(|i| ps_min + (ps_max - ps_min) * i as f64 / (points - 1) as f64).collect();
    let cfg = SweepConfig {
        n_list: vec![s.n],
        gamma_th1_db: s.gamma_th1_db,
        gamma_th2_list_db: vec![s.gamma_th2_db],
        n0_watts: dbm_to_watts(s.n0_dbm),
        ps_grid_watts: ps_grid,
        realizations,
        master_seed: s.seed,
        workers: 1,
        ..SweepConfig::default()
    };
    let report = run_sweep(&cfg.into_spec()?)?;
    Ok(report
        .rows
        .iter()
        .flat_map(|r| [r.ps_watts, r.mean_rate_user, r.mean_alpha1, r.feasible_fraction])
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub status: SolveStatus,
    pub alpha1: f64,
    pub rate_user: f64,
    pub rate_mc: f64,
    pub gamma21_db: f64,
    pub gamma22_db: f64,
    /// Transmission amplitude of each element.
    pub amplitudes: Vec<f64>,
    pub message: Option<String>,
}

pub fn solve_realization(s: &Scenario, ps_watts: f64, realization: u64) -> Result<Summary> {
    let p = s.params(ps_watts)?;
    let fading = FadingParams { seed: s.seed, ..Default::default() };
    let ch = generate_channels_for(&NodeGeometry::reference_scenario(), &fading, s.n, realization)?;
    let o = optimize(&ch, &p, A1_INIT, init_seed(s.seed, realization))?;
    Ok(Summary {
        status: o.status,
        alpha1: o.split.a1(),
        rate_user: o.report.rate_user,
        rate_mc: o.report.rate_mc,
        gamma21_db: 10.0 * o.report.gamma21.log10(),
        gamma22_db: 10.0 * o.report.gamma22.log10(),
        amplitudes: o.config.trans_magnitudes(),
        message: o.message,
    })
}

fn js_err(e: sics_core::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen(js_name = rateCurve)]
#[allow(clippy::too_many_arguments)]
pub fn rate_curve_js(
    n: usize,
    gamma_th1_db: f64,
    gamma_th2_db: f64,
    n0_dbm: f64,
    seed: u64,
    ps_min: f64,
    ps_max: f64,
    points: usize,
    realizations: usize,
) -> std::result::Result<Vec<f64>, JsValue> {
    let s = Scenario { n, gamma_th1_db, gamma_th2_db, n0_dbm, seed };
    rate_curve(&s, ps_min, ps_max, points, realizations).map_err(js_err)
}

/// JSON summary of one optimized realization, amplitudes included.
#[wasm_bindgen(js_name = solveRealization)]
pub fn solve_realization_js(
    n: usize,
    gamma_th1_db: f64,
    gamma_th2_db: f64,
    n0_dbm: f64,
    seed: u64,
    ps_watts: f64,
    realization: u64,
) -> std::result::Result<String, JsValue> {
    let s = Scenario { n, gamma_th1_db, gamma_th2_db, n0_dbm, seed };
    let summary = solve_realization(&s, ps_watts, realization).map_err(js_err)?;
    serde_json::to_string(&summary).map_err(|e| JsValue::from_str(&e.to_string()))
}
