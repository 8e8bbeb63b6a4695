//! Monte Carlo sweeps over transmit power, surface size and control SNR
//! threshold.
//!
//! Realization `r` of a sweep draws its channel from substream `r` of the
//! master seed and its optimizer start from a sibling substream, so every
//! grid point with the same element count sees the same channel set and the
//! result does not depend on how work is scheduled across threads.

mod config;
mod csv_io;

pub use config::{SweepConfig, FIGURE_N0_DBM};
pub use csv_io::{read_csv, render_csv, write_csv, CSV_HEADER};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{generate_channels_for, FadingParams, NodeGeometry};
use crate::error::{Error, Result};
use crate::optimizer::{optimize, SolveStatus};
use crate::phy::{db_to_linear, SystemParams};
use crate::rng::{realization_stream, Purpose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub geometry: NodeGeometry,
    pub fading: FadingParams,
    pub ps_grid: Vec<f64>,
    pub n_list: Vec<usize>,
    pub gamma_th1_db: f64,
    pub gamma_th2_list_db: Vec<f64>,
    pub n0_watts: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub a1_init: f64,
    pub max_iters: usize,
    pub listing_scaling: bool,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub output_path: String,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.geometry.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.fading.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.ps_grid.is_empty() || self.n_list.is_empty() || self.gamma_th2_list_db.is_empty() {
            return bad("ps_grid_watts, n_list and gamma_th2_list_db must be nonempty".into());
        }
        if self.ps_grid.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return bad("transmit powers must be positive".into());
        }
        if !self.ps_grid.windows(2).all(|w| w[1] > w[0]) {
            return bad("ps_grid_watts must be strictly increasing".into());
        }
        if self.n_list.contains(&0) {
            return bad("element counts must be at least 1".into());
        }
        if !(self.a1_init > 0.0 && self.a1_init < 1.0) {
            return bad(format!("a1_init = {} outside (0, 1)", self.a1_init));
        }
        for p in self.system_params_grid() {
            p.map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn system_params(&self, n: usize, gamma_th2_db: f64, ps: f64) -> Result<SystemParams> {
        let mut p = SystemParams::new(ps, self.n0_watts, db_to_linear(self.gamma_th1_db), db_to_linear(gamma_th2_db), n)?;
        p.max_iters = self.max_iters;
        p.listing_scaling = self.listing_scaling;
        p.validate()?;
        Ok(p)
    }

    fn system_params_grid(&self) -> impl Iterator<Item = Result<SystemParams>> + '_ {
        self.n_list.iter().flat_map(move |&n| {
            self.gamma_th2_list_db
                .iter()
                .flat_map(move |&g| self.ps_grid.iter().map(move |&ps| self.system_params(n, g, ps)))
        })
    }
}

/// Averages for one `(Pₛ, N, γth2)` grid point. Means are taken over
/// realizations that solved to optimality; NaN when there were none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ps_watts: f64,
    pub n_elements: usize,
    pub gamma_th2_db: f64,
    pub mean_rate_user: f64,
    pub mean_alpha1: f64,
    pub feasible_fraction: f64,
    pub mean_rate_mc: f64,
    pub realizations_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Realizations (summed over grid points) with no feasible configuration.
    pub infeasible: usize,
    /// Realizations (summed over grid points) where the solver failed.
    pub solver_failures: usize,
}

#[derive(Clone, Copy)]
struct PointResult {
    status: SolveStatus,
    rate_user: f64,
    alpha1: f64,
    rate_mc: f64,
}

/// Seed of the optimizer's random start for realization `r`.
pub fn init_seed(master_seed: u64, realization: u64) -> u64 {
    realization_stream(master_seed, realization, Purpose::Initialization).random()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let fading = FadingParams { seed: spec.master_seed, ..spec.fading };
    let points: Vec<(f64, f64)> = spec
        .gamma_th2_list_db
        .iter()
        .flat_map(|&g| spec.ps_grid.iter().map(move |&ps| (g, ps)))
        .collect();
    let jobs: Vec<(usize, u64)> = spec
        .n_list
        .iter()
        .flat_map(|&n| (0..spec.realizations as u64).map(move |r| (n, r)))
        .collect();

    let run_job = |&(n, r): &(usize, u64)| -> Result<Vec<PointResult>> {
        let ch = generate_channels_for(&spec.geometry, &fading, n, r)?;
        let seed = init_seed(spec.master_seed, r);
        points
            .iter()
            .map(|&(g, ps)| {
                let p = spec.system_params(n, g, ps)?;
                let out = optimize(&ch, &p, spec.a1_init, seed)?;
                Ok(PointResult {
                    status: out.status,
                    rate_user: out.report.rate_user,
                    alpha1: out.split.a1(),
                    rate_mc: out.report.rate_mc,
                })
            })
            .collect()
    };
    let results: Vec<Vec<PointResult>> = execute(spec.workers, &jobs, run_job)?;

    let mut report = SweepReport { rows: Vec::new(), infeasible: 0, solver_failures: 0 };
    for (block, &n) in results.chunks(spec.realizations).zip(&spec.n_list) {
        for (j, &(g, ps)) in points.iter().enumerate() {
            let (mut rate, mut alpha, mut rate_mc, mut used) = (0.0, 0.0, 0.0, 0usize);
            for per_realization in block {
                let x = per_realization[j];
                match x.status {
                    SolveStatus::Optimal => {
                        rate += x.rate_user;
                        alpha += x.alpha1;
                        rate_mc += x.rate_mc;
                        used += 1;
                    }
                    SolveStatus::Infeasible => report.infeasible += 1,
                    SolveStatus::SolverFailure => report.solver_failures += 1,
                }
            }
            let mean = |s: f64| if used > 0 { s / used as f64 } else { f64::NAN };
            report.rows.push(SweepRow {
                ps_watts: ps,
                n_elements: n,
                gamma_th2_db: g,
                mean_rate_user: mean(rate),
                mean_alpha1: mean(alpha),
                feasible_fraction: used as f64 / spec.realizations as f64,
                mean_rate_mc: mean(rate_mc),
                realizations_used: used,
            });
        }
    }
    Ok(report)
}

/// Runs the sweep and renders the CSV document, including a comment line
/// that records the link budget and model settings of the run. The worker
/// count is deliberately left out so the bytes do not depend on it.
pub fn sweep_csv(spec: &SweepSpec) -> Result<(SweepReport, String)> {
    let report = run_sweep(spec)?;
    let f = &spec.fading;
    let comment = format!(
        "n0_watts={:e} gamma_th1_db={} master_seed={} realizations={} a1_init={} max_iters={} \
         ref_loss_db={} exp_bs_ris={} exp_ris_ue={} exp_ris_mc={} rician_k_db={} listing_scaling={} \
         infeasible={} solver_failures={}",
        spec.n0_watts,
        spec.gamma_th1_db,
        spec.master_seed,
        spec.realizations,
        spec.a1_init,
        spec.max_iters,
        f.ref_loss_db,
        f.exp_bs_ris,
        f.exp_ris_ue,
        f.exp_ris_mc,
        f.rician_k_db,
        spec.listing_scaling,
        report.infeasible,
        report.solver_failures,
    );
    let text = render_csv(&report.rows, Some(&comment))?;
    Ok((report, text))
}

#[cfg(feature = "parallel")]
fn execute<J, T, F>(workers: usize, jobs: &[J], f: F) -> Result<Vec<T>>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    // indexed collect keeps job order regardless of completion order
    pool.install(|| jobs.par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
fn execute<J, T, F>(_workers: usize, jobs: &[J], f: F) -> Result<Vec<T>>
where
    F: Fn(&J) -> Result<T>,
{
    jobs.iter().map(f).collect()
}
