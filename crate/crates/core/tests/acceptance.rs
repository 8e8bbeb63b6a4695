//! Acceptance suite. Runs every exit criterion at its pinned tolerance,
//! prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sics_core::channel::{generate_channels_for, FadingParams, NodeGeometry};
use sics_core::harness::{run_sweep, sweep_csv, SweepConfig, SweepRow, FIGURE_N0_DBM};
use sics_core::optimizer::{optimize, verify_outcome, SolveOutcome, SolveStatus};
use sics_core::phy::{db_to_linear, dbm_to_watts, PowerSplit, SystemParams};
use sics_core::star::{build_amplitude_problem, oracle_solve, solve_amplitudes, AmplitudeProblem};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> SystemParams {
    let ps = rng.random_range(20.0..40.0);
    let g1 = db_to_linear(rng.random_range(0.0..15.0));
    let g2 = db_to_linear(rng.random_range(5.0..25.0));
    SystemParams::new(ps, dbm_to_watts(FIGURE_N0_DBM), g1, g2, n).unwrap()
}

/// Feasible random instances over the reference geometry.
fn feasible_outcomes(count: usize, seed: u64) -> Vec<(SolveOutcome, SystemParams, sics_core::channel::ChannelRealization)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geo = NodeGeometry::reference_scenario();
    let fading = FadingParams { seed, ..Default::default() };
    let sizes = [4usize, 16, 64];
    let mut out = Vec::with_capacity(count);
    let mut index = 0u64;
    while out.len() < count {
        let n = sizes[(index % 3) as usize];
        let ch = generate_channels_for(&geo, &fading, n, index).unwrap();
        let p = random_params(&mut rng, n);
        let outcome = optimize(&ch, &p, rng.random_range(0.5..0.99), index).unwrap();
        index += 1;
        if outcome.status == SolveStatus::Optimal {
            out.push((outcome, p, ch));
        }
        assert!(index < 100 * count as u64, "too few feasible instances");
    }
    out
}

fn fixed_point() -> Verdict {
    let start = Instant::now();
    let runs = feasible_outcomes(1000, 2024);
    let mut worst_a2: f64 = 0.0;
    let mut worst_s2: f64 = 0.0;
    for (o, _, _) in &runs {
        let (a, b) = (o.trace[0], o.trace[1]);
        worst_a2 = worst_a2.max((b.a2 - a.a2).abs());
        worst_s2 = worst_s2.max((b.s2 - a.s2).abs() / a.s2);
    }
    let elapsed = start.elapsed();
    let pass = runs.iter().all(|(o, _, _)| o.trace.len() == 2)
        && worst_a2 <= 1e-10
        && worst_s2 <= 1e-10
        && elapsed < Duration::from_secs(10);
    verdict(pass, format!("max |Δα₂| = {worst_a2:.2e}, max |ΔS₂|/S₂ = {worst_s2:.2e}, {elapsed:.2?}"))
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let step = 1e-3;
    let mut worst_gap_ratio: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut pass = true;
    for i in 0..100 {
        let n = 1 + i % 3;
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
        let h: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
        let q = rng.random_range(0.05..0.6) * h.iter().sum::<f64>();
        let prob = AmplitudeProblem::new(d, h, q).unwrap();
        let h_max = prob.h_cap.iter().cloned().fold(0.0, f64::max);
        let exact = solve_amplitudes(&prob, 1e-12).unwrap();
        let grid = oracle_solve(&prob, step).unwrap();
        let bound = 2.0 * step * h_max;
        let gap = (exact.objective - grid.objective).abs();
        worst_gap_ratio = worst_gap_ratio.max(gap / bound);
        worst_residual = worst_residual.max(exact.constraint_residual);
        pass &= gap <= bound && exact.constraint_residual <= 1e-10;
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    verdict(
        pass,
        format!("worst gap / bound = {worst_gap_ratio:.3}, worst residual = {worst_residual:.2e}, {elapsed:.2?}"),
    )
}

fn certification() -> Verdict {
    let runs = feasible_outcomes(500, 99);
    let mut failures = Vec::new();
    let mut worst_kkt: f64 = 0.0;
    for (o, p, ch) in &runs {
        let residuals = verify_outcome(o, ch, p).unwrap();
        let get = |prefix: &str| residuals.iter().find(|r| r.name.starts_with(prefix)).unwrap().value;
        worst_kkt = worst_kkt.max(get("KKT"));
        let ok = get("C1") <= 1e-9
            && (o.report.gamma22 / p.gamma_th2 - 1.0).abs() <= 1e-9
            && o.report.gamma21 >= p.gamma_th1
            && get("KKT") <= 1e-8
            && residuals.iter().all(|r| r.ok());
        if !ok {
            failures.push(residuals.iter().filter(|r| !r.ok()).map(|r| r.name.clone()).collect::<Vec<_>>());
        }
    }
    verdict(failures.is_empty(), format!("{} outcomes, {} failing, worst KKT {worst_kkt:.2e} {:?}", runs.len(), failures.len(), failures.first()))
}

fn analytic_example() -> Verdict {
    let prob = AmplitudeProblem::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
    let s = solve_amplitudes(&prob, 1e-12).unwrap();
    let errs = [
        (s.t[0] - 0.5).abs(),
        (s.t[1] - 0.5).abs(),
        (s.dual - 1.0 / 3f64.sqrt()).abs(),
        (s.objective - 3f64.sqrt()).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    verdict(worst <= 1e-9, format!("max abs error {worst:.2e}"))
}

fn rows_for(rows: &[SweepRow], n: usize, g2: f64) -> Vec<&SweepRow> {
    rows.iter().filter(|r| r.n_elements == n && r.gamma_th2_db == g2).collect()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn figure2_trends() -> Verdict {
    let start = Instant::now();
    let spec = SweepConfig::figure2().into_spec().unwrap();
    let report = run_sweep(&spec).unwrap();
    let elapsed = start.elapsed();
    let alpha_ok = report.rows.iter().all(|r| r.mean_alpha1 > 0.95 && r.realizations_used > 0);
    let min_alpha = report.rows.iter().map(|r| r.mean_alpha1).fold(1.0, f64::min);
    let by_power = spec
        .n_list
        .iter()
        .all(|&n| strictly_increasing(&rows_for(&report.rows, n, 20.0).iter().map(|r| r.mean_rate_user).collect::<Vec<_>>()));
    let by_n = spec.ps_grid.iter().all(|&ps| {
        let v: Vec<f64> = spec
            .n_list
            .iter()
            .map(|&n| rows_for(&report.rows, n, 20.0).into_iter().find(|r| r.ps_watts == ps).unwrap().mean_rate_user)
            .collect();
        strictly_increasing(&v)
    });
    let rate64: Vec<String> = rows_for(&report.rows, 64, 20.0).iter().map(|r| format!("{:.3}", r.mean_rate_user)).collect();
    verdict(
        alpha_ok && by_power && by_n && elapsed < Duration::from_secs(120),
        format!(
            "min mean α₁ = {min_alpha:.5}, increasing in Pₛ: {by_power}, in N: {by_n}, N=64 rates [{}], {elapsed:.2?}",
            rate64.join(", ")
        ),
    )
}

fn figure3_trends() -> Verdict {
    let spec = SweepConfig::figure3().into_spec().unwrap();
    let report = run_sweep(&spec).unwrap();
    let at = |g2: f64, ps: f64| {
        rows_for(&report.rows, 64, g2).into_iter().find(|r| r.ps_watts == ps).unwrap().mean_rate_user
    };
    let drop = at(15.0, 40.0) - at(25.0, 40.0);
    let gain = at(5.0, 40.0) - at(5.0, 20.0);
    let monotone_threshold = spec.ps_grid.iter().all(|&ps| at(5.0, ps) >= at(15.0, ps) && at(15.0, ps) >= at(25.0, ps));
    verdict(
        (0.0..0.1).contains(&drop) && (0.5..=3.5).contains(&gain) && monotone_threshold,
        format!("γth2 15→25 dB drop = {drop:.5}, Pₛ 20→40 W gain at 5 dB = {gain:.3}, nonincreasing in γth2: {monotone_threshold}"),
    )
}

fn per_realization_monotonicity() -> Verdict {
    let spec = SweepConfig::figure2().into_spec().unwrap();
    let fading = FadingParams { seed: spec.master_seed, ..spec.fading };
    let mut violations = 0;
    let mut compared = 0;
    for r in 0..100u64 {
        let ch = generate_channels_for(&spec.geometry, &fading, 64, r).unwrap();
        let seed = sics_core::harness::init_seed(spec.master_seed, r);
        let rate = |ps: f64| {
            let p = SystemParams::new(ps, spec.n0_watts, db_to_linear(10.0), db_to_linear(20.0), 64).unwrap();
            optimize(&ch, &p, spec.a1_init, seed).unwrap()
        };
        let (lo, hi) = (rate(20.0), rate(40.0));
        if lo.status == SolveStatus::Optimal && hi.status == SolveStatus::Optimal {
            compared += 1;
            if hi.report.rate_user < lo.report.rate_user {
                violations += 1;
            }
        }
    }
    verdict(violations == 0 && compared == 100, format!("{compared} realizations compared, {violations} violations"))
}

fn complexity() -> Verdict {
    let geo = NodeGeometry::reference_scenario();
    let fading = FadingParams::default();
    let sizes = [64usize, 256, 1024];
    let mut times = Vec::new();
    for &n in &sizes {
        let ch = generate_channels_for(&geo, &fading, n, 0).unwrap();
        let p = SystemParams::new(30.0, dbm_to_watts(FIGURE_N0_DBM), 10.0, 100.0, n).unwrap();
        // α₂ giving a target at half the transmit capacity
        let probe = build_amplitude_problem(&ch, PowerSplit::from_a2(0.5).unwrap(), &p).unwrap();
        let q = 0.5 * probe.capacity();
        let a2 = p.gamma_th2 * p.n0_watts / (q * q * p.ps_watts);
        let prob = build_amplitude_problem(&ch, PowerSplit::from_a2(a2).unwrap(), &p).unwrap();
        let reps = 20_000 / n.max(1) + 20;
        let mut best = Duration::MAX;
        for _ in 0..7 {
            let t0 = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(solve_amplitudes(std::hint::black_box(&prob), p.tol_bisect).unwrap());
            }
            best = best.min(t0.elapsed() / reps as u32);
        }
        times.push(best.as_secs_f64());
    }
    let ratio_total = times[2] / times[0];
    let ratio_step = times[2] / times[1];
    let pass = ratio_total <= (1024.0f64 / 64.0).powi(2) && ratio_step <= (1024.0f64 / 256.0).powi(2);
    verdict(
        pass,
        format!(
            "per-solve {:.2e}s / {:.2e}s / {:.2e}s; t(1024)/t(64) = {ratio_total:.1} (quadratic bound 256)",
            times[0], times[1], times[2]
        ),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    let cfg = SweepConfig {
        n_list: vec![16, 64],
        gamma_th2_list_db: vec![5.0, 20.0],
        realizations: 20,
        master_seed: 31,
        ..SweepConfig::figure2()
    };
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    let run = |workers: usize| {
        let mut spec = SweepConfig::load(&path).unwrap().into_spec().unwrap();
        spec.workers = workers;
        let (_, text) = sweep_csv(&spec).unwrap();
        let out = dir.path().join(format!("out_{workers}.csv"));
        std::fs::write(&out, &text).unwrap();
        std::fs::read(&out).unwrap()
    };
    let a = run(1);
    let b = run(1);
    let c = run(4);
    verdict(a == b && a == c, format!("{} bytes, repeat identical: {}, 1 vs 4 workers identical: {}", a.len(), a == b, a == c))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 fixed point after one pass", fixed_point),
        ("2 solver matches grid oracle", oracle_equivalence),
        ("3 constraint certification", certification),
        ("4 closed-form amplitude instance", analytic_example),
        ("5 rate / α₁ trends against Pₛ and N", figure2_trends),
        ("6 rate trends against γth2", figure3_trends),
        ("7 per-realization monotonicity in Pₛ", per_realization_monotonicity),
        ("8 amplitude solver scaling in N", complexity),
        ("9 byte-identical sweeps", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        println!("{} [{name}] {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
