//! Command implementations behind the `hyperks` binary: single runs with
//! live bound checking, (chi, M, I0) sweeps, bound reports, and the
//! inequality battery.
//!
//! Exit-code policy: 0 success, 1 check failure, 2 config error, 3 I/O
//! failure. Sweep cells and battery rows run on a worker pool; results are
//! gathered in declaration order so reruns are byte-identical.

use std::path::Path;

use rayon::prelude::*;

use crate::bounds::{self, BoundsReport, TheoryInputs};
use crate::config::{config_hash, BatteryConfig, Command, ExperimentConfig};
use crate::error::Result;
use crate::geometry::DiskPoint;
use crate::lab::density::TestDensity;
use crate::lab::{self, Budget, DeficitReport};
use crate::output::{
    battery_rows_to_csv, build_series, phase_rows_to_csv, run_summary, write_atomic, BatteryRow,
    PhaseRow,
};
use crate::solver::{run_simulation, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;
pub const EXIT_IO_ERROR: i32 = 3;

/// Runs the configured command. `jobs` sizes the worker pool (0 = default).
pub fn execute(config: &ExperimentConfig, jobs: usize) -> i32 {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("failed to build worker pool: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    pool.install(|| match config.command {
        Command::Simulate => cmd_simulate(config),
        Command::Sweep => cmd_sweep(config),
        Command::Bounds => cmd_bounds(config),
        Command::Inequalities => cmd_inequalities(config),
    })
}

/// Single simulation: writes series.csv and summary.json.
pub fn cmd_simulate(config: &ExperimentConfig) -> i32 {
    let sim = config.sim.as_ref().expect("validated simulate config");
    let result = match run_simulation(sim) {
        Ok(r) => r,
        Err(
            e @ (crate::error::Error::InvalidParameter { .. }
            | crate::error::Error::MassTruncated { .. }),
        ) => {
            eprintln!("bad run configuration: {e}");
            return EXIT_CONFIG_ERROR;
        }
        Err(e) => {
            eprintln!("simulation failed: {e}");
            return EXIT_CHECK_FAILURE;
        }
    };
    let series = build_series(
        &result.series,
        &result.initial,
        sim,
        &config.tolerances,
        config_hash(config),
    );
    let summary = run_summary(&series, &result.status, &result.report);
    let dir = Path::new(&config.output);
    if let Err(e) = write_atomic(&dir.join("series.csv"), series.to_csv().as_bytes()) {
        eprintln!("cannot write series.csv: {e}");
        return EXIT_IO_ERROR;
    }
    let summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    if let Err(e) = write_atomic(&dir.join("summary.json"), summary_json.as_bytes()) {
        eprintln!("cannot write summary.json: {e}");
        return EXIT_IO_ERROR;
    }
    println!(
        "outcome: {:?} at t = {:.6} ({} snapshots, {} violated checks)",
        result.status.outcome,
        result.status.t_final,
        series.rows.len(),
        series.violation_count()
    );
    // hard invariants: exact mass conservation and positivity
    if result.report.mass_drift_rel > 1e-12 {
        eprintln!(
            "mass drift {:.3e} exceeds 1e-12",
            result.report.mass_drift_rel
        );
        return EXIT_CHECK_FAILURE;
    }
    if result.report.min_density < 0.0 {
        eprintln!("negative density {:.3e}", result.report.min_density);
        return EXIT_CHECK_FAILURE;
    }
    EXIT_OK
}

/// Regime predicted by the closed forms for one (chi, M, I0) cell.
pub fn predicted_regime(chi: f64, mass: f64, i0: f64) -> &'static str {
    let chi_m = chi * mass;
    let threshold = 8.0 * std::f64::consts::PI;
    if chi_m > threshold {
        if i0 < bounds::lambda_star(chi, mass) {
            "blowup_condition"
        } else {
            "uncovered"
        }
    } else if chi_m == threshold {
        "critical"
    } else {
        "subcritical"
    }
}

/// Sweep over the (chi, M, I0) axes: one solver run per cell, one phase
/// diagram row each. Cell failures are recorded and the sweep continues.
pub fn cmd_sweep(config: &ExperimentConfig) -> i32 {
    let sweep = config.sweep.as_ref().expect("validated sweep config");
    let cells = sweep.resolve();
    let rows: Vec<PhaseRow> = cells
        .par_iter()
        .map(|sim| {
            let i0 = match &sim.initial {
                crate::solver::InitialSpec::Gaussian { s } => s * sim.mass,
                _ => f64::NAN,
            };
            let inputs = TheoryInputs::new(sim.chi, sim.mass, i0, 0.0, 0.0);
            let mut row = PhaseRow {
                chi: sim.chi,
                mass: sim.mass,
                i0,
                chi_m_over_8pi: sim.chi * sim.mass / (8.0 * std::f64::consts::PI),
                lambda_star: bounds::lambda_star(sim.chi, sim.mass),
                predicted: predicted_regime(sim.chi, sim.mass, i0).to_string(),
                t_bl: bounds::blowup_time_bound(&inputs),
                outcome: String::new(),
                blowup_time: None,
                t_final: 0.0,
                error: None,
            };
            match run_simulation(sim) {
                Ok(result) => {
                    row.outcome = match result.status.outcome {
                        Outcome::Completed => "completed".to_string(),
                        Outcome::BlowupDetected => "blowup_detected".to_string(),
                        Outcome::BudgetExhausted => "budget_exhausted".to_string(),
                    };
                    row.blowup_time = result.status.blowup_time;
                    row.t_final = result.status.t_final;
                }
                Err(e) => {
                    row.outcome = "error".to_string();
                    row.error = Some(e.to_string().replace(',', ";"));
                }
            }
            row
        })
        .collect();
    let dir = Path::new(&config.output);
    if let Err(e) = write_atomic(
        &dir.join("phase_diagram.csv"),
        phase_rows_to_csv(&rows).as_bytes(),
    ) {
        eprintln!("cannot write phase_diagram.csv: {e}");
        return EXIT_IO_ERROR;
    }
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    println!("sweep: {} cells, {} failed", rows.len(), failures);
    EXIT_OK
}

/// Bound reports for a list of input tuples, order preserved.
pub fn cmd_bounds(config: &ExperimentConfig) -> i32 {
    let tuples = config.bounds.as_ref().expect("validated bounds config");
    let reports: Vec<BoundsReport> = tuples
        .iter()
        .map(|t| BoundsReport::evaluate(&TheoryInputs::new(t.chi, t.mass, t.i0, t.ent0, t.f0)))
        .collect();
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    let dir = Path::new(&config.output);
    if let Err(e) = write_atomic(&dir.join("bounds.json"), json.as_bytes()) {
        eprintln!("cannot write bounds.json: {e}");
        return EXIT_IO_ERROR;
    }
    println!("bounds: {} tuples evaluated", reports.len());
    EXIT_OK
}

/// Whether an op needs a radial C^1 profile (derivative-based functionals)
/// or tolerates only radial densities (strong kernel singularities).
fn op_constraints(op: &str) -> (bool, bool) {
    match op {
        "mugelli_talenti" | "beckner" => (true, true),
        "hls_1.5" => (false, true),
        _ => (false, false),
    }
}

/// Deterministic battery densities for one op: families cycle through
/// centered Gaussians, annuli, Moebius-translated Gaussians, and two-bump
/// mixtures; parameters are drawn from the row RNG so the whole battery is a
/// pure function of (op, index, seed).
pub fn battery_density(op: &str, index: usize, seed: u64) -> (TestDensity, String) {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
        seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (op.len() as u64) << 32,
    );
    let (needs_c1, radial_only) = op_constraints(op);
    let s: f64 = rng.gen_range(0.05..1.5);
    let mass: f64 = rng.gen_range(0.5..4.0);
    let variant = if needs_c1 { index % 2 } else { index % 4 };
    match variant {
        0 => {
            let d = TestDensity::gaussian(s, mass).unwrap();
            (d, format!("gaussian(s={s:.4},m={mass:.4})"))
        }
        1 if needs_c1 => {
            // radial C^1 mixture of two concentric gaussians
            let s2: f64 = rng.gen_range(0.05..1.5);
            let d = TestDensity::mixture(
                vec![
                    TestDensity::gaussian(s, 1.0).unwrap(),
                    TestDensity::gaussian(s2, 1.0).unwrap(),
                ],
                vec![0.5 * mass, 0.5 * mass],
            )
            .unwrap();
            (d, format!("radial_mix(s={s:.4},s2={s2:.4},m={mass:.4})"))
        }
        1 => {
            let a: f64 = rng.gen_range(0.0..1.5);
            let w: f64 = rng.gen_range(0.2..1.5);
            let d = TestDensity::annulus(a, a + w, mass).unwrap();
            (d, format!("annulus(a={a:.4},b={:.4},m={mass:.4})", a + w))
        }
        2 if radial_only => {
            let s2: f64 = rng.gen_range(0.05..1.5);
            let d = TestDensity::mixture(
                vec![
                    TestDensity::gaussian(s, 1.0).unwrap(),
                    TestDensity::gaussian(s2, 1.0).unwrap(),
                ],
                vec![0.6 * mass, 0.4 * mass],
            )
            .unwrap();
            (d, format!("radial_mix(s={s:.4},s2={s2:.4},m={mass:.4})"))
        }
        2 => {
            let rho: f64 = rng.gen_range(0.2..1.5);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let center = DiskPoint::from_rho_theta(rho, theta).unwrap();
            let d = TestDensity::translated(TestDensity::gaussian(s, mass).unwrap(), center);
            (d, format!("translated(s={s:.4},m={mass:.4},rho={rho:.4})"))
        }
        _ if radial_only => {
            let d = TestDensity::gaussian(s, mass).unwrap();
            (d, format!("gaussian(s={s:.4},m={mass:.4})"))
        }
        _ => {
            let rho: f64 = rng.gen_range(0.3..1.2);
            let th1: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let th2 = th1 + std::f64::consts::PI;
            let c1 = DiskPoint::from_rho_theta(rho, th1).unwrap();
            let c2 = DiskPoint::from_rho_theta(rho, th2).unwrap();
            let d = TestDensity::mixture(
                vec![
                    TestDensity::translated(TestDensity::gaussian(s, 1.0).unwrap(), c1),
                    TestDensity::translated(TestDensity::gaussian(s, 1.0).unwrap(), c2),
                ],
                vec![0.5 * mass, 0.5 * mass],
            )
            .unwrap();
            (d, format!("two_bump(s={s:.4},m={mass:.4},rho={rho:.4})"))
        }
    }
}

/// Runs one battery row.
pub fn battery_eval(op: &str, density: &TestDensity, budget: &Budget) -> Result<DeficitReport> {
    match op {
        "log_hls" => lab::log_hls_deficit(density, budget),
        "sinh_log_hls" => lab::sinh_log_hls_deficit(density, budget),
        "hls_0.5" => lab::hls_ratio(density, density, 0.5, budget),
        "hls_1" => lab::hls_ratio(density, density, 1.0, budget),
        "hls_1.5" => lab::hls_ratio(density, density, 1.5, budget),
        "mugelli_talenti" => lab::mugelli_talenti_deficit(density),
        "beckner" => lab::beckner_deficit(density),
        "relative_entropy" => {
            // reference scale derived from the density's own p-moment
            let s = (lab::density_p_moment(density, budget)? / density.mass()).max(1e-3);
            lab::relative_entropy_check(density, s, budget)
        }
        other => Err(crate::error::Error::InvalidParameter {
            name: "op",
            message: format!("unknown inequality op `{other}`"),
        }),
    }
}

/// Battery pass rule: deficit >= -3 sigma - tol.
pub fn battery_pass(deficit: f64, mc_error: f64, tol: f64) -> bool {
    deficit >= -3.0 * mc_error - tol
}

/// Full battery for a config: rows in (op, index) order.
pub fn run_battery(battery: &BatteryConfig, deficit_tol: f64) -> Vec<BatteryRow> {
    let ops: Vec<&str> = battery
        .ops
        .iter()
        .map(|s| s.as_str())
        .filter(|op| crate::config::KNOWN_OPS.contains(op))
        .collect();
    let tasks: Vec<(usize, &str)> = ops
        .iter()
        .flat_map(|op| (0..battery.densities).map(move |i| (i, *op)))
        .collect();
    tasks
        .par_iter()
        .map(|(index, op)| {
            let (density, label) = battery_density(op, *index, battery.seed);
            let row_seed = battery.seed ^ ((*index as u64) << 20) ^ (op.len() as u64);
            let budget = Budget::new(battery.samples, row_seed);
            match battery_eval(op, &density, &budget) {
                Ok(rep) => BatteryRow {
                    op: op.to_string(),
                    density: label,
                    seed: row_seed,
                    deficit: rep.value,
                    mc_error: rep.mc_error,
                    samples: rep.nodes_or_samples,
                    pass: battery_pass(rep.value, rep.mc_error, deficit_tol),
                },
                Err(e) => BatteryRow {
                    op: op.to_string(),
                    density: format!("{label} [error: {e}]").replace(',', ";"),
                    seed: row_seed,
                    deficit: f64::NAN,
                    mc_error: f64::NAN,
                    samples: 0,
                    pass: false,
                },
            }
        })
        .collect()
}

/// Inequality battery: writes inequalities.csv; exit 1 iff any row fails.
pub fn cmd_inequalities(config: &ExperimentConfig) -> i32 {
    let battery = config
        .inequalities
        .as_ref()
        .expect("validated battery config");
    let rows = run_battery(battery, config.tolerances.deficit_tol);
    let passed = rows.iter().filter(|r| r.pass).count();
    let dir = Path::new(&config.output);
    if let Err(e) = write_atomic(
        &dir.join("inequalities.csv"),
        battery_rows_to_csv(&rows).as_bytes(),
    ) {
        eprintln!("cannot write inequalities.csv: {e}");
        return EXIT_IO_ERROR;
    }
    println!(
        "inequalities: {passed}/{} rows pass ({:.1}%)",
        rows.len(),
        100.0 * passed as f64 / rows.len().max(1) as f64
    );
    if passed == rows.len() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILURE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_labels() {
        let pi = std::f64::consts::PI;
        assert_eq!(predicted_regime(1.0, 4.0 * pi, 1.0), "subcritical");
        assert_eq!(predicted_regime(1.0, 16.0 * pi, 10.0), "blowup_condition");
        assert_eq!(predicted_regime(1.0, 16.0 * pi, 30.0), "uncovered");
        assert_eq!(predicted_regime(1.0, 8.0 * pi, 1.0), "critical");
    }

    #[test]
    fn battery_rows_are_deterministic() {
        let battery = BatteryConfig {
            ops: vec!["relative_entropy".to_string()],
            densities: 4,
            seed: 12,
            samples: 2000,
        };
        let a = run_battery(&battery, 1e-6);
        let b = run_battery(&battery, 1e-6);
        assert_eq!(battery_rows_to_csv(&a), battery_rows_to_csv(&b));
        assert!(a.iter().all(|r| r.pass), "{a:?}");
    }

    #[test]
    fn inverted_orientation_is_flagged() {
        // harness self-test: a deficit with the wrong sign must fail the rule
        let good = 0.5;
        let inverted = -good;
        assert!(battery_pass(good, 0.0, 1e-6));
        assert!(!battery_pass(inverted, 0.0, 1e-6));
        assert!(!battery_pass(-1.0, 0.1, 1e-6));
        // a small negative excursion within 3 sigma still passes
        assert!(battery_pass(-0.02, 0.01, 1e-6));
    }
}
