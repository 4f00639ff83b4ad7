//! Artifact writers: the per-run CSV time series, JSON summaries, the sweep
//! phase diagram, and the inequality battery table.
//!
//! Floating point is serialized with 17 significant digits so re-parsing is
//! lossless and byte-identical across reruns. Every file goes to a temporary
//! name first and is renamed into place on success.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::{self, TheoryInputs};
use crate::config::Tolerances;
use crate::functionals::FunctionalRecord;
use crate::solver::{RunReport, RunStatus, SimConfig, Snapshot};

/// 17 significant digits: round-trips any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes bytes to `path` through a temporary sibling and an atomic rename;
/// a crash mid-write leaves no partial artifact under the final name.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// One evaluated row of the series: the functional record plus the theory
/// envelopes at that time and the names of any failed checks.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub dt: f64,
    #[serde(flatten)]
    pub record: FunctionalRecord,
    pub envelope_rhs: f64,
    pub p_bound: f64,
    pub ent_lower: f64,
    pub ent_upper: Option<f64>,
    pub ent_decay_linear: Option<f64>,
    pub ent_decay_strong: Option<f64>,
    /// Failed checks, comma-free names; empty when the row is clean.
    pub flags: Vec<String>,
}

/// Metadata pinned into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesMetadata {
    pub config_hash: String,
    pub code_version: String,
    pub rho_max: f64,
    pub n_cells: usize,
    pub inputs: TheoryInputs,
}

/// The full diagnostics table of one run.
#[derive(Debug, Clone, Serialize)]
pub struct TimeSeries {
    pub metadata: SeriesMetadata,
    pub rows: Vec<SeriesRow>,
}

/// Evaluates bounds and per-row flags for a finished run.
///
/// The theory inputs are measured from the run's own initial snapshot, so
/// every flag is recomputable from the emitted numbers alone.
pub fn build_series(
    snapshots: &[Snapshot],
    initial: &FunctionalRecord,
    sim: &SimConfig,
    tol: &Tolerances,
    config_hash: String,
) -> TimeSeries {
    let inputs = TheoryInputs::new(
        sim.chi.max(f64::MIN_POSITIVE),
        initial.mass,
        initial.p_moment.max(0.0),
        initial.entropy,
        initial.free_energy,
    );
    let subcritical = inputs.chi_m() < 8.0 * std::f64::consts::PI;
    let m = inputs.mass;
    let abs_ent0 = initial.entropy.abs().max(1.0);
    let mtk_cap = bounds::abs_log_mass_bound(&inputs, sim.t_end, 1.0).ok();

    let mut rows: Vec<SeriesRow> = Vec::with_capacity(snapshots.len());
    let mut prev: Option<(f64, Vec<(f64, f64)>)> = None;
    for snap in snapshots {
        let r = &snap.record;
        let t = snap.t;
        let envelope_rhs = bounds::virial_envelope(&inputs, t);
        let p_bound = bounds::p_moment_bound(&inputs, t);
        let ent_lower = bounds::entropy_lower_bound(&inputs, t);
        let ent_upper = if subcritical {
            bounds::entropy_upper_bound(&inputs, sim.t_end).ok()
        } else {
            None
        };
        let (ent_decay_linear, ent_decay_strong) = bounds::entropy_decay_bounds(&inputs, t);

        let mut flags = Vec::new();
        let iplusm = r.p_moment + m;
        if iplusm * iplusm > envelope_rhs * (1.0 + tol.virial_rel) {
            flags.push("virial".to_string());
        }
        if r.p_moment > p_bound * (1.0 + tol.p_bound_rel) + 1e-12 {
            flags.push("p_bound".to_string());
        }
        let jensen = 2.0 * m * (r.p_moment.max(0.0) / (2.0 * m)).sqrt().asinh();
        if r.rho_moment > jensen * (1.0 + tol.exact_rel) {
            flags.push("rho_jensen".to_string());
        }
        if jensen > bounds::rho_moment_bound(&inputs, t) * (1.0 + tol.virial_rel) + 1e-12 {
            flags.push("rho_bound".to_string());
        }
        if r.entropy < ent_lower - tol.entropy_rel * abs_ent0 {
            flags.push("ent_lower".to_string());
        }
        if let Some(upper) = ent_upper {
            if r.entropy > upper + tol.entropy_rel * abs_ent0 {
                flags.push("ent_upper".to_string());
            }
        }
        let decay_cap = match (ent_decay_linear, ent_decay_strong) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            _ => None,
        };
        if let Some(cap) = decay_cap {
            if r.entropy > cap + tol.entropy_rel * abs_ent0 {
                flags.push("ent_decay".to_string());
            }
        }
        if let Some((fe_prev, lq_prev)) = &prev {
            if r.free_energy > fe_prev + tol.monotone_step_rel * fe_prev.abs() && sim.chi > 0.0 {
                flags.push("fe_mono".to_string());
            }
            for (q, norm) in &r.lq_norms {
                if inputs.chi_m() <= bounds::lq_monotonicity_threshold(*q) {
                    if let Some((_, p_norm)) = lq_prev.iter().find(|(pq, _)| pq == q) {
                        if *norm > p_norm * (1.0 + tol.monotone_step_rel) {
                            flags.push(format!("lq_mono_{q}"));
                        }
                    }
                }
            }
        }
        if let Some(cap) = mtk_cap {
            for (k, mtk) in &r.m_t_k {
                if *k > 1.0 && mtk * k.ln() > cap * (1.0 + tol.exact_rel) {
                    flags.push(format!("mtk_{k}"));
                }
            }
        }

        prev = Some((r.free_energy, r.lq_norms.clone()));
        rows.push(SeriesRow {
            t,
            dt: snap.dt,
            record: r.clone(),
            envelope_rhs,
            p_bound,
            ent_lower,
            ent_upper,
            ent_decay_linear,
            ent_decay_strong,
            flags,
        });
    }
    TimeSeries {
        metadata: SeriesMetadata {
            config_hash,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            rho_max: sim.rho_max,
            n_cells: sim.n_cells,
            inputs,
        },
        rows,
    }
}

impl TimeSeries {
    /// Stable-schema CSV: one row per snapshot.
    pub fn to_csv(&self) -> String {
        let mut header =
            String::from("t,mass,p_moment,rho_moment,entropy,fisher,interaction,free_energy");
        let qs: Vec<f64> = self
            .rows
            .first()
            .map(|r| r.record.lq_norms.iter().map(|(q, _)| *q).collect())
            .unwrap_or_default();
        for q in &qs {
            header.push_str(&format!(",lq_{q}"));
        }
        header.push_str(",linf,envelope_rhs,p_bound,ent_lower,ent_upper,flags\n");
        let mut out = header;
        for row in &self.rows {
            out.push_str(&fmt_f64(row.t));
            for v in [
                row.record.mass,
                row.record.p_moment,
                row.record.rho_moment,
                row.record.entropy,
                row.record.fisher,
                row.record.interaction,
                row.record.free_energy,
            ] {
                out.push(',');
                out.push_str(&fmt_f64(v));
            }
            for (_, v) in &row.record.lq_norms {
                out.push(',');
                out.push_str(&fmt_f64(*v));
            }
            out.push(',');
            out.push_str(&fmt_f64(row.record.linf));
            out.push(',');
            out.push_str(&fmt_f64(row.envelope_rhs));
            out.push(',');
            out.push_str(&fmt_f64(row.p_bound));
            out.push(',');
            out.push_str(&fmt_f64(row.ent_lower));
            out.push(',');
            out.push_str(&row.ent_upper.map(fmt_f64).unwrap_or_default());
            out.push(',');
            out.push_str(&row.flags.join(";"));
            out.push('\n');
        }
        out
    }

    /// Total number of failed per-row checks.
    pub fn violation_count(&self) -> usize {
        self.rows.iter().map(|r| r.flags.len()).sum()
    }
}

/// The summary written next to each series.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub report: RunReport,
    pub config_hash: String,
    pub inputs: TheoryInputs,
    pub lambda_star: f64,
    pub t_bl: Option<f64>,
    /// detected blow-up time over T_bl, when both exist
    pub blowup_time_ratio: Option<f64>,
    pub violated_checks: usize,
    pub final_record: FunctionalRecord,
}

pub fn run_summary(series: &TimeSeries, status: &RunStatus, report: &RunReport) -> RunSummary {
    let inputs = series.metadata.inputs;
    let t_bl = bounds::blowup_time_bound(&inputs);
    RunSummary {
        status: status.clone(),
        report: report.clone(),
        config_hash: series.metadata.config_hash.clone(),
        inputs,
        lambda_star: bounds::lambda_star(inputs.chi, inputs.mass),
        t_bl,
        blowup_time_ratio: match (status.blowup_time, t_bl) {
            (Some(tb), Some(bound)) if bound > 0.0 => Some(tb / bound),
            _ => None,
        },
        violated_checks: series.violation_count(),
        final_record: series.rows.last().map(|r| r.record.clone()).unwrap(),
    }
}

/// One row of the sweep phase diagram.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseRow {
    pub chi: f64,
    pub mass: f64,
    pub i0: f64,
    pub chi_m_over_8pi: f64,
    pub lambda_star: f64,
    /// subcritical | blowup_condition | uncovered
    pub predicted: String,
    pub t_bl: Option<f64>,
    pub outcome: String,
    pub blowup_time: Option<f64>,
    pub t_final: f64,
    pub error: Option<String>,
}

pub fn phase_rows_to_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(
        "chi,mass,i0,chi_m_over_8pi,lambda_star,predicted,t_bl,outcome,blowup_time,t_final,error\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.chi),
            fmt_f64(r.mass),
            fmt_f64(r.i0),
            fmt_f64(r.chi_m_over_8pi),
            fmt_f64(r.lambda_star),
            r.predicted,
            r.t_bl.map(fmt_f64).unwrap_or_default(),
            r.outcome,
            r.blowup_time.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.t_final),
            r.error.clone().unwrap_or_default(),
        ));
    }
    out
}

/// One row of the inequality battery.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryRow {
    pub op: String,
    pub density: String,
    pub seed: u64,
    pub deficit: f64,
    pub mc_error: f64,
    pub samples: u64,
    pub pass: bool,
}

pub fn battery_rows_to_csv(rows: &[BatteryRow]) -> String {
    let mut out = String::from("op,density,seed,deficit,mc_error,samples,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.op,
            r.density,
            r.seed,
            fmt_f64(r.deficit),
            fmt_f64(r.mc_error),
            r.samples,
            r.pass
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips() {
        for x in [1.0, -0.3333333333333333, 2.0071508082103043e17, 1e-300] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn atomic_write_leaves_no_tmp() {
        let dir = std::env::temp_dir().join(format!("hyperks-test-{}", std::process::id()));
        let path = dir.join("artifact.csv");
        write_atomic(&path, b"a,b\n1,2\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        assert!(!dir.join("artifact.csv.tmp").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
