//! Mass-conserving finite-volume evolution of radial solutions of the
//! chemotaxis system on the disk.
//!
//! The density n(t, rho) obeys
//!
//!   dn/dt = Delta_H n - chi div_H(n grad_H c),   -Delta_H c = n,
//!
//! which in radial form is a flux balance through geodesic circles: the flux
//! at radius rho is 2 pi sinh(rho) (dn/drho - chi n dc/drho). The elliptic
//! step never needs a linear solve: integrating (sinh c')' = -n sinh once
//! gives dc/drho = -m(rho) / (2 pi sinh rho) with m the cumulative mass, so
//! the advective flux collapses to -chi n_upwind m(rho) and stays finite at
//! the origin.
//!
//! Diffusion is integrated implicitly (tridiagonal solve), drift explicitly
//! with slope-limited upwind faces under a positivity CFL bound; together
//! each accepted step conserves mass to rounding and preserves
//! nonnegativity.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{functional_record, FunctionalRecord};
use crate::lab::density::TestDensity;
use crate::quad;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Uniform geodesic grid on [0, rho_max] with exact hyperbolic cell volumes
/// 2 pi (cosh(e_{i+1}) - cosh(e_i)).
#[derive(Debug, Clone)]
pub struct RadialGrid {
    rho_edges: Vec<f64>,
    cell_centers: Vec<f64>,
    cell_volumes: Vec<f64>,
}

impl RadialGrid {
    pub fn build(rho_max: f64, n_cells: usize) -> Result<Self> {
        if !(rho_max > 0.0) || !rho_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho_max",
                message: format!("must be positive, got {rho_max}"),
            });
        }
        if n_cells == 0 {
            return Err(Error::InvalidParameter {
                name: "n_cells",
                message: "must be at least 1".to_string(),
            });
        }
        let h = rho_max / n_cells as f64;
        let rho_edges: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
        let cell_centers: Vec<f64> = (0..n_cells).map(|i| (i as f64 + 0.5) * h).collect();
        let cell_volumes: Vec<f64> = (0..n_cells)
            .map(|i| TWO_PI * (rho_edges[i + 1].cosh() - rho_edges[i].cosh()))
            .collect();
        Ok(Self {
            rho_edges,
            cell_centers,
            cell_volumes,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cell_centers.len()
    }

    pub fn spacing(&self) -> f64 {
        self.rho_edges[1] - self.rho_edges[0]
    }

    pub fn rho_max(&self) -> f64 {
        *self.rho_edges.last().unwrap()
    }

    pub fn edges(&self) -> &[f64] {
        &self.rho_edges
    }

    pub fn centers(&self) -> &[f64] {
        &self.cell_centers
    }

    pub fn volumes(&self) -> &[f64] {
        &self.cell_volumes
    }

    pub fn total_volume(&self) -> f64 {
        TWO_PI * (self.rho_max().cosh() - 1.0)
    }
}

/// A radial density snapshot: cell averages on a grid, at a time, with the
/// sensitivity that drives it.
#[derive(Debug, Clone)]
pub struct RadialState {
    pub grid: Arc<RadialGrid>,
    pub n: Vec<f64>,
    pub t: f64,
    pub chi: f64,
}

impl RadialState {
    pub fn mass(&self) -> f64 {
        self.n
            .iter()
            .zip(self.grid.volumes())
            .map(|(n, v)| n * v)
            .sum()
    }

    pub fn max_density(&self) -> f64 {
        self.n.iter().cloned().fold(0.0, f64::max)
    }
}

/// Initial condition families for the runner.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Gaussian { s: f64 },
    Annulus { a: f64, b: f64 },
    Mixture { parts: Vec<MixturePart> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixturePart {
    pub weight: f64,
    #[serde(flatten)]
    pub spec: InitialSpec,
}

impl InitialSpec {
    /// Materializes the spec as a density of the requested total mass.
    pub fn to_density(&self, mass: f64) -> Result<TestDensity> {
        match self {
            InitialSpec::Gaussian { s } => TestDensity::gaussian(*s, mass),
            InitialSpec::Annulus { a, b } => TestDensity::annulus(*a, *b, mass),
            InitialSpec::Mixture { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "mixture",
                        message: "mixture needs at least one part".to_string(),
                    });
                }
                let total: f64 = parts.iter().map(|p| p.weight).sum();
                let mut comps = Vec::new();
                let mut weights = Vec::new();
                for part in parts {
                    comps.push(part.spec.to_density(1.0)?);
                    weights.push(part.weight / total * mass);
                }
                TestDensity::mixture(comps, weights)
            }
        }
    }
}

fn default_dt_init() -> f64 {
    1e-4
}
fn default_dt_min() -> f64 {
    1e-12
}
fn default_dt_max() -> f64 {
    1e-3
}
fn default_safety() -> f64 {
    0.8
}
fn default_density_factor() -> f64 {
    1e6
}
fn default_dt_floor() -> f64 {
    1e-9
}
fn default_output_every() -> f64 {
    0.05
}
fn default_q_list() -> Vec<f64> {
    vec![1.5, 2.0]
}
fn default_k_list() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0]
}
fn default_max_steps() -> u64 {
    5_000_000
}
fn default_track() -> bool {
    true
}

/// Full description of a single run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub chi: f64,
    pub mass: f64,
    pub initial: InitialSpec,
    pub rho_max: f64,
    pub n_cells: usize,
    #[serde(default = "default_dt_init")]
    pub dt_init: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    pub t_end: f64,
    #[serde(default = "default_density_factor")]
    pub density_factor: f64,
    #[serde(default = "default_dt_floor")]
    pub dt_floor: f64,
    #[serde(default = "default_output_every")]
    pub output_every: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_q_list")]
    pub q_list: Vec<f64>,
    #[serde(default = "default_k_list")]
    pub k_list: Vec<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Track per-accepted-step monotone quantities (free energy in
    /// subcritical runs, ||n||_2 below its monotonicity threshold).
    #[serde(default = "default_track")]
    pub per_step_checks: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name: &'static str, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    message: msg.to_string(),
                })
            }
        };
        check(self.chi >= 0.0, "chi", "must be nonnegative")?;
        check(self.mass > 0.0, "mass", "must be positive")?;
        check(self.rho_max > 0.0, "rho_max", "must be positive")?;
        check(
            self.rho_max <= 200.0,
            "rho_max",
            "cosh overflows long before 200; keep the domain physical",
        )?;
        check(self.n_cells >= 16, "n_cells", "must be at least 16")?;
        check(self.dt_min > 0.0, "dt_min", "must be positive")?;
        check(self.t_end >= 0.0, "t_end", "must be nonnegative")?;
        check(
            self.safety > 0.0 && self.safety <= 1.0,
            "safety",
            "must lie in (0, 1]",
        )?;
        check(self.density_factor > 1.0, "density_factor", "must exceed 1")?;
        check(self.output_every > 0.0, "output_every", "must be positive")?;
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    BlowupDetected,
    BudgetExhausted,
}

/// Terminal report of a run; `blowup_time` is present exactly for detected
/// blow-ups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunStatus {
    pub outcome: Outcome,
    pub t_final: f64,
    pub blowup_time: Option<f64>,
}

/// Step-level counters accumulated along a run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub steps: u64,
    pub rejected_steps: u64,
    /// |mass(t) - mass(0)| / mass(0) at the end of the run.
    pub mass_drift_rel: f64,
    /// Smallest cell value ever seen after an accepted step.
    pub min_density: f64,
    /// Accepted steps on which the free energy rose by more than 1e-6
    /// relative (subcritical runs only; target 0).
    pub free_energy_violations: u64,
    /// Largest relative one-step free-energy increase observed.
    pub max_free_energy_rise: f64,
    /// Accepted steps on which ||n||_2 rose by more than 1e-6 relative while
    /// chi M was below its monotonicity threshold (target 0).
    pub l2_violations: u64,
    pub max_l2_rise: f64,
}

/// One diagnostics row of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// Policy time step at the moment of the snapshot (not clipped to land
    /// on output times), the value the blow-up detector sees.
    pub dt: f64,
    pub record: FunctionalRecord,
}

/// Projects an initial density spec onto the grid: per-cell Gauss quadrature
/// of the profile (split at profile discontinuities), then one global rescale
/// so the discrete mass equals the target exactly.
pub fn project_initial(config: &SimConfig, grid: &Arc<RadialGrid>) -> Result<RadialState> {
    let density = config.initial.to_density(config.mass)?;
    let outside = density.mass_fraction_beyond(grid.rho_max());
    if outside > 1e-2 {
        return Err(Error::MassTruncated { fraction: outside });
    }
    let mut cuts: Vec<f64> = density
        .breakpoints_rho()
        .into_iter()
        .filter(|r| *r > 0.0 && *r < grid.rho_max())
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut n = vec![0.0; grid.n_cells()];
    for i in 0..grid.n_cells() {
        let (lo, hi) = (grid.edges()[i], grid.edges()[i + 1]);
        let mut pieces = vec![lo];
        for c in &cuts {
            if *c > lo && *c < hi {
                pieces.push(*c);
            }
        }
        pieces.push(hi);
        let mut cell_mass = 0.0;
        for seg in pieces.windows(2) {
            cell_mass += quad::integrate(
                |rho| density.radial_profile(rho).unwrap_or(0.0) * TWO_PI * rho.sinh(),
                seg[0],
                seg[1],
                12,
            );
        }
        n[i] = cell_mass / grid.volumes()[i];
    }
    let raw_mass: f64 = n.iter().zip(grid.volumes()).map(|(n, v)| n * v).sum();
    if !(raw_mass > 0.0) {
        return Err(Error::InvalidParameter {
            name: "initial",
            message: "projected initial density carries no mass".to_string(),
        });
    }
    let scale = config.mass / raw_mass;
    for v in &mut n {
        *v *= scale;
    }
    Ok(RadialState {
        grid: Arc::clone(grid),
        n,
        t: 0.0,
        chi: config.chi,
    })
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}

/// dc/drho at the interior edges (indices 1..n_cells), from the cumulative
/// mass: dc/drho(e) = -m(e) / (2 pi sinh e).
pub fn elliptic_drift(state: &RadialState) -> Vec<f64> {
    let grid = &state.grid;
    let nc = grid.n_cells();
    let mut out = Vec::with_capacity(nc - 1);
    let mut m = 0.0;
    for i in 0..nc - 1 {
        m += state.n[i] * grid.volumes()[i];
        let e = grid.edges()[i + 1];
        out.push(-m / (TWO_PI * e.sinh()));
    }
    out
}

/// Workspace for repeated stepping on one grid.
pub struct Stepper {
    grid: Arc<RadialGrid>,
    /// Edge conductances 2 pi sinh(e_j) / drho at interior edges.
    conductance: Vec<f64>,
    /// Cumulative mass at interior edges.
    m_edge: Vec<f64>,
    /// Cell masses, carried through both stages.
    mass_buf: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    solution: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: Arc<RadialGrid>) -> Self {
        let nc = grid.n_cells();
        let h = grid.spacing();
        let conductance: Vec<f64> = (1..nc)
            .map(|j| TWO_PI * grid.edges()[j].sinh() / h)
            .collect();
        Self {
            grid,
            conductance,
            m_edge: vec![0.0; nc.saturating_sub(1)],
            mass_buf: vec![0.0; nc],
            diag: vec![0.0; nc],
            upper: vec![0.0; nc],
            rhs: vec![0.0; nc],
            scratch: vec![0.0; nc],
            solution: vec![0.0; nc],
        }
    }

    /// Largest positivity-safe time step for the current drift field.
    ///
    /// The advective flux through edge j is -chi n_face m(e_j); the drift is
    /// inward, so cell i drains through its inner edge at rate
    /// chi m(e_i) n_face(i) and positivity needs
    /// dt <= V_i n_i / (chi m(e_i) n_face(i)).
    pub fn drift_dt_limit(&mut self, state: &RadialState) -> f64 {
        if state.chi == 0.0 {
            return f64::INFINITY;
        }
        self.update_cumulative_mass(state);
        let mut limit = f64::INFINITY;
        for i in 1..self.grid.n_cells() {
            let face = self.upwind_face(state, i);
            let drain = state.chi * self.m_edge[i - 1] * face;
            if drain > 0.0 {
                limit = limit.min(self.grid.volumes()[i] * state.n[i] / drain);
            }
        }
        limit
    }

    fn update_cumulative_mass(&mut self, state: &RadialState) {
        let mut m = 0.0;
        for i in 0..self.grid.n_cells() - 1 {
            m += state.n[i] * self.grid.volumes()[i];
            self.m_edge[i] = m;
        }
    }

    /// Upwind value at the inner face of cell i (the drift always points
    /// inward): a minmod-limited linear reconstruction. Second order in
    /// smooth regions, face values stay within the adjacent cell averages,
    /// so nonnegativity survives.
    fn upwind_face(&self, state: &RadialState, i: usize) -> f64 {
        let n = &state.n;
        let nc = n.len();
        let slope = if i + 1 < nc {
            minmod(n[i] - n[i - 1], n[i + 1] - n[i])
        } else {
            0.0
        };
        n[i] - 0.5 * slope
    }

    /// One forward step: explicit upwind drift then implicit diffusion.
    /// Errors (leaving the state untouched) when dt breaks positivity.
    pub fn step(&mut self, state: &mut RadialState, dt: f64) -> Result<()> {
        let nc = self.grid.n_cells();
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                message: format!("bad step {dt}"),
            });
        }

        let grid = Arc::clone(&self.grid);
        let vols = grid.volumes();

        // work on cell masses: every transfer below leaves one cell and
        // enters its neighbor as the same f64, so the total is conserved to
        // a rounding random-walk far below 1e-12 over a whole run
        for i in 0..nc {
            self.mass_buf[i] = state.n[i] * vols[i];
        }

        // explicit drift: outward flux at edge j is
        //   2 pi sinh(e_j) * chi n_face * dc/drho = -chi n_face m(e_j);
        // the sinh factors cancel, so the assembled flux is finite at rho -> 0.
        if state.chi != 0.0 {
            let limit = self.drift_dt_limit(state);
            if dt > limit {
                return Err(Error::StepTooLarge { dt, limit });
            }
            for j in 0..nc - 1 {
                // drift is inward (velocity < 0): upwind side is the outer
                // cell, sampled at its inner face
                let face = self.upwind_face(state, j + 1);
                let outward = -dt * state.chi * self.m_edge[j] * face;
                self.mass_buf[j] -= outward;
                self.mass_buf[j + 1] += outward;
            }
            for i in 0..nc {
                if self.mass_buf[i] < 0.0 {
                    return Err(Error::StepTooLarge { dt, limit });
                }
                self.scratch[i] = self.mass_buf[i] / vols[i];
            }
        } else {
            self.scratch.copy_from_slice(&state.n);
        }

        // implicit diffusion: (V_i + dt (g_i + g_{i+1})) n_i - dt g_i n_{i-1}
        //   - dt g_{i+1} n_{i+1} = V_i n_i^*
        // The matrix is an M-matrix, so the Thomas solve below only ever adds
        // and multiplies nonnegative quantities: positivity survives rounding.
        for i in 0..nc {
            let g_lo = if i == 0 { 0.0 } else { self.conductance[i - 1] };
            let g_hi = if i == nc - 1 {
                0.0
            } else {
                self.conductance[i]
            };
            self.diag[i] = vols[i] + dt * (g_lo + g_hi);
            self.upper[i] = if i == nc - 1 {
                0.0
            } else {
                -dt * self.conductance[i]
            };
            self.rhs[i] = vols[i] * self.scratch[i];
        }
        // forward elimination (lower[i] = upper[i-1] by symmetry of g)
        for i in 1..nc {
            let lower = -dt * self.conductance[i - 1];
            let w = lower / self.diag[i - 1];
            self.diag[i] -= w * self.upper[i - 1];
            self.rhs[i] -= w * self.rhs[i - 1];
        }
        self.solution[nc - 1] = self.rhs[nc - 1] / self.diag[nc - 1];
        for i in (0..nc - 1).rev() {
            self.solution[i] = (self.rhs[i] - self.upper[i] * self.solution[i + 1]) / self.diag[i];
        }

        // re-apply the diffusion stage as paired edge transfers of the
        // solved field: identical in exact arithmetic, mass-exact in floats
        for j in 0..nc - 1 {
            let inward = dt * self.conductance[j] * (self.solution[j + 1] - self.solution[j]);
            self.mass_buf[j] += inward;
            self.mass_buf[j + 1] -= inward;
        }
        for i in 0..nc {
            let n = self.mass_buf[i] / vols[i];
            // the reconstruction may undershoot the nonnegative solve by a
            // few ulp of the local transfers; snap those to zero
            state.n[i] = if n >= 0.0 {
                n
            } else if n > -1e-12 * self.solution[i].max(1e-30) {
                0.0
            } else {
                return Err(Error::StepTooLarge { dt, limit: dt });
            };
        }
        state.t += dt;
        Ok(())
    }
}

/// A run: snapshots, status, and step-level counters.
pub struct RunResult {
    pub series: Vec<Snapshot>,
    pub status: RunStatus,
    pub report: RunReport,
    pub initial: FunctionalRecord,
}

/// Advances the configured initial state to t_end with adaptive stepping,
/// emitting functional snapshots at the configured cadence and stopping
/// early on blow-up detection or step-budget exhaustion.
pub fn run_simulation(config: &SimConfig) -> Result<RunResult> {
    config.validate()?;
    let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells)?);
    let state = project_initial(config, &grid)?;
    run_from_state(config, state)
}

/// Same as [`run_simulation`] but starting from an already-projected state
/// (its clock is reset to zero).
pub fn run_from_state(config: &SimConfig, mut state: RadialState) -> Result<RunResult> {
    state.t = 0.0;
    let mut stepper = Stepper::new(Arc::clone(&state.grid));
    let mass0 = state.mass();
    let linf0 = state.max_density();
    let subcritical = config.chi * config.mass < 8.0 * std::f64::consts::PI;
    let track_fe = config.per_step_checks && subcritical && config.chi > 0.0;
    let track_l2 = config.per_step_checks
        && config.chi > 0.0
        && config.chi * config.mass <= crate::bounds::lq_monotonicity_threshold(2.0);

    let record0 = functional_record(&state, &config.q_list, &config.k_list);
    let mut series = vec![Snapshot {
        t: 0.0,
        dt: config.dt_init,
        record: record0.clone(),
    }];
    let mut report = RunReport {
        min_density: f64::INFINITY,
        ..Default::default()
    };
    let mut fe_prev = record0.free_energy;
    let mut l2_prev = crate::functionals::lq_norm(&state, 2.0).unwrap();

    let mut dt_policy = config.dt_init.min(config.dt_max);
    let mut clean_streak: u32 = 0;
    let mut next_out = config.output_every;
    let mut status: Option<RunStatus> = None;

    while state.t < config.t_end - 1e-14 {
        if report.steps >= config.max_steps {
            status = Some(RunStatus {
                outcome: Outcome::BudgetExhausted,
                t_final: state.t,
                blowup_time: None,
            });
            break;
        }
        // policy step: CFL-capped, grown after streaks of clean steps
        let cfl = config.safety * stepper.drift_dt_limit(&state);
        dt_policy = dt_policy.min(cfl).min(config.dt_max).max(config.dt_min);
        // clip to land exactly on output times and the horizon
        let target = next_out.min(config.t_end);
        let mut dt = dt_policy.min(target - state.t);
        if dt <= 0.0 {
            dt = dt_policy;
        }

        let mut attempt = state.clone();
        match stepper.step(&mut attempt, dt) {
            Ok(()) => {
                state = attempt;
                report.steps += 1;
                clean_streak += 1;
                if clean_streak >= 10 {
                    dt_policy = (dt_policy * 1.2).min(config.dt_max);
                    clean_streak = 0;
                }
                let min_cell = state.n.iter().cloned().fold(f64::INFINITY, f64::min);
                report.min_density = report.min_density.min(min_cell);
                if track_fe {
                    let fe = crate::functionals::free_energy(&state);
                    if fe > fe_prev + 1e-6 * fe_prev.abs() {
                        report.free_energy_violations += 1;
                        let rise = (fe - fe_prev) / fe_prev.abs().max(1e-300);
                        report.max_free_energy_rise = report.max_free_energy_rise.max(rise);
                    }
                    fe_prev = fe;
                }
                if track_l2 {
                    let l2 = crate::functionals::lq_norm(&state, 2.0).unwrap();
                    if l2 > l2_prev * (1.0 + 1e-6) {
                        report.l2_violations += 1;
                        report.max_l2_rise = report.max_l2_rise.max((l2 - l2_prev) / l2_prev);
                    }
                    l2_prev = l2;
                }
            }
            Err(_) => {
                report.rejected_steps += 1;
                clean_streak = 0;
                if dt_policy <= config.dt_min * 1.0001 {
                    status = Some(RunStatus {
                        outcome: Outcome::BudgetExhausted,
                        t_final: state.t,
                        blowup_time: None,
                    });
                    break;
                }
                dt_policy = (dt_policy / 2.0).max(config.dt_min);
                continue;
            }
        }

        // blow-up detector: amplitude explosion AND step collapse, together
        if state.max_density() >= config.density_factor * linf0 && dt_policy <= config.dt_floor {
            let record = functional_record(&state, &config.q_list, &config.k_list);
            series.push(Snapshot {
                t: state.t,
                dt: dt_policy,
                record,
            });
            status = Some(RunStatus {
                outcome: Outcome::BlowupDetected,
                t_final: state.t,
                blowup_time: Some(state.t),
            });
            break;
        }

        if state.t >= next_out - 1e-12 {
            let record = functional_record(&state, &config.q_list, &config.k_list);
            series.push(Snapshot {
                t: state.t,
                dt: dt_policy,
                record,
            });
            while next_out <= state.t + 1e-12 {
                next_out += config.output_every;
            }
        }
    }

    let status = status.unwrap_or(RunStatus {
        outcome: Outcome::Completed,
        t_final: state.t,
        blowup_time: None,
    });
    if state.t - series.last().map(|s| s.t).unwrap_or(-1.0) > 1e-12 {
        let record = functional_record(&state, &config.q_list, &config.k_list);
        series.push(Snapshot {
            t: state.t,
            dt: dt_policy,
            record,
        });
    }
    report.mass_drift_rel = (state.mass() - mass0).abs() / mass0;
    Ok(RunResult {
        series,
        status,
        report,
        initial: record0,
    })
}

/// Pure heat flow: the state advanced by `t_elapsed` with chi = 0.
pub fn heat_propagate(state: &RadialState, t_elapsed: f64, dt_max: f64) -> Result<RadialState> {
    if t_elapsed < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            message: "heat propagation needs t >= 0".to_string(),
        });
    }
    let mut out = RadialState {
        chi: 0.0,
        ..state.clone()
    };
    let t_end = state.t + t_elapsed;
    let mut stepper = Stepper::new(Arc::clone(&out.grid));
    while out.t < t_end - 1e-14 {
        let dt = dt_max.min(t_end - out.t);
        stepper.step(&mut out, dt)?;
    }
    out.chi = state.chi;
    Ok(out)
}

/// Least-squares slope of log ||e^{t Delta} u0||_q against log t over the
/// window; the short-time theory value for L^1-like data is -(1 - 1/q).
pub fn dispersive_rate_fit(
    u0: &RadialState,
    q: f64,
    t_window: (f64, f64),
    dt_max: f64,
) -> Result<f64> {
    let (lo, hi) = t_window;
    if !(lo > 0.0) || hi / lo < 1.2 {
        return Err(Error::WindowTooNarrow { lo, hi });
    }
    let n_samples = 9;
    let ratio = (hi / lo).powf(1.0 / (n_samples - 1) as f64);
    let mut times = Vec::with_capacity(n_samples);
    let mut t = lo;
    for _ in 0..n_samples {
        times.push(t);
        t *= ratio;
    }
    let mut state = RadialState {
        chi: 0.0,
        t: 0.0,
        ..u0.clone()
    };
    let mut stepper = Stepper::new(Arc::clone(&state.grid));
    let mut logs = Vec::with_capacity(n_samples);
    for &t_target in &times {
        while state.t < t_target - 1e-14 {
            let dt = dt_max.min(t_target - state.t);
            stepper.step(&mut state, dt)?;
        }
        let norm = crate::functionals::lq_norm(&state, q)?;
        logs.push((t_target.ln(), norm.ln()));
    }
    // least squares slope
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Post-hoc blow-up scan of a snapshot series: the first row whose density
/// has grown by `density_factor` while the policy step sits at or below
/// `dt_floor` marks the blow-up time. Needs both; a large density with a
/// healthy step is still a resolvable transient.
pub fn detect_blowup(series: &[Snapshot], config: &SimConfig) -> Result<RunStatus> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let linf0 = series[0].record.linf;
    for snap in series {
        if snap.record.linf >= config.density_factor * linf0 && snap.dt <= config.dt_floor {
            return Ok(RunStatus {
                outcome: Outcome::BlowupDetected,
                t_final: snap.t,
                blowup_time: Some(snap.t),
            });
        }
    }
    let t_final = series.last().unwrap().t;
    let outcome = if t_final >= config.t_end - 1e-12 {
        Outcome::Completed
    } else {
        Outcome::BudgetExhausted
    };
    Ok(RunStatus {
        outcome,
        t_final,
        blowup_time: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_config(chi: f64, mass: f64, s: f64) -> SimConfig {
        SimConfig {
            chi,
            mass,
            initial: InitialSpec::Gaussian { s },
            rho_max: 8.0,
            n_cells: 512,
            dt_init: 1e-4,
            dt_min: 1e-12,
            dt_max: 5e-4,
            safety: 0.8,
            t_end: 0.1,
            density_factor: 1e6,
            dt_floor: 1e-9,
            output_every: 0.05,
            seed: 0,
            q_list: vec![1.5, 2.0],
            k_list: vec![10.0],
            max_steps: 2_000_000,
            per_step_checks: true,
        }
    }

    #[test]
    fn grid_volumes_are_exact_cosh_differences() {
        let g = RadialGrid::build(1.0, 1).unwrap();
        assert!((g.volumes()[0] - TWO_PI * (1.0f64.cosh() - 1.0)).abs() < 1e-14);
        let g = RadialGrid::build(3.0, 64).unwrap();
        let total: f64 = g.volumes().iter().sum();
        assert!((total - g.total_volume()).abs() < 1e-13 * total);
        let g2 = RadialGrid::build(3.0, 128).unwrap();
        let total2: f64 = g2.volumes().iter().sum();
        assert!((total2 - total).abs() < 1e-13 * total);
    }

    #[test]
    fn projection_hits_target_mass_exactly() {
        let config = gaussian_config(0.0, 1.0, 0.5);
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let state = project_initial(&config, &grid).unwrap();
        assert!((state.mass() - 1.0).abs() < 1e-14);
        assert!(state.n.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn projection_annulus_p_moment_matches_analytic() {
        let mass = 4.0 * std::f64::consts::PI;
        let mut config = gaussian_config(0.0, mass, 0.5);
        config.initial = InitialSpec::Annulus { a: 0.5, b: 1.0 };
        config.rho_max = 2.0;
        config.n_cells = 1024;
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let state = project_initial(&config, &grid).unwrap();
        let record = functional_record(&state, &[], &[]);
        let want = mass * (0.5f64.cosh() - 1.0 + 1.0f64.cosh() - 1.0) / 2.0;
        assert!(
            (record.p_moment - want).abs() < 1e-5 * want,
            "p-moment {} vs {want}",
            record.p_moment
        );
    }

    #[test]
    fn projection_rejects_truncated_density() {
        let mut config = gaussian_config(0.0, 1.0, 5.0);
        config.rho_max = 1.0; // gaussian with s = 5 reaches far beyond
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        assert!(matches!(
            project_initial(&config, &grid),
            Err(Error::MassTruncated { .. })
        ));
    }

    #[test]
    fn drift_far_field_is_newtonian() {
        let config = gaussian_config(1.0, 2.0, 0.1);
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let state = project_initial(&config, &grid).unwrap();
        let drift = elliptic_drift(&state);
        // far outside the support the cumulative mass is the full mass
        let j = grid.n_cells() - 2;
        let e = grid.edges()[j + 1];
        let want = -2.0 / (TWO_PI * e.sinh());
        assert!((drift[j] - want).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn zero_density_drift_is_zero_and_chi_zero_constant_state_fixed() {
        let grid = Arc::new(RadialGrid::build(2.0, 64).unwrap());
        let state = RadialState {
            grid: Arc::clone(&grid),
            n: vec![0.0; 64],
            t: 0.0,
            chi: 1.0,
        };
        assert!(elliptic_drift(&state).iter().all(|d| *d == 0.0));

        let mut state = RadialState {
            grid: Arc::clone(&grid),
            n: vec![0.7; 64],
            t: 0.0,
            chi: 0.0,
        };
        let before = state.n.clone();
        Stepper::new(grid).step(&mut state, 1e-3).unwrap();
        for (a, b) in state.n.iter().zip(&before) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn step_conserves_mass_and_positivity() {
        let config = gaussian_config(1.0, 4.0 * std::f64::consts::PI, 0.5);
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let mut state = project_initial(&config, &grid).unwrap();
        let mut stepper = Stepper::new(Arc::clone(&grid));
        let m0 = state.mass();
        for _ in 0..200 {
            let dt = (0.8 * stepper.drift_dt_limit(&state)).min(5e-4);
            stepper.step(&mut state, dt).unwrap();
            assert!(state.n.iter().all(|v| *v >= 0.0));
        }
        assert!((state.mass() - m0).abs() < 1e-13 * m0);
    }

    #[test]
    fn assembled_drift_flux_finite_at_origin() {
        // the advective flux is -chi m(e) n_face after the sinh cancellation;
        // it must stay finite (in fact vanish) as the first edge approaches 0
        let config = gaussian_config(1.0, 1.0, 0.5);
        let mut prev = f64::INFINITY;
        for cells in [128usize, 512, 2048, 8192] {
            let grid = Arc::new(RadialGrid::build(4.0, cells).unwrap());
            let mut cfg = config.clone();
            cfg.rho_max = 4.0;
            cfg.n_cells = cells;
            let state = project_initial(&cfg, &grid).unwrap();
            let m_first = state.n[0] * grid.volumes()[0];
            let flux = -state.chi * m_first * state.n[1];
            assert!(flux.is_finite());
            assert!(flux.abs() < prev);
            prev = flux.abs();
        }
    }

    #[test]
    fn step_rejects_cfl_violation() {
        let config = gaussian_config(5.0, 16.0 * std::f64::consts::PI, 0.2);
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let mut state = project_initial(&config, &grid).unwrap();
        let mut stepper = Stepper::new(Arc::clone(&grid));
        let limit = stepper.drift_dt_limit(&state);
        assert!(matches!(
            stepper.step(&mut state, 2.0 * limit),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn chi_zero_moment_law() {
        // I(t) = (I0 + M) e^{2t} - M under pure heat flow
        let mut config = gaussian_config(0.0, 1.0, 0.5);
        config.dt_max = 2e-4;
        config.t_end = 0.1;
        let result = run_simulation(&config).unwrap();
        let last = result.series.last().unwrap();
        let i0 = result.initial.p_moment;
        let want = (i0 + 1.0) * (2.0 * last.t).exp() - 1.0;
        let got = last.record.p_moment;
        assert!(
            (got - want).abs() < 1e-3 * want,
            "I({}) = {got}, law {want}",
            last.t
        );
    }

    #[test]
    fn run_subcritical_completes() {
        let mut config = gaussian_config(1.0, 4.0 * std::f64::consts::PI, 0.5);
        config.t_end = 0.2;
        config.n_cells = 256;
        let result = run_simulation(&config).unwrap();
        assert_eq!(result.status.outcome, Outcome::Completed);
        assert!(result.status.blowup_time.is_none());
        assert!(result.report.mass_drift_rel < 1e-12);
        assert!(result.series.iter().all(|s| s.record.entropy.is_finite()));
        // strictly increasing snapshot times
        for w in result.series.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn run_zero_horizon_emits_single_snapshot() {
        let mut config = gaussian_config(1.0, 1.0, 0.5);
        config.t_end = 0.0;
        let result = run_simulation(&config).unwrap();
        assert_eq!(result.status.outcome, Outcome::Completed);
        assert_eq!(result.series.len(), 1);
        assert_eq!(result.series[0].t, 0.0);
    }

    #[test]
    fn run_reports_budget_exhaustion() {
        let mut config = gaussian_config(1.0, 1.0, 0.5);
        config.max_steps = 5;
        let result = run_simulation(&config).unwrap();
        assert_eq!(result.status.outcome, Outcome::BudgetExhausted);
        assert!(result.status.blowup_time.is_none());
        assert!(result.status.t_final < config.t_end);
    }

    #[test]
    fn heat_preserves_mass_and_max_principle() {
        let config = gaussian_config(0.0, 1.0, 0.3);
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let state = project_initial(&config, &grid).unwrap();
        let out = heat_propagate(&state, 0.05, 2e-4).unwrap();
        assert!((out.mass() - state.mass()).abs() < 1e-13);
        assert!(out.max_density() <= state.max_density() * (1.0 + 1e-12));
        let same = heat_propagate(&state, 0.0, 1e-3).unwrap();
        assert_eq!(same.n, state.n);
    }

    #[test]
    fn dispersive_fit_window_validation() {
        let grid = Arc::new(RadialGrid::build(2.0, 64).unwrap());
        let state = RadialState {
            grid,
            n: vec![1.0; 64],
            t: 0.0,
            chi: 0.0,
        };
        assert!(matches!(
            dispersive_rate_fit(&state, 2.0, (0.1, 0.11), 1e-3),
            Err(Error::WindowTooNarrow { .. })
        ));
        assert!(matches!(
            dispersive_rate_fit(&state, 2.0, (0.0, 0.1), 1e-3),
            Err(Error::WindowTooNarrow { .. })
        ));
    }

    #[test]
    fn dispersive_mass_is_flat() {
        let mut config = gaussian_config(0.0, 1.0, 0.02);
        config.rho_max = 4.0;
        config.n_cells = 1024;
        let grid = Arc::new(RadialGrid::build(config.rho_max, config.n_cells).unwrap());
        let state = project_initial(&config, &grid).unwrap();
        let slope = dispersive_rate_fit(&state, 1.0, (0.02, 0.08), 2e-4).unwrap();
        assert!(slope.abs() < 1e-10, "L^1 slope {slope}");
    }

    #[test]
    fn detector_semantics_on_synthetic_series() {
        let config = gaussian_config(1.0, 1.0, 0.5);
        let grid = Arc::new(RadialGrid::build(2.0, 16).unwrap());
        let state = RadialState {
            grid,
            n: vec![1.0; 16],
            t: 0.0,
            chi: 1.0,
        };
        let rec = |linf: f64| {
            let mut r = functional_record(&state, &[], &[]);
            r.linf = linf;
            r
        };
        // bounded series: completed
        let series: Vec<Snapshot> = (0..=4)
            .map(|k| Snapshot {
                t: k as f64 * 0.025,
                dt: 1e-4,
                record: rec(1.0),
            })
            .collect();
        let status = detect_blowup(&series, &config).unwrap();
        assert_eq!(status.outcome, Outcome::Completed);
        // amplitude explosion with a collapsed step: blow-up at that row
        let mut series2 = series.clone();
        series2[3].record.linf = 2e6;
        series2[3].dt = 1e-9;
        let status = detect_blowup(&series2, &config).unwrap();
        assert_eq!(status.outcome, Outcome::BlowupDetected);
        assert!((status.blowup_time.unwrap() - 0.075).abs() < 1e-15);
        // large density alone, healthy step: still refining, not a blow-up
        let mut series3 = series.clone();
        series3[3].record.linf = 2e6;
        let status = detect_blowup(&series3, &config).unwrap();
        assert_eq!(status.outcome, Outcome::Completed);
        assert!(detect_blowup(&[], &config).is_err());
    }
}
