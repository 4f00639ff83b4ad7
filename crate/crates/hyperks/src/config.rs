//! Experiment configuration: a JSON document with top-level keys
//! {command, sim, sweep, bounds, inequalities, output, tolerances}.
//!
//! Parsing reports syntax errors with position information and aggregates
//! every semantic error instead of stopping at the first. All randomness is
//! seeded explicitly in the file (or the --seed override); nothing is drawn
//! from the environment.

use serde::{Deserialize, Serialize};

use crate::solver::{InitialSpec, SimConfig};

/// What the runner should do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Sweep,
    Bounds,
    Inequalities,
}

/// Check tolerances used for the per-row pass/fail flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative slack on the virial envelope (I + M)^2 <= env * (1 + tol).
    #[serde(default = "d_virial")]
    pub virial_rel: f64,
    /// Relative slack on the p-moment envelope.
    #[serde(default = "d_virial")]
    pub p_bound_rel: f64,
    /// Slack on exact discrete identities (Jensen chain).
    #[serde(default = "d_exact")]
    pub exact_rel: f64,
    /// Per-step relative slack for free-energy and L^q monotonicity.
    #[serde(default = "d_step")]
    pub monotone_step_rel: f64,
    /// Entropy-bound slack, relative to |Ent0|.
    #[serde(default = "d_entropy")]
    pub entropy_rel: f64,
    /// Accepted detected-blow-up time as a multiple of T_bl.
    #[serde(default = "d_blowup")]
    pub blowup_time_factor: f64,
    /// Additive tolerance on inequality deficits beyond the 3 sigma rule.
    #[serde(default = "d_deficit")]
    pub deficit_tol: f64,
}

fn d_virial() -> f64 {
    1e-3
}
fn d_exact() -> f64 {
    1e-9
}
fn d_step() -> f64 {
    1e-6
}
fn d_entropy() -> f64 {
    1e-3
}
fn d_blowup() -> f64 {
    1.1
}
fn d_deficit() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            virial_rel: d_virial(),
            p_bound_rel: d_virial(),
            exact_rel: d_exact(),
            monotone_step_rel: d_step(),
            entropy_rel: d_entropy(),
            blowup_time_factor: d_blowup(),
            deficit_tol: d_deficit(),
        }
    }
}

/// Axes of a (chi, M, I0) sweep; cells are the cartesian product.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub chi: Vec<f64>,
    pub mass: Vec<f64>,
    pub i0: Vec<f64>,
    /// Per-cell run template (gaussian initial data scaled to the cell I0).
    #[serde(default = "default_cell_t_end")]
    pub t_end: f64,
    #[serde(default = "default_cell_cells")]
    pub n_cells: usize,
    #[serde(default = "default_cell_rho_max")]
    pub rho_max: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_cell_t_end() -> f64 {
    1.0
}
fn default_cell_cells() -> usize {
    1024
}
fn default_cell_rho_max() -> f64 {
    10.0
}

impl SweepConfig {
    /// Resolves the axes into one run config per cell, in row-major
    /// (chi, mass, i0) order.
    pub fn resolve(&self) -> Vec<SimConfig> {
        let mut cells = Vec::new();
        for &chi in &self.chi {
            for &mass in &self.mass {
                for &i0 in &self.i0 {
                    // gaussian q_s has p-moment M s, so s = I0 / M
                    let s = (i0 / mass).max(1e-3);
                    cells.push(SimConfig {
                        chi,
                        mass,
                        initial: InitialSpec::Gaussian { s },
                        rho_max: self.rho_max,
                        n_cells: self.n_cells,
                        dt_init: 1e-4,
                        dt_min: 1e-12,
                        dt_max: 1e-3,
                        safety: 0.8,
                        t_end: self.t_end,
                        density_factor: 5e3,
                        dt_floor: 1e-6,
                        output_every: self.t_end / 20.0,
                        seed: self.seed,
                        q_list: vec![1.5, 2.0],
                        k_list: vec![10.0, 100.0, 1000.0],
                        max_steps: 5_000_000,
                        per_step_checks: true,
                    });
                }
            }
        }
        cells
    }
}

/// One (chi, M, I0, Ent0, F0) tuple for the bounds command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsTuple {
    pub chi: f64,
    pub mass: f64,
    pub i0: f64,
    #[serde(default)]
    pub ent0: f64,
    #[serde(default)]
    pub f0: f64,
}

/// Inequality-battery spec: which ops, how many seeded densities per op,
/// and the Monte Carlo budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    #[serde(default = "default_ops")]
    pub ops: Vec<String>,
    #[serde(default = "default_densities")]
    pub densities: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

/// The inequality operations a battery can name.
pub const KNOWN_OPS: [&str; 8] = [
    "log_hls",
    "sinh_log_hls",
    "hls_0.5",
    "hls_1",
    "hls_1.5",
    "mugelli_talenti",
    "beckner",
    "relative_entropy",
];

fn default_ops() -> Vec<String> {
    KNOWN_OPS.iter().map(|s| s.to_string()).collect()
}
fn default_densities() -> usize {
    50
}
fn default_samples() -> usize {
    20_000
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            ops: default_ops(),
            densities: default_densities(),
            seed: 0,
            samples: default_samples(),
        }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundsTuple>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<BatteryConfig>,
    pub output: String,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Parse failure: either malformed JSON (with position info from the parser)
/// or a list of semantic problems.
#[derive(Debug)]
pub enum ConfigError {
    Syntax(String),
    Semantic(Vec<String>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Syntax(e) => write!(f, "config syntax error: {e}"),
            ConfigError::Semantic(list) => {
                writeln!(f, "config has {} problem(s):", list.len())?;
                for item in list {
                    writeln!(f, "  - {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses and validates a config document, aggregating every semantic error.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut errors = Vec::new();

    let command: Option<Command> = match value.get("command") {
        None => {
            errors.push(
                "missing field `command` (simulate | sweep | bounds | inequalities)".to_string(),
            );
            None
        }
        Some(v) => match serde_json::from_value(v.clone()) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(format!("bad `command`: {e}"));
                None
            }
        },
    };

    let output = match value.get("output") {
        None => {
            errors.push("missing field `output` (directory for artifacts)".to_string());
            String::new()
        }
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(other) => {
            errors.push(format!("bad `output`: expected a string, got {other}"));
            String::new()
        }
    };

    let tolerances: Tolerances = match value.get("tolerances") {
        None => Tolerances::default(),
        Some(v) => match serde_json::from_value(v.clone()) {
            Ok(t) => t,
            Err(e) => {
                errors.push(format!("bad `tolerances`: {e}"));
                Tolerances::default()
            }
        },
    };

    let sim: Option<SimConfig> = match value.get("sim") {
        None => None,
        Some(v) => {
            // report every absent required key, not just serde's first
            let missing: Vec<&str> = ["chi", "mass", "initial", "rho_max", "n_cells", "t_end"]
                .into_iter()
                .filter(|k| v.get(k).is_none())
                .collect();
            if missing.is_empty() {
                parse_section(&value, "sim", &mut errors)
            } else {
                for key in missing {
                    errors.push(format!("sim: missing field `{key}`"));
                }
                None
            }
        }
    };
    let sweep: Option<SweepConfig> = parse_section(&value, "sweep", &mut errors);
    let bounds: Option<Vec<BoundsTuple>> = parse_section(&value, "bounds", &mut errors);
    let inequalities: Option<BatteryConfig> = parse_section(&value, "inequalities", &mut errors);

    // unknown top-level keys are config mistakes, not extensions
    if let Some(obj) = value.as_object() {
        const KNOWN: [&str; 7] = [
            "command",
            "sim",
            "sweep",
            "bounds",
            "inequalities",
            "output",
            "tolerances",
        ];
        for key in obj.keys() {
            if !KNOWN.contains(&key.as_str()) {
                errors.push(format!("unknown top-level key `{key}`"));
            }
        }
    }

    match command {
        Some(Command::Simulate) => {
            if let Some(s) = &sim {
                if let Err(e) = s.validate() {
                    errors.push(format!("sim: {e}"));
                }
            } else if value.get("sim").is_none() {
                errors.push("command `simulate` needs a `sim` section".to_string());
            }
        }
        Some(Command::Sweep) => {
            if let Some(s) = &sweep {
                if s.chi.is_empty() || s.mass.is_empty() || s.i0.is_empty() {
                    errors.push("sweep axes `chi`, `mass`, `i0` must be nonempty".to_string());
                }
            } else {
                errors.push("command `sweep` needs a `sweep` section".to_string());
            }
        }
        Some(Command::Bounds) => {
            if let Some(b) = &bounds {
                for (i, t) in b.iter().enumerate() {
                    if !(t.chi > 0.0) || !(t.mass > 0.0) || !(t.i0 >= 0.0) {
                        errors.push(format!(
                            "bounds[{i}]: need chi > 0, mass > 0, i0 >= 0 (got chi={}, mass={}, i0={})",
                            t.chi, t.mass, t.i0
                        ));
                    }
                }
            } else {
                errors.push("command `bounds` needs a `bounds` list".to_string());
            }
        }
        Some(Command::Inequalities) => match &inequalities {
            None => {
                errors.push("command `inequalities` needs an `inequalities` section".to_string());
            }
            Some(battery) => {
                for op in &battery.ops {
                    if !KNOWN_OPS.contains(&op.as_str()) {
                        errors.push(format!(
                            "unknown inequality op `{op}` (known: {})",
                            KNOWN_OPS.join(", ")
                        ));
                    }
                }
            }
        },
        _ => {}
    }

    if !errors.is_empty() {
        return Err(ConfigError::Semantic(errors));
    }
    Ok(ExperimentConfig {
        command: command.unwrap(),
        sim,
        sweep,
        bounds,
        inequalities,
        output,
        tolerances,
    })
}

fn parse_section<T: serde::de::DeserializeOwned>(
    value: &serde_json::Value,
    key: &str,
    errors: &mut Vec<String>,
) -> Option<T> {
    match value.get(key) {
        None => None,
        Some(v) => match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                errors.push(format!("bad `{key}` section: {e}"));
                None
            }
        },
    }
}

/// FNV-1a hash of the canonical serialized form of the resolved config,
/// with the output location blanked: the hash identifies the experiment,
/// not where its artifacts land. Stored in every artifact's metadata.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let mut keyed = config.clone();
    keyed.output = String::new();
    let canonical = serde_json::to_string(&keyed).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
