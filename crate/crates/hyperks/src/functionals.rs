//! Scalar diagnostics of a radial state: mass, moments, entropy, Fisher
//! information, interaction energy, free energy, L^q norms, truncated excess
//! mass, and the Kato-type seminorm of a trajectory.
//!
//! Discretization conventions: moments use cell centers, entropy uses the
//! 0 log 0 = 0 convention with a 1e-300 floor, and the interaction potential
//! is built from the cumulative mass with the analytic Newton tail beyond the
//! last cell (the segment integrals of 1/sinh are exact log-tanh differences).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{RadialState, Snapshot};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const ENTROPY_FLOOR: f64 = 1e-300;

/// Snapshot of every diagnostic at one time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalRecord {
    pub t: f64,
    pub mass: f64,
    pub p_moment: f64,
    pub rho_moment: f64,
    pub entropy: f64,
    pub fisher: f64,
    /// <n, (-Delta_H)^{-1} n>
    pub interaction: f64,
    /// entropy - (chi/2) * interaction
    pub free_energy: f64,
    /// (q, ||n||_q) pairs in the configured order.
    pub lq_norms: Vec<(f64, f64)>,
    pub linf: f64,
    /// (K, M_t(K)) pairs in the configured order.
    pub m_t_k: Vec<(f64, f64)>,
}

impl FunctionalRecord {
    /// Looks up a configured L^q norm.
    pub fn lq(&self, q: f64) -> Option<f64> {
        self.lq_norms
            .iter()
            .find(|(qq, _)| *qq == q)
            .map(|(_, v)| *v)
    }
}

/// All diagnostics of one state, from one snapshot of the cell averages.
pub fn functional_record(state: &RadialState, q_list: &[f64], k_list: &[f64]) -> FunctionalRecord {
    let entropy = entropy(state);
    let interaction = interaction(state);
    FunctionalRecord {
        t: state.t,
        mass: state.mass(),
        p_moment: p_moment(state),
        rho_moment: rho_moment(state),
        entropy,
        fisher: fisher(state),
        interaction,
        free_energy: entropy - 0.5 * state.chi * interaction,
        lq_norms: q_list
            .iter()
            .map(|&q| (q, lq_norm(state, q).unwrap()))
            .collect(),
        linf: state.max_density(),
        m_t_k: k_list
            .iter()
            .map(|&k| (k, truncated_excess_mass(state, k)))
            .collect(),
    }
}

/// p-moment: sum of (cosh rho_i - 1) n_i V_i.
pub fn p_moment(state: &RadialState) -> f64 {
    state
        .n
        .iter()
        .zip(state.grid.centers())
        .zip(state.grid.volumes())
        .map(|((n, rho), v)| (rho.cosh() - 1.0) * n * v)
        .sum()
}

/// rho-moment: sum of rho_i n_i V_i.
pub fn rho_moment(state: &RadialState) -> f64 {
    state
        .n
        .iter()
        .zip(state.grid.centers())
        .zip(state.grid.volumes())
        .map(|((n, rho), v)| rho * n * v)
        .sum()
}

/// Entropy sum of n log n over cells, with 0 log 0 = 0.
pub fn entropy(state: &RadialState) -> f64 {
    state
        .n
        .iter()
        .zip(state.grid.volumes())
        .map(|(n, v)| {
            if *n > ENTROPY_FLOOR {
                n * n.ln() * v
            } else {
                0.0
            }
        })
        .sum()
}

/// Mass of |log|: sum of n |log n| over cells.
pub fn abs_log_mass(state: &RadialState) -> f64 {
    state
        .n
        .iter()
        .zip(state.grid.volumes())
        .map(|(n, v)| {
            if *n > ENTROPY_FLOOR {
                n * n.ln().abs() * v
            } else {
                0.0
            }
        })
        .sum()
}

/// Fisher information sum of n (d log n / d rho)^2 over interior cells,
/// centered differences of log n. First order near the ends; reported with a
/// wider tolerance than the other diagnostics.
pub fn fisher(state: &RadialState) -> f64 {
    let n = &state.n;
    let nc = n.len();
    let h = state.grid.spacing();
    let mut sum = 0.0;
    for i in 1..nc.saturating_sub(1) {
        if n[i - 1] > ENTROPY_FLOOR && n[i] > ENTROPY_FLOOR && n[i + 1] > ENTROPY_FLOOR {
            let g = (n[i + 1].ln() - n[i - 1].ln()) / (2.0 * h);
            sum += n[i] * g * g * state.grid.volumes()[i];
        }
    }
    sum
}

/// Chemical potential at the cell centers, marching inward from the analytic
/// far-field tail: c(rho) = integral of m(r)/(2 pi sinh r) dr from rho on,
/// with exact log-tanh segment weights.
pub fn potential_at_centers(state: &RadialState) -> Vec<f64> {
    let grid = &state.grid;
    let nc = grid.n_cells();
    let mut c = vec![0.0; nc];
    let mass = state.mass();
    // cumulative mass at interior edges: m_edge[j] through edge j+1
    let mut m_edge = vec![0.0; nc];
    let mut m = 0.0;
    for i in 0..nc {
        m += state.n[i] * grid.volumes()[i];
        m_edge[i] = m;
    }
    let log_tanh = |rho: f64| (rho / 2.0).tanh().ln();
    let last = nc - 1;
    // beyond the last center the cumulative mass is (numerically) the total
    c[last] = -mass / TWO_PI * log_tanh(grid.centers()[last]);
    for i in (0..last).rev() {
        // between centers i and i+1 the cumulative mass is m at their shared edge
        let seg = log_tanh(grid.centers()[i + 1]) - log_tanh(grid.centers()[i]);
        c[i] = c[i + 1] + m_edge[i] / TWO_PI * seg;
    }
    c
}

/// Interaction energy <n, (-Delta_H)^{-1} n> = integral of n c dV.
pub fn interaction(state: &RadialState) -> f64 {
    let c = potential_at_centers(state);
    state
        .n
        .iter()
        .zip(&c)
        .zip(state.grid.volumes())
        .map(|((n, c), v)| n * c * v)
        .sum()
}

/// Free energy entropy - (chi/2) <n, (-Delta_H)^{-1} n>.
pub fn free_energy(state: &RadialState) -> f64 {
    entropy(state) - 0.5 * state.chi * interaction(state)
}

/// ||n||_q = (sum of n^q V)^{1/q} for q >= 1.
pub fn lq_norm(state: &RadialState, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            message: format!("L^q norm needs q >= 1, got {q}"),
        });
    }
    let sum: f64 = state
        .n
        .iter()
        .zip(state.grid.volumes())
        .map(|(n, v)| n.powf(q) * v)
        .sum();
    Ok(sum.powf(1.0 / q))
}

/// Truncated excess mass M_t(K) = sum of (n - K)_+ V; non-increasing in K.
pub fn truncated_excess_mass(state: &RadialState, k: f64) -> f64 {
    state
        .n
        .iter()
        .zip(state.grid.volumes())
        .map(|(n, v)| (n - k).max(0.0) * v)
        .sum()
}

/// Kato-type seminorm of a trajectory: max over snapshots with t <= T of
/// t^{1 - 1/q} ||n_t||_q. The norm must be present in each record's q list.
pub fn xtq_seminorm(series: &[Snapshot], q: f64, t_end: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            message: format!("X_Tq seminorm needs q in (1, 2), got {q}"),
        });
    }
    let mut best = 0.0f64;
    for snap in series.iter().filter(|s| s.t <= t_end) {
        let norm = snap.record.lq(q).ok_or(Error::InvalidParameter {
            name: "q",
            message: format!("||n||_{q} missing from the snapshot records"),
        })?;
        let weighted = if snap.t > 0.0 {
            snap.t.powf(1.0 - 1.0 / q) * norm
        } else {
            0.0
        };
        best = best.max(weighted);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{project_initial, InitialSpec, RadialGrid, SimConfig};
    use std::sync::Arc;

    fn gaussian_state(mass: f64, s: f64, rho_max: f64, n_cells: usize, chi: f64) -> RadialState {
        let config = SimConfig {
            chi,
            mass,
            initial: InitialSpec::Gaussian { s },
            rho_max,
            n_cells,
            dt_init: 1e-4,
            dt_min: 1e-12,
            dt_max: 1e-3,
            safety: 0.8,
            t_end: 1.0,
            density_factor: 1e6,
            dt_floor: 1e-9,
            output_every: 0.1,
            seed: 0,
            q_list: vec![2.0],
            k_list: vec![],
            max_steps: 1000,
            per_step_checks: false,
        };
        let grid = Arc::new(RadialGrid::build(rho_max, n_cells).unwrap());
        project_initial(&config, &grid).unwrap()
    }

    #[test]
    fn gaussian_record_matches_closed_forms() {
        let (mass, s) = (3.0, 0.5);
        let state = gaussian_state(mass, s, 8.0, 2048, 1.0);
        let rec = functional_record(&state, &[1.0, 2.0], &[1e9]);
        assert!((rec.mass - mass).abs() < 1e-12 * mass);
        assert!((rec.p_moment - mass * s).abs() < 1e-5 * mass * s);
        let ent_want = mass * ((mass / (TWO_PI * s)).ln() - 1.0);
        assert!((rec.entropy - ent_want).abs() < 1e-4 * ent_want.abs());
        assert!((rec.lq(1.0).unwrap() - mass).abs() < 1e-12 * mass);
        // free energy stored exactly as entropy - chi/2 interaction
        assert_eq!(rec.free_energy, rec.entropy - 0.5 * rec.interaction);
        // K far above the peak: no excess mass
        assert_eq!(rec.m_t_k[0].1, 0.0);
    }

    #[test]
    fn lq_norm_cases() {
        let grid = Arc::new(RadialGrid::build(2.0, 128).unwrap());
        let state = RadialState {
            grid: Arc::clone(&grid),
            n: vec![0.3; 128],
            t: 0.0,
            chi: 0.0,
        };
        // constant density: c * V_tot^{1/q}
        for q in [1.0, 1.5, 2.0, 4.0] {
            let want = 0.3 * grid.total_volume().powf(1.0 / q);
            assert!((lq_norm(&state, q).unwrap() - want).abs() < 1e-12 * want);
        }
        assert!(lq_norm(&state, 0.5).is_err());
        // q = 2 on a gaussian against a refined-grid value
        let coarse = gaussian_state(1.0, 0.5, 6.0, 512, 0.0);
        let fine = gaussian_state(1.0, 0.5, 6.0, 4096, 0.0);
        let a = lq_norm(&coarse, 2.0).unwrap();
        let b = lq_norm(&fine, 2.0).unwrap();
        assert!((a - b).abs() < 1e-4 * b, "{a} vs {b}");
    }

    #[test]
    fn truncated_excess_mass_limits() {
        let state = gaussian_state(2.0, 0.5, 6.0, 512, 0.0);
        let peak = state.max_density();
        assert_eq!(truncated_excess_mass(&state, peak + 1.0), 0.0);
        assert!((truncated_excess_mass(&state, 0.0) - 2.0).abs() < 1e-12);
        // non-increasing in K
        let mut prev = f64::INFINITY;
        for k in [0.01, 0.1, 0.3, 0.5] {
            let m = truncated_excess_mass(&state, k);
            assert!(m <= prev);
            prev = m;
        }
    }

    #[test]
    fn rho_moment_of_point_like_density_vanishes() {
        // all mass in the innermost cell: the moment collapses with the grid
        let grid = Arc::new(RadialGrid::build(4.0, 2048).unwrap());
        let mut n = vec![0.0; 2048];
        n[0] = 1.0 / grid.volumes()[0];
        let state = RadialState {
            grid: Arc::clone(&grid),
            n,
            t: 0.0,
            chi: 0.0,
        };
        assert!((state.mass() - 1.0).abs() < 1e-12);
        assert!(rho_moment(&state) < grid.spacing());
        assert!(p_moment(&state) < grid.spacing());
    }

    #[test]
    fn rho_moment_jensen_chain() {
        for s in [0.2, 0.5, 1.5] {
            let state = gaussian_state(2.0, s, 10.0, 1024, 0.0);
            let m = state.mass();
            let rho_m = rho_moment(&state);
            let p_m = p_moment(&state);
            let u = (p_m / (2.0 * m)).sqrt();
            // Jensen with Phi = sinh: rho-moment <= 2M asinh(sqrt(I/2M))
            let jensen = 2.0 * m * u.asinh();
            assert!(rho_m <= jensen * (1.0 + 1e-12), "{rho_m} vs {jensen}");
            // asinh(u) <= log(2u + 1)
            assert!(jensen <= 2.0 * m * (2.0 * u + 1.0).ln() + 1e-12);
        }
    }

    #[test]
    fn entropy_lower_bound_for_all_s() {
        let state = gaussian_state(1.0, 0.7, 8.0, 1024, 0.0);
        let m = state.mass();
        let ent = entropy(&state);
        let p_m = p_moment(&state);
        for s in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let bound = -p_m / s + m * (m / (TWO_PI * s)).ln();
            assert!(ent >= bound - 1e-10, "s = {s}: {ent} < {bound}");
        }
    }

    #[test]
    fn abs_log_control() {
        // |log| mass against the relative-entropy reference q_s:
        // int n |log n| <= int n log n + 2/e + 2 int (-log q_s) v,
        // with v the restriction of n to {n <= 1}.
        let state = gaussian_state(1.5, 0.4, 8.0, 1024, 0.0);
        let lhs = abs_log_mass(&state);
        let ent = entropy(&state);
        for s in [0.25, 1.0, 4.0] {
            let mut ref_term = 0.0;
            for (n, (rho, v)) in state
                .n
                .iter()
                .zip(state.grid.centers().iter().zip(state.grid.volumes()))
            {
                if *n > 0.0 && *n <= 1.0 {
                    ref_term += ((TWO_PI * s).ln() + (rho.cosh() - 1.0) / s) * n * v;
                }
            }
            let rhs = ent + 2.0 / std::f64::consts::E + 2.0 * ref_term;
            assert!(lhs <= rhs + 1e-10, "s = {s}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn potential_march_matches_ring_quadrature() {
        // the inward log-tanh march against a direct kernel quadrature of
        // G_H * n inside the bulk, and against the analytic Newton tail
        // -(M/2pi) log tanh(rho/2) beyond the support, where the march
        // telescopes exactly
        use crate::lab::density::TestDensity;
        let state = gaussian_state(2.0, 0.5, 8.0, 2048, 1.0);
        let c = potential_at_centers(&state);
        let density = TestDensity::gaussian(0.5, 2.0).unwrap();
        for k in [10usize, 200, 400, 700] {
            let rho = state.grid.centers()[k];
            let oracle = crate::lab::radial_potential(&density, rho, 40).unwrap();
            assert!(
                (c[k] - oracle).abs() < 2e-5 * oracle.abs(),
                "rho = {rho}: {} vs {oracle}",
                c[k]
            );
        }
        for k in [1200usize, 1600, 2000] {
            let rho = state.grid.centers()[k];
            let tail = -(2.0 / TWO_PI) * (rho / 2.0).tanh().ln();
            assert!(
                (c[k] - tail).abs() < 1e-12 * tail,
                "rho = {rho}: {} vs tail {tail}",
                c[k]
            );
        }
    }

    #[test]
    fn interaction_matches_kernel_quadrature() {
        use crate::lab::density::TestDensity;
        use crate::lab::pair_integral_radial;

        let state = gaussian_state(1.0, 0.5, 8.0, 2048, 1.0);
        let inter = interaction(&state);
        // the same quantity as a double kernel quadrature
        let density = TestDensity::gaussian(0.5, 1.0).unwrap();
        let alt = pair_integral_radial(&density, &density, |d| -(d / 2.0).tanh().ln() / TWO_PI, 24)
            .unwrap();
        assert!((inter - alt).abs() < 1e-4 * alt.abs(), "{inter} vs {alt}");
    }

    #[test]
    fn xtq_seminorm_properties() {
        let state = gaussian_state(1.0, 0.5, 6.0, 256, 0.0);
        let rec = functional_record(&state, &[1.5], &[]);
        let snap0 = Snapshot {
            t: 0.0,
            dt: 1e-4,
            record: rec.clone(),
        };
        // single snapshot at t = 0: weight vanishes
        assert_eq!(
            xtq_seminorm(std::slice::from_ref(&snap0), 1.5, 1.0).unwrap(),
            0.0
        );
        // homogeneity: doubled density doubles the seminorm
        let mut doubled = state.clone();
        for v in &mut doubled.n {
            *v *= 2.0;
        }
        let rec2 = functional_record(&doubled, &[1.5], &[]);
        let series1 = vec![
            snap0.clone(),
            Snapshot {
                t: 0.5,
                dt: 1e-4,
                record: rec.clone(),
            },
        ];
        let series2 = vec![
            Snapshot {
                t: 0.0,
                dt: 1e-4,
                record: rec2.clone(),
            },
            Snapshot {
                t: 0.5,
                dt: 1e-4,
                record: rec2,
            },
        ];
        let a = xtq_seminorm(&series1, 1.5, 1.0).unwrap();
        let b = xtq_seminorm(&series2, 1.5, 1.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
        // errors
        assert!(xtq_seminorm(&[], 1.5, 1.0).is_err());
        assert!(xtq_seminorm(&series1, 2.5, 1.0).is_err());
        assert!(xtq_seminorm(&series1, 1.7, 1.0).is_err()); // q not recorded
    }
}
