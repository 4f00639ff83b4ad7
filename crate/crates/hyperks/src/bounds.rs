//! Closed-form theory quantities: the blow-up threshold lambda*, the blow-up
//! time bound, the virial envelope, moment and entropy envelopes, and the
//! L^q monotonicity threshold.
//!
//! Everything here is a pure function of (chi, M, I0, Ent0, F0); absent
//! values encode "out of regime", never numerical failure.

use serde::{Deserialize, Serialize};

const PI: f64 = std::f64::consts::PI;

/// Scalar inputs every bound is built from.
///
/// `i0` is the initial p-moment, `ent0` the initial entropy, `f0` the initial
/// free energy (entropy minus chi/2 times the interaction).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TheoryInputs {
    pub chi: f64,
    pub mass: f64,
    pub i0: f64,
    pub ent0: f64,
    pub f0: f64,
}

impl TheoryInputs {
    pub fn new(chi: f64, mass: f64, i0: f64, ent0: f64, f0: f64) -> Self {
        assert!(
            chi > 0.0 && mass > 0.0 && i0 >= 0.0,
            "need chi, M > 0 and I0 >= 0"
        );
        Self {
            chi,
            mass,
            i0,
            ent0,
            f0,
        }
    }

    pub fn chi_m(&self) -> f64 {
        self.chi * self.mass
    }
}

/// lambda*(M) = M (sqrt(chi M / 8 pi) - 1); may be negative when chi M < 8 pi.
pub fn lambda_star(chi: f64, mass: f64) -> f64 {
    mass * ((chi * mass / (8.0 * PI)).sqrt() - 1.0)
}

/// Positive part of lambda*.
pub fn lambda_star_plus(chi: f64, mass: f64) -> f64 {
    lambda_star(chi, mass).max(0.0)
}

/// Upper bound on the existence time under the blow-up conditions
/// chi M > 8 pi and I0 < lambda*; absent otherwise.
///
/// T_bl = (1/4) log[ (M^2/8pi)(chi M - 8pi) / (chi M^3/8pi - (M + I0)^2) ].
pub fn blowup_time_bound(inputs: &TheoryInputs) -> Option<f64> {
    let (chi, m, i0) = (inputs.chi, inputs.mass, inputs.i0);
    if chi * m <= 8.0 * PI || i0 >= lambda_star(chi, m) {
        return None;
    }
    let numerator = m * m / (8.0 * PI) * (chi * m - 8.0 * PI);
    let denominator = chi * m.powi(3) / (8.0 * PI) - (m + i0).powi(2);
    Some(0.25 * (numerator / denominator).ln())
}

/// Right-hand side of the virial envelope at time t:
/// ([I0 + M]^2 - chi M^3 / 8pi) e^{4t} + chi M^3 / 8pi.
///
/// Any solution keeps (I(t) + M)^2 below this.
pub fn virial_envelope(inputs: &TheoryInputs, t: f64) -> f64 {
    let m3 = inputs.chi * inputs.mass.powi(3) / (8.0 * PI);
    ((inputs.i0 + inputs.mass).powi(2) - m3) * (4.0 * t).exp() + m3
}

/// C_+ = (I0 - lambda*)_+^{1/2} (I0 + M + M sqrt(chi M / 8pi))^{1/2}.
pub fn c_plus(inputs: &TheoryInputs) -> f64 {
    let ls = lambda_star(inputs.chi, inputs.mass);
    let gap = (inputs.i0 - ls).max(0.0);
    (gap * (inputs.i0 + inputs.mass + inputs.mass * (inputs.chi_m() / (8.0 * PI)).sqrt())).sqrt()
}

/// p-moment envelope I(t) <= C_+ e^{2t} + lambda*.
pub fn p_moment_bound(inputs: &TheoryInputs, t: f64) -> f64 {
    c_plus(inputs) * (2.0 * t).exp() + lambda_star(inputs.chi, inputs.mass)
}

/// K_+ = 2M log( sup( 2 sqrt(C_+ / 2M), 2 sqrt(lambda*_+ / 2M) + 1 ) ),
/// the constant of the rho-moment envelope K_+ + 2Mt.
pub fn k_plus(inputs: &TheoryInputs) -> f64 {
    let m = inputs.mass;
    let a = 2.0 * (c_plus(inputs) / (2.0 * m)).sqrt();
    let b = 2.0 * (lambda_star_plus(inputs.chi, m) / (2.0 * m)).sqrt() + 1.0;
    2.0 * m * a.max(b).ln()
}

/// rho-moment envelope K_+ + 2Mt.
pub fn rho_moment_bound(inputs: &TheoryInputs, t: f64) -> f64 {
    k_plus(inputs) + 2.0 * inputs.mass * t
}

/// Entropy lower envelope along solutions:
/// Ent(n_t) >= -I0 - M + M e^{-2t} + M log(M / 2pi) - 2Mt.
pub fn entropy_lower_bound(inputs: &TheoryInputs, t: f64) -> f64 {
    let m = inputs.mass;
    -inputs.i0 - m + m * (-2.0 * t).exp() + m * (m / (2.0 * PI)).ln() - 2.0 * m * t
}

/// K_2(M) = M log(4 e pi / M), the constant of the Green-kernel log-HLS
/// form: C_2(M) plus the 2M log 2 from the kernel split.
pub fn k2(mass: f64) -> f64 {
    mass * (4.0 * std::f64::consts::E * PI / mass).ln()
}

/// C_2(M) = M log(e pi / M) = M (1 + log pi - log M), the constant of the
/// sinh-kernel log-HLS form.
///
/// This is the n = 2 value of -M log M + n M (d/d lambda) C_{n,lambda} at
/// lambda = 0, and the unique mass dependence compatible with the scaling
/// f -> a f (the deficit is then linear in a); the same constant as in the
/// Euclidean plane.
pub fn c2(mass: f64) -> f64 {
    mass * (std::f64::consts::E * PI / mass).ln()
}

/// Entropy upper bound on [0, T] in the subcritical regime chi M < 8 pi:
/// (1 - chi M/8pi)^{-1} [ F0 + (chi M/8pi)(K2(M) + 2 K_+ + 4MT) ].
pub fn entropy_upper_bound(inputs: &TheoryInputs, t_end: f64) -> crate::error::Result<f64> {
    let cm = inputs.chi_m();
    if cm >= 8.0 * PI {
        return Err(crate::error::Error::Supercritical { chi_m: cm });
    }
    let frac = cm / (8.0 * PI);
    let c = inputs.f0 + frac * (k2(inputs.mass) + 2.0 * k_plus(inputs) + 4.0 * inputs.mass * t_end);
    Ok(c / (1.0 - frac))
}

/// Bound of the |log| mass from the entropy chain with free parameter s:
/// used to dominate M_t(K) log K uniformly on [0, T].
pub fn abs_log_mass_bound(inputs: &TheoryInputs, t_end: f64, s: f64) -> crate::error::Result<f64> {
    let ent_up = entropy_upper_bound(inputs, t_end)?;
    Ok(ent_up
        + 2.0 / std::f64::consts::E
        + 2.0 * inputs.mass * (2.0 * PI * s).ln()
        + (c_plus(inputs) * (2.0 * t_end).exp() + lambda_star(inputs.chi, inputs.mass)) / s)
}

/// Entropy decay bounds at time t.
///
/// The linear bound Ent0 - chi M^2 t / 4pi applies for chi M <= 4 pi; the
/// strong (exp/log) refinement applies for chi M < 4 pi and is pointwise
/// below the linear one.
pub fn entropy_decay_bounds(inputs: &TheoryInputs, t: f64) -> (Option<f64>, Option<f64>) {
    let cm = inputs.chi_m();
    let m = inputs.mass;
    let linear = if cm <= 4.0 * PI {
        Some(-inputs.chi * m * m / (4.0 * PI) * t + inputs.ent0)
    } else {
        None
    };
    let strong = if cm < 4.0 * PI {
        let bracket = (-inputs.ent0 / m).exp()
            + 4.0 * PI * std::f64::consts::E / m
                * (4.0 * PI / cm - 1.0)
                * (1.0 - (-cm * t / (4.0 * PI)).exp());
        Some(-inputs.chi * m * m / (4.0 * PI) * t - m * bracket.ln())
    } else {
        None
    };
    (linear, strong)
}

/// h(q) = 4q / (q + 1)^2: ||n_t||_q is non-increasing when chi M <= 4 pi h(q).
pub fn h_of_q(q: f64) -> f64 {
    4.0 * q / ((q + 1.0) * (q + 1.0))
}

/// The mass-sensitivity product threshold 4 pi h(q) itself.
pub fn lq_monotonicity_threshold(q: f64) -> f64 {
    4.0 * PI * h_of_q(q)
}

/// Everything above, evaluated once and serializable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub chi: f64,
    pub mass: f64,
    pub i0: f64,
    pub lambda_star: f64,
    pub supercritical: bool,
    pub blowup_condition: bool,
    pub t_bl: Option<f64>,
    pub c_plus: f64,
    pub k_plus: f64,
    pub h_q2: f64,
}

impl BoundsReport {
    pub fn evaluate(inputs: &TheoryInputs) -> Self {
        let ls = lambda_star(inputs.chi, inputs.mass);
        let supercritical = inputs.chi_m() > 8.0 * PI;
        Self {
            chi: inputs.chi,
            mass: inputs.mass,
            i0: inputs.i0,
            lambda_star: ls,
            supercritical,
            blowup_condition: supercritical && inputs.i0 < ls,
            t_bl: blowup_time_bound(inputs),
            c_plus: c_plus(inputs),
            k_plus: k_plus(inputs),
            h_q2: h_of_q(2.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(chi: f64, mass: f64, i0: f64) -> TheoryInputs {
        TheoryInputs::new(chi, mass, i0, 0.0, 0.0)
    }

    #[test]
    fn lambda_star_values() {
        assert!(lambda_star(1.0, 8.0 * PI).abs() < 1e-12);
        let ls = lambda_star(1.0, 16.0 * PI);
        assert!((ls - 16.0 * PI * (2.0f64.sqrt() - 1.0)).abs() < 1e-10);
        assert!((ls - 20.82).abs() < 0.01);
        // chi M = 2 pi: sqrt(1/4) - 1 = -1/2
        let m = 2.0 * PI;
        assert!((lambda_star(1.0, m) + m / 2.0).abs() < 1e-12);
    }

    #[test]
    fn blowup_time_examples() {
        // I0 = 0: numerator equals denominator, T_bl = 0
        let t = blowup_time_bound(&inputs(1.0, 16.0 * PI, 0.0)).unwrap();
        assert!(t.abs() < 1e-12);
        // I0 = 10
        let t = blowup_time_bound(&inputs(1.0, 16.0 * PI, 10.0)).unwrap();
        let m = 16.0 * PI;
        let want = 0.25
            * ((m * m / (8.0 * PI) * (m - 8.0 * PI))
                / (m.powi(3) / (8.0 * PI) - (m + 10.0) * (m + 10.0)))
                .ln();
        assert!((t - want).abs() < 1e-14);
        assert!((t - 0.144).abs() < 0.001, "t = {t}");
        // subcritical: absent
        assert!(blowup_time_bound(&inputs(1.0, 4.0 * PI, 3.0)).is_none());
        // supercritical but I0 too large: absent
        assert!(blowup_time_bound(&inputs(1.0, 16.0 * PI, 30.0)).is_none());
    }

    #[test]
    fn blowup_time_monotone_in_i0_and_diverges_at_lambda_star() {
        let m = 16.0 * PI;
        let ls = lambda_star(1.0, m);
        let mut prev = -1.0;
        for k in 0..20 {
            let i0 = ls * (k as f64) / 20.0;
            let t = blowup_time_bound(&inputs(1.0, m, i0)).unwrap();
            assert!(t > prev, "T_bl not increasing at I0 = {i0}");
            prev = t;
        }
        let near = blowup_time_bound(&inputs(1.0, m, ls * (1.0 - 1e-9))).unwrap();
        assert!(near > 2.0, "T_bl should diverge near lambda*: {near}");
    }

    #[test]
    fn envelope_at_zero_and_chi_zero_growth() {
        let inp = inputs(1.0, 4.0 * PI, 2.0);
        let e0 = virial_envelope(&inp, 0.0);
        assert!((e0 - (2.0 + 4.0 * PI).powi(2)).abs() < 1e-10);
        // supercritical with I0 < lambda*: envelope hits M^2 exactly at T_bl
        let inp = inputs(1.0, 16.0 * PI, 10.0);
        let tbl = blowup_time_bound(&inp).unwrap();
        let at_tbl = virial_envelope(&inp, tbl);
        assert!((at_tbl - (16.0 * PI) * (16.0 * PI)).abs() < 1e-8 * at_tbl.abs());
    }

    #[test]
    fn p_moment_bound_structure() {
        // I0 <= lambda*: C_+ = 0, bound constant lambda*
        let inp = inputs(1.0, 16.0 * PI, 10.0);
        assert_eq!(c_plus(&inp), 0.0);
        assert_eq!(p_moment_bound(&inp, 3.0), lambda_star(1.0, 16.0 * PI));
        // I0 > lambda*: C_+ > 0 and bound at t = 0 dominates I0
        let inp = inputs(1.0, 16.0 * PI, 30.0);
        let c = c_plus(&inp);
        let want = (30.0f64 - lambda_star(1.0, 16.0 * PI)).sqrt()
            * (30.0 + 16.0 * PI + 16.0 * PI * 2.0f64.sqrt()).sqrt();
        assert!((c - want).abs() < 1e-10);
        assert!(p_moment_bound(&inp, 0.0) >= 30.0);
        // sweep: the bound dominates I0 at t = 0 across parameters
        for i0 in [0.0, 1.0, 5.0, 25.0, 60.0] {
            for m in [2.0 * PI, 8.0 * PI, 20.0 * PI] {
                let inp = inputs(1.0, m, i0);
                assert!(p_moment_bound(&inp, 0.0) >= i0 - 1e-9, "m={m} i0={i0}");
            }
        }
    }

    #[test]
    fn k_plus_degenerate_and_monotone() {
        // C_+ = 0 and lambda* = 0 need chi M = 8 pi with I0 = 0: both
        // branches then degenerate to sup(0, 1) and K_+ vanishes
        let inp = inputs(1.0, 8.0 * PI, 0.0);
        assert_eq!(c_plus(&inp), 0.0);
        assert_eq!(k_plus(&inp), 0.0);
        // monotone in I0 through C_+
        let mut prev = -1.0;
        for k in 0..10 {
            let inp = inputs(1.0, 16.0 * PI, 20.0 + 5.0 * k as f64);
            let kp = k_plus(&inp);
            assert!(kp >= prev);
            prev = kp;
        }
    }

    #[test]
    fn entropy_lower_bound_shape() {
        let inp = TheoryInputs::new(1.0, 1.0, 0.5, 0.0, 0.0);
        let at0 = entropy_lower_bound(&inp, 0.0);
        assert!((at0 - (-0.5 + (1.0 / (2.0 * PI)).ln())).abs() < 1e-12);
        // slope at large t approaches -2M
        let d = entropy_lower_bound(&inp, 10.0) - entropy_lower_bound(&inp, 9.0);
        assert!((d + 2.0).abs() < 1e-6);
        // gaussian initial data M = 1, s = 0.5: entropy log(1/pi) - 1 >= bound
        let ent_gauss = (1.0f64 / PI).ln() - 1.0;
        assert!(ent_gauss >= at0);
    }

    #[test]
    fn entropy_upper_bound_structure() {
        // K2(1) = log(4 e pi) = log 4 + 1 + log pi
        assert!((k2(1.0) - (4.0f64.ln() + 1.0 + PI.ln())).abs() < 1e-14);
        assert!((k2(1.0) - 3.5310242469692907).abs() < 1e-12);
        // prefactor at chi M = 4 pi is 2
        let inp = TheoryInputs::new(1.0, 4.0 * PI, 1.0, 0.0, 3.0);
        let b = entropy_upper_bound(&inp, 0.0).unwrap();
        let frac: f64 = 0.5;
        let want = (inp.f0 + frac * (k2(inp.mass) + 2.0 * k_plus(&inp))) / (1.0 - frac);
        assert!((b - want).abs() < 1e-10);
        // chi -> 0 limit: bound -> F0
        let inp = TheoryInputs::new(1e-12, 1.0, 1.0, -0.3, -0.3);
        let b = entropy_upper_bound(&inp, 2.0).unwrap();
        assert!((b + 0.3).abs() < 1e-9);
        // supercritical input is an error
        let inp = TheoryInputs::new(1.0, 16.0 * PI, 1.0, 0.0, 0.0);
        assert!(entropy_upper_bound(&inp, 1.0).is_err());
    }

    #[test]
    fn entropy_decay_regimes() {
        // t = 0: both collapse to Ent0
        let inp = TheoryInputs::new(1.0, 2.0 * PI, 1.0, -0.7, 0.0);
        let (lin, strong) = entropy_decay_bounds(&inp, 0.0);
        assert!((lin.unwrap() + 0.7).abs() < 1e-12);
        assert!((strong.unwrap() + 0.7).abs() < 1e-10);
        // chi M = 4 pi: strong absent, linear present
        let inp = TheoryInputs::new(1.0, 4.0 * PI, 1.0, 0.0, 0.0);
        let (lin, strong) = entropy_decay_bounds(&inp, 1.0);
        assert!(lin.is_some() && strong.is_none());
        // strong <= linear on a grid of t for chi = 1, M = 2 pi, Ent0 = 0
        let inp = TheoryInputs::new(1.0, 2.0 * PI, 1.0, 0.0, 0.0);
        for k in 0..=40 {
            let t = 0.1 * k as f64;
            let (lin, strong) = entropy_decay_bounds(&inp, t);
            assert!(strong.unwrap() <= lin.unwrap() + 1e-12);
        }
        // chi M > 4 pi: both absent
        let inp = TheoryInputs::new(1.0, 6.0 * PI, 1.0, 0.0, 0.0);
        let (lin, strong) = entropy_decay_bounds(&inp, 1.0);
        assert!(lin.is_none() && strong.is_none());
    }

    #[test]
    fn lq_threshold_values() {
        assert!((h_of_q(1.0) - 1.0).abs() < 1e-15);
        assert!((lq_monotonicity_threshold(1.0) - 4.0 * PI).abs() < 1e-12);
        assert!((lq_monotonicity_threshold(2.0) - 32.0 * PI / 9.0).abs() < 1e-12);
        assert!((lq_monotonicity_threshold(2.0) - 11.17).abs() < 0.01);
        // h strictly decreasing past q = 1
        let mut prev = h_of_q(1.0);
        for k in 1..=20 {
            let h = h_of_q(1.0 + 0.25 * k as f64);
            assert!(h < prev);
            prev = h;
        }
    }

    #[test]
    fn envelope_bound_coherence() {
        // sqrt(envelope) - M <= p_moment_bound whenever the envelope argument
        // is nonnegative
        for m in [4.0 * PI, 10.0 * PI, 16.0 * PI] {
            for i0 in [0.0, 2.0, 10.0, 40.0] {
                let inp = inputs(1.0, m, i0);
                for k in 0..=20 {
                    let t = 0.05 * k as f64;
                    let env = virial_envelope(&inp, t);
                    if env >= 0.0 {
                        assert!(
                            env.sqrt() - m <= p_moment_bound(&inp, t) + 1e-9,
                            "m={m} i0={i0} t={t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn report_fields_consistent() {
        let inp = inputs(1.0, 16.0 * PI, 10.0);
        let rep = BoundsReport::evaluate(&inp);
        assert!(rep.supercritical && rep.blowup_condition);
        assert!(rep.t_bl.is_some());
        let inp = inputs(1.0, 4.0 * PI, 10.0);
        let rep = BoundsReport::evaluate(&inp);
        assert!(!rep.supercritical && !rep.blowup_condition && rep.t_bl.is_none());
    }
}
