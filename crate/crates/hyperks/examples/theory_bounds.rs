//! The closed-form side of the package: lambda*, T_bl, C_+, K_+, the
//! entropy corridor and decay bounds, and the L^q monotonicity thresholds,
//! evaluated over a small parameter grid.
//!
//! ```bash
//! cargo run --example theory_bounds --release
//! ```

use hyperks::bounds::*;

fn main() {
    let pi = std::f64::consts::PI;
    println!("blow-up threshold lambda*(M) = M (sqrt(chi M / 8 pi) - 1), chi = 1");
    println!("==================================================================\n");
    println!("  chi M / 8 pi   lambda*      T_bl(I0 = 1)   T_bl(I0 = 10)");
    for factor in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let mass = factor * 8.0 * pi;
        let ls = lambda_star(1.0, mass);
        let fmt = |i0: f64| match blowup_time_bound(&TheoryInputs::new(1.0, mass, i0, 0.0, 0.0)) {
            Some(t) => format!("{t:.4}"),
            None => "-".to_string(),
        };
        println!(
            "  {factor:<13}  {ls:>8.4}   {:>10}   {:>10}",
            fmt(1.0),
            fmt(10.0)
        );
    }

    println!("\nmoment envelopes at chi = 1, M = 16 pi, I0 = 30 (> lambda*):");
    let inp = TheoryInputs::new(1.0, 16.0 * pi, 30.0, 0.0, 0.0);
    println!("  C_+ = {:.4}, K_+ = {:.4}", c_plus(&inp), k_plus(&inp));
    for t in [0.0, 0.25, 0.5] {
        println!(
            "  t = {t}: I(t) <= {:.3}, rho-moment <= {:.3}",
            p_moment_bound(&inp, t),
            rho_moment_bound(&inp, t)
        );
    }

    println!("\nentropy corridor at chi = 1, M = 4 pi, I0 = 2 pi, Ent0 = 4.85, F0 = -5.0:");
    let inp = TheoryInputs::new(1.0, 4.0 * pi, 2.0 * pi, 4.85, -5.0);
    println!(
        "  upper bound on [0, 5]: {:.3}",
        entropy_upper_bound(&inp, 5.0).unwrap()
    );
    for t in [0.0, 1.0, 5.0] {
        println!("  lower(t = {t}) = {:.3}", entropy_lower_bound(&inp, t));
    }

    println!("\nentropy decay bounds at chi = 1, M = 2 pi, Ent0 = -1.93:");
    let inp = TheoryInputs::new(1.0, 2.0 * pi, pi, -1.93, 0.0);
    for t in [0.0, 0.5, 1.0, 2.0] {
        let (lin, strong) = entropy_decay_bounds(&inp, t);
        println!(
            "  t = {t}: linear {:.3}, strong {:.3}",
            lin.unwrap(),
            strong.unwrap()
        );
    }

    println!("\nL^q monotonicity thresholds 4 pi h(q), h(q) = 4q/(q+1)^2:");
    for q in [1.0, 1.5, 2.0, 3.0, 6.0] {
        println!(
            "  q = {q}: chi M <= {:.4} ({:.4} of 8 pi)",
            lq_monotonicity_threshold(q),
            lq_monotonicity_threshold(q) / (8.0 * pi)
        );
    }
}
