//! The functional-inequality bench on a few hand-picked densities: both
//! logarithmic HLS forms, the sharp-constant HLS family, Mugelli-Talenti,
//! Beckner, and the relative-entropy lower bound with its equality case.
//!
//! ```bash
//! cargo run --example inequality_bench --release
//! ```

use hyperks::geometry::DiskPoint;
use hyperks::lab::density::TestDensity;
use hyperks::lab::*;

fn show(name: &str, rep: &DeficitReport) {
    let sigma = if rep.mc_error > 0.0 {
        format!(
            " +- {:.2e} (MC, {} samples)",
            rep.mc_error, rep.nodes_or_samples
        )
    } else {
        " (quadrature)".to_string()
    };
    println!("  {name:<42} deficit {:+.6e}{sigma}", rep.value);
}

fn main() -> hyperks::Result<()> {
    let budget = Budget::new(40_000, 12345);

    println!("every deficit is oriented so 'inequality holds' means >= 0\n");

    println!("centered hyperbolic Gaussians:");
    for (s, mass) in [(1.0, 1.0), (0.25, 1.0), (0.5, 3.0), (0.5, 0.5)] {
        let f = TestDensity::gaussian(s, mass)?;
        show(
            &format!("log-HLS (Green kernel), s={s}, M={mass}"),
            &log_hls_deficit(&f, &budget)?,
        );
        show(
            &format!("log-HLS (sinh kernel),  s={s}, M={mass}"),
            &sinh_log_hls_deficit(&f, &budget)?,
        );
    }

    println!("\na Moebius-translated Gaussian (center at rho = 1):");
    let base = TestDensity::gaussian(0.6, 1.0)?;
    let center = DiskPoint::from_rho_theta(1.0, 0.0)?;
    let moved = TestDensity::translated(base.clone(), center);
    show("log-HLS, centered base", &log_hls_deficit(&base, &budget)?);
    show(
        "log-HLS, translated (rho-moment works)",
        &log_hls_deficit(&moved, &budget)?,
    );

    println!(
        "\nsharp HLS with C_{{2,1}} = 2 sqrt(pi) = {:.10}:",
        hls_constant(1.0)?
    );
    let f = TestDensity::gaussian(1.0, 1.0)?;
    for lambda in [0.5, 1.0, 1.5] {
        show(
            &format!("HLS ratio, lambda = {lambda}"),
            &hls_ratio(&f, &f, lambda, &budget)?,
        );
    }

    println!("\nPoincare-Sobolev (Mugelli-Talenti) and Beckner log-Sobolev:");
    for s in [0.2, 1.0, 5.0] {
        let u = TestDensity::gaussian(s, 1.0)?;
        show(
            &format!("Mugelli-Talenti, bump s = {s}"),
            &mugelli_talenti_deficit(&u)?,
        );
    }
    let u = TestDensity::gaussian(2.0, 1.0)?;
    show("Beckner, u ~ sqrt(q_1)", &beckner_deficit(&u)?);

    println!("\nrelative entropy against the Gaussian reference q_s:");
    let f = TestDensity::gaussian(0.7, 2.0)?;
    show(
        "matching scale s = 0.7 (equality case)",
        &relative_entropy_check(&f, 0.7, &budget)?,
    );
    show(
        "mismatched scale s = 1.4",
        &relative_entropy_check(&f, 1.4, &budget)?,
    );
    let annulus = TestDensity::annulus(0.5, 1.2, 1.0)?;
    show(
        "annulus vs s = 1",
        &relative_entropy_check(&annulus, 1.0, &budget)?,
    );
    Ok(())
}
