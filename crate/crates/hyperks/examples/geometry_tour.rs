//! A tour of the Poincare-disk primitives: hyperbolic distance, Moebius
//! translation, the exponential weight p, and the radial Laplace-Beltrami
//! operator.
//!
//! ```bash
//! cargo run --example geometry_tour --release
//! ```

use hyperks::geometry::*;

fn main() -> hyperks::Result<()> {
    println!("Poincare disk geometry");
    println!("======================\n");

    // distances blow up logarithmically toward the rim
    println!("Euclidean |x|  ->  hyperbolic distance to 0");
    for r in [0.1, 0.5, 0.9, 0.99, 0.999] {
        let x = DiskPoint::new(r, 0.0)?;
        println!("  {r:<8} -> {:.4}", distance_to_origin(&x).value());
    }

    // Moebius translation: the hyperbolic analog of "shift x to the origin"
    let x = DiskPoint::new(0.5, 0.2)?;
    let y = DiskPoint::new(-0.3, 0.4)?;
    let moved = mobius_translate(&x, &y);
    println!("\nT_x(y) with x = (0.5, 0.2), y = (-0.3, 0.4):");
    println!("  T_x(y)       = ({:.6}, {:.6})", moved.x1(), moved.x2());
    println!(
        "  T_x(x)       = origin: |T_x(x)| = {:.2e}",
        mobius_translate(&x, &x).norm()
    );
    let back = mobius_translate(&x, &mobius_translate(&x, &y));
    println!(
        "  T_x(T_x(y))  = y to {:.2e} (involution)",
        (back.x1() - y.x1()).abs()
    );
    println!(
        "  rho(x, y)    = {:.6} = rho(T_x(y), 0) = {:.6}",
        hyperbolic_distance(&x, &y).value(),
        distance_to_origin(&moved).value()
    );

    // the exponential weight p = cosh(rho) - 1 replaces |x|^2 as the moment
    // weight; its Laplacian is affine in itself: Delta_H p = 2p + 2
    println!("\nweight p(rho) = cosh(rho) - 1 and its Laplacian:");
    let n = 4096;
    let h = 3.0 / n as f64;
    let rho: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let p: Vec<f64> = rho.iter().map(|r| r.cosh() - 1.0).collect();
    let lap = laplace_beltrami_radial(&p, &rho)?;
    for k in [1usize, 1024, 2048, 4095] {
        println!(
            "  rho = {:<6.3} p = {:>10.4}  Delta_H p = {:>10.4}  2p + 2 = {:>10.4}",
            rho[k],
            p[k],
            lap[k],
            2.0 * p[k] + 2.0
        );
    }

    // the disk rejects near-boundary points instead of silently clamping
    match DiskPoint::new(1.0 - 1e-12, 0.0) {
        Err(e) => println!("\nnear-boundary input rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
