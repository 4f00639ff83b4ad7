//! The Green function of -Delta_H on the disk, its gradient, the interaction
//! factor L(x, y) of the virial identity, and kernel quadrature of the
//! chemical potential.
//!
//! G_H(x, y) = -(1/2pi) log tanh(rho(x,y)/2) = -(1/4pi) log |T_x(y)|^2,
//! and the potential solving -Delta_H c = n is c = integral of G_H n dV.

use crate::error::{Error, Result};
use crate::geometry::{
    gradient_factor, hyperbolic_distance, v_factor, weight_p_grad_euclid, DiskPoint,
    HyperbolicDistance,
};
use crate::lab::density::TestDensity;
use crate::quad;

const K1: f64 = 1.0 / (2.0 * std::f64::consts::PI);

/// G_H as a function of the separation: -(1/2pi) log tanh(rho/2).
///
/// Positive, strictly decreasing, with a logarithmic singularity at rho = 0.
pub fn green_value(rho: &HyperbolicDistance) -> Result<f64> {
    let r = rho.value();
    if r <= 0.0 {
        return Err(Error::KernelSingularity);
    }
    Ok(-K1 * (r / 2.0).tanh().ln())
}

/// Green kernel value and its Euclidean x-gradient at a pair of points.
///
/// `g` is nonnegative everywhere and decays to zero monotonically in the
/// separation; `grad` are the Euclidean coordinate components of
/// grad_x G_H(x, y) = -(1/4 pi) grad_x H(x, y).
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub g: f64,
    pub grad: [f64; 2],
}

/// Evaluates the Green kernel and its x-gradient together.
pub fn kernel_value(x: &DiskPoint, y: &DiskPoint) -> Result<KernelValue> {
    let g = green_value(&hyperbolic_distance(x, y))?;
    let h = grad_x_h(x, y)?;
    Ok(KernelValue {
        g,
        grad: [-0.5 * K1 * h[0], -0.5 * K1 * h[1]],
    })
}

/// d G_H / d rho = -1 / (2 pi sinh rho).
pub fn green_radial_derivative(rho: f64) -> f64 {
    -K1 / rho.sinh()
}

/// Euclidean x-gradient of H(x, y) = log |T_x(y)|^2.
pub fn grad_x_h(x: &DiskPoint, y: &DiskPoint) -> Result<[f64; 2]> {
    let d_sq = x.euclid_dist_sq(y);
    if d_sq < 1e-24 {
        return Err(Error::CoincidentPoints(d_sq.sqrt()));
    }
    let v = v_factor(x, y);
    let a = 2.0 * (1.0 - x.norm_sq()) * (1.0 - y.norm_sq()) / (d_sq * v);
    let b = 2.0 * (1.0 - y.norm_sq()) / v;
    Ok([
        a * (x.x1() - y.x1()) + b * x.x1(),
        a * (x.x2() - y.x2()) + b * x.x2(),
    ])
}

/// L(x, y) = 2 (1 - |x|^2 |y|^2) / V(x, y), the closed form of the
/// symmetrized pairing of grad p with grad H.
pub fn l_factor(x: &DiskPoint, y: &DiskPoint) -> f64 {
    2.0 * (1.0 - x.norm_sq() * y.norm_sq()) / v_factor(x, y)
}

/// L assembled from its definition,
/// ((1-|x|^2)/2)^2 grad_e p(x) . grad_e^x H + (x <-> y),
/// for cross-checking against `l_factor`.
pub fn l_assembled(x: &DiskPoint, y: &DiskPoint) -> Result<f64> {
    let gx = grad_x_h(x, y)?;
    let gy = grad_x_h(y, x)?;
    let px = weight_p_grad_euclid(x);
    let py = weight_p_grad_euclid(y);
    Ok(gradient_factor(x) * (px[0] * gx[0] + px[1] * gx[1])
        + gradient_factor(y) * (py[0] * gy[0] + py[1] * gy[1]))
}

/// Tensor (rho, theta) Gauss-Legendre rule over the disk against the exact
/// measure sinh(rho) drho dtheta, truncated at the density's support radius.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub n_rho: usize,
    pub n_theta: usize,
}

impl QuadratureSpec {
    pub fn new(n_rho: usize, n_theta: usize) -> Result<Self> {
        if n_rho * n_theta < 100 {
            return Err(Error::InvalidParameter {
                name: "nodes",
                message: format!("need at least 100 nodes, got {}", n_rho * n_theta),
            });
        }
        Ok(Self { n_rho, n_theta })
    }
}

/// Chemical potential c(x) = integral of G_H(x, y) n(y) dV_y by tensor
/// quadrature.
///
/// Nodes that land within 1e-8 of x in hyperbolic distance are skipped and
/// their weight redistributed proportionally; the kernel is integrable at
/// zero separation, so the omission vanishes under refinement and the rule
/// stays deterministic.
pub fn potential_quadrature(
    density: &TestDensity,
    x: &DiskPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let rho_max = density.support_rho();
    let (rho_nodes, rho_weights) = quad::gauss_legendre(spec.n_rho);
    let (th_nodes, th_weights) = quad::gauss_legendre(spec.n_theta);
    let mut sum = 0.0;
    let mut weight_total = 0.0;
    let mut weight_skipped = 0.0;
    for (rn, rw) in rho_nodes.iter().zip(&rho_weights) {
        let rho = 0.5 * rho_max * (rn + 1.0);
        let jac_rho = 0.5 * rho_max;
        for (tn, tw) in th_nodes.iter().zip(&th_weights) {
            let theta = std::f64::consts::PI * (tn + 1.0);
            let jac_th = std::f64::consts::PI;
            let y = DiskPoint::from_rho_theta(rho, theta)?;
            let w = rw * tw * jac_rho * jac_th * rho.sinh() * density.eval(&y);
            weight_total += w;
            let sep = hyperbolic_distance(x, &y);
            if sep.value() < 1e-8 {
                weight_skipped += w;
                continue;
            }
            sum += w * green_value(&sep)?;
        }
    }
    if weight_skipped > 0.0 && weight_total > weight_skipped {
        sum *= weight_total / (weight_total - weight_skipped);
    }
    Ok(sum)
}

/// Potential with automatic refinement: the rule is doubled until two
/// successive evaluations agree to `tolerance` (relative), or the node cap
/// is hit, in which case the budget error carries the last estimate.
pub fn potential_refined(
    density: &TestDensity,
    x: &DiskPoint,
    tolerance: f64,
    node_cap: usize,
) -> Result<f64> {
    let mut n_rho = 64;
    let mut n_theta = 32;
    let mut prev = potential_quadrature(density, x, &QuadratureSpec { n_rho, n_theta })?;
    loop {
        n_rho *= 2;
        n_theta *= 2;
        if n_rho * n_theta > node_cap {
            return Err(Error::BudgetExhausted {
                estimate: prev,
                tolerance,
            });
        }
        let next = potential_quadrature(density, x, &QuadratureSpec { n_rho, n_theta })?;
        if (next - prev).abs() <= tolerance * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
}
