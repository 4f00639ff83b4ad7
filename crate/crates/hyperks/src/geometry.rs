//! Poincare-disk geometry: distances, Moebius translations, metric factors,
//! the exponential weight p, and the radial Laplace-Beltrami operator.
//!
//! The model is the open unit disk B^2 with metric ds^2 = 4|dx|^2/(1-|x|^2)^2
//! (constant curvature -1). Geodesic polar coordinates (rho, theta) relate to
//! the Euclidean radius by |x| = tanh(rho/2), and the volume element is
//! dV = sinh(rho) drho dtheta.

use crate::error::{Error, Result};

/// Points closer than this to the unit circle are rejected: the distance to
/// the origin grows like -log(1 - |x|) and silently clamping corrupts moments.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

/// A point of the open unit disk in Euclidean coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    x1: f64,
    x2: f64,
}

impl DiskPoint {
    /// Builds a point, rejecting anything with |x| >= 1 - 1e-9.
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let norm_sq = x1 * x1 + x2 * x2;
        if !norm_sq.is_finite() || norm_sq >= (1.0 - BOUNDARY_MARGIN) * (1.0 - BOUNDARY_MARGIN) {
            return Err(Error::OutsideDisk(x1, x2));
        }
        Ok(Self { x1, x2 })
    }

    pub fn origin() -> Self {
        Self { x1: 0.0, x2: 0.0 }
    }

    /// Point at hyperbolic distance `rho` from the origin in direction `theta`.
    pub fn from_rho_theta(rho: f64, theta: f64) -> Result<Self> {
        if !(rho >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                message: format!("must be nonnegative, got {rho}"),
            });
        }
        let r = (rho / 2.0).tanh();
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &DiskPoint) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// Euclidean distance squared between two disk points.
    pub fn euclid_dist_sq(&self, other: &DiskPoint) -> f64 {
        let dx = self.x1 - other.x1;
        let dy = self.x2 - other.x2;
        dx * dx + dy * dy
    }

    /// Internal constructor for values already known to lie inside the disk
    /// (images of Moebius maps). Debug builds still check.
    fn new_unchecked(x1: f64, x2: f64) -> Self {
        debug_assert!(x1 * x1 + x2 * x2 < 1.0);
        Self { x1, x2 }
    }
}

/// A hyperbolic length, in the units of the curvature -1 metric.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HyperbolicDistance {
    rho: f64,
}

impl HyperbolicDistance {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho",
                message: format!("must be finite and nonnegative, got {rho}"),
            });
        }
        Ok(Self { rho })
    }

    pub fn value(&self) -> f64 {
        self.rho
    }
}

/// V(x, y) = 1 - 2 x.y + |x|^2 |y|^2, the common denominator of the Moebius
/// algebra. Equals |x - y|^2 + (1 - |x|^2)(1 - |y|^2).
pub fn v_factor(x: &DiskPoint, y: &DiskPoint) -> f64 {
    1.0 - 2.0 * x.dot(y) + x.norm_sq() * y.norm_sq()
}

/// Moebius translation T_x(y): the disk automorphism sending x to the origin.
///
/// T_x is an involution: T_x(T_x(y)) = y, and T_x(x) = 0, T_0(y) = -y.
pub fn mobius_translate(x: &DiskPoint, y: &DiskPoint) -> DiskPoint {
    let v = v_factor(x, y);
    let d_sq = x.euclid_dist_sq(y);
    let one_minus_x_sq = 1.0 - x.norm_sq();
    // (|y - x|^2 x - (1 - |x|^2)(y - x)) / V
    let n1 = d_sq * x.x1 - one_minus_x_sq * (y.x1 - x.x1);
    let n2 = d_sq * x.x2 - one_minus_x_sq * (y.x2 - x.x2);
    DiskPoint::new_unchecked(n1 / v, n2 / v)
}

/// |T_x(y)|, computed from |x - y|^2 / V without forming T_x(y).
///
/// This route avoids the cancellation of the numerator components at small
/// separations.
pub fn mobius_norm(x: &DiskPoint, y: &DiskPoint) -> f64 {
    (x.euclid_dist_sq(y) / v_factor(x, y)).sqrt()
}

/// Hyperbolic distance rho(x, y) = log((1 + |T_x(y)|) / (1 - |T_x(y)|)).
pub fn hyperbolic_distance(x: &DiskPoint, y: &DiskPoint) -> HyperbolicDistance {
    let t = mobius_norm(x, y);
    // log((1+t)/(1-t)) = 2 atanh(t); atanh keeps full accuracy for small t.
    HyperbolicDistance {
        rho: 2.0 * t.atanh(),
    }
}

/// Distance to the origin, rho(x, 0) = log((1 + |x|)/(1 - |x|)).
pub fn distance_to_origin(x: &DiskPoint) -> HyperbolicDistance {
    HyperbolicDistance {
        rho: 2.0 * x.norm().atanh(),
    }
}

/// The exponential weight p(rho) = 2 sinh^2(rho/2) = cosh(rho) - 1.
///
/// This is the substitute for the Euclidean |x|^2 moment weight: it satisfies
/// the closed relation `laplace_beltrami(p) = 2p + 2`.
pub fn weight_p(rho: &HyperbolicDistance) -> f64 {
    let s = (rho.rho / 2.0).sinh();
    2.0 * s * s
}

/// Point form of the weight: p(x) = 2|x|^2 / (1 - |x|^2).
pub fn weight_p_point(x: &DiskPoint) -> f64 {
    2.0 * x.norm_sq() / (1.0 - x.norm_sq())
}

/// Conformal factor of the hyperbolic gradient: grad_H f = ((1-|x|^2)/2)^2 grad_e f.
pub fn gradient_factor(x: &DiskPoint) -> f64 {
    let a = (1.0 - x.norm_sq()) / 2.0;
    a * a
}

/// Euclidean gradient of the weight p at x: grad_e p = 4x / (1 - |x|^2)^2.
pub fn weight_p_grad_euclid(x: &DiskPoint) -> [f64; 2] {
    let d = 1.0 - x.norm_sq();
    let c = 4.0 / (d * d);
    [c * x.x1(), c * x.x2()]
}

/// Discrete radial Laplace-Beltrami operator f'' + coth(rho) f' on a uniform
/// rho grid, second order in the interior.
///
/// At a grid point rho = 0 the removable singularity of coth is handled by
/// the limit form 2 f''(0) (smooth radial functions have f'(0) = 0); other
/// endpoints use one-sided differences.
pub fn laplace_beltrami_radial(f: &[f64], rho: &[f64]) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 3 || rho.len() != n {
        return Err(Error::GridTooCoarse {
            got: n.min(rho.len()),
            need: 3,
        });
    }
    let h = rho[1] - rho[0];
    if !(h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            message: "grid must be strictly increasing".to_string(),
        });
    }
    let h2 = h * h;
    let mut out = vec![0.0; n];
    for i in 0..n {
        if i == 0 {
            if rho[0] == 0.0 {
                // limit form: 2 f''(0) with the even extension f(-h) = f(h)
                out[0] = 4.0 * (f[1] - f[0]) / h2;
            } else {
                // one-sided second-order first derivative, 3-point second derivative
                let fp = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
                let fpp = if n >= 4 {
                    (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
                } else {
                    (f[0] - 2.0 * f[1] + f[2]) / h2
                };
                out[0] = fpp + fp / rho[0].tanh();
            }
        } else if i == n - 1 {
            let fp = (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * h);
            let fpp = if n >= 4 {
                (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) / h2
            } else {
                (f[i] - 2.0 * f[i - 1] + f[i - 2]) / h2
            };
            out[i] = fpp + fp / rho[i].tanh();
        } else {
            let fp = (f[i + 1] - f[i - 1]) / (2.0 * h);
            let fpp = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
            out[i] = fpp + fp / rho[i].tanh();
        }
    }
    Ok(out)
}
