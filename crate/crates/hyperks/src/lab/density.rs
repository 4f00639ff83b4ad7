//! Parametric families of test densities on the disk.
//!
//! Every family exposes a pointwise evaluator and an exact seeded sampler
//! (inverse CDF in the weight variable p, where the hyperbolic Gaussian is
//! exactly exponential), so no MCMC is involved anywhere.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{mobius_translate, weight_p_point, DiskPoint};
use crate::quad;

/// Largest admissible annulus edge / support radius. Keeps sampled points
/// clear of the rejected boundary band.
const RHO_CAP: f64 = 18.0;

/// The supported density families.
#[derive(Debug, Clone)]
pub enum DensityKind {
    /// (mass / 2 pi s) exp(-p/s); a probability density times mass, with
    /// p-moment equal to mass * s.
    HyperbolicGaussian { s: f64 },
    /// Constant on the geodesic annulus a <= rho <= b, zero elsewhere.
    Annulus { a: f64, b: f64 },
    /// base composed with the Moebius translation that brings `center` to the
    /// origin; an isometric push-forward of the base density.
    MobiusTranslated {
        base: Box<TestDensity>,
        center: DiskPoint,
    },
    /// Positive combination of the components with the given weights.
    Mixture {
        components: Vec<TestDensity>,
        weights: Vec<f64>,
    },
}

/// A density on the disk with evaluator, sampler, and radial quadrature.
#[derive(Debug, Clone)]
pub struct TestDensity {
    kind: DensityKind,
    mass: f64,
}

impl TestDensity {
    pub fn gaussian(s: f64, mass: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                message: format!("gaussian scale must be positive, got {s}"),
            });
        }
        check_mass(mass)?;
        Ok(Self {
            kind: DensityKind::HyperbolicGaussian { s },
            mass,
        })
    }

    pub fn annulus(a: f64, b: f64, mass: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= RHO_CAP) {
            return Err(Error::InvalidParameter {
                name: "annulus",
                message: format!("need 0 <= a < b <= {RHO_CAP}, got [{a}, {b}]"),
            });
        }
        check_mass(mass)?;
        Ok(Self {
            kind: DensityKind::Annulus { a, b },
            mass,
        })
    }

    pub fn translated(base: TestDensity, center: DiskPoint) -> Self {
        let mass = base.mass;
        Self {
            kind: DensityKind::MobiusTranslated {
                base: Box::new(base),
                center,
            },
            mass,
        }
    }

    pub fn mixture(components: Vec<TestDensity>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() || components.len() != weights.len() {
            return Err(Error::InvalidParameter {
                name: "mixture",
                message: "components and weights must be nonempty and equal-length".to_string(),
            });
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "weights",
                message: "mixture weights must be positive".to_string(),
            });
        }
        let mass = components
            .iter()
            .zip(&weights)
            .map(|(c, w)| w * c.mass)
            .sum();
        Ok(Self {
            kind: DensityKind::Mixture {
                components,
                weights,
            },
            mass,
        })
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Pointwise value of the density at x.
    pub fn eval(&self, x: &DiskPoint) -> f64 {
        match &self.kind {
            DensityKind::HyperbolicGaussian { s } => {
                let p = weight_p_point(x);
                self.mass / (2.0 * std::f64::consts::PI * s) * (-p / s).exp()
            }
            DensityKind::Annulus { a, b } => {
                let p = weight_p_point(x);
                let (pa, pb) = (a.cosh() - 1.0, b.cosh() - 1.0);
                if p >= pa && p <= pb {
                    self.mass / (2.0 * std::f64::consts::PI * (pb - pa))
                } else {
                    0.0
                }
            }
            DensityKind::MobiusTranslated { base, center } => {
                base.eval(&mobius_translate(center, x))
            }
            DensityKind::Mixture {
                components,
                weights,
            } => components
                .iter()
                .zip(weights)
                .map(|(c, w)| w * c.eval(x))
                .sum(),
        }
    }

    /// Whether the density is a radial function of rho.
    pub fn is_radial(&self) -> bool {
        match &self.kind {
            DensityKind::HyperbolicGaussian { .. } | DensityKind::Annulus { .. } => true,
            DensityKind::MobiusTranslated { base, center } => {
                center.norm() == 0.0 && base.is_radial()
            }
            DensityKind::Mixture { components, .. } => components.iter().all(|c| c.is_radial()),
        }
    }

    /// Radial profile f(rho) for radial densities.
    pub fn radial_profile(&self, rho: f64) -> Result<f64> {
        if !self.is_radial() {
            return Err(Error::UnsupportedDensity(
                "radial profile of a non-radial density".to_string(),
            ));
        }
        Ok(self.profile_p(rho.cosh() - 1.0))
    }

    /// Radial profile as a function of p = cosh(rho) - 1; callers must have
    /// checked `is_radial`.
    pub(crate) fn radial_profile_p(&self, p: f64) -> f64 {
        self.profile_p(p)
    }

    /// Radial profile as a function of p = cosh(rho) - 1 (radial kinds only).
    fn profile_p(&self, p: f64) -> f64 {
        match &self.kind {
            DensityKind::HyperbolicGaussian { s } => {
                self.mass / (2.0 * std::f64::consts::PI * s) * (-p / s).exp()
            }
            DensityKind::Annulus { a, b } => {
                let (pa, pb) = (a.cosh() - 1.0, b.cosh() - 1.0);
                if p >= pa && p <= pb {
                    self.mass / (2.0 * std::f64::consts::PI * (pb - pa))
                } else {
                    0.0
                }
            }
            DensityKind::MobiusTranslated { base, .. } => base.profile_p(p),
            DensityKind::Mixture {
                components,
                weights,
            } => components
                .iter()
                .zip(weights)
                .map(|(c, w)| w * c.profile_p(p))
                .sum(),
        }
    }

    /// d/drho of the radial profile, for the C^1 families only.
    pub fn radial_derivative(&self, rho: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::HyperbolicGaussian { s } => {
                let p = rho.cosh() - 1.0;
                Ok(-self.mass / (2.0 * std::f64::consts::PI * s)
                    * (rho.sinh() / s)
                    * (-p / s).exp())
            }
            DensityKind::Annulus { .. } => Err(Error::UnsupportedDensity(
                "annulus profile is not differentiable".to_string(),
            )),
            DensityKind::MobiusTranslated { base, center } => {
                if center.norm() == 0.0 {
                    base.radial_derivative(rho)
                } else {
                    Err(Error::UnsupportedDensity(
                        "translated density is not radial".to_string(),
                    ))
                }
            }
            DensityKind::Mixture {
                components,
                weights,
            } => {
                let mut sum = 0.0;
                for (c, w) in components.iter().zip(weights) {
                    sum += w * c.radial_derivative(rho)?;
                }
                Ok(sum)
            }
        }
    }

    /// Radius beyond which the density carries a negligible (< ~1e-14
    /// relative) fraction of its mass. Used to truncate quadratures.
    pub fn support_rho(&self) -> f64 {
        match &self.kind {
            DensityKind::HyperbolicGaussian { s } => {
                // tail mass fraction outside p is exp(-p/s)
                let p = 34.0 * s;
                (1.0 + p).acosh().min(RHO_CAP)
            }
            DensityKind::Annulus { b, .. } => *b,
            DensityKind::MobiusTranslated { base, center } => (base.support_rho()
                + crate::geometry::distance_to_origin(center).value())
            .min(RHO_CAP),
            DensityKind::Mixture { components, .. } => components
                .iter()
                .map(|c| c.support_rho())
                .fold(0.0, f64::max),
        }
    }

    /// Fraction of the total mass lying beyond geodesic radius `rho` from
    /// the origin (exact for the radial families, a triangle-inequality
    /// upper bound for translated ones).
    pub fn mass_fraction_beyond(&self, rho: f64) -> f64 {
        let p = rho.cosh() - 1.0;
        match &self.kind {
            DensityKind::HyperbolicGaussian { s } => (-p / s).exp(),
            DensityKind::Annulus { a, b } => {
                let (pa, pb) = (a.cosh() - 1.0, b.cosh() - 1.0);
                if p <= pa {
                    1.0
                } else if p >= pb {
                    0.0
                } else {
                    (pb - p) / (pb - pa)
                }
            }
            DensityKind::MobiusTranslated { base, center } => {
                let d = crate::geometry::distance_to_origin(center).value();
                if rho <= d {
                    1.0
                } else {
                    base.mass_fraction_beyond(rho - d)
                }
            }
            DensityKind::Mixture {
                components,
                weights,
            } => {
                let total: f64 = components
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| w * c.mass)
                    .sum();
                components
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| w * c.mass * c.mass_fraction_beyond(rho))
                    .sum::<f64>()
                    / total
            }
        }
    }

    /// Discontinuity locations of the radial profile, as geodesic radii.
    pub fn breakpoints_rho(&self) -> Vec<f64> {
        self.breakpoints_p()
            .into_iter()
            .map(|p| (1.0 + p).acosh())
            .collect()
    }

    /// Discontinuity locations of the radial profile, in the p variable.
    fn breakpoints_p(&self) -> Vec<f64> {
        match &self.kind {
            DensityKind::HyperbolicGaussian { .. } => vec![],
            DensityKind::Annulus { a, b } => vec![a.cosh() - 1.0, b.cosh() - 1.0],
            DensityKind::MobiusTranslated { base, .. } => base.breakpoints_p(),
            DensityKind::Mixture { components, .. } => {
                let mut all: Vec<f64> = components.iter().flat_map(|c| c.breakpoints_p()).collect();
                all.sort_by(|u, v| u.partial_cmp(v).unwrap());
                all.dedup();
                all
            }
        }
    }

    /// Integral of phi(rho, p, f(rho)) dV over the disk for radial
    /// densities: phi is the full integrand and receives the density value
    /// at the node as its third argument (so a plain moment is
    /// `phi = |_, p, f| p * f`). Composite Gauss-Legendre in the variable
    /// v = sqrt(p), where rho = 2 asinh(v / sqrt 2) is smooth through the
    /// origin and both profile discontinuities and the measure are exact.
    pub fn integrate_radial<F: Fn(f64, f64, f64) -> f64>(
        &self,
        phi: F,
        nodes: usize,
    ) -> Result<f64> {
        if !self.is_radial() {
            return Err(Error::UnsupportedDensity(
                "radial quadrature of a non-radial density".to_string(),
            ));
        }
        let p_max = self.support_rho().cosh() - 1.0;
        let mut cuts = vec![0.0, p_max];
        for b in self.breakpoints_p() {
            if b > 0.0 && b < p_max {
                cuts.push(b);
            }
        }
        cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());
        let mut total = 0.0;
        for seg in cuts.windows(2) {
            let (vl, vr) = (seg[0].sqrt(), seg[1].sqrt());
            if vr <= vl {
                continue;
            }
            // panels proportional to segment length in v, at least 8
            let panels = (8.0 + 2.0 * (vr - vl)).ceil() as usize;
            total += quad::integrate_composite(
                |v| {
                    let p = v * v;
                    let rho = 2.0 * (v / std::f64::consts::SQRT_2).asinh();
                    let f = self.profile_p(p);
                    phi(rho, p, f) * 2.0 * v
                },
                vl,
                vr,
                nodes,
                panels,
            );
        }
        Ok(2.0 * std::f64::consts::PI * total)
    }

    /// Numerical mass check: errors unless the integral of the evaluator
    /// matches the declared mass to 1e-6 relative.
    pub fn verify_mass(&self) -> Result<()> {
        let m = self.quadrature_mass()?;
        let rel = (m - self.mass).abs() / self.mass;
        if rel > 1e-6 {
            return Err(Error::InvalidParameter {
                name: "mass",
                message: format!(
                    "declared {} but integrates to {m} ({rel:.2e} off)",
                    self.mass
                ),
            });
        }
        Ok(())
    }

    fn quadrature_mass(&self) -> Result<f64> {
        match &self.kind {
            DensityKind::MobiusTranslated { base, .. } => base.quadrature_mass(),
            DensityKind::Mixture {
                components,
                weights,
            } => {
                let mut sum = 0.0;
                for (c, w) in components.iter().zip(weights) {
                    sum += w * c.quadrature_mass()?;
                }
                Ok(sum)
            }
            _ => self.integrate_radial(|_, _, f| f, 32),
        }
    }

    /// Draws a point distributed proportionally to the density.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> DiskPoint {
        match &self.kind {
            DensityKind::HyperbolicGaussian { s } => {
                let u: f64 = rng.gen();
                let p = -s * (1.0 - u).ln();
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                point_from_p_theta(p, theta)
            }
            DensityKind::Annulus { a, b } => {
                let (pa, pb) = (a.cosh() - 1.0, b.cosh() - 1.0);
                let p = rng.gen_range(pa..pb);
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                point_from_p_theta(p, theta)
            }
            DensityKind::MobiusTranslated { base, center } => {
                let y = base.sample(rng);
                mobius_translate(center, &y)
            }
            DensityKind::Mixture {
                components,
                weights,
            } => {
                let masses: Vec<f64> = components
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| w * c.mass)
                    .collect();
                let total: f64 = masses.iter().sum();
                let mut u: f64 = rng.gen_range(0.0..total);
                for (c, m) in components.iter().zip(&masses) {
                    if u < *m {
                        return c.sample(rng);
                    }
                    u -= m;
                }
                components.last().unwrap().sample(rng)
            }
        }
    }
}

/// Disk point at weight p and angle theta: |x| = sqrt(p / (p + 2)).
fn point_from_p_theta(p: f64, theta: f64) -> DiskPoint {
    let p = p.min(RHO_CAP.cosh() - 1.0);
    let r = (p / (p + 2.0)).sqrt();
    DiskPoint::new(r * theta.cos(), r * theta.sin()).expect("p capped below the boundary margin")
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mass",
            message: format!("must be positive and finite, got {mass}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_mass_and_moments() {
        let f = TestDensity::gaussian(0.5, 1.0).unwrap();
        f.verify_mass().unwrap();
        // p-moment of q_s is s
        let pm = f.integrate_radial(|_, p, v| p * v, 32).unwrap();
        assert!((pm - 0.5).abs() < 1e-10, "p-moment {pm}");
        // entropy of q_s: -log(2 pi s) - 1
        let want = -(2.0 * std::f64::consts::PI * 0.5).ln() - 1.0;
        let ent = f
            .integrate_radial(|_, _, v| if v > 0.0 { v * v.ln() } else { 0.0 }, 32)
            .unwrap();
        assert!((ent - want).abs() < 1e-9, "entropy {ent} vs {want}");
    }

    #[test]
    fn annulus_mass_and_p_moment() {
        let m = 4.0 * std::f64::consts::PI;
        let f = TestDensity::annulus(0.5, 1.0, m).unwrap();
        f.verify_mass().unwrap();
        // mean of p over the annulus measure: volume element is 2 pi dp, so
        // mean p = (pa + pb)/2
        let pm = f.integrate_radial(|_, p, v| p * v, 32).unwrap();
        let want = m * (0.5f64.cosh() - 1.0 + 1.0f64.cosh() - 1.0) / 2.0;
        assert!((pm - want).abs() < 1e-9 * want);
    }

    #[test]
    fn zero_width_annulus_rejected() {
        assert!(TestDensity::annulus(0.7, 0.7, 1.0).is_err());
    }

    #[test]
    fn sampler_matches_p_moment() {
        let f = TestDensity::gaussian(0.8, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = f.sample(&mut rng);
            sum += weight_p_point(&x);
        }
        let mean = sum / n as f64;
        // E[p] = s; SE = s / sqrt(n)
        assert!(
            (mean - 0.8).abs() < 5.0 * 0.8 / (n as f64).sqrt(),
            "mean {mean}"
        );
    }

    #[test]
    fn translated_preserves_mass_and_entropy() {
        let base = TestDensity::gaussian(1.0, 1.0).unwrap();
        let center = DiskPoint::from_rho_theta(1.0, 0.3).unwrap();
        let f = TestDensity::translated(base.clone(), center);
        assert!(!f.is_radial());
        f.verify_mass().unwrap();
        // spot check: evaluator at the new center equals base at origin
        let at_center = f.eval(&center);
        let base_at_origin = base.eval(&DiskPoint::origin());
        assert!((at_center - base_at_origin).abs() < 1e-12);
    }

    #[test]
    fn mixture_mass_adds() {
        let a = TestDensity::gaussian(0.5, 1.0).unwrap();
        let b = TestDensity::annulus(1.0, 2.0, 1.0).unwrap();
        let f = TestDensity::mixture(vec![a, b], vec![2.0, 3.0]).unwrap();
        assert!((f.mass() - 5.0).abs() < 1e-12);
        f.verify_mass().unwrap();
        assert!(f.is_radial());
    }

    #[test]
    fn sampler_empirical_mass_in_support() {
        let f = TestDensity::annulus(0.5, 1.5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = f.sample(&mut rng);
            let rho = crate::geometry::distance_to_origin(&x).value();
            assert!((0.5..=1.5).contains(&rho));
        }
    }
}
