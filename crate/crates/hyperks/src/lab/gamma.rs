//! Gamma function via the Lanczos approximation (g = 7, 9 terms).

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma(z) for real z (poles at nonpositive integers return infinity).
pub fn gamma(z: f64) -> f64 {
    if z < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        std::f64::consts::PI / ((std::f64::consts::PI * z).sin() * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let mut x = COEFFS[0];
        for (i, c) in COEFFS.iter().enumerate().skip(1) {
            x += c / (z + i as f64);
        }
        let t = z + G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_and_factorial_values() {
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let mut fact = 1.0;
        for n in 1..=12u32 {
            // Gamma(n) = (n-1)!
            assert!(
                (gamma(n as f64) - fact).abs() < 1e-12 * fact,
                "Gamma({n}) = {}",
                gamma(n as f64)
            );
            fact *= n as f64;
        }
        assert!((gamma(1.5) - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }
}
