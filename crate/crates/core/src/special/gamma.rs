//! Complex Gamma function (Lanczos approximation with reflection).

use num_complex::Complex64;
use std::f64::consts::PI;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_49e-3,
    -0.210_264_441_724_104_88e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// sin(πx) with exact argument reduction.
fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let f = x - n;
    let s = (PI * f).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn cos_pi(x: f64) -> f64 {
    let n = x.round();
    let f = x - n;
    let c = (PI * f).cos();
    if (n as i64) % 2 == 0 {
        c
    } else {
        -c
    }
}

fn sin_pi_complex(z: Complex64) -> Complex64 {
    let (sh, ch) = ((PI * z.im).sinh(), (PI * z.im).cosh());
    Complex64::new(sin_pi(z.re) * ch, cos_pi(z.re) * sh)
}

/// True when z is a non-positive integer (a pole of Γ).
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    if z.im == 0.0 {
        // split power keeps the rounding error at a few ulps for large arguments
        let h = t.re.powf(0.5 * (z.re + 0.5));
        return Complex64::new((2.0 * PI).sqrt() * h * (-t.re).exp() * h * x.re, 0.0);
    }
    (2.0 * PI).sqrt() * (t.ln() * (z + 0.5) - t).exp() * x
}

/// Γ(z). Returns an infinite value at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.im == 0.0 && z.re == z.re.round() && z.re <= 171.0 {
        let mut acc = 1.0;
        for k in 2..(z.re as i64) {
            acc *= k as f64;
        }
        return Complex64::new(acc, 0.0);
    }
    if z.re < 0.5 {
        PI / (sin_pi_complex(z) * lanczos(1.0 - z))
    } else {
        lanczos(z)
    }
}

/// 1/Γ(z); exactly zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sin_pi_complex(z) * lanczos(1.0 - z) / PI
    } else {
        1.0 / gamma(z)
    }
}

/// Γ(x) for real x.
pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ln Γ from the Stirling series after shifting the argument past 20.
    fn stirling_ln_gamma(x: f64) -> f64 {
        let mut shift = 1.0;
        let mut y = x;
        while y < 20.0 {
            shift *= y;
            y += 1.0;
        }
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        let ln = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series;
        ln - shift.ln()
    }

    #[test]
    fn half_integer_values() {
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_real(1.5) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_real(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-14);
        assert_eq!(gamma_real(5.0), 24.0);
    }

    #[test]
    fn matches_stirling_on_positive_axis() {
        let mut x = 0.05;
        while x < 30.0 {
            let a = gamma_real(x);
            let b = stirling_ln_gamma(x);
            assert!((a.ln() - b).abs() < 3e-14 * b.abs().max(1.0), "x={x} {}", a.ln() - b);
            x += 0.173;
        }
    }

    #[test]
    fn matches_libm_on_negative_axis() {
        let mut x: f64 = -6.93;
        while x < 0.0 {
            if (x - x.round()).abs() > 1e-3 {
                let a = gamma_real(x);
                let b = libm::tgamma(x);
                assert!(((a - b) / b).abs() < 1e-13, "x={x} {a} {b}");
            }
            x += 0.0917;
        }
    }

    #[test]
    fn poles_and_reciprocal() {
        assert!(gamma_real(-2.0).is_infinite());
        assert_eq!(rgamma(Complex64::new(-3.0, 0.0)).norm(), 0.0);
        let z = Complex64::new(0.3, 0.7);
        assert!((gamma(z) * rgamma(z) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn complex_recurrence_and_reflection() {
        for &(re, im) in &[(0.3, 0.4), (-1.7, 0.2), (2.6, -1.1), (-0.4, 3.0)] {
            let z = Complex64::new(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-13 * lhs.norm(), "{z}");
            let refl = gamma(z) * gamma(1.0 - z) * sin_pi_complex(z);
            assert!((refl - PI).norm() < 1e-13 * PI, "{z}");
        }
    }
}
