//! Fully normalised associated Legendre functions.

/// P̃_l^m(x) for 0 ≤ m ≤ l ≤ lmax, normalised so ∫_{-1}^{1} P̃² dx = 1.
/// Returned as rows indexed by l, each of length l + 1 (entry m).
pub fn normalized_legendre(lmax: usize, x: f64) -> Vec<Vec<f64>> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut p: Vec<Vec<f64>> = (0..=lmax).map(|l| vec![0.0; l + 1]).collect();
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..=lmax {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        p[m][m] = pmm;
        if m + 1 <= lmax {
            p[m + 1][m] = ((2 * m + 3) as f64).sqrt() * x * pmm;
        }
        for l in m + 2..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lp = lf - 1.0;
            let ap = ((4.0 * lp * lp - 1.0) / (lp * lp - mf * mf)).sqrt();
            p[l][m] = a * (x * p[l - 1][m] - p[l - 2][m] / ap);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::{gauss_legendre, integrate_rule};

    #[test]
    fn low_degree_closed_forms() {
        let x: f64 = 0.3;
        let p = normalized_legendre(3, x);
        assert!((p[1][0] - (1.5f64).sqrt() * x).abs() < 1e-15);
        assert!((p[2][0] - (2.5f64).sqrt() * 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        let s = (1.0 - x * x).sqrt();
        assert!((p[1][1].abs() - (0.75f64).sqrt() * s).abs() < 1e-15);
    }

    #[test]
    fn orthonormal() {
        let rule = gauss_legendre(80);
        let rows: Vec<_> = rule.nodes.iter().map(|&x| normalized_legendre(30, x)).collect();
        for m in [0usize, 3, 17] {
            for l1 in m..=30 {
                for l2 in m..=30 {
                    let v: f64 = rows.iter().zip(&rule.weights).map(|(r, w)| w * r[l1][m] * r[l2][m]).sum();
                    let e = if l1 == l2 { 1.0 } else { 0.0 };
                    assert!((v - e).abs() < 1e-12, "m={m} l1={l1} l2={l2}: {v}");
                }
            }
        }
        let _ = integrate_rule(&rule, 0.0, 1.0, |x| x);
    }
}
