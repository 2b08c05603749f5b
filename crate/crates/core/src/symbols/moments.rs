//! Gaussian ω-moments against e^{−g̃^{ab}ω_aω_b}, where g̃ is the tangential metric.

use nalgebra::DMatrix;
use std::f64::consts::PI;

fn base(g: &DMatrix<f64>) -> f64 {
    assert!(g.is_square(), "metric must be square");
    PI.powf(0.5 * g.nrows() as f64) * g.determinant().sqrt()
}

/// ∫ e^{−g̃^{ab}ω_aω_b} dω = π^{d/2}√det g̃.
pub fn moment0(g: &DMatrix<f64>) -> f64 {
    base(g)
}

/// ∫ ω_aω_b e^{−g̃^{cd}ω_cω_d} dω = ½π^{d/2}√det g̃ · g̃_ab.
pub fn moment2(g: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    0.5 * base(g) * g[(a, b)]
}

/// ∫ ω_aω_bω_cω_d e^{…} dω = ¼π^{d/2}√det g̃ (g̃_ab g̃_cd + g̃_ac g̃_bd + g̃_ad g̃_bc).
pub fn moment4(g: &DMatrix<f64>, a: usize, b: usize, c: usize, d: usize) -> f64 {
    0.25 * base(g) * (g[(a, b)] * g[(c, d)] + g[(a, c)] * g[(b, d)] + g[(a, d)] * g[(b, c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::gauss_legendre;

    /// Tensor-product Gauss–Legendre over a box wide enough for the Gaussian.
    fn brute(g: &DMatrix<f64>, idx: &[usize]) -> f64 {
        let d = g.nrows();
        let ginv = g.clone().try_inverse().unwrap();
        let half: Vec<f64> = (0..d).map(|i| 7.0 * g[(i, i)].sqrt()).collect();
        let rule = gauss_legendre(64);
        let n = rule.nodes.len();
        let mut total = 0.0;
        let mut counter = vec![0usize; d];
        loop {
            let w: Vec<f64> = counter.iter().zip(&half).map(|(&i, h)| h * rule.nodes[i]).collect();
            let mut q = 0.0;
            for i in 0..d {
                for j in 0..d {
                    q += ginv[(i, j)] * w[i] * w[j];
                }
            }
            let weight: f64 = counter.iter().zip(&half).map(|(&i, h)| h * rule.weights[i]).product();
            total += weight * (-q).exp() * idx.iter().map(|&i| w[i]).product::<f64>();
            let mut pos = 0;
            loop {
                if pos == d {
                    return total;
                }
                counter[pos] += 1;
                if counter[pos] < n {
                    break;
                }
                counter[pos] = 0;
                pos += 1;
            }
        }
    }

    fn metrics() -> Vec<DMatrix<f64>> {
        vec![
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.7, 1.9])),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.3, 0.45, 2.2])),
            DMatrix::from_row_slice(2, 2, &[1.2, 0.35, 0.35, 0.8]),
        ]
    }

    #[test]
    fn second_and_zeroth_moments_match_quadrature() {
        for g in metrics() {
            let d = g.nrows();
            let b0 = brute(&g, &[]);
            assert!((b0 - moment0(&g)).abs() < 1e-9 * moment0(&g), "{b0} vs {}", moment0(&g));
            for a in 0..d {
                for b in 0..d {
                    let exact = moment2(&g, a, b);
                    assert!((brute(&g, &[a, b]) - exact).abs() < 1e-9, "{a}{b}");
                }
            }
        }
    }

    #[test]
    fn fourth_moments_match_quadrature() {
        for g in metrics() {
            let d = g.nrows();
            for (a, b, c, e) in [(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (1, 1, 1, 1), (0, 1, 1, 1), (0, 0, d - 1, d - 1)] {
                let exact = moment4(&g, a, b, c, e);
                let num = brute(&g, &[a, b, c, e]);
                assert!((num - exact).abs() < 1e-9, "{a}{b}{c}{e}: {num} vs {exact}");
            }
        }
    }
}
