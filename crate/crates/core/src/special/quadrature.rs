//! Gauss–Legendre rules, adaptive Gauss–Kronrod integration and panel helpers.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

/// Values that can be integrated: reals and complex numbers.
pub trait Integrable: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Integrable for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrable for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// n-point Gauss–Legendre rule via Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            x = 0.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// Shared 16-point Gauss–Legendre rule.
pub fn gl16() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Apply a rule on [a, b].
pub fn integrate_rule<T: Integrable>(rule: &Rule, a: f64, b: f64, f: impl Fn(f64) -> T) -> T {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::default();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc + f(mid + half * x) * (w * half);
    }
    acc
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Integrable>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration on [a, b], split first at `breaks`.
pub fn adaptive<T: Integrable>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Quad<T> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    let mut heap = BinaryHeap::new();
    let mut total = T::default();
    let mut err = 0.0;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            total = total + v;
            err += e;
            heap.push(Segment { a: w[0], b: w[1], value: v, err: e });
        }
    }
    let mut iterations = 0;
    while err > abs_tol.max(rel_tol * total.magnitude()) && iterations < 4000 {
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&f, seg.a, m);
        let (v2, e2) = gk15(&f, m, seg.b);
        total = total - seg.value + v1 + v2;
        err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, err: e2 });
        iterations += 1;
    }
    // Re-sum to shed drift from the incremental updates.
    let mut segs: Vec<Segment<T>> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().fold(T::default(), |acc, s| acc + s.value);
    let error: f64 = segs.iter().map(|s| s.err).sum();
    Quad { value, error, converged: error <= abs_tol.max(rel_tol * value.magnitude()) }
}

/// n-point Gauss rule on [0, 1] for the weight x^β (β > −1), by Golub–Welsch.
pub fn gauss_jacobi_left(n: usize, beta: f64) -> Rule {
    assert!(n >= 1 && beta > -1.0);
    // Jacobi weight (1+x)^β on [-1, 1], mapped by u = (1+x)/2.
    let b = beta;
    let mut jm = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + b;
        jm[(k, k)] = if k == 0 { b / (b + 2.0) } else { b * b / (s * (s + 2.0)) };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + b;
            let beta_k = 4.0 * k1 * k1 * (k1 + b) * (k1 + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
            jm[(k, k + 1)] = beta_k.sqrt();
            jm[(k + 1, k)] = beta_k.sqrt();
        }
    }
    let eig = nalgebra::SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0 / (beta + 1.0))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Panels [b·q^{i+1}, b·q^i] for i < levels, ordered from the outside in.
pub fn geometric_panels(b: f64, ratio: f64, levels: usize) -> Vec<(f64, f64)> {
    (0..levels)
        .map(|i| (b * ratio.powi(i as i32 + 1), b * ratio.powi(i as i32)))
        .collect()
}

/// Split [a, b] into equal panels no wider than `width`.
pub fn uniform_panels(a: f64, b: f64, width: f64) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| (a + h * i as f64, if i + 1 == n { b } else { a + h * (i + 1) as f64 }))
        .collect()
}

/// Pairwise (tree) summation in the given order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(16);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        for p in 0..32 {
            let v = integrate_rule(&rule, 0.0, 1.0, |x| x.powi(p));
            assert!((v - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
        }
        let one = gauss_legendre(1);
        assert_eq!(one.nodes, vec![0.0]);
        assert!((one.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = adaptive(|x: f64| x.powf(-0.5), 0.0, 1.0, &[], 1e-13, 1e-13);
        assert!((q.value - 2.0).abs() < 1e-10, "{}", q.value);
        let q = adaptive(|x: f64| (10.0 * x).sin(), 0.0, 3.0, &[1.0], 1e-14, 1e-14);
        assert!((q.value - (1.0 - 30f64.cos()) / 10.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_complex() {
        let q = adaptive(|x: f64| Complex64::new(0.0, x).exp(), 0.0, 2.0, &[], 1e-14, 1e-14);
        let exact = (Complex64::new(0.0, 2.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((q.value - exact).norm() < 1e-13);
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }

    #[test]
    fn gauss_jacobi_moments() {
        for &beta in &[-0.7, 0.0, 0.25, 1.3, 2.9, 4.7] {
            let rule = gauss_jacobi_left(20, beta);
            for k in 0..40 {
                let v: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(k)).sum();
                let exact = 1.0 / (beta + k as f64 + 1.0);
                assert!((v - exact).abs() < 1e-13 * exact.max(1e-3), "beta {beta} k {k}: {v} vs {exact}");
            }
            assert!(rule.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
        }
    }
}
