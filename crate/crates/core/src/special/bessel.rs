//! Bessel functions of integer order, spherical Bessel functions, their zeros,
//! Chebyshev tables for bulk evaluation and radial Taylor expansions.

use crate::error::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

use super::gamma::EULER_GAMMA;

const BIG: f64 = 1e150;

fn miller_start(nmax: usize, x: f64) -> usize {
    let base = nmax.max(x.ceil() as usize) + 30 + (12.0 * x.cbrt()).ceil() as usize;
    base + base % 2
}

/// J_0..=J_top(x) by Miller's backward recurrence, where top ≥ nmax.
fn miller_j(nmax: usize, x: f64) -> Vec<f64> {
    let top = miller_start(nmax, x);
    let mut out = vec![0.0; top + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let mut jp1 = 0.0;
    let mut j = 1.0;
    let mut sumsq = 0.0;
    let mut sign_sum = 0.0;
    for k in (1..=top).rev() {
        out[k] = j;
        sumsq += 2.0 * j * j;
        if k % 2 == 0 {
            sign_sum += 2.0 * j;
        }
        let jm1 = (2.0 * k as f64 / x) * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > BIG {
            j /= BIG;
            jp1 /= BIG;
            sumsq /= BIG * BIG;
            sign_sum /= BIG;
            for v in &mut out[k..] {
                *v /= BIG;
            }
        }
    }
    out[0] = j;
    sumsq += j * j;
    sign_sum += j;
    let norm = sumsq.sqrt().copysign(sign_sum);
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// J_0(x), …, J_nmax(x) for x ≥ 0.
pub fn bessel_j_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let mut v = miller_j(nmax, x.abs());
    v.truncate(nmax + 1);
    if x < 0.0 {
        for (n, val) in v.iter_mut().enumerate() {
            if n % 2 == 1 {
                *val = -*val;
            }
        }
    }
    v
}

/// J_n(x).
pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_sequence(n, x)[n]
}

/// J_0..=J_nmax and Y_0..=Y_nmax at x > 0.
pub fn bessel_jy_sequence(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(x > 0.0, "Y_n needs a positive argument");
    let j = miller_j(nmax.max(1), x);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = (2.0 / PI) * (lg * j[0] - 2.0 * s0);
    let y1 = (2.0 / PI) * (-j[0] / x + lg * j[1] + s1);
    let mut y = vec![0.0; nmax + 1];
    y[0] = y0;
    if nmax >= 1 {
        y[1] = y1;
    }
    for n in 1..nmax {
        y[n + 1] = (2.0 * n as f64 / x) * y[n] - y[n - 1];
    }
    let mut jv = j;
    jv.truncate(nmax + 1);
    (jv, y)
}

/// (J_n(x), Y_n(x)) for x > 0.
pub fn bessel_jy(n: usize, x: f64) -> (f64, f64) {
    let (j, y) = bessel_jy_sequence(n, x);
    (j[n], y[n])
}

/// Spherical j_0..=j_lmax at x ≥ 0.
pub fn spherical_j_sequence(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = miller_start(lmax.max(1), x);
    let mut rec = vec![0.0; top + 1];
    let mut jp1 = 0.0;
    let mut j = 1.0;
    for l in (1..=top).rev() {
        rec[l] = j;
        let jm1 = ((2 * l + 1) as f64 / x) * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > BIG {
            j /= BIG;
            jp1 /= BIG;
            for v in &mut rec[l..] {
                *v /= BIG;
            }
        }
    }
    rec[0] = j;
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = if x < 0.5 {
        // series: x/3 − x³/30 + x⁵/840 − …
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0 * (1.0 - x2 / 88.0))))
    } else {
        s / (x * x) - c / x
    };
    let scale = if j0.abs() >= j1.abs() { j0 / rec[0] } else { j1 / rec[1] };
    for (o, r) in out.iter_mut().zip(&rec) {
        *o = r * scale;
    }
    out
}

/// j_l(x).
pub fn spherical_j(l: usize, x: f64) -> f64 {
    spherical_j_sequence(l + 1, x)[l]
}

/// Which radial family a zero search runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cylindrical,
    Spherical,
}

impl Family {
    /// (f_n(x), f_n'(x), f_{n+1}(x)).
    fn eval(self, n: usize, x: f64) -> (f64, f64, f64) {
        match self {
            Family::Cylindrical => {
                let s = bessel_j_sequence(n + 1, x);
                let d = if n == 0 { -s[1] } else { s[n - 1] - n as f64 / x * s[n] };
                (s[n], d, s[n + 1])
            }
            Family::Spherical => {
                let s = spherical_j_sequence(n + 1, x);
                let d = if n == 0 { -s[1] } else { s[n - 1] - (n + 1) as f64 / x * s[n] };
                (s[n], d, s[n + 1])
            }
        }
    }

    fn nu(self, n: usize) -> f64 {
        match self {
            Family::Cylindrical => n as f64,
            Family::Spherical => n as f64 + 0.5,
        }
    }
}

/// McMahon's large-zero expansion for the k-th zero of J_ν.
pub fn mcmahon(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
}

/// A located zero together with the next-order value there (used for normalisation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub x: f64,
    pub next: f64,
}

/// Safeguarded Newton for the unique zero of f_n inside (a, b), with fa = f_n(a).
fn newton_bracket(family: Family, n: usize, mut a: f64, mut b: f64, fa: f64, guess: f64) -> Result<Zero> {
    let mut x = if guess > a && guess < b { guess } else { 0.5 * (a + b) };
    let sa = fa.signum();
    for _ in 0..200 {
        let (f, d, next) = family.eval(n, x);
        if f == 0.0 {
            return Ok(Zero { x, next });
        }
        if f.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        let mut xn = x - f / d;
        if !(xn > a && xn < b) || !xn.is_finite() {
            xn = 0.5 * (a + b);
        }
        if (xn - x).abs() <= 4.0 * f64::EPSILON * x || b - a <= 4.0 * f64::EPSILON * x {
            let (_, _, next) = family.eval(n, xn);
            return Ok(Zero { x: xn, next });
        }
        x = xn;
    }
    Err(Error::Numerical(format!("zero search for order {n} did not converge in ({a}, {b})")))
}

/// Next zero strictly after `from` (a zero or a point below the first zero).
/// Consecutive zeros are more than 3 apart, so each 3.0 step holds at most one.
fn next_zero_scan(family: Family, n: usize, from: f64, k_hint: usize) -> Result<Zero> {
    let mut a = from + 1e-9 * from.max(1.0);
    let mut fa = family.eval(n, a).0;
    for _ in 0..100_000 {
        let b = a + 3.0;
        let fb = family.eval(n, b).0;
        if fb == 0.0 {
            let (_, _, next) = family.eval(n, b);
            return Ok(Zero { x: b, next });
        }
        if fa.signum() != fb.signum() {
            return newton_bracket(family, n, a, b, fa, mcmahon(family.nu(n), k_hint));
        }
        a = b;
        fa = fb;
    }
    Err(Error::Numerical(format!("no sign change found for order {n} after {from}")))
}

/// k-th positive zero of J_n.
pub fn bessel_j_zero(n: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("zero index starts at 1".into()));
    }
    let mut x = n as f64;
    for i in 1..=k {
        x = next_zero_scan(Family::Cylindrical, n, x, i)?.x;
    }
    Ok(x)
}

/// All zeros of f_n below `xmax` for every order n that has one, plus the first zero above `xmax`.
/// Built order by order from interlacing: the k-th zero of order n+1 lies between the
/// k-th and (k+1)-th zeros of order n.
pub fn zero_table(family: Family, xmax: f64) -> Result<Vec<Vec<Zero>>> {
    let mut first: Vec<Zero> = Vec::new();
    match family {
        Family::Spherical => {
            let mut k = 1;
            loop {
                let x = k as f64 * PI;
                first.push(Zero { x, next: spherical_j(1, x) });
                if x > xmax {
                    break;
                }
                k += 1;
            }
        }
        Family::Cylindrical => {
            let mut z = next_zero_scan(family, 0, 0.0, 1)?;
            first.push(z);
            while z.x <= xmax {
                z = next_zero_scan(family, 0, z.x, first.len() + 1)?;
                first.push(z);
            }
        }
    }
    let mut table = vec![first];
    loop {
        let prev = table.last().expect("nonempty");
        let n = table.len();
        if prev.len() < 2 {
            break;
        }
        let mut zeros: Vec<Zero> = (0..prev.len() - 1)
            .into_par_iter()
            .map(|k| {
                let a = prev[k].x;
                let b = prev[k + 1].x;
                let fa = family.eval(n, a).0;
                newton_bracket(family, n, a, b, fa, mcmahon(family.nu(n), k + 1))
            })
            .collect::<Result<_>>()?;
        while zeros.last().map_or(true, |z| z.x <= xmax) {
            let from = zeros.last().map_or(n as f64, |z| z.x);
            let z = next_zero_scan(family, n, from, zeros.len() + 1)?;
            zeros.push(z);
        }
        let keep = zeros.iter().position(|z| z.x > xmax).expect("one zero above xmax") + 1;
        zeros.truncate(keep);
        if zeros[0].x > xmax {
            break;
        }
        table.push(zeros);
    }
    Ok(table)
}

const CHEB_N: usize = 25;
const PANEL: f64 = 2.0;

/// Chebyshev interpolants of a family of functions f_0..f_nmax on [0, xmax],
/// panels of width 2 and degree 24, built from one sequence evaluation per node.
#[derive(Debug, Clone)]
pub struct ChebTable {
    panels: usize,
    first: Vec<usize>,
    coeffs: Vec<Vec<f64>>,
}

impl ChebTable {
    pub fn new<F>(nmax: usize, xmax: f64, seq: F) -> Self
    where
        F: Fn(usize, f64) -> Vec<f64> + Sync,
    {
        let panels = (xmax / PANEL).floor() as usize + 1;
        let first: Vec<usize> = (0..=nmax)
            .map(|n| {
                let n = n as f64;
                let lo = (n - 12.0 * n.cbrt() - 10.0).max(0.0);
                ((lo / PANEL).floor() as usize).min(panels - 1)
            })
            .collect();
        let cosines: Vec<Vec<f64>> = (0..CHEB_N)
            .map(|k| {
                (0..CHEB_N)
                    .map(|j| (PI * k as f64 * (j as f64 + 0.5) / CHEB_N as f64).cos())
                    .collect()
            })
            .collect();
        // per panel: coefficients for every order, laid out [order][k]
        let per_panel: Vec<Vec<f64>> = (0..panels)
            .into_par_iter()
            .map(|p| {
                let mid = PANEL * p as f64 + 0.5 * PANEL;
                let vals: Vec<Vec<f64>> = (0..CHEB_N)
                    .map(|j| {
                        let t = (PI * (j as f64 + 0.5) / CHEB_N as f64).cos();
                        seq(nmax, mid + 0.5 * PANEL * t)
                    })
                    .collect();
                let mut out = vec![0.0; (nmax + 1) * CHEB_N];
                for n in 0..=nmax {
                    if p < first[n] {
                        continue;
                    }
                    for k in 0..CHEB_N {
                        let mut s = 0.0;
                        for j in 0..CHEB_N {
                            s += vals[j][n] * cosines[k][j];
                        }
                        let c = 2.0 * s / CHEB_N as f64;
                        out[n * CHEB_N + k] = if k == 0 { 0.5 * c } else { c };
                    }
                }
                out
            })
            .collect();
        let coeffs = (0..=nmax)
            .map(|n| {
                let mut v = Vec::with_capacity((panels - first[n]) * CHEB_N);
                for pp in &per_panel[first[n]..] {
                    v.extend_from_slice(&pp[n * CHEB_N..(n + 1) * CHEB_N]);
                }
                v
            })
            .collect();
        ChebTable { panels, first, coeffs }
    }

    /// Table of J_n.
    pub fn cylindrical(nmax: usize, xmax: f64) -> Self {
        Self::new(nmax, xmax, bessel_j_sequence)
    }

    /// Table of spherical j_l.
    pub fn spherical(lmax: usize, xmax: f64) -> Self {
        Self::new(lmax, xmax, spherical_j_sequence)
    }

    pub fn max_order(&self) -> usize {
        self.first.len() - 1
    }

    pub fn xmax(&self) -> f64 {
        PANEL * self.panels as f64
    }

    /// f_n(x); zero below the order's first tabulated panel.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        let p = ((x / PANEL).floor() as usize).min(self.panels - 1);
        if p < self.first[n] {
            return 0.0;
        }
        let c = &self.coeffs[n][(p - self.first[n]) * CHEB_N..(p - self.first[n] + 1) * CHEB_N];
        let t = (x - PANEL * p as f64) / PANEL * 2.0 - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    }
}

/// Taylor coefficients a_0.. of a radial solution u(r) = Z(s), s = z + σr, of
/// s²Z'' + p s Z' + (κ²s² − ν)Z = 0, starting from a_0 = 0 and a_1 = slope.
/// Terms are generated until they are negligible at r = r0.
pub fn radial_taylor(kappa: f64, z: f64, sigma: f64, p: f64, nu: f64, slope: f64, r0: f64) -> Vec<f64> {
    let k2 = kappa * kappa;
    let mut a = vec![0.0, slope];
    let mut peak = (slope * r0).abs();
    let mut small = 0;
    let mut k = 0usize;
    while a.len() < 600 {
        let kf = k as f64;
        let am1 = if k >= 1 { a[k - 1] } else { 0.0 };
        let am2 = if k >= 2 { a[k - 2] } else { 0.0 };
        let num = sigma * z * (kf + 1.0) * (2.0 * kf + p) * a[k + 1]
            + (kf * (kf - 1.0) + p * kf + k2 * z * z - nu) * a[k]
            + 2.0 * sigma * k2 * z * am1
            + k2 * am2;
        let next = -num / (z * z * (kf + 2.0) * (kf + 1.0));
        a.push(next);
        let term = (next * r0.powi(k as i32 + 2)).abs();
        peak = peak.max(term);
        if term < 1e-20 * peak {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        k += 1;
    }
    a
}

/// Taylor coefficients of sin(κr).
pub fn sine_taylor(kappa: f64, r0: f64) -> Vec<f64> {
    let mut a = vec![0.0; 2];
    a[1] = kappa;
    let mut k = 1;
    loop {
        let next = -a[k] * kappa * kappa / ((k + 1) as f64 * (k + 2) as f64);
        a.push(0.0);
        a.push(next);
        k += 2;
        if (next * r0.powi(k as i32)).abs() < 1e-22 * (kappa * r0).max(1e-300) || a.len() > 600 {
            break;
        }
    }
    a
}
