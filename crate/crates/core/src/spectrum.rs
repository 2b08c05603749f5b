//! Exact Dirichlet spectra of the model geometries, weighted heat traces and
//! diagonal heat kernels.

use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundaryComponent, Kind, ModelGeometry};
use crate::special::bessel::{
    bessel_j_sequence, bessel_j_zero, bessel_jy_sequence, spherical_j_sequence, zero_table, ChebTable, Family,
};
use crate::special::gamma::gamma_real;
use crate::special::legendre::normalized_legendre;
use crate::special::quadrature::{gauss_jacobi_left, gl16, pairwise_sum, uniform_panels};
use crate::weight::WeightProfile;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Smallest truncation eigenvalue used by the trace and kernel sums.
pub const LAMBDA_FLOOR: f64 = 1e4;
/// Truncation policy: λ_max = max(TRUNCATION_DEPTH / t_min, LAMBDA_FLOOR).
pub const TRUNCATION_DEPTH: f64 = 40.0;

/// Normalised eigenfunctions of one eigenvalue, as a function of collar distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    /// √(2/L) sin(κr).
    Sine { kappa: f64, length: f64 },
    /// e^{±inθ}/√(2πρ) times an interval mode.
    Cylinder { kappa: f64, length: f64, rho: f64, n: usize },
    /// J_n(κ(R−r)) normalised by next = J_{n+1}(κR).
    Disk { n: usize, kappa: f64, radius: f64, next: f64 },
    /// j_l(κ(R−r)) normalised by next = j_{l+1}(κR).
    Ball { l: usize, kappa: f64, radius: f64, next: f64 },
    /// J_n(κs)y_a − Y_n(κs)j_a with j_a, y_a ∝ J_n, Y_n at κ·inner; norm = ∫Z²s ds.
    Annulus { n: usize, kappa: f64, inner: f64, outer: f64, ja: f64, ya: f64, norm: f64 },
    /// Spherical harmonics of degree l odd under the equatorial reflection.
    Hemisphere { l: usize, radius: f64 },
}

impl Profile {
    /// Σ|φ|² over the eigenspace, at collar distance r from boundary component `component`.
    pub fn density(&self, component: usize, r: f64) -> f64 {
        match *self {
            Profile::Sine { kappa, length } => 2.0 / length * (kappa * r).sin().powi(2),
            Profile::Cylinder { kappa, length, rho, n } => {
                let mult = if n == 0 { 1.0 } else { 2.0 };
                mult / (2.0 * PI * rho) * 2.0 / length * (kappa * r).sin().powi(2)
            }
            Profile::Disk { n, kappa, radius, next } => {
                let v = bessel_j_sequence(n, kappa * (radius - r))[n] / next;
                disk_prefactor(n, radius) * v * v
            }
            Profile::Ball { l, kappa, radius, next } => {
                let v = spherical_j_sequence(l, kappa * (radius - r))[l] / next;
                ball_prefactor(l, radius) * v * v
            }
            Profile::Annulus { n, kappa, inner, outer, ja, ya, norm } => {
                let s = if component == 0 { outer - r } else { inner + r };
                let (j, y) = bessel_jy_sequence(n, kappa * s);
                let z = j[n] * ya - y[n] * ja;
                let mult = if n == 0 { 1.0 } else { 2.0 };
                mult * z * z / (2.0 * PI * norm)
            }
            Profile::Hemisphere { l, radius } => {
                let p = normalized_legendre(l, (r / radius).sin());
                hemisphere_sum(&p[l], l) / (PI * radius * radius)
            }
        }
    }
}

fn disk_prefactor(n: usize, radius: f64) -> f64 {
    (if n == 0 { 1.0 } else { 2.0 }) / (PI * radius * radius)
}

fn ball_prefactor(l: usize, radius: f64) -> f64 {
    (2 * l + 1) as f64 / (2.0 * PI * radius.powi(3))
}

/// Σ_{m ≥ 0, l+m odd} (2 − δ_{m0}) P̃_l^m².
fn hemisphere_sum(row: &[f64], l: usize) -> f64 {
    let mut s = 0.0;
    let mut m = (l + 1) % 2;
    while m <= l {
        s += if m == 0 { 1.0 } else { 2.0 } * row[m] * row[m];
        m += 2;
    }
    s
}

/// One Dirichlet eigenvalue with its multiplicity and eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralLine {
    pub lambda: f64,
    pub multiplicity: u32,
    pub radial_profile: Profile,
}

/// Sampled weighted heat trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSamples {
    /// (t, Tr(F e^{−tΔ})).
    pub samples: Vec<(f64, f64)>,
    /// Estimated truncation tail at each t.
    pub truncation_bound: Vec<f64>,
}

/// k-th positive zero of J_n.
pub fn bessel_zero(n: usize, k: usize) -> Result<f64> {
    bessel_j_zero(n, k)
}

/// Worker cap from HEATTRACE_THREADS, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var("HEATTRACE_THREADS").ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Runs `f` on a pool capped by HEATTRACE_THREADS (the global pool otherwise).
pub fn with_thread_limit<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match thread_limit().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// All Dirichlet eigenvalues ≤ lambda_max, sorted, with multiplicities.
pub fn eigenvalues(geom: &ModelGeometry, lambda_max: f64) -> Result<Vec<SpectralLine>> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return invalid(format!("lambda_max must be positive and finite, got {lambda_max}"));
    }
    let kmax = lambda_max.sqrt();
    let mut lines = Vec::new();
    match geom.kind {
        Kind::Interval { length } => {
            let mut k = 1;
            while (k as f64 * PI / length).powi(2) <= lambda_max {
                let kappa = k as f64 * PI / length;
                lines.push(SpectralLine {
                    lambda: kappa * kappa,
                    multiplicity: 1,
                    radial_profile: Profile::Sine { kappa, length },
                });
                k += 1;
            }
        }
        Kind::Cylinder { rho, length } => {
            let mut k = 1;
            while (k as f64 * PI / length).powi(2) <= lambda_max {
                let kappa = k as f64 * PI / length;
                let mut n = 0;
                while (n as f64 / rho).powi(2) + kappa * kappa <= lambda_max {
                    lines.push(SpectralLine {
                        lambda: (n as f64 / rho).powi(2) + kappa * kappa,
                        multiplicity: if n == 0 { 1 } else { 2 },
                        radial_profile: Profile::Cylinder { kappa, length, rho, n },
                    });
                    n += 1;
                }
                k += 1;
            }
        }
        Kind::Disk { radius } => {
            let table = zero_table(Family::Cylindrical, radius * kmax)?;
            for (n, row) in table.iter().enumerate() {
                for z in row.iter().filter(|z| z.x <= radius * kmax) {
                    let kappa = z.x / radius;
                    lines.push(SpectralLine {
                        lambda: kappa * kappa,
                        multiplicity: if n == 0 { 1 } else { 2 },
                        radial_profile: Profile::Disk { n, kappa, radius, next: z.next },
                    });
                }
            }
        }
        Kind::Ball3 { radius } => {
            let table = zero_table(Family::Spherical, radius * kmax)?;
            for (l, row) in table.iter().enumerate() {
                for z in row.iter().filter(|z| z.x <= radius * kmax) {
                    let kappa = z.x / radius;
                    lines.push(SpectralLine {
                        lambda: kappa * kappa,
                        multiplicity: 2 * l as u32 + 1,
                        radial_profile: Profile::Ball { l, kappa, radius, next: z.next },
                    });
                }
            }
        }
        Kind::Annulus { inner, outer } => lines = annulus_lines(inner, outer, kmax)?,
        Kind::Hemisphere { radius } => {
            let mut l = 1;
            while (l * (l + 1)) as f64 / (radius * radius) <= lambda_max {
                lines.push(SpectralLine {
                    lambda: (l * (l + 1)) as f64 / (radius * radius),
                    multiplicity: l as u32,
                    radial_profile: Profile::Hemisphere { l, radius },
                });
                l += 1;
            }
        }
    }
    lines.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(lines)
}

/// Cross product J_n(κb)Y_n(κa) − Y_n(κb)J_n(κa), scaled by a positive factor.
fn annulus_cross(n: usize, kappa: f64, a: f64, b: f64) -> f64 {
    let (ja, ya) = bessel_jy_sequence(n, kappa * a);
    let (jb, yb) = bessel_jy_sequence(n, kappa * b);
    let m = ja[n].hypot(ya[n]);
    (jb[n] * ya[n] - yb[n] * ja[n]) / m
}

/// Illinois regula falsi on a bracketing interval.
fn bracketed_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs() {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(0.5 * (a + b));
        }
    }
    Err(Error::Numerical(format!("root refinement did not converge in [{a}, {b}]")))
}

fn annulus_lines(a: f64, b: f64, kmax: f64) -> Result<Vec<SpectralLine>> {
    let gap = PI / (b - a);
    let step = gap / 8.0;
    let rows: Vec<Vec<SpectralLine>> = (0..)
        .map(|n: usize| {
            let s = if n == 0 { a } else { b };
            let lo2 = gap * gap + ((n * n) as f64 - 0.25) / (s * s);
            (n, lo2.max(1e-6 * gap * gap).sqrt())
        })
        .take_while(|&(_, lo)| lo <= kmax)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, lo)| {
            let f = |k: f64| annulus_cross(n, k, a, b);
            let mut out = Vec::new();
            let mut x0 = lo;
            let mut f0 = f(x0);
            while x0 <= kmax {
                let x1 = x0 + step;
                let f1 = f(x1);
                if f0 == 0.0 || f0.signum() != f1.signum() {
                    let kappa = if f0 == 0.0 { x0 } else { bracketed_root(f, x0, x1, f0, f1)? };
                    if kappa <= kmax {
                        out.push(annulus_line(n, kappa, a, b));
                    }
                }
                x0 = x1;
                f0 = f1;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn annulus_line(n: usize, kappa: f64, a: f64, b: f64) -> SpectralLine {
    let (ja, ya) = bessel_jy_sequence(n, kappa * a);
    let (jb, yb) = bessel_jy_sequence(n, kappa * b);
    let m = ja[n].hypot(ya[n]);
    let (ja, ya) = (ja[n] / m, ya[n] / m);
    // Z'(κa) from the Wronskian; Z'(κb) from whichever of J_n, Y_n is larger there.
    let za = -2.0 / (PI * kappa * a * m);
    let zb = if jb[n].abs() >= yb[n].abs() {
        -2.0 * ja / (PI * kappa * b * jb[n])
    } else {
        -2.0 * ya / (PI * kappa * b * yb[n])
    };
    let norm = 0.5 * (b * b * zb * zb - a * a * za * za);
    SpectralLine {
        lambda: kappa * kappa,
        multiplicity: if n == 0 { 1 } else { 2 },
        radial_profile: Profile::Annulus { n, kappa, inner: a, outer: b, ja, ya, norm },
    }
}

/// Quadrature nodes r_q and weights W_q on one collar such that
/// ∫ F·ρ·dvol ≈ Σ W_q ρ(r_q) for any density ρ vanishing like r² at the boundary.
#[derive(Debug, Clone)]
struct CollarNodes {
    r: Vec<f64>,
    w: Vec<f64>,
}

const JACOBI_NODES: usize = 20;

fn collar_nodes(comp: &BoundaryComponent, weight: &WeightProfile, alpha: f64, kmax: f64) -> CollarNodes {
    let s = weight.support(comp.collar_width);
    let mut r0 = (1.0 / kmax).min(0.25 * s);
    if let Some(c) = weight.cutoff {
        r0 = r0.min(0.5 * c.eps0);
    }
    let poly = |r: f64| weight.f_coeffs.iter().rev().fold(0.0, |acc, f| acc * r + f) * weight.chi(r);
    let mut out = CollarNodes { r: Vec::new(), w: Vec::new() };
    // [0, r0]: Gauss–Jacobi for the weight r^{2−α}; the density carries the r².
    let beta = 2.0 - alpha;
    let gj = gauss_jacobi_left(JACOBI_NODES, beta);
    let scale = r0.powf(beta + 1.0);
    for (u, wu) in gj.nodes.iter().zip(&gj.weights) {
        let r = r0 * u;
        out.r.push(r);
        out.w.push(wu * scale * comp.area * comp.jacobian.eval(r) * poly(r) / (r * r));
    }
    // [r0, s]: doubling panels, then uniform panels with breaks at the cutoff plateau.
    let hu = (PI / kmax).min(s / 8.0);
    let mut panels = Vec::new();
    let mut a = r0;
    while a < s && a < hu {
        let b = (2.0 * a).min(s);
        panels.push((a, b));
        a = b;
    }
    let mut breaks = vec![a];
    if let Some(c) = weight.cutoff {
        if c.eps0 > a && c.eps0 < s {
            breaks.push(c.eps0);
        }
    }
    breaks.push(s);
    for win in breaks.windows(2) {
        let width = match weight.cutoff {
            Some(c) if win[0] >= c.eps0 => hu.min((c.eps - c.eps0) / 32.0),
            _ => hu,
        };
        panels.extend(uniform_panels(win[0], win[1], width));
    }
    let rule = gl16();
    for (pa, pb) in panels {
        let half = 0.5 * (pb - pa);
        let mid = 0.5 * (pa + pb);
        for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
            let r = mid + half * x;
            out.r.push(r);
            out.w.push(wx * half * comp.area * comp.jacobian.eval(r) * poly(r) * r.powf(-alpha));
        }
    }
    out
}

/// ∫ F·Σ|φ|² over each eigenspace, in the order of `lines`.
pub fn line_weights(geom: &ModelGeometry, weight: &WeightProfile, lines: &[SpectralLine]) -> Result<Vec<f64>> {
    let alpha = weight.real_alpha()?;
    weight.check_geometry(geom)?;
    let lmax = lines.iter().map(|l| l.lambda).fold(0.0, f64::max);
    let kmax = lmax.max(1.0).sqrt();
    let nodes: Vec<CollarNodes> = geom.components.iter().map(|c| collar_nodes(c, weight, alpha, kmax)).collect();
    let generic = |line: &SpectralLine| -> f64 {
        let mut acc = 0.0;
        for (ci, cn) in nodes.iter().enumerate() {
            for (r, w) in cn.r.iter().zip(&cn.w) {
                acc += w * line.radial_profile.density(ci, *r);
            }
        }
        acc
    };
    let out = match geom.kind {
        Kind::Disk { radius } | Kind::Ball3 { radius } => {
            let spherical = matches!(geom.kind, Kind::Ball3 { .. });
            let nmax = lines
                .iter()
                .map(|l| match l.radial_profile {
                    Profile::Disk { n, .. } => n,
                    Profile::Ball { l, .. } => l,
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            let xmax = radius * kmax + 1.0;
            let table = if spherical { ChebTable::spherical(nmax, xmax) } else { ChebTable::cylindrical(nmax, xmax) };
            let cn = &nodes[0];
            lines
                .par_iter()
                .map(|line| match line.radial_profile {
                    Profile::Disk { n, kappa, radius, next } | Profile::Ball { l: n, kappa, radius, next } => {
                        let pref = if spherical { ball_prefactor(n, radius) } else { disk_prefactor(n, radius) };
                        let mut acc = 0.0;
                        for (r, w) in cn.r.iter().zip(&cn.w) {
                            let v = table.eval(n, kappa * (radius - r));
                            acc += w * v * v;
                        }
                        acc * pref / (next * next)
                    }
                    _ => generic(line),
                })
                .collect()
        }
        Kind::Hemisphere { radius } => {
            // node-major: one Legendre table per node serves every degree
            let lmax_deg = lines
                .iter()
                .map(|l| match l.radial_profile {
                    Profile::Hemisphere { l, .. } => l,
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            let cn = &nodes[0];
            let per_node: Vec<Vec<f64>> = cn
                .r
                .par_iter()
                .zip(cn.w.par_iter())
                .map(|(r, w)| {
                    let p = normalized_legendre(lmax_deg, (r / radius).sin());
                    (0..=lmax_deg).map(|l| w * hemisphere_sum(&p[l], l) / (PI * radius * radius)).collect()
                })
                .collect();
            lines
                .iter()
                .map(|line| match line.radial_profile {
                    Profile::Hemisphere { l, .. } => per_node.iter().map(|v| v[l]).sum(),
                    _ => generic(line),
                })
                .collect()
        }
        _ => lines.par_iter().map(generic).collect(),
    };
    Ok(out)
}

/// Weyl constant: N(λ) ~ weyl_constant·λ^{m/2}.
pub fn weyl_constant(geom: &ModelGeometry) -> f64 {
    let m = geom.m as f64;
    geom.volume() / ((4.0 * PI).powf(0.5 * m) * gamma_real(0.5 * m + 1.0))
}

/// Tail estimate Σ_{λ > Λ} e^{−tλ}·per_mode using twice the Weyl count.
fn tail_bound(geom: &ModelGeometry, lambda_max: f64, t: f64, per_mode: f64) -> f64 {
    let m = geom.m as f64;
    2.0 * weyl_constant(geom)
        * (-t * lambda_max).exp()
        * lambda_max.powf(0.5 * m)
        * (1.0 + 0.5 * m / (t * lambda_max))
        * per_mode
}

fn truncation(t_min: f64) -> f64 {
    (TRUNCATION_DEPTH / t_min).max(LAMBDA_FLOOR)
}

fn check_times(ts: &[f64]) -> Result<f64> {
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return invalid("times must be a nonempty list of positive numbers");
    }
    Ok(ts.iter().copied().fold(f64::INFINITY, f64::min))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// Tr(F e^{−tΔ}) = Σ e^{−tλ_i}∫F|φ_i|² at each t.
pub fn weighted_trace(geom: &ModelGeometry, weight: &WeightProfile, t_grid: &[f64], tol: f64) -> Result<TraceSamples> {
    let t_min = check_times(t_grid)?;
    check_tol(tol)?;
    weight.real_alpha()?;
    weight.check_geometry(geom)?;
    let lambda_max = truncation(t_min);
    with_thread_limit(|| {
        let lines = eigenvalues(geom, lambda_max)?;
        let w = line_weights(geom, weight, &lines)?;
        let per_mode = lines
            .iter()
            .zip(&w)
            .map(|(l, w)| w.abs() / l.multiplicity as f64)
            .fold(0.0, f64::max);
        let mut samples = Vec::with_capacity(t_grid.len());
        let mut bounds = Vec::with_capacity(t_grid.len());
        let mut worst: f64 = 0.0;
        for &t in t_grid {
            let terms: Vec<f64> = lines.iter().zip(&w).map(|(l, w)| (-t * l.lambda).exp() * w).collect();
            let tail = tail_bound(geom, lambda_max, t, per_mode);
            worst = worst.max(tail);
            samples.push((t, pairwise_sum(&terms)));
            bounds.push(tail);
        }
        if worst > tol {
            return Err(Error::Tolerance { requested: tol, achieved: worst });
        }
        Ok(TraceSamples { samples, truncation_bound: bounds })
    })
}

/// Diagonal heat kernel p(x, x; t) at collar distance r from the first boundary component.
pub fn diagonal_kernel(geom: &ModelGeometry, r: f64, t: f64, tol: f64) -> Result<f64> {
    Ok(diagonal_kernel_many(geom, &[r], &[t], tol)?[0][0])
}

/// Diagonal heat kernel on a grid: result[i][j] at rs[i], ts[j].
pub fn diagonal_kernel_many(geom: &ModelGeometry, rs: &[f64], ts: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    let t_min = check_times(ts)?;
    check_tol(tol)?;
    let width = geom.components[0].collar_width;
    if rs.iter().any(|r| !(*r > 0.0 && *r <= width)) {
        return invalid(format!("collar distances must lie in (0, {width}]"));
    }
    let lambda_max = truncation(t_min);
    with_thread_limit(|| {
        let lines = eigenvalues(geom, lambda_max)?;
        let dens: Vec<Vec<f64>> =
            rs.iter().map(|&r| lines.par_iter().map(|l| l.radial_profile.density(0, r)).collect()).collect();
        let per_mode = dens
            .iter()
            .flat_map(|d| d.iter().zip(&lines).map(|(v, l)| v / l.multiplicity as f64))
            .fold(0.0, f64::max);
        let mut out = Vec::with_capacity(rs.len());
        for d in &dens {
            let mut row = Vec::with_capacity(ts.len());
            for &t in ts {
                let tail = tail_bound(geom, lambda_max, t, per_mode) / geom.volume();
                if tail > tol {
                    return Err(Error::Tolerance { requested: tol, achieved: tail });
                }
                let terms: Vec<f64> = lines.iter().zip(d).map(|(l, v)| (-t * l.lambda).exp() * v).collect();
                row.push(pairwise_sum(&terms));
            }
            out.push(row);
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::adaptive;
    use crate::weight::CutoffSpec;
    use proptest::prelude::*;

    fn count(lines: &[SpectralLine]) -> u32 {
        lines.iter().map(|l| l.multiplicity).sum()
    }

    #[test]
    fn interval_spectrum() {
        let lines = eigenvalues(&ModelGeometry::interval(PI).unwrap(), 10.0).unwrap();
        let ls: Vec<f64> = lines.iter().map(|l| l.lambda).collect();
        assert_eq!(ls.len(), 3);
        for (a, b) in ls.iter().zip([1.0, 4.0, 9.0]) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(lines.iter().all(|l| l.multiplicity == 1));
        assert!(eigenvalues(&ModelGeometry::interval(PI).unwrap(), 0.0).is_err());
    }

    #[test]
    fn disk_ground_state_and_zeros() {
        let lines = eigenvalues(&ModelGeometry::disk(1.0).unwrap(), 50.0).unwrap();
        assert!((lines[0].lambda - 2.404_825_557_695_773f64.powi(2)).abs() < 1e-11);
        assert_eq!(lines[1].multiplicity, 2);
        assert!((bessel_zero(1, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-13);
        let j = bessel_zero(200, 3).unwrap();
        assert!(bessel_j_sequence(200, j)[200].abs() < 1e-14);
    }

    /// Integrates s u'' + u' + κ² s u = 0 from u(a) = 0, u'(a) = 1 with RK4 and returns u(b).
    fn shoot(kappa: f64, a: f64, b: f64) -> f64 {
        let steps = 4000;
        let h = (b - a) / steps as f64;
        let rhs = |s: f64, u: f64, v: f64| (v, -v / s - kappa * kappa * u);
        let (mut s, mut u, mut v) = (a, 0.0, 1.0);
        for _ in 0..steps {
            let k1 = rhs(s, u, v);
            let k2 = rhs(s + 0.5 * h, u + 0.5 * h * k1.0, v + 0.5 * h * k1.1);
            let k3 = rhs(s + 0.5 * h, u + 0.5 * h * k2.0, v + 0.5 * h * k2.1);
            let k4 = rhs(s + h, u + h * k3.0, v + h * k3.1);
            u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            s += h;
        }
        u
    }

    #[test]
    fn annulus_ground_state_against_shooting() {
        let (mut lo, mut hi) = (2.5, 3.5);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if shoot(lo, 1.0, 2.0).signum() == shoot(mid, 1.0, 2.0).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lines = eigenvalues(&ModelGeometry::annulus(1.0, 2.0).unwrap(), 20.0).unwrap();
        assert!((lines[0].lambda.sqrt() - 0.5 * (lo + hi)).abs() < 1e-9);
        assert!((lines[0].lambda.sqrt() - 3.12303).abs() < 1e-5);
        // the normalisation makes the profile integrate to one over the annulus
        let ground = lines[0].radial_profile;
        let q = adaptive(|s| ground.density(0, 2.0 - s) * 2.0 * PI * s, 1.0, 2.0, &[], 1e-14, 1e-13);
        assert!((q.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn hemisphere_multiplicity_by_parity() {
        let lines = eigenvalues(&ModelGeometry::hemisphere(1.0).unwrap(), 420.0).unwrap();
        assert_eq!(lines.len(), 20);
        for (i, line) in lines.iter().enumerate() {
            let l = i as i64 + 1;
            assert_eq!(line.lambda, (l * (l + 1)) as f64);
            let odd = (-l..=l).filter(|m| (l + m).rem_euclid(2) == 1).count();
            assert_eq!(line.multiplicity as usize, odd);
        }
    }

    #[test]
    fn weyl_counts() {
        let lam = 4e3;
        for geom in ModelGeometry::catalogue() {
            let lines = eigenvalues(&geom, lam).unwrap();
            assert!(lines.windows(2).all(|w| w[0].lambda <= w[1].lambda));
            let m = geom.m as f64;
            let weyl = weyl_constant(&geom) * lam.powf(0.5 * m);
            let bd = geom.boundary_measure() * lam.powf(0.5 * (m - 1.0))
                / (4.0 * (4.0 * PI).powf(0.5 * (m - 1.0)) * gamma_real(0.5 * (m + 1.0)));
            let n = count(&lines) as f64;
            assert!((n / (weyl - bd) - 1.0).abs() < 0.2, "{}: {n} vs {}", geom.name(), weyl - bd);
        }
    }

    #[test]
    fn unit_weight_is_the_plain_trace() {
        let g = ModelGeometry::interval(PI).unwrap();
        let s = weighted_trace(&g, &WeightProfile::unit(), &[0.1], 1e-10).unwrap();
        assert!((s.samples[0].1 - 2.302_497).abs() < 2e-6);
        let direct: f64 = (1..100).map(|k| (-0.1 * (k * k) as f64).exp()).sum();
        assert!((s.samples[0].1 - direct).abs() < 1e-13);
        for geom in ModelGeometry::catalogue() {
            let lines = eigenvalues(&geom, 2e3).unwrap();
            let w = line_weights(&geom, &WeightProfile::unit(), &lines).unwrap();
            for (l, w) in lines.iter().zip(&w) {
                assert!((w / l.multiplicity as f64 - 1.0).abs() < 1e-10, "{}: {l:?} {w}", geom.name());
            }
        }
    }

    #[test]
    fn zero_weight_gives_zero() {
        let w = WeightProfile::real(0.5, vec![0.0], Some(CutoffSpec::new(0.2, 0.4).unwrap())).unwrap();
        let s = weighted_trace(&ModelGeometry::disk(1.0).unwrap(), &w, &[0.01, 0.1], 1e-8).unwrap();
        assert!(s.samples.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn disk_weyl_two_terms() {
        let t = 0.01;
        let s = weighted_trace(&ModelGeometry::disk(1.0).unwrap(), &WeightProfile::unit(), &[t], 1e-8).unwrap();
        let weyl = PI / (4.0 * PI * t) - 2.0 * PI / (8.0 * (PI * t).sqrt());
        assert!((s.samples[0].1 / weyl - 1.0).abs() < 0.01);
    }

    #[test]
    fn singular_line_weight_against_adaptive() {
        let disk = ModelGeometry::disk(1.0).unwrap();
        let cut = Some(CutoffSpec::new(0.2, 0.4).unwrap());
        let lines = eigenvalues(&disk, 400.0).unwrap();
        for alpha in [-0.5, 0.5, 1.0, 1.5, 2.0, 2.7] {
            let w = WeightProfile::real(alpha, vec![1.0, 0.3], cut).unwrap();
            let fast = line_weights(&disk, &w, &lines).unwrap();
            for idx in [0, 3, lines.len() - 1] {
                let p = lines[idx].radial_profile;
                let f = |r: f64| w.evaluate(r).unwrap() * p.density(0, r) * 2.0 * PI * (1.0 - r);
                // r = u⁴ tames the r^{2−α} endpoint; below r = 1e−8 the density is κ²r²·prefactor
                let g = |u: f64| f(u.powi(4)) * 4.0 * u.powi(3);
                let lo = 1e-8f64;
                let q = adaptive(g, lo.powf(0.25), 0.4f64.powf(0.25), &[0.2f64.powf(0.25)], 1e-15, 1e-13);
                let (n, kappa) = match p {
                    Profile::Disk { n, kappa, .. } => (n, kappa),
                    _ => unreachable!(),
                };
                let head = 2.0 * PI * disk_prefactor(n, 1.0) * kappa * kappa * lo.powf(3.0 - alpha) / (3.0 - alpha);
                let q = crate::special::quadrature::Quad { value: q.value + head, ..q };
                assert!((fast[idx] - q.value).abs() < 1e-9 * q.value.abs().max(1e-3), "alpha {alpha} line {idx}: {} vs {}", fast[idx], q.value);
            }
        }
    }

    #[test]
    fn cylinder_trace_factorises() {
        let cut = Some(CutoffSpec::new(0.5, 1.0).unwrap());
        let w = WeightProfile::real(0.5, vec![1.0, -0.2], cut).unwrap();
        let ts = [0.01, 0.05];
        let cyl = weighted_trace(&ModelGeometry::cylinder(0.8, 3.0).unwrap(), &w, &ts, 1e-10).unwrap();
        let iv = weighted_trace(&ModelGeometry::interval(3.0).unwrap(), &w, &ts, 1e-10).unwrap();
        for (i, &t) in ts.iter().enumerate() {
            let theta: f64 = (-200i64..=200).map(|n| (-t * (n * n) as f64 / 0.64).exp()).sum();
            let expect = theta * iv.samples[i].1;
            assert!((cyl.samples[i].1 - expect).abs() < 1e-8 * expect.abs());
        }
    }

    #[test]
    fn trace_scaling() {
        let cut = Some(CutoffSpec::new(0.2, 0.4).unwrap());
        let w = WeightProfile::real(0.7, vec![1.0, 0.5], cut).unwrap();
        let g = ModelGeometry::disk(1.0).unwrap();
        let c = 1.5;
        let ts = [0.01, 0.03];
        let base = weighted_trace(&g, &w, &ts, 1e-9).unwrap();
        let cts: Vec<f64> = ts.iter().map(|t| t * c * c).collect();
        let scaled = weighted_trace(&g.scale(c).unwrap(), &w.scaled(c).unwrap(), &cts, 1e-9).unwrap();
        for (a, b) in base.samples.iter().zip(&scaled.samples) {
            assert!((a.1 - b.1).abs() < 1e-9 * a.1.abs());
        }
    }

    #[test]
    fn tolerance_failure_is_reported() {
        let w = WeightProfile::unit();
        let r = weighted_trace(&ModelGeometry::disk(1.0).unwrap(), &w, &[0.001], 1e-300);
        assert!(matches!(r, Err(Error::Tolerance { .. })));
    }

    #[test]
    fn diagonal_kernel_properties() {
        let iv = ModelGeometry::interval(PI).unwrap();
        let t = 5.0;
        let p = diagonal_kernel(&iv, PI / 2.0, t, 1e-12).unwrap();
        assert!((p - (-t).exp() * 2.0 / PI).abs() < 1e-3 * p);
        let disk = ModelGeometry::disk(1.0).unwrap();
        let rs = [1e-3, 3e-3, 1e-2, 0.1, 0.5];
        let ts = [0.01, 0.05];
        let k = diagonal_kernel_many(&disk, &rs, &ts, 1e-8).unwrap();
        for (i, r) in rs.iter().enumerate() {
            for (j, t) in ts.iter().enumerate() {
                assert!(k[i][j] > 0.0 && k[i][j] <= 1.0 / (4.0 * PI * t) * (1.0 + 1e-9));
                if *r <= 1e-2 {
                    assert!(k[i][j] / (r * r) < 1.0 / (t * t));
                }
            }
        }
    }

    #[test]
    fn weighted_trace_decreases_in_t() {
        let w = WeightProfile::real(1.5, vec![1.0], Some(CutoffSpec::new(0.2, 0.4).unwrap())).unwrap();
        let ts = [0.002, 0.005, 0.01, 0.02, 0.05];
        let s = weighted_trace(&ModelGeometry::disk(1.0).unwrap(), &w, &ts, 1e-8).unwrap();
        assert!(s.samples.windows(2).all(|p| p[0].1 > p[1].1 && p[1].1 > 0.0));
        let bound = 1.0 / (4.0 * PI * 0.05);
        let total = adaptive(|r| w.evaluate(r).unwrap() * 2.0 * PI * (1.0 - r), 0.0, 0.4, &[0.2], 1e-12, 1e-10);
        assert!(s.samples[4].1 <= bound * total.value);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn interval_trace_is_exact(alpha in -1.0f64..2.9, f1 in -1.0f64..1.0, t in 0.02f64..0.5) {
            let g = ModelGeometry::interval(PI).unwrap();
            let w = WeightProfile::real(alpha, vec![1.0, f1], Some(CutoffSpec::new(0.5, 1.0).unwrap())).unwrap();
            let s = weighted_trace(&g, &w, &[t], 1e-10).unwrap();
            let mut direct = 0.0;
            for k in 1..=80 {
                let kf = k as f64;
                let f = |r: f64| w.evaluate(r).unwrap() * 2.0 / PI * (kf * r).sin().powi(2) * 2.0;
                let g = |u: f64| f(u.powi(4)) * 4.0 * u.powi(3);
                let lo = 1e-8f64;
                let head = 4.0 / PI * kf * kf * lo.powf(3.0 - alpha) / (3.0 - alpha);
                let q = adaptive(g, lo.powf(0.25), 1.0, &[0.5f64.powf(0.25)], 1e-15, 1e-13).value;
                direct += (-t * kf * kf).exp() * (q + head);
            }
            prop_assert!((s.samples[0].1 - direct).abs() < 1e-9 * direct.abs());
        }
    }
}
