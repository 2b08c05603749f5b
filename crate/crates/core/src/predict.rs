//! Closed-form heat-trace coefficients: smooth, singular and exceptional boundary
//! invariants, regularized interior terms, logarithmic terms and full expansions.

use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundaryComponent, ModelGeometry};
use crate::regularize::{exceptional_order, i_reg_weight, RegularizedValue};
use crate::special::gamma::{gamma, is_gamma_pole, EULER_GAMMA};
use crate::weight::WeightProfile;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Euler's constant.
pub const EULER_C: f64 = EULER_GAMMA;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn gamma_checked(z: Complex64, what: &'static str, alpha: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::Pole { what, alpha: alpha.to_string() });
    }
    Ok(gamma(z))
}

/// κ_α = ½Γ((1−α)/2).
pub fn kappa(alpha: Complex64) -> Result<Complex64> {
    Ok(gamma_checked((c(1.0) - alpha) * 0.5, "kappa", alpha)? * 0.5)
}

/// The universal constants at one value of α. At α = 1, 2 every entry is the
/// constant term of its Laurent expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalConstants {
    pub alpha: Complex64,
    pub kappa: Complex64,
    pub kappa_bar: Complex64,
    pub kappa1: Complex64,
    pub kappa3: Complex64,
    pub kappa4: Complex64,
    pub kappa5: Complex64,
    pub euler_c: f64,
}

/// κ¹_α = ½Γ((2−α)/2)(α−4)/(2(α−3)).
pub fn kappa1(alpha: Complex64) -> Result<Complex64> {
    let g = gamma_checked((c(2.0) - alpha) * 0.5, "kappa1", alpha)?;
    Ok(g * 0.5 * (alpha - 4.0) / ((alpha - 3.0) * 2.0))
}

/// κ³_α = −(α−1)/24·Γ((1−α)/2), written as Γ((3−α)/2)/12.
pub fn kappa3(alpha: Complex64) -> Result<Complex64> {
    Ok(gamma_checked((c(3.0) - alpha) * 0.5, "kappa3", alpha)? / 12.0)
}

/// κ⁴_α = (7−8α+α²)/(32(α−6))·Γ((1−α)/2).
pub fn kappa4(alpha: Complex64) -> Result<Complex64> {
    let g = gamma_checked((c(3.0) - alpha) * 0.5, "kappa4", alpha)?;
    Ok(-(alpha - 7.0) * g / ((alpha - 6.0) * 16.0))
}

/// κ⁵_α = (6α−5−α²)/(16(α−6))·Γ((1−α)/2).
pub fn kappa5(alpha: Complex64) -> Result<Complex64> {
    let g = gamma_checked((c(3.0) - alpha) * 0.5, "kappa5", alpha)?;
    Ok((alpha - 5.0) * g / ((alpha - 6.0) * 8.0))
}

pub fn universal_constants(alpha: Complex64) -> Result<UniversalConstants> {
    let (kap, k1) = match exceptional_order(alpha) {
        Some(1) => (c(-0.5 * EULER_C), kappa1(alpha)?),
        // κ¹ has a pole at α = 2; its constant term follows from κ_{α−1}'s expansion.
        Some(2) => (kappa(alpha)?, c(-0.5 * EULER_C - 0.5)),
        _ => (kappa(alpha)?, kappa1(alpha)?),
    };
    Ok(UniversalConstants {
        alpha,
        kappa: kap,
        kappa_bar: kap,
        kappa1: k1,
        kappa3: kappa3(alpha)?,
        kappa4: kappa4(alpha)?,
        kappa5: kappa5(alpha)?,
        euler_c: EULER_C,
    })
}

/// (4π)^{−p}.
fn four_pi_pow(p: f64) -> f64 {
    (4.0 * PI).powf(-p)
}

fn fi(f: &[f64], i: usize) -> f64 {
    f.get(i).copied().unwrap_or(0.0)
}

fn check_l(l: usize) -> Result<()> {
    if l > 2 {
        return invalid(format!("boundary coefficients are implemented for l <= 2, got {l}"));
    }
    Ok(())
}

/// a^{bd}_ℓ for a smooth weight on one boundary component.
pub fn boundary_coefficient_smooth(l: usize, m: usize, comp: &BoundaryComponent, e: f64, f: &[f64]) -> Result<f64> {
    check_l(l)?;
    let mf = m as f64;
    let (f0, f1, f2) = (fi(f, 0), fi(f, 1), fi(f, 2));
    let la = comp.l_aa;
    let v = match l {
        0 => -0.25 * four_pi_pow(0.5 * (mf - 1.0)) * f0,
        1 => four_pi_pow(0.5 * mf) / 6.0 * (2.0 * f0 * la - 3.0 * f1),
        _ => {
            let curv = 96.0 * e + 16.0 * comp.r_ijji - 8.0 * comp.r_amma + 7.0 * la * la - 10.0 * comp.l_ab_sq();
            -four_pi_pow(0.5 * (mf - 1.0)) / 384.0 * (f0 * curv - 30.0 * f1 * la + 48.0 * f2)
        }
    };
    Ok(v * comp.area)
}

/// a^{bd}_{ℓ,α} on one boundary component for α ≠ 1, 2.
pub fn boundary_coefficient_singular(
    l: usize,
    alpha: Complex64,
    m: usize,
    comp: &BoundaryComponent,
    e: f64,
    f: &[f64],
) -> Result<Complex64> {
    check_l(l)?;
    if let Some(k) = exceptional_order(alpha) {
        return Err(Error::Exceptional(k as f64));
    }
    if !(alpha.re < 3.0) {
        return invalid(format!("boundary coefficients need Re(alpha) < 3, got {alpha}"));
    }
    let (f0, f1, f2) = (fi(f, 0), fi(f, 1), fi(f, 2));
    let la = comp.l_aa;
    let a = alpha;
    let bracket = match l {
        0 => kappa(a)? * (-f0),
        1 => kappa(a - 1.0)? * (c(-f1) + (a - 4.0) / ((a - 3.0) * 2.0) * (f0 * la)),
        _ => {
            let one_minus = c(1.0) - a;
            let inner = c(-f2) + (a - 5.0) / ((a - 4.0) * 2.0) * (f1 * la) + f0 * comp.r_amma / 6.0
                - (a - 7.0) / ((a - 6.0) * 8.0) * (f0 * la * la)
                + (a - 5.0) / ((a - 6.0) * 4.0) * (f0 * comp.l_ab_sq())
                - f0 * comp.r_ijji / (one_minus * 3.0)
                - f0 * e * 2.0 / one_minus;
            kappa(a - 2.0)? * inner
        }
    };
    Ok(bracket * four_pi_pow(0.5 * m as f64) * comp.area)
}

/// a^{bd}_{ℓ,α} on one boundary component at α ∈ {1, 2}.
pub fn boundary_coefficient_exceptional(
    l: usize,
    alpha: u8,
    m: usize,
    comp: &BoundaryComponent,
    e: f64,
    f: &[f64],
) -> Result<f64> {
    check_l(l)?;
    let (f0, f1, f2) = (fi(f, 0), fi(f, 1), fi(f, 2));
    let la = comp.l_aa;
    let lab = comp.l_ab_sq();
    let (ra, tau) = (comp.r_amma, comp.r_ijji);
    let sp = PI.sqrt();
    let cc = EULER_C;
    let v = match (alpha, l) {
        (1, 0) => 0.5 * cc * f0,
        (1, 1) => 0.5 * sp * (-f1 + 0.75 * f0 * la),
        (1, _) => {
            -0.5 * f2
                + f1 * la / 3.0
                + f0 * (ra / 12.0 - 3.0 / 40.0 * la * la + 0.1 * lab + cc / 12.0 * tau + 0.5 * cc * e)
        }
        (2, 0) => sp * f0,
        (2, 1) => 0.5 * cc * f1 - (0.5 * cc + 0.5) * f0 * la,
        (2, _) => {
            sp * (-0.5 * f2
                + 0.375 * f1 * la
                + f0 * (ra / 12.0 - 5.0 / 64.0 * la * la + 3.0 / 32.0 * lab + tau / 6.0)
                + f0 * e)
        }
        _ => return invalid(format!("exceptional coefficients exist only at alpha = 1, 2; got {alpha}")),
    };
    Ok(v * four_pi_pow(0.5 * m as f64) * comp.area)
}

/// a^{bd}_{ℓ,α} summed over all boundary components, dispatching on α.
pub fn boundary_total(l: usize, geom: &ModelGeometry, e: f64, weight: &WeightProfile) -> Result<Complex64> {
    let mut acc = c(0.0);
    for comp in &geom.components {
        acc += match exceptional_order(weight.alpha) {
            Some(k) => c(boundary_coefficient_exceptional(l, k, geom.m, comp, e, &weight.f_coeffs)?),
            None => boundary_coefficient_singular(l, weight.alpha, geom.m, comp, e, &weight.f_coeffs)?,
        };
    }
    Ok(acc)
}

/// The local interior invariant a_n (constant on every model), n ∈ {0, 1}.
pub fn interior_density(n: usize, geom: &ModelGeometry, e: f64) -> Result<f64> {
    let base = four_pi_pow(0.5 * geom.m as f64);
    match n {
        0 => Ok(base),
        1 => Ok(base * (e + geom.scalar_curvature() / 6.0)),
        _ => invalid(format!("interior coefficients are implemented for n <= 1, got {n}")),
    }
}

/// I_Reg{F a_n}.
pub fn interior_coefficient(n: usize, geom: &ModelGeometry, e: f64, weight: &WeightProfile) -> Result<RegularizedValue> {
    let an = interior_density(n, geom, e)?;
    Ok(i_reg_weight(geom, weight, None)?.scale(an))
}

/// Coefficient of t^{−m/2+k/2} ln t at α ∈ {1, 2}.
pub fn log_coefficient(k: usize, alpha: u8, geom: &ModelGeometry, weight: &WeightProfile, e: f64) -> Result<f64> {
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let an = interior_density(k / 2, geom, e)?;
    let (f0, f1) = (weight.modified_taylor(0), weight.modified_taylor(1));
    let s: f64 = match alpha {
        1 => geom.components.iter().map(|cp| cp.area * f0).sum(),
        2 => geom.components.iter().map(|cp| cp.area * (f1 - f0 * cp.l_aa)).sum(),
        _ => return invalid(format!("log terms exist only at alpha = 1, 2; got {alpha}")),
    };
    Ok(-0.5 * an * s)
}

/// One term c·t^p (ln t)^{δ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub power: Complex64,
    pub has_log: bool,
    pub coefficient: Complex64,
}

impl Term {
    pub fn eval(&self, t: f64) -> Complex64 {
        let v = self.coefficient * c(t).powc(self.power);
        if self.has_log {
            v * t.ln()
        } else {
            v
        }
    }
}

/// A finite small-t expansion sorted by power.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AsymptoticExpansion {
    pub terms: Vec<Term>,
}

const SAME_POWER: f64 = 1e-12;

impl AsymptoticExpansion {
    /// Adds a term, merging with an existing one of the same power and log flag.
    pub fn push(&mut self, term: Term) {
        if let Some(t) = self
            .terms
            .iter_mut()
            .find(|t| t.has_log == term.has_log && (t.power - term.power).norm() < SAME_POWER)
        {
            t.coefficient += term.coefficient;
        } else {
            self.terms.push(term);
        }
        self.terms.sort_by(|a, b| {
            a.power
                .re
                .total_cmp(&b.power.re)
                .then(a.power.im.total_cmp(&b.power.im))
                .then(a.has_log.cmp(&b.has_log))
        });
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// The expansion of t ↦ self(t/c²).
    pub fn time_rescaled(&self, c: f64) -> Self {
        let mut out = AsymptoticExpansion::default();
        for term in &self.terms {
            let k = Complex64::new(c, 0.0).powc(term.power * -2.0);
            out.push(Term { coefficient: term.coefficient * k, ..*term });
            if term.has_log {
                out.push(Term { power: term.power, has_log: false, coefficient: term.coefficient * k * (-2.0 * c.ln()) });
            }
        }
        out
    }

    /// Cauchy product of two expansions.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut out = AsymptoticExpansion::default();
        for a in &self.terms {
            for b in &other.terms {
                if a.has_log && b.has_log {
                    return invalid("product of two logarithmic terms is not representable");
                }
                out.push(Term {
                    power: a.power + b.power,
                    has_log: a.has_log || b.has_log,
                    coefficient: a.coefficient * b.coefficient,
                });
            }
        }
        Ok(out)
    }

    /// Coefficient at a given power and log flag (zero when absent).
    pub fn coefficient(&self, power: Complex64, has_log: bool) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.has_log == has_log && (t.power - power).norm() < SAME_POWER)
            .map_or(c(0.0), |t| t.coefficient)
    }
}

/// Highest interior and boundary orders included in an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Orders {
    pub interior: usize,
    pub boundary: usize,
}

impl Default for Orders {
    fn default() -> Self {
        Orders { interior: 1, boundary: 2 }
    }
}

/// Predicted expansion of Tr(F e^{−tΔ}) with potential term E.
pub fn full_expansion(geom: &ModelGeometry, weight: &WeightProfile, e: f64, orders: Orders) -> Result<AsymptoticExpansion> {
    if orders.interior > 1 || orders.boundary > 2 {
        return invalid("expansions are implemented for interior order <= 1 and boundary order <= 2");
    }
    let m = geom.m as f64;
    let mut out = AsymptoticExpansion::default();
    let ireg = i_reg_weight(geom, weight, None)?;
    for n in 0..=orders.interior {
        let an = interior_density(n, geom, e)?;
        out.push(Term { power: c(-0.5 * m + n as f64), has_log: false, coefficient: ireg.value * an });
    }
    for l in 0..=orders.boundary {
        out.push(Term {
            power: c(-0.5 * (m - 1.0)) + (c(l as f64) - weight.alpha) * 0.5,
            has_log: false,
            coefficient: boundary_total(l, geom, e, weight)?,
        });
    }
    if let Some(k) = exceptional_order(weight.alpha) {
        for n in 0..=orders.interior {
            out.push(Term {
                power: c(-0.5 * m + n as f64),
                has_log: true,
                coefficient: c(log_coefficient(2 * n, k, geom, weight, e)?),
            });
        }
    }
    Ok(out)
}

/// Expansion of the closed circle of radius ρ with unit weight: one term.
pub fn circle_expansion(rho: f64) -> AsymptoticExpansion {
    AsymptoticExpansion {
        terms: vec![Term { power: c(-0.5), has_log: false, coefficient: c(2.0 * PI * rho * four_pi_pow(0.5)) }],
    }
}

/// Connection one-form and endomorphism of a Laplace-type operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerData {
    pub omega: Vec<f64>,
    pub e: f64,
}

/// Christoffel symbols Γ_{σεμ} (last index lowered) of a diagonal metric by central differences.
fn christoffel_lowered(g: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let m = x.len();
    // dg[k][i] = ∂_k g_ii
    let dg: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let (gp, gm) = (g(&xp), g(&xm));
            (0..m).map(|i| (gp[i] - gm[i]) / (2.0 * h)).collect()
        })
        .collect();
    let metric = |a: usize, b: usize, k: usize| if a == b { dg[k][a] } else { 0.0 };
    let mut out = vec![vec![vec![0.0; m]; m]; m];
    for s in 0..m {
        for e in 0..m {
            for mu in 0..m {
                out[s][e][mu] = 0.5 * (metric(e, mu, s) + metric(s, mu, e) - metric(s, e, mu));
            }
        }
    }
    out
}

fn omega_at(g: &dyn Fn(&[f64]) -> Vec<f64>, a1: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<f64> {
    let m = x.len();
    let gd = g(x);
    let gam = christoffel_lowered(g, x, h);
    let a = a1(x);
    (0..m)
        .map(|mu| {
            let trace: f64 = (0..m).map(|s| gam[s][s][mu] / gd[s]).sum();
            0.5 * (gd[mu] * a[mu] + trace)
        })
        .collect()
}

/// ω and E for D = −(g^{μν}∂_μ∂_ν + A₁^ν∂_ν + A₀) with a diagonal metric, at `x`.
pub fn bochner_data(
    g: &dyn Fn(&[f64]) -> Vec<f64>,
    a1: &dyn Fn(&[f64]) -> Vec<f64>,
    a0: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
) -> Result<BochnerData> {
    let m = x.len();
    let gd = g(x);
    if gd.len() != m || gd.iter().any(|v| !(*v > 0.0)) {
        return invalid("metric must be diagonal, positive and match the point's dimension");
    }
    let h_in = 1e-5;
    let h_out = 1e-4;
    let omega = omega_at(g, a1, x, h_in);
    let gam = christoffel_lowered(g, x, h_in);
    let mut e = a0(x);
    for mu in 0..m {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[mu] += h_out;
        xm[mu] -= h_out;
        let d = (omega_at(g, a1, &xp, h_in)[mu] - omega_at(g, a1, &xm, h_in)[mu]) / (2.0 * h_out);
        // Γ_{μμ}^σ = Γ_{μμσ}/g_σσ
        let corr: f64 = (0..m).map(|s| omega[s] * gam[mu][mu][s] / gd[s]).sum();
        e -= (d + omega[mu] * omega[mu] - corr) / gd[mu];
    }
    Ok(BochnerData { omega, e })
}

/// Diagonal half-plane kernel and its boundary-curvature correction in two dimensions.
pub fn reference_kernels(r: f64, t: f64, l_aa: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !(r >= 0.0) {
        return invalid(format!("reference kernels need t > 0 and r >= 0, got r = {r}, t = {t}"));
    }
    let free = 1.0 / (4.0 * PI * t);
    let half = free * (1.0 - (-r * r / t).exp());
    let tail = 0.5 * PI.sqrt() * libm::erfc(r / t.sqrt());
    let lang = half - free * l_aa * r * r / t.sqrt() * tail;
    Ok((half, lang))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularize::laurent_constant;
    use crate::special::gamma::gamma_real;
    use crate::weight::CutoffSpec;
    use proptest::prelude::*;

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn kappa_values() {
        assert!(close(kappa(c(0.0)).unwrap(), PI.sqrt() / 2.0, 1e-15));
        assert!(close(kappa(c(-1.0)).unwrap(), 0.5, 1e-15));
        assert!(close(kappa(c(0.5)).unwrap(), 1.812_804_954_110_954, 1e-13));
        assert!(matches!(kappa(c(1.0)), Err(Error::Pole { .. })));
        assert!(matches!(kappa(c(3.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn rewritten_constants_match_printed_forms() {
        for &a in &[-1.7, -0.3, 0.3, 0.7, 1.4, 2.6] {
            let g = gamma_real((1.0 - a) / 2.0);
            assert!(close(kappa3(c(a)).unwrap(), -(a - 1.0) / 24.0 * g, 1e-13));
            assert!(close(kappa4(c(a)).unwrap(), (7.0 - 8.0 * a + a * a) / (32.0 * (a - 6.0)) * g, 1e-13));
            assert!(close(kappa5(c(a)).unwrap(), (6.0 * a - 5.0 - a * a) / (16.0 * (a - 6.0)) * g, 1e-13));
        }
    }

    #[test]
    fn smooth_examples() {
        let disk = ModelGeometry::disk(1.0).unwrap();
        let v = boundary_coefficient_smooth(0, 2, &disk.components[0], 0.0, &[1.0]).unwrap();
        assert!((v + PI.sqrt() / 4.0).abs() < 1e-14, "{v}");
        let iv = ModelGeometry::interval(PI).unwrap();
        let v = boundary_coefficient_smooth(1, 1, &iv.components[0], 0.0, &[0.7, 1.3]).unwrap();
        assert!((v - (4.0 * PI).powf(-0.5) / 6.0 * (-3.0 * 1.3)).abs() < 1e-15);
        let ball = ModelGeometry::ball3(1.0).unwrap();
        let v = boundary_coefficient_smooth(2, 3, &ball.components[0], 0.0, &[1.0]).unwrap();
        let expect = -1.0 / 384.0 / (4.0 * PI) * (7.0 * 4.0 - 10.0 * 2.0) * 4.0 * PI;
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn singular_and_exceptional_examples() {
        let disk = ModelGeometry::disk(1.0).unwrap();
        let comp = &disk.components[0];
        let v = boundary_coefficient_singular(0, c(0.5), 2, comp, 0.0, &[1.0]).unwrap();
        assert!(close(v, -gamma_real(0.25) / 4.0, 1e-14));
        let v = boundary_coefficient_exceptional(0, 1, 2, comp, 0.0, &[1.0]).unwrap();
        assert!((v - EULER_C / 4.0).abs() < 1e-15);
        let v = boundary_coefficient_exceptional(1, 2, 2, comp, 0.0, &[1.0]).unwrap();
        assert!((v - (-(EULER_C / 2.0 + 0.5)) / (4.0 * PI) * 2.0 * PI).abs() < 1e-15);
        assert!(matches!(
            boundary_coefficient_singular(0, c(1.0), 2, comp, 0.0, &[1.0]),
            Err(Error::Exceptional(_))
        ));
        // coefficient of F0·L_aa at l = 1, α = 1/2
        let unit = BoundaryComponent { area: 1.0, ..comp.clone() };
        let v = boundary_coefficient_singular(1, c(0.5), 2, &unit, 0.0, &[1.0]).unwrap() * (4.0 * PI);
        assert!(close(v, 0.5 * gamma_real(0.75) * 0.7, 1e-14));
    }

    #[test]
    fn interior_examples() {
        let disk = ModelGeometry::disk(1.0).unwrap();
        let a0 = interior_coefficient(0, &disk, 0.0, &WeightProfile::unit()).unwrap();
        assert!(close(a0.value, 0.25, 1e-13));
        let a1 = interior_coefficient(1, &disk, 0.0, &WeightProfile::unit()).unwrap();
        assert!(a1.value.norm() == 0.0);
        let h = ModelGeometry::hemisphere(1.0).unwrap();
        let a1 = interior_coefficient(1, &h, 0.0, &WeightProfile::unit()).unwrap();
        assert!(close(a1.value, 1.0 / 6.0, 1e-13));
    }

    #[test]
    fn log_examples() {
        let disk = ModelGeometry::disk(1.0).unwrap();
        let w = WeightProfile::real(1.0, vec![1.0], Some(CutoffSpec::new(0.5, 0.9).unwrap())).unwrap();
        assert_eq!(log_coefficient(1, 1, &disk, &w, 0.0).unwrap(), 0.0);
        assert!((log_coefficient(0, 1, &disk, &w, 0.0).unwrap() + 0.25).abs() < 1e-15);
        assert!((log_coefficient(0, 2, &disk, &w, 0.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn weyl_expansion_of_interval() {
        let g = ModelGeometry::interval(PI).unwrap();
        let e = full_expansion(&g, &WeightProfile::unit(), 0.0, Orders::default()).unwrap();
        assert!(close(e.coefficient(c(-0.5), false), PI / (4.0 * PI).sqrt(), 1e-13));
        assert!(close(e.coefficient(c(0.0), false), -0.5, 1e-13));
        let t = 0.01;
        let theta: f64 = (1..200).map(|k| (-t * (k * k) as f64).exp()).sum();
        assert!((e.eval(t).re - theta).abs() < 1e-12);
    }

    #[test]
    fn disk_powers_and_logs() {
        let disk = ModelGeometry::disk(1.0).unwrap();
        let cut = Some(CutoffSpec::new(0.5, 0.9).unwrap());
        let e = full_expansion(&disk, &WeightProfile::real(0.5, vec![1.0], cut).unwrap(), 0.0, Orders::default()).unwrap();
        let powers: Vec<f64> = e.terms.iter().map(|t| t.power.re).collect();
        assert_eq!(powers, vec![-1.0, -0.75, -0.25, 0.0, 0.25]);
        let e = full_expansion(&disk, &WeightProfile::real(1.0, vec![1.0], cut).unwrap(), 0.0, Orders::default()).unwrap();
        assert!(e.terms.iter().any(|t| t.has_log && t.power.re == -1.0));
        assert!(e.terms.iter().all(|t| !t.has_log || t.power.re <= 0.0));
    }

    #[test]
    fn kappa_laurent_constants() {
        let l = laurent_constant(|a| kappa(a).unwrap(), 1.0).unwrap();
        assert!((l.constant.re + EULER_C / 2.0).abs() < 1e-8);
        assert!((l.residue.re + 1.0).abs() < 1e-8);
        let l = laurent_constant(|a| kappa(a).unwrap(), 2.0).unwrap();
        assert!((l.constant.re + PI.sqrt()).abs() < 1e-8);
        let u = universal_constants(c(1.0)).unwrap();
        assert!((u.kappa_bar.re + EULER_C / 2.0).abs() < 1e-15);
        assert!((u.kappa3.re - 1.0 / 12.0).abs() < 1e-15);
        let u2 = universal_constants(c(2.0)).unwrap();
        let l = laurent_constant(|a| kappa1(a).unwrap(), 2.0).unwrap();
        assert!((u2.kappa1 - l.constant).norm() < 1e-7, "{} {}", u2.kappa1, l.constant);
    }

    #[test]
    fn bochner_examples() {
        let flat = |_: &[f64]| vec![1.0, 1.0];
        let zero = |_: &[f64]| vec![0.0, 0.0];
        let b = bochner_data(&flat, &zero, &|_| 0.0, &[0.3, 0.4]).unwrap();
        assert!(b.e.abs() < 1e-12 && b.omega.iter().all(|w| w.abs() < 1e-12));
        let b = bochner_data(&flat, &zero, &|_| 2.5, &[0.3, 0.4]).unwrap();
        assert!((b.e - 2.5).abs() < 1e-12);
        let b = bochner_data(&|_| vec![1.0], &|x| vec![2.0 * x[0]], &|_| 5.0, &[0.5]).unwrap();
        assert!((b.omega[0] - 0.5).abs() < 1e-8);
        assert!((b.e - 3.75).abs() < 1e-6);
        // polar coordinates (ζ, θ): g = diag(1, ζ²), Laplacian has A1 = (1/ζ, 0)
        let polar = |x: &[f64]| vec![1.0, x[0] * x[0]];
        let a1 = |x: &[f64]| vec![1.0 / x[0], 0.0];
        let b = bochner_data(&polar, &a1, &|_| 0.0, &[0.5, 1.0]).unwrap();
        assert!(b.e.abs() < 1e-6, "{}", b.e);
        assert!(b.omega.iter().all(|w| w.abs() < 1e-8));
    }

    #[test]
    fn reference_kernel_limits() {
        assert_eq!(reference_kernels(0.0, 0.01, 1.0).unwrap(), (0.0, 0.0));
        let (h, l) = reference_kernels(5.0, 0.01, 1.0).unwrap();
        let free = 1.0 / (4.0 * PI * 0.01);
        assert!((h - free).abs() < 1e-12 && (l - free).abs() < 1e-12);
        assert!(reference_kernels(0.1, 0.0, 1.0).is_err());
    }

    fn pair_check(geom: &ModelGeometry, k: u8, n: usize, l: usize) {
        let e = 0.3;
        let f = vec![1.0, 0.4, -0.3];
        let cut = Some(CutoffSpec::new(0.5, 0.9).unwrap());
        let w = |a: Complex64| WeightProfile::new(a, f.clone(), cut).unwrap();
        let interior = laurent_constant(|a| interior_coefficient(n, geom, e, &w(a)).unwrap().value, k as f64).unwrap();
        let boundary = laurent_constant(|a| boundary_total(l, geom, e, &w(a)).unwrap(), k as f64).unwrap();
        let scale = boundary.residue.norm().max(1e-3);
        assert!((interior.residue + boundary.residue).norm() < 1e-6 * scale, "{} {}", interior.residue, boundary.residue);
        let wk = w(c(k as f64));
        let dropped = interior_coefficient(n, geom, e, &wk).unwrap().value + boundary_total(l, geom, e, &wk).unwrap();
        let limit = interior.constant + boundary.constant;
        assert!((dropped - limit).norm() < 1e-6 * limit.norm().max(1.0), "{dropped} {limit}");
        let log = log_coefficient(2 * n, k, geom, &wk, e).unwrap();
        assert!((boundary.residue * -0.5 - log).norm() < 1e-6 * log.abs().max(1e-3));
    }

    #[test]
    fn poles_cancel_at_exceptional_alpha() {
        for geom in [ModelGeometry::disk(1.0).unwrap(), ModelGeometry::hemisphere(1.0).unwrap(), ModelGeometry::annulus(1.0, 3.0).unwrap()] {
            pair_check(&geom, 1, 0, 0);
            pair_check(&geom, 1, 1, 2);
            pair_check(&geom, 2, 0, 1);
        }
    }

    #[test]
    fn unpaired_terms_are_regular() {
        let geom = ModelGeometry::hemisphere(1.0).unwrap();
        let f = vec![1.0, 0.4, -0.3];
        let w = |a: Complex64| WeightProfile::new(a, f.clone(), None).unwrap();
        let b = laurent_constant(|a| boundary_total(2, &geom, 0.3, &w(a)).unwrap(), 2.0).unwrap();
        assert!(b.residue.norm() < 1e-8);
        assert!((b.constant - boundary_total(2, &geom, 0.3, &w(c(2.0))).unwrap()).norm() < 1e-7);
        let b = laurent_constant(|a| boundary_total(1, &geom, 0.3, &w(a)).unwrap(), 1.0).unwrap();
        assert!((b.constant - boundary_total(1, &geom, 0.3, &w(c(1.0))).unwrap()).norm() < 1e-7);
    }

    fn same_expansion(a: &AsymptoticExpansion, b: &AsymptoticExpansion, tol: f64) {
        assert_eq!(a.terms.len(), b.terms.len(), "{a:?} {b:?}");
        for (x, y) in a.terms.iter().zip(&b.terms) {
            assert!((x.power - y.power).norm() < 1e-12 && x.has_log == y.has_log);
            assert!((x.coefficient - y.coefficient).norm() <= tol * y.coefficient.norm().max(1e-300), "{x:?} {y:?}");
        }
    }

    #[test]
    fn cylinder_is_circle_times_interval() {
        let cut = Some(CutoffSpec::new(0.5, 0.9).unwrap());
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let w = WeightProfile::real(alpha, vec![1.0, 0.2], cut).unwrap();
            let cyl = full_expansion(&ModelGeometry::cylinder(0.7, 3.0).unwrap(), &w, 0.0, Orders::default()).unwrap();
            let iv = full_expansion(&ModelGeometry::interval(3.0).unwrap(), &w, 0.0, Orders::default()).unwrap();
            same_expansion(&cyl, &circle_expansion(0.7).product(&iv).unwrap(), 1e-12);
        }
    }

    #[test]
    fn scaling_law() {
        let cut = Some(CutoffSpec::new(0.2, 0.4).unwrap());
        for geom in ModelGeometry::catalogue() {
            for alpha in [-0.4, 0.5, 1.0, 1.7, 2.0] {
                let w = WeightProfile::real(alpha, vec![1.0, -0.3, 0.2], cut).unwrap();
                let cs = 1.9;
                let base = full_expansion(&geom, &w, 0.0, Orders::default()).unwrap();
                let scaled = full_expansion(&geom.scale(cs).unwrap(), &w.scaled(cs).unwrap(), 0.0, Orders::default()).unwrap();
                same_expansion(&scaled, &base.time_rescaled(cs), 1e-11);
            }
        }
    }

    proptest! {
        #[test]
        fn smooth_limit_on_every_geometry(idx in 0usize..6, f0 in -2.0f64..2.0, f1 in -2.0f64..2.0, f2 in -2.0f64..2.0, e in -1.0f64..1.0) {
            let g = &ModelGeometry::catalogue()[idx];
            for comp in &g.components {
                for l in 0..=2 {
                    let a = boundary_coefficient_singular(l, c(0.0), g.m, comp, e, &[f0, f1, f2]).unwrap();
                    let b = boundary_coefficient_smooth(l, g.m, comp, e, &[f0, f1, f2]).unwrap();
                    prop_assert!((a - b).norm() <= 1e-12 * b.abs().max(1.0));
                }
            }
        }
    }
}
