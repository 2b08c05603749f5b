//! Regularized collar integrals and the constant term of a simple-pole Laurent expansion.

use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundaryComponent, ModelGeometry};
use crate::special::quadrature::adaptive;
use crate::weight::WeightProfile;
use num_complex::Complex64;
use serde::Serialize;

const TOL: f64 = 1e-13;
const JACOBIAN_TERMS: usize = 40;

/// A regularized integral; at α = 1, 2 the pole is dropped and its residue recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedValue {
    #[serde(serialize_with = "ser_c")]
    pub value: Complex64,
    pub pole_dropped: bool,
    #[serde(serialize_with = "ser_c")]
    pub residue: Complex64,
}

pub(crate) fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

impl RegularizedValue {
    pub fn scale(self, c: f64) -> Self {
        RegularizedValue { value: self.value * c, pole_dropped: self.pole_dropped, residue: self.residue * c }
    }

    pub fn add(self, other: Self) -> Self {
        RegularizedValue {
            value: self.value + other.value,
            pole_dropped: self.pole_dropped || other.pole_dropped,
            residue: self.residue + other.residue,
        }
    }

    pub fn zero() -> Self {
        RegularizedValue { value: Complex64::new(0.0, 0.0), pole_dropped: false, residue: Complex64::new(0.0, 0.0) }
    }
}

/// 1 or 2 when α sits exactly on an exceptional value.
pub fn exceptional_order(alpha: Complex64) -> Option<u8> {
    if alpha.im != 0.0 {
        None
    } else if alpha.re == 1.0 {
        Some(1)
    } else if alpha.re == 2.0 {
        Some(2)
    } else {
        None
    }
}

/// Near Re(alpha) = 3 the collar integrand is barely integrable, so numerics stop at 2.9.
pub const MAX_ALPHA_RE: f64 = 2.9;

fn check_alpha(alpha: Complex64) -> Result<()> {
    if !(alpha.re <= MAX_ALPHA_RE) {
        return invalid(format!("regularization needs Re(alpha) <= {MAX_ALPHA_RE}, got {alpha}"));
    }
    Ok(())
}

fn rpow(r: f64, p: Complex64) -> Complex64 {
    Complex64::new(r, 0.0).powc(p)
}

/// ε^{k+1−α}/(k+1−α), or ln ε when the exponent vanishes. Returns (value, residue in α).
fn boundary_term(eps: f64, k: usize, alpha: Complex64) -> (Complex64, Complex64, bool) {
    let e = Complex64::new(k as f64 + 1.0, 0.0) - alpha;
    if e.norm() == 0.0 {
        (Complex64::new(eps.ln(), 0.0), Complex64::new(-1.0, 0.0), true)
    } else {
        (rpow(eps, e) / e, Complex64::new(0.0, 0.0), false)
    }
}

/// Regularized integral over one collar of H dx, where `h` is H as a function of
/// the distance r, `h0`, `h1` its first modified Taylor coefficients and `outer`
/// the far end of the collar. The collar part is integrated numerically.
#[allow(clippy::too_many_arguments)]
pub fn i_reg(
    h0: Complex64,
    h1: Complex64,
    comp: &BoundaryComponent,
    alpha: Complex64,
    h: &dyn Fn(f64) -> Complex64,
    eps: f64,
    outer: f64,
) -> Result<RegularizedValue> {
    check_alpha(alpha)?;
    if !(eps > 0.0) || eps > comp.collar_width * (1.0 + 1e-12) || eps > outer {
        return invalid(format!(
            "regularization radius {eps} must lie in (0, min(collar width {}, {outer})]",
            comp.collar_width
        ));
    }
    let l = comp.l_aa;
    let s1 = h1 - h0 * l;
    let collar = adaptive(
        |r| h(r) * comp.jacobian.eval(r) - h0 * rpow(r, -alpha) - s1 * rpow(r, Complex64::new(1.0, 0.0) - alpha),
        0.0,
        eps,
        &[],
        TOL,
        TOL,
    );
    let inner = adaptive(|r| h(r) * comp.jacobian.eval(r), eps, outer, &[], TOL, TOL);
    let (b0, r0, p0) = boundary_term(eps, 0, alpha);
    let (b1, r1, p1) = boundary_term(eps, 1, alpha);
    Ok(RegularizedValue {
        value: (collar.value + inner.value + h0 * b0 + s1 * b1) * comp.area,
        pole_dropped: p0 || p1,
        residue: (h0 * r0 + s1 * r1) * comp.area,
    })
}

/// Collar density known as Σ c_k r^{k−α} on [0, series_radius] plus its full evaluator.
pub struct CollarIntegrand<'a> {
    pub alpha: Complex64,
    pub area: f64,
    /// Coefficients c_k of H·J.
    pub series: Vec<Complex64>,
    pub series_radius: f64,
    /// H(r)·J(r).
    pub density: &'a dyn Fn(f64) -> Complex64,
    pub outer: f64,
    pub knots: Vec<f64>,
}

impl CollarIntegrand<'_> {
    /// Regularized integral with radius `eps`; the collar part below the series radius is exact.
    pub fn regularize(&self, eps: f64) -> Result<RegularizedValue> {
        check_alpha(self.alpha)?;
        if !(eps > 0.0 && eps <= self.outer) {
            return invalid(format!("regularization radius {eps} must lie in (0, {}]", self.outer));
        }
        let alpha = self.alpha;
        let c0 = self.series.first().copied().unwrap_or_default();
        let c1 = self.series.get(1).copied().unwrap_or_default();
        let rs = self.series_radius.min(eps);
        let mut collar = Complex64::new(0.0, 0.0);
        for (k, c) in self.series.iter().enumerate().skip(2) {
            let e = Complex64::new(k as f64 + 1.0, 0.0) - alpha;
            collar += c * rpow(rs, e) / e;
        }
        if rs < eps {
            collar += adaptive(
                |r| (self.density)(r) - c0 * rpow(r, -alpha) - c1 * rpow(r, Complex64::new(1.0, 0.0) - alpha),
                rs,
                eps,
                &self.knots,
                TOL,
                TOL,
            )
            .value;
        }
        let inner = adaptive(|r| (self.density)(r), eps, self.outer, &self.knots, TOL, TOL).value;
        let (b0, r0, p0) = boundary_term(eps, 0, alpha);
        let (b1, r1, p1) = boundary_term(eps, 1, alpha);
        Ok(RegularizedValue {
            value: (collar + inner + c0 * b0 + c1 * b1) * self.area,
            pole_dropped: p0 || p1,
            residue: (c0 * r0 + c1 * r1) * self.area,
        })
    }
}

/// Default regularization radius for a weight on a collar.
fn default_eps(weight: &WeightProfile, comp: &BoundaryComponent) -> f64 {
    0.5 * weight.cutoff.map_or(comp.collar_width, |c| c.eps0.min(comp.collar_width))
}

/// I_Reg{F} over the whole model manifold, with a radius chosen per collar
/// (`eps = None`) or fixed by the caller.
pub fn i_reg_weight(geom: &ModelGeometry, weight: &WeightProfile, eps: Option<f64>) -> Result<RegularizedValue> {
    weight.check_geometry(geom)?;
    let mut total = RegularizedValue::zero();
    for comp in &geom.components {
        let jt = comp.jacobian.taylor(JACOBIAN_TERMS);
        let n = weight.f_coeffs.len() + jt.len();
        let mut series = vec![Complex64::new(0.0, 0.0); n];
        for (i, f) in weight.f_coeffs.iter().enumerate() {
            for (k, j) in jt.iter().enumerate() {
                series[i + k] += f * j;
            }
        }
        let outer = weight.support(comp.collar_width);
        let series_radius = weight.cutoff.map_or(outer, |c| c.eps0.min(outer));
        let density = |r: f64| {
            if r <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            weight.evaluate_complex(r).unwrap_or_default() * comp.jacobian.eval(r)
        };
        let knots: Vec<f64> = weight.cutoff.map_or(vec![], |c| vec![c.eps0, c.eps]);
        let ci = CollarIntegrand {
            alpha: weight.alpha,
            area: comp.area,
            series,
            series_radius,
            density: &density,
            outer,
            knots,
        };
        let e = eps.unwrap_or_else(|| default_eps(weight, comp));
        total = total.add(ci.regularize(e)?);
    }
    Ok(total)
}

/// Constant term and residue of a function with at most a simple pole at `alpha0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laurent {
    pub constant: Complex64,
    pub residue: Complex64,
}

/// Symmetric-limit extrapolation over h ∈ {1e−2, 1e−3, 1e−4}.
pub fn laurent_constant(f: impl Fn(Complex64) -> Complex64, alpha0: f64) -> Result<Laurent> {
    let hs = [1e-2, 1e-3, 1e-4];
    let a = Complex64::new(alpha0, 0.0);
    let mut g = [Complex64::new(0.0, 0.0); 3];
    let mut r = [Complex64::new(0.0, 0.0); 3];
    for (i, &h) in hs.iter().enumerate() {
        let fp = f(a + h);
        let fm = f(a - h);
        g[i] = (fp + fm) * 0.5;
        r[i] = (fp - fm) * (0.5 * h);
    }
    let extrapolate = |v: &[Complex64; 3]| {
        let r1 = (v[1] * 100.0 - v[0]) / 99.0;
        let r2 = (v[2] * 100.0 - v[1]) / 99.0;
        ((r2 * 1e4 - r1) / (1e4 - 1.0), r1, r2)
    };
    let (constant, c1, c2) = extrapolate(&g);
    let (residue, _, _) = extrapolate(&r);
    if !constant.is_finite() || (c2 - c1).norm() > 1e-6 * c2.norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "Laurent extrapolation at {alpha0} did not converge (pole of order > 1?)"
        )));
    }
    Ok(Laurent { constant, residue })
}
