//! Singular boundary weights F = Σ F_i r^{i−α} times a smooth cutoff.

use crate::error::{invalid, Result};
use crate::geometry::ModelGeometry;
use num_complex::Complex64;
use serde::Serialize;

/// Plateau radius and support radius of the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub eps0: f64,
    pub eps: f64,
}

impl CutoffSpec {
    pub fn new(eps0: f64, eps: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 < eps && eps.is_finite()) {
            return invalid(format!("cutoff needs 0 < eps0 < eps, got eps0 = {eps0}, eps = {eps}"));
        }
        Ok(CutoffSpec { eps0, eps })
    }

    /// χ(r): 1 on [0, eps0], 0 on [eps, ∞), smooth in between.
    pub fn chi(&self, r: f64) -> f64 {
        psi((self.eps - r) / (self.eps - self.eps0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        CutoffSpec { eps0: c * self.eps0, eps: c * self.eps }
    }
}

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn psi(x: f64) -> f64 {
    if x >= 1.0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    let a = bump(x);
    a / (a + bump(1.0 - x))
}

/// F = (Σ F_i r^{i−α})·χ(r), with the same F_i on every boundary component.
/// Without a cutoff the series is used on the whole collar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightProfile {
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    pub f_coeffs: Vec<f64>,
    pub cutoff: Option<CutoffSpec>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

impl WeightProfile {
    pub fn new(alpha: Complex64, f_coeffs: Vec<f64>, cutoff: Option<CutoffSpec>) -> Result<Self> {
        if !(alpha.re < 3.0) || !alpha.im.is_finite() {
            return invalid(format!("weight exponent needs Re(alpha) < 3, got {alpha}"));
        }
        if f_coeffs.iter().any(|f| !f.is_finite()) {
            return invalid("weight coefficients must be finite");
        }
        Ok(WeightProfile { alpha, f_coeffs, cutoff })
    }

    /// Real exponent with the given coefficients.
    pub fn real(alpha: f64, f_coeffs: Vec<f64>, cutoff: Option<CutoffSpec>) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), f_coeffs, cutoff)
    }

    /// F ≡ 1.
    pub fn unit() -> Self {
        WeightProfile { alpha: Complex64::new(0.0, 0.0), f_coeffs: vec![1.0], cutoff: None }
    }

    /// The exponent as a real number; the numerical trace engine needs this.
    pub fn real_alpha(&self) -> Result<f64> {
        if self.alpha.im != 0.0 {
            return invalid(format!("a real exponent is required here, got {}", self.alpha));
        }
        Ok(self.alpha.re)
    }

    /// F_i (zero beyond the stored list).
    pub fn modified_taylor(&self, i: usize) -> f64 {
        self.f_coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Checks the cutoff fits inside every collar of `geom`.
    pub fn check_geometry(&self, geom: &ModelGeometry) -> Result<()> {
        if let Some(c) = &self.cutoff {
            for comp in &geom.components {
                if c.eps > comp.collar_width * (1.0 + 1e-12) {
                    return invalid(format!(
                        "cutoff support {} exceeds the collar width {}",
                        c.eps, comp.collar_width
                    ));
                }
            }
        }
        Ok(())
    }

    /// Radius beyond which F vanishes on a collar of the given width.
    pub fn support(&self, collar_width: f64) -> f64 {
        self.cutoff.map_or(collar_width, |c| c.eps.min(collar_width))
    }

    pub fn chi(&self, r: f64) -> f64 {
        self.cutoff.map_or(1.0, |c| c.chi(r))
    }

    /// Σ F_i r^{i−α} without the cutoff.
    pub fn series(&self, r: f64) -> Complex64 {
        let base = Complex64::new(r, 0.0).powc(-self.alpha);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = 1.0;
        for f in &self.f_coeffs {
            acc += base * (f * p);
            p *= r;
        }
        acc
    }

    /// F(r) for complex exponents.
    pub fn evaluate_complex(&self, r: f64) -> Result<Complex64> {
        if !(r > 0.0) {
            return invalid(format!("the weight is singular at the boundary; r must be positive, got {r}"));
        }
        let chi = self.chi(r);
        if chi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.series(r) * chi)
    }

    /// F(r) for a real exponent.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        let a = self.real_alpha()?;
        if !(r > 0.0) {
            return invalid(format!("the weight is singular at the boundary; r must be positive, got {r}"));
        }
        let chi = self.chi(r);
        if chi == 0.0 {
            return Ok(0.0);
        }
        let p: f64 = self.f_coeffs.iter().rev().fold(0.0, |acc, f| acc * r + f);
        Ok(p * r.powf(-a) * chi)
    }

    /// The same geometric weight on the metric c²g: F_i ↦ c^{α−i}F_i, radii ↦ c·radii.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let a = self.real_alpha()?;
        if !(c > 0.0) {
            return invalid(format!("scale factor must be positive, got {c}"));
        }
        Ok(WeightProfile {
            alpha: self.alpha,
            f_coeffs: self.f_coeffs.iter().enumerate().map(|(i, f)| f * c.powf(a - i as f64)).collect(),
            cutoff: self.cutoff.map(|s| s.scaled(c)),
        })
    }

    /// Product with a constant factor living on another manifold.
    pub fn times(&self, factor: f64) -> Self {
        WeightProfile {
            alpha: self.alpha,
            f_coeffs: self.f_coeffs.iter().map(|f| f * factor).collect(),
            cutoff: self.cutoff,
        }
    }

    /// True when α lies at an exceptional value 1 or 2.
    pub fn exceptional(&self) -> Option<u8> {
        if self.alpha.im != 0.0 {
            return None;
        }
        if self.alpha.re == 1.0 {
            Some(1)
        } else if self.alpha.re == 2.0 {
            Some(2)
        } else {
            None
        }
    }
}
