//! Model manifolds with boundary: exact boundary data, scaling and circle products.

use crate::error::{invalid, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// The six supported model manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kind {
    Interval { length: f64 },
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Cylinder { rho: f64, length: f64 },
    Ball3 { radius: f64 },
    /// Upper hemisphere of the round sphere of the given radius, boundary the equator.
    Hemisphere { radius: f64 },
}

/// Volume density of the collar relative to dr·dy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Jacobian {
    /// Σ c_k r^k.
    Polynomial(Vec<f64>),
    /// cos(r / radius).
    Cosine { radius: f64 },
}

impl Jacobian {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Jacobian::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * r + ck),
            Jacobian::Cosine { radius } => (r / radius).cos(),
        }
    }

    /// First `n` Taylor coefficients at r = 0.
    pub fn taylor(&self, n: usize) -> Vec<f64> {
        match self {
            Jacobian::Polynomial(c) => {
                let mut v = c.clone();
                v.resize(n.max(c.len()), 0.0);
                v.truncate(n);
                v
            }
            Jacobian::Cosine { radius } => {
                let mut v = vec![0.0; n];
                let mut term = 1.0;
                let mut k = 0;
                while k < n {
                    v[k] = term;
                    term *= -1.0 / (radius * radius * ((k + 1) * (k + 2)) as f64);
                    k += 2;
                }
                v
            }
        }
    }
}

/// Boundary geometry of one boundary component, under the inward-normal convention.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryComponent {
    pub area: f64,
    pub l_ab: Vec<f64>,
    pub l_aa: f64,
    pub r_amma: f64,
    pub r_ijji: f64,
    pub collar_width: f64,
    pub jacobian: Jacobian,
}

impl BoundaryComponent {
    /// L_ab L_ab.
    pub fn l_ab_sq(&self) -> f64 {
        self.l_ab.iter().map(|x| x * x).sum()
    }

    fn flat(area: f64, dim_bd: usize, collar_width: f64) -> Self {
        BoundaryComponent {
            area,
            l_ab: vec![0.0; dim_bd],
            l_aa: 0.0,
            r_amma: 0.0,
            r_ijji: 0.0,
            collar_width,
            jacobian: Jacobian::Polynomial(vec![1.0]),
        }
    }
}

/// A model manifold together with its boundary components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelGeometry {
    pub kind: Kind,
    pub m: usize,
    pub components: Vec<BoundaryComponent>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

impl ModelGeometry {
    pub fn new(kind: Kind) -> Result<Self> {
        let (m, components) = match kind {
            Kind::Interval { length } => {
                positive("length", length)?;
                let c = BoundaryComponent::flat(1.0, 0, 0.5 * length);
                (1, vec![c.clone(), c])
            }
            Kind::Disk { radius } => {
                positive("radius", radius)?;
                (2, vec![circle(radius, radius, 1.0)])
            }
            Kind::Annulus { inner, outer } => {
                positive("inner radius", inner)?;
                positive("outer radius", outer)?;
                if inner >= outer {
                    return invalid(format!("annulus needs inner < outer, got {inner} >= {outer}"));
                }
                let reach = 0.5 * (outer - inner);
                (2, vec![circle(outer, reach, 1.0), circle(inner, reach, -1.0)])
            }
            Kind::Cylinder { rho, length } => {
                positive("rho", rho)?;
                positive("length", length)?;
                let c = BoundaryComponent::flat(2.0 * PI * rho, 1, 0.5 * length);
                (2, vec![c.clone(), c])
            }
            Kind::Ball3 { radius } => {
                positive("radius", radius)?;
                let k = 1.0 / radius;
                (
                    3,
                    vec![BoundaryComponent {
                        area: 4.0 * PI * radius * radius,
                        l_ab: vec![k, k],
                        l_aa: 2.0 * k,
                        r_amma: 0.0,
                        r_ijji: 0.0,
                        collar_width: radius,
                        jacobian: Jacobian::Polynomial(vec![1.0, -2.0 * k, k * k]),
                    }],
                )
            }
            Kind::Hemisphere { radius } => {
                positive("radius", radius)?;
                let k2 = 1.0 / (radius * radius);
                (
                    2,
                    vec![BoundaryComponent {
                        area: 2.0 * PI * radius,
                        l_ab: vec![0.0],
                        l_aa: 0.0,
                        r_amma: k2,
                        r_ijji: 2.0 * k2,
                        collar_width: 0.5 * PI * radius,
                        jacobian: Jacobian::Cosine { radius },
                    }],
                )
            }
        };
        Ok(ModelGeometry { kind, m, components })
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(Kind::Interval { length })
    }
    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(Kind::Disk { radius })
    }
    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        Self::new(Kind::Annulus { inner, outer })
    }
    pub fn cylinder(rho: f64, length: f64) -> Result<Self> {
        Self::new(Kind::Cylinder { rho, length })
    }
    pub fn ball3(radius: f64) -> Result<Self> {
        Self::new(Kind::Ball3 { radius })
    }
    pub fn hemisphere(radius: f64) -> Result<Self> {
        Self::new(Kind::Hemisphere { radius })
    }

    /// One instance of each kind with unit-scale parameters.
    pub fn catalogue() -> Vec<Self> {
        vec![
            Self::interval(PI).expect("valid"),
            Self::disk(1.0).expect("valid"),
            Self::annulus(1.0, 2.0).expect("valid"),
            Self::cylinder(1.0, PI).expect("valid"),
            Self::ball3(1.0).expect("valid"),
            Self::hemisphere(1.0).expect("valid"),
        ]
    }

    pub fn boundary_data(&self) -> &[BoundaryComponent] {
        &self.components
    }

    /// Riemannian volume.
    pub fn volume(&self) -> f64 {
        match self.kind {
            Kind::Interval { length } => length,
            Kind::Disk { radius } => PI * radius * radius,
            Kind::Annulus { inner, outer } => PI * (outer * outer - inner * inner),
            Kind::Cylinder { rho, length } => 2.0 * PI * rho * length,
            Kind::Ball3 { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            Kind::Hemisphere { radius } => 2.0 * PI * radius * radius,
        }
    }

    /// Total boundary measure.
    pub fn boundary_measure(&self) -> f64 {
        self.components.iter().map(|c| c.area).sum()
    }

    /// Interior scalar curvature (constant on every model).
    pub fn scalar_curvature(&self) -> f64 {
        match self.kind {
            Kind::Hemisphere { radius } => 2.0 / (radius * radius),
            _ => 0.0,
        }
    }

    /// The metric c²g: every length multiplies by c.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return invalid(format!("scale factor must be positive, got {c}"));
        }
        let kind = match self.kind {
            Kind::Interval { length } => Kind::Interval { length: c * length },
            Kind::Disk { radius } => Kind::Disk { radius: c * radius },
            Kind::Annulus { inner, outer } => Kind::Annulus { inner: c * inner, outer: c * outer },
            Kind::Cylinder { rho, length } => Kind::Cylinder { rho: c * rho, length: c * length },
            Kind::Ball3 { radius } => Kind::Ball3 { radius: c * radius },
            Kind::Hemisphere { radius } => Kind::Hemisphere { radius: c * radius },
        };
        Self::new(kind)
    }

    /// Short lowercase name of the kind.
    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Interval { .. } => "interval",
            Kind::Disk { .. } => "disk",
            Kind::Annulus { .. } => "annulus",
            Kind::Cylinder { .. } => "cylinder",
            Kind::Ball3 { .. } => "ball3",
            Kind::Hemisphere { .. } => "hemisphere",
        }
    }
}

/// Circle of radius `radius`; orientation +1 for a convex boundary, −1 for a hole.
fn circle(radius: f64, reach: f64, orientation: f64) -> BoundaryComponent {
    let k = orientation / radius;
    BoundaryComponent {
        area: 2.0 * PI * radius,
        l_ab: vec![k],
        l_aa: k,
        r_amma: 0.0,
        r_ijji: 0.0,
        collar_width: reach,
        jacobian: Jacobian::Polynomial(vec![1.0, -k]),
    }
}

/// S¹ of radius ρ times an interval.
pub fn product_with_circle(rho: f64, geom: &ModelGeometry) -> Result<ModelGeometry> {
    match geom.kind {
        Kind::Interval { length } => ModelGeometry::cylinder(rho, length),
        _ => invalid(format!("circle products are only supported with an interval, got {}", geom.name())),
    }
}
