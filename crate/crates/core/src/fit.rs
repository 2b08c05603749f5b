//! Least-squares extraction of asymptotic coefficients from sampled traces.

use crate::error::{invalid, Error, Result};
use crate::predict::AsymptoticExpansion;
use crate::spectrum::TraceSamples;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::ops::Range;

/// Largest accepted condition number of the normalised design matrix.
pub const MAX_CONDITION: f64 = 1e10;
/// Minimum span of the sample grid, in decades of t.
pub const MIN_DECADES: f64 = 1.5;

/// One regressor t^p (ln t)^δ, optionally with its predicted coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderTerm {
    pub power: f64,
    pub has_log: bool,
    pub predicted: Option<f64>,
}

impl LadderTerm {
    pub fn new(power: f64, has_log: bool) -> Self {
        LadderTerm { power, has_log, predicted: None }
    }

    fn eval(&self, t: f64) -> f64 {
        let v = t.powf(self.power);
        if self.has_log {
            v * t.ln()
        } else {
            v
        }
    }
}

/// Ladder of real powers from a predicted expansion, with extra unpredicted powers appended.
pub fn ladder_from(expansion: &AsymptoticExpansion, extra: &[f64]) -> Result<Vec<LadderTerm>> {
    let mut out = Vec::new();
    for term in &expansion.terms {
        if term.power.im != 0.0 || term.coefficient.im.abs() > 1e-12 * term.coefficient.norm().max(1.0) {
            return invalid("fitting needs real powers and coefficients");
        }
        out.push(LadderTerm { power: term.power.re, has_log: term.has_log, predicted: Some(term.coefficient.re) });
    }
    out.extend(extra.iter().map(|&p| LadderTerm::new(p, false)));
    Ok(out)
}

/// Predicted expansion plus the unpredicted boundary orders ℓ ∈ `extra`, i.e. powers
/// −(m−1)/2 + (ℓ−α)/2, sorted by power. Terms predicted to vanish are dropped.
pub fn boundary_ladder(expansion: &AsymptoticExpansion, m: usize, alpha: f64, extra: Range<usize>) -> Result<Vec<LadderTerm>> {
    let mut out = ladder_from(expansion, &[])?;
    out.retain(|t| t.predicted != Some(0.0));
    for l in extra {
        let p = -0.5 * (m as f64 - 1.0) + 0.5 * (l as f64 - alpha);
        if !out.iter().any(|t| !t.has_log && (t.power - p).abs() < 1e-12) {
            out.push(LadderTerm::new(p, false));
        }
    }
    out.sort_by(|a, b| a.power.total_cmp(&b.power).then(b.has_log.cmp(&a.has_log)));
    Ok(out)
}

/// Fit with the largest number of leading ladder terms (at least `n_min`) whose report is valid.
pub fn fit_largest_valid(samples: &TraceSamples, ladder: &[LadderTerm], n_min: usize) -> Result<FitReport> {
    let mut last = Error::Numerical(format!("no valid fit with at least {n_min} terms"));
    for n in (n_min.max(1)..=ladder.len()).rev() {
        match fit_coefficients(samples, ladder, n) {
            Ok(r) if r.valid => return Ok(r),
            Ok(_) => {}
            Err(e @ Error::InvalidInput(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Fitted value of one ladder term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedTerm {
    pub power: f64,
    pub has_log: bool,
    pub predicted: Option<f64>,
    pub fitted: f64,
    /// One-sigma error from the residual scatter.
    pub std_error: f64,
    pub abs_deviation: Option<f64>,
    pub rel_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub terms: Vec<FittedTerm>,
    /// Empirical exponent of the samples minus every fitted term but the last.
    pub residual_order: f64,
    /// residual_order ≥ (power of the last fitted term) − 0.2.
    pub valid: bool,
    pub condition: f64,
    pub rms_residual: f64,
}

impl FitReport {
    /// Fitted term at the given power and log flag.
    pub fn term(&self, power: f64, has_log: bool) -> Option<&FittedTerm> {
        self.terms.iter().find(|t| t.has_log == has_log && (t.power - power).abs() < 1e-12)
    }
}

fn check_samples(samples: &TraceSamples) -> Result<()> {
    let ts: Vec<f64> = samples.samples.iter().map(|s| s.0).collect();
    if ts.iter().any(|t| !(*t > 0.0)) || samples.samples.iter().any(|s| !s.1.is_finite()) {
        return invalid("samples need positive times and finite values");
    }
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(0.0, f64::max);
    if (hi / lo).log10() < MIN_DECADES - 1e-9 {
        return invalid(format!("samples span {:.2} decades of t; at least {MIN_DECADES} are needed", (hi / lo).log10()));
    }
    Ok(())
}

/// Least-squares fit of value(t) ≈ Σ c_j t^{p_j}(ln t)^{δ_j} over the first `n_fit` ladder terms,
/// rows weighted by t^{−p_0}.
pub fn fit_coefficients(samples: &TraceSamples, ladder: &[LadderTerm], n_fit: usize) -> Result<FitReport> {
    check_samples(samples)?;
    let n = samples.samples.len();
    if n_fit == 0 || n_fit > ladder.len() {
        return invalid(format!("n_fit must lie in 1..={}, got {n_fit}", ladder.len()));
    }
    if n_fit >= n {
        return invalid(format!("{n} samples cannot determine {n_fit} coefficients"));
    }
    let terms = &ladder[..n_fit];
    let p0 = terms[0].power;
    let mut a = DMatrix::<f64>::zeros(n, n_fit);
    let mut b = DVector::<f64>::zeros(n);
    for (i, &(t, v)) in samples.samples.iter().enumerate() {
        let w = t.powf(-p0);
        for (j, term) in terms.iter().enumerate() {
            a[(i, j)] = w * term.eval(t);
        }
        b[i] = w * v;
    }
    let norms: Vec<f64> = (0..n_fit).map(|j| a.column(j).norm()).collect();
    if norms.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::Numerical("degenerate ladder column".into()));
    }
    for (j, s) in norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { cond: condition });
    }
    let u = svd.u.as_ref().expect("requested");
    let vt = svd.v_t.as_ref().expect("requested");
    let utb = u.transpose() * &b;
    let mut y = DVector::<f64>::zeros(n_fit);
    for k in 0..n_fit {
        y[k] = utb[k] / svd.singular_values[k];
    }
    let x = vt.transpose() * y;
    let resid = &b - &a * &x;
    let dof = (n - n_fit) as f64;
    let s2 = resid.norm_squared() / dof;
    let mut fitted = Vec::with_capacity(n_fit);
    for (j, term) in terms.iter().enumerate() {
        let c = x[j] / norms[j];
        let var: f64 = (0..n_fit).map(|k| (vt[(k, j)] / svd.singular_values[k]).powi(2)).sum::<f64>() * s2;
        let abs_dev = term.predicted.map(|p| (c - p).abs());
        let rel_dev = term.predicted.and_then(|p| if p != 0.0 { Some((c - p).abs() / p.abs()) } else { None });
        fitted.push(FittedTerm {
            power: term.power,
            has_log: term.has_log,
            predicted: term.predicted,
            fitted: c,
            std_error: var.sqrt() / norms[j],
            abs_deviation: abs_dev,
            rel_deviation: rel_dev,
        });
    }
    let last = terms[n_fit - 1];
    let (head, _) = fitted.split_at(n_fit - 1);
    let remainder: Vec<(f64, f64)> = samples
        .samples
        .iter()
        .map(|&(t, v)| {
            let sub: f64 = head
                .iter()
                .map(|f| f.fitted * LadderTerm::new(f.power, f.has_log).eval(t))
                .sum();
            (t, v - sub)
        })
        .collect();
    let residual_order = power_law(&remainder).map_or(f64::NAN, |p| p.power);
    Ok(FitReport {
        terms: fitted,
        residual_order,
        valid: residual_order >= last.power - 0.2,
        condition,
        rms_residual: (resid.norm_squared() / n as f64).sqrt(),
    })
}

/// c·t^p fitted to a remainder by log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub power: f64,
    pub coefficient_error: f64,
    pub power_error: f64,
    pub r_squared: f64,
}

fn power_law(points: &[(f64, f64)]) -> Result<PowerLaw> {
    let sign = points.first().map_or(1.0, |p| p.1.signum());
    if points.iter().any(|p| p.1 == 0.0 || p.1.signum() != sign) {
        return Err(Error::Numerical("remainder changes sign; not a power law".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let r_squared = if ss_res <= 1e-20 * n { 1.0 } else { 1.0 - ss_res / syy };
    let s2 = if xs.len() > 2 { ss_res / (n - 2.0) } else { 0.0 };
    let power_error = (s2 / sxx).sqrt();
    let icpt_error = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    let coefficient = sign * icpt.exp();
    Ok(PowerLaw {
        coefficient,
        power: slope,
        coefficient_error: coefficient.abs() * icpt_error,
        power_error,
        r_squared,
    })
}

/// Subtracts `known` from the samples and fits the remainder to c·t^p.
pub fn peel_leading(samples: &TraceSamples, known: &AsymptoticExpansion) -> Result<PowerLaw> {
    if samples.samples.len() < 3 {
        return invalid("peeling needs at least three samples");
    }
    let rem: Vec<(f64, f64)> = samples.samples.iter().map(|&(t, v)| (t, v - known.eval(t).re)).collect();
    let fit = power_law(&rem)?;
    if fit.r_squared < 0.99 {
        return Err(Error::Numerical(format!("remainder is not a power law (R² = {:.4})", fit.r_squared)));
    }
    Ok(fit)
}

/// Geometric grid of `points` times over [t_min, t_max].
pub fn geometric_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min) || points == 0 || (points == 1 && t_max != t_min) {
        return invalid(format!("bad time grid: [{t_min}, {t_max}] with {points} points"));
    }
    if points == 1 {
        return Ok(vec![t_min]);
    }
    let r = (t_max / t_min).ln() / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { t_max } else { t_min * (r * i as f64).exp() }).collect())
}
