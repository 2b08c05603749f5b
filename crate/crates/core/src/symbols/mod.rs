//! Exact calculus of the boundary-symbol integrals: the Λ-term algebra closed
//! under (1/(2Λ))d/dΛ, the multipliers c_{nkl} and d_{kljn}, and the assembly
//! identities that recover κ_α, κ¹_α and κ³⁻⁵_α independently of `predict`.

pub mod moments;
pub mod poly;

pub use poly::Poly;

use crate::special::gamma::{gamma, is_gamma_pole, rgamma};
use crate::{Complex64, Error, Result};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::{LN_2, PI};
use std::fmt;

/// Sample points at which two α-expressions are compared.
pub const CANONICAL_ALPHAS: [f64; 8] = [-1.7, -0.9, -0.3, 0.3, 0.7, 1.4, 2.6, 2.9];
/// Relative agreement required between expressions at the sample points.
pub const SAMPLE_TOLERANCE: f64 = 1e-11;
/// Relative agreement required of the recovered κ constants.
pub const KAPPA_TOLERANCE: f64 = 1e-9;

fn rf(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn ri(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// c + aα.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub c: Rational64,
    pub a: Rational64,
}

impl Affine {
    pub fn new(c: Rational64, a: Rational64) -> Self {
        Affine { c, a }
    }

    pub fn int(c: i64, a: i64) -> Self {
        Affine::new(ri(c), ri(a))
    }

    pub fn eval(&self, alpha: Complex64) -> Complex64 {
        alpha * rf(self.a) + rf(self.c)
    }

    pub fn shift(&self, d: i64) -> Self {
        Affine::new(self.c + d, self.a)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::affine(self.c, self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.a.is_zero()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// i^p · 2^{two_exp} · π^{pi_exp} · ΠΓ(num)/ΠΓ(den) · poly(α).
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaExpression {
    pub two_exp: Affine,
    pub pi_exp: Rational64,
    pub gamma_num: Vec<Affine>,
    pub gamma_den: Vec<Affine>,
    pub poly: Poly,
    pub i_power: u8,
}

impl AlphaExpression {
    pub fn from_poly(poly: Poly) -> Self {
        AlphaExpression {
            two_exp: Affine::int(0, 0),
            pi_exp: ri(0),
            gamma_num: Vec::new(),
            gamma_den: Vec::new(),
            poly,
            i_power: 0,
        }
    }

    /// Multiply by s·i^q.
    pub fn scaled(&self, s: &BigRational, q: u8) -> Self {
        let mut out = self.clone();
        out.poly = self.poly.scale(s);
        out.i_power = (self.i_power + q) % 4;
        out
    }

    /// Value at α; `None` where a numerator Γ sits on a pole.
    pub fn eval(&self, alpha: Complex64) -> Option<Complex64> {
        let mut v = (self.two_exp.eval(alpha) * LN_2).exp() * PI.powf(rf(self.pi_exp));
        for g in &self.gamma_num {
            let z = g.eval(alpha);
            if is_gamma_pole(z) {
                return None;
            }
            v *= gamma(z);
        }
        for g in &self.gamma_den {
            v *= rgamma(g.eval(alpha));
        }
        v *= self.poly.eval_complex(alpha);
        Some(v * Complex64::i().powu(self.i_power as u32))
    }

    pub fn eval_real(&self, alpha: f64) -> Option<Complex64> {
        self.eval(Complex64::new(alpha, 0.0))
    }

    /// Agreement at every canonical sample where both sides are defined.
    pub fn equivalent(&self, other: &AlphaExpression) -> bool {
        agree_on_samples(|a| self.eval_real(a), |a| other.eval_real(a))
    }
}

impl fmt::Display for AlphaExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i^{} 2^({}) pi^({})", self.i_power, self.two_exp, self.pi_exp)?;
        for g in &self.gamma_num {
            write!(f, " G({g})")?;
        }
        for g in &self.gamma_den {
            write!(f, " /G({g})")?;
        }
        write!(f, " [{}]", self.poly)
    }
}

fn rel_dev(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm().max(f64::MIN_POSITIVE)
}

/// Compare two functions of α at the canonical samples to `SAMPLE_TOLERANCE`.
pub fn agree_on_samples(
    f: impl Fn(f64) -> Option<Complex64>,
    g: impl Fn(f64) -> Option<Complex64>,
) -> bool {
    CANONICAL_ALPHAS.iter().all(|&a| match (f(a), g(a)) {
        (Some(x), Some(y)) => rel_dev(x, y) <= SAMPLE_TOLERANCE,
        _ => true,
    })
}

/// coeff(α) · Λ^a · (Λ+z)^{b(α)}.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTerm {
    pub coeff: Poly,
    pub a: i64,
    pub b: Affine,
}

impl LambdaTerm {
    pub fn eval(&self, lambda: f64, z: f64, alpha: f64) -> f64 {
        let b = self.b.eval(Complex64::new(alpha, 0.0)).re;
        self.coeff.eval(alpha) * lambda.powi(self.a as i32) * (lambda + z).powf(b)
    }
}

/// (1/(2Λ)) d/dΛ of one term, z held fixed.
pub fn half_derivative(term: &LambdaTerm) -> Vec<LambdaTerm> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = Vec::with_capacity(2);
    if term.a != 0 {
        let s = &half * BigRational::from_integer(BigInt::from(term.a));
        out.push(LambdaTerm { coeff: term.coeff.scale(&s), a: term.a - 2, b: term.b });
    }
    if !term.b.is_zero() {
        let coeff = &term.coeff * &term.b.to_poly().scale(&half);
        out.push(LambdaTerm { coeff, a: term.a - 1, b: term.b.shift(-1) });
    }
    out
}

fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// c_{nkl}: (1/(2Λ)d/dΛ)^{n−1} Λ^{k−1}(Λ+z)^{−(l+1−α)} at z = Λ, divided by
/// Λ^{−(l+2n−k−α)}. Always of the form 2^α·P(α).
pub fn c_multiplier(n: u32, k: u32, l: u32) -> Result<AlphaExpression> {
    if n == 0 {
        return Err(Error::InvalidInput("c_multiplier needs n >= 1".into()));
    }
    let (n, k, l) = (n as i64, k as i64, l as i64);
    let mut terms = vec![LambdaTerm { coeff: Poly::one(), a: k - 1, b: Affine::int(-(l + 1), 1) }];
    for _ in 1..n {
        terms = terms.iter().flat_map(half_derivative).collect();
    }
    let target = k - l - 2 * n;
    let mut poly = Poly::default();
    for t in &terms {
        if t.b.a != ri(1) || !t.b.c.is_integer() || t.a + t.b.c.to_integer() != target {
            return Err(Error::Consistency(format!(
                "c_{n}{k}{l}: term Λ^{}(Λ+z)^({}) breaks homogeneity",
                t.a, t.b
            )));
        }
        poly = &poly + &t.coeff.scale(&pow2(t.b.c.to_integer()));
    }
    let mut out = AlphaExpression::from_poly(poly);
    out.two_exp = Affine::int(0, 1);
    Ok(out)
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// d_{kljn} = 2 i^k (−1)^{n+k+1} π² Γ(l+1−α) c_{nkl} / ((n−1)! Γ((j+l−k−α)/2 + n)).
pub fn d_multiplier(k: u32, l: u32, j: u32, n: u32) -> Result<AlphaExpression> {
    let c = c_multiplier(n, k, l)?;
    let (ki, li, ji, ni) = (k as i64, l as i64, j as i64, n as i64);
    let sign = if (ni + ki + 1) % 2 == 0 { 2 } else { -2 };
    let s = BigRational::new(BigInt::from(sign), factorial(ni - 1));
    let mut out = c.scaled(&s, (k % 4) as u8);
    out.pi_exp = ri(2);
    out.gamma_num.push(Affine::int(li + 1, -1));
    out.gamma_den.push(Affine::new(Rational64::new(ji + li - ki, 2) + ni, Rational64::new(-1, 2)));
    Ok(out)
}

/// d-multiplier from a four-digit index "kljn".
pub fn d_code(code: &str) -> Result<AlphaExpression> {
    let digits: Vec<u32> = code.chars().filter_map(|c| c.to_digit(10)).collect();
    if digits.len() != 4 || code.len() != 4 {
        return Err(Error::InvalidInput(format!("bad d index {code:?}")));
    }
    d_multiplier(digits[0], digits[1], digits[2], digits[3])
}

/// Turns an integrated symbol into the bracket multiplying (4π)^{−m/2} in a
/// heat coefficient: the 1/(2π)^{m+1} prefactor, the π^{(m−1)/2} Gaussian
/// factor and the overall minus. Independent of m.
pub fn heat_normalization(x: Complex64, m: usize) -> Complex64 {
    let m = m as f64;
    -x * PI.powf(0.5 * (m - 1.0)) * (4.0 * PI).powf(0.5 * m) / (2.0 * PI).powf(m + 1.0)
}

/// One tabulated entry: (num/den)·i^q·d_code.
#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    pub num: i64,
    pub den: i64,
    pub i_power: u8,
    pub code: &'static str,
}

const fn te(num: i64, den: i64, i_power: u8, code: &'static str) -> TableEntry {
    TableEntry { num, den, i_power, code }
}

/// Five-term combination in the h_{−3} integral.
pub const H3_TABLE: [TableEntry; 5] = [
    te(-1, 2, 1, "1002"),
    te(1, 4, 0, "0101"),
    te(-1, 1, 1, "1003"),
    te(-1, 8, 0, "0121"),
    te(-1, 8, 0, "0211"),
];

/// Coefficient of g̃^{ab}g̃^{cd}g̃_{ab,r}g̃_{cd,r} in the h_{−4} integral.
pub const TRACE_SQUARE_TABLE: [TableEntry; 22] = [
    te(-1, 4, 0, "2003"),
    te(1, 4, 0, "0003"),
    te(-3, 2, 0, "2004"),
    te(1, 2, 0, "0004"),
    te(-3, 1, 0, "2005"),
    te(3, 128, 0, "0151"),
    te(1, 64, 0, "0151"),
    te(1, 8, 1, "1123"),
    te(1, 16, 1, "1122"),
    te(-1, 4, 1, "1103"),
    te(-1, 8, 1, "1102"),
    te(-1, 32, 0, "0111"),
    te(3, 128, 0, "0241"),
    te(1, 64, 0, "0241"),
    te(1, 8, 1, "1213"),
    te(1, 32, 0, "0201"),
    te(-3, 64, 0, "0221"),
    te(1, 16, 1, "1212"),
    te(1, 64, 0, "0221"),
    te(5, 192, 0, "0331"),
    te(-1, 32, 0, "0311"),
    te(1, 128, 0, "0421"),
];

/// Coefficient of g̃^{ab}g̃^{cd}g̃_{ac,r}g̃_{bd,r}.
pub const CROSS_TABLE: [TableEntry; 18] = [
    te(1, 1, 0, "2003"),
    te(-1, 1, 0, "0003"),
    te(4, 1, 0, "2004"),
    te(1, 1, 0, "0004"),
    te(-6, 1, 0, "2005"),
    te(3, 64, 0, "0151"),
    te(1, 32, 0, "0151"),
    te(1, 4, 1, "1123"),
    te(-1, 8, 0, "0131"),
    te(1, 8, 0, "0111"),
    te(3, 64, 0, "0241"),
    te(1, 32, 0, "0241"),
    te(1, 4, 1, "1213"),
    te(-1, 8, 0, "0221"),
    te(1, 8, 0, "0201"),
    te(5, 96, 0, "0331"),
    te(-1, 12, 0, "0311"),
    te(1, 64, 0, "0421"),
];

/// Coefficient of g̃^{ab}g̃_{ab,rr}.
pub const SECOND_DERIVATIVE_TABLE: [TableEntry; 8] = [
    te(-1, 1, 0, "2003"),
    te(1, 2, 0, "0003"),
    te(-2, 1, 0, "2004"),
    te(1, 16, 0, "0131"),
    te(-1, 8, 0, "0111"),
    te(1, 16, 0, "0221"),
    te(-1, 8, 0, "0201"),
    te(1, 24, 0, "0311"),
];

/// Expand a table into its scaled d-multipliers.
pub fn combination(table: &[TableEntry]) -> Result<Vec<AlphaExpression>> {
    table
        .iter()
        .map(|e| {
            let s = BigRational::new(BigInt::from(e.num), BigInt::from(e.den));
            Ok(d_code(e.code)?.scaled(&s, e.i_power))
        })
        .collect()
}

/// Σ of a combination at α; `None` if any term is undefined there.
pub fn eval_sum(terms: &[AlphaExpression], alpha: f64) -> Option<Complex64> {
    terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| Some(acc + t.eval_real(alpha)?))
}

/// Metric-contraction channels of the h_{−4} integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    TraceSquare,
    Cross,
    SecondDerivative,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::TraceSquare, Channel::Cross, Channel::SecondDerivative];

    pub fn table(self) -> &'static [TableEntry] {
        match self {
            Channel::TraceSquare => &TRACE_SQUARE_TABLE,
            Channel::Cross => &CROSS_TABLE,
            Channel::SecondDerivative => &SECOND_DERIVATIVE_TABLE,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::TraceSquare => "trace_square",
            Channel::Cross => "cross",
            Channel::SecondDerivative => "second_derivative",
        }
    }

    /// Normalized channel value in closed form.
    pub fn closed_form(self, alpha: f64) -> f64 {
        let g = gamma_r(0.5 * (1.0 - alpha));
        match self {
            Channel::TraceSquare => (3.0 * alpha * alpha - 16.0 * alpha - 27.0) / (384.0 * (alpha - 6.0)) * g,
            Channel::Cross => 5.0 * (9.0 + 4.0 * alpha - alpha * alpha) / (192.0 * (alpha - 6.0)) * g,
            Channel::SecondDerivative => (alpha + 3.0) / 48.0 * g,
        }
    }
}

fn gamma_r(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// One identity evaluated at one α.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolCheck {
    pub identity: String,
    pub alpha: f64,
    pub computed: f64,
    pub computed_imag: f64,
    pub expected: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when a Γ factor sits on a pole; such points are not counted.
    pub skipped: bool,
}

fn record(identity: &str, alpha: f64, computed: Option<Complex64>, expected: f64, tolerance: f64) -> SymbolCheck {
    match computed {
        Some(v) if expected.is_finite() && v.re.is_finite() => {
            let deviation = rel_dev(v, Complex64::new(expected, 0.0));
            SymbolCheck {
                identity: identity.to_string(),
                alpha,
                computed: v.re,
                computed_imag: v.im,
                expected,
                deviation,
                tolerance,
                passed: deviation <= tolerance,
                skipped: false,
            }
        }
        _ => SymbolCheck {
            identity: identity.to_string(),
            alpha,
            computed: f64::NAN,
            computed_imag: f64::NAN,
            expected,
            deviation: f64::NAN,
            tolerance,
            passed: true,
            skipped: true,
        },
    }
}

fn kappa_value(alpha: f64) -> f64 {
    0.5 * gamma_r(0.5 * (1.0 - alpha))
}

const M: usize = 2;

/// d_{0001} against the duplication-formula closed form, and κ̄_α = κ_α.
pub fn verify_h2(alpha: f64) -> Result<Vec<SymbolCheck>> {
    let d = d_multiplier(0, 0, 0, 1)?.eval_real(alpha);
    let closed = PI.powf(1.5) * gamma_r(0.5 * (1.0 - alpha));
    let kappa_bar = d.map(|v| -heat_normalization(v, M));
    Ok(vec![
        record("h2_duplication", alpha, d, closed, SAMPLE_TOLERANCE),
        record("kappa_bar", alpha, kappa_bar, kappa_value(alpha), KAPPA_TOLERANCE),
    ])
}

/// The h_{−3} combination and the recovered κ¹_α.
pub fn verify_h3(alpha: f64) -> Result<Vec<SymbolCheck>> {
    let x = eval_sum(&combination(&H3_TABLE)?, alpha);
    let closed = PI.powf(1.5) * (alpha - 4.0) / (4.0 * (3.0 - alpha)) * gamma_r(0.5 * (2.0 - alpha));
    // g̃^{ab}_{,r}g̃_{ab} contributes twice the mean-curvature trace
    let kappa1 = x.map(|v| heat_normalization(2.0 * v, M));
    let expected = 0.5 * gamma_r(0.5 * (2.0 - alpha)) * (alpha - 4.0) / (2.0 * (alpha - 3.0));
    Ok(vec![
        record("h3_combination", alpha, x, closed, SAMPLE_TOLERANCE),
        record("kappa1", alpha, kappa1, expected, KAPPA_TOLERANCE),
    ])
}

/// Recovered h_{−4} data at one α.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H4Result {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
    pub checks: Vec<SymbolCheck>,
}

/// Sum each channel, compare with its closed form, then map to κ³⁻⁵.
pub fn verify_h4(alpha: f64) -> Result<H4Result> {
    let mut checks = Vec::new();
    let mut values = [f64::NAN; 3];
    for (slot, ch) in Channel::ALL.into_iter().enumerate() {
        let v = eval_sum(&combination(ch.table())?, alpha).map(|x| heat_normalization(x, M));
        let rec = record(ch.name(), alpha, v, ch.closed_form(alpha), SAMPLE_TOLERANCE);
        values[slot] = rec.computed;
        checks.push(rec);
    }
    let [c, b, a] = values;
    let k = kappa_value(alpha);
    let kappa3 = -2.0 * (a - k / 6.0);
    let kappa4 = 4.0 * (c - k / 24.0);
    let kappa5 = 4.0 * (b + k / 8.0 - kappa3 / 4.0);
    let g = gamma_r(0.5 * (1.0 - alpha));
    let printed = [
        -(alpha - 1.0) / 24.0 * g,
        (7.0 - 8.0 * alpha + alpha * alpha) / (32.0 * (alpha - 6.0)) * g,
        (6.0 * alpha - 5.0 - alpha * alpha) / (16.0 * (alpha - 6.0)) * g,
    ];
    for (name, got, want) in [("kappa3", kappa3, printed[0]), ("kappa4", kappa4, printed[1]), ("kappa5", kappa5, printed[2])] {
        let got = got.is_finite().then(|| Complex64::new(got, 0.0));
        checks.push(record(name, alpha, got, want, KAPPA_TOLERANCE));
    }
    Ok(H4Result { alpha, a, b, c, kappa3, kappa4, kappa5, checks })
}

/// All identities over the canonical samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolsReport {
    pub alphas: Vec<f64>,
    pub checks: Vec<SymbolCheck>,
    pub h4: Vec<H4Result>,
    pub passed: bool,
}

pub fn symbols_report() -> Result<SymbolsReport> {
    let mut checks = Vec::new();
    let mut h4 = Vec::new();
    for &alpha in &CANONICAL_ALPHAS {
        checks.extend(verify_h2(alpha)?);
        checks.extend(verify_h3(alpha)?);
        let r = verify_h4(alpha)?;
        checks.extend(r.checks.iter().cloned());
        h4.push(r);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SymbolsReport { alphas: CANONICAL_ALPHAS.to_vec(), checks, h4, passed })
}

/// Exact value helper for tests and reports.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
