//! Moment evaluators: closed forms from Gamma ratios and ₂F₁, the one-gap
//! power series in `b`, and dispatch to quadrature.
//!
//! Functions named `*_moment(n, ...)` on E₂ and E₄ take the half-order:
//! the even evaluators return the moment of `cos^{2n} φ`, the odd ones that
//! of `cos^{2n+1} φ`. [`moment`] takes the literal power.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{check_mu, e4_is_degenerate, MomentQuery, SetKind};
use crate::quadrature::{moment_by_quadrature, QuadratureSpec};
use crate::specfun::dd::{half_shift_gamma_ratio, Dd};
use crate::specfun::{
    gamma_ratio, gauss_2f1_complement, log_pochhammer, SignedLogValue, DEFAULT_TOL,
    MAX_SERIES_TERMS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Series,
    Quadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::Series => "series",
            Method::Quadrature => "quad",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "closed" | "closedform" => Ok(Method::ClosedForm),
            "series" => Ok(Method::Series),
            "quad" | "quadrature" => Ok(Method::Quadrature),
            other => Err(Error::domain(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub value: f64,
    pub method: Method,
    /// Absolute error estimate.
    pub error_estimate: f64,
    /// Series terms or quadrature nodes used; 0 for closed forms.
    pub terms_or_nodes: usize,
}

impl MomentValue {
    fn closed(value: f64, rel: f64) -> Self {
        MomentValue {
            value,
            method: Method::ClosedForm,
            error_estimate: rel * value.abs(),
            terms_or_nodes: 0,
        }
    }
}

// Relative error budget of an assembled Gamma ratio.
const GAMMA_REL: f64 = 16.0 * f64::EPSILON;

/// `∫_{-1}^{1} x^n (1-x²)^(μ-1/2) dx`
pub fn full_range_moment(n: u32, mu: f64) -> Result<MomentValue> {
    check_mu(mu)?;
    if n % 2 == 1 {
        return Ok(MomentValue::closed(0.0, 0.0));
    }
    let m = f64::from(n / 2);
    let v = gamma_ratio(&[m + 0.5, mu + 0.5], &[m + mu + 1.0])?.value();
    Ok(MomentValue::closed(v, GAMMA_REL))
}

/// `∫_0^1 x^n (1-x²)^(μ-1/2) dx = Γ(n/2+1/2) Γ(μ+1/2) / (2 Γ(n/2+μ+1))`
pub fn half_range_moment(n: u32, mu: f64) -> Result<MomentValue> {
    check_mu(mu)?;
    let h = 0.5 * f64::from(n);
    let v = 0.5 * gamma_ratio(&[h + 0.5, mu + 0.5], &[h + mu + 1.0])?.value();
    Ok(MomentValue::closed(v, GAMMA_REL))
}

/// The half-range moment through shifted factorials:
/// `(1/2) Γ(1/2)Γ(μ+1/2)/Γ(μ+1) (1/2)_k/(μ+1)_k` for `n = 2k` and
/// `(1/2) (1)_k / (μ+1/2)_{k+1}` for `n = 2k+1`.
pub fn half_range_moment_pochhammer(n: u32, mu: f64) -> Result<MomentValue> {
    check_mu(mu)?;
    let k = n / 2;
    let v = if n.is_multiple_of(2) {
        0.5 * (gamma_ratio(&[0.5, mu + 0.5], &[mu + 1.0])? * log_pochhammer(0.5, k)
            / log_pochhammer(mu + 1.0, k))
        .value()
    } else {
        0.5 * (log_pochhammer(1.0, k) / log_pochhammer(mu + 0.5, k + 1)).value()
    };
    Ok(MomentValue::closed(v, GAMMA_REL))
}

fn beta_pochhammer(n: u32, mu: f64) -> Result<SignedLogValue> {
    Ok(
        gamma_ratio(&[0.5, mu + 0.5], &[mu + 1.0])? * log_pochhammer(0.5, n)
            / log_pochhammer(mu + 1.0, n),
    )
}

/// Moment of `cos^{2n} φ` on E₂: `Γ(1/2)Γ(μ+1/2)/Γ(μ+1) (1/2)_n/(μ+1)_n`.
pub fn e2_even_moment(n: u32, mu: f64) -> Result<MomentValue> {
    check_mu(mu)?;
    Ok(MomentValue::closed(
        beta_pochhammer(n, mu)?.value(),
        GAMMA_REL,
    ))
}

/// Moment of `cos^{2n+1} φ` on E₂,
/// `b n! Γ(μ+1/2)/Γ(μ+n+3/2) ₂F₁(1/2, μ+1/2; μ+n+3/2; 1-b²)`.
pub fn e2_odd_moment_hyp(n: u32, mu: f64, b: f64) -> Result<MomentValue> {
    e2_odd_moment_hyp_tol(n, mu, b, DEFAULT_TOL)
}

fn e2_odd_moment_hyp_tol(n: u32, mu: f64, b: f64, tol: f64) -> Result<MomentValue> {
    check_mu(mu)?;
    SetKind::E2.check_gap(b)?;
    if b == 0.0 {
        return Ok(MomentValue::closed(0.0, 0.0));
    }
    let nf = f64::from(n);
    let c = mu + nf + 1.5;
    let pre = gamma_ratio(&[nf + 1.0, mu + 0.5], &[c])?.value();
    let f = gauss_2f1_complement(0.5, mu + 0.5, c, b * b, tol)?;
    Ok(MomentValue::closed(b * pre * f, GAMMA_REL + tol))
}

/// Moment of `cos^{2n+1} φ` on E₂ as the power series
///
/// ```text
/// Γ(1/2)/Γ(n+1+μ) Σ_{k≥1} (-1)^{k+1} (1-k/2)_n Γ(μ+k/2)/Γ(1/2+k/2) b^k
/// ```
///
/// where `(1-k/2)_n` is the polynomial reading of `Γ(n+1-k/2)/Γ(1-k/2)`.
/// The odd and even `k` are summed separately in double-double, since the
/// two halves cancel heavily for larger `n`, `μ` and `b`.
pub fn e2_odd_moment_series(n: u32, mu: f64, b: f64, tol: f64) -> Result<MomentValue> {
    check_mu(mu)?;
    SetKind::E2.check_gap(b)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain("series tolerance must be positive"));
    }
    let series = |x: f64| -> MomentValue {
        MomentValue {
            value: x,
            method: Method::Series,
            error_estimate: 0.0,
            terms_or_nodes: 0,
        }
    };
    if b == 0.0 {
        return Ok(series(0.0));
    }
    // Γ(μ+k/2)/Γ(1/2+k/2) is Γ(μ+1/2) (μ+1/2)_m/m! for k = 2m+1 and
    // Γ(μ+1/2) q (2/√π) (μ+1)_m/(3/2)_m for k = 2m+2, q = Γ(μ+1)/Γ(μ+1/2)
    let g = crate::specfun::gamma(mu + 0.5)?;
    let even_scale = (Dd::new(2.0) / Dd::SQRT_PI) * half_shift_gamma_ratio(mu + 0.5);
    let b_dd = Dd::new(b);
    let b2 = b_dd * b_dd;

    let mut odd_ratio = Dd::ONE;
    let mut even_ratio = Dd::ONE;
    let mut pow_odd = b_dd;
    let mut pow_even = b2;
    let mut sum_odd = Dd::ZERO;
    let mut sum_even = Dd::ZERO;
    let mut small = 0;
    let mut last = [0.0f64; 3];
    let mut k = 0usize;
    let mut m = 0u32;

    loop {
        let mf = f64::from(m);
        let poch_odd = (0..n).fold(Dd::ONE, |p, j| p.mul_f64(0.5 - mf + f64::from(j)));
        let poch_even = (0..n).fold(Dd::ONE, |p, j| p.mul_f64(f64::from(j) - mf));
        let t_odd = poch_odd * odd_ratio * pow_odd;
        let t_even = even_scale * poch_even * even_ratio * pow_even;
        sum_odd = sum_odd + t_odd;
        sum_even = sum_even + t_even;
        let total = g * (sum_odd - sum_even).to_f64();
        let thresh = tol * total.abs().max(1.0);

        for t in [t_odd, t_even] {
            k += 1;
            let tv = g * t.to_f64().abs();
            if !tv.is_finite() {
                return Err(Error::Convergence {
                    partial: total,
                    count: k,
                });
            }
            last = [last[1], last[2], tv];
            // (1-k/2)_n is not yet in its growing regime before m reaches n
            if tv < thresh && m >= n {
                small += 1;
            } else {
                small = 0;
            }
        }
        if small >= 3 {
            break;
        }
        if k >= MAX_SERIES_TERMS {
            let pre = gamma_ratio(&[0.5], &[f64::from(n) + 1.0 + mu])?.value();
            return Err(Error::Convergence {
                partial: pre * total,
                count: k,
            });
        }

        odd_ratio = odd_ratio.mul_f64(mu + 0.5 + mf) / Dd::new(mf + 1.0);
        even_ratio = even_ratio.mul_f64(mu + 1.0 + mf) / Dd::new(mf + 1.5);
        pow_odd = pow_odd * b2;
        pow_even = pow_even * b2;
        m += 1;
    }

    let pre = gamma_ratio(&[0.5, mu + 0.5], &[f64::from(n) + 1.0 + mu])?.value();
    let value = pre * (sum_odd - sum_even).to_f64();
    // tail bounded by a geometric continuation of the last term
    let tail = pre / g * last[2] * b * b / ((1.0 - b) * (1.0 + b));
    Ok(MomentValue {
        value,
        method: Method::Series,
        error_estimate: tail + GAMMA_REL * value.abs(),
        terms_or_nodes: k,
    })
}

/// Moment of `cos^{2n} φ` on E₄. Equal to the E₂ value and independent of `b`.
pub fn e4_even_moment(n: u32, mu: f64) -> Result<MomentValue> {
    e2_even_moment(n, mu)
}

/// `2b² - 1` without cancellation near `b = 1/√2`.
fn two_b2_minus_one(b: f64) -> f64 {
    let p = b * b;
    let e = b.mul_add(b, -p);
    (2.0 * p - 1.0) + 2.0 * e
}

fn check_e4_odd(mu: f64, b: f64) -> Result<()> {
    check_mu(mu)?;
    SetKind::E4.check_gap(b)
}

/// Moment of `cos^{2n+1} φ` on E₄,
///
/// ```text
/// (b - √(1-b²))² n!/(μ+1/2)_{n+1} ₂F₁(1/2, μ+1/2; μ+n+3/2; 4b²(1-b²))
/// ```
///
/// Zero at the closed-gap value `b = 1/√2`.
pub fn e4_odd_moment(n: u32, mu: f64, b: f64) -> Result<MomentValue> {
    e4_odd_moment_tol(n, mu, b, DEFAULT_TOL)
}

fn e4_odd_moment_tol(n: u32, mu: f64, b: f64, tol: f64) -> Result<MomentValue> {
    check_e4_odd(mu, b)?;
    if e4_is_degenerate(b) {
        return Ok(MomentValue::closed(0.0, 0.0));
    }
    let c = (1.0 - b) * (1.0 + b);
    let c = c.sqrt();
    let d = two_b2_minus_one(b);
    // b - c = (2b²-1)/(b+c), 1 - 4b²c² = (2b²-1)²
    let gap = d / (b + c);
    let nf = f64::from(n);
    let f = gauss_2f1_complement(0.5, mu + 0.5, mu + nf + 1.5, d * d, tol)?;
    let v = gap * gap * e4_odd_limit_b_to_one(n, mu)? * f;
    Ok(MomentValue::closed(v, GAMMA_REL + tol))
}

/// The E₄ odd moment before the Pfaff step,
/// `((b-c)/(b+c)) n!/(μ+1/2)_{n+1} ₂F₁(1/2, n+1; μ+n+3/2; ζ)` with
/// `ζ = -4b²c²/(2b²-1)²`, `c = √(1-b²)`.
pub fn e4_odd_moment_pre_pfaff(n: u32, mu: f64, b: f64) -> Result<MomentValue> {
    check_e4_odd(mu, b)?;
    if e4_is_degenerate(b) {
        return Ok(MomentValue::closed(0.0, 0.0));
    }
    let c = ((1.0 - b) * (1.0 + b)).sqrt();
    let d = two_b2_minus_one(b);
    let nf = f64::from(n);
    let f = gauss_2f1_complement(0.5, nf + 1.0, mu + nf + 1.5, 1.0 / (d * d), DEFAULT_TOL)?;
    let v = d / ((b + c) * (b + c)) * e4_odd_limit_b_to_one(n, mu)? * f;
    Ok(MomentValue::closed(v, GAMMA_REL + DEFAULT_TOL))
}

/// `(1)_n / (μ+1/2)_{n+1}`, the E₄ odd moment as `b → 1`.
pub fn e4_odd_limit_b_to_one(n: u32, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok((log_pochhammer(1.0, n) / log_pochhammer(mu + 0.5, n + 1)).value())
}

/// Gap value at which the E₄ gaps close.
pub const E4_CLOSED_GAP: f64 = FRAC_1_SQRT_2;

/// Tolerances for [`moment_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentOptions {
    /// Relative tolerance of series and ₂F₁ evaluations.
    pub tol: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            tol: DEFAULT_TOL,
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Evaluates `q` by `method` with default tolerances.
pub fn moment(q: &MomentQuery, method: Method) -> Result<MomentValue> {
    moment_with(q, method, &MomentOptions::default())
}

pub fn moment_with(q: &MomentQuery, method: Method, opts: &MomentOptions) -> Result<MomentValue> {
    q.validate()?;
    let unavailable = || Error::MethodUnavailable {
        method: method.name(),
        family: family_name(q),
    };
    if method == Method::Quadrature {
        return moment_by_quadrature(q, &opts.quadrature);
    }
    let half = q.n / 2;
    let odd = q.n % 2 == 1;
    match (q.kind, method, odd) {
        (SetKind::FullRange, Method::ClosedForm, _) => full_range_moment(q.n, q.mu),
        (SetKind::HalfRange, Method::ClosedForm, _) => half_range_moment(q.n, q.mu),
        (SetKind::E2 | SetKind::E4, Method::ClosedForm, false) => e2_even_moment(half, q.mu),
        (SetKind::E2, Method::ClosedForm, true) => e2_odd_moment_hyp_tol(half, q.mu, q.b, opts.tol),
        (SetKind::E2, Method::Series, true) => e2_odd_moment_series(half, q.mu, q.b, opts.tol),
        (SetKind::E4, Method::ClosedForm, true) => e4_odd_moment_tol(half, q.mu, q.b, opts.tol),
        _ => Err(unavailable()),
    }
}

/// Short family label, such as `e4 odd`.
pub fn family_name(q: &MomentQuery) -> &'static str {
    let odd = q.n % 2 == 1;
    match (q.kind, odd) {
        (SetKind::FullRange, _) => "full range",
        (SetKind::HalfRange, _) => "half range",
        (SetKind::E2, false) => "e2 even",
        (SetKind::E2, true) => "e2 odd",
        (SetKind::E4, false) => "e4 even",
        (SetKind::E4, true) => "e4 odd",
    }
}
