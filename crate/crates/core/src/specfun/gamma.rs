use std::f64::consts::PI;
use std::ops::{Div, Mul, Neg};

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Products and quotients of Gamma values are formed here and exponentiated
/// once, so intermediate factors may lie far outside the `f64` range.
/// A zero sign represents exactly zero; `log_magnitude` is then ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl SignedLogValue {
    pub const ZERO: Self = SignedLogValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: Self = SignedLogValue {
        log_magnitude: 0.0,
        sign: 1,
    };

    pub fn new(log_magnitude: f64, sign: i8) -> Self {
        if sign == 0 {
            return Self::ZERO;
        }
        SignedLogValue {
            log_magnitude,
            sign: sign.signum(),
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn value(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Reciprocal. The reciprocal of zero is reported as `+inf` magnitude
    /// with positive sign.
    pub fn recip(self) -> Self {
        if self.sign == 0 {
            return SignedLogValue {
                log_magnitude: f64::INFINITY,
                sign: 1,
            };
        }
        SignedLogValue {
            log_magnitude: -self.log_magnitude,
            sign: self.sign,
        }
    }

    /// `self^p` for a positive base. Panics in debug builds on a negative base.
    pub fn powf(self, p: f64) -> Self {
        debug_assert!(self.sign >= 0, "powf of a negative SignedLogValue");
        if self.sign == 0 {
            return if p > 0.0 { Self::ZERO } else { Self::ONE };
        }
        SignedLogValue {
            log_magnitude: self.log_magnitude * p,
            sign: 1,
        }
    }
}

impl Mul for SignedLogValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        SignedLogValue {
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for SignedLogValue {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for SignedLogValue {
    type Output = Self;
    fn neg(self) -> Self {
        SignedLogValue {
            log_magnitude: self.log_magnitude,
            sign: -self.sign,
        }
    }
}

impl std::iter::Product for SignedLogValue {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |acc, v| acc * v)
    }
}

/// `sin(πx)` with exact argument reduction, so integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // r in [-1, 1]
    let r = x - 2.0 * (0.5 * x).round();
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

// Lanczos approximation with g = 6.024680040776729583740234375 in rational
// form S(x) = NUM(x)/DEN(x); relative error below 1e-15 on x > 0.
#[allow(clippy::excessive_precision)]
const LANCZOS_G_MINUS_HALF: f64 = 5.524680040776729583740234375;
#[allow(clippy::excessive_precision)]
const LANCZOS_NUM: [f64; 13] = [
    23531376880.410759688572007674451636754734846804940,
    42919803642.649098768957899047001988850926355848959,
    35711959237.355668049440185451547166705960488635843,
    17921034426.037209699919755754458931112671403265390,
    6039542586.3520280050642916443072979210699388420708,
    1439720407.3117216736632230727949123939715485786772,
    248874557.86205415651146038641322942321632125127801,
    31426415.585400194380614231628318205362874684987640,
    2876370.6289353724412254090516208496135991145378768,
    186056.26539522349504029498971604569928220784236328,
    8071.6720023658162106380029022722506138218516325024,
    210.82427775157934587250973392071336271166969580291,
    2.5066282746310002701649081771338373386264310793408,
];
#[allow(clippy::excessive_precision)]
const LANCZOS_DEN: [f64; 13] = [
    0.0,
    39916800.0,
    120543840.0,
    150917976.0,
    105258076.0,
    45995730.0,
    13339535.0,
    2637558.0,
    357423.0,
    32670.0,
    1925.0,
    66.0,
    1.0,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    if x < 8.0 {
        for i in (0..LANCZOS_NUM.len()).rev() {
            num = num * x + LANCZOS_NUM[i];
            den = den * x + LANCZOS_DEN[i];
        }
    } else {
        let inv = 1.0 / x;
        for i in 0..LANCZOS_NUM.len() {
            num = num * inv + LANCZOS_NUM[i];
            den = den * inv + LANCZOS_DEN[i];
        }
    }
    num / den
}

/// Returns `(y, dy)` with `y = fl(x + g - 1/2)` and `dy` its rounding
/// error, so that `x + g - 1/2 = y - dy` exactly.
fn shifted_base(x: f64) -> (f64, f64) {
    let y = x + LANCZOS_G_MINUS_HALF;
    let dy = if x > LANCZOS_G_MINUS_HALF {
        (y - x) - LANCZOS_G_MINUS_HALF
    } else {
        (y - LANCZOS_G_MINUS_HALF) - x
    };
    (y, dy)
}

const FACTORIALS: [f64; 23] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
    51090942171709440000.0,
    1124000727777607680000.0,
];

/// Γ(x) for `0 < x < 171.6`, where the value is finite.
fn gamma_positive(x: f64) -> f64 {
    if x == x.floor() && x <= FACTORIALS.len() as f64 {
        return FACTORIALS[x as usize - 1];
    }
    if x < f64::EPSILON {
        return 1.0 / x;
    }
    let (y, dy) = shifted_base(x);
    let mut r = lanczos_sum(x) * (-y).exp();
    r += dy * (LANCZOS_G_MINUS_HALF + 0.5) * r / y;
    // y^(x - 1/2) split in two halves to stay finite up to x ≈ 171.6
    let half_power = y.powf(0.5 * (x - 0.5));
    r * half_power * half_power
}

/// ln Γ(x) for large positive `x`, where Γ(x) itself overflows.
fn log_gamma_positive_large(x: f64) -> f64 {
    let (y, dy) = shifted_base(x);
    lanczos_sum(x).ln() - y + (x - 0.5) * y.ln() + (dy * (LANCZOS_G_MINUS_HALF + 0.5) / y).ln_1p()
}

fn log_gamma_positive(x: f64) -> f64 {
    if x < 171.0 {
        gamma_positive(x).ln()
    } else {
        log_gamma_positive_large(x)
    }
}

/// `ln|Γ(x)|` together with the sign of Γ(x).
///
/// Positive arguments use a Lanczos approximation; negative arguments use
/// the reflection `Γ(x) Γ(1-x) = π / sin(πx)` with the sign taken from
/// `sin(πx)`.
pub fn log_gamma(x: f64) -> Result<SignedLogValue> {
    if x.is_nan() {
        return Err(Error::domain("log_gamma of NaN"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole { at: x });
    }
    if x == f64::INFINITY {
        return Ok(SignedLogValue::new(f64::INFINITY, 1));
    }
    if x > 0.0 {
        return Ok(SignedLogValue::new(log_gamma_positive(x), 1));
    }
    let s = sin_pi(x);
    let log_mag = PI.ln() - s.abs().ln() - log_gamma_positive(1.0 - x);
    Ok(SignedLogValue::new(log_mag, if s > 0.0 { 1 } else { -1 }))
}

/// Γ(x) as a plain `f64` (may overflow to infinity).
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x < 171.0 {
        return Ok(gamma_positive(x));
    }
    if x < 0.0 && x > -170.0 && x != x.floor() {
        return Ok(PI / (sin_pi(x) * gamma_positive(1.0 - x)));
    }
    log_gamma(x).map(SignedLogValue::value)
}

/// Rising factorial `a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
///
/// Formed as a direct product, so a vanishing factor gives an exact zero.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).map(|j| a + f64::from(j)).product()
}

/// `(a)_n` as a [`SignedLogValue`], accumulated factor by factor.
pub fn log_pochhammer(a: f64, n: u32) -> SignedLogValue {
    (0..n)
        .map(|j| SignedLogValue::from_value(a + f64::from(j)))
        .product()
}

/// `Π Γ(num_i) / Π Γ(den_j)` in log space.
///
/// A pole in the denominator contributes a zero factor (1/Γ vanishes there);
/// a pole in the numerator is an error.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<SignedLogValue> {
    let mut acc = SignedLogValue::ONE;
    for &x in num {
        acc = acc * log_gamma(x)?;
    }
    for &x in den {
        match log_gamma(x) {
            Ok(g) => acc = acc / g,
            Err(Error::Pole { .. }) => return Ok(SignedLogValue::ZERO),
            Err(e) => return Err(e),
        }
    }
    Ok(acc)
}
