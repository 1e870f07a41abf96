//! Minimal double-double arithmetic (about 32 significant digits).
//!
//! Used where an alternating series cancels many digits, notably the power
//! series of the one-gap odd moments for larger orders.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// √π
    pub const SQRT_PI: Dd = Dd {
        hi: 1.772453850905516,
        lo: -7.666586499825799e-17,
    };

    pub fn new(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step from the f64 root
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Dd { hi, lo }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd::new(v)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

// Asymptotic coefficients of Γ(y + 1/2) / (Γ(y) √y) in powers of 1/y.
// All denominators are powers of two, so every coefficient is exact.
const HALF_SHIFT_ASYMPTOTIC: [f64; 11] = [
    1.0,
    -1.0 / 8.0,
    1.0 / 128.0,
    5.0 / 1024.0,
    -21.0 / 32768.0,
    -399.0 / 262144.0,
    869.0 / 4194304.0,
    39325.0 / 33554432.0,
    -334477.0 / 2147483648.0,
    -28717403.0 / 17179869184.0,
    59697183.0 / 274877906944.0,
];

const HALF_SHIFT_START: f64 = 1000.0;

/// Γ(y + 1/2) / Γ(y) for `y > 0`, to double-double accuracy.
///
/// The argument is raised past [`HALF_SHIFT_START`] with the exact
/// recurrence `q(y) = q(y+1) · y / (y + 1/2)`, where the asymptotic series
/// converges to well below double-double roundoff.
pub(crate) fn half_shift_gamma_ratio(y: f64) -> Dd {
    debug_assert!(y > 0.0);
    let steps = if y < HALF_SHIFT_START {
        (HALF_SHIFT_START - y).ceil() as u32
    } else {
        0
    };
    let mut product = Dd::ONE;
    for j in 0..steps {
        let yj = Dd::new(y).add_f64(f64::from(j));
        product = product * (yj / yj.add_f64(0.5));
    }
    let big = Dd::new(y).add_f64(f64::from(steps));
    let inv = Dd::ONE / big;
    let mut series = Dd::ZERO;
    for &c in HALF_SHIFT_ASYMPTOTIC.iter().rev() {
        series = series * inv + Dd::new(c);
    }
    big.sqrt() * series * product
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beats_f64() {
        let third = Dd::ONE / Dd::new(3.0);
        let back = third.mul_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);

        let two = Dd::new(2.0).sqrt();
        let sq = two * two - Dd::new(2.0);
        assert!(sq.to_f64().abs() < 1e-30);

        let s = Dd::SQRT_PI * Dd::SQRT_PI;
        assert!((s.hi - std::f64::consts::PI).abs() < 1e-15);
        // π's double-double low word
        assert!((s.lo - 1.2246467991473532e-16).abs() < 1e-30);
    }

    #[test]
    fn half_shift_ratio_known_values() {
        // Γ(1)/Γ(1/2) = 1/√π
        let q = half_shift_gamma_ratio(0.5);
        let err = q * Dd::SQRT_PI - Dd::ONE;
        assert!(err.to_f64().abs() < 1e-28, "{:e}", err.to_f64());

        // Γ(3/2)/Γ(1) = √π/2
        let q = half_shift_gamma_ratio(1.0);
        let err = q.mul_f64(2.0) - Dd::SQRT_PI;
        assert!(err.to_f64().abs() < 1e-28, "{:e}", err.to_f64());

        // Γ(7/2)/Γ(3) = (15/8)√π / 2
        let q = half_shift_gamma_ratio(3.0);
        let err = q.mul_f64(16.0) - Dd::SQRT_PI.mul_f64(15.0);
        assert!(err.to_f64().abs() < 1e-27, "{:e}", err.to_f64());
    }
}
