use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense real polynomial, coefficients in ascending order.
///
/// Trailing zero coefficients are trimmed on construction, so the zero
/// polynomial has no coefficients and no degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x - r`
    pub fn linear(r: f64) -> Self {
        Self::new(vec![-r, 1.0])
    }

    /// `Π (x - r)` over `roots`; the constant 1 when `roots` is empty.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(1.0), |acc, &r| &acc * &Self::linear(r))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(c: Vec<f64>) -> Self {
        Polynomial::new(c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}x")?,
                _ => write!(f, "{a}x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Chebyshev polynomial of the first kind by the three-term recurrence.
pub fn chebyshev_t(n: usize) -> Polynomial {
    chebyshev(
        n,
        Polynomial::constant(1.0),
        Polynomial::new(vec![0.0, 1.0]),
    )
}

/// Chebyshev polynomial of the second kind by the three-term recurrence.
pub fn chebyshev_u(n: usize) -> Polynomial {
    chebyshev(
        n,
        Polynomial::constant(1.0),
        Polynomial::new(vec![0.0, 2.0]),
    )
}

fn chebyshev(n: usize, p0: Polynomial, p1: Polynomial) -> Polynomial {
    if n == 0 {
        return p0;
    }
    let two_x = Polynomial::new(vec![0.0, 2.0]);
    let (mut prev, mut cur) = (p0, p1);
    for _ in 1..n {
        let next = &(&two_x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}
