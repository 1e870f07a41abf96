//! Polynomial Pell equations of the gap sets and the mapping polynomials.
//!
//! A solution satisfies
//!
//! ```text
//! Π(x-αᵢ) P² - (x²-1) Π(x-βᵢ) Q² = Π(x-γᵢ)
//! ```
//!
//! For the classical case all three products are empty and the solutions
//! are `(T_n, U_{n-1})`. The gap sets E₂ and E₄ are the preimages of
//! `[-1, 1]` under the respective `P`.

mod polynomial;

pub use polynomial::{chebyshev_t, chebyshev_u, Polynomial};

use crate::error::{Error, Result};
use crate::geometry::{inner_edge, SetKind};

fn check_e2(b: f64) -> Result<()> {
    SetKind::E2.check_gap(b)
}

fn check_e4(b: f64) -> Result<()> {
    SetKind::E4.check_gap(b)
}

/// `b²(1-b²)`, with `1-b²` formed as `(1-b)(1+b)`.
fn bc_squared(b: f64) -> f64 {
    let c = inner_edge(b);
    b * b * c * c
}

/// Degree-two mapping of E₂, `(2x² - (1+b²)) / (1-b²)`.
pub fn make_p2_e2(b: f64) -> Result<Polynomial> {
    check_e2(b)?;
    let d = (1.0 - b) * (1.0 + b);
    Ok(Polynomial::new(vec![-(1.0 + b * b) / d, 0.0, 2.0 / d]))
}

/// `(2x + 2b) / (1-b²)`
pub fn make_q2_e2(b: f64) -> Result<Polynomial> {
    check_e2(b)?;
    let d = (1.0 - b) * (1.0 + b);
    Ok(Polynomial::new(vec![2.0 * b / d, 2.0 / d]))
}

/// Degree-four mapping of E₄, `(2x⁴ - 2x² + b²(1-b²)) / (b²(1-b²))`.
pub fn make_p4(b: f64) -> Result<Polynomial> {
    check_e4(b)?;
    let d = bc_squared(b);
    Ok(Polynomial::new(vec![1.0, 0.0, -2.0 / d, 0.0, 2.0 / d]))
}

/// `(2x / (b²(b²-1))) (x² + (b - √(1-b²))x - b√(1-b²))`.
///
/// Its leading coefficient has the opposite sign to that of [`make_p4`];
/// the Pell equation only sees `Q²`.
pub fn make_q4(b: f64) -> Result<Polynomial> {
    check_e4(b)?;
    let c = inner_edge(b);
    let k = -2.0 / bc_squared(b);
    Ok(Polynomial::new(vec![0.0, -b * c * k, (b - c) * k, k]))
}

/// Degree-two Pell polynomial of E₄, `(x-b)(x+√(1-b²)) / (b√(1-b²))`.
pub fn make_p2_e4(b: f64) -> Result<Polynomial> {
    check_e4(b)?;
    let c = inner_edge(b);
    let k = 1.0 / (b * c);
    Ok(Polynomial::new(vec![-1.0, (c - b) * k, k]))
}

/// `x / (b√(1-b²))`
pub fn make_q2_e4(b: f64) -> Result<Polynomial> {
    check_e4(b)?;
    let c = inner_edge(b);
    Ok(Polynomial::new(vec![0.0, 1.0 / (b * c)]))
}

/// Gap endpoints and γ-points of a Pell equation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PellData {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl PellData {
    /// `P² - (x²-1) Q² = 1`
    pub fn classical() -> Self {
        Self::default()
    }

    pub fn e2(b: f64) -> Self {
        PellData {
            alphas: vec![-b],
            betas: vec![b],
            gammas: vec![-b],
        }
    }

    pub fn e4_degree4(b: f64) -> Self {
        let c = inner_edge(b);
        PellData {
            alphas: vec![-b, c],
            betas: vec![b, -c],
            gammas: vec![-b, c],
        }
    }

    pub fn e4_degree2(b: f64) -> Self {
        let c = inner_edge(b);
        PellData {
            alphas: vec![-b, c],
            betas: vec![b, -c],
            gammas: vec![-c, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PellSolution {
    pub p: Polynomial,
    pub q: Polynomial,
    pub data: PellData,
}

impl PellSolution {
    /// `(T_n, U_{n-1})`; for `n = 0` the second member is zero.
    pub fn classical(n: usize) -> Self {
        let q = if n == 0 {
            Polynomial::zero()
        } else {
            chebyshev_u(n - 1)
        };
        PellSolution {
            p: chebyshev_t(n),
            q,
            data: PellData::classical(),
        }
    }

    pub fn e2(b: f64) -> Result<Self> {
        Ok(PellSolution {
            p: make_p2_e2(b)?,
            q: make_q2_e2(b)?,
            data: PellData::e2(b),
        })
    }

    pub fn e4_degree4(b: f64) -> Result<Self> {
        Ok(PellSolution {
            p: make_p4(b)?,
            q: make_q4(b)?,
            data: PellData::e4_degree4(b),
        })
    }

    pub fn e4_degree2(b: f64) -> Result<Self> {
        Ok(PellSolution {
            p: make_p2_e4(b)?,
            q: make_q2_e4(b)?,
            data: PellData::e4_degree2(b),
        })
    }

    fn sides(&self) -> (Polynomial, Polynomial, Polynomial) {
        let a = Polynomial::from_roots(&self.data.alphas);
        let s = &Polynomial::new(vec![-1.0, 0.0, 1.0]) * &Polynomial::from_roots(&self.data.betas);
        let lhs_p = &a * &(&self.p * &self.p);
        let lhs_q = &s * &(&self.q * &self.q);
        let rhs = Polynomial::from_roots(&self.data.gammas);
        (lhs_p, lhs_q, rhs)
    }

    /// `Π(x-αᵢ)P² - (x²-1)Π(x-βᵢ)Q² - Π(x-γᵢ)`
    pub fn residual(&self) -> Polynomial {
        let (lp, lq, r) = self.sides();
        &(&lp - &lq) - &r
    }

    /// Largest residual coefficient relative to the largest coefficient of
    /// the two terms on the left.
    pub fn relative_residual(&self) -> f64 {
        let (lp, lq, r) = self.sides();
        let res = &(&lp - &lq) - &r;
        let scale = lp.max_abs_coeff().max(lq.max_abs_coeff());
        if scale == 0.0 {
            res.max_abs_coeff()
        } else {
            res.max_abs_coeff() / scale
        }
    }
}

pub fn pell_residual(sol: &PellSolution) -> Polynomial {
    sol.residual()
}

fn check_z(z: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "mapping argument needs |z| <= 1, got z = {z}"
        )))
    }
}

/// Preimage of `z` under the E₂ mapping on branch 1 (`[-1,-b]`) or 2
/// (`[b,1]`).
pub fn branch_inverse_p2(i: usize, z: f64, b: f64) -> Result<f64> {
    check_e2(b)?;
    check_z(z)?;
    let r = (0.5 * ((1.0 + b * b) + z * (1.0 - b) * (1.0 + b))).sqrt();
    match i {
        1 => Ok(-r),
        2 => Ok(r),
        _ => Err(Error::domain(format!("E2 has branches 1 and 2, got {i}"))),
    }
}

/// Preimage of `z` under `P₄` on branch `i`, numbered left to right over
/// `[-1,-b]`, `[-√(1-b²),0]`, `[0,√(1-b²)]`, `[b,1]`.
pub fn branch_inverse_p4(i: usize, z: f64, b: f64) -> Result<f64> {
    check_e4(b)?;
    check_z(z)?;
    let k = (1.0 - z) * bc_squared(b);
    let s = (1.0 - 2.0 * k).max(0.0).sqrt();
    let outer = (0.5 * (1.0 + s)).sqrt();
    // (1 - s)/2 rewritten without cancellation
    let inner = (k / (1.0 + s)).sqrt();
    match i {
        1 => Ok(-outer),
        2 => Ok(-inner),
        3 => Ok(inner),
        4 => Ok(outer),
        _ => Err(Error::domain(format!("E4 has branches 1 to 4, got {i}"))),
    }
}

/// The residue ratios `Q(xᵢ)/P'(xᵢ)` at the preimages `xᵢ` of `z`, for the
/// E₂ mapping (`degree = 2`) or `P₄` (`degree = 4`).
///
/// `Q` is taken with the leading coefficient of `P`, so the weights sum
/// to one.
pub fn partial_fraction_weights(z: f64, b: f64, degree: usize) -> Result<Vec<f64>> {
    if !(z > -1.0 && z < 1.0) {
        return Err(Error::domain(format!(
            "partial-fraction weights need -1 < z < 1, got z = {z}"
        )));
    }
    match degree {
        2 => (1..=2)
            .map(|i| {
                let x = branch_inverse_p2(i, z, b)?;
                // Q₂/P₂' with the factor 2/(1-b²) cancelled
                Ok((x + b) / (2.0 * x))
            })
            .collect(),
        4 => {
            let c = inner_edge(b);
            (1..=4)
                .map(|i| {
                    let x = branch_inverse_p4(i, z, b)?;
                    // -Q₄/P₄' with the factor 2x/(b²(1-b²)) cancelled
                    Ok((x + b) * (x - c) / (2.0 * (2.0 * x * x - 1.0)))
                })
                .collect()
        }
        _ => Err(Error::domain(format!(
            "weights exist for degree 2 or 4, got {degree}"
        ))),
    }
}

/// `1 - 2(w₂+w₃)` in closed form,
/// `(1 - 2b√(1-b²)) / √(1 - 2b² + 2b⁴ + (2b² - 2b⁴)z)`.
pub fn middle_weight_deficit(z: f64, b: f64) -> Result<f64> {
    check_e4(b)?;
    check_z(z)?;
    let c = inner_edge(b);
    let s = (1.0 - 2.0 * (1.0 - z) * bc_squared(b)).sqrt();
    Ok((b - c) * (b - c) / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_coeffs(p: &Polynomial, want: &[f64], tol: f64) {
        assert_eq!(p.coeffs().len(), want.len(), "{p}");
        for (a, b) in p.coeffs().iter().zip(want) {
            assert!((a - b).abs() <= tol * b.abs().max(1.0), "{p} vs {want:?}");
        }
    }

    #[test]
    fn constructor_examples() {
        assert_coeffs(&make_p2_e2(0.0).unwrap(), &[-1.0, 0.0, 2.0], 0.0);
        assert_coeffs(&make_p2_e2(0.6).unwrap(), &[-2.125, 0.0, 3.125], 1e-15);
        assert_coeffs(&make_q2_e2(0.6).unwrap(), &[1.875, 3.125], 1e-15);
        assert_coeffs(
            &make_p4(0.8).unwrap(),
            &[1.0, 0.0, -8.680555555555555, 0.0, 8.680555555555555],
            1e-14,
        );
        assert_coeffs(&make_q2_e4(0.8).unwrap(), &[0.0, 2.0833333333333335], 1e-14);
        assert!(make_p2_e2(1.0).is_err());
        assert!(make_p4(0.5).is_err());
        assert!(make_q4(1.0).is_err());
    }

    #[test]
    fn p4_hits_minus_one_at_gap_edges() {
        let p = make_p4(0.8).unwrap();
        for x in [0.8, -0.8, 0.6, -0.6] {
            assert!((p.eval(x) + 1.0).abs() < 1e-14, "{}", p.eval(x));
        }
        assert!((p.eval(1.0) - 1.0).abs() < 1e-14);
        assert!((p.eval(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn residual_examples() {
        let sol = PellSolution::classical(5);
        assert!(sol.residual().max_abs_coeff() < 1e-12);
        let sol = PellSolution::e4_degree4(0.8).unwrap();
        assert!(sol.relative_residual() < 1e-10);
        let mut bad = sol.clone();
        bad.q = &bad.q + &Polynomial::constant(1.0);
        assert!(bad.residual().max_abs_coeff() > 0.1);
        assert!(PellSolution::e4_degree2(0.9).unwrap().relative_residual() < 1e-12);
        assert!(PellSolution::e2(0.6).unwrap().relative_residual() < 1e-12);
        assert!(PellSolution::classical(0).residual().is_zero());
    }

    #[test]
    fn branch_examples() {
        let b = 0.6;
        assert!((branch_inverse_p2(1, -1.0, b).unwrap() + b).abs() < 1e-15);
        assert!((branch_inverse_p2(1, 1.0, b).unwrap() + 1.0).abs() < 1e-15);
        assert!((branch_inverse_p2(2, 1.0, 0.6).unwrap() - 1.0).abs() < 1e-15);
        for b in [0.72, 0.8, 0.95] {
            let c = inner_edge(b);
            assert!((branch_inverse_p4(2, -1.0, b).unwrap() + c).abs() < 1e-14);
            assert_eq!(branch_inverse_p4(3, 1.0, b).unwrap(), 0.0);
            assert!((branch_inverse_p4(1, 1.0, b).unwrap() + 1.0).abs() < 1e-15);
        }
        assert!(branch_inverse_p4(1, 1.5, 0.8).is_err());
        assert!(branch_inverse_p4(5, 0.0, 0.8).is_err());
    }

    #[test]
    fn weight_examples() {
        let w = partial_fraction_weights(0.3, 0.8, 4).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-11);
        let w = partial_fraction_weights(0.0, 0.8, 4).unwrap();
        let want = 0.5 * (1.0 - 0.04 / (0.5392f64).sqrt());
        assert!((w[1] + w[2] - want).abs() < 1e-12, "{}", w[1] + w[2]);
        assert!((want - 0.4727632).abs() < 1e-7);
        let w = partial_fraction_weights(0.0, 0.5, 2).unwrap();
        assert!((w[0] + w[1] - 1.0).abs() < 1e-15);
        assert!(partial_fraction_weights(1.0, 0.8, 4).is_err());
        assert!(partial_fraction_weights(-1.0, 0.5, 2).is_err());
    }

    #[test]
    fn weights_match_polynomial_ratio() {
        // Q/P' evaluated from the constructed polynomials, sign-normalized
        for b in [0.75, 0.9] {
            let p = make_p4(b).unwrap();
            let q = -&make_q4(b).unwrap();
            let dp = p.derivative();
            for z in [-0.7, 0.1, 0.6] {
                let w = partial_fraction_weights(z, b, 4).unwrap();
                for (i, wi) in w.iter().enumerate() {
                    let x = branch_inverse_p4(i + 1, z, b).unwrap();
                    assert!((q.eval(x) / dp.eval(x) - wi).abs() < 1e-12);
                }
            }
            let p = make_p2_e2(b - 0.5).unwrap();
            let q = make_q2_e2(b - 0.5).unwrap();
            let w = partial_fraction_weights(0.2, b - 0.5, 2).unwrap();
            for (i, wi) in w.iter().enumerate() {
                let x = branch_inverse_p2(i + 1, 0.2, b - 0.5).unwrap();
                assert!((q.eval(x) / p.derivative().eval(x) - wi).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn deficit_examples() {
        let d = middle_weight_deficit(0.0, 0.8).unwrap();
        assert!((d - 0.04 / 0.5392f64.sqrt()).abs() < 1e-13);
        assert!((d - 0.054473).abs() < 1e-6);
        for b in [0.75, 0.8, 0.9] {
            let c = inner_edge(b);
            let one = middle_weight_deficit(1.0, b).unwrap();
            assert!((one - (1.0 - 2.0 * b * c)).abs() < 1e-14);
            let m = middle_weight_deficit(-1.0, b).unwrap();
            assert!((m - (1.0 - 2.0 * b * c) / (2.0 * b * b - 1.0)).abs() < 1e-13);
        }
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn branch_inverse_matches_root_finding() {
        let b = 0.85;
        let c = inner_edge(b);
        let p = make_p4(b).unwrap();
        let pieces = [(-1.0, -b), (-c, 0.0), (0.0, c), (b, 1.0)];
        for z in [-0.95, -0.3, 0.0, 0.4, 0.9] {
            for (i, &(lo, hi)) in pieces.iter().enumerate() {
                let root = bisect(|x| p.eval(x) - z, lo, hi);
                let x = branch_inverse_p4(i + 1, z, b).unwrap();
                assert!((x - root).abs() < 1e-12, "branch {} z {z}", i + 1);
            }
        }
    }
}
