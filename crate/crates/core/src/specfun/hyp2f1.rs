use crate::error::{Error, Result};
use crate::quadrature::{integrate_de_endpoint, QuadratureSpec};

use super::dd::Dd;
use super::gamma::{gamma_ratio, log_gamma};

/// Tolerance used by the moment evaluators.
pub const DEFAULT_TOL: f64 = 1e-15;

/// Hard cap on the number of series terms before reporting non-convergence.
pub const MAX_SERIES_TERMS: usize = 200_000;

// Parameter differences closer than this to an integer make the Gamma
// coefficients of the connection formulas cancel catastrophically; those
// cases stay on the (slower) direct series.
const INTEGER_GUARD: f64 = 1e-4;

// Above this |z| the direct series is replaced by a transformation.
const SERIES_RADIUS: f64 = 0.75;

/// Parameters of ₂F₁(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeometricParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        HypergeometricParams { a, b, c, z }
    }

    pub fn validate(&self) -> Result<()> {
        let HypergeometricParams { a, b, c, z } = *self;
        if ![a, b, c, z].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("hypergeometric parameters must be finite"));
        }
        if is_nonpositive_integer(c) {
            return Err(Error::domain(format!(
                "lower parameter c = {c} is zero or a negative integer"
            )));
        }
        if z > 1.0 {
            return Err(Error::domain(format!("argument z = {z} exceeds 1")));
        }
        if z == 1.0 && c - a - b <= 0.0 && !terminates(a, b) {
            return Err(Error::domain(format!(
                "series diverges at z = 1 since c - a - b = {} <= 0",
                c - a - b
            )));
        }
        Ok(())
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn terminates(a: f64, b: f64) -> bool {
    is_nonpositive_integer(a) || is_nonpositive_integer(b)
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < INTEGER_GUARD
}

/// ₂F₁(a, b; c; z) for real parameters and real `z <= 1`.
///
/// The direct power series is used for `|z| <= 0.75`. Larger positive
/// arguments go through the `1 - z` connection formula, arguments in
/// `[-3, -0.75)` through Pfaff's transformation, and arguments below `-3`
/// through the `1/z` connection formula. When a connection formula would be
/// degenerate (integer parameter difference) the direct series is summed
/// instead, which may then hit [`MAX_SERIES_TERMS`].
pub fn gauss_2f1(p: HypergeometricParams, tol: f64) -> Result<f64> {
    gauss_2f1_complement(p.a, p.b, p.c, 1.0 - p.z, tol)
}

/// Same as [`gauss_2f1`] but with the argument given through `1 - z`.
///
/// Near `z = 1` the complement is the quantity the connection formula
/// actually needs; callers that know it in closed form keep its full
/// relative precision this way.
pub fn gauss_2f1_complement(a: f64, b: f64, c: f64, one_minus_z: f64, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let z = 1.0 - one_minus_z;
    let p = HypergeometricParams::new(a, b, c, z);
    p.validate()?;
    if one_minus_z < 0.0 {
        return Err(Error::domain(format!(
            "argument z = 1 - ({one_minus_z}) exceeds 1"
        )));
    }

    if z == 0.0 {
        return Ok(1.0);
    }
    if terminates(a, b) && z >= -1.0 {
        return series(a, b, c, z, tol).map(|(s, _)| s);
    }
    if one_minus_z == 0.0 {
        return gauss_sum(a, b, c);
    }
    if z.abs() <= SERIES_RADIUS {
        return series(a, b, c, z, tol).map(|(s, _)| s);
    }
    if z > 0.0 {
        if !near_integer(c - a - b) {
            return connection_one_minus_z(a, b, c, one_minus_z, tol);
        }
        return series(a, b, c, z, tol).map(|(s, _)| s);
    }
    if z >= -3.0 {
        return pfaff(a, b, c, z, tol);
    }
    if !near_integer(b - a) {
        return connection_inverse_z(a, b, c, z, tol);
    }
    pfaff(a, b, c, z, tol)
}

/// Gauss's summation ₂F₁(a, b; c; 1) = Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b)).
fn gauss_sum(a: f64, b: f64, c: f64) -> Result<f64> {
    Ok(gamma_ratio(&[c, c - a - b], &[c - a, c - b])?.value())
}

/// (1-z)^(-a) ₂F₁(a, c-b; c; z/(z-1)).
fn pfaff(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<f64> {
    let w = z / (z - 1.0);
    series(a, c - b, c, w, tol).map(|(s, _)| s * (1.0 - z).powf(-a))
}

fn connection_one_minus_z(a: f64, b: f64, c: f64, omz: f64, tol: f64) -> Result<f64> {
    let s = c - a - b;
    let first_coeff = gamma_ratio(&[c, s], &[c - a, c - b])?;
    let second_coeff = gamma_ratio(&[c, -s], &[a, b])?;
    let mut total = 0.0;
    if !first_coeff.is_zero() {
        let (f, _) = series(a, b, 1.0 - s, omz, tol)?;
        total += first_coeff.value() * f;
    }
    if !second_coeff.is_zero() {
        let (f, _) = series(c - a, c - b, s + 1.0, omz, tol)?;
        total += second_coeff.value() * omz.powf(s) * f;
    }
    Ok(total)
}

fn connection_inverse_z(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<f64> {
    let w = 1.0 / z;
    let first_coeff = gamma_ratio(&[c, b - a], &[b, c - a])?;
    let second_coeff = gamma_ratio(&[c, a - b], &[a, c - b])?;
    let mut total = 0.0;
    if !first_coeff.is_zero() {
        let (f, _) = series(a, a - c + 1.0, a - b + 1.0, w, tol)?;
        total += first_coeff.value() * (-z).powf(-a) * f;
    }
    if !second_coeff.is_zero() {
        let (f, _) = series(b, b - c + 1.0, b - a + 1.0, w, tol)?;
        total += second_coeff.value() * (-z).powf(-b) * f;
    }
    Ok(total)
}

/// Direct power series. Stops once three consecutive terms are each below
/// `tol (1-|z|) max(1, |partial sum|)`; the factor `1-|z|` accounts for the
/// geometric tail beyond the last term. Returns the sum and the number of
/// terms.
///
/// Terms and sum are carried in double-double so that the rounding of the
/// term recurrence does not accumulate over long series.
fn series(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<(f64, usize)> {
    let tol = tol * (1.0 - z.abs()).clamp(1e-3, 1.0);
    let (a, b, c) = (Dd::new(a), Dd::new(b), Dd::new(c));
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut small = 0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term =
            (term * a.add_f64(kf) * b.add_f64(kf)).mul_f64(z) / (c.add_f64(kf).mul_f64(kf + 1.0));
        sum = sum + term;
        let s = sum.to_f64();
        if term.to_f64().abs() < tol * s.abs().max(1.0) {
            small += 1;
            if small == 3 {
                return Ok((s, k + 2));
            }
        } else {
            small = 0;
        }
        if !s.is_finite() {
            break;
        }
    }
    Err(Error::Convergence {
        partial: sum.to_f64(),
        count: MAX_SERIES_TERMS,
    })
}

/// ₂F₁ from Euler's integral
///
/// ```text
/// ₂F₁(a,b;c;z) = Γ(c) / (Γ(b)Γ(c-b)) ∫₀¹ u^(b-1) (1-u)^(c-b-1) (1-zu)^(-a) du
/// ```
///
/// evaluated by tanh-sinh quadrature. Valid for `c > b > 0` and `z < 1`.
/// Shares no code with [`gauss_2f1`] beyond `log_gamma`.
pub fn gauss_2f1_integral_oracle(p: HypergeometricParams, quad_tol: f64) -> Result<f64> {
    let HypergeometricParams { a, b, c, z } = p;
    if !(c > b && b > 0.0) {
        return Err(Error::domain(format!(
            "Euler integral needs c > b > 0, got b = {b}, c = {c}"
        )));
    }
    if z.is_nan() || z >= 1.0 {
        return Err(Error::domain(format!(
            "Euler integral needs z < 1, got {z}"
        )));
    }
    let omz = 1.0 - z;
    let spec = QuadratureSpec {
        abs_tol: quad_tol,
        rel_tol: quad_tol,
        ..QuadratureSpec::default()
    };
    let integrand = |pt: crate::quadrature::Abscissa| {
        let u = pt.from_lo;
        let one_minus_u = pt.to_hi;
        // 1 - z u, written to keep precision when z is close to 1
        let base = if z > 0.0 {
            omz + z * one_minus_u
        } else {
            1.0 - z * u
        };
        ((b - 1.0) * u.ln() + (c - b - 1.0) * one_minus_u.ln() - a * base.ln()).exp()
    };
    let est = integrate_de_endpoint(integrand, 0.0, 1.0, &spec)?;
    let beta = log_gamma(b)? * log_gamma(c - b)? / log_gamma(c)?;
    Ok(est.value / beta.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: f64, b: f64, c: f64, z: f64) -> f64 {
        gauss_2f1(HypergeometricParams::new(a, b, c, z), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn examples() {
        assert!((f(0.5, 1.0, 1.5, 0.25) - 1.0986122886681098).abs() < 1e-15);
        assert_eq!(f(0.3, 0.7, 1.9, 0.0), 1.0);
        assert!((f(0.5, 0.5, 1.5, 0.75) - 1.2091995761561452).abs() < 1e-14);
        assert!((f(0.5, 1.0, 1.5, -3.0) - 0.6045997880780726).abs() < 1e-14);
    }

    #[test]
    fn elementary_identities_across_regimes() {
        // ₂F₁(1/2, 1; 3/2; x²) = atanh(x)/x
        for x in [0.1f64, 0.5, 0.8, 0.9, 0.95, 0.99, 0.999] {
            let v = f(0.5, 1.0, 1.5, x * x);
            let e = x.atanh() / x;
            assert!(((v - e) / e).abs() < 1e-12, "x = {x}: {v} vs {e}");
        }
        // ₂F₁(1/2, 1; 3/2; -x²) = atan(x)/x
        for x in [0.5f64, 1.0, 1.5, 2.0, 5.0, 30.0] {
            let v = f(0.5, 1.0, 1.5, -x * x);
            let e = x.atan() / x;
            assert!(((v - e) / e).abs() < 1e-12, "x = {x}: {v} vs {e}");
        }
        // ₂F₁(1/2, 1/2; 3/2; x²) = asin(x)/x
        for x in [0.3f64, 0.9, 0.99, 0.9999] {
            let v = f(0.5, 0.5, 1.5, x * x);
            let e = x.asin() / x;
            assert!(((v - e) / e).abs() < 1e-12, "x = {x}: {v} vs {e}");
        }
        // ₂F₁(a, b; b; z) = (1-z)^(-a)
        for z in [-10.0, -2.0, -0.5, 0.5, 0.9] {
            let v = f(0.7, 2.3, 2.3, z);
            let e = (1.0f64 - z).powf(-0.7);
            assert!(((v - e) / e).abs() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn terminating_series_is_a_polynomial() {
        // ₂F₁(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c) = (1.5, 2.5);
        for z in [-5.0, -0.9, 0.3, 1.0] {
            let e = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
            assert!((f(-2.0, b, c, z) - e).abs() < 1e-13);
        }
    }

    #[test]
    fn domain_errors() {
        let bad_c = HypergeometricParams::new(0.5, 0.5, -2.0, 0.1);
        assert!(matches!(gauss_2f1(bad_c, 1e-14), Err(Error::Domain(_))));
        let divergent = HypergeometricParams::new(0.5, 1.0, 1.5, 1.0);
        assert!(matches!(gauss_2f1(divergent, 1e-14), Err(Error::Domain(_))));
        let beyond = HypergeometricParams::new(0.5, 1.0, 1.5, 1.5);
        assert!(gauss_2f1(beyond, 1e-14).is_err());
        let tol = HypergeometricParams::new(0.5, 1.0, 1.5, 0.5);
        assert!(gauss_2f1(tol, 0.0).is_err());
    }

    #[test]
    fn logarithmic_corner_reports_non_convergence() {
        // c - a - b = 0: no connection formula, and the series is too slow
        let p = HypergeometricParams::new(0.5, 1.0, 1.5, 1.0 - 1e-9);
        match gauss_2f1(p, 1e-15) {
            Err(Error::Convergence { count, partial }) => {
                assert_eq!(count, MAX_SERIES_TERMS);
                assert!(partial > 1.0);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn gauss_summation() {
        for (a, b, c) in [
            (0.5, 0.5, 1.5),
            (0.5, 1.0, 2.5),
            (0.5, 3.0, 5.5),
            (-0.3, 0.7, 2.0),
        ] {
            let v = f(a, b, c, 1.0);
            let e = gamma_ratio(&[c, c - a - b], &[c - a, c - b])
                .unwrap()
                .value();
            assert!(((v - e) / e).abs() < 1e-13);
        }
    }

    #[test]
    fn euler_oracle_examples() {
        let v = gauss_2f1_integral_oracle(HypergeometricParams::new(0.5, 1.0, 1.5, 0.25), 1e-12)
            .unwrap();
        assert!((v - 1.0986122886681098).abs() < 1e-10);

        let p = HypergeometricParams::new(0.5, 1.5, 2.75, 0.9);
        let v = gauss_2f1_integral_oracle(p, 1e-12).unwrap();
        assert!((v - gauss_2f1(p, 1e-15).unwrap()).abs() < 1e-9);

        let p = HypergeometricParams::new(0.5, 1.0, 1.5, -3.0);
        let v = gauss_2f1_integral_oracle(p, 1e-12).unwrap();
        assert!((v - 0.6045997880780726).abs() < 1e-10);

        let bad = HypergeometricParams::new(0.5, 2.0, 1.5, 0.5);
        assert!(gauss_2f1_integral_oracle(bad, 1e-12).is_err());
    }
}
