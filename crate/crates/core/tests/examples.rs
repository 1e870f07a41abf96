//! Worked values for the public API.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use gapmoments::geometry::{contains, cos_phi_e2, cos_phi_e4, make_set, weight_e2, weight_e4};
use gapmoments::moments::{
    e2_even_moment, e2_odd_moment_hyp, e2_odd_moment_series, e4_even_moment, e4_odd_moment,
    full_range_moment, half_range_moment,
};
use gapmoments::pell::{
    branch_inverse_p2, branch_inverse_p4, chebyshev_t, chebyshev_u, make_p4, middle_weight_deficit,
    partial_fraction_weights, PellSolution,
};
use gapmoments::quadrature::{integrate_de, moment_by_quadrature, t2_composed_moment};
use gapmoments::specfun::gauss_2f1_integral_oracle;
use gapmoments::{
    gauss_2f1, log_gamma, moment, pochhammer, Error, HypergeometricParams, Method, MomentQuery,
    QuadratureSpec, SetKind,
};

fn assert_close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol * want.abs().max(1.0),
        "got {got}, want {want}"
    );
}

#[test]
fn gamma_and_pochhammer() {
    let g = log_gamma(0.5).unwrap();
    assert_eq!(g.sign, 1);
    assert_close(g.log_magnitude, 1.772_453_850_905_516_f64.ln(), 1e-15);
    assert_close(log_gamma(5.0).unwrap().log_magnitude, 24f64.ln(), 1e-15);
    let g = log_gamma(-0.5).unwrap();
    assert_eq!(g.sign, -1);
    assert_close(g.value(), -3.544_907_701_811_032, 1e-14);
    assert!(matches!(log_gamma(-3.0), Err(Error::Pole { .. })));
    assert_eq!(pochhammer(0.5, 3), 1.875);
    assert_eq!(pochhammer(2.7, 0), 1.0);
    assert_eq!(pochhammer(-1.0, 3), 0.0);
}

#[test]
fn hypergeometric_values() {
    let p = HypergeometricParams::new(0.5, 1.0, 1.5, 0.25);
    assert_close(gauss_2f1(p, 1e-15).unwrap(), 1.0986122886681098, 1e-15);
    assert_close(
        gauss_2f1_integral_oracle(p, 1e-12).unwrap(),
        1.0986122886681098,
        1e-10,
    );
    let p = HypergeometricParams::new(0.5, 0.5, 1.5, 0.75);
    assert_close(gauss_2f1(p, 1e-15).unwrap(), 1.2091995761561452, 1e-15);
    let p = HypergeometricParams::new(0.5, 1.0, 1.5, -3.0);
    assert_close(gauss_2f1(p, 1e-15).unwrap(), 0.6045997880780726, 1e-15);
    assert_close(
        gauss_2f1_integral_oracle(p, 1e-12).unwrap(),
        0.6045997880780726,
        1e-10,
    );
    let p = HypergeometricParams::new(0.5, 1.5, 2.75, 0.9);
    let f = gauss_2f1(p, 1e-15).unwrap();
    assert_close(gauss_2f1_integral_oracle(p, 1e-12).unwrap(), f, 1e-9);
    assert_eq!(
        gauss_2f1(HypergeometricParams::new(3.0, 4.0, 5.0, 0.0), 1e-15).unwrap(),
        1.0
    );
    assert!(gauss_2f1(HypergeometricParams::new(1.0, 1.0, -2.0, 0.5), 1e-15).is_err());
}

#[test]
fn sets_and_point_evaluators() {
    let e4 = make_set(SetKind::E4, 0.8).unwrap();
    assert_eq!(e4.intervals.len(), 3);
    assert!(!contains(&e4, 0.7));
    assert!(contains(&e4, -0.8));
    assert!(!contains(&make_set(SetKind::E2, 0.5).unwrap(), 0.0));
    assert_eq!(
        make_set(SetKind::E4, FRAC_1_SQRT_2)
            .unwrap()
            .intervals
            .len(),
        1
    );
    assert!(make_set(SetKind::E4, 0.5).is_err());

    assert_close(cos_phi_e4(1.0, 0.8).unwrap(), 1.0, 1e-15);
    assert_close(cos_phi_e4(0.0, 0.8).unwrap(), -1.0, 1e-15);
    assert_close(cos_phi_e2(1.0, 0.5).unwrap(), 1.0, 1e-15);
    assert_close(cos_phi_e2(-0.5, 0.5).unwrap(), 0.0, 1e-15);
    assert_close(
        weight_e4(0.9, 0.8).unwrap(),
        (0.51f64 / 0.0285).sqrt(),
        1e-14,
    );
    assert!(matches!(weight_e2(0.5, 0.5), Err(Error::Pole { .. })));
}

#[test]
fn polynomials_and_weights() {
    assert_eq!(chebyshev_t(2).coeffs(), &[-1.0, 0.0, 2.0]);
    assert_eq!(chebyshev_u(1).coeffs(), &[0.0, 2.0]);
    let p = make_p4(0.8).unwrap();
    for (got, want) in p
        .coeffs()
        .iter()
        .zip([1.0, 0.0, -8.680555555555555, 0.0, 8.680555555555555])
    {
        assert_close(*got, want, 1e-14);
    }
    assert!(PellSolution::classical(5).residual().max_abs_coeff() < 1e-12);
    assert!(PellSolution::e4_degree4(0.8).unwrap().relative_residual() < 1e-10);

    assert_close(branch_inverse_p2(1, -1.0, 0.3).unwrap(), -0.3, 1e-15);
    assert_close(branch_inverse_p4(2, -1.0, 0.8).unwrap(), -0.6, 1e-14);
    assert_eq!(branch_inverse_p4(3, 1.0, 0.8).unwrap(), 0.0);
    let w = partial_fraction_weights(0.3, 0.8, 4).unwrap();
    assert_close(w.iter().sum(), 1.0, 1e-11);
    let w = partial_fraction_weights(0.0, 0.8, 4).unwrap();
    assert_close(w[1] + w[2], 0.4727632, 1e-7);
    assert_close(middle_weight_deficit(0.0, 0.8).unwrap(), 0.05447351, 1e-7);
}

#[test]
fn closed_form_moments() {
    assert_close(full_range_moment(0, 0.0).unwrap().value, PI, 1e-15);
    assert_eq!(full_range_moment(3, 0.7).unwrap().value, 0.0);
    assert_close(
        half_range_moment(4, 0.0).unwrap().value,
        3.0 * PI / 16.0,
        1e-15,
    );
    assert_close(e2_even_moment(1, 0.5).unwrap().value, 2.0 / 3.0, 1e-15);
    assert_close(e4_even_moment(2, 0.0).unwrap().value, 3.0 * PI / 8.0, 1e-15);
    assert_close(
        e2_odd_moment_hyp(0, 0.0, 0.5).unwrap().value,
        1.2091995761561452,
        1e-15,
    );
    assert_close(
        e2_odd_moment_series(0, 0.0, 0.5, 1e-12).unwrap().value,
        1.2091995761561452,
        1e-12,
    );
    assert_close(
        e4_odd_moment(0, 0.0, 0.8).unwrap().value,
        0.10725018479888083,
        1e-14,
    );
}

#[test]
fn closed_forms_match_quadrature() {
    let spec = QuadratureSpec::default();
    let cases = [
        (SetKind::HalfRange, 4, 0.0, 0.0),
        (SetKind::E2, 2, 0.5, 0.4),
        (SetKind::E2, 1, 0.0, 0.5),
        (SetKind::E4, 4, 0.0, 0.8),
        (SetKind::E4, 1, 0.0, 0.8),
        (SetKind::E4, 5, 2.5, 0.95),
    ];
    for (kind, n, mu, b) in cases {
        let q = MomentQuery::new(kind, n, mu, b);
        let c = moment(&q, Method::ClosedForm).unwrap().value;
        let v = moment_by_quadrature(&q, &spec).unwrap();
        assert_close(v.value, c, 1e-10);
        assert!(v.error_estimate >= 0.0 && v.terms_or_nodes > 0);
    }
}

#[test]
fn closed_gap_integral() {
    let spec = QuadratureSpec::default();
    assert_close(t2_composed_moment(0, 0.0, &spec).unwrap().value, PI, 1e-12);
    assert_close(
        t2_composed_moment(4, 1.0, &spec).unwrap().value,
        e4_even_moment(2, 1.0).unwrap().value,
        1e-10,
    );
    assert!(t2_composed_moment(3, 0.5, &spec).unwrap().value.abs() < 1e-12);
}

#[test]
fn plain_quadrature() {
    let spec = QuadratureSpec::default();
    assert_close(
        integrate_de(|x| x.powf(-0.5), 0.0, 1.0, &spec)
            .unwrap()
            .value,
        2.0,
        1e-12,
    );
    assert_close(
        integrate_de(|x| (1.0 / x).ln(), 0.0, 1.0, &spec)
            .unwrap()
            .value,
        1.0,
        1e-12,
    );
}
