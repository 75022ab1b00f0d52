mod common;

use common::*;
use nalgebra::DVector;
use pathquant_core::observable::Observable;
use pathquant_core::quantizer::quantize_full;
use pathquant_core::star::{
    calibrate, moyal_product, moyal_series_oracle, normalization, product_width, star, star_operands,
    star_operands_with, star_polynomial, Quadrature, StarOperand,
};
use pathquant_core::{Complex64, GridSpec, PhasePoint, Planck};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pts() -> Vec<PhasePoint> {
    vec![PhasePoint::ORIGIN, PhasePoint::new(0.7, -0.4), PhasePoint::new(-1.1, 0.9), PhasePoint::new(0.2, 1.5)]
}

fn gauss(center: PhasePoint, s: f64) -> impl Fn(PhasePoint) -> Complex64 + Sync {
    move |u| c((-(u - center).norm_sqr() / (2.0 * s * s)).exp(), 0.0)
}

/// Closed form of the star product of two Gaussians by a 4D Gaussian integral.
fn gaussian_oracle(a: PhasePoint, s: f64, b: PhasePoint, t: f64, m: PhasePoint, h: Planck) -> Complex64 {
    let mut mat = pairing_matrix_4d().map(|z| z * c(0.0, 2.0 / h.get()));
    for (k, w) in [s, s, t, t].into_iter().enumerate() {
        mat[(k, k)] += c(1.0 / (w * w), 0.0);
    }
    let (al, be) = (a - m, b - m);
    let j = DVector::from_vec(vec![
        c(al.p / (s * s), 0.0),
        c(al.q / (s * s), 0.0),
        c(be.p / (t * t), 0.0),
        c(be.q / (t * t), 0.0),
    ]);
    let konst = (-al.norm_sqr() / (2.0 * s * s) - be.norm_sqr() / (2.0 * t * t)).exp();
    gaussian_integral(&mat, &j) * konst * normalization(h)
}

#[test]
fn oracle_reduces_to_unit_law() {
    // Gaussian ⋆ (infinitely wide Gaussian) → Gaussian
    let h = hbar(1.0);
    let a = PhasePoint::new(0.3, -0.2);
    let m = PhasePoint::new(0.5, 0.1);
    let v = gaussian_oracle(a, 1.0, m, 1e4, m, h);
    let want = gauss(a, 1.0)(m);
    assert!((v - want).norm() < 1e-6, "{v} vs {want}");
}

#[test]
fn unit_element() {
    let h = hbar(1.0);
    let one = Observable::constant(1.0);
    let fs = [
        Observable::new(&[(0, 0, c(1.0, 0.0)), (1, 1, c(0.5, 0.0)), (0, 2, c(0.0, -0.3))], Some(1.2)).unwrap(),
        Observable::q().with_envelope(0.8),
    ];
    for f in &fs {
        let left = star(f, &one, &pts(), h).unwrap();
        let right = star(&one, f, &pts(), h).unwrap();
        for (k, &m) in pts().iter().enumerate() {
            assert!((left[k] - f.eval(m)).norm() < 1e-3, "{f} at {m:?}: {}", left[k]);
            assert!((right[k] - f.eval(m)).norm() < 1e-3);
        }
    }
    // the polynomial path through ε-extrapolation
    let p2 = Observable::new(&[(2, 0, c(1.0, 0.0)), (0, 1, c(0.0, 1.0))], None).unwrap();
    let v = star(&p2, &one, &pts(), h).unwrap();
    for (k, &m) in pts().iter().enumerate() {
        assert!((v[k] - p2.eval(m)).norm() < 1e-3, "{}", v[k]);
    }
}

#[test]
fn commutator_sign_matches_quantizer() {
    for hb in [0.5, 1.0] {
        let h = hbar(hb);
        let qp = star(&Observable::q(), &Observable::p(), &pts(), h).unwrap();
        let pq = star(&Observable::p(), &Observable::q(), &pts(), h).unwrap();
        for k in 0..pts().len() {
            assert!((qp[k] - pq[k] - c(0.0, hb)).norm() < 2e-3, "{}", qp[k] - pq[k]);
        }
    }
    // same sign from the quantizer
    let h = hbar(1.0);
    let spec = GridSpec::new(10.0, 48).unwrap();
    let s = hermite_state(&kahler(), 0, 1.0, spec, h);
    let a = quantize_full(&Observable::q(), &quantize_full(&Observable::p(), &s).unwrap()).unwrap();
    let b = quantize_full(&Observable::p(), &quantize_full(&Observable::q(), &s).unwrap()).unwrap();
    let ratio = pathquant_core::states::l2_inner(&s, &a.sub(&b).unwrap()).unwrap()
        / pathquant_core::states::l2_inner(&s, &s).unwrap();
    assert!((ratio - c(0.0, 1.0)).norm() < 2e-3);
}

#[test]
fn gaussian_star_gaussian_closed_form() {
    let h = hbar(1.0);
    let cases = [
        (PhasePoint::new(0.3, -0.5), 1.0, PhasePoint::new(-0.2, 0.4), 1.5),
        (PhasePoint::ORIGIN, 0.7, PhasePoint::new(1.0, 0.0), 0.9),
    ];
    for (a, s, b, t) in cases {
        let f = StarOperand::from_fn(gauss(a, s), a, s);
        let g = StarOperand::from_fn(gauss(b, t), b, t);
        for m in pts() {
            let v = star_operands(&f, &g, m, h).unwrap();
            let want = gaussian_oracle(a, s, b, t, m, h);
            assert!((v - want).norm() < 1e-6, "{m:?}: {v} vs {want}");
        }
    }
}

#[test]
fn moyal_agreement_for_polynomials() {
    let h = hbar(1.0);
    let pairs = [
        (Observable::monomial(2, 0, 1.0), Observable::monomial(0, 2, 1.0)),
        (Observable::monomial(1, 1, 1.0), Observable::new(&[(0, 1, c(1.0, 0.0)), (1, 0, c(0.0, 2.0))], None).unwrap()),
    ];
    for (f, g) in &pairs {
        let v = star(f, g, &pts(), h).unwrap();
        let o = moyal_series_oracle(f, g, 4, &pts(), h).unwrap();
        for k in 0..v.len() {
            assert!((v[k] - o[k]).norm() < 2e-3, "{f} ⋆ {g}: {} vs {}", v[k], o[k]);
        }
    }
    // p² ⋆ q² = p²q² − 2iħpq − ħ²/2
    let v = star(&Observable::monomial(2, 0, 1.0), &Observable::monomial(0, 2, 1.0), &[PhasePoint::ORIGIN], h).unwrap();
    assert!((v[0] - c(-0.5, 0.0)).norm() < 2e-3);
}

#[test]
fn fitted_star_polynomial_matches_moyal() {
    let h = hbar(1.0);
    let f = Observable::new(&[(1, 0, c(1.0, 0.0)), (0, 1, c(0.5, 0.0))], None).unwrap();
    let g = Observable::monomial(1, 1, 1.0);
    let fit = star_polynomial(&f, &g, h).unwrap();
    let exact = moyal_product(&f, &g, h).unwrap();
    for m in pts() {
        assert!((fit.eval(m) - exact.eval(m)).norm() < 2e-3);
    }
}

#[test]
fn associativity_with_envelopes() {
    let h = hbar(1.0);
    let f = Observable::new(&[(1, 0, c(1.0, 0.0)), (0, 0, c(0.5, 0.0))], Some(2.5)).unwrap();
    let g = Observable::new(&[(0, 2, c(1.0, 0.0)), (1, 1, c(0.0, 0.3))], Some(1.0)).unwrap();
    let k = Observable::new(&[(0, 1, c(1.0, 0.0)), (0, 0, c(-0.2, 0.0))], Some(1.1)).unwrap();
    let (fo, go, ko) =
        (StarOperand::from_observable(&f), StarOperand::from_observable(&g), StarOperand::from_observable(&k));
    // nested products are sampled on every inner node, so both levels use a lighter rule
    let quad = Quadrature { inner_points: 56, range_widths: 7.0 };
    let st = |a: &StarOperand, b: &StarOperand, u| star_operands_with(a, b, u, h, &quad).unwrap();
    let fg = StarOperand::from_fn(|u| st(&fo, &go, u), PhasePoint::ORIGIN, product_width(2.5, 1.0, h));
    let gk = StarOperand::from_fn(|u| st(&go, &ko, u), PhasePoint::ORIGIN, product_width(1.0, 1.1, h));
    for m in [PhasePoint::new(0.3, -0.6), PhasePoint::new(-0.5, 0.2)] {
        let lhs = st(&fg, &ko, m);
        let rhs = st(&fo, &gk, m);
        assert!((lhs - rhs).norm() < 5e-3, "{m:?}: {lhs} vs {rhs}");
        // the light rule agrees with the default on a single product
        let direct = (st(&fo, &go, m) - star_operands(&fo, &go, m, h).unwrap()).norm();
        assert!(direct < 1e-4, "{direct}");
    }
}

#[test]
fn classical_limit_order() {
    let f = Observable::new(&[(1, 0, c(1.0, 0.0)), (0, 1, c(1.0, 0.0))], Some(1.0)).unwrap();
    let g = Observable::monomial(0, 1, 1.0).with_envelope(1.2);
    let m = [PhasePoint::new(0.4, -0.3)];
    let prod = f.eval(m[0]) * g.eval(m[0]);
    let errs: Vec<f64> =
        [0.5, 0.25, 0.125].iter().map(|&hb| (star(&f, &g, &m, hbar(hb)).unwrap()[0] - prod).norm()).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.9, "{errs:?}");
    }
}

#[test]
fn antisymmetric_part_is_poisson_bracket() {
    let hb = 0.125;
    let h = hbar(hb);
    let f = Observable::new(&[(1, 0, c(1.0, 0.0)), (0, 2, c(0.5, 0.0))], Some(1.0)).unwrap();
    let g = Observable::new(&[(0, 1, c(1.0, 0.0)), (0, 0, c(0.3, 0.0))], Some(1.3)).unwrap();
    let m = PhasePoint::new(0.3, 0.2);
    let fg = star(&f, &g, &[m], h).unwrap()[0];
    let gf = star(&g, &f, &[m], h).unwrap()[0];
    let approx = (fg - gf) / c(0.0, hb);
    // {f,g} = ∂_q f ∂_p g − ∂_p f ∂_q g, the bracket with {q,p} = 1
    let (fp, fq) = f.gradient(m);
    let (gp, gq) = g.gradient(m);
    let bracket = fq * gp - fp * gq;
    assert!((approx - bracket).norm() <= 0.1 * bracket.norm(), "{approx} vs {bracket}");
}

#[test]
fn quantizer_respects_star_product() {
    let h = hbar(1.0);
    let spec = GridSpec::new(10.0, 48).unwrap();
    let s = hermite_state(&kahler(), 0, 1.0, spec, h);
    for (f, g) in [(Observable::q(), Observable::p()), (Observable::p(), Observable::p())] {
        let fg = star_polynomial(&f, &g, h).unwrap();
        let lhs = quantize_full(&f, &quantize_full(&g, &s).unwrap()).unwrap();
        let rhs = quantize_full(&fg, &s).unwrap();
        assert!(lhs.relative_error(&rhs).unwrap() < 5e-3);
    }
}

#[test]
fn calibration_record() {
    let cal = calibrate(hbar(1.0)).unwrap();
    assert!((cal.measured_normalization / cal.normalization - 1.0).abs() < 1e-3);
    assert!((cal.measured_commutator_sign - 1.0).abs() < 2e-3);
    assert_eq!(cal.area_factor, -4.0);
}

#[test]
fn product_width_matches_closed_form() {
    for (s, t, hb) in [(2.5, 1.0, 1.0), (0.7, 1.3, 2.0), (1.0, 1.1, 0.125)] {
        let h = hbar(hb);
        let w = product_width(s, t, h);
        let o = PhasePoint::ORIGIN;
        let m = PhasePoint::new(0.6 * w, -0.3 * w);
        let ratio = gaussian_oracle(o, s, o, t, m, h) / gaussian_oracle(o, s, o, t, o, h);
        let want = (-m.norm_sqr() / (2.0 * w * w)).exp();
        assert!((ratio - c(want, 0.0)).norm() < 1e-12, "{ratio} vs {want}");
    }
}
