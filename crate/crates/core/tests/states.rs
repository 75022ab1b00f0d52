mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use pathquant_core::states::{
    form_matrix, l2_inner, lemma_constant, make_polarized_profile, measure_lemma_constant, negative_norm_witness,
    orthonormalize, pairing_matrix, pathintegral_inner, LinearPolarization, Profile,
};
use pathquant_core::{Complex64, GridSection, GridSpec};
use proptest::prelude::*;

#[test]
fn ground_state_pathintegral_matches_gaussian_oracle() {
    for hb in [0.5, 1.0, 2.0] {
        let h = hbar(hb);
        let spec = GridSpec::new(10.0 * hb.sqrt(), 64).unwrap();
        let g = hermite_state(&kahler(), 0, 1.0, spec, h);
        // exp(−|u0|²/4ħ − |u1|²/4ħ + iσ(u0,u1)/2ħ)
        let a = DMatrix::from_fn(4, 4, |r, c| if r == c { Complex64::new(0.5 / hb, 0.0) } else { 0.0.into() })
            - pairing_matrix_4d() * Complex64::new(0.0, 0.5 / hb);
        let oracle = gaussian_integral(&a, &DVector::zeros(4)) / (2.0 * std::f64::consts::PI * hb).powi(2);
        let v = pathintegral_inner(&g, &g).unwrap();
        assert!((v - oracle).norm() < 1e-8 * oracle.norm(), "ħ={hb}: {v} vs {oracle}");
        // normalized by the L² norm this is the lemma constant 1/(πħ)
        let l2 = l2_inner(&g, &g).unwrap();
        assert!((l2.re - 2.0 * std::f64::consts::PI * hb).abs() < 1e-8);
        let ratio = (v / l2).re / lemma_constant(h);
        assert!((ratio - 1.0).abs() < 1e-3);
    }
}

#[test]
fn normalized_gaussian_pairs_to_one_after_constant() {
    let h = hbar(1.0);
    let spec = GridSpec::new(10.0, 48).unwrap();
    let g = hermite_state(&kahler(), 0, 1.0, spec, h).normalized();
    assert!((l2_inner(&g, &g).unwrap() - 1.0).norm() < 1e-6);
    let v = pathintegral_inner(&g, &g).unwrap() / lemma_constant(h);
    assert!((v - 1.0).norm() < 1e-3);
}

#[test]
fn orthogonal_profiles() {
    let h = hbar(1.0);
    let spec = GridSpec::new(10.0, 48).unwrap();
    let s0 = hermite_state(&kahler(), 0, 1.0, spec, h).normalized();
    let s1 = hermite_state(&kahler(), 1, 1.0, spec, h).normalized();
    assert!(l2_inner(&s0, &s1).unwrap().norm() < 1e-6);
    assert!(pathintegral_inner(&s0, &s1).unwrap().norm() < 1e-3);
    let lam = Complex64::new(0.3, -2.0);
    let scaled = s1.scale(lam);
    let a = l2_inner(&s0, &scaled).unwrap();
    let b = l2_inner(&s0, &s1).unwrap() * lam;
    assert!((a - b).norm() < 1e-15);
}

#[test]
fn horizontal_and_vertical_norms_agree() {
    let h = hbar(1.0);
    let spec = GridSpec::new(10.0, 48).unwrap();
    let v =
        make_polarized_profile(&LinearPolarization::complexified(1.0, 0.0).unwrap(), &Profile::gaussian(2.0), spec, h)
            .unwrap();
    let z = make_polarized_profile(
        &LinearPolarization::complexified(1.0, std::f64::consts::FRAC_PI_2).unwrap(),
        &Profile::gaussian(2.0),
        spec,
        h,
    )
    .unwrap();
    let nv = l2_inner(&v, &v).unwrap().re;
    let nz = l2_inner(&z, &z).unwrap().re;
    // ∫ exp(−|u|²/2ħ) = 2πħ
    assert!((nv - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    assert!((nz - nv).abs() < 1e-8);
}

#[test]
fn measured_constant_matches_analytic() {
    let c = measure_lemma_constant(GridSpec::new(10.0, 48).unwrap(), hbar(1.0)).unwrap();
    assert!((c - 1.0 / std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn spec_mismatch_rejected() {
    let h = hbar(1.0);
    let a = GridSection::zeros(GridSpec::new(10.0, 16).unwrap(), h);
    let b = GridSection::zeros(GridSpec::new(10.0, 17).unwrap(), h);
    assert!(pathintegral_inner(&a, &b).is_err());
    assert!(l2_inner(&a, &b).is_err());
}

#[test]
fn witness_is_negative_and_decays() {
    let h = hbar(1.0);
    let spec = GridSpec::new(6.0, 24).unwrap();
    let w = negative_norm_witness(spec, h).unwrap();
    assert!(w.value < -0.1, "{}", w.value);
    assert!(w.section.check_decay().is_ok());
    assert!(w.min_eigenvalue < 0.0);
    assert!((w.value - w.min_eigenvalue).abs() < 1e-3);
}

#[test]
fn form_spectrum_is_plus_minus_constant() {
    // G is a unitary involution, so the form is (1/πħ)·G with eigenvalues ±1/πħ
    let spec = GridSpec::new(6.0, 24).unwrap();
    let e = form_matrix(spec, hbar(1.0)).symmetric_eigen();
    let lo = e.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = e.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo < 0.0 && hi > 0.0);
    assert!((hi - 1.0 / std::f64::consts::PI).abs() < 1e-3, "{hi}");
    assert!((lo + 1.0 / std::f64::consts::PI).abs() < 1e-3, "{lo}");
}

#[test]
fn analytic_negative_state() {
    // (p − iq)·exp(−|u|²/4ħ) is a −1 eigenvector of G
    let h = hbar(1.0);
    let spec = GridSpec::new(11.0, 64).unwrap();
    let s = GridSection::from_fn(spec, h, |u| Complex64::new(u.p, -u.q) * (-u.norm_sqr() / 4.0).exp())
        .unwrap()
        .normalized();
    let v = pathintegral_inner(&s, &s).unwrap();
    assert!((v.re + lemma_constant(h)).abs() < 1e-6, "{v}");
}

#[test]
fn bks_pairing_is_scaled_unitary() {
    let h = hbar(1.0);
    let spec = GridSpec::new(16.0, 112).unwrap();
    let tau = 1.5;
    let left: Vec<GridSection> = (0..4).map(|k| hermite_state(&kahler(), k, 1.0, spec, h)).collect();
    let squeezed = LinearPolarization::complexified(tau, 0.0).unwrap();
    let right: Vec<GridSection> = (0..12).map(|k| hermite_state(&squeezed, k, tau, spec, h)).collect();
    let left = orthonormalize(&left).unwrap();
    let right = orthonormalize(&right).unwrap();
    let c = lemma_constant(h);
    let m = pairing_matrix(&left, &right).unwrap() / Complex64::new(c, 0.0);
    let mm = &m * m.adjoint();
    let lambda = 2.0 * tau.sqrt() / (1.0 + tau);
    for r in 0..4 {
        for col in 0..4 {
            let want = if r == col { lambda } else { 0.0 };
            assert!((mm[(r, col)] - want).norm() < 1e-3, "({r},{col}) {}", mm[(r, col)]);
        }
    }
}

fn basis(spec: GridSpec) -> Vec<GridSection> {
    let h = hbar(1.0);
    let pols = [kahler(), LinearPolarization::complexified(1.3, 0.4).unwrap()];
    let mut out = Vec::new();
    for (n, pol) in pols.iter().enumerate() {
        let tau = if n == 0 { 1.0 } else { 1.3 };
        for k in 0..2 {
            out.push(hermite_state(pol, k, tau, spec, h));
        }
    }
    // a non-polarized decaying section
    out.push(
        GridSection::from_fn(spec, h, |u| Complex64::new(u.q, 0.5 * u.p * u.p) * (-u.norm_sqr() / 3.0).exp()).unwrap(),
    );
    out
}

fn combo(b: &[GridSection], c: &[(f64, f64)]) -> GridSection {
    let mut acc = b[0].scale(Complex64::new(c[0].0, c[0].1));
    for (s, &(re, im)) in b.iter().zip(c).skip(1) {
        acc = acc.add(&s.scale(Complex64::new(re, im))).unwrap();
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn sesquilinear_and_hermitian(
        c1 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        c0 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        lam in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let spec = GridSpec::new(11.0, 32).unwrap();
        let b = basis(spec);
        let s1 = combo(&b, &c1);
        let s0 = combo(&b, &c0);
        let lam = Complex64::new(lam.0, lam.1);
        let v = pathintegral_inner(&s1, &s0).unwrap();
        let w = pathintegral_inner(&s0, &s1).unwrap();
        let scale = v.norm().max(1.0);
        prop_assert!((v - w.conj()).norm() < 1e-9 * scale);
        let vs = pathintegral_inner(&s1, &s0.scale(lam)).unwrap();
        prop_assert!((vs - v * lam).norm() < 1e-9 * scale * lam.norm().max(1.0));
        let vs1 = pathintegral_inner(&s1.scale(lam), &s0).unwrap();
        prop_assert!((vs1 - v * lam.conj()).norm() < 1e-9 * scale * lam.norm().max(1.0));
        let self_pair = pathintegral_inner(&s1, &s1).unwrap();
        prop_assert!(self_pair.im.abs() < 1e-6 * self_pair.norm().max(1e-12));
    }
}
