use std::f64::consts::PI;

use pathquant_core::quantizer::{ks_prequantize, quantize_full, quantize_polarized};
use pathquant_core::star::{star, star_polynomial};
use pathquant_core::states::{
    l2_inner, lemma_constant, make_polarized, make_polarized_profile, measure_lemma_constant, negative_norm_witness,
    orthonormalize, pairing_matrix, pathintegral_inner, polarized_value, WITNESS_MAX_N,
};
use pathquant_core::weyl::weyl_profile;
use pathquant_core::{Complex64, GridSection, GridSpec, LinearPolarization, Observable, PhasePoint, Planck, Profile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check, num, positive, Outcome, RunResult, Spec, Table};

fn grid(half_width: f64, n: usize, hbar: f64) -> Result<(GridSpec, Planck), String> {
    let spec = GridSpec::new(half_width, n).map_err(|e| e.to_string())?;
    let h = Planck::new(hbar).map_err(|e| e.to_string())?;
    Ok((spec, h))
}

fn i() -> Complex64 {
    Complex64::i()
}

fn canonical_observables() -> Vec<(&'static str, Observable)> {
    vec![
        ("q", Observable::q()),
        ("p", Observable::p()),
        ("q^2", Observable::monomial(0, 2, 1.0)),
        ("p^2", Observable::monomial(2, 0, 1.0)),
        ("pq", Observable::monomial(1, 1, 1.0)),
    ]
}

/// `⟨Ψ, AΨ⟩ / ⟨Ψ, Ψ⟩`
fn expectation(psi: &GridSection, a: &GridSection) -> Result<Complex64, pathquant_core::Error> {
    Ok(l2_inner(psi, a)? / l2_inner(psi, psi)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegativeNorm {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    pub eigenvalue_threshold: f64,
    pub witness_tolerance: f64,
}

impl Default for NegativeNorm {
    fn default() -> Self {
        Self { n: 24, half_width: 6.0, hbar: 1.0, eigenvalue_threshold: -0.1, witness_tolerance: 1e-3 }
    }
}

impl Spec for NegativeNorm {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        check(self.n <= WITNESS_MAX_N, || format!("n must be at most {WITNESS_MAX_N} for the dense search"))?;
        positive("witness_tolerance", self.witness_tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let e = pathquant_core::states::form_matrix(spec, h).symmetric_eigen();
        let mut eig: Vec<f64> = e.eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let mut spectrum = Table::new("spectrum", &["index", "eigenvalue"]);
        for (k, v) in eig.iter().enumerate() {
            spectrum.push(vec![k.to_string(), num(*v)]);
        }
        let w = negative_norm_witness(spec, h)?;
        let gap = (w.value - w.min_eigenvalue).abs();
        let mut witness = Table::new(
            "witness",
            &["n", "half_width", "hbar", "min_eigenvalue", "witness_value", "gap", "window_dim", "boundary_ratio"],
        );
        witness.push(vec![
            self.n.to_string(),
            num(self.half_width),
            num(self.hbar),
            num(w.min_eigenvalue),
            num(w.value),
            num(gap),
            w.window_dim.to_string(),
            num(w.section.boundary_ratio()),
        ]);
        let mut out = Outcome { tables: vec![witness, spectrum], ..Default::default() };
        out.tolerance("eigenvalue_threshold", self.eigenvalue_threshold);
        out.tolerance("witness_tolerance", self.witness_tolerance);
        out.metric("min_eigenvalue", w.min_eigenvalue);
        out.metric("witness_value", w.value);
        out.metric("witness_gap", gap);
        out.passed = w.min_eigenvalue < self.eigenvalue_threshold && w.value < 0.0 && gap <= self.witness_tolerance;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InnerProductLemma {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    pub tau: f64,
    pub angle: f64,
    /// Hermite orders `0..=max_order`; all pairs `j ≤ k` are compared.
    pub max_order: usize,
    pub tolerance: f64,
}

impl Default for InnerProductLemma {
    fn default() -> Self {
        Self { n: 48, half_width: 11.0, hbar: 1.0, tau: 1.2, angle: 0.4, max_order: 2, tolerance: 1e-3 }
    }
}

impl Spec for InnerProductLemma {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        LinearPolarization::complexified(self.tau, self.angle).map_err(|e| e.to_string())?;
        check(self.max_order <= 6, || "max_order must be at most 6".into())?;
        positive("tolerance", self.tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let pol = LinearPolarization::complexified(self.tau, self.angle)?;
        let states = (0..=self.max_order)
            .map(|k| Ok(make_polarized_profile(&pol, &Profile::natural_hermite(k, self.tau, h), spec, h)?.normalized()))
            .collect::<Result<Vec<_>, pathquant_core::Error>>()?;
        let c = measure_lemma_constant(spec, h)?;
        let mut t = Table::new(
            "pairs",
            &["j", "k", "pathintegral_re", "pathintegral_im", "l2_re", "l2_im", "constant", "abs_error"],
        );
        let mut worst = 0.0f64;
        for j in 0..states.len() {
            for k in j..states.len() {
                let a = pathintegral_inner(&states[j], &states[k])?;
                let b = l2_inner(&states[j], &states[k])?;
                let err = (a - b * c).norm();
                worst = worst.max(err);
                t.push(vec![
                    j.to_string(),
                    k.to_string(),
                    num(a.re),
                    num(a.im),
                    num(b.re),
                    num(b.im),
                    num(c),
                    num(err),
                ]);
            }
        }
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("tolerance", self.tolerance);
        out.metric("calibrated_constant", c);
        out.metric("analytic_constant", lemma_constant(h));
        out.metric("max_abs_error", worst);
        out.passed = worst <= self.tolerance;
        Ok(out)
    }
}

/// Samples the polarized state of `profile` without the decay gate; Weyl
/// outputs may carry larger polynomial factors than the input.
fn sample_profile(
    pol: &LinearPolarization,
    profile: &Profile,
    spec: GridSpec,
    h: Planck,
) -> Result<GridSection, pathquant_core::Error> {
    GridSection::from_fn(spec, h, |u| polarized_value(pol, |x| profile.eval(x), u, h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeylAgreement {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    /// Squeezing of the complexified vertical polarizations (angle 0).
    pub taus: Vec<f64>,
    pub max_order: usize,
    pub tolerance: f64,
}

impl Default for WeylAgreement {
    fn default() -> Self {
        Self { n: 48, half_width: 11.0, hbar: 1.0, taus: vec![1.0, 0.8], max_order: 2, tolerance: 1e-2 }
    }
}

impl Spec for WeylAgreement {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        check(!self.taus.is_empty(), || "taus must not be empty".into())?;
        for &t in &self.taus {
            LinearPolarization::complexified(t, 0.0).map_err(|e| e.to_string())?;
        }
        check(self.max_order <= 6, || "max_order must be at most 6".into())?;
        positive("tolerance", self.tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let mut t = Table::new("agreement", &["observable", "tau", "order", "relative_error"]);
        let mut worst = 0.0f64;
        for &tau in &self.taus {
            let pol = LinearPolarization::complexified(tau, 0.0)?;
            for k in 0..=self.max_order {
                let prof = Profile::natural_hermite(k, tau, h);
                let s = make_polarized_profile(&pol, &prof, spec, h)?;
                for (label, f) in canonical_observables() {
                    let got = quantize_full(&f, &s)?;
                    let want = sample_profile(&pol, &weyl_profile(&f, &pol, &prof, h)?, spec, h)?;
                    let err = got.relative_error(&want)?;
                    worst = worst.max(err);
                    t.push(vec![label.into(), num(tau), k.to_string(), num(err)]);
                }
            }
        }
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("tolerance", self.tolerance);
        out.metric("max_relative_error", worst);
        out.passed = worst <= self.tolerance;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KsAgreement {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    pub max_order: usize,
    pub tolerance: f64,
}

impl Default for KsAgreement {
    fn default() -> Self {
        Self { n: 64, half_width: 10.0, hbar: 1.0, max_order: 2, tolerance: 2e-3 }
    }
}

impl Spec for KsAgreement {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        check(self.max_order <= 6, || "max_order must be at most 6".into())?;
        positive("tolerance", self.tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let pol = LinearPolarization::complexified(1.0, 0.0)?;
        let fs = [
            ("1", Observable::constant(1.0)),
            ("q", Observable::q()),
            ("p", Observable::p()),
            ("pq", Observable::monomial(1, 1, 1.0)),
        ];
        let mut t = Table::new("agreement", &["observable", "order", "relative_error", "offset_re", "offset_im"]);
        let mut out = Outcome::default();
        let mut worst = 0.0f64;
        for (label, f) in &fs {
            let mut worst_f = 0.0f64;
            for k in 0..=self.max_order {
                let s = make_polarized_profile(&pol, &Profile::natural_hermite(k, 1.0, h), spec, h)?;
                let a = quantize_full(f, &s)?;
                let b = ks_prequantize(f, &s)?;
                let err = a.relative_error(&b)?;
                let offset = expectation(&s, &a.sub(&b)?)?;
                worst_f = worst_f.max(err);
                t.push(vec![(*label).into(), k.to_string(), num(err), num(offset.re), num(offset.im)]);
            }
            out.metric(format!("max_relative_error[{label}]"), worst_f);
            worst = worst.max(worst_f);
        }
        out.tables.push(t);
        out.tolerance("tolerance", self.tolerance);
        out.metric("max_relative_error", worst);
        out.passed = worst <= self.tolerance;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutatorStar {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    pub max_order: usize,
    /// Phase-plane points `[p, q]` where the star commutator is evaluated.
    pub points: Vec<[f64; 2]>,
    pub commutator_tolerance: f64,
    pub star_tolerance: f64,
    pub composition_tolerance: f64,
}

impl Default for CommutatorStar {
    fn default() -> Self {
        Self {
            n: 48,
            half_width: 10.0,
            hbar: 1.0,
            max_order: 2,
            points: vec![[0.0, 0.0], [0.5, -0.3], [-1.0, 0.8]],
            commutator_tolerance: 2e-3,
            star_tolerance: 2e-3,
            composition_tolerance: 5e-3,
        }
    }
}

impl Spec for CommutatorStar {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        check(!self.points.is_empty(), || "points must not be empty".into())?;
        for p in &self.points {
            PhasePoint::checked(p[0], p[1]).map_err(|e| e.to_string())?;
        }
        check(self.max_order <= 6, || "max_order must be at most 6".into())?;
        positive("commutator_tolerance", self.commutator_tolerance)?;
        positive("star_tolerance", self.star_tolerance)?;
        positive("composition_tolerance", self.composition_tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let hb = h.get();
        let pol = LinearPolarization::complexified(1.0, 0.0)?;
        let mut t = Table::new("checks", &["check", "case", "value_re", "value_im", "error"]);
        let (mut e_comm, mut e_star, mut e_comp) = (0.0f64, 0.0f64, 0.0f64);
        let mut sigma_q = Vec::new();
        for k in 0..=self.max_order {
            let s = make_polarized_profile(&pol, &Profile::natural_hermite(k, 1.0, h), spec, h)?;
            let qp = quantize_full(&Observable::q(), &quantize_full(&Observable::p(), &s)?)?;
            let pq = quantize_full(&Observable::p(), &quantize_full(&Observable::q(), &s)?)?;
            let comm = qp.sub(&pq)?;
            let err = comm.relative_error(&s.scale(i() * hb))?;
            let ratio = expectation(&s, &comm)? / hb;
            sigma_q.push(ratio.im);
            e_comm = e_comm.max(err);
            t.push(vec!["commutator".into(), format!("hermite-{k}"), num(ratio.re), num(ratio.im), num(err)]);
        }
        let pts: Vec<PhasePoint> = self.points.iter().map(|p| PhasePoint::new(p[0], p[1])).collect();
        let qp = star(&Observable::q(), &Observable::p(), &pts, h)?;
        let pq = star(&Observable::p(), &Observable::q(), &pts, h)?;
        let mut sigma_s = Vec::new();
        for (k, m) in pts.iter().enumerate() {
            let d = qp[k] - pq[k];
            let err = (d - i() * hb).norm();
            sigma_s.push(d.im / hb);
            e_star = e_star.max(err);
            t.push(vec![
                "star-commutator".into(),
                format!("({}, {})", m.p, m.q),
                num(d.re / hb),
                num(d.im / hb),
                num(err),
            ]);
        }
        let s = make_polarized_profile(&pol, &Profile::natural_hermite(0, 1.0, h), spec, h)?;
        for (label, f, g) in [
            ("q,p", Observable::q(), Observable::p()),
            ("p,p", Observable::p(), Observable::p()),
            ("q,q", Observable::q(), Observable::q()),
        ] {
            let fg = star_polynomial(&f, &g, h)?;
            let lhs = quantize_full(&f, &quantize_full(&g, &s)?)?;
            let rhs = quantize_full(&fg, &s)?;
            let err = lhs.relative_error(&rhs)?;
            e_comp = e_comp.max(err);
            t.push(vec!["composition".into(), label.into(), "".into(), "".into(), num(err)]);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (sq, ss) = (mean(&sigma_q), mean(&sigma_s));
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("commutator_tolerance", self.commutator_tolerance);
        out.tolerance("star_tolerance", self.star_tolerance);
        out.tolerance("composition_tolerance", self.composition_tolerance);
        out.metric("commutator_error", e_comm);
        out.metric("star_commutator_error", e_star);
        out.metric("composition_error", e_comp);
        out.metric("sigma_quantizer", sq);
        out.metric("sigma_star", ss);
        out.passed = e_comm <= self.commutator_tolerance
            && e_star <= self.star_tolerance
            && e_comp <= self.composition_tolerance
            && sq.signum() == ss.signum();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimpVsFull {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    pub states: usize,
    pub tau_range: [f64; 2],
    pub max_order: usize,
    pub tolerance: f64,
}

impl Default for SimpVsFull {
    fn default() -> Self {
        Self { n: 64, half_width: 12.0, hbar: 1.0, states: 10, tau_range: [0.8, 1.4], max_order: 2, tolerance: 2e-3 }
    }
}

impl Spec for SimpVsFull {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        check(self.states > 0, || "states must be positive".into())?;
        let [a, b] = self.tau_range;
        check(a.is_finite() && b.is_finite() && 0.0 < a && a <= b, || {
            format!("invalid tau_range {:?}", self.tau_range)
        })?;
        check(self.max_order <= 6, || "max_order must be at most 6".into())?;
        positive("tolerance", self.tolerance)
    }

    /// State `j` draws its polarization and coefficients from
    /// `ChaCha8Rng::seed_from_u64(seed)` on stream `j`.
    fn run(&self, seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let f = Observable::new(
            &[(1, 0, Complex64::new(0.3, 0.1)), (0, 2, Complex64::new(-0.7, 0.0)), (1, 1, Complex64::new(0.0, 0.4))],
            None,
        )?;
        let mut t = Table::new("states", &["index", "tau", "angle", "relative_error"]);
        let mut worst = 0.0f64;
        for j in 0..self.states {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let [lo, hi] = self.tau_range;
            let tau = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            let angle = rng.gen_range(-PI..PI);
            let coef: Vec<Complex64> = (0..=self.max_order)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let pol = LinearPolarization::complexified(tau, angle)?;
            let profiles: Vec<Profile> = (0..=self.max_order).map(|k| Profile::natural_hermite(k, tau, h)).collect();
            let s = make_polarized(
                &pol,
                |x| profiles.iter().zip(&coef).map(|(p, c)| p.eval(x) * c).sum::<Complex64>(),
                spec,
                h,
            )?;
            let a = quantize_full(&f, &s)?;
            let b = quantize_polarized(&f, &s)?;
            let err = b.relative_error(&a)?;
            worst = worst.max(err);
            t.push(vec![j.to_string(), num(tau), num(angle), num(err)]);
        }
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("tolerance", self.tolerance);
        out.metric("max_relative_error", worst);
        out.passed = worst <= self.tolerance;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BksPairing {
    pub n: usize,
    pub half_width: f64,
    pub hbar: f64,
    pub tau: f64,
    pub left_states: usize,
    pub right_states: usize,
    pub tolerance: f64,
}

impl Default for BksPairing {
    fn default() -> Self {
        Self { n: 112, half_width: 16.0, hbar: 1.0, tau: 1.5, left_states: 4, right_states: 12, tolerance: 1e-3 }
    }
}

impl Spec for BksPairing {
    fn validate(&self) -> Result<(), String> {
        grid(self.half_width, self.n, self.hbar)?;
        LinearPolarization::complexified(self.tau, 0.0).map_err(|e| e.to_string())?;
        check(self.left_states >= 1 && self.right_states >= self.left_states, || {
            "need 1 <= left_states <= right_states".into()
        })?;
        positive("tolerance", self.tolerance)
    }

    fn run(&self, _seed: u64) -> RunResult {
        let (spec, h) = grid(self.half_width, self.n, self.hbar)?;
        let kahler = LinearPolarization::complexified(1.0, 0.0)?;
        let squeezed = LinearPolarization::complexified(self.tau, 0.0)?;
        let build = |pol: &LinearPolarization, tau: f64, count: usize| {
            (0..count)
                .map(|k| make_polarized_profile(pol, &Profile::natural_hermite(k, tau, h), spec, h))
                .collect::<Result<Vec<_>, _>>()
        };
        let left = orthonormalize(&build(&kahler, 1.0, self.left_states)?)?;
        let right = orthonormalize(&build(&squeezed, self.tau, self.right_states)?)?;
        let c = lemma_constant(h);
        let m = pairing_matrix(&left, &right)? / Complex64::new(c, 0.0);
        let mm = &m * m.adjoint();
        let lambda = 2.0 * self.tau.sqrt() / (1.0 + self.tau);
        let mut t = Table::new("gram", &["row", "col", "re", "im", "expected", "error"]);
        let mut worst = 0.0f64;
        for r in 0..mm.nrows() {
            for col in 0..mm.ncols() {
                let want = if r == col { lambda } else { 0.0 };
                let err = (mm[(r, col)] - want).norm();
                worst = worst.max(err);
                t.push(vec![
                    r.to_string(),
                    col.to_string(),
                    num(mm[(r, col)].re),
                    num(mm[(r, col)].im),
                    num(want),
                    num(err),
                ]);
            }
        }
        let mut out = Outcome { tables: vec![t], ..Default::default() };
        out.tolerance("tolerance", self.tolerance);
        out.metric("lambda", lambda);
        out.metric("max_error", worst);
        out.passed = worst <= self.tolerance;
        Ok(out)
    }
}
