use pathquant_stochastic::*;
use proptest::prelude::*;

#[test]
fn endpoint_moments_over_many_paths() {
    let n = 100_000;
    let paths = sample_paths(4, n, 7).unwrap();
    let m1 = paths.iter().map(|p| p.samples[4]).sum::<f64>() / n as f64;
    let m2 = paths.iter().map(|p| p.samples[4].powi(2)).sum::<f64>() / n as f64;
    let root = (n as f64).sqrt();
    assert!(m1.abs() < 3.0 / root, "{m1}");
    assert!((m2 - 1.0).abs() < 3.0 * 2f64.sqrt() / root, "{m2}");
}

#[test]
fn paths_are_reproducible_per_index() {
    let batch = sample_paths(16, 8, 99).unwrap();
    for (i, p) in batch.iter().enumerate() {
        assert_eq!(p, &sample_path(16, 99, i as u64).unwrap());
        assert_eq!(p.samples[0], 0.0);
    }
    assert_ne!(batch[0].samples, batch[1].samples);
    assert_ne!(batch[0].samples, sample_path(16, 100, 0).unwrap().samples);
}

#[test]
fn coarsening_keeps_every_kth_sample() {
    let p = sample_path(64, 3, 0).unwrap();
    let c = p.coarsen(8).unwrap();
    assert_eq!(c.len(), 9);
    assert_eq!(c[8], p.samples[64]);
    assert_eq!(c[3], p.samples[24]);
    assert!(p.coarsen(7).is_err());
}

#[test]
fn constant_integrand_gives_endpoint() {
    let p = sample_path(256, 1, 4).unwrap();
    let s = prescription_sum(&p.samples, &Prescription::LeftPoint { f: SmoothFn::constant(2.5) });
    assert!((s - 2.5 * p.samples[256]).abs() < 1e-12);
}

#[test]
fn increment_telescopes() {
    let g = SmoothFn::Sin { amplitude: 1.3, frequency: 2.0 };
    let p = sample_path(512, 11, 2).unwrap();
    let s = prescription_sum(&p.samples, &Prescription::Increment { g: g.clone() });
    assert!((s - (g.value(p.samples[512]) - g.value(0.0))).abs() < 1e-12);
}

#[test]
fn midpoint_minus_left_for_identity_is_half_quadratic_variation() {
    let p = sample_path(1024, 5, 0).unwrap();
    let f = SmoothFn::identity();
    let d = prescription_sum(&p.samples, &Prescription::Midpoint { f: f.clone() })
        - prescription_sum(&p.samples, &Prescription::LeftPoint { f });
    let qv: f64 = p.samples.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    assert!((d - 0.5 * qv).abs() < 1e-12);
}

#[test]
fn correction_for_identity_matches_quadratic_variation_oracle() {
    // For f = x the gap is ½(Σ(Δx)² − 1), so E|D_n − ½|² = 1/(2n).
    let steps = [4, 16, 64];
    let rows = correction_experiment(&SmoothFn::identity(), &steps, 4000, 42).unwrap();
    for r in &rows {
        assert!((r.estimate - 0.5).abs() < 3.0 * r.estimate_stderr, "{r:?}");
        let exact = 1.0 / (2.0 * r.n_steps as f64);
        assert!((r.l2_error - exact).abs() < 3.0 * r.stderr + 0.02 * exact, "{r:?}");
    }
}

#[test]
fn correction_for_sine_decreases() {
    let f = SmoothFn::Sin { amplitude: 1.0, frequency: 1.5 };
    let rows = correction_experiment(&f, &[4, 16, 64, 256], 1000, 8).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].l2_error < w[0].l2_error, "{w:?}");
    }
    let ratio = rows[0].l2_error / rows[3].l2_error;
    assert!(ratio > 20.0, "{ratio}");
}

#[test]
fn second_order_identity_pair_agrees_exactly() {
    let rows = second_order_welldefined(&SmoothFn::identity(), &SmoothFn::zero(), &[4, 32], 64, 1).unwrap();
    for r in rows {
        assert!(r.l2_error < 1e-28, "{r:?}");
    }
}

#[test]
fn second_order_forms_converge_together() {
    let f = SmoothFn::Sin { amplitude: 1.0, frequency: 2.0 };
    let g = SmoothFn::Gaussian { amplitude: 0.7 };
    let rows = second_order_welldefined(&f, &g, &[8, 32, 128, 512], 1000, 3).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].l2_error < w[0].l2_error, "{w:?}");
    }
    assert!(rows[0].l2_error / rows[3].l2_error > 1e3, "{rows:?}");
}

#[test]
fn quadratic_variation_tends_to_one() {
    let rows = quadratic_variation(&[8, 64, 512], 2000, 17).unwrap();
    for r in &rows {
        assert!((r.estimate - 1.0).abs() < 3.0 * r.estimate_stderr, "{r:?}");
        let exact = 2.0 / r.n_steps as f64;
        assert!((r.l2_error - exact).abs() < 3.0 * r.stderr + 0.02 * exact, "{r:?}");
    }
}

#[test]
fn tables_do_not_depend_on_thread_count() {
    let f = SmoothFn::Cos { amplitude: 1.0, frequency: 1.0 };
    let a = correction_experiment(&f, &[4, 8], 50, 5).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| correction_experiment(&f, &[4, 8], 50, 5).unwrap());
    assert_eq!(a, b);
}

#[test]
fn smooth_path_gap_follows_leading_term() {
    let r = smooth_path_null(&SmoothFn::identity(), 4096, 1.0, 1.0).unwrap();
    // ½Δt∫x′² = π²/4096 for x = sin 2πt
    let exact = std::f64::consts::PI.powi(2) / 4096.0;
    assert!((r.predicted_gap - exact).abs() < 1e-12 * exact.max(1.0));
    assert!((r.difference - exact).abs() < 1e-3 * exact, "{r:?}");
    assert!(r.extrapolated.abs() < 1e-3 * r.difference, "{r:?}");
}

#[test]
fn invalid_arguments() {
    assert_eq!(sample_path(1, 0, 0).unwrap_err(), StochasticError::TooFewSteps(1));
    assert!(matches!(correction_experiment(&SmoothFn::identity(), &[], 10, 0), Err(StochasticError::EmptySteps)));
    assert!(matches!(correction_experiment(&SmoothFn::identity(), &[4], 1, 0), Err(StochasticError::TooFewPaths(1))));
    assert!(matches!(
        correction_experiment(&SmoothFn::identity(), &[4, 6], 10, 0),
        Err(StochasticError::IncompatibleSteps { n: 4, max: 6 })
    ));
    let quintic = SmoothFn::Polynomial { coefficients: vec![1.0; 6] };
    assert_eq!(correction_experiment(&quintic, &[4], 10, 0).unwrap_err(), StochasticError::Degree(5));
}

#[test]
fn function_json_round_trip() {
    let f = SmoothFn::Polynomial { coefficients: vec![0.1, -0.2, 0.3] };
    let s = serde_json::to_string(&f).unwrap();
    assert_eq!(s, r#"{"kind":"polynomial","coefficients":[0.1,-0.2,0.3]}"#);
    assert_eq!(serde_json::from_str::<SmoothFn>(&s).unwrap(), f);
    assert!(serde_json::from_str::<SmoothFn>(r#"{"kind":"sin","amplitude":1,"frequency":1,"phase":0}"#).is_err());
}

proptest! {
    #[test]
    fn increment_sum_telescopes(xs in prop::collection::vec(-3.0f64..3.0, 2..40), a in -2.0f64..2.0) {
        let g = SmoothFn::Polynomial { coefficients: vec![0.0, a, 0.5, -0.1] };
        let s = prescription_sum(&xs, &Prescription::Increment { g: g.clone() });
        let exact = g.value(xs[xs.len() - 1]) - g.value(xs[0]);
        prop_assert!((s - exact).abs() < 1e-9);
    }

    #[test]
    fn second_order_forms_share_two_derivatives(x in -2.0f64..2.0, c in -1.0f64..1.0) {
        // F_left − F_mid = O(d³)
        let f = SmoothFn::Sin { amplitude: 1.0, frequency: 1.3 };
        let g = SmoothFn::Polynomial { coefficients: vec![c, 0.4] };
        let a = Prescription::SecondOrder { f: f.clone(), g: g.clone() };
        let b = Prescription::MidpointSecondOrder { f, g };
        let d1 = (a.eval(x, x + 1e-2) - b.eval(x, x + 1e-2)).abs();
        let d2 = (a.eval(x, x + 5e-3) - b.eval(x, x + 5e-3)).abs();
        prop_assert!(d1 < 1e-5);
        prop_assert!(d2 < d1 / 6.0 + 1e-15);
    }
}
