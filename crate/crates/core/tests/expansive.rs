use ergodiclab_core::expansive::{
    beta_bound, coboundary_residual, coboundary_skew, delta_n, delta_n_recursive, kappa,
    limit_curve_extract, make_example_5_5, s_set, tau, total_length, uniform_circle_spread,
    CurveSpec, Example55Options, ExpansiveSystem, ACTIVE_INTERVAL, FLAT_INTERVAL,
};
use ergodiclab_core::measures::wrap;
use ergodiclab_core::{golden_alpha, sample_haar, Error, FunctionSpec, ParticleCloud, Space};
use proptest::prelude::*;

const TAU: f64 = std::f64::consts::TAU;

fn wobbly_skew() -> FunctionSpec {
    FunctionSpec::linear(1, 1).with_harmonic([1], 0.0, 0.1 / TAU).unwrap()
}

fn system(p: i64) -> ExpansiveSystem {
    ExpansiveSystem::new(golden_alpha(), p, wobbly_skew()).unwrap()
}

fn flat_curve() -> CurveSpec {
    CurveSpec::new(FunctionSpec::constant(1, 0.0)).unwrap()
}

fn wavy_curve() -> CurveSpec {
    CurveSpec::new(FunctionSpec::constant(1, 0.2).with_harmonic([2], 0.05, -0.03).unwrap()).unwrap()
}

#[test]
fn slope_recursion_agrees_with_closed_form() {
    for p in [2, -2, 3] {
        let sys = system(p);
        for x in [0.0, 0.13, 0.5, 0.77] {
            for n in [0, 1, 5, 20, 37] {
                let a = delta_n(&sys, &wavy_curve(), x, n).unwrap();
                let b = delta_n_recursive(&sys, &wavy_curve(), x, n).unwrap();
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "p={p} x={x} n={n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn slope_guard_trips_past_sixty_bits() {
    let sys = system(2);
    assert!(delta_n(&sys, &flat_curve(), 0.1, 60).is_ok());
    assert!(matches!(delta_n(&sys, &flat_curve(), 0.1, 61), Err(Error::NumericGuard { .. })));
    assert!(matches!(delta_n_recursive(&system(3), &flat_curve(), 0.1, 38), Err(Error::NumericGuard { .. })));
}

#[test]
fn slope_pushforward_by_finite_differences() {
    // Delta_n is d/dx of the n-th image of the curve, read over x + n alpha
    let sys = system(2);
    let curve = wavy_curve();
    let image = |x: f64, n: usize| {
        let mut y = curve.gamma().eval_lift(&[x]);
        for k in 0..n {
            y = 2.0 * y + sys.f().eval_lift(&[x + k as f64 * sys.alpha()]);
        }
        y
    };
    let h = 1e-7;
    for n in [1, 4, 10] {
        let x = 0.31;
        let fd = (image(x + h, n) - image(x - h, n)) / (2.0 * h);
        let exact = delta_n(&sys, &curve, x, n).unwrap();
        assert!((fd - exact).abs() / exact.abs().max(1.0) < 1e-5, "n={n}: {fd} vs {exact}");
    }
}

#[test]
fn slope_tracks_the_rescaled_series() {
    let sys = system(2);
    let curve = wavy_curve();
    let bound = sys.sup_f_prime() / 1.0;
    for n in [1, 10, 25] {
        for i in 0..50 {
            let x = i as f64 / 50.0;
            let t = tau(&sys, &curve, x, 80).unwrap();
            let d = delta_n(&sys, &curve, x, n).unwrap();
            let gap = (d - 2f64.powi(n as i32 - 1) * t.value).abs();
            assert!(gap <= bound + 1e-9 && gap <= kappa(&sys), "n={n} x={x}: {gap}");
        }
    }
}

#[test]
fn tail_bound_controls_truncation() {
    let sys = system(3);
    let curve = wavy_curve();
    for x in [0.05, 0.4, 0.95] {
        let long = tau(&sys, &curve, x, 60).unwrap().value;
        for n_trunc in [1, 2, 5, 10] {
            let t = tau(&sys, &curve, x, n_trunc).unwrap();
            assert!((t.value - long).abs() <= t.tail_bound + 1e-12);
        }
    }
    assert!(tau(&sys, &curve, 0.1, 0).is_err());
}

#[test]
fn series_functional_equation() {
    // with gamma = 0: tau(x) = f'(x) + tau(x + alpha) / p
    let sys = system(2);
    let c = flat_curve();
    for i in 0..20 {
        let x = i as f64 / 20.0;
        let lhs = tau(&sys, &c, x, 60).unwrap().value;
        let rhs = sys.f().derivative(x) + tau(&sys, &c, wrap(x + sys.alpha()), 60).unwrap().value / 2.0;
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn coboundary_curves_have_bounded_slopes() {
    let gamma = FunctionSpec::constant(1, 0.0).with_harmonic([1], 0.0, 0.1).unwrap();
    for p in [2, 3, -2] {
        let f = coboundary_skew(golden_alpha(), p, &gamma).unwrap();
        let sys = ExpansiveSystem::new(golden_alpha(), p, f).unwrap();
        let curve = CurveSpec::new(gamma.clone()).unwrap();
        assert!(coboundary_residual(&sys, &curve) < 1e-9);
        for n in [1, 5, 20] {
            for i in 0..40 {
                let x = i as f64 / 40.0;
                assert!(tau(&sys, &curve, x, 60).unwrap().value.abs() < 1e-9);
                assert!(delta_n(&sys, &curve, x, n).unwrap().abs() <= kappa(&sys) + 1e-9);
            }
        }
    }
}

#[test]
fn coboundary_residual_sees_perturbations() {
    let gamma = FunctionSpec::constant(1, 0.0).with_harmonic([1], 0.0, 0.1).unwrap();
    let curve = CurveSpec::new(gamma.clone()).unwrap();
    let f = coboundary_skew(golden_alpha(), 2, &gamma).unwrap().with_harmonic([3], 0.01, 0.0).unwrap();
    let r = coboundary_residual(&ExpansiveSystem::new(golden_alpha(), 2, f).unwrap(), &curve);
    assert!((0.005..=0.02).contains(&r), "{r}");
    // windings: f = gamma o R - p gamma forces winding(f) = winding(gamma) (1 - p)
    let line = CurveSpec::new(FunctionSpec::linear(1, 1)).unwrap();
    assert_eq!(coboundary_residual(&system(2), &line), f64::INFINITY);
    let f = coboundary_skew(golden_alpha(), 2, &FunctionSpec::linear(1, 1)).unwrap();
    assert_eq!(f.winding(), -1);
    assert!(coboundary_residual(&ExpansiveSystem::new(golden_alpha(), 2, f).unwrap(), &line) < 1e-9);
}

#[test]
fn horizontal_curve_winds_everywhere() {
    let sys = system(2);
    let report = s_set(&sys, &flat_curve(), 0.5, 2000, 40).unwrap();
    assert_eq!(report.certified_in, vec![[0.0, 1.0]]);
    assert!(report.certified_out.is_empty() && report.undetermined.is_empty());
    // |f'| = |1 + 0.1 cos| < 1.1 off x = 0
    assert_eq!(report.beta, 1.0);
    assert!(matches!(s_set(&sys, &flat_curve(), 1e-30, 100, 40), Err(Error::Precondition(_))));
}

#[test]
fn constructed_curve_is_flat_on_half_and_winding_on_the_other() {
    let sys = system(2);
    let ex = make_example_5_5(&sys, &Example55Options::default()).unwrap();
    assert!(ex.flat_sup <= 0.01 && ex.active_inf >= 0.05);
    let report = s_set(&sys, &ex.curve, 0.02, 4000, 60).unwrap();
    let covered = |set: &[[f64; 2]], [a, b]: [f64; 2]| set.iter().any(|[lo, hi]| *lo <= a && b <= *hi);
    assert!(covered(&report.certified_out, FLAT_INTERVAL));
    assert!(covered(&report.certified_in, ACTIVE_INTERVAL));
    let s_measure = total_length(&report.certified_in);
    assert!(s_measure > 0.4 && s_measure < 0.6, "{s_measure}");
    // direct oracle for tau on a few points
    for x in [0.1, 0.2, 0.3, 0.4] {
        let mut series = 0.0;
        for n in 0..80 {
            series += 0.5f64.powi(n) * sys.f().derivative(wrap(x + n as f64 * sys.alpha()));
        }
        assert!((2.0 * ex.curve.derivative(x) + series).abs() < 0.01);
    }
    // beta counts the flat half plus the smooth transition at its ends, about 0.09 wide
    let beta = beta_bound(&sys, &ex.curve, 10_000).unwrap();
    assert!(beta >= 0.5 - 0.01 && beta <= 0.5 + 0.1, "beta {beta}");
    assert!(beta >= total_length(&report.certified_out) - 1e-12);
}

#[test]
fn construction_reports_unreachable_targets() {
    let opts = Example55Options { flat_tol: 1e-20, max_harmonics: 64, ..Default::default() };
    assert!(matches!(make_example_5_5(&system(2), &opts), Err(Error::Construction(_))));
}

#[test]
fn curve_extract_of_a_graph() {
    let n = 200;
    let coords: Vec<f64> = (0..n).flat_map(|i| {
        let x = (i as f64 + 0.5) / n as f64;
        [x, x / 2.0]
    }).collect();
    let cloud = ParticleCloud::new(Space::torus(2), coords, vec![1.0; n]).unwrap();
    let ex = limit_curve_extract(&cloud, 0.0, 1.0).unwrap();
    assert!(ex.max_vertical_spread < 1e-6);
    assert!((ex.lipschitz_estimate - 0.5).abs() < 1e-6);
    assert!(ex.gaps.is_empty());
    let half = limit_curve_extract(&cloud, 0.0, 0.5).unwrap();
    assert_eq!(half.bins.iter().filter(|b| b.count > 0).count(), 100);
    assert_eq!(half.gaps.len(), 100);
}

#[test]
fn curve_extract_of_uniform_cloud() {
    // spread of a uniform variable on the circle is 1/sqrt(12) = 0.28867513...
    let cloud = sample_haar(Space::torus(2), 1_000_000, 5).unwrap();
    let ex = limit_curve_extract(&cloud, 0.0, 1.0).unwrap();
    assert!((uniform_circle_spread() - 0.288_675_134_594_813).abs() < 1e-12);
    assert!((ex.min_vertical_spread() - 0.288_675).abs() < 0.01);
    assert!((ex.max_vertical_spread - 0.288_675).abs() < 0.01);
    assert!(limit_curve_extract(&sample_haar(Space::torus(3), 10, 1).unwrap(), 0.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_and_beta_ranges(a in -0.5..0.5f64, b in -0.5..0.5f64, c in -0.3..0.3f64, p in 2i64..5) {
        let f = FunctionSpec::linear(1, 1).with_harmonic([1], a / TAU, b / TAU).unwrap();
        let sys = ExpansiveSystem::new(golden_alpha(), p, f).unwrap();
        let curve = CurveSpec::new(FunctionSpec::constant(1, 0.0).with_harmonic([2], c, 0.0).unwrap()).unwrap();
        let k = kappa(&sys);
        prop_assert!(k >= sys.sup_f_prime() && k <= 2.0 * sys.sup_f_prime() + 1e-12);
        let beta = beta_bound(&sys, &curve, 1000).unwrap();
        prop_assert!((0.0..=1.0).contains(&beta));
        for x in [0.1, 0.6] {
            let t = tau(&sys, &curve, x, 50).unwrap();
            let d = delta_n(&sys, &curve, x, 20).unwrap();
            prop_assert!((d - (p as f64).powi(19) * t.value).abs() <= k + 1e-6);
        }
    }
}
