use ergodiclab_core::heisenberg::{
    commutator, fiber_section_cloud, heis_mul, nil_step, reduce, torus_factor, HeisElement,
    HeisenbergPoint, NilRotation,
};
use ergodiclab_core::measures::{circle_dist, stratified_haar, wrap, TorusPoint};
use ergodiclab_core::metrics::{calibrate_noise_floor, haar_distance};
use ergodiclab_core::torus_skew::{rotate_last, vertical_rotation_defect, vertical_rotation_defect_of, Rotation, SkewSystem};
use ergodiclab_core::unipotent::FloatMatrix;
use ergodiclab_core::{
    cloud_on_curve, fourier_coefficient, golden_alpha, project, pushforward, rng, sample_haar,
    FunctionSpec, Sampling, Space, StepMap,
};
use proptest::prelude::*;
use rand::Rng;

fn skew3() -> SkewSystem {
    let f1 = FunctionSpec::linear(1, 1).with_harmonic([1], 0.04, 0.02).unwrap();
    let f2 = FunctionSpec::linear(2, 2).with_harmonic([1, 1], 0.0, 0.03).unwrap().with_harmonic([2, 0], 0.01, 0.0).unwrap();
    SkewSystem::new(golden_alpha(), vec![f1, f2]).unwrap()
}

#[test]
fn base_coordinate_is_a_rotation() {
    let sys = skew3();
    let mut p = vec![0.3, 0.1, 0.9];
    for _ in 0..500 {
        sys.step_point(&mut p);
    }
    assert!(circle_dist(p[0] - (0.3 + 500.0 * golden_alpha())) < 1e-10);
}

#[test]
fn derivative_along_orbit_matches_finite_differences() {
    // basis (d/dx_d, ..., d/dx_1): matrix entry (a, b) is dT^n_{d-a} / dx_{d-b}
    let sys = skew3();
    let d = sys.dim();
    let mut rng = rng::stream(3, "fd");
    for n in [1usize, 2, 7, 20, 50] {
        let x: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
        let jac = sys.orbit_derivative(&x, n as u64).unwrap();
        let h = 1e-6;
        for b in 0..d {
            let col = d - 1 - b;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[col] += h;
            xm[col] -= h;
            let (yp, ym) = (sys.lifted_orbit(&xp, n), sys.lifted_orbit(&xm, n));
            for a in 0..d {
                let row = d - 1 - a;
                let fd = (yp[row] - ym[row]) / (2.0 * h);
                let exact = jac.get(a, b);
                let scale = exact.abs().max(1.0);
                assert!((fd - exact).abs() / scale < 1e-3, "n={n} ({a},{b}): fd {fd} vs {exact}");
            }
        }
    }
}

#[test]
fn jacobian_is_unipotent_and_winding_is_conserved() {
    let sys = skew3();
    let x = [0.2, 0.7, 0.4];
    let j: FloatMatrix = sys.jacobian(&x);
    for a in 0..3 {
        assert_eq!(j.get(a, a), 1.0);
        for b in 0..a {
            assert_eq!(j.get(a, b), 0.0);
        }
    }
    // midpoint rule integrates trigonometric polynomials of degree < m exactly
    let m = 64;
    for (k, f) in sys.skews().iter().enumerate() {
        let mut prefix = vec![0.37; k + 1];
        let mut total = 0.0;
        for i in 0..m {
            prefix[k] = (i as f64 + 0.5) / m as f64;
            total += f.partial(&prefix, k) / m as f64;
        }
        assert!((total - f.winding() as f64).abs() < 1e-12);
    }
}

#[test]
fn vertical_defect_by_two_routes() {
    // R_t multiplies mu^(k) by exp(-2 pi i k_d t)
    let sys = skew3();
    let mu = sample_haar(Space::torus(3), 300, 8).unwrap();
    let t = 0.37;
    let pushed = pushforward(&mu, &sys, 5).unwrap();
    let literal = vertical_rotation_defect(&sys, &mu, t, 5, 3, 1.0).unwrap();
    let mut via_coefficients = 0.0;
    for k1 in -3i64..=3 {
        for k2 in -3i64..=3 {
            for k3 in -3i64..=3 {
                if (k1, k2, k3) == (0, 0, 0) {
                    continue;
                }
                let c = fourier_coefficient(&pushed, &[k1, k2, k3]).unwrap().norm();
                let phase = 2.0 * (std::f64::consts::PI * k3 as f64 * t).sin().abs();
                via_coefficients += c * phase / (1.0 + (k1 * k1 + k2 * k2 + k3 * k3) as f64);
            }
        }
    }
    assert!((literal - via_coefficients).abs() < 1e-10, "{literal} vs {via_coefficients}");
    let rotated = rotate_last(&pushed, t);
    assert!(rotated.iter().zip(pushed.iter()).all(|((a, _), (b, _))| circle_dist(a[2] - b[2] - t) < 1e-12));
}

#[test]
fn product_lebesgue_is_vertically_invariant() {
    let sys = SkewSystem::linear_skew(golden_alpha()).unwrap();
    let grid = stratified_haar(Space::torus(2), 100).unwrap();
    for n in [0, 1, 10, 100] {
        assert!(vertical_rotation_defect(&sys, &grid, 0.37, n, 8, 1.0).unwrap() < 1e-6);
    }
    assert_eq!(vertical_rotation_defect_of(&grid, 0.0, 8, 1.0).unwrap(), 0.0);
}

#[test]
fn two_step_orbit_closed_form() {
    let g = golden_alpha();
    let sys = SkewSystem::linear_skew(g).unwrap();
    let p = sys.step(&sys.step(&TorusPoint::new(vec![0.0, 0.0])).unwrap()).unwrap();
    assert!(circle_dist(p.coords()[0] - 2.0 * g) < 1e-15);
    assert!(circle_dist(p.coords()[1] - g) < 1e-15);
}

/// All lattice translates of `g` with small integer entries that land in the cube.
fn lattice_search(g: &HeisElement) -> Vec<[f64; 3]> {
    let mut hits = Vec::new();
    for a in -3..=3 {
        for b in -3..=3 {
            for c in -10..=10 {
                let h = heis_mul(g, &HeisElement::new(a as f64, b as f64, c as f64));
                if [h.x, h.y, h.z].iter().all(|v| (0.0..1.0).contains(v)) {
                    hits.push([h.x, h.y, h.z]);
                }
            }
        }
    }
    hits
}

#[test]
fn reduction_matches_lattice_search() {
    let g = HeisElement::new(1.5, 0.25, 0.0);
    let hits = lattice_search(&g);
    assert_eq!(hits.len(), 1);
    assert_eq!(reduce(&g).coords(), hits[0]);
    let mut rng = rng::stream(5, "lattice");
    for _ in 0..200 {
        let g = HeisElement::new(rng.gen_range(-1.5..2.5), rng.gen_range(-1.5..2.5), rng.gen_range(-1.5..2.5));
        let hits = lattice_search(&g);
        assert_eq!(hits.len(), 1, "{g:?}");
        let r = reduce(&g).coords();
        for i in 0..3 {
            assert!((r[i] - hits[0][i]).abs() < 1e-12);
        }
    }
}

fn close3(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    // coordinates near 0 and 1 are the same point of the cube boundary
    a.iter().zip(b).all(|(x, y)| circle_dist(x - y) < tol)
}

fn elem() -> impl Strategy<Value = HeisElement> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| HeisElement::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_law_is_associative_and_two_step(g in elem(), h in elem(), k in elem()) {
        let l = heis_mul(&heis_mul(&g, &h), &k);
        let r = heis_mul(&g, &heis_mul(&h, &k));
        prop_assert!((l.x - r.x).abs() < 1e-12 && (l.y - r.y).abs() < 1e-12 && (l.z - r.z).abs() < 1e-12);
        let c = commutator(&g, &h);
        prop_assert!(c.x.abs() < 1e-12 && c.y.abs() < 1e-12);
        let cc = commutator(&c, &k);
        prop_assert!(cc.x.abs() < 1e-12 && cc.y.abs() < 1e-12 && cc.z.abs() < 1e-12);
    }

    #[test]
    fn reduce_is_lattice_invariant_and_idempotent(g in elem(), a in -4i32..5, b in -4i32..5, c in -4i32..5) {
        let gamma = HeisElement::new(a as f64, b as f64, c as f64);
        let r1 = reduce(&g).coords();
        let r2 = reduce(&heis_mul(&g, &gamma)).coords();
        prop_assert!(close3(r1, r2, 1e-9));
        let again = reduce(&reduce(&g).element()).coords();
        prop_assert_eq!(again, r1);
    }

    #[test]
    fn nil_step_covers_the_torus_rotation(x in 0.0..1.0f64, y in 0.0..1.0f64, z in 0.0..1.0f64) {
        let rot = NilRotation::default();
        let p = HeisenbergPoint::new(x, y, z);
        let q = nil_step(&rot, &p);
        let tp = torus_factor(&p).translate(&[rot.xu, rot.yu]).unwrap();
        prop_assert_eq!(torus_factor(&q), tp);
    }
}

#[test]
fn identity_rotation_fixes_points() {
    let id = NilRotation::new(0.0, 0.0, 0.0).unwrap();
    let p = HeisenbergPoint::new(0.3, 0.7, 0.9);
    assert_eq!(nil_step(&id, &p), p);
    assert_eq!(torus_factor(&p).coords(), &[0.3, 0.7]);
}

#[test]
fn iterated_steps_follow_the_closed_form_power() {
    let rot = NilRotation::default();
    let u = rot.element();
    let start = HeisenbergPoint::new(0.0, 0.0, 0.0);
    let mut p = start;
    for n in 1..=200i64 {
        p = nil_step(&rot, &p);
        let want = reduce(&u.pow(n)).coords();
        assert!(close3(p.coords(), want, 1e-9), "n={n}");
    }
    // unreduced z-component n(n-1)/2 xu yu + n zu: quadratic drift
    let z = |n: i64| u.pow(n).z;
    let second = z(12) - 2.0 * z(11) + z(10);
    assert!((second - u.x * u.y).abs() < 1e-12);
}

#[test]
fn fiber_section_projects_to_lebesgue() {
    let cloud = fiber_section_cloud(0.37, 10_000, 0).unwrap();
    let base = project(&cloud, &[0, 1]).unwrap();
    assert!(haar_distance(&base, 8, 1.0).unwrap() < 1e-8);
    let d0 = haar_distance(&cloud, 8, 0.0).unwrap();
    assert!(d0 >= 1.0);
    assert!((fourier_coefficient(&cloud, &[0, 0, 1]).unwrap().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn haar_is_invariant_under_nilrotation() {
    let rot = NilRotation::default();
    let n = 20_000;
    let mu = sample_haar(Space::Heisenberg, n, 77).unwrap();
    let floor = calibrate_noise_floor(Space::Heisenberg, n, 4, 1.0, 9, 5).unwrap();
    let pushed = pushforward(&mu, &rot, 1000).unwrap();
    assert!(haar_distance(&pushed, 4, 1.0).unwrap() <= 2.0 * floor);
    let base = project(&pushed, &[0, 1]).unwrap();
    let base_floor = calibrate_noise_floor(Space::torus(2), n, 4, 1.0, 9, 5).unwrap();
    assert!(haar_distance(&base, 4, 1.0).unwrap() <= 2.0 * base_floor);
}

#[test]
fn torus_rotation_cloud_steps() {
    let rot = Rotation::new(vec![0.25]).unwrap();
    let c = cloud_on_curve(&FunctionSpec::constant(1, 0.0), 2, Sampling::Stratified).unwrap();
    let base = project(&c, &[0]).unwrap();
    let out = pushforward(&base, &rot, 2).unwrap();
    assert_eq!(out.points(), &[wrap(0.25 + 0.5), wrap(0.75 + 0.5)]);
}
