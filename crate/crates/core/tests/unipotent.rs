use std::sync::Arc;

use ergodiclab_core::metrics::log_log_slope;
use ergodiclab_core::torus_skew::{Rotation, SkewSystem};
use ergodiclab_core::unipotent::{
    cocycle_product_with, lambda_constant, matrix_power_polynomial, met_convergence_check,
    met_limit_prediction, perturbation_bound, ratio, CocycleBase, CocycleSpec, FloatMatrix,
    FunctionMatrix, Generator, RationalMatrix,
};
use ergodiclab_core::{golden_alpha, rng, FunctionSpec, StepMap};
use num::{BigInt, BigRational, One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn factorial(k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from((1..=k).product::<u64>()))
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

fn random_matrix(d: usize, rng: &mut impl Rng) -> RationalMatrix {
    RationalMatrix::from_fn(d, |_, _| random_rational(rng))
}

/// `u^n` by `n` plain multiplications.
fn naive_power(u: &RationalMatrix, n: u64) -> RationalMatrix {
    let mut p = RationalMatrix::identity(u.dim());
    for _ in 0..n {
        p = p.multiply(u).unwrap();
    }
    p
}

fn binomial(n: i64, k: i64) -> BigRational {
    let mut v = BigRational::one();
    for i in 0..k {
        v = v * ratio(n - i, i + 1);
    }
    v
}

#[test]
fn lambda_is_inverse_factorial() {
    for k in 0..=6u64 {
        assert_eq!(lambda_constant(k as usize), BigRational::one() / factorial(k), "k={k}");
    }
}

#[test]
fn all_ones_superdiagonal_gives_binomials() {
    // (I + N)^n has (0, k) entry C(n, k), whose leading coefficient is lambda(k)
    let d = 7;
    let j = RationalMatrix::from_fn(d, |i, j| if j == i + 1 { BigRational::one() } else { BigRational::zero() });
    for k in 1..d {
        let poly = matrix_power_polynomial(&j, 0, k).unwrap();
        assert_eq!(poly.degree(), Some(k));
        assert_eq!(poly.leading_coefficient(), lambda_constant(k));
        for n in [0i64, 3, 11, 40] {
            assert_eq!(poly.eval_int(n), binomial(n, k as i64));
        }
    }
}

#[test]
fn power_polynomials_match_direct_powers() {
    let mut rng = rng::stream(11, "power-poly");
    for case in 0..200 {
        let d = 2 + case % 4;
        let u = random_matrix(d, &mut rng);
        let n = rng.gen_range(0..60u64);
        let direct = naive_power(&u, n);
        assert_eq!(u.pow(n), direct);
        for i in 0..d {
            for j in i..d {
                let poly = matrix_power_polynomial(&u, i, j).unwrap();
                assert!(poly.degree().map_or(true, |g| g <= j - i));
                assert_eq!(poly.eval_int(n as i64), direct.get(i, j), "case {case} ({i},{j}) n={n}");
                let chain: BigRational = (i..j).map(|k| u.get(k, k + 1)).fold(BigRational::one(), |a, b| a * b);
                assert_eq!(poly.coefficient(j - i), lambda_constant(j - i) * chain);
            }
        }
    }
}

#[test]
fn dilation_is_a_homomorphism() {
    let mut rng = rng::stream(12, "dilation");
    for _ in 0..100 {
        let d = rng.gen_range(2..=5);
        let a = random_matrix(d, &mut rng);
        let b = random_matrix(d, &mut rng);
        let s = ratio(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let t = ratio(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab.dilate(&t).unwrap(), a.dilate(&t).unwrap().multiply(&b.dilate(&t).unwrap()).unwrap());
        assert_eq!(a.dilate(&s).unwrap().dilate(&t).unwrap(), a.dilate(&(s.clone() * t.clone())).unwrap());
        assert_eq!(a.dilate(&BigRational::one()).unwrap(), a);
    }
    assert!(RationalMatrix::identity(3).dilate(&BigRational::zero()).is_err());
}

#[test]
fn rational_cocycle_identity_is_exact() {
    // base: rational rotation of the circle, generator depends on the point
    let step = |x: &BigRational| {
        let y = x + ratio(3, 7);
        if y >= BigRational::one() { y - BigRational::one() } else { y }
    };
    let gen = |x: &BigRational| {
        RationalMatrix::from_fn(4, |i, j| x.clone() * ratio((i + 2 * j) as i64, 3) + ratio(1, (j - i) as i64))
    };
    let x0 = ratio(1, 5);
    for (n, m) in [(0u64, 5u64), (3, 4), (10, 7)] {
        let whole = cocycle_product_with(4, &x0, n + m, step, gen).unwrap();
        let mut xn = x0.clone();
        for _ in 0..n {
            xn = step(&xn);
        }
        let first = cocycle_product_with(4, &x0, n, step, gen).unwrap();
        let second = cocycle_product_with(4, &xn, m, step, gen).unwrap();
        assert_eq!(whole, second.multiply(&first).unwrap());
    }
}

fn skew_three() -> SkewSystem {
    let f1 = FunctionSpec::linear(1, 1).with_harmonic([1], 0.03, 0.02).unwrap();
    let f2 = FunctionSpec::linear(2, 1).with_harmonic([1, 0], 0.0, 0.04).unwrap().with_harmonic([1, 1], 0.01, 0.0).unwrap();
    SkewSystem::new(golden_alpha(), vec![f1, f2]).unwrap()
}

#[test]
fn float_cocycle_identity() {
    let sys = skew_three();
    let spec = CocycleSpec::derivative(sys.clone());
    let x = vec![0.12, 0.55, 0.9];
    let (n, m) = (40u64, 25u64);
    let whole = spec.product(&x, n + m).unwrap();
    let mut xn = x.clone();
    for _ in 0..n {
        sys.step_point(&mut xn);
    }
    let split = spec.product(&xn, m).unwrap().multiply(&spec.product(&x, n).unwrap()).unwrap();
    for (a, b) in whole.upper().iter().zip(split.upper()) {
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}

#[test]
fn derivative_prediction_uses_windings() {
    let sys = SkewSystem::furstenberg(golden_alpha(), &[2, 3]).unwrap();
    let pred = met_limit_prediction(&CocycleSpec::derivative(sys), 0, 0).unwrap();
    // basis (x3, x2, x1): superdiagonal carries d f2/d x2 = 3 then d f1/d x1 = 2
    assert_eq!(pred.superdiagonal(), vec![3.0, 2.0]);
    assert_eq!(pred.get(0, 2), 3.0);
}

#[test]
fn custom_generator_prediction_uses_haar_means() {
    let rot = Rotation::new(vec![golden_alpha()]).unwrap();
    let gen: Arc<dyn Fn(&[f64]) -> FloatMatrix + Send + Sync> = Arc::new(|x: &[f64]| {
        FloatMatrix::from_fn(3, |i, j| if j == i + 1 { 1.0 + (std::f64::consts::TAU * x[0]).cos() } else { 0.0 })
    });
    let spec = CocycleSpec::new(CocycleBase::Rotation(rot), Generator::Custom(gen), 3).unwrap();
    let pred = met_limit_prediction(&spec, 200_000, 1).unwrap();
    assert!((pred.get(0, 1) - 1.0).abs() < 0.01);
    assert!((pred.get(0, 2) - 0.5).abs() < 0.01);
}

#[test]
fn dilated_products_converge_with_rate() {
    let sys = skew_three();
    let spec = CocycleSpec::derivative(sys.clone());
    let pred = met_limit_prediction(&spec, 0, 0).unwrap();
    let x = vec![0.3, 0.6, 0.1];
    let ns: Vec<u64> = vec![100, 300, 1000, 3000, 10_000, 30_000, 100_000];
    let rows = met_convergence_check(&spec, &x, &ns, &pred).unwrap();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.max_deviation)).collect();
    let slope = log_log_slope(&pts).unwrap();
    assert!(slope <= -0.4, "slope {slope}: {pts:?}");
    assert!(rows.last().unwrap().max_deviation < 0.01);
    // the same limit from the next orbit point
    let mut tx = x.clone();
    sys.step_point(&mut tx);
    let again = met_convergence_check(&spec, &tx, &[100_000], &pred).unwrap();
    assert!(again[0].max_deviation < 0.01);
}

#[test]
fn perturbed_generators_respect_the_bound() {
    let rot = Rotation::new(vec![golden_alpha(), 2f64.sqrt() - 1.0]).unwrap();
    let entry = |c: f64, a: f64| {
        FunctionSpec::constant(2, c).with_harmonic([1, 0], a, 0.0).unwrap().with_harmonic([0, 1], 0.0, a).unwrap()
    };
    let make = |shift: f64| {
        let fm = FunctionMatrix::new(
            4,
            vec![
                (0, 1, entry(1.0 + shift, 0.2)),
                (1, 2, entry(0.8 - shift, 0.1)),
                (2, 3, entry(1.2 + shift, 0.15)),
                (0, 2, entry(0.3, 0.1)),
            ],
        )
        .unwrap();
        CocycleSpec::new(CocycleBase::Rotation(rot.clone()), Generator::Functions(fm), 4).unwrap()
    };
    let delta = 0.05;
    let (a, b) = (make(0.0), make(delta));
    let (pa, pb) = (met_limit_prediction(&a, 0, 0).unwrap(), met_limit_prediction(&b, 0, 0).unwrap());
    let m = 1.2;
    let n = 10_000;
    let x = [0.2, 0.4];
    let ca = a.product(&x, n).unwrap().dilate(&(1.0 / n as f64)).unwrap();
    let cb = b.product(&x, n).unwrap().dilate(&(1.0 / n as f64)).unwrap();
    for i in 0..4 {
        for j in i + 1..4 {
            let bound = perturbation_bound(j - i, m, delta);
            assert!((pa.get(i, j) - pb.get(i, j)).abs() <= bound + 1e-12, "limit ({i},{j})");
            if j > i + 1 {
                assert!((ca.get(i, j) - cb.get(i, j)).abs() <= 2.0 * bound, "finite ({i},{j})");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn powers_add(seed in 0u64..10_000, n in 0u64..30, m in 0u64..30, d in 2usize..6) {
        let mut rng = rng::stream(seed, "powers");
        let u = random_matrix(d, &mut rng);
        prop_assert_eq!(u.pow(n + m), u.pow(n).multiply(&u.pow(m)).unwrap());
    }
}
