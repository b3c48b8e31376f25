//! Weak-star distance estimates, distance profiles and density statistics.

use num::complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FrequencySet;
use crate::measures::{pairwise_sum, pushforward, sample_haar, ParticleCloud, Space, StepMap};
use crate::rng;

const TAU: f64 = std::f64::consts::TAU;

/// Frequency cutoff of the random part of the Lipschitz test family.
const FAMILY_CUTOFF: i64 = 3;
const FAMILY_MAX_TERMS: usize = 4;

/// Parameters shared by all distance estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricParams {
    #[serde(rename = "K", default = "default_cutoff")]
    pub cutoff: i64,
    #[serde(default = "default_decay")]
    pub s: f64,
    #[serde(default = "default_family_size")]
    pub family_size: usize,
}

fn default_cutoff() -> i64 {
    8
}

fn default_decay() -> f64 {
    1.0
}

fn default_family_size() -> usize {
    64
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { cutoff: 8, s: 1.0, family_size: 64 }
    }
}

impl MetricParams {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 1 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(Error::invalid("decay exponent s must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// A Fourier-proxy distance paired with a certified lower bound on `||mu - nu||_*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub fourier_value: f64,
    pub lipschitz_lower: f64,
    #[serde(rename = "K")]
    pub cutoff: i64,
    pub family_size: usize,
}

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid("decay exponent s must be finite and nonnegative"));
    }
    Ok(())
}

fn weighted_gap(
    set: &FrequencySet,
    s: f64,
    mu: &[Complex64],
    nu: Option<&[Complex64]>,
) -> f64 {
    let weights = set.sobolev_weights(s);
    let terms: Vec<f64> = match nu {
        Some(nu) => weights.iter().zip(mu.iter().zip(nu)).map(|(w, (a, b))| 2.0 * w * (a - b).norm()).collect(),
        None => weights.iter().zip(mu).map(|(w, a)| 2.0 * w * a.norm()).collect(),
    };
    pairwise_sum(&terms)
}

/// `sum_{0 < |k|_inf <= K} (1 + |k|^2)^(-s) |mu^(k) - nu^(k)|`.
pub fn fourier_distance(mu: &ParticleCloud, nu: &ParticleCloud, cutoff: i64, s: f64) -> Result<f64> {
    let set = FrequencySet::cube(mu.dim(), cutoff)?;
    fourier_distance_on(mu, nu, &set, s)
}

/// [`fourier_distance`] restricted to the frequencies of `set`.
pub fn fourier_distance_on(
    mu: &ParticleCloud,
    nu: &ParticleCloud,
    set: &FrequencySet,
    s: f64,
) -> Result<f64> {
    if mu.space() != nu.space() {
        return Err(Error::SpaceMismatch { expected: mu.space(), found: nu.space() });
    }
    check_s(s)?;
    let a = set.coefficients(mu)?;
    let b = set.coefficients(nu)?;
    Ok(weighted_gap(set, s, &a, Some(&b)))
}

/// Distance to Haar measure, whose coefficients vanish off `k = 0`.
pub fn haar_distance(mu: &ParticleCloud, cutoff: i64, s: f64) -> Result<f64> {
    let set = FrequencySet::cube(mu.dim(), cutoff)?;
    haar_distance_on(mu, &set, s)
}

/// [`haar_distance`] restricted to the frequencies of `set`.
pub fn haar_distance_on(mu: &ParticleCloud, set: &FrequencySet, s: f64) -> Result<f64> {
    check_s(s)?;
    let a = set.coefficients(mu)?;
    Ok(weighted_gap(set, s, &a, None))
}

/// A trigonometric test function `sum Re(c_j exp(2 pi i k_j.x))`, scaled to be
/// 1-Lipschitz (flat metric) and bounded by 1.
#[derive(Debug, Clone, PartialEq)]
struct TestFunction {
    terms: Vec<(usize, Complex64)>,
}

/// Prefix-stable family of admissible test functions for one dimension and seed.
#[derive(Debug, Clone)]
pub struct LipschitzFamily {
    freqs: FrequencySet,
    members: Vec<TestFunction>,
}

impl LipschitzFamily {
    /// The first `size` members. Members with the same index agree across sizes.
    ///
    /// The family starts with `cos` and `sin` of every frequency with
    /// `|k|_inf = 1`, scaled by `1/(2 pi |k|)`, followed by random mixtures of
    /// up to four frequencies with `|k|_inf <= 3`.
    pub fn new(dim: usize, seed: u64, size: usize) -> Result<Self> {
        let freqs = FrequencySet::cube(dim, FAMILY_CUTOFF)?;
        let norms: Vec<f64> = freqs
            .iter()
            .map(|k| k.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt())
            .collect();
        let mut members = Vec::with_capacity(size);
        for (idx, k) in freqs.iter().enumerate() {
            if members.len() >= size {
                break;
            }
            if k.iter().any(|c| c.abs() > 1) {
                continue;
            }
            let c = 1.0 / (TAU * norms[idx]);
            members.push(TestFunction { terms: vec![(idx, Complex64::new(c, 0.0))] });
            if members.len() < size {
                members.push(TestFunction { terms: vec![(idx, Complex64::new(0.0, -c))] });
            }
        }
        let mut rng = rng::stream(seed, "lipschitz-family");
        while members.len() < size {
            let count = rng.gen_range(1..=FAMILY_MAX_TERMS);
            let mut terms: Vec<(usize, Complex64)> = (0..count)
                .map(|_| {
                    let idx = rng.gen_range(0..freqs.len());
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    (idx, c)
                })
                .collect();
            let lip: f64 = terms.iter().map(|(i, c)| TAU * norms[*i] * c.norm()).sum();
            let sup: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
            let scale = lip.max(sup);
            if scale <= 0.0 {
                continue;
            }
            terms.iter_mut().for_each(|(_, c)| *c /= scale);
            members.push(TestFunction { terms });
        }
        Ok(LipschitzFamily { freqs, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Evaluates member `i` at `x`.
    pub fn eval(&self, i: usize, x: &[f64]) -> f64 {
        let freqs: Vec<Vec<i64>> = self.freqs.iter().collect();
        self.members[i]
            .terms
            .iter()
            .map(|(idx, c)| {
                let phase: f64 = freqs[*idx].iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                (c * Complex64::from_polar(1.0, TAU * phase)).re
            })
            .sum()
    }

    /// `max_f |int f dmu - int f dnu|` over the family, from coefficient
    /// differences `diff[k] = mu^(k) - nu^(k)` on the family's frequency set.
    fn max_gap(&self, diff: &[Complex64]) -> f64 {
        self.members
            .iter()
            .map(|f| f.terms.iter().map(|(idx, c)| (c * diff[*idx].conj()).re).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// Lower bound on `||mu - nu||_*` from a seeded family of admissible test functions.
/// Nondecreasing in `family_size`.
pub fn lipschitz_lower_bound(
    mu: &ParticleCloud,
    nu: &ParticleCloud,
    family_seed: u64,
    family_size: usize,
) -> Result<f64> {
    if mu.space() != nu.space() {
        return Err(Error::SpaceMismatch { expected: mu.space(), found: nu.space() });
    }
    let family = LipschitzFamily::new(mu.dim(), family_seed, family_size)?;
    let a = family.freqs.coefficients(mu)?;
    let b = family.freqs.coefficients(nu)?;
    let diff: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    Ok(family.max_gap(&diff))
}

/// [`lipschitz_lower_bound`] against Haar measure.
pub fn lipschitz_lower_bound_haar(mu: &ParticleCloud, family_seed: u64, family_size: usize) -> Result<f64> {
    let family = LipschitzFamily::new(mu.dim(), family_seed, family_size)?;
    let a = family.freqs.coefficients(mu)?;
    Ok(family.max_gap(&a))
}

/// Both estimates of the distance from `mu` to `nu`.
pub fn estimate(
    mu: &ParticleCloud,
    nu: &ParticleCloud,
    params: &MetricParams,
    family_seed: u64,
) -> Result<MetricEstimate> {
    params.validate()?;
    Ok(MetricEstimate {
        fourier_value: fourier_distance(mu, nu, params.cutoff, params.s)?,
        lipschitz_lower: lipschitz_lower_bound(mu, nu, family_seed, params.family_size)?,
        cutoff: params.cutoff,
        family_size: params.family_size,
    })
}

/// Both estimates of the distance from `mu` to Haar measure.
pub fn estimate_haar(mu: &ParticleCloud, params: &MetricParams, family_seed: u64) -> Result<MetricEstimate> {
    params.validate()?;
    Ok(MetricEstimate {
        fourier_value: haar_distance(mu, params.cutoff, params.s)?,
        lipschitz_lower: lipschitz_lower_bound_haar(mu, family_seed, params.family_size)?,
        cutoff: params.cutoff,
        family_size: params.family_size,
    })
}

/// Times `0, stride, 2 stride, ...` up to `n_max`, with `n_max` always included.
pub fn schedule(n_max: usize, stride: usize) -> Result<Vec<usize>> {
    if stride == 0 {
        return Err(Error::invalid("stride must be at least 1"));
    }
    let mut times: Vec<usize> = (0..=n_max).step_by(stride).collect();
    if times.last() != Some(&n_max) {
        times.push(n_max);
    }
    Ok(times)
}

/// Pushes `mu` forward incrementally and calls `observe(n, T^n_* mu)` at each
/// time of `times` (which must be nondecreasing).
pub fn observe_orbit<M, T, F>(map: &M, mu: &ParticleCloud, times: &[usize], mut observe: F) -> Result<Vec<T>>
where
    M: StepMap + ?Sized,
    F: FnMut(usize, &ParticleCloud) -> Result<T>,
{
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("observation times must be nondecreasing"));
    }
    let mut current = mu.clone();
    let mut at = 0;
    let mut out = Vec::with_capacity(times.len());
    for &n in times {
        current = pushforward(&current, map, n - at)?;
        at = n;
        out.push(observe(n, &current)?);
    }
    Ok(out)
}

/// `haar_distance(T^n_* mu)` at `n = 0, stride, ..., n_max`.
pub fn distance_profile<M: StepMap + ?Sized>(
    map: &M,
    mu: &ParticleCloud,
    n_max: usize,
    cutoff: i64,
    s: f64,
    stride: usize,
) -> Result<Vec<(usize, f64)>> {
    if n_max < 1 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let set = FrequencySet::cube(mu.dim(), cutoff)?;
    observe_orbit(map, mu, &schedule(n_max, stride)?, |n, c| Ok((n, haar_distance_on(c, &set, s)?)))
}

/// `(1/N) sum_{n<N} x_n`.
pub fn cesaro_average(values: &[f64], n: usize) -> Result<f64> {
    if values.is_empty() || n == 0 {
        return Err(Error::invalid("Cesaro average of an empty profile"));
    }
    if n > values.len() {
        return Err(Error::invalid(format!("N = {n} exceeds the {} available values", values.len())));
    }
    Ok(pairwise_sum(&values[..n]) / n as f64)
}

/// Largest average over windows of `window` consecutive values.
pub fn uniform_window_average(values: &[f64], window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::invalid("window length must be at least 1"));
    }
    if window > values.len() {
        return Err(Error::invalid(format!("window {window} exceeds the {} available values", values.len())));
    }
    let mut sum = pairwise_sum(&values[..window]);
    let mut best = sum;
    for m in 1..=values.len() - window {
        if m % window == 0 {
            // periodic exact resummation keeps the running sum from drifting
            sum = pairwise_sum(&values[m..m + window]);
        } else {
            sum += values[m + window - 1] - values[m - 1];
        }
        best = best.max(sum);
    }
    Ok(best / window as f64)
}

/// Geometric window ladder `10, 30, 100, 300, ...` up to `max`.
pub fn window_ladder(max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 10usize;
    while decade <= max {
        out.push(decade);
        if decade * 3 <= max {
            out.push(decade * 3);
        }
        decade = match decade.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    out
}

/// Indicator of the exceptional set `{n : x_n > epsilon}`.
pub fn exceptional_indicator(values: &[f64], epsilon: f64) -> Vec<bool> {
    values.iter().map(|&x| x > epsilon).collect()
}

/// Uniform density of the exceptional set for one window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowDensity {
    #[serde(rename = "L")]
    pub window: usize,
    pub value: f64,
}

/// Empirical density and uniform density of an exceptional set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub density: f64,
    pub uniform_density_by_window: Vec<WindowDensity>,
    pub epsilon: f64,
}

impl DensityReport {
    /// Fraction of the observed times lying in the exceptional set.
    pub fn exceptional_fraction(&self) -> f64 {
        self.density
    }
}

/// Density `|J ∩ [1,N]| / N` and the largest window density for each `L` in
/// `windows`, where `indicator[i]` records whether `i + 1 ∈ J`.
pub fn density_statistics(indicator: &[bool], epsilon: f64, windows: &[usize]) -> Result<DensityReport> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("threshold epsilon must be positive"));
    }
    if indicator.is_empty() {
        return Err(Error::invalid("empty indicator sequence"));
    }
    let values: Vec<f64> = indicator.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let hits = indicator.iter().filter(|&&b| b).count();
    let uniform_density_by_window = windows
        .iter()
        .map(|&l| Ok(WindowDensity { window: l, value: uniform_window_average(&values, l)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport {
        density: hits as f64 / indicator.len() as f64,
        uniform_density_by_window,
        epsilon,
    })
}

/// Median of `haar_distance_on` over `repeats` fresh i.i.d. Haar clouds of
/// `n` particles: the sampling noise floor for clouds of that size.
pub fn noise_floor(
    space: Space,
    n: usize,
    set: &FrequencySet,
    s: f64,
    seed: u64,
    repeats: usize,
) -> Result<f64> {
    if repeats < 3 {
        return Err(Error::invalid("noise floor calibration needs at least 3 repeats"));
    }
    let mut values = (0..repeats as u64)
        .map(|r| {
            let cloud = sample_haar(space, n, seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(r))?;
            haar_distance_on(&cloud, set, s)
        })
        .collect::<Result<Vec<_>>>()?;
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Ok(if values.len() % 2 == 1 { values[m] } else { 0.5 * (values[m - 1] + values[m]) })
}

/// [`noise_floor`] over the full frequency cube.
pub fn calibrate_noise_floor(
    space: Space,
    n: usize,
    cutoff: i64,
    s: f64,
    seed: u64,
    repeats: usize,
) -> Result<f64> {
    noise_floor(space, n, &FrequencySet::cube(space.dim(), cutoff)?, s, seed, repeats)
}

/// Least-squares slope of `log y` against `log x` over pairs with positive entries.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::invalid("slope needs at least two positive points"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope needs distinct abscissas"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{cloud_on_curve, stratified_haar, FunctionSpec, Sampling};

    fn dirac1(x: f64) -> ParticleCloud {
        ParticleCloud::dirac(Space::torus(1), &[x]).unwrap()
    }

    #[test]
    fn dirac_distances_by_hand() {
        let d = fourier_distance(&dirac1(0.0), &dirac1(0.5), 1, 0.0).unwrap();
        assert!((d - 4.0).abs() < 1e-12);
        assert!((haar_distance(&dirac1(0.0), 1, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fourier_distance(&dirac1(0.3), &dirac1(0.3), 8, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn stratified_grids_are_nearly_haar() {
        let g = stratified_haar(Space::torus(1), 10_000).unwrap();
        assert!(haar_distance(&g, 8, 1.0).unwrap() < 1e-8);
        let g2 = stratified_haar(Space::torus(2), 100).unwrap();
        assert!(haar_distance(&g2, 4, 1.0).unwrap() < 1e-8);
    }

    #[test]
    fn horizontal_line_is_far_from_haar() {
        let c = cloud_on_curve(&FunctionSpec::constant(1, 0.3), 1000, Sampling::Stratified).unwrap();
        assert!(haar_distance(&c, 1, 0.0).unwrap() >= 1.0);
    }

    #[test]
    fn dirac_lipschitz_bound() {
        let v = lipschitz_lower_bound(&dirac1(0.0), &dirac1(0.5), 1, 200).unwrap();
        // cos(2 pi x)/(2 pi) separates the two points by 1/pi
        assert!(v >= 1.0 / std::f64::consts::PI - 1e-12);
        assert!(v <= 0.5 + 1e-12);
        assert_eq!(lipschitz_lower_bound(&dirac1(0.2), &dirac1(0.2), 1, 50).unwrap(), 0.0);
    }

    #[test]
    fn family_members_are_admissible() {
        let fam = LipschitzFamily::new(2, 9, 100).unwrap();
        let mut rng = rng::stream(1, "test");
        for i in 0..fam.len() {
            for _ in 0..50 {
                let x = [rng.gen::<f64>(), rng.gen::<f64>()];
                let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let h = 1e-4;
                let len = (dir[0] * dir[0] + dir[1] * dir[1] as f64).sqrt() * h;
                let y = [x[0] + dir[0] * h, x[1] + dir[1] * h];
                let (fx, fy) = (fam.eval(i, &x), fam.eval(i, &y));
                assert!(fx.abs() <= 1.0 + 1e-12);
                assert!((fx - fy).abs() <= len * (1.0 + 1e-6));
            }
        }
    }

    #[test]
    fn family_integrals_match_direct_quadrature() {
        let mu = sample_haar(Space::torus(2), 300, 4).unwrap();
        let fam = LipschitzFamily::new(2, 3, 30).unwrap();
        let coeffs = fam.freqs.coefficients(&mu).unwrap();
        for i in 0..fam.len() {
            let direct: f64 = mu.iter().map(|(p, w)| w * fam.eval(i, p)).sum();
            let single = LipschitzFamily { freqs: fam.freqs.clone(), members: vec![fam.members[i].clone()] };
            assert!((single.max_gap(&coeffs) - direct.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn windows() {
        assert_eq!(uniform_window_average(&[2.0; 20], 7).unwrap(), 2.0);
        let mut spike = vec![0.0; 50];
        spike[23] = 1.0;
        assert!((uniform_window_average(&spike, 10).unwrap() - 0.1).abs() < 1e-15);
        let alt: Vec<f64> = (0..40).map(|i| ((i + 1) % 2) as f64).collect();
        assert_eq!(uniform_window_average(&alt, 6).unwrap(), 0.5);
        assert!(uniform_window_average(&alt, 0).is_err());
        assert_eq!(cesaro_average(&[3.0; 5], 5).unwrap(), 3.0);
        assert!(cesaro_average(&[], 1).is_err());
        assert_eq!(window_ladder(1000), vec![10, 30, 100, 300, 1000]);
    }

    #[test]
    fn window_average_matches_brute_force() {
        let mut rng = rng::stream(2, "w");
        let v: Vec<f64> = (0..137).map(|_| rng.gen::<f64>()).collect();
        for l in [1, 2, 5, 13, 50, 137] {
            let brute = (0..=v.len() - l)
                .map(|m| v[m..m + l].iter().sum::<f64>() / l as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((uniform_window_average(&v, l).unwrap() - brute).abs() < 1e-12, "L={l}");
        }
    }

    #[test]
    fn density_of_even_numbers_and_squares() {
        let evens: Vec<bool> = (1..=1000).map(|n| n % 2 == 0).collect();
        let r = density_statistics(&evens, 0.1, &[10]).unwrap();
        assert_eq!(r.density, 0.5);
        let squares: Vec<bool> = (1..=10_000u64).map(|n| (n as f64).sqrt().round().powi(2) as u64 == n).collect();
        let r = density_statistics(&squares, 1.0, &[100]).unwrap();
        assert!((r.density - 0.01).abs() < 1e-15);
        let tail = density_statistics(&squares[8999..], 1.0, &[100]).unwrap();
        assert!(tail.uniform_density_by_window[0].value <= 0.1);
        let empty = density_statistics(&[false; 100], 1.0, &[10, 30]).unwrap();
        assert_eq!(empty.density, 0.0);
        assert!(empty.uniform_density_by_window.iter().all(|w| w.value == 0.0));
        assert!(density_statistics(&evens, 0.0, &[10]).is_err());
    }

    #[test]
    fn density_report_json_shape() {
        let r = density_statistics(&[true, false, false, false], 0.5, &[2]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["density"], 0.25);
        assert_eq!(v["uniform_density_by_window"][0]["L"], 2);
        assert_eq!(v["uniform_density_by_window"][0]["value"], 0.5);
        assert_eq!(v["epsilon"], 0.5);
    }

    #[test]
    fn schedule_includes_endpoint() {
        assert_eq!(schedule(10, 4).unwrap(), vec![0, 4, 8, 10]);
        assert_eq!(schedule(8, 4).unwrap(), vec![0, 4, 8]);
        assert!(schedule(8, 0).is_err());
    }

    #[test]
    fn noise_floor_needs_repeats_and_is_reproducible() {
        assert!(calibrate_noise_floor(Space::torus(2), 100, 4, 1.0, 1, 2).is_err());
        let a = calibrate_noise_floor(Space::torus(2), 500, 4, 1.0, 1, 3).unwrap();
        let b = calibrate_noise_floor(Space::torus(2), 500, 4, 1.0, 1, 3).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(-0.5))).collect();
        assert!((log_log_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
    }
}
