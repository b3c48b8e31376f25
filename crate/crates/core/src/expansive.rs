//! Expansive skew products `T(x, y) = (x + alpha, p y + f(x))` on `T^2`.
//!
//! A curve `y = gamma(x)` pushed forward `n` times has slope
//!
//! ```text
//! Delta_n(x) = p^n gamma'(x) + sum_{k<n} p^(n-1-k) f'(x + k alpha)
//! ```
//!
//! which grows like `p^(n-1) tau(x)` with
//! `tau(x) = p gamma'(x) + sum_{n>=0} p^(-n) f'(x + n alpha)`. Where `tau`
//! vanishes the pushed curve stays Lipschitz; elsewhere it winds ever faster
//! around the fiber.

use serde::{Deserialize, Serialize};

use crate::diophantine::check_irrational;
use crate::error::{Error, Result};
use crate::measures::{wrap, FunctionSpec, Harmonic, ParticleCloud, Space, StepMap};

const TAU: f64 = std::f64::consts::TAU;

/// Largest `n log2|p|` for which [`delta_n`] is evaluated in `f64`.
pub const DELTA_BIT_LIMIT: f64 = 60.0;

/// Circular standard deviation of the uniform distribution on the circle of length 1, `1/sqrt(12)`.
pub fn uniform_circle_spread() -> f64 {
    (1.0f64 / 12.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansiveSystem {
    alpha: f64,
    p: i64,
    f: FunctionSpec,
}

impl ExpansiveSystem {
    pub fn new(alpha: f64, p: i64, f: FunctionSpec) -> Result<Self> {
        check_irrational(alpha)?;
        if p.unsigned_abs() < 2 {
            return Err(Error::invalid(format!("expansion factor p = {p} must satisfy |p| >= 2")));
        }
        if f.arity() != 1 {
            return Err(Error::invalid("the skew function must take one variable"));
        }
        Ok(ExpansiveSystem { alpha, p, f })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn f(&self) -> &FunctionSpec {
        &self.f
    }

    fn abs_p(&self) -> f64 {
        self.p.unsigned_abs() as f64
    }

    /// Upper bound on `sup |f'|`.
    pub fn sup_f_prime(&self) -> f64 {
        self.f.sup_derivative_bound()
    }

    fn f_prime_along(&self, x: f64, k: usize) -> f64 {
        self.f.derivative(wrap(x + k as f64 * self.alpha))
    }
}

impl StepMap for ExpansiveSystem {
    fn space(&self) -> Space {
        Space::torus(2)
    }

    #[inline]
    fn step_point(&self, pt: &mut [f64]) {
        let fx = self.f.eval_lift(&pt[..1]);
        pt[1] = wrap(self.p as f64 * pt[1] + fx);
        pt[0] = wrap(pt[0] + self.alpha);
    }
}

/// A differentiable curve `y = gamma(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    gamma: FunctionSpec,
}

impl CurveSpec {
    pub fn new(gamma: FunctionSpec) -> Result<Self> {
        if gamma.arity() != 1 {
            return Err(Error::invalid("a curve needs a one-variable function"));
        }
        Ok(CurveSpec { gamma })
    }

    pub fn gamma(&self) -> &FunctionSpec {
        &self.gamma
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.gamma.derivative(x)
    }

    pub fn sup_derivative(&self) -> f64 {
        self.gamma.sup_derivative_bound()
    }
}

/// A truncated series value with a rigorous bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sup|f'| |p|^(1-N) / (|p| - 1)`: bound on `sum_{n>=N} |p^(-n) f'|`.
pub fn tail_bound(sys: &ExpansiveSystem, n_trunc: usize) -> f64 {
    let ap = sys.abs_p();
    sys.sup_f_prime() * ap.powf(1.0 - n_trunc as f64) / (ap - 1.0)
}

/// `tau(x)` summed through `n = N_trunc - 1`, with its tail bound.
pub fn tau(sys: &ExpansiveSystem, curve: &CurveSpec, x: f64, n_trunc: usize) -> Result<TauValue> {
    if n_trunc == 0 {
        return Err(Error::invalid("N_trunc must be at least 1"));
    }
    Ok(TauValue { value: tau_partial(sys, curve, x, n_trunc), tail_bound: tail_bound(sys, n_trunc) })
}

fn tau_partial(sys: &ExpansiveSystem, curve: &CurveSpec, x: f64, n_trunc: usize) -> f64 {
    let inv = 1.0 / sys.p as f64;
    // smallest terms first
    let mut sum = 0.0;
    for n in (0..n_trunc).rev() {
        sum += inv.powi(n as i32) * sys.f_prime_along(x, n);
    }
    sys.p as f64 * curve.derivative(x) + sum
}

fn check_delta_range(sys: &ExpansiveSystem, n: usize) -> Result<()> {
    let bits = n as f64 * sys.abs_p().log2();
    if bits > DELTA_BIT_LIMIT {
        return Err(Error::NumericGuard {
            guard: "delta_n_exponent",
            detail: format!("p^n has {bits:.1} bits for n = {n}; limit is {DELTA_BIT_LIMIT}"),
        });
    }
    Ok(())
}

/// `Delta_n(x) = p^n gamma'(x) + sum_{k<n} p^(n-1-k) f'(x + k alpha)`, the slope
/// of the `n`-th pushed curve over `x + n alpha`.
pub fn delta_n(sys: &ExpansiveSystem, curve: &CurveSpec, x: f64, n: usize) -> Result<f64> {
    check_delta_range(sys, n)?;
    let p = sys.p as f64;
    let mut sum = 0.0;
    for k in (0..n).rev() {
        sum += p.powi((n - 1 - k) as i32) * sys.f_prime_along(x, k);
    }
    Ok(p.powi(n as i32) * curve.derivative(x) + sum)
}

/// [`delta_n`] via `Delta_{k+1} = p Delta_k + f'(x + k alpha)` from `Delta_0 = gamma'(x)`.
pub fn delta_n_recursive(sys: &ExpansiveSystem, curve: &CurveSpec, x: f64, n: usize) -> Result<f64> {
    check_delta_range(sys, n)?;
    let p = sys.p as f64;
    let mut d = curve.derivative(x);
    for k in 0..n {
        d = p * d + sys.f_prime_along(x, k);
    }
    Ok(d)
}

/// `|p| / (|p| - 1) sup|f'|`.
pub fn kappa(sys: &ExpansiveSystem) -> f64 {
    let ap = sys.abs_p();
    ap / (ap - 1.0) * sys.sup_f_prime()
}

/// Grid measure of `{x : |f'(x) + p gamma'(x)| < sup|f'| / (|p| - 1)}` (strict).
pub fn beta_bound(sys: &ExpansiveSystem, curve: &CurveSpec, grid_n: usize) -> Result<f64> {
    if grid_n < 1000 {
        return Err(Error::invalid("beta_bound needs grid_n >= 1000"));
    }
    let threshold = sys.sup_f_prime() / (sys.abs_p() - 1.0);
    let p = sys.p as f64;
    let hits = (0..grid_n)
        .filter(|&i| {
            let x = (i as f64 + 0.5) / grid_n as f64;
            (sys.f.derivative(x) + p * curve.derivative(x)).abs() < threshold
        })
        .count();
    Ok(hits as f64 / grid_n as f64)
}

/// Three-valued classification of grid cells by `|tau|` against `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SSetReport {
    pub epsilon: f64,
    #[serde(rename = "N_trunc")]
    pub n_trunc: usize,
    /// Cells where `|tau| > epsilon` is certified (a certified part of `S`).
    pub certified_in: Vec<[f64; 2]>,
    /// Cells where `|tau| < epsilon` is certified.
    pub certified_out: Vec<[f64; 2]>,
    pub undetermined: Vec<[f64; 2]>,
    pub kappa: f64,
    pub beta: f64,
}

/// Total length of a list of intervals.
pub fn total_length(intervals: &[[f64; 2]]) -> f64 {
    intervals.iter().map(|[a, b]| b - a).sum()
}

/// The longest interval of the list.
pub fn longest(intervals: &[[f64; 2]]) -> Option<[f64; 2]> {
    intervals.iter().copied().max_by(|a, b| (a[1] - a[0]).total_cmp(&(b[1] - b[0])))
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    In,
    Out,
    Undetermined,
}

/// Certified parts of `S = {tau != 0}` and of its `epsilon`-complement on a
/// grid of `grid_n` cells, each classified by `tau` at its midpoint. Cells
/// are merged into maximal intervals of `[0, 1]`.
pub fn s_set(
    sys: &ExpansiveSystem,
    curve: &CurveSpec,
    epsilon: f64,
    grid_n: usize,
    n_trunc: usize,
) -> Result<SSetReport> {
    if n_trunc == 0 {
        return Err(Error::invalid("N_trunc must be at least 1"));
    }
    if grid_n == 0 {
        return Err(Error::invalid("grid_n must be at least 1"));
    }
    let tail = tail_bound(sys, n_trunc);
    if !(epsilon > tail) {
        return Err(Error::Precondition(format!(
            "epsilon = {epsilon:e} does not exceed the tail bound {tail:e} at N_trunc = {n_trunc}; \
             increase N_trunc or epsilon"
        )));
    }
    let classes: Vec<Class> = (0..grid_n)
        .map(|i| {
            let v = tau_partial(sys, curve, (i as f64 + 0.5) / grid_n as f64, n_trunc).abs();
            if v - tail > epsilon {
                Class::In
            } else if v + tail < epsilon {
                Class::Out
            } else {
                Class::Undetermined
            }
        })
        .collect();
    let runs = |class: Class| {
        let mut out: Vec<[f64; 2]> = Vec::new();
        let mut i = 0;
        while i < grid_n {
            if classes[i] != class {
                i += 1;
                continue;
            }
            let start = i;
            while i < grid_n && classes[i] == class {
                i += 1;
            }
            out.push([start as f64 / grid_n as f64, i as f64 / grid_n as f64]);
        }
        out
    };
    Ok(SSetReport {
        epsilon,
        n_trunc,
        certified_in: runs(Class::In),
        certified_out: runs(Class::Out),
        undetermined: runs(Class::Undetermined),
        kappa: kappa(sys),
        beta: beta_bound(sys, curve, grid_n.max(1000))?,
    })
}

/// Grid size used by [`coboundary_residual`].
pub const COBOUNDARY_GRID: usize = 10_000;

/// `min_c sup_x |f(x) - gamma(x + alpha) + p gamma(x) - c|` on a grid, or
/// `+inf` when the windings already rule out `f = gamma o T - p gamma + c`
/// (which forces `winding(f) = winding(gamma) (1 - p)`).
pub fn coboundary_residual(sys: &ExpansiveSystem, curve: &CurveSpec) -> f64 {
    let g = curve.gamma();
    if sys.f.winding() != g.winding() * (1 - sys.p) {
        return f64::INFINITY;
    }
    let p = sys.p as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..COBOUNDARY_GRID {
        let x = i as f64 / COBOUNDARY_GRID as f64;
        let d = sys.f.eval_lift(&[x]) - g.eval_lift(&[x + sys.alpha]) + p * g.eval_lift(&[x]);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (hi - lo) / 2.0
}

/// `f = gamma o R_alpha - p gamma`, the skew for which the graph of `gamma` is
/// mapped onto a vertical translate of itself.
pub fn coboundary_skew(alpha: f64, p: i64, gamma: &FunctionSpec) -> Result<FunctionSpec> {
    let shifted = gamma.shifted(&[alpha])?;
    FunctionSpec::linear_combination(&[(1.0, &shifted), (-(p as f64), gamma)])
}

/// Knobs for [`make_example_5_5`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Example55Options {
    /// Initial harmonic count of the blend; doubled on certificate failure.
    pub harmonics: usize,
    pub max_harmonics: usize,
    /// Terms of `-sum p^(-n-1) f'(x + n alpha)` kept in `gamma'`.
    pub series_terms: usize,
    /// Required `sup (|tau| + tail)` on the flat interval.
    pub flat_tol: f64,
    /// Required `inf (|tau| - tail)` on the winding interval.
    pub active_min: f64,
    pub certificate_grid: usize,
    pub certificate_trunc: usize,
}

impl Default for Example55Options {
    fn default() -> Self {
        Example55Options {
            harmonics: 32,
            max_harmonics: 512,
            series_terms: 40,
            flat_tol: 0.01,
            active_min: 0.05,
            certificate_grid: 10_000,
            certificate_trunc: 60,
        }
    }
}

/// Interval on which `tau` is made to vanish.
pub const FLAT_INTERVAL: [f64; 2] = [0.05, 0.45];
/// Interval on which `tau` is kept away from zero.
pub const ACTIVE_INTERVAL: [f64; 2] = [0.55, 0.95];

/// Result of [`make_example_5_5`]: the curve and its verified certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct Example55 {
    pub curve: CurveSpec,
    pub harmonics: usize,
    /// `sup (|tau| + tail)` over the flat interval's certificate grid.
    pub flat_sup: f64,
    /// `inf (|tau| - tail)` over the active interval's certificate grid.
    pub active_inf: f64,
}

/// `I_0`, modified Bessel function of the first kind, by its power series.
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..1000 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser-windowed Fourier series of `height` times the indicator of `(a, b)`.
fn smooth_bump(a: f64, b: f64, height: f64, harmonics: usize) -> Vec<Harmonic> {
    let shape = harmonics as f64 / 2.0;
    let norm = bessel_i0(shape);
    let mut out = vec![Harmonic::new([0], height * (b - a), 0.0)];
    for k in 1..=harmonics {
        let r = k as f64 / (harmonics + 1) as f64;
        let window = bessel_i0(shape * (1.0 - r * r).sqrt()) / norm;
        let w = TAU * k as f64;
        let cos = ((w * b).sin() - (w * a).sin()) / (std::f64::consts::PI * k as f64);
        let sin = ((w * a).cos() - (w * b).cos()) / (std::f64::consts::PI * k as f64);
        out.push(Harmonic::new([k as i64], height * window * cos, height * window * sin));
    }
    out
}

/// Antiderivative of a one-variable trigonometric polynomial with mean `winding`.
fn integrate(derivative: &FunctionSpec, winding: i64) -> Result<FunctionSpec> {
    let harmonics = derivative
        .harmonics()
        .iter()
        .filter(|h| h.freq[0] != 0)
        .map(|h| {
            let w = TAU * h.freq[0] as f64;
            Harmonic::new(h.freq.clone(), -h.sin / w, h.cos / w)
        })
        .collect();
    FunctionSpec::new(1, winding, harmonics)
}

/// A curve for which `tau` vanishes (to the certificate tolerance) on
/// `[0.05, 0.45]` and stays away from zero on `[0.55, 0.95]`.
///
/// `gamma'` is the truncated series `-sum_{n<N} p^(-n-1) f'(x + n alpha)`
/// plus a smooth bump supported (up to exponentially small leakage) on
/// `(0.55, 0.95)`, whose mass makes the mean of `gamma'` an integer. Both
/// certificates are checked on a grid with explicit tail bounds; the bump's
/// harmonic count is doubled until they hold.
pub fn make_example_5_5(sys: &ExpansiveSystem, opts: &Example55Options) -> Result<Example55> {
    if opts.harmonics == 0 || opts.series_terms == 0 || opts.certificate_grid == 0 {
        return Err(Error::invalid("harmonics, series_terms and certificate_grid must be positive"));
    }
    let fp = sys.f.partial_spec(0);
    let p = sys.p as f64;
    let shifted = (0..opts.series_terms)
        .map(|n| Ok((-p.powi(-(n as i32) - 1), fp.shifted(&[n as f64 * sys.alpha])?)))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(f64, &FunctionSpec)> = shifted.iter().map(|(c, f)| (*c, f)).collect();
    let series = FunctionSpec::linear_combination(&terms)?;
    let series_mean = series.constant_term();
    let winding = (0.5 + series_mean).ceil() as i64;
    let bump_mass = winding as f64 - series_mean;
    let [a, b] = ACTIVE_INTERVAL;
    let mut harmonics = opts.harmonics;
    let tail = tail_bound(sys, opts.certificate_trunc);
    loop {
        let bump = FunctionSpec::new(1, 0, smooth_bump(a, b, bump_mass / (b - a), harmonics))?;
        let gamma_prime = FunctionSpec::linear_combination(&[(1.0, &series), (1.0, &bump)])?;
        let curve = CurveSpec::new(integrate(&gamma_prime, winding)?)?;
        let grid = |[lo, hi]: [f64; 2]| {
            let m = opts.certificate_grid;
            (0..=m).map(move |i| lo + (hi - lo) * i as f64 / m as f64)
        };
        let flat_sup = grid(FLAT_INTERVAL)
            .map(|x| tau_partial(sys, &curve, x, opts.certificate_trunc).abs() + tail)
            .fold(0.0, f64::max);
        let active_inf = grid(ACTIVE_INTERVAL)
            .map(|x| tau_partial(sys, &curve, x, opts.certificate_trunc).abs() - tail)
            .fold(f64::INFINITY, f64::min);
        if flat_sup <= opts.flat_tol && active_inf >= opts.active_min {
            return Ok(Example55 { curve, harmonics, flat_sup, active_inf });
        }
        if harmonics * 2 > opts.max_harmonics {
            return Err(Error::Construction(format!(
                "certificates failed with {harmonics} harmonics: sup|tau| = {flat_sup:e} on the \
                 flat interval (need <= {:e}), inf|tau| = {active_inf:e} on the active interval \
                 (need >= {:e})",
                opts.flat_tol, opts.active_min
            )));
        }
        harmonics *= 2;
    }
}

/// Per-bin fiber statistics from [`limit_curve_extract`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    /// Bin center, in base coordinates.
    pub center: f64,
    pub count: usize,
    pub mean: f64,
    pub spread: f64,
}

/// Shape of a pushed curve cloud over one base arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveExtract {
    pub lipschitz_estimate: f64,
    pub max_vertical_spread: f64,
    /// Indices of empty bins.
    pub gaps: Vec<usize>,
    pub bins: Vec<BinStat>,
}

impl CurveExtract {
    /// Smallest spread over non-empty bins.
    pub fn min_vertical_spread(&self) -> f64 {
        self.bins.iter().filter(|b| b.count > 0).map(|b| b.spread).fold(f64::INFINITY, f64::min)
    }
}

/// Number of bins used by [`limit_curve_extract`].
pub const CURVE_BINS: usize = 200;

/// Signed representative of `x` mod 1 in `[-1/2, 1/2)`.
fn signed(x: f64) -> f64 {
    wrap(x + 0.5) - 0.5
}

/// Bins the particles of a `T^2` cloud whose base coordinate lies in the arc
/// `[start, start + length)` into 200 equal bins. Each bin gets the circular
/// mean of the fiber coordinate and the weighted RMS of fiber deviations
/// from it. The Lipschitz estimate is the largest circular mean difference
/// between adjacent non-empty bins divided by the bin width; empty bins are
/// reported as gaps.
pub fn limit_curve_extract(cloud: &ParticleCloud, start: f64, length: f64) -> Result<CurveExtract> {
    if cloud.space() != Space::torus(2) {
        return Err(Error::SpaceMismatch { expected: Space::torus(2), found: cloud.space() });
    }
    if !(length > 0.0 && length <= 1.0) {
        return Err(Error::invalid("arc length must lie in (0, 1]"));
    }
    let width = length / CURVE_BINS as f64;
    let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); CURVE_BINS];
    for (p, w) in cloud.iter() {
        let offset = wrap(p[0] - start);
        if offset < length {
            let bin = ((offset / width) as usize).min(CURVE_BINS - 1);
            members[bin].push((p[1], w));
        }
    }
    if members.iter().all(Vec::is_empty) {
        return Err(Error::Precondition("no particles over the requested arc".into()));
    }
    let bins: Vec<BinStat> = members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let center = wrap(start + (i as f64 + 0.5) * width);
            if m.is_empty() {
                return BinStat { center, count: 0, mean: f64::NAN, spread: f64::NAN };
            }
            let (mut s, mut c, mut tw) = (0.0, 0.0, 0.0);
            for &(y, w) in m {
                let (sy, cy) = (TAU * y).sin_cos();
                s += w * sy;
                c += w * cy;
                tw += w;
            }
            let mean = wrap(s.atan2(c) / TAU);
            let var = m.iter().map(|&(y, w)| w * signed(y - mean).powi(2)).sum::<f64>() / tw;
            BinStat { center, count: m.len(), mean, spread: var.sqrt() }
        })
        .collect();
    let gaps = (0..CURVE_BINS).filter(|&i| bins[i].count == 0).collect();
    let lipschitz_estimate = bins
        .windows(2)
        .filter(|w| w[0].count > 0 && w[1].count > 0)
        .map(|w| signed(w[1].mean - w[0].mean).abs() / width)
        .fold(0.0, f64::max);
    let max_vertical_spread =
        bins.iter().filter(|b| b.count > 0).map(|b| b.spread).fold(0.0, f64::max);
    Ok(CurveExtract { lipschitz_estimate, max_vertical_spread, gaps, bins })
}
