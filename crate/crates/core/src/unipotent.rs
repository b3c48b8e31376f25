//! Upper unipotent matrices, dilations, cocycle products and the polynomial
//! growth of matrix powers.
//!
//! Matrices are generic over the entry type: [`RationalMatrix`] is exact,
//! [`FloatMatrix`] is fast. Indices are 0-based: entry `(i, j)` with `i < j`
//! is the paper-style `u_{i+1, j+1}`.

use std::fmt::Debug;
use std::sync::Arc;

use num::rational::BigRational;
use num::traits::{Num, One, ToPrimitive, Zero};
use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{sample_haar, FunctionSpec, FunctionSpecData, StepMap};
use crate::torus_skew::{Rotation, SkewSystem};

/// Entries whose magnitude reaches this value trip the floating-point guard.
pub const ENTRY_GUARD: f64 = 1e300;

/// Scalar type usable as a matrix entry.
pub trait Entry: Clone + Debug + PartialEq + PartialOrd + Num + Send + Sync {
    fn to_f64_lossy(&self) -> f64;
}

impl Entry for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Entry for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// A `d x d` upper triangular matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct UnipotentMatrix<T> {
    d: usize,
    upper: Vec<T>,
}

pub type RationalMatrix = UnipotentMatrix<BigRational>;
pub type FloatMatrix = UnipotentMatrix<f64>;

#[inline]
fn slot(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

impl<T: Entry> UnipotentMatrix<T> {
    pub fn identity(d: usize) -> Self {
        UnipotentMatrix { d, upper: vec![T::zero(); d * d.saturating_sub(1) / 2] }
    }

    /// Matrix with entry `(i, j)` given by `f(i, j)` for `i < j`.
    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut upper = Vec::with_capacity(d * d.saturating_sub(1) / 2);
        for i in 0..d {
            for j in i + 1..d {
                upper.push(f(i, j));
            }
        }
        UnipotentMatrix { d, upper }
    }

    /// Matrix from its strictly upper entries in row-major order.
    pub fn from_upper(d: usize, upper: Vec<T>) -> Result<Self> {
        let want = d * d.saturating_sub(1) / 2;
        if upper.len() != want {
            return Err(Error::DimensionMismatch { expected: want, found: upper.len() });
        }
        Ok(UnipotentMatrix { d, upper })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Entry `(i, j)`, including the implicit diagonal ones and lower zeros.
    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(i < self.d && j < self.d, "index ({i}, {j}) out of range for size {}", self.d);
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper[slot(self.d, i, j)].clone(),
            std::cmp::Ordering::Equal => T::one(),
            std::cmp::Ordering::Greater => T::zero(),
        }
    }

    /// Sets the strictly upper entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < j && j < self.d, "({i}, {j}) is not a strictly upper entry");
        self.upper[slot(self.d, i, j)] = v;
    }

    /// Strictly upper entries in row-major order.
    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn superdiagonal(&self) -> Vec<T> {
        (0..self.d.saturating_sub(1)).map(|i| self.get(i, i + 1)).collect()
    }

    /// Matrix product; fails on a size mismatch.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: other.d });
        }
        Ok(self.mul_same(other))
    }

    fn mul_same(&self, b: &Self) -> Self {
        let d = self.d;
        let mut upper = Vec::with_capacity(self.upper.len());
        for i in 0..d {
            for j in i + 1..d {
                let mut v = self.upper[slot(d, i, j)].clone() + b.upper[slot(d, i, j)].clone();
                for k in i + 1..j {
                    v = v + self.upper[slot(d, i, k)].clone() * b.upper[slot(d, k, j)].clone();
                }
                upper.push(v);
            }
        }
        UnipotentMatrix { d, upper }
    }

    /// `theta_t(u)`: entry `(i, j)` scaled by `t^(j-i)`. Requires `t > 0`.
    pub fn dilate(&self, t: &T) -> Result<Self> {
        if *t <= T::zero() {
            return Err(Error::invalid("dilation parameter must be positive"));
        }
        let d = self.d;
        let mut powers = vec![T::one()];
        for k in 1..d {
            let next = powers[k - 1].clone() * t.clone();
            powers.push(next);
        }
        Ok(UnipotentMatrix::from_fn(d, |i, j| self.get(i, j) * powers[j - i].clone()))
    }

    /// `u^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut result = UnipotentMatrix::identity(self.d);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_same(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_same(&base);
            }
        }
        result
    }

    /// Converts entries to `f64`.
    pub fn to_float(&self) -> FloatMatrix {
        UnipotentMatrix { d: self.d, upper: self.upper.iter().map(Entry::to_f64_lossy).collect() }
    }
}

impl FloatMatrix {
    /// `max_{i<j} |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &FloatMatrix) -> Result<f64> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: other.d });
        }
        Ok(self.upper.iter().zip(&other.upper).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    fn guard(&self) -> Result<()> {
        match self.upper.iter().find(|v| !(v.abs() < ENTRY_GUARD)) {
            Some(v) => Err(Error::NumericGuard {
                guard: "unipotent_entry_magnitude",
                detail: format!("entry {v:e} is not below {ENTRY_GUARD:e}"),
            }),
            None => Ok(()),
        }
    }

    /// `self <- left * self` without reallocating.
    fn left_mul_in_place(&mut self, left: &FloatMatrix) {
        let d = self.d;
        // row i of the product only reads rows k > i of self, so go top-down
        for i in 0..d {
            for j in i + 1..d {
                let mut v = left.upper[slot(d, i, j)] + self.upper[slot(d, i, j)];
                for k in i + 1..j {
                    v += left.upper[slot(d, i, k)] * self.upper[slot(d, k, j)];
                }
                self.upper[slot(d, i, j)] = v;
            }
        }
    }
}

/// A polynomial in one variable with exact rational coefficients (ascending powers).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `n^k` (zero beyond the degree).
    pub fn coefficient(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * n + c)
    }

    pub fn eval_int(&self, n: i64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(n)))
    }

    /// The unique polynomial of degree `<= values.len() - 1` through
    /// `(n, values[n])`, `n = 0, 1, ...` (Newton forward differences).
    pub fn interpolate(values: &[BigRational]) -> Polynomial {
        let m = values.len();
        let mut diffs = values.to_vec();
        let mut newton = Vec::with_capacity(m);
        for level in 0..m {
            newton.push(diffs[0].clone());
            for t in 0..m - level - 1 {
                diffs[t] = diffs[t + 1].clone() - diffs[t].clone();
            }
        }
        // sum_k newton[k] * C(n, k), expanding C(n, k) = n(n-1)...(n-k+1)/k!
        let mut coeffs = vec![BigRational::zero(); m.max(1)];
        let mut falling = vec![BigRational::one()];
        let mut factorial = BigRational::one();
        for (k, dk) in newton.iter().enumerate() {
            if k > 0 {
                factorial = factorial * BigRational::from_integer(BigInt::from(k));
                let shift = BigRational::from_integer(BigInt::from(k - 1));
                let mut next = vec![BigRational::zero(); falling.len() + 1];
                for (p, c) in falling.iter().enumerate() {
                    next[p + 1] = next[p + 1].clone() + c.clone();
                    next[p] = next[p].clone() - c.clone() * shift.clone();
                }
                falling = next;
            }
            for (p, c) in falling.iter().enumerate() {
                coeffs[p] = coeffs[p].clone() + dk.clone() * c.clone() / factorial.clone();
            }
        }
        Polynomial::new(coeffs)
    }
}

#[cfg(test)]
fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

const VERIFY_EXTRA: usize = 5;

/// The polynomial `P` with `P(n) = (u^n)_{ij}` for all `n >= 0`.
///
/// Built by exact interpolation at `n = 0..=j-i` and verified against direct
/// powers at the next five values of `n`. A verification failure means the
/// degree bound was violated and is reported as an internal error.
pub fn matrix_power_polynomial(u: &RationalMatrix, i: usize, j: usize) -> Result<Polynomial> {
    if i > j || j >= u.dim() {
        return Err(Error::invalid(format!("({i}, {j}) is not an upper entry of a {0}x{0} matrix", u.dim())));
    }
    let deg = j - i;
    let mut powers = Vec::with_capacity(deg + VERIFY_EXTRA + 1);
    let mut p = RationalMatrix::identity(u.dim());
    for _ in 0..=deg + VERIFY_EXTRA {
        powers.push(p.get(i, j));
        p = u.mul_same(&p);
    }
    let poly = Polynomial::interpolate(&powers[..=deg]);
    for (n, want) in powers.iter().enumerate().skip(deg + 1) {
        if poly.eval_int(n as i64) != *want {
            return Err(Error::Internal(format!(
                "power polynomial for entry ({i}, {j}) disagrees with u^{n}"
            )));
        }
    }
    Ok(poly)
}

/// Leading coefficient `lambda(k)` of the degree-`k` growth of unipotent powers.
///
/// Expanding `u^n = sum_{m<n} (u - I) u^m` shows that the top-degree part of
/// `(u^n)_{i,i+k}` is `u_{i,i+1}` times the summed top-degree part of
/// `(u^m)_{i+1,i+k}`. Starting from the constant `1` and summing `k` times,
/// the leading coefficient is read off the exactly interpolated polynomial.
pub fn lambda_constant(k: usize) -> BigRational {
    let mut poly = Polynomial::new(vec![BigRational::one()]);
    for level in 1..=k {
        let mut cumulative = BigRational::zero();
        let mut sums = Vec::with_capacity(level + VERIFY_EXTRA + 1);
        for n in 0..=(level + VERIFY_EXTRA) as i64 {
            sums.push(cumulative.clone());
            cumulative = cumulative + poly.eval_int(n);
        }
        let next = Polynomial::interpolate(&sums[..=level]);
        debug_assert!(sums.iter().enumerate().all(|(n, v)| next.eval_int(n as i64) == *v));
        poly = next;
    }
    poly.leading_coefficient()
}

/// `lambda(j - i)` for every offset `0..d`, as floats.
pub fn lambda_table(d: usize) -> Vec<f64> {
    (0..d).map(|k| lambda_constant(k).to_f64_lossy()).collect()
}

/// `lambda(k) ((M + delta)^k - M^k)`: the per-entry limit perturbation bound
/// at offset `k` for products whose superdiagonals stay within `delta` of
/// those of a fixed matrix with superdiagonal bound `M`.
pub fn perturbation_bound(k: usize, m: f64, delta: f64) -> f64 {
    lambda_constant(k).to_f64_lossy() * ((m + delta).powi(k as i32) - m.powi(k as i32))
}

/// `C(x, n) = f(T^(n-1) x) ... f(T x) f(x)` for any base and entry type.
pub fn cocycle_product_with<X, T, S, G>(
    d: usize,
    x: &X,
    n: u64,
    mut step: S,
    mut generator: G,
) -> Result<UnipotentMatrix<T>>
where
    X: Clone,
    T: Entry,
    S: FnMut(&X) -> X,
    G: FnMut(&X) -> UnipotentMatrix<T>,
{
    let mut acc = UnipotentMatrix::identity(d);
    let mut point = x.clone();
    for _ in 0..n {
        let g = generator(&point);
        if g.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        acc = g.mul_same(&acc);
        point = step(&point);
    }
    Ok(acc)
}

/// Strictly upper entries given as functions of the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionMatrix {
    d: usize,
    entries: Vec<(usize, usize, FunctionSpec)>,
}

/// Serialized form of one [`FunctionMatrix`] entry; `i`, `j` are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntryData {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub function: FunctionSpecData,
}

impl FunctionMatrix {
    /// `entries` lists `(i, j, f)` with `i < j` (0-based); absent entries are zero.
    pub fn new(d: usize, entries: Vec<(usize, usize, FunctionSpec)>) -> Result<Self> {
        let arity = entries.first().map(|e| e.2.arity());
        for (i, j, f) in &entries {
            if !(i < j && *j < d) {
                return Err(Error::invalid(format!("({i}, {j}) is not a strictly upper entry")));
            }
            if Some(f.arity()) != arity {
                return Err(Error::invalid("all generator entries must have the same arity"));
            }
        }
        Ok(FunctionMatrix { d, entries })
    }

    pub fn from_data(d: usize, arity: usize, data: &[FunctionEntryData]) -> Result<Self> {
        let entries = data
            .iter()
            .map(|e| {
                if e.i == 0 || e.j == 0 {
                    return Err(Error::invalid("generator entry indices are 1-based"));
                }
                Ok((e.i - 1, e.j - 1, FunctionSpec::from_data(arity, &e.function)?))
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionMatrix::new(d, entries)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Arity of the entry functions, if any entry is present.
    pub fn arity(&self) -> Option<usize> {
        self.entries.first().map(|e| e.2.arity())
    }

    /// Evaluates the lift of every entry at `x`.
    pub fn eval(&self, x: &[f64]) -> FloatMatrix {
        let mut m = FloatMatrix::identity(self.d);
        for (i, j, f) in &self.entries {
            let v = m.get(*i, *j) + f.eval_lift(x);
            m.set(*i, *j, v);
        }
        m
    }

    /// Exact Haar mean of entry `(i, j)`.
    pub fn mean(&self, i: usize, j: usize) -> f64 {
        self.entries.iter().filter(|e| e.0 == i && e.1 == j).map(|e| e.2.mean()).sum()
    }
}

/// Custom generator closure.
pub type GeneratorFn = Arc<dyn Fn(&[f64]) -> FloatMatrix + Send + Sync>;

/// How the cocycle's matrix depends on the base point.
#[derive(Clone)]
pub enum Generator {
    /// The Jacobian of a skew system (the base must be that system).
    Derivative,
    Functions(FunctionMatrix),
    Custom(GeneratorFn),
}

impl Debug for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::Derivative => write!(f, "Derivative"),
            Generator::Functions(m) => f.debug_tuple("Functions").field(m).finish(),
            Generator::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Base dynamics of a cocycle.
#[derive(Debug, Clone)]
pub enum CocycleBase {
    Skew(SkewSystem),
    Rotation(Rotation),
}

impl CocycleBase {
    fn as_step(&self) -> &dyn StepMap {
        match self {
            CocycleBase::Skew(s) => s,
            CocycleBase::Rotation(r) => r,
        }
    }

    pub fn dim(&self) -> usize {
        self.as_step().space().dim()
    }

    /// Whether the base passes the minimality screens used before trusting
    /// ergodic averages: a rotation's components must admit no small integer
    /// relation; a skew system additionally needs nonzero windings.
    pub fn is_minimal(&self) -> bool {
        match self {
            CocycleBase::Rotation(r) => r.is_minimal(),
            CocycleBase::Skew(s) => s.is_furstenberg_class(),
        }
    }
}

/// A unipotent cocycle over a base system.
#[derive(Debug, Clone)]
pub struct CocycleSpec {
    base: CocycleBase,
    generator: Generator,
    d: usize,
}

impl CocycleSpec {
    pub fn new(base: CocycleBase, generator: Generator, d: usize) -> Result<Self> {
        match (&base, &generator) {
            (CocycleBase::Skew(s), Generator::Derivative) => {
                if s.dim() != d {
                    return Err(Error::DimensionMismatch { expected: s.dim(), found: d });
                }
            }
            (_, Generator::Derivative) => {
                return Err(Error::invalid("derivative generators need a skew-system base"))
            }
            (_, Generator::Functions(m)) => {
                if m.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: m.dim() });
                }
                if let Some(a) = m.arity() {
                    if a != base.dim() {
                        return Err(Error::DimensionMismatch { expected: base.dim(), found: a });
                    }
                }
            }
            (_, Generator::Custom(_)) => {}
        }
        Ok(CocycleSpec { base, generator, d })
    }

    /// The derivative cocycle of a skew system.
    pub fn derivative(system: SkewSystem) -> Self {
        let d = system.dim();
        CocycleSpec { base: CocycleBase::Skew(system), generator: Generator::Derivative, d }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn base(&self) -> &CocycleBase {
        &self.base
    }

    pub fn generator_at(&self, x: &[f64]) -> FloatMatrix {
        match (&self.generator, &self.base) {
            (Generator::Derivative, CocycleBase::Skew(s)) => s.jacobian(x),
            (Generator::Functions(m), _) => m.eval(x),
            (Generator::Custom(f), _) => f(x),
            (Generator::Derivative, CocycleBase::Rotation(_)) => unreachable!("rejected at construction"),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.base.dim() {
            return Err(Error::DimensionMismatch { expected: self.base.dim(), found: x.len() });
        }
        Ok(())
    }

    /// `C(x, n)` in floating point, dilated by nothing.
    pub fn product(&self, x: &[f64], n: u64) -> Result<FloatMatrix> {
        self.check_point(x)?;
        let mut acc = FloatMatrix::identity(self.d);
        let mut p = x.to_vec();
        let step = self.base.as_step();
        for _ in 0..n {
            let g = self.generator_at(&p);
            if g.dim() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, found: g.dim() });
            }
            acc.left_mul_in_place(&g);
            step.step_point(&mut p);
        }
        acc.guard()?;
        Ok(acc)
    }

    /// Haar means of the superdiagonal entries, exact where available.
    fn superdiagonal_means(&self, haar_sample_size: usize, seed: u64) -> Result<Vec<f64>> {
        let d = self.d;
        match (&self.generator, &self.base) {
            (Generator::Derivative, CocycleBase::Skew(s)) => {
                // the (a, a+1) entry is the last-variable derivative of the skew
                // feeding coordinate d - a; its mean is that skew's winding
                Ok((0..d - 1).map(|a| s.skews()[d - a - 2].winding() as f64).collect())
            }
            (Generator::Functions(m), _) => Ok((0..d - 1).map(|a| m.mean(a, a + 1)).collect()),
            _ => {
                let cloud = sample_haar(self.base.as_step().space(), haar_sample_size, seed)?;
                let mut sums = vec![0.0; d - 1];
                for (p, w) in cloud.iter() {
                    let g = self.generator_at(p);
                    for (a, s) in sums.iter_mut().enumerate() {
                        *s += w * g.get(a, a + 1);
                    }
                }
                Ok(sums)
            }
        }
    }
}

/// The predicted limit `f*` with `f*_{ij} = lambda(j-i) prod_{k=i}^{j-1} <f_{k,k+1}>`.
///
/// Means are exact for derivative and function-matrix generators and Haar
/// sample means (`haar_sample_size` i.i.d. points) for custom generators. The
/// base is assumed ergodic.
pub fn met_limit_prediction(spec: &CocycleSpec, haar_sample_size: usize, seed: u64) -> Result<FloatMatrix> {
    let means = spec.superdiagonal_means(haar_sample_size, seed)?;
    let lambda = lambda_table(spec.d);
    Ok(FloatMatrix::from_fn(spec.d, |i, j| lambda[j - i] * means[i..j].iter().product::<f64>()))
}

/// Deviation of `theta_{1/n} C(x, n)` from the prediction at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub max_deviation: f64,
    /// `(i, j, |deviation|)` for every strictly upper entry, 0-based.
    pub entries: Vec<(usize, usize, f64)>,
}

/// Deviations at each `n` of the increasing list `n_list`, from one pass along the orbit.
pub fn met_convergence_check(
    spec: &CocycleSpec,
    x: &[f64],
    n_list: &[u64],
    prediction: &FloatMatrix,
) -> Result<Vec<ConvergenceRow>> {
    spec.check_point(x)?;
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("n_list must be strictly increasing"));
    }
    if n_list.first() == Some(&0) {
        return Err(Error::invalid("dilation by 1/n needs n >= 1"));
    }
    if prediction.dim() != spec.d {
        return Err(Error::DimensionMismatch { expected: spec.d, found: prediction.dim() });
    }
    let step = spec.base.as_step();
    let mut acc = FloatMatrix::identity(spec.d);
    let mut p = x.to_vec();
    let mut at = 0u64;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        while at < n {
            acc.left_mul_in_place(&spec.generator_at(&p));
            step.step_point(&mut p);
            at += 1;
        }
        acc.guard()?;
        let scaled = acc.dilate(&(1.0 / n as f64))?;
        let mut entries = Vec::new();
        for i in 0..spec.d {
            for j in i + 1..spec.d {
                entries.push((i, j, (scaled.get(i, j) - prediction.get(i, j)).abs()));
            }
        }
        let max_deviation = entries.iter().map(|e| e.2).fold(0.0, f64::max);
        rows.push(ConvergenceRow { n, max_deviation, entries });
    }
    Ok(rows)
}

/// Exact rational from an integer numerator and positive denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
