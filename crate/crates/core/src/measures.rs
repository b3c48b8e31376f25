//! Particle-cloud measures, circle-valued function specs and push-forward.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use num::complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{heisenberg, rng};

const TAU: f64 = std::f64::consts::TAU;

/// Reduces `x` to its representative in `[0, 1)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance from `x` to the nearest integer.
#[inline]
pub fn circle_dist(x: f64) -> f64 {
    let r = wrap(x);
    r.min(1.0 - r)
}

/// The phase space a cloud lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Torus { d: usize },
    /// `H_3(R)/H_3(Z)`, points stored as `(x, y, z)` in the unit-cube fundamental domain.
    Heisenberg,
}

impl Space {
    pub fn torus(d: usize) -> Self {
        Space::Torus { d }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Space::Torus { d } => d,
            Space::Heisenberg => 3,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            Space::Torus { d: 0 } => Err(Error::invalid("torus dimension must be at least 1")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Torus { d } => write!(f, "torus({d})"),
            Space::Heisenberg => write!(f, "heisenberg"),
        }
    }
}

/// A point of `T^d` with every coordinate in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        let mut coords = coords.into();
        coords.iter_mut().for_each(|c| *c = wrap(*c));
        TorusPoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinatewise sum, reduced mod 1.
    pub fn translate(&self, by: &[f64]) -> Result<TorusPoint> {
        if by.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: by.len() });
        }
        Ok(TorusPoint::new(
            self.coords.iter().zip(by).map(|(a, b)| a + b).collect::<Vec<_>>(),
        ))
    }
}

/// One trigonometric term `cos * cos(2 pi k.x) + sin * sin(2 pi k.x)`.
///
/// Serialized as `[[k...], cos, sin]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "(Vec<i64>, f64, f64)", into = "(Vec<i64>, f64, f64)")]
pub struct Harmonic {
    pub freq: Vec<i64>,
    pub cos: f64,
    pub sin: f64,
}

impl Harmonic {
    pub fn new(freq: impl Into<Vec<i64>>, cos: f64, sin: f64) -> Self {
        Harmonic { freq: freq.into(), cos, sin }
    }

    #[inline]
    fn phase(&self, x: &[f64]) -> f64 {
        self.freq.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum()
    }
}

impl From<(Vec<i64>, f64, f64)> for Harmonic {
    fn from((freq, cos, sin): (Vec<i64>, f64, f64)) -> Self {
        Harmonic { freq, cos, sin }
    }
}

impl From<Harmonic> for (Vec<i64>, f64, f64) {
    fn from(h: Harmonic) -> Self {
        (h.freq, h.cos, h.sin)
    }
}

/// Integer winding in the last variable plus a trigonometric polynomial.
///
/// As a circle-valued map, `x -> q * x_last + sum(a cos 2 pi k.x + b sin 2 pi k.x) mod 1`.
/// The same data read as a real function on `[0,1)^arity` (the "lift") is used
/// for cocycle generator entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    arity: usize,
    winding: i64,
    harmonics: Vec<Harmonic>,
}

/// Serialized form of [`FunctionSpec`]; the arity comes from context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpecData {
    #[serde(default)]
    pub winding: i64,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
}

impl FunctionSpec {
    pub fn new(arity: usize, winding: i64, harmonics: Vec<Harmonic>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("function arity must be at least 1"));
        }
        for h in &harmonics {
            if h.freq.len() != arity {
                return Err(Error::DimensionMismatch { expected: arity, found: h.freq.len() });
            }
            if !h.cos.is_finite() || !h.sin.is_finite() {
                return Err(Error::invalid("harmonic coefficients must be finite"));
            }
        }
        Ok(FunctionSpec { arity, winding, harmonics })
    }

    pub fn from_data(arity: usize, data: &FunctionSpecData) -> Result<Self> {
        FunctionSpec::new(arity, data.winding, data.harmonics.clone())
    }

    pub fn to_data(&self) -> FunctionSpecData {
        FunctionSpecData { winding: self.winding, harmonics: self.harmonics.clone() }
    }

    /// The constant map `c`.
    pub fn constant(arity: usize, c: f64) -> Self {
        FunctionSpec { arity, winding: 0, harmonics: vec![Harmonic::new(vec![0; arity], c, 0.0)] }
    }

    /// `x -> q * x_last`.
    pub fn linear(arity: usize, winding: i64) -> Self {
        FunctionSpec { arity, winding, harmonics: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    /// Appends a harmonic term.
    pub fn with_harmonic(mut self, freq: impl Into<Vec<i64>>, cos: f64, sin: f64) -> Result<Self> {
        let h = Harmonic::new(freq, cos, sin);
        if h.freq.len() != self.arity {
            return Err(Error::DimensionMismatch { expected: self.arity, found: h.freq.len() });
        }
        self.harmonics.push(h);
        Ok(self)
    }

    fn check_arity(&self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.arity, "argument length must equal arity");
    }

    /// Real-valued lift `q * x_last + P(x)`; valid for unreduced arguments.
    #[inline]
    pub fn eval_lift(&self, x: &[f64]) -> f64 {
        self.check_arity(x);
        let mut v = self.winding as f64 * x[self.arity - 1];
        for h in &self.harmonics {
            let (s, c) = (TAU * wrap(h.phase(x))).sin_cos();
            v += h.cos * c + h.sin * s;
        }
        v
    }

    /// Circle-valued evaluation in `[0, 1)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        wrap(self.eval_lift(x))
    }

    /// Partial derivative in variable `var` (0-based).
    pub fn partial(&self, x: &[f64], var: usize) -> f64 {
        self.check_arity(x);
        let mut v = if var + 1 == self.arity { self.winding as f64 } else { 0.0 };
        for h in &self.harmonics {
            let k = h.freq[var];
            if k == 0 {
                continue;
            }
            let (s, c) = (TAU * wrap(h.phase(x))).sin_cos();
            v += TAU * k as f64 * (h.sin * c - h.cos * s);
        }
        v
    }

    /// Derivative of a one-variable spec.
    pub fn derivative(&self, x: f64) -> f64 {
        self.partial(&[x], 0)
    }

    /// Upper bound on `sup |d f / d x_var|`.
    pub fn sup_partial_bound(&self, var: usize) -> f64 {
        let mut b = if var + 1 == self.arity { self.winding.unsigned_abs() as f64 } else { 0.0 };
        for h in &self.harmonics {
            b += TAU * h.freq[var].unsigned_abs() as f64 * (h.cos.abs() + h.sin.abs());
        }
        b
    }

    /// Upper bound on `sup |f'|` in the last variable.
    pub fn sup_derivative_bound(&self) -> f64 {
        self.sup_partial_bound(self.arity - 1)
    }

    /// Upper bound on `sup |P|` of the trigonometric part.
    pub fn sup_harmonic_bound(&self) -> f64 {
        self.harmonics.iter().map(|h| h.cos.abs() + h.sin.abs()).sum()
    }

    /// The partial derivative in `var` as a winding-0 spec.
    pub fn partial_spec(&self, var: usize) -> FunctionSpec {
        let mut harmonics = Vec::new();
        if var + 1 == self.arity && self.winding != 0 {
            harmonics.push(Harmonic::new(vec![0; self.arity], self.winding as f64, 0.0));
        }
        for h in &self.harmonics {
            let k = h.freq[var];
            if k == 0 {
                continue;
            }
            let w = TAU * k as f64;
            harmonics.push(Harmonic::new(h.freq.clone(), w * h.sin, -w * h.cos));
        }
        FunctionSpec { arity: self.arity, winding: 0, harmonics }
    }

    /// Integral of the lift over `[0,1)^arity`.
    pub fn mean(&self) -> f64 {
        let constant: f64 =
            self.harmonics.iter().filter(|h| h.freq.iter().all(|&k| k == 0)).map(|h| h.cos).sum();
        self.winding as f64 / 2.0 + constant
    }

    /// The constant term of the trigonometric part.
    pub fn constant_term(&self) -> f64 {
        self.harmonics.iter().filter(|h| h.freq.iter().all(|&k| k == 0)).map(|h| h.cos).sum()
    }

    /// `x -> f(x + t)` for a shift `t` of every variable, as a spec with the same lift.
    pub fn shifted(&self, t: &[f64]) -> Result<FunctionSpec> {
        if t.len() != self.arity {
            return Err(Error::DimensionMismatch { expected: self.arity, found: t.len() });
        }
        let mut harmonics = Vec::with_capacity(self.harmonics.len() + 1);
        let drift = self.winding as f64 * t[self.arity - 1];
        if drift != 0.0 {
            harmonics.push(Harmonic::new(vec![0; self.arity], drift, 0.0));
        }
        for h in &self.harmonics {
            let (s, c) = (TAU * wrap(h.phase(t))).sin_cos();
            harmonics.push(Harmonic::new(
                h.freq.clone(),
                h.cos * c + h.sin * s,
                h.sin * c - h.cos * s,
            ));
        }
        Ok(FunctionSpec { arity: self.arity, winding: self.winding, harmonics })
    }

    /// `sum c_i * f_i` with equal arities. The combined winding `sum c_i q_i`
    /// must be an integer (within 1e-9). Harmonics are merged per frequency.
    pub fn linear_combination(terms: &[(f64, &FunctionSpec)]) -> Result<FunctionSpec> {
        let arity = terms.first().ok_or_else(|| Error::invalid("empty combination"))?.1.arity;
        let mut winding = 0.0;
        let mut merged: BTreeMap<Vec<i64>, (f64, f64)> = BTreeMap::new();
        for &(c, f) in terms {
            if f.arity != arity {
                return Err(Error::DimensionMismatch { expected: arity, found: f.arity });
            }
            winding += c * f.winding as f64;
            for h in &f.harmonics {
                // cos(-k.x) = cos(k.x), sin(-k.x) = -sin(k.x)
                let (freq, sign) = canonical_frequency(&h.freq);
                let e = merged.entry(freq).or_insert((0.0, 0.0));
                e.0 += c * h.cos;
                e.1 += c * sign * h.sin;
            }
        }
        let rounded = winding.round();
        if (winding - rounded).abs() > 1e-9 {
            return Err(Error::invalid(format!("combined winding {winding} is not an integer")));
        }
        let harmonics = merged
            .into_iter()
            .map(|(freq, (a, b))| {
                let zero = freq.iter().all(|&k| k == 0);
                Harmonic::new(freq, a, if zero { 0.0 } else { b })
            })
            .filter(|h| h.cos != 0.0 || h.sin != 0.0)
            .collect();
        Ok(FunctionSpec { arity, winding: rounded as i64, harmonics })
    }
}

fn canonical_frequency(k: &[i64]) -> (Vec<i64>, f64) {
    match k.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => (k.iter().map(|&c| -c).collect(), -1.0),
        _ => (k.to_vec(), 1.0),
    }
}

/// How base coordinates of a constructed cloud are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Sampling {
    /// Midpoints `(i + 1/2) / n`.
    Stratified,
    Iid { seed: u64 },
}

/// A finite weighted point set on a [`Space`], standing in for a probability measure.
///
/// Weights are renormalized once, at construction; no operation renormalizes
/// afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    space: Space,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ParticleCloud {
    /// Builds a cloud from flat coordinates (`dim` values per particle).
    /// Coordinates are reduced to the fundamental domain.
    pub fn new(space: Space, mut points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        space.check()?;
        let dim = space.dim();
        if points.len() != weights.len() * dim {
            return Err(Error::invalid(format!(
                "{} coordinates do not describe {} particles of dimension {dim}",
                points.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::invalid("a cloud needs at least one particle"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        if points.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coordinates must be finite"));
        }
        let total = pairwise_sum(&weights);
        if total <= 0.0 {
            return Err(Error::invalid("weights sum to zero"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        reduce_points(space, &mut points);
        Ok(ParticleCloud { space, points, weights })
    }

    /// Equal-weight cloud.
    pub fn uniform(space: Space, points: Vec<f64>) -> Result<Self> {
        let n = points.len() / space.dim().max(1);
        ParticleCloud::new(space, points, vec![1.0; n])
    }

    /// Point mass at `p`.
    pub fn dirac(space: Space, p: &[f64]) -> Result<Self> {
        if p.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: p.len() });
        }
        ParticleCloud::new(space, p.to_vec(), vec![1.0])
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    /// Flat coordinate buffer, `dim` values per particle.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.dim()).zip(self.weights.iter().copied())
    }

    /// Same weights, new coordinates; used by operations that move particles.
    pub(crate) fn with_points(&self, mut points: Vec<f64>) -> ParticleCloud {
        debug_assert_eq!(points.len(), self.points.len());
        reduce_points(self.space, &mut points);
        ParticleCloud { space: self.space, points, weights: self.weights.clone() }
    }

    /// Applies `f` to every particle's coordinates in place, then re-reduces.
    pub fn map_points<F>(&self, f: F) -> ParticleCloud
    where
        F: Fn(&mut [f64]) + Sync,
    {
        let mut points = self.points.clone();
        points.par_chunks_mut(self.dim()).for_each(|p| f(p));
        self.with_points(points)
    }

    /// Particles whose coordinate `coord` lies in the arc `[start, start + length)` mod 1.
    pub fn restrict_to_arc(&self, coord: usize, start: f64, length: f64) -> Result<ParticleCloud> {
        if coord >= self.dim() {
            return Err(Error::invalid(format!("coordinate {coord} out of range")));
        }
        let d = self.dim();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, w) in self.iter() {
            if wrap(p[coord] - start) < length {
                points.extend_from_slice(p);
                weights.push(w);
            }
        }
        debug_assert_eq!(points.len(), weights.len() * d);
        ParticleCloud::new(self.space, points, weights)
    }

    /// Writes the cloud as CSV: header `w,x1,...,xd` (`w,x,y,z` on the
    /// Heisenberg manifold), 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(csv_header(self.space)).map_err(csv_err)?;
        let mut row = Vec::with_capacity(self.dim() + 1);
        for (p, w) in self.iter() {
            row.clear();
            row.push(format!("{w:.16e}"));
            row.extend(p.iter().map(|c| format!("{c:.16e}")));
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<ParticleCloud> {
        let mut rdr = csv::Reader::from_reader(input);
        let header: Vec<String> =
            rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let space = space_from_header(&header)?;
        let dim = space.dim();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(csv_err)?;
            if record.len() != dim + 1 {
                return Err(Error::Parse(format!("row {}: expected {} fields", line + 2, dim + 1)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
            };
            weights.push(parse(&record[0])?);
            for field in record.iter().skip(1) {
                points.push(parse(field)?);
            }
        }
        ParticleCloud::new(space, points, weights)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load_csv(path: &Path) -> Result<ParticleCloud> {
        ParticleCloud::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn csv_header(space: Space) -> Vec<String> {
    match space {
        Space::Heisenberg => ["w", "x", "y", "z"].iter().map(|s| s.to_string()).collect(),
        Space::Torus { d } => {
            std::iter::once("w".to_string()).chain((1..=d).map(|i| format!("x{i}"))).collect()
        }
    }
}

fn space_from_header(header: &[String]) -> Result<Space> {
    if header.first().map(String::as_str) != Some("w") || header.len() < 2 {
        return Err(Error::Parse("header must start with `w` and name at least one coordinate".into()));
    }
    if header == ["w", "x", "y", "z"] {
        return Ok(Space::Heisenberg);
    }
    let space = Space::torus(header.len() - 1);
    if header != csv_header(space).as_slice() {
        return Err(Error::Parse(format!("unrecognized header {}", header.join(","))));
    }
    Ok(space)
}

fn reduce_points(space: Space, points: &mut [f64]) {
    match space {
        Space::Torus { .. } => points.iter_mut().for_each(|c| *c = wrap(*c)),
        Space::Heisenberg => points.chunks_exact_mut(3).for_each(|p| {
            let r = heisenberg::reduce_coords(p[0], p[1], p[2]);
            p.copy_from_slice(&r);
        }),
    }
}

/// Pairwise (tree) summation; the result depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// A measurable map that can push particles forward one step.
pub trait StepMap: Sync {
    fn space(&self) -> Space;

    /// Replaces `p` (length `space().dim()`, inside the fundamental domain)
    /// by its image, reduced to the fundamental domain.
    fn step_point(&self, p: &mut [f64]);
}

impl<M: StepMap + ?Sized> StepMap for &M {
    fn space(&self) -> Space {
        (**self).space()
    }

    fn step_point(&self, p: &mut [f64]) {
        (**self).step_point(p)
    }
}

/// `T^n_* cloud`: every particle replaced by its `n`-fold image, weights untouched.
pub fn pushforward<M: StepMap + ?Sized>(
    cloud: &ParticleCloud,
    map: &M,
    steps: usize,
) -> Result<ParticleCloud> {
    if map.space() != cloud.space() {
        return Err(Error::SpaceMismatch { expected: map.space(), found: cloud.space() });
    }
    let mut points = cloud.points.clone();
    points.par_chunks_mut(cloud.dim()).with_min_len(256).for_each(|p| {
        for _ in 0..steps {
            map.step_point(p);
        }
    });
    Ok(ParticleCloud { space: cloud.space, points, weights: cloud.weights.clone() })
}

/// The image of the cloud under the coordinate projection onto `indices`.
pub fn project(cloud: &ParticleCloud, indices: &[usize]) -> Result<ParticleCloud> {
    if indices.is_empty() {
        return Err(Error::invalid("projection needs at least one coordinate"));
    }
    let d = cloud.dim();
    if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
        return Err(Error::invalid(format!("coordinate index {bad} out of range for {}", cloud.space)));
    }
    let mut points = Vec::with_capacity(cloud.len() * indices.len());
    for p in cloud.points.chunks_exact(d) {
        points.extend(indices.iter().map(|&i| p[i]));
    }
    let space = Space::torus(indices.len());
    Ok(ParticleCloud { space, points, weights: cloud.weights.clone() })
}

/// `n` i.i.d. uniform points of the fundamental domain, weights `1/n`.
pub fn sample_haar(space: Space, n: usize, seed: u64) -> Result<ParticleCloud> {
    space.check()?;
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut rng = rng::stream(seed, "haar-cloud");
    let points = (0..n * space.dim()).map(|_| rng.gen::<f64>()).collect();
    ParticleCloud::uniform(space, points)
}

/// Product grid of `per_axis^dim` cell midpoints, equal weights.
pub fn stratified_haar(space: Space, per_axis: usize) -> Result<ParticleCloud> {
    space.check()?;
    if per_axis == 0 {
        return Err(Error::invalid("grid size must be at least 1"));
    }
    let d = space.dim();
    let total = per_axis
        .checked_pow(d as u32)
        .ok_or_else(|| Error::invalid("grid too large"))?;
    let mut points = Vec::with_capacity(total * d);
    for idx in 0..total {
        let mut rem = idx;
        let mut p = vec![0.0; d];
        for c in (0..d).rev() {
            p[c] = ((rem % per_axis) as f64 + 0.5) / per_axis as f64;
            rem /= per_axis;
        }
        points.extend(p);
    }
    ParticleCloud::uniform(space, points)
}

/// Base abscissas in `[0,1)` for `n` particles.
pub fn base_samples(n: usize, sampling: Sampling) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    Ok(match sampling {
        Sampling::Stratified => (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect(),
        Sampling::Iid { seed } => {
            let mut rng = rng::stream(seed, "curve-base");
            (0..n).map(|_| rng.gen::<f64>()).collect()
        }
    })
}

/// Particles `(x_i, gamma(x_i))` on `T^2` with equal weights.
pub fn cloud_on_curve(gamma: &FunctionSpec, n: usize, sampling: Sampling) -> Result<ParticleCloud> {
    if gamma.arity() != 1 {
        return Err(Error::invalid("a curve needs a one-variable function"));
    }
    let xs = base_samples(n, sampling)?;
    let mut points = Vec::with_capacity(2 * n);
    for x in xs {
        points.push(x);
        points.push(gamma.eval(&[x]));
    }
    ParticleCloud::uniform(Space::torus(2), points)
}

/// `sum_i w_i exp(-2 pi i k.x_i)`; exactly `1` at `k = 0`.
pub fn fourier_coefficient(cloud: &ParticleCloud, k: &[i64]) -> Result<Complex64> {
    if k.len() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), found: k.len() });
    }
    if k.iter().all(|&c| c == 0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let terms: Vec<(f64, f64)> = cloud
        .iter()
        .map(|(p, w)| {
            let phase: f64 = k.iter().zip(p).map(|(&kc, &x)| kc as f64 * x).sum();
            let (s, c) = (TAU * wrap(phase)).sin_cos();
            (w * c, -w * s)
        })
        .collect();
    let re: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let im: Vec<f64> = terms.iter().map(|t| t.1).collect();
    Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
}
