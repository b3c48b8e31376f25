//! The Heisenberg nilmanifold `H_3(R)/H_3(Z)`.
//!
//! Group elements are triples `(x, y, z)` standing for the upper unipotent
//! matrix with entries `x, y` on the superdiagonal and `z` in the corner, so
//!
//! ```text
//! (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')
//! ```
//!
//! The unit cube `[0,1)^3` is a fundamental domain for right multiplication
//! by the integer lattice; points of the manifold are stored there.

use serde::{Deserialize, Serialize};

use crate::diophantine::integer_relation;
use crate::error::{Error, Result};
use crate::measures::{wrap, ParticleCloud, Space, StepMap, TorusPoint};

/// Largest coefficient screened when testing the torus factor for minimality.
pub const MINIMALITY_COEFF_BOUND: i64 = 1000;
/// Distance to an integer below which `a x_u + b y_u` counts as an integer relation.
pub const MINIMALITY_TOL: f64 = 1e-9;

/// A group element `(x, y, z)` (unreduced).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A point of the manifold, in the fundamental cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergPoint {
    x: f64,
    y: f64,
    z: f64,
}

impl HeisElement {
    pub const IDENTITY: HeisElement = HeisElement { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        HeisElement { x, y, z }
    }

    pub fn inverse(&self) -> Self {
        HeisElement { x: -self.x, y: -self.y, z: -self.z + self.x * self.y }
    }

    /// `self^n` in closed form: `(n x, n y, n z + n(n-1)/2 x y)`.
    pub fn pow(&self, n: i64) -> Self {
        let nf = n as f64;
        HeisElement {
            x: nf * self.x,
            y: nf * self.y,
            z: nf * self.z + nf * (nf - 1.0) / 2.0 * self.x * self.y,
        }
    }
}

/// Group product.
pub fn heis_mul(g: &HeisElement, h: &HeisElement) -> HeisElement {
    HeisElement { x: g.x + h.x, y: g.y + h.y, z: g.z + h.z + g.x * h.y }
}

/// Commutator `g h g^-1 h^-1`.
pub fn commutator(g: &HeisElement, h: &HeisElement) -> HeisElement {
    heis_mul(&heis_mul(&heis_mul(g, h), &g.inverse()), &h.inverse())
}

/// Representative in the unit cube of the coset `g Γ`.
pub(crate) fn reduce_coords(x: f64, y: f64, z: f64) -> [f64; 3] {
    // right multiplication by (a, b, c) ∈ Γ sends (x, y, z) to (x + a, y + b, z + c + x b)
    let b = -y.floor();
    [wrap(x), wrap(y), wrap(z + x * b)]
}

/// The point of the fundamental domain in `g Γ`.
pub fn reduce(g: &HeisElement) -> HeisenbergPoint {
    let [x, y, z] = reduce_coords(g.x, g.y, g.z);
    HeisenbergPoint { x, y, z }
}

impl HeisenbergPoint {
    /// Point of the manifold represented by `(x, y, z)`, reduced into the cube.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        reduce(&HeisElement { x, y, z })
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn element(&self) -> HeisElement {
        HeisElement { x: self.x, y: self.y, z: self.z }
    }
}

/// Projection onto the maximal torus factor `T^2`, forgetting `z`.
pub fn torus_factor(p: &HeisenbergPoint) -> TorusPoint {
    TorusPoint::new(vec![p.x, p.y])
}

/// Left translation `g Γ -> u g Γ` by a fixed group element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NilRotation {
    pub xu: f64,
    pub yu: f64,
    pub zu: f64,
}

impl Default for NilRotation {
    fn default() -> Self {
        NilRotation { xu: crate::golden_alpha(), yu: 2f64.sqrt() - 1.0, zu: 0.0 }
    }
}

impl NilRotation {
    pub fn new(xu: f64, yu: f64, zu: f64) -> Result<Self> {
        if !(xu.is_finite() && yu.is_finite() && zu.is_finite()) {
            return Err(Error::invalid("rotation components must be finite"));
        }
        Ok(NilRotation { xu, yu, zu })
    }

    pub fn element(&self) -> HeisElement {
        HeisElement::new(self.xu, self.yu, self.zu)
    }

    /// Whether the induced rotation of `T^2` is minimal, screened as: no
    /// nonzero `(a, b)` with `|a|, |b| <= 1000` has `a x_u + b y_u` within
    /// 1e-9 of an integer.
    pub fn is_minimal(&self) -> bool {
        integer_relation(self.xu, self.yu, MINIMALITY_COEFF_BOUND, MINIMALITY_TOL).is_none()
    }

    pub fn require_minimal(&self) -> Result<()> {
        match integer_relation(self.xu, self.yu, MINIMALITY_COEFF_BOUND, MINIMALITY_TOL) {
            None => Ok(()),
            Some((a, b)) => Err(Error::Precondition(format!(
                "torus factor rotation is not minimal: {a}*xu + {b}*yu is an integer"
            ))),
        }
    }

    pub fn step(&self, p: &HeisenbergPoint) -> HeisenbergPoint {
        nil_step(self, p)
    }
}

/// `reduce(u · p)`.
pub fn nil_step(rot: &NilRotation, p: &HeisenbergPoint) -> HeisenbergPoint {
    reduce(&heis_mul(&rot.element(), &p.element()))
}

impl StepMap for NilRotation {
    fn space(&self) -> Space {
        Space::Heisenberg
    }

    #[inline]
    fn step_point(&self, p: &mut [f64]) {
        let r = reduce_coords(self.xu + p[0], self.yu + p[1], self.zu + p[2] + self.xu * p[1]);
        p.copy_from_slice(&r);
    }
}

/// Factorization `n = rows * cols` with `rows` the largest divisor not above `sqrt(n)`.
pub(crate) fn grid_shape(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt() as usize;
    while rows > 1 && n % rows != 0 {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, n / rows)
}

/// Particles `(x_i, y_i, z0)` with `(x_i, y_i)` a stratified grid of `T^2`:
/// a measure projecting to Haar on the torus factor but singular on the manifold.
///
/// The grid is `rows x cols` with `rows * cols = n` and `rows` the largest
/// divisor of `n` not above `sqrt(n)`. The construction is deterministic;
/// `seed` is accepted for interface uniformity.
pub fn fiber_section_cloud(z0: f64, n: usize, seed: u64) -> Result<ParticleCloud> {
    let _ = seed;
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    if !z0.is_finite() {
        return Err(Error::invalid("z0 must be finite"));
    }
    let (rows, cols) = grid_shape(n);
    let mut points = Vec::with_capacity(3 * n);
    for i in 0..rows {
        for j in 0..cols {
            points.push((i as f64 + 0.5) / rows as f64);
            points.push((j as f64 + 0.5) / cols as f64);
            points.push(z0);
        }
    }
    ParticleCloud::uniform(Space::Heisenberg, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &HeisElement, b: &HeisElement, tol: f64) -> bool {
        (a.x - b.x).abs() < tol && (a.y - b.y).abs() < tol && (a.z - b.z).abs() < tol
    }

    #[test]
    fn group_law_by_hand() {
        let g = HeisElement::new(1.0, 0.0, 0.0);
        let h = HeisElement::new(0.0, 1.0, 0.0);
        assert_eq!(heis_mul(&g, &h), HeisElement::new(1.0, 1.0, 1.0));
        assert_eq!(heis_mul(&h, &g), HeisElement::new(1.0, 1.0, 0.0));
        assert_eq!(commutator(&g, &h), HeisElement::new(0.0, 0.0, 1.0));
        let a = HeisElement::new(0.3, -1.2, 0.7);
        assert_eq!(heis_mul(&a, &HeisElement::IDENTITY), a);
        assert!(close(&heis_mul(&a, &a.inverse()), &HeisElement::IDENTITY, 1e-15));
    }

    #[test]
    fn reduction_of_shifted_point() {
        let p = reduce(&HeisElement::new(1.5, 0.25, 0.0));
        assert_eq!(p.coords(), [0.5, 0.25, 0.0]);
        let q = HeisenbergPoint::new(0.2, 0.3, 0.9);
        assert_eq!(q.coords(), [0.2, 0.3, 0.9]);
    }

    #[test]
    fn power_closed_form() {
        let u = HeisElement::new(0.61, 0.41, 0.13);
        let mut acc = HeisElement::IDENTITY;
        for n in 0..20 {
            assert!(close(&acc, &u.pow(n), 1e-12), "n={n}");
            acc = heis_mul(&u, &acc);
        }
    }

    #[test]
    fn default_rotation_is_minimal() {
        assert!(NilRotation::default().is_minimal());
        assert!(!NilRotation::new(0.5, 0.3, 0.0).unwrap().is_minimal());
        let g = crate::golden_alpha();
        assert!(NilRotation::new(g, 2.0 * g, 0.0).unwrap().require_minimal().is_err());
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(grid_shape(100_000), (250, 400));
        assert_eq!(grid_shape(7), (1, 7));
        assert_eq!(grid_shape(1), (1, 1));
        assert_eq!(grid_shape(36), (6, 6));
    }

    #[test]
    fn fiber_section_shape() {
        let c = fiber_section_cloud(0.37, 12, 0).unwrap();
        assert_eq!(c.len(), 12);
        assert!(c.iter().all(|(p, _)| p[2] == 0.37));
        assert!(fiber_section_cloud(0.1, 0, 0).is_err());
    }
}
