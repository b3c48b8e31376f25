//! Iterated skew products on `T^d`
//!
//! ```text
//! T(x_1, ..., x_d) = (x_1 + alpha, x_2 + f_1(x_1), ..., x_d + f_{d-1}(x_1, ..., x_{d-1}))
//! ```
//!
//! together with pure rotations, their Jacobian cocycles and the
//! vertical-rotation defect of pushed clouds.

use serde::{Deserialize, Serialize};

use crate::diophantine::{check_irrational, integer_relation};
use crate::error::{Error, Result};
use crate::measures::{
    pushforward, wrap, FunctionSpec, FunctionSpecData, ParticleCloud, Space, StepMap, TorusPoint,
};
use crate::metrics::fourier_distance;
use crate::unipotent::FloatMatrix;

/// Version tag of the system description format.
pub const SYSTEM_FORMAT: u32 = 1;

/// An iterated skew product on `T^d`. `skews[k]` has arity `k + 1` and feeds
/// `x_1..x_{k+1}` into coordinate `k + 2` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct SkewSystem {
    alpha: f64,
    skews: Vec<FunctionSpec>,
}

/// JSON description `{format, d, alpha, skews: [{winding, harmonics}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub format: u32,
    pub d: usize,
    #[serde(default = "crate::golden_alpha")]
    pub alpha: f64,
    pub skews: Vec<FunctionSpecData>,
}

impl SkewSystem {
    /// Fails if `alpha` is numerically rational or a skew has the wrong arity.
    pub fn new(alpha: f64, skews: Vec<FunctionSpec>) -> Result<Self> {
        check_irrational(alpha)?;
        for (k, f) in skews.iter().enumerate() {
            if f.arity() != k + 1 {
                return Err(Error::invalid(format!(
                    "skew {} must take {} variables, found {}",
                    k + 1,
                    k + 1,
                    f.arity()
                )));
            }
        }
        Ok(SkewSystem { alpha, skews })
    }

    /// `T(x, y) = (x + alpha, y + x)`.
    pub fn linear_skew(alpha: f64) -> Result<Self> {
        SkewSystem::new(alpha, vec![FunctionSpec::linear(1, 1)])
    }

    /// The system where every skew is `x_k` with the given winding.
    pub fn furstenberg(alpha: f64, windings: &[i64]) -> Result<Self> {
        let skews = windings.iter().enumerate().map(|(k, &q)| FunctionSpec::linear(k + 1, q)).collect();
        SkewSystem::new(alpha, skews)
    }

    pub fn from_file(file: &SystemFile) -> Result<Self> {
        if file.format != SYSTEM_FORMAT {
            return Err(Error::invalid(format!("unsupported system format {}", file.format)));
        }
        if file.d == 0 || file.skews.len() + 1 != file.d {
            return Err(Error::invalid(format!(
                "a system on T^{} needs {} skews, found {}",
                file.d,
                file.d.saturating_sub(1),
                file.skews.len()
            )));
        }
        let skews = file
            .skews
            .iter()
            .enumerate()
            .map(|(k, data)| FunctionSpec::from_data(k + 1, data))
            .collect::<Result<Vec<_>>>()?;
        SkewSystem::new(file.alpha, skews)
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            format: SYSTEM_FORMAT,
            d: self.dim(),
            alpha: self.alpha,
            skews: self.skews.iter().map(FunctionSpec::to_data).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.skews.len() + 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn skews(&self) -> &[FunctionSpec] {
        &self.skews
    }

    /// Every skew has nonzero winding in its last variable.
    pub fn is_furstenberg_class(&self) -> bool {
        self.skews.iter().all(|f| f.winding() != 0)
    }

    /// The factor system on the first `j` coordinates.
    pub fn truncate(&self, j: usize) -> Result<SkewSystem> {
        if j == 0 || j > self.dim() {
            return Err(Error::invalid(format!("cannot truncate a {}-dimensional system to {j}", self.dim())));
        }
        Ok(SkewSystem { alpha: self.alpha, skews: self.skews[..j - 1].to_vec() })
    }

    pub fn step(&self, p: &TorusPoint) -> Result<TorusPoint> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.dim() });
        }
        let mut c = p.coords().to_vec();
        self.step_point(&mut c);
        Ok(TorusPoint::new(c))
    }

    /// Jacobian of `T` at `x` in the basis `(d/dx_d, ..., d/dx_1)`, where it is
    /// upper unipotent: entry `(a, b)`, `a < b`, is `d f_{r-1} / d x_c` with
    /// `r = d - a` and `c = d - b` (1-based coordinates).
    pub fn jacobian(&self, x: &[f64]) -> FloatMatrix {
        let d = self.dim();
        FloatMatrix::from_fn(d, |a, b| {
            let (r, c) = (d - a, d - b);
            self.skews[r - 2].partial(&x[..r - 1], c - 1)
        })
    }

    /// [`jacobian`](Self::jacobian) for a torus point.
    pub fn derivative_step(&self, p: &TorusPoint) -> Result<FloatMatrix> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.dim() });
        }
        Ok(self.jacobian(p.coords()))
    }

    /// Derivative of `T^n` at `x` (same basis): the product of Jacobians along the orbit.
    pub fn orbit_derivative(&self, x: &[f64], n: u64) -> Result<FloatMatrix> {
        crate::unipotent::CocycleSpec::derivative(self.clone()).product(x, n)
    }

    /// Lift of `T^n` started from an unreduced point: coordinates are not
    /// reduced mod 1, so the result is differentiable in `x`.
    pub fn lifted_orbit(&self, x: &[f64], n: usize) -> Vec<f64> {
        let mut p = x.to_vec();
        for _ in 0..n {
            for r in (1..p.len()).rev() {
                p[r] += self.skews[r - 1].eval_lift(&p[..r]);
            }
            p[0] += self.alpha;
        }
        p
    }
}

impl StepMap for SkewSystem {
    fn space(&self) -> Space {
        Space::torus(self.dim())
    }

    #[inline]
    fn step_point(&self, p: &mut [f64]) {
        // last coordinate first, so each skew reads the old values
        for r in (1..p.len()).rev() {
            p[r] = wrap(p[r] + self.skews[r - 1].eval_lift(&p[..r]));
        }
        p[0] = wrap(p[0] + self.alpha);
    }
}

/// Translation `x -> x + alpha` on `T^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rotation {
    alpha: Vec<f64>,
}

impl Rotation {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::invalid("rotation needs at least one component"));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("rotation components must be finite"));
        }
        Ok(Rotation { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Minimality screen: each component numerically irrational, and for
    /// `d = 2` no integer relation with coefficients up to 1000.
    pub fn is_minimal(&self) -> bool {
        if self.alpha.iter().any(|&a| check_irrational(a).is_err()) {
            return false;
        }
        match self.alpha.as_slice() {
            [a, b] => integer_relation(*a, *b, 1000, 1e-9).is_none(),
            _ => true,
        }
    }
}

impl StepMap for Rotation {
    fn space(&self) -> Space {
        Space::torus(self.alpha.len())
    }

    fn step_point(&self, p: &mut [f64]) {
        for (c, a) in p.iter_mut().zip(&self.alpha) {
            *c = wrap(*c + a);
        }
    }
}

/// Vertical rotation `R_t` adding `t` to the last coordinate.
pub fn rotate_last(cloud: &ParticleCloud, t: f64) -> ParticleCloud {
    let last = cloud.dim() - 1;
    cloud.map_points(|p| p[last] += t)
}

/// `fourier_distance(R_t T^n_* mu, T^n_* mu)`.
pub fn vertical_rotation_defect(
    system: &SkewSystem,
    mu: &ParticleCloud,
    t: f64,
    n: usize,
    cutoff: i64,
    s: f64,
) -> Result<f64> {
    let pushed = pushforward(mu, system, n)?;
    vertical_rotation_defect_of(&pushed, t, cutoff, s)
}

/// `fourier_distance(R_t nu, nu)` for an already pushed cloud.
pub fn vertical_rotation_defect_of(nu: &ParticleCloud, t: f64, cutoff: i64, s: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    fourier_distance(&rotate_last(nu, t), nu, cutoff, s)
}
