//! Numerical laboratory for push-forward dynamics `T^n_* mu` of probability
//! measures under torus skew products, Heisenberg nilrotations and expansive
//! skew products.
//!
//! Measures are represented as weighted particle clouds ([`ParticleCloud`]);
//! every system implements [`StepMap`] so clouds can be pushed forward
//! uniformly. Weak-star closeness is estimated through weighted Fourier
//! coefficient sums ([`metrics`]) paired with explicit Lipschitz test
//! functions.

pub mod error;
pub mod fourier;
pub mod expansive;
pub mod heisenberg;
pub mod measures;
pub mod metrics;
pub mod rng;
pub mod torus_skew;
pub mod unipotent;

mod diophantine;

pub use error::{Error, Result};
pub use measures::{
    cloud_on_curve, fourier_coefficient, project, pushforward, sample_haar, FunctionSpec,
    Harmonic, ParticleCloud, Sampling, Space, StepMap, TorusPoint,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default irrational rotation number, `(sqrt(5) - 1) / 2`.
pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}
