//! Experiment configuration files.

use std::path::PathBuf;

use ergodiclab_core::expansive::Example55Options;
use ergodiclab_core::heisenberg::NilRotation;
use ergodiclab_core::measures::FunctionSpecData;
use ergodiclab_core::metrics::MetricParams;
use ergodiclab_core::unipotent::FunctionEntryData;
use ergodiclab_core::golden_alpha;
use serde::{Deserialize, Serialize};

pub const CONFIG_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metric: MetricParams,
    /// Fresh Haar clouds drawn for each noise-floor median.
    #[serde(default = "default_noise_repeats")]
    pub noise_repeats: usize,
    pub experiment: Experiment,
    /// Thresholds on summary quantities, enforced by `--check`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

fn default_noise_repeats() -> usize {
    5
}

fn default_alpha() -> f64 {
    golden_alpha()
}

fn default_xu() -> f64 {
    NilRotation::default().xu
}

fn default_yu() -> f64 {
    NilRotation::default().yu
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    DistanceProfile(ProfileExperiment),
    Heisenberg(HeisenbergExperiment),
    CocycleMet(CocycleExperiment),
    ExpansiveS(ExpansiveSExperiment),
    Coboundary(CoboundaryExperiment),
    #[serde(rename = "example_5_5")]
    Example55(Example55Experiment),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::DistanceProfile(_) => "distance_profile",
            Experiment::Heisenberg(_) => "heisenberg",
            Experiment::CocycleMet(_) => "cocycle_met",
            Experiment::ExpansiveS(_) => "expansive_s",
            Experiment::Coboundary(_) => "coboundary",
            Experiment::Example55(_) => "example_5_5",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `x_{i+1} += f_i(x_1..x_i)`; the `i`-th skew takes `i` variables.
    Skew {
        #[serde(default = "default_alpha")]
        alpha: f64,
        skews: Vec<FunctionSpecData>,
    },
    /// `x_{i+1} += q_i x_i`.
    Furstenberg {
        #[serde(default = "default_alpha")]
        alpha: f64,
        windings: Vec<i64>,
    },
    Rotation {
        alpha: Vec<f64>,
    },
    Nilrotation {
        #[serde(default = "default_xu")]
        xu: f64,
        #[serde(default = "default_yu")]
        yu: f64,
        #[serde(default)]
        zu: f64,
    },
    Expansive {
        #[serde(default = "default_alpha")]
        alpha: f64,
        p: i64,
        f: FunctionSpecData,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    Stratified,
    Iid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constructor", rename_all = "snake_case", deny_unknown_fields)]
pub enum CloudSpec {
    /// i.i.d. Haar particles.
    Haar { size: usize },
    /// Cell midpoints of a uniform grid with `per_axis` cells per axis.
    Stratified { per_axis: usize },
    /// Particles `(x, g_1(x), ..., g_m(x))` over base samples `x`; a cloud on `T^(1+m)`.
    Curve {
        size: usize,
        sampling: SamplingMode,
        fibers: Vec<FunctionSpecData>,
    },
    /// Heisenberg particles with `z = z0` over a stratified base grid.
    FiberSection { z0: f64, size: usize },
    /// A saved cloud (`w,x1,...` or `w,x,y,z` header).
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    /// `epsilon` as a multiple of the noise floor.
    #[serde(default = "default_epsilon_factor")]
    pub epsilon_factor: f64,
    /// Window lengths in schedule samples; a doubling ladder when absent.
    #[serde(default)]
    pub windows: Option<Vec<usize>>,
}

fn default_epsilon_factor() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileExperiment {
    pub system: SystemSpec,
    pub cloud: CloudSpec,
    pub n_max: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    /// Also report `d(R_t nu, nu)` for the vertical rotation by `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertical_rotation: Option<f64>,
    /// Also report the distance over frequencies supported on these coordinates (0-based).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_coords: Option<Vec<usize>>,
    /// Also compare the final value at `s = 0` against its own noise floor.
    #[serde(default)]
    pub unweighted: bool,
    /// Times at which the profile is reported as strictly decreasing or not.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decreasing_at: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergExperiment {
    #[serde(default)]
    pub rotation: NilRotation,
    pub z0: f64,
    pub size: usize,
    pub n_max: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub unweighted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// The Jacobian of the skew system.
    Derivative,
    /// Strictly upper entries as functions on the base; indices are 1-based.
    Functions { d: usize, entries: Vec<FunctionEntryData> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleExperiment {
    pub system: SystemSpec,
    pub generator: GeneratorSpec,
    pub n_list: Vec<u64>,
    /// Random starting points, drawn after any explicit `start_points`.
    #[serde(default)]
    pub starts: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub start_points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansiveSpec {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub p: i64,
    pub f: FunctionSpecData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansiveSExperiment {
    pub system: ExpansiveSpec,
    pub gamma: FunctionSpecData,
    pub epsilon: f64,
    pub grid_n: usize,
    #[serde(rename = "N_trunc")]
    pub n_trunc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoboundaryExperiment {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub p: i64,
    pub gamma: FunctionSpecData,
    /// Added to the coboundary skew; zero keeps it exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<FunctionSpecData>,
    pub size: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSpec {
    pub n: usize,
    /// Sub-interval of certified `S` whose image is examined.
    pub s_interval: [f64; 2],
    /// Points at which `|Delta_n - p^(n-1) tau|` is compared with `kappa`.
    #[serde(default = "default_slope_points")]
    pub slope_points: usize,
    #[serde(default = "default_slope_n_max")]
    pub slope_n_max: usize,
}

fn default_slope_points() -> usize {
    1000
}

fn default_slope_n_max() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example55Experiment {
    pub system: ExpansiveSpec,
    #[serde(default)]
    pub options: Example55Options,
    pub size: usize,
    pub n_max: usize,
    pub epsilon: f64,
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    #[serde(rename = "N_trunc", default = "default_n_trunc")]
    pub n_trunc: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extract: Option<ExtractSpec>,
}

fn default_grid() -> usize {
    10_000
}

fn default_n_trunc() -> usize {
    80
}

/// `quantity` from the run summary must lie in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub quantity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}
