//! Experiment execution. Every experiment returns its output files in memory
//! together with a flat summary of named scalars that checks refer to.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ergodiclab_core::expansive::{
    coboundary_residual, coboundary_skew, delta_n, kappa, limit_curve_extract, longest,
    make_example_5_5, s_set, tau, total_length, uniform_circle_spread, CurveExtract, CurveSpec,
    ExpansiveSystem,
};
use ergodiclab_core::fourier::FrequencySet;
use ergodiclab_core::heisenberg::{fiber_section_cloud, NilRotation};
use ergodiclab_core::measures::{base_samples, stratified_haar, wrap, FunctionSpecData};
use ergodiclab_core::metrics::{
    density_statistics, exceptional_indicator, haar_distance_on, lipschitz_lower_bound_haar,
    log_log_slope, noise_floor, observe_orbit, schedule, window_ladder, DensityReport,
};
use ergodiclab_core::rng::{derive_seed, stream};
use ergodiclab_core::torus_skew::{vertical_rotation_defect_of, Rotation, SkewSystem};
use ergodiclab_core::unipotent::{
    lambda_table, met_convergence_check, met_limit_prediction, CocycleBase, CocycleSpec,
    ConvergenceRow, FunctionMatrix, Generator,
};
use ergodiclab_core::{
    cloud_on_curve, pushforward, sample_haar, FunctionSpec, ParticleCloud, Sampling, Space, StepMap,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::*;
use crate::error::CliError;

pub type Summary = BTreeMap<String, f64>;

/// Everything an experiment produced, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// `(file name, contents)` in emission order.
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Summary,
    pub noise_floor: Option<f64>,
}

pub struct Context<'a> {
    pub seed: u64,
    pub metric: ergodiclab_core::metrics::MetricParams,
    pub noise_repeats: usize,
    pub assume_ergodic: bool,
    /// Directory that relative paths in the config are resolved against.
    pub base_dir: &'a Path,
}

impl Context<'_> {
    fn seed_for(&self, role: &str) -> u64 {
        derive_seed(self.seed, role)
    }

    fn noise(&self, space: Space, n: usize, set: &FrequencySet, s: f64) -> Result<f64, CliError> {
        Ok(noise_floor(space, n, set, s, self.seed_for("noise-floor"), self.noise_repeats)?)
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn execute(config: &ExperimentConfig, ctx: &Context) -> Result<RunOutput, CliError> {
    ctx.metric.validate()?;
    if ctx.noise_repeats < 3 {
        return Err(config_err("noise_repeats must be at least 3"));
    }
    match &config.experiment {
        Experiment::DistanceProfile(e) => run_profile_experiment(e, ctx),
        Experiment::Heisenberg(e) => run_heisenberg(e, ctx),
        Experiment::CocycleMet(e) => run_cocycle(e, ctx),
        Experiment::ExpansiveS(e) => run_expansive_s(e),
        Experiment::Coboundary(e) => run_coboundary(e, ctx),
        Experiment::Example55(e) => run_example_5_5(e, ctx),
    }
}

enum System {
    Skew(SkewSystem),
    Rotation(Rotation),
    Nil(NilRotation),
    Expansive(ExpansiveSystem),
}

impl System {
    fn map(&self) -> &dyn StepMap {
        match self {
            System::Skew(s) => s,
            System::Rotation(r) => r,
            System::Nil(n) => n,
            System::Expansive(e) => e,
        }
    }
}

fn build_skew(alpha: f64, skews: &[FunctionSpecData]) -> Result<SkewSystem, CliError> {
    let fs = skews
        .iter()
        .enumerate()
        .map(|(i, d)| FunctionSpec::from_data(i + 1, d))
        .collect::<ergodiclab_core::Result<Vec<_>>>()?;
    Ok(SkewSystem::new(alpha, fs)?)
}

fn build_expansive(spec: &ExpansiveSpec) -> Result<ExpansiveSystem, CliError> {
    Ok(ExpansiveSystem::new(spec.alpha, spec.p, FunctionSpec::from_data(1, &spec.f)?)?)
}

fn build_system(spec: &SystemSpec) -> Result<System, CliError> {
    Ok(match spec {
        SystemSpec::Skew { alpha, skews } => System::Skew(build_skew(*alpha, skews)?),
        SystemSpec::Furstenberg { alpha, windings } => System::Skew(SkewSystem::furstenberg(*alpha, windings)?),
        SystemSpec::Rotation { alpha } => System::Rotation(Rotation::new(alpha.clone())?),
        SystemSpec::Nilrotation { xu, yu, zu } => System::Nil(NilRotation::new(*xu, *yu, *zu)?),
        SystemSpec::Expansive { alpha, p, f } => {
            System::Expansive(ExpansiveSystem::new(*alpha, *p, FunctionSpec::from_data(1, f)?)?)
        }
    })
}

fn build_cloud(spec: &CloudSpec, space: Space, ctx: &Context) -> Result<ParticleCloud, CliError> {
    let seed = ctx.seed_for("cloud");
    let cloud = match spec {
        CloudSpec::Haar { size } => sample_haar(space, *size, seed)?,
        CloudSpec::Stratified { per_axis } => stratified_haar(space, *per_axis)?,
        CloudSpec::Curve { size, sampling, fibers } => {
            let fs = fibers
                .iter()
                .map(|d| FunctionSpec::from_data(1, d))
                .collect::<ergodiclab_core::Result<Vec<_>>>()?;
            let sampling = match sampling {
                SamplingMode::Stratified => Sampling::Stratified,
                SamplingMode::Iid => Sampling::Iid { seed },
            };
            let xs = base_samples(*size, sampling)?;
            let mut pts = Vec::with_capacity(xs.len() * (1 + fs.len()));
            for x in xs {
                pts.push(x);
                pts.extend(fs.iter().map(|f| f.eval(&[x])));
            }
            ParticleCloud::uniform(Space::torus(1 + fs.len()), pts)?
        }
        CloudSpec::FiberSection { z0, size } => fiber_section_cloud(*z0, *size, seed)?,
        CloudSpec::Csv { path } => ParticleCloud::load_csv(&ctx.base_dir.join(path))?,
    };
    if cloud.space() != space {
        return Err(ergodiclab_core::Error::SpaceMismatch { expected: space, found: cloud.space() }.into());
    }
    Ok(cloud)
}

/// Extra quantities tracked along a profile.
#[derive(Default)]
struct ProfileExtras {
    base_coords: Option<Vec<usize>>,
    vertical_rotation: Option<f64>,
    unweighted: bool,
    density: Option<DensitySpec>,
    decreasing_at: Vec<usize>,
}

struct ProfileRow {
    n: usize,
    value: f64,
    lipschitz: f64,
    base: Option<f64>,
    defect: Option<f64>,
}

struct Profile {
    rows: Vec<ProfileRow>,
    summary: Summary,
    noise_floor: f64,
    density: Option<DensityReport>,
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

impl Profile {
    fn csv(&self) -> Vec<u8> {
        let mut out = String::from("n,fourier_value,lipschitz_lower");
        let has_base = self.rows.first().is_some_and(|r| r.base.is_some());
        let has_defect = self.rows.first().is_some_and(|r| r.defect.is_some());
        if has_base {
            out.push_str(",base_value");
        }
        if has_defect {
            out.push_str(",vertical_defect");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{}", r.n, fmt_f(r.value), fmt_f(r.lipschitz));
            if let Some(b) = r.base {
                let _ = write!(out, ",{}", fmt_f(b));
            }
            if let Some(d) = r.defect {
                let _ = write!(out, ",{}", fmt_f(d));
            }
            out.push('\n');
        }
        out.into_bytes()
    }

    fn files(&self) -> Result<Vec<(String, Vec<u8>)>, CliError> {
        let mut files = vec![("profile.csv".to_string(), self.csv())];
        if let Some(d) = &self.density {
            files.push(("density.json".to_string(), to_json(d)?));
        }
        Ok(files)
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn run_profile(
    map: &dyn StepMap,
    mu: &ParticleCloud,
    n_max: usize,
    stride: usize,
    extras: &ProfileExtras,
    ctx: &Context,
) -> Result<Profile, CliError> {
    if n_max < 1 {
        return Err(config_err("n_max must be at least 1"));
    }
    let space = mu.space();
    let dim = space.dim();
    let (k, s) = (ctx.metric.cutoff, ctx.metric.s);
    let set = FrequencySet::cube(dim, k)?;
    let base_set = match &extras.base_coords {
        Some(c) => Some(FrequencySet::supported_on(dim, k, c)?),
        None => None,
    };
    let family_seed = ctx.seed_for("lipschitz-family");
    let times = schedule(n_max, stride)?;
    let rows = observe_orbit(map, mu, &times, |n, c| {
        Ok(ProfileRow {
            n,
            value: haar_distance_on(c, &set, s)?,
            lipschitz: lipschitz_lower_bound_haar(c, family_seed, ctx.metric.family_size)?,
            base: base_set.as_ref().map(|b| haar_distance_on(c, b, s)).transpose()?,
            defect: extras.vertical_rotation.map(|t| vertical_rotation_defect_of(c, t, k, s)).transpose()?,
        })
    })?;

    let nu0 = ctx.noise(space, mu.len(), &set, s)?;
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let initial = values[0];
    let last = rows.last().expect("schedule is nonempty");
    let mut sm = Summary::new();
    sm.insert("noise_floor".into(), nu0);
    sm.insert("initial_value".into(), initial);
    sm.insert("final_value".into(), last.value);
    sm.insert("final_over_noise".into(), last.value / nu0);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    sm.insert("min_value".into(), min);
    sm.insert("min_ratio_to_initial".into(), min / initial);
    let max = values.iter().cloned().fold(0.0, f64::max);
    sm.insert("max_value".into(), max);
    sm.insert("max_ratio_to_initial".into(), max / initial);
    sm.insert("cesaro_ratio".into(), values.iter().sum::<f64>() / values.len() as f64 / initial);
    sm.insert("final_lipschitz_lower".into(), last.lipschitz);
    if !extras.decreasing_at.is_empty() {
        let picked = extras
            .decreasing_at
            .iter()
            .map(|n| {
                rows.iter().find(|r| r.n == *n).map(|r| r.value).ok_or_else(|| {
                    config_err(format!("decreasing_at time {n} is not on the schedule"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ok = picked.windows(2).all(|w| w[1] < w[0]);
        for (n, v) in extras.decreasing_at.iter().zip(&picked) {
            sm.insert(format!("value_at_{n}"), *v);
        }
        sm.insert("decreasing_at".into(), if ok { 1.0 } else { 0.0 });
    }
    if let Some(b) = &base_set {
        let base_nu0 = ctx.noise(space, mu.len(), b, s)?;
        let base_max = rows.iter().filter_map(|r| r.base).fold(0.0, f64::max);
        sm.insert("base_noise_floor".into(), base_nu0);
        sm.insert("base_max_value".into(), base_max);
        sm.insert("base_max_over_noise".into(), base_max / base_nu0);
        sm.insert("base_final_over_noise".into(), last.base.unwrap_or(f64::NAN) / base_nu0);
    }
    if let Some(defect) = last.defect {
        sm.insert("final_defect".into(), defect);
        sm.insert("final_defect_over_noise".into(), defect / nu0);
    }
    if extras.unweighted {
        let nu0_unweighted = ctx.noise(space, mu.len(), &set, 0.0)?;
        let initial_u = haar_distance_on(mu, &set, 0.0)?;
        let final_u = haar_distance_on(&pushforward(mu, map, n_max)?, &set, 0.0)?;
        sm.insert("noise_floor_unweighted".into(), nu0_unweighted);
        sm.insert("initial_unweighted".into(), initial_u);
        sm.insert("final_unweighted".into(), final_u);
        sm.insert("final_unweighted_over_noise".into(), final_u / nu0_unweighted);
    }
    let density = match &extras.density {
        Some(d) => {
            let eps = d.epsilon_factor * nu0;
            // the sample at n = 0 is the initial condition, not part of the orbit average
            let later = &values[1..];
            let windows = d.windows.clone().unwrap_or_else(|| window_ladder(later.len()));
            let report = density_statistics(&exceptional_indicator(later, eps), eps, &windows)?;
            sm.insert("epsilon".into(), eps);
            sm.insert("exceptional_density".into(), report.density);
            if let Some(w) = report.uniform_density_by_window.last() {
                sm.insert("uniform_density_largest_window".into(), w.value);
            }
            Some(report)
        }
        None => None,
    };
    Ok(Profile { rows, summary: sm, noise_floor: nu0, density })
}

fn run_profile_experiment(e: &ProfileExperiment, ctx: &Context) -> Result<RunOutput, CliError> {
    let system = build_system(&e.system)?;
    let map = system.map();
    let mu = build_cloud(&e.cloud, map.space(), ctx)?;
    let extras = ProfileExtras {
        base_coords: e.base_coords.clone(),
        vertical_rotation: e.vertical_rotation,
        unweighted: e.unweighted,
        density: e.density.clone(),
        decreasing_at: e.decreasing_at.clone(),
    };
    let profile = run_profile(map, &mu, e.n_max, e.stride, &extras, ctx)?;
    Ok(RunOutput { files: profile.files()?, noise_floor: Some(profile.noise_floor), summary: profile.summary })
}

fn run_heisenberg(e: &HeisenbergExperiment, ctx: &Context) -> Result<RunOutput, CliError> {
    let rot = NilRotation::new(e.rotation.xu, e.rotation.yu, e.rotation.zu)?;
    if !ctx.assume_ergodic {
        rot.require_minimal()?;
    }
    let mu = fiber_section_cloud(e.z0, e.size, ctx.seed_for("cloud"))?;
    let extras = ProfileExtras { unweighted: e.unweighted, ..Default::default() };
    let profile = run_profile(&rot, &mu, e.n_max, e.stride, &extras, ctx)?;
    Ok(RunOutput { files: profile.files()?, noise_floor: Some(profile.noise_floor), summary: profile.summary })
}

fn run_cocycle(e: &CocycleExperiment, ctx: &Context) -> Result<RunOutput, CliError> {
    let base = match build_system(&e.system)? {
        System::Skew(s) => CocycleBase::Skew(s),
        System::Rotation(r) => CocycleBase::Rotation(r),
        _ => return Err(config_err("cocycle bases must be skew systems or rotations")),
    };
    if !ctx.assume_ergodic && !base.is_minimal() {
        return Err(config_err(
            "the cocycle base fails the minimality screen; pass --assume-ergodic to run anyway",
        ));
    }
    let spec = match (&e.generator, base) {
        (GeneratorSpec::Derivative, CocycleBase::Skew(s)) => CocycleSpec::derivative(s),
        (GeneratorSpec::Derivative, _) => return Err(config_err("derivative generators need a skew-system base")),
        (GeneratorSpec::Functions { d, entries }, base) => {
            let fm = FunctionMatrix::from_data(*d, base.dim(), entries)?;
            CocycleSpec::new(base, Generator::Functions(fm), *d)?
        }
    };
    if e.n_list.is_empty() {
        return Err(config_err("n_list must not be empty"));
    }
    let dim = spec.base().dim();
    let mut starts = e.start_points.clone();
    let mut rng = stream(ctx.seed, "starts");
    starts.extend((0..e.starts).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect::<Vec<_>>()));
    if starts.is_empty() {
        return Err(config_err("give at least one starting point (starts or start_points)"));
    }
    let prediction = met_limit_prediction(&spec, 100_000, ctx.seed_for("haar-means"))?;
    let rows: Vec<Vec<ConvergenceRow>> = starts
        .par_iter()
        .map(|x| met_convergence_check(&spec, x, &e.n_list, &prediction))
        .collect::<ergodiclab_core::Result<_>>()?;

    let d = spec.dim();
    let mut csv = String::from("start,n,max_deviation,entry_i,entry_j,deviation_ij\n");
    for (s, per_start) in rows.iter().enumerate() {
        for row in per_start {
            for (i, j, dev) in &row.entries {
                let _ = writeln!(csv, "{},{},{},{},{},{}", s, row.n, fmt_f(row.max_deviation), i + 1, j + 1, fmt_f(*dev));
            }
        }
    }
    let lambda = lambda_table(d);
    let mut entries = Vec::new();
    let mut sm = Summary::new();
    for i in 0..d {
        for j in i + 1..d {
            entries.push(json!({"i": i + 1, "j": j + 1, "value": prediction.get(i, j)}));
            sm.insert(format!("prediction_{}_{}", i + 1, j + 1), prediction.get(i, j));
        }
    }
    for (k, l) in lambda.iter().enumerate() {
        sm.insert(format!("lambda_{k}"), *l);
    }
    let worst: Vec<(f64, f64)> = (0..e.n_list.len())
        .map(|t| (e.n_list[t] as f64, rows.iter().map(|r| r[t].max_deviation).fold(0.0, f64::max)))
        .collect();
    sm.insert("final_max_deviation".into(), worst.last().expect("n_list is nonempty").1);
    if worst.len() >= 2 {
        sm.insert("deviation_slope".into(), log_log_slope(&worst)?);
    }
    sm.insert("starts".into(), starts.len() as f64);
    let prediction_json = json!({
        "d": d,
        "lambda": lambda,
        "entries": entries,
        "starts": starts,
    });
    Ok(RunOutput {
        files: vec![
            ("convergence.csv".to_string(), csv.into_bytes()),
            ("prediction.json".to_string(), to_json(&prediction_json)?),
        ],
        summary: sm,
        noise_floor: None,
    })
}

fn run_expansive_s(e: &ExpansiveSExperiment) -> Result<RunOutput, CliError> {
    let sys = build_expansive(&e.system)?;
    let curve = CurveSpec::new(FunctionSpec::from_data(1, &e.gamma)?)?;
    let report = s_set(&sys, &curve, e.epsilon, e.grid_n, e.n_trunc)?;
    let mut sm = Summary::new();
    sm.insert("certified_in_length".into(), total_length(&report.certified_in));
    sm.insert("certified_out_length".into(), total_length(&report.certified_out));
    sm.insert("undetermined_length".into(), total_length(&report.undetermined));
    sm.insert("kappa".into(), report.kappa);
    sm.insert("beta".into(), report.beta);
    Ok(RunOutput { files: vec![("s_set.json".to_string(), to_json(&report)?)], summary: sm, noise_floor: None })
}

fn run_coboundary(e: &CoboundaryExperiment, ctx: &Context) -> Result<RunOutput, CliError> {
    let gamma = FunctionSpec::from_data(1, &e.gamma)?;
    let mut f = coboundary_skew(e.alpha, e.p, &gamma)?;
    if let Some(extra) = &e.perturbation {
        let extra = FunctionSpec::from_data(1, extra)?;
        f = FunctionSpec::linear_combination(&[(1.0, &f), (1.0, &extra)])?;
    }
    let sys = ExpansiveSystem::new(e.alpha, e.p, f.clone())?;
    let residual = coboundary_residual(&sys, &CurveSpec::new(gamma.clone())?);
    let mu = cloud_on_curve(&gamma, e.size, Sampling::Stratified)?;
    let profile = run_profile(&sys, &mu, e.n_max, 1, &ProfileExtras::default(), ctx)?;
    let mut sm = profile.summary.clone();
    sm.insert("residual".into(), residual);
    let mut files = profile.files()?;
    files.push(("skew.json".to_string(), to_json(&json!({"f": f.to_data(), "residual": residual}))?));
    Ok(RunOutput { files, summary: sm, noise_floor: Some(profile.noise_floor) })
}

#[derive(Serialize)]
struct ArcExtract {
    /// Base interval of the initial curve, before the `n` rotations.
    source: [f64; 2],
    start: f64,
    length: f64,
    extract: CurveExtract,
}

fn arc_extract(cloud: &ParticleCloud, source: [f64; 2], shift: f64) -> Result<ArcExtract, CliError> {
    let start = wrap(source[0] + shift);
    let length = source[1] - source[0];
    Ok(ArcExtract { source, start, length, extract: limit_curve_extract(cloud, start, length)? })
}

fn run_example_5_5(e: &Example55Experiment, ctx: &Context) -> Result<RunOutput, CliError> {
    let sys = build_expansive(&e.system)?;
    let ex = make_example_5_5(&sys, &e.options)?;
    let report = s_set(&sys, &ex.curve, e.epsilon, e.grid_n, e.n_trunc)?;
    let mu = cloud_on_curve(ex.curve.gamma(), e.size, Sampling::Stratified)?;
    let extras = ProfileExtras { base_coords: Some(vec![0]), ..Default::default() };
    let profile = run_profile(&sys, &mu, e.n_max, 1, &extras, ctx)?;

    let mut sm = profile.summary.clone();
    sm.insert("harmonics".into(), ex.harmonics as f64);
    sm.insert("flat_sup".into(), ex.flat_sup);
    sm.insert("active_inf".into(), ex.active_inf);
    sm.insert("certified_in_length".into(), total_length(&report.certified_in));
    sm.insert("certified_out_length".into(), total_length(&report.certified_out));
    sm.insert("kappa".into(), report.kappa);
    sm.insert("beta".into(), report.beta);

    let mut files = profile.files()?;
    files.push((
        "curve.json".to_string(),
        to_json(&json!({
            "gamma": ex.curve.gamma().to_data(),
            "harmonics": ex.harmonics,
            "flat_sup": ex.flat_sup,
            "active_inf": ex.active_inf,
        }))?,
    ));
    files.push(("s_set.json".to_string(), to_json(&report)?));

    if let Some(x) = &e.extract {
        let [a, b] = x.s_interval;
        if !report.certified_in.iter().any(|[lo, hi]| *lo <= a && b <= *hi && a < b) {
            return Err(ergodiclab_core::Error::Precondition(format!(
                "s_interval [{a}, {b}] is not inside a certified part of S"
            ))
            .into());
        }
        let out = longest(&report.certified_out)
            .ok_or_else(|| ergodiclab_core::Error::Precondition("no certified complement of S".into()))?;
        let pushed = pushforward(&mu, &sys, x.n)?;
        let shift = x.n as f64 * sys.alpha();
        let complement = arc_extract(&pushed, out, shift)?;
        let inside = arc_extract(&pushed, [a, b], shift)?;
        let k = kappa(&sys);
        sm.insert("complement_spread".into(), complement.extract.max_vertical_spread);
        sm.insert("complement_lipschitz".into(), complement.extract.lipschitz_estimate);
        sm.insert("complement_lipschitz_over_kappa".into(), complement.extract.lipschitz_estimate / k);
        sm.insert("s_min_spread".into(), inside.extract.min_vertical_spread());
        sm.insert("s_min_spread_fraction".into(), inside.extract.min_vertical_spread() / uniform_circle_spread());
        sm.insert("slope_gap_excess_max".into(), slope_gap_excess(&sys, &ex.curve, x, e.n_trunc, ctx)?);
        files.push(("extract.json".to_string(), to_json(&json!({"n": x.n, "complement": complement, "s_part": inside}))?));
    }
    Ok(RunOutput { files, summary: sm, noise_floor: Some(profile.noise_floor) })
}

/// `max (|Delta_n(x) - p^(n-1) tau(x)| - kappa)` over random `x` and `1 <= n <= slope_n_max`.
fn slope_gap_excess(
    sys: &ExpansiveSystem,
    curve: &CurveSpec,
    x: &ExtractSpec,
    n_trunc: usize,
    ctx: &Context,
) -> Result<f64, CliError> {
    let k = kappa(sys);
    let p = sys.p() as f64;
    let mut rng = stream(ctx.seed, "slope-points");
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..x.slope_points {
        let at: f64 = rng.gen();
        let t = tau(sys, curve, at, n_trunc)?.value;
        for n in 1..=x.slope_n_max {
            let gap = (delta_n(sys, curve, at, n)? - p.powi(n as i32 - 1) * t).abs();
            worst = worst.max(gap - k);
        }
    }
    Ok(worst)
}
