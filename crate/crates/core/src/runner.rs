//! Experiment orchestration: one config describes dataset, algorithm, and
//! budget; running it wires loading -> normalization -> split -> optimizer
//! -> prediction -> metrics for every seed and collects a report.
//!
//! Configs live in a flat `key = value` text file; command-line flags
//! override file values. Serializing a config and reparsing it yields an
//! equal config, and rerunning an identical config writes byte-identical
//! CSV/JSON outputs (wall clock appears only in the human-readable summary).

use crate::datapipe::{
    apply_normalization, fit_normalization, holdout_split, load_csv, normalize, Dataset,
    LabelColumn,
};
use crate::error::{Error, Result};
use crate::evaluate::{class_metrics, confusion_matrix, metrics_map, ClassMetrics, ConfusionMatrix};
use crate::gravsearch::{run_gsa, run_psogsa, GsaConfig, PsoGsaConfig};
use crate::network::{decode, predict, Topology};
use crate::swarm::{run_pso, ConvergenceTrace, InertiaSchedule, SwarmConfig};
use serde_json::json;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Ppso,
    Bpso,
    Sgpso,
    Gsa,
    Psogsa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ppso,
        Algorithm::Bpso,
        Algorithm::Sgpso,
        Algorithm::Gsa,
        Algorithm::Psogsa,
    ];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Algorithm::Ppso => "PPSO",
            Algorithm::Bpso => "BPSO",
            Algorithm::Sgpso => "SGPSO",
            Algorithm::Gsa => "GSA",
            Algorithm::Psogsa => "PSOGSA",
        };
        f.write_str(name)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PPSO" => Ok(Algorithm::Ppso),
            "BPSO" => Ok(Algorithm::Bpso),
            "SGPSO" => Ok(Algorithm::Sgpso),
            "GSA" => Ok(Algorithm::Gsa),
            "PSOGSA" => Ok(Algorithm::Psogsa),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?} (expected PPSO, BPSO, SGPSO, GSA, or PSOGSA)"
            ))),
        }
    }
}

/// Full experiment description. Optional fields fall back to each
/// algorithm's published defaults, so a config stays portable across
/// algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub label_column: LabelColumn,
    pub algorithm: Algorithm,
    pub pop: usize,
    pub iters: usize,
    /// Hidden-layer size; defaults to 2p+1 for p features.
    pub hidden: Option<usize>,
    pub split: f64,
    pub stratified: bool,
    /// Fit normalization statistics on the train split only instead of the
    /// whole dataset before splitting.
    pub normalize_train_only: bool,
    pub seeds: Vec<u64>,
    pub lb: f64,
    pub ub: f64,
    pub v_max: f64,
    pub out: Option<PathBuf>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub geometric_center: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub g0: Option<f64>,
    pub alpha: Option<f64>,
    pub kbest_floor: Option<f64>,
    pub sobol_velocities: Option<bool>,
    pub scalar_draws: Option<bool>,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<PathBuf>, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            label_column: LabelColumn::Last,
            algorithm,
            pop: 50,
            iters: 500,
            hidden: None,
            split: 0.8,
            stratified: true,
            normalize_train_only: false,
            seeds: (0..10).collect(),
            lb: -10.0,
            ub: 10.0,
            v_max: 4.0,
            out: None,
            c1: None,
            c2: None,
            c3: None,
            geometric_center: None,
            omega_min: None,
            omega_max: None,
            g0: None,
            alpha: None,
            kbest_floor: None,
            sobol_velocities: None,
            scalar_draws: None,
        }
    }

    /// Apply one `key = value` assignment; shared by the file parser and by
    /// anything layering overrides on top.
    pub fn apply_key_value(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| {
            Error::InvalidConfig(format!("cannot parse {value:?} as {what} for key {key:?}"))
        };
        match key {
            "dataset" => self.dataset = PathBuf::from(value),
            "label_column" => {
                self.label_column = if value.eq_ignore_ascii_case("last") {
                    LabelColumn::Last
                } else {
                    LabelColumn::Index(value.parse().map_err(|_| bad("a column index"))?)
                }
            }
            "algorithm" => self.algorithm = value.parse()?,
            "pop" => self.pop = value.parse().map_err(|_| bad("an integer"))?,
            "iters" => self.iters = value.parse().map_err(|_| bad("an integer"))?,
            "hidden" => self.hidden = Some(value.parse().map_err(|_| bad("an integer"))?),
            "split" => self.split = value.parse().map_err(|_| bad("a number"))?,
            "stratified" => self.stratified = value.parse().map_err(|_| bad("a boolean"))?,
            "normalize_train_only" => {
                self.normalize_train_only = value.parse().map_err(|_| bad("a boolean"))?
            }
            "seeds" => {
                let seeds: std::result::Result<Vec<u64>, _> = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect();
                self.seeds = seeds.map_err(|_| bad("a comma-separated seed list"))?;
                if self.seeds.is_empty() {
                    return Err(Error::InvalidConfig("seed list is empty".into()));
                }
            }
            "lb" => self.lb = value.parse().map_err(|_| bad("a number"))?,
            "ub" => self.ub = value.parse().map_err(|_| bad("a number"))?,
            "v_max" => self.v_max = value.parse().map_err(|_| bad("a number"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "c1" => self.c1 = Some(value.parse().map_err(|_| bad("a number"))?),
            "c2" => self.c2 = Some(value.parse().map_err(|_| bad("a number"))?),
            "c3" => self.c3 = Some(value.parse().map_err(|_| bad("a number"))?),
            "geometric_center" => {
                self.geometric_center = Some(value.parse().map_err(|_| bad("a number"))?)
            }
            "omega_min" => self.omega_min = Some(value.parse().map_err(|_| bad("a number"))?),
            "omega_max" => self.omega_max = Some(value.parse().map_err(|_| bad("a number"))?),
            "g0" => self.g0 = Some(value.parse().map_err(|_| bad("a number"))?),
            "alpha" => self.alpha = Some(value.parse().map_err(|_| bad("a number"))?),
            "kbest_floor" => {
                self.kbest_floor = Some(value.parse().map_err(|_| bad("a number"))?)
            }
            "sobol_velocities" => {
                self.sobol_velocities = Some(value.parse().map_err(|_| bad("a boolean"))?)
            }
            "scalar_draws" => {
                self.scalar_draws = Some(value.parse().map_err(|_| bad("a boolean"))?)
            }
            other => {
                return Err(Error::InvalidConfig(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// Parse the flat `key = value` format: one assignment per line, `#`
    /// starts a comment, blank lines ignored, later keys win. `dataset` and
    /// `algorithm` are required.
    pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new("", Algorithm::Ppso);
        let (mut saw_dataset, mut saw_algorithm) = (false, false);
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("expected `key = value`, got {line:?}"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            cfg.apply_key_value(key, value)?;
            saw_dataset |= key == "dataset";
            saw_algorithm |= key == "algorithm";
        }
        if !saw_dataset {
            return Err(Error::InvalidConfig("config is missing `dataset`".into()));
        }
        if !saw_algorithm {
            return Err(Error::InvalidConfig("config is missing `algorithm`".into()));
        }
        Ok(cfg)
    }

    pub fn load_config_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ExperimentConfig::parse_config_str(&text)
    }

    /// Render in the same flat format `parse_config_str` reads; the round
    /// trip reproduces the config exactly.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("dataset", self.dataset.to_string_lossy().into_owned());
        match self.label_column {
            LabelColumn::Last => kv("label_column", "last".into()),
            LabelColumn::Index(i) => kv("label_column", i.to_string()),
        }
        kv("algorithm", self.algorithm.to_string());
        kv("pop", self.pop.to_string());
        kv("iters", self.iters.to_string());
        if let Some(h) = self.hidden {
            kv("hidden", h.to_string());
        }
        kv("split", self.split.to_string());
        kv("stratified", self.stratified.to_string());
        kv("normalize_train_only", self.normalize_train_only.to_string());
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        kv("seeds", seeds.join(","));
        kv("lb", self.lb.to_string());
        kv("ub", self.ub.to_string());
        kv("v_max", self.v_max.to_string());
        if let Some(p) = &self.out {
            kv("out", p.to_string_lossy().into_owned());
        }
        let floats = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("geometric_center", self.geometric_center),
            ("omega_min", self.omega_min),
            ("omega_max", self.omega_max),
            ("g0", self.g0),
            ("alpha", self.alpha),
            ("kbest_floor", self.kbest_floor),
        ];
        for (k, v) in floats {
            if let Some(v) = v {
                kv(k, v.to_string());
            }
        }
        for (k, v) in [
            ("sobol_velocities", self.sobol_velocities),
            ("scalar_draws", self.scalar_draws),
        ] {
            if let Some(v) = v {
                kv(k, v.to_string());
            }
        }
        out
    }

    fn schedule_with_overrides(&self, base: InertiaSchedule) -> InertiaSchedule {
        match base {
            InertiaSchedule::TanhIncreasing {
                omega_min,
                omega_max,
            } => InertiaSchedule::TanhIncreasing {
                omega_min: self.omega_min.unwrap_or(omega_min),
                omega_max: self.omega_max.unwrap_or(omega_max),
            },
            InertiaSchedule::LinearDecreasing {
                omega_min,
                omega_max,
            } => InertiaSchedule::LinearDecreasing {
                omega_min: self.omega_min.unwrap_or(omega_min),
                omega_max: self.omega_max.unwrap_or(omega_max),
            },
            InertiaSchedule::Constant { omega } => InertiaSchedule::Constant {
                omega: self.omega_max.unwrap_or(omega),
            },
        }
    }

    /// Particle-swarm settings for one seed, defaults per variant with this
    /// config's overrides applied.
    pub fn swarm_config(&self, seed: u64) -> Result<SwarmConfig> {
        let mut cfg = match self.algorithm {
            Algorithm::Ppso => SwarmConfig::ppso_defaults(seed),
            Algorithm::Bpso => SwarmConfig::bpso_defaults(seed),
            Algorithm::Sgpso => SwarmConfig::sgpso_defaults(seed),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "{other} is not a particle-swarm variant"
                )));
            }
        };
        cfg.pop = self.pop;
        cfg.iters = self.iters;
        cfg.lb = self.lb;
        cfg.ub = self.ub;
        cfg.v_max = self.v_max;
        if let Some(v) = self.c1 {
            cfg.c1 = v;
        }
        if let Some(v) = self.c2 {
            cfg.c2 = v;
        }
        if let Some(v) = self.c3 {
            cfg.c3 = v;
        }
        if let Some(v) = self.geometric_center {
            cfg.geometric_center = v;
        }
        cfg.schedule = self.schedule_with_overrides(cfg.schedule);
        if let Some(v) = self.sobol_velocities {
            cfg.sobol_velocities = v;
        }
        if let Some(v) = self.scalar_draws {
            cfg.scalar_draws = v;
        }
        Ok(cfg)
    }

    pub fn gsa_config(&self, seed: u64) -> Result<GsaConfig> {
        let mut cfg = GsaConfig::defaults(seed);
        cfg.pop = self.pop;
        cfg.iters = self.iters;
        cfg.lb = self.lb;
        cfg.ub = self.ub;
        if let Some(v) = self.g0 {
            cfg.g0 = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.kbest_floor {
            cfg.kbest_floor = v;
        }
        Ok(cfg)
    }

    pub fn psogsa_config(&self, seed: u64) -> Result<PsoGsaConfig> {
        let mut cfg = PsoGsaConfig::defaults(seed);
        cfg.gsa = self.gsa_config(seed)?;
        if let Some(v) = self.c1 {
            cfg.c1 = v;
        }
        if let Some(v) = self.c2 {
            cfg.c2 = v;
        }
        cfg.schedule = self.schedule_with_overrides(cfg.schedule);
        Ok(cfg)
    }
}

/// Everything produced by one seed of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub params: Vec<f64>,
    pub train_mse: f64,
    pub test_accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub metrics: ClassMetrics,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub dataset_name: String,
    pub class_names: Vec<String>,
    pub topology: Topology,
    pub samples: usize,
    pub train_samples: usize,
    pub test_samples: usize,
    pub outcomes: Vec<SeedOutcome>,
    /// Index into `outcomes` of the best test accuracy (earliest seed wins
    /// ties), the headline number under the best-run reporting convention.
    pub best_index: usize,
    pub wall_clock: Duration,
    /// Per-seed training durations, parallel to `outcomes`.
    pub seed_wall_clocks: Vec<Duration>,
}

impl RunReport {
    pub fn best(&self) -> &SeedOutcome {
        &self.outcomes[self.best_index]
    }

    /// Flat key-value metrics document: the best seed's full metrics plus
    /// per-seed accuracy and train error. Deterministic for fixed config.
    pub fn metrics_json(&self) -> String {
        let best = self.best();
        let mut map = metrics_map(&best.confusion, &best.metrics);
        map.insert("algorithm".into(), json!(self.config.algorithm.to_string()));
        map.insert("dataset".into(), json!(self.dataset_name));
        map.insert("best_seed".into(), json!(best.seed));
        map.insert("best_train_mse".into(), json!(best.train_mse));
        for o in &self.outcomes {
            map.insert(format!("seed{}_test_accuracy", o.seed), json!(o.test_accuracy));
            map.insert(format!("seed{}_train_mse", o.seed), json!(o.train_mse));
        }
        let mut text = serde_json::to_string_pretty(&map).expect("plain scalars");
        text.push('\n');
        text
    }

    /// Human-readable run summary; the only emitted file that contains wall
    /// clock.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let t = self.topology;
        writeln!(out, "run summary").unwrap();
        writeln!(out, "===========").unwrap();
        writeln!(out).unwrap();
        writeln!(
            out,
            "dataset: {} ({} samples, {} features, {} classes)",
            self.dataset_name,
            self.samples,
            t.inputs,
            self.class_names.len()
        )
        .unwrap();
        writeln!(
            out,
            "split: {} train / {} test (fraction {}, stratified {})",
            self.train_samples, self.test_samples, self.config.split, self.config.stratified
        )
        .unwrap();
        writeln!(
            out,
            "topology: {}-{}-{} ({} parameters)",
            t.inputs,
            t.hidden,
            t.outputs,
            t.param_count()
        )
        .unwrap();
        writeln!(out).unwrap();
        writeln!(out, "seed  train_mse     test_accuracy").unwrap();
        for o in &self.outcomes {
            writeln!(
                out,
                "{:<5} {:<13.6e} {:.4}",
                o.seed, o.train_mse, o.test_accuracy
            )
            .unwrap();
        }
        let best = self.best();
        writeln!(out).unwrap();
        writeln!(
            out,
            "best seed: {} (test accuracy {:.4}, headline F {:.4})",
            best.seed,
            best.test_accuracy,
            best.metrics.headline_f()
        )
        .unwrap();
        let slowest = self
            .seed_wall_clocks
            .iter()
            .copied()
            .max()
            .unwrap_or_default();
        writeln!(
            out,
            "wall clock: {:.3}s total, {:.3}s slowest seed",
            self.wall_clock.as_secs_f64(),
            slowest.as_secs_f64()
        )
        .unwrap();
        writeln!(out).unwrap();
        writeln!(out, "config:").unwrap();
        for line in self.config.to_config_string().lines() {
            writeln!(out, "  {line}").unwrap();
        }
        out
    }
}

/// Run the configured experiment over all its seeds.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    if config.seeds.is_empty() {
        return Err(Error::InvalidConfig("seed list is empty".into()));
    }
    let started = Instant::now();
    let raw = load_csv(&config.dataset, config.label_column)?;
    let data = if config.normalize_train_only {
        raw
    } else {
        normalize(&raw)
    };
    let p = data.n_features();
    let k = data.n_classes();
    let topology = Topology::new(p, config.hidden.unwrap_or(2 * p + 1), k)?;

    let mut outcomes = Vec::with_capacity(config.seeds.len());
    let mut seed_wall_clocks = Vec::with_capacity(config.seeds.len());
    let (mut train_samples, mut test_samples) = (0, 0);
    for &seed in &config.seeds {
        let seed_started = Instant::now();
        let split = holdout_split(&data, config.split, seed, config.stratified)?;
        let (train_ds, test_ds): (Dataset, Dataset) = if config.normalize_train_only {
            let stats = fit_normalization(&split.train);
            (
                apply_normalization(&split.train, &stats),
                apply_normalization(&split.test, &stats),
            )
        } else {
            (split.train, split.test)
        };
        train_samples = train_ds.n_samples();
        test_samples = test_ds.n_samples();
        let train = train_ds.to_samples()?;
        let (params, train_mse, trace) = match config.algorithm {
            Algorithm::Ppso | Algorithm::Bpso | Algorithm::Sgpso => {
                run_pso(&config.swarm_config(seed)?, topology, &train)?
            }
            Algorithm::Gsa => run_gsa(&config.gsa_config(seed)?, topology, &train)?,
            Algorithm::Psogsa => run_psogsa(&config.psogsa_config(seed)?, topology, &train)?,
        };
        let net = decode(&params, topology)?;
        let predicted: Vec<usize> = test_ds
            .features
            .iter()
            .map(|row| predict(&net, row))
            .collect::<Result<_>>()?;
        let cm = confusion_matrix(&test_ds.labels, &predicted, k)?;
        let metrics = class_metrics(&cm)?;
        outcomes.push(SeedOutcome {
            seed,
            params,
            train_mse,
            test_accuracy: cm.accuracy(),
            confusion: cm,
            metrics,
            trace,
        });
        seed_wall_clocks.push(seed_started.elapsed());
    }

    let mut best_index = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.test_accuracy > outcomes[best_index].test_accuracy {
            best_index = i;
        }
    }
    Ok(RunReport {
        config: config.clone(),
        dataset_name: data.name.clone(),
        class_names: data.class_names.clone(),
        topology,
        samples: data.n_samples(),
        train_samples,
        test_samples,
        outcomes,
        best_index,
        wall_clock: started.elapsed(),
        seed_wall_clocks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub algorithm: Algorithm,
    pub best_accuracy: f64,
    pub best_f: f64,
    /// Marks every row tied for the best accuracy.
    pub is_best: bool,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub dataset: String,
    pub rows: Vec<ComparisonRow>,
    pub reports: Vec<RunReport>,
}

impl Comparison {
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "dataset: {}", self.dataset).unwrap();
        writeln!(out, "algorithm  best_accuracy  best_f   ").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<10} {:<14.4} {:<8.4} {}",
                r.algorithm.to_string(),
                r.best_accuracy,
                r.best_f,
                if r.is_best { "*" } else { "" }
            )
            .unwrap();
        }
        out
    }
}

/// Run several algorithm configs against one dataset and rank their
/// best-of-seeds accuracy. All configs must name the same dataset and seed
/// list so the comparison is apples to apples.
pub fn compare_algorithms(configs: &[ExperimentConfig]) -> Result<Comparison> {
    if configs.is_empty() {
        return Err(Error::EmptyInput("comparison configs"));
    }
    for c in &configs[1..] {
        if c.dataset != configs[0].dataset {
            return Err(Error::InvalidConfig(
                "comparison requires a single shared dataset".into(),
            ));
        }
        if c.seeds != configs[0].seeds {
            return Err(Error::InvalidConfig(
                "comparison requires identical seed lists".into(),
            ));
        }
    }
    let reports: Vec<RunReport> = configs.iter().map(run_experiment).collect::<Result<_>>()?;
    let best_acc = reports
        .iter()
        .map(|r| r.best().test_accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let rows = reports
        .iter()
        .map(|r| ComparisonRow {
            algorithm: r.config.algorithm,
            best_accuracy: r.best().test_accuracy,
            best_f: r.best().metrics.headline_f(),
            is_best: r.best().test_accuracy == best_acc,
        })
        .collect();
    Ok(Comparison {
        dataset: reports[0].dataset_name.clone(),
        rows,
        reports,
    })
}

/// Write the report's files into `out_dir`: one convergence CSV per seed,
/// the best seed's confusion matrix, the metrics JSON, and the summary.
/// Existing target files abort the write unless `force` is set.
pub fn emit_outputs(report: &RunReport, out_dir: &Path, force: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    for o in &report.outcomes {
        files.push((
            out_dir.join(format!("convergence_seed{}.csv", o.seed)),
            o.trace.to_csv_string(),
        ));
    }
    files.push((
        out_dir.join("confusion_best.csv"),
        report.best().confusion.to_csv_string(),
    ));
    files.push((out_dir.join("metrics.json"), report.metrics_json()));
    files.push((out_dir.join("summary.txt"), report.summary_text()));

    if !force {
        for (path, _) in &files {
            if path.exists() {
                return Err(Error::InvalidConfig(format!(
                    "{} already exists; pass --force to overwrite",
                    path.display()
                )));
            }
        }
    }
    let mut written = Vec::with_capacity(files.len());
    for (path, content) in files {
        std::fs::write(&path, content).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
