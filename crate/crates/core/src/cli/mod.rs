//! The `cyclorat` command: dataset ingestion, subcommands and JSON reports.
//!
//! Exit codes: 0 when the analysis passes, 3 when it ran and the hypothesis
//! was rejected, 2 on usage, input or IO errors.

pub mod csvio;
pub mod json;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choice::{Dataset, Menu, SimplexPoint, ValueVector, DEFAULT_SIMPLEX_TOL};
use crate::monotonicity::{
    self, BinaryChoices, CmVerdict, CycleWitness, WstViolation, DEFAULT_CM_TOL,
};
use crate::preference::{self, PreferenceModel};
use crate::rationalization::{
    compute_potentials_with_tol, CostDescription, CostEvaluator, PotentialFit,
    RationalizationError, VerificationReport, VerifyOptions,
};
pub use csvio::{parse_dataset_csv, CsvError, ParsedMenu};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;
pub const LOG_ENV: &str = "CYCLORAT_LOG";

const EXACT_NOTE: &str =
    "choice probabilities are treated as exact; no sampling-noise model is applied";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Write a dataset simulated from a preference model.
    Simulate,
    /// Test cyclic monotonicity.
    Check,
    /// Fit potentials and the rationalizing cost.
    Fit,
    /// Verify a fit against the data.
    Verify,
    /// Check, fit and verify.
    ReportAll,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "cyclorat",
    version,
    about = "Cyclic monotonicity tests and perturbed-utility rationalization of stochastic choice data"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Dataset CSV (`menu_id,obs_id,alternative,value,prob`). For
    /// `simulate`, an optional design with the `prob` column omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report (JSON) or, for `simulate`, dataset CSV. Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_TOL)]
    pub tol_simplex: f64,
    #[arg(long, default_value_t = DEFAULT_CM_TOL)]
    pub tol_cm: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_opt: f64,
    /// Entropic smoothing weight for the reported cost.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Preference model as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report from an earlier `fit` to verify instead of refitting.
    #[arg(long)]
    pub fit: Option<PathBuf>,
    /// Tidy CSV of per-menu series (cycle sums, gaps, potentials).
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Random mixtures tested per menu by `verify`.
    #[arg(long, default_value_t = 1000)]
    pub mixtures: usize,
    /// Observations in a random `simulate` design.
    #[arg(long, default_value_t = 20)]
    pub observations: usize,
    /// Alternatives in a random `simulate` design.
    #[arg(long, default_value_t = 3)]
    pub alternatives: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            output: None,
            tol_simplex: DEFAULT_SIMPLEX_TOL,
            tol_cm: DEFAULT_CM_TOL,
            tol_opt: 1e-8,
            epsilon: None,
            model: None,
            seed: 0,
            fit: None,
            series: None,
            mixtures: 1000,
            observations: 20,
            alternatives: 3,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(CliError::Usage(format!(
                    "{name} must be positive and finite, got {x}"
                )))
            }
        };
        positive("--tol-simplex", self.tol_simplex)?;
        positive("--tol-cm", self.tol_cm)?;
        positive("--tol-opt", self.tol_opt)?;
        if let Some(eps) = self.epsilon {
            positive("--epsilon", eps)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("model: {0}")]
    Model(String),
    #[error("fit file: {0}")]
    Fit(String),
    #[error("menu `{menu}`: {source}")]
    Analysis {
        menu: String,
        source: RationalizationError,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

/// A cycle with 1-based observation positions and the observations' ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub cycle: Vec<usize>,
    pub obs_ids: Vec<String>,
    pub cycle_sum: f64,
    pub mean: f64,
}

impl WitnessReport {
    fn new(d: &Dataset, w: &CycleWitness) -> Self {
        Self {
            cycle: w.nodes.iter().map(|i| i + 1).collect(),
            obs_ids: w
                .nodes
                .iter()
                .map(|&i| d.observations()[i].id.clone())
                .collect(),
            cycle_sum: w.cycle_sum,
            mean: w.mean(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmReport {
    pub pass: bool,
    pub tolerance: f64,
    pub witness: Option<WitnessReport>,
    pub min_cycle_mean: Option<f64>,
    pub min_mean_cycle: Option<WitnessReport>,
    /// Every simple cycle sums to at least this.
    pub cycle_sum_lower_bound: f64,
}

impl CmReport {
    fn new(d: &Dataset, v: &CmVerdict, tol: f64) -> Self {
        Self {
            pass: v.is_pass(),
            tolerance: tol,
            witness: v.witness().map(|w| WitnessReport::new(d, w)),
            min_cycle_mean: v.min_cycle_mean,
            min_mean_cycle: v.min_mean_cycle.as_ref().map(|w| WitnessReport::new(d, w)),
            cycle_sum_lower_bound: v.cycle_sum_lower_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointReport {
    pub first: usize,
    pub second: usize,
    pub first_obs_id: String,
    pub second_obs_id: String,
    pub alternative: String,
    pub product: f64,
}

/// Potentials as reported and as read back by `verify --fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// 1-based observation whose potential is zero.
    pub base_observation: usize,
    pub obs_ids: Vec<String>,
    pub potentials: Vec<f64>,
    pub gradients: Vec<Vec<f64>>,
}

impl FitReport {
    fn new(d: &Dataset, fit: &PotentialFit) -> Self {
        Self {
            base_observation: fit.base_index + 1,
            obs_ids: d.observations().iter().map(|o| o.id.clone()).collect(),
            potentials: fit.potentials.clone(),
            gradients: fit
                .gradients
                .iter()
                .map(|g| g.as_slice().to_vec())
                .collect(),
        }
    }

    fn to_fit(&self, d: &Dataset, tol: f64) -> Result<PotentialFit, CliError> {
        if self.base_observation == 0 {
            return Err(CliError::Fit("base_observation is 1-based".into()));
        }
        let gradients = self
            .gradients
            .iter()
            .map(|g| crate::choice::validate_simplex(g, tol))
            .collect::<Result<Vec<SimplexPoint>, _>>()
            .map_err(|e| CliError::Fit(e.to_string()))?;
        let fit = PotentialFit {
            base_index: self.base_observation - 1,
            potentials: self.potentials.clone(),
            gradients,
        };
        fit.check_matches(d)
            .map_err(|e| CliError::Fit(e.to_string()))?;
        Ok(fit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MenuReport {
    pub menu_id: String,
    pub alternatives: Vec<String>,
    pub observations: usize,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclic_monotonicity: Option<CmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_point_violations: Option<Vec<TwoPointReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostDescription>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WstReport {
    /// Menus with two alternatives and a single observation.
    pub binary_menus: usize,
    pub violations: Vec<WstViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub notes: Vec<&'static str>,
    pub passed: bool,
    pub menus: Vec<MenuReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_stochastic_transitivity: Option<WstReport>,
    /// Excluded from determinism guarantees.
    pub timing: Timing,
}

/// Exit code plus the report, if the command produces one.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<Report>,
}

/// Install the logger; verbosity comes from `CYCLORAT_LOG`.
pub fn init_logging() {
    let _ =
        env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).try_init();
}

/// Run a command, writing its outputs. Errors are printed to stderr and
/// mapped to exit code 2.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(outcome) => outcome.exit_code,
        Err(e) => {
            eprintln!("cyclorat: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let start = Instant::now();
    if config.command == Command::Simulate {
        simulate(config)?;
        return Ok(Outcome {
            exit_code: EXIT_PASS,
            report: None,
        });
    }
    let input = config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let menus = parse_dataset_csv(input, config.tol_simplex)?;
    log::info!("read {} menu(s) from {}", menus.len(), input.display());
    let fits = match &config.fit {
        Some(path) if config.command == Command::Verify => Some(read_fits(path)?),
        _ => None,
    };

    let reports = menus
        .par_iter()
        .map(|m| analyze_menu(config, m, fits.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;

    let wst = match config.command {
        Command::Check | Command::ReportAll => Some(wst_report(&menus, config.tol_simplex)?),
        _ => None,
    };
    let passed = reports.iter().all(|r| r.passed);
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        },
        config: config.clone(),
        notes: vec![EXACT_NOTE],
        passed,
        menus: reports,
        weak_stochastic_transitivity: wst,
        timing: Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    };

    write_output(
        config.output.as_deref(),
        json::to_string(&report)?.as_bytes(),
    )?;
    if let Some(path) = &config.series {
        let mut buf = Vec::new();
        write_series(&mut buf, &menus, &report)?;
        write_output(Some(path), &buf)?;
    }
    Ok(Outcome {
        exit_code: if passed { EXIT_PASS } else { EXIT_REJECTED },
        report: Some(report),
    })
}

fn analyze_menu(
    config: &RunConfig,
    parsed: &ParsedMenu,
    fits: Option<&BTreeMap<String, FitReport>>,
) -> Result<MenuReport, CliError> {
    let d = &parsed.dataset;
    let menu_id = d.menu().id().to_string();
    let fail = |source: RationalizationError| CliError::Analysis {
        menu: menu_id.clone(),
        source,
    };
    let mut report = MenuReport {
        menu_id: menu_id.clone(),
        alternatives: d.menu().alternatives().to_vec(),
        observations: d.len(),
        warnings: parsed.warnings.iter().map(|w| w.to_string()).collect(),
        cyclic_monotonicity: None,
        two_point_violations: None,
        fit: None,
        cost: None,
        verification: None,
        passed: true,
    };

    let verdict =
        monotonicity::check_cyclic_monotonicity(d, config.tol_cm).map_err(|e| fail(e.into()))?;
    log::debug!(
        "menu {menu_id}: cyclic monotonicity pass = {}",
        verdict.is_pass()
    );
    let cm_pass = verdict.is_pass();
    if matches!(config.command, Command::Check | Command::ReportAll) {
        let two_point = monotonicity::check_two_point_monotonicity(d, config.tol_cm)
            .map_err(|e| fail(e.into()))?;
        report.two_point_violations = Some(
            two_point
                .iter()
                .map(|t| TwoPointReport {
                    first: t.first + 1,
                    second: t.second + 1,
                    first_obs_id: d.observations()[t.first].id.clone(),
                    second_obs_id: d.observations()[t.second].id.clone(),
                    alternative: d.menu().alternatives()[t.alternative].clone(),
                    product: t.product,
                })
                .collect(),
        );
    }
    report.cyclic_monotonicity = Some(CmReport::new(d, &verdict, config.tol_cm));
    report.passed = cm_pass;
    if config.command == Command::Check {
        return Ok(report);
    }

    let fit = match fits {
        Some(fits) => {
            let entry = fits
                .get(&menu_id)
                .ok_or_else(|| CliError::Fit(format!("no fit for menu `{menu_id}`")))?;
            Some(entry.to_fit(d, config.tol_simplex)?)
        }
        None if cm_pass => Some(compute_potentials_with_tol(d, config.tol_cm).map_err(fail)?),
        None => None,
    };
    let Some(fit) = fit else {
        report.passed = false;
        return Ok(report);
    };
    report.fit = Some(FitReport::new(d, &fit));
    if matches!(config.command, Command::Fit | Command::ReportAll) {
        let cost = match config.epsilon {
            Some(eps) => CostEvaluator::smoothed(&fit, d, eps),
            None => CostEvaluator::data_derived(&fit, d),
        }
        .map_err(fail)?;
        report.cost = Some(cost.describe());
    }
    if config.command == Command::Fit {
        return Ok(report);
    }

    let options = VerifyOptions {
        tol: config.tol_opt,
        mixtures: config.mixtures,
        seed: config.seed,
    };
    let verification =
        crate::rationalization::verify_rationalization(d, &fit, &options).map_err(fail)?;
    report.passed = match config.command {
        Command::Verify => verification.max_fenchel_gap <= config.tol_opt,
        _ => cm_pass && verification.passed,
    };
    report.verification = Some(verification);
    Ok(report)
}

fn wst_report(menus: &[ParsedMenu], tol: f64) -> Result<WstReport, CliError> {
    let mut binary = BinaryChoices::new();
    let mut count = 0;
    for m in menus {
        let d = &m.dataset;
        if d.menu().len() != 2 || d.len() != 1 {
            continue;
        }
        let alts = d.menu().alternatives();
        let key = (alts[0].clone(), alts[1].clone());
        let reverse = (alts[1].clone(), alts[0].clone());
        if binary.contains_key(&key) || binary.contains_key(&reverse) {
            log::warn!(
                "menu {}: pair already seen, skipped for transitivity",
                d.menu().id()
            );
            continue;
        }
        binary.insert(key, d.probs(0)[0]);
        count += 1;
    }
    let violations =
        monotonicity::check_weak_stochastic_transitivity(&binary, tol).map_err(|e| {
            CliError::Analysis {
                menu: "binary menus".into(),
                source: e.into(),
            }
        })?;
    Ok(WstReport {
        binary_menus: count,
        violations,
    })
}

fn read_fits(path: &Path) -> Result<BTreeMap<String, FitReport>, CliError> {
    #[derive(Deserialize)]
    struct FitMenu {
        menu_id: String,
        fit: Option<FitReport>,
    }
    #[derive(Deserialize)]
    struct FitFile {
        menus: Vec<FitMenu>,
    }
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: FitFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Fit(format!("{}: {e}", path.display())))?;
    Ok(file
        .menus
        .into_iter()
        .filter_map(|m| m.fit.map(|f| (m.menu_id, f)))
        .collect())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    };
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(io_err),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(io_err)
        }
    }
}

/// Long-format series `menu_id,series,index,value` with 1-based indices:
/// `two_cycle_sum` over pairs `i < j` in row-major order, then
/// `potential`, `fenchel_gap` and `optimality_gap` per observation when
/// available.
pub fn write_series<W: Write>(
    writer: W,
    menus: &[ParsedMenu],
    report: &Report,
) -> Result<(), CliError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let csv_err = |e: csv::Error| CliError::Csv(CsvError::Csv(e));
    wtr.write_record(["menu_id", "series", "index", "value"])
        .map_err(csv_err)?;
    for (m, r) in menus.iter().zip(&report.menus) {
        let d = &m.dataset;
        let id = d.menu().id();
        let mut emit = |series: &str, values: &[f64]| -> Result<(), CliError> {
            for (k, x) in values.iter().enumerate() {
                wtr.write_record([id, series, &(k + 1).to_string(), &csvio::format_f64(*x)])
                    .map_err(csv_err)?;
            }
            Ok(())
        };
        let mut pairs = Vec::new();
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                pairs.push(monotonicity::cycle_sum(d, &[i, j]).expect("indices in range"));
            }
        }
        emit("two_cycle_sum", &pairs)?;
        if let Some(fit) = &r.fit {
            emit("potential", &fit.potentials)?;
        }
        if let Some(v) = &r.verification {
            emit("fenchel_gap", &v.fenchel_gaps)?;
            emit("optimality_gap", &v.optimality_gaps)?;
        }
    }
    wtr.flush().map_err(|source| CliError::Io {
        path: "<series>".into(),
        source,
    })
}

fn load_model(arg: &str) -> Result<PreferenceModel, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|source| CliError::Io {
            path: arg.to_string(),
            source,
        })?
    };
    let model: PreferenceModel =
        serde_json::from_str(&text).map_err(|e| CliError::Model(e.to_string()))?;
    model
        .validate()
        .map_err(|e| CliError::Model(e.to_string()))?;
    Ok(model)
}

/// Uniform values on `[-2, 2]`, seeded.
pub fn random_design(seed: u64, observations: usize, alternatives: usize) -> Vec<ValueVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..observations)
        .map(|_| {
            ValueVector::new(
                (0..alternatives)
                    .map(|_| rng.gen_range(-2.0..=2.0))
                    .collect(),
            )
            .expect("finite draws")
        })
        .collect()
}

fn simulate(config: &RunConfig) -> Result<(), CliError> {
    let model = load_model(
        config
            .model
            .as_deref()
            .ok_or_else(|| CliError::Usage("simulate needs --model".into()))?,
    )?;
    let designs = match &config.input {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            csvio::parse_value_design(file)?
        }
        None => {
            if config.observations == 0 || config.alternatives < 2 {
                return Err(CliError::Usage(
                    "random design needs --observations >= 1 and --alternatives >= 2".into(),
                ));
            }
            let menu = Menu::with_size("m1", config.alternatives)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let ids = (1..=config.observations).map(|i| i.to_string()).collect();
            vec![(
                menu,
                ids,
                random_design(config.seed, config.observations, config.alternatives),
            )]
        }
    };
    let mut datasets = Vec::with_capacity(designs.len());
    for (menu, ids, values) in designs {
        let menu_id = menu.id().to_string();
        let d = preference::simulate_dataset(&model, menu, &values)
            .map_err(|e| CliError::Model(format!("menu `{menu_id}`: {e}")))?;
        datasets.push(relabel(d, ids)?);
    }
    let mut buf = Vec::new();
    csvio::write_datasets(&mut buf, &datasets)?;
    write_output(config.output.as_deref(), &buf)
}

fn relabel(d: Dataset, ids: Vec<String>) -> Result<Dataset, CliError> {
    let menu = d.menu().clone();
    let observations = d
        .observations()
        .iter()
        .zip(ids)
        .map(|(o, id)| crate::choice::Observation { id, ..o.clone() })
        .collect();
    Dataset::new(menu, observations).map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn write_fixture(dir: &Path, name: &str, d: &Dataset) -> PathBuf {
        let path = dir.join(name);
        let mut buf = Vec::new();
        csvio::write_datasets(&mut buf, &[d.clone()]).unwrap();
        std::fs::write(&path, buf).unwrap();
        path
    }

    fn config(command: Command, input: &Path, dir: &Path) -> RunConfig {
        RunConfig {
            input: Some(input.to_path_buf()),
            output: Some(dir.join("report.json")),
            ..RunConfig::new(command)
        }
    }

    #[test]
    fn check_violation_exits_three() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_fixture(dir.path(), "v.csv", &fixtures::violation());
        let out = execute(&config(Command::Check, &input, dir.path())).unwrap();
        assert_eq!(out.exit_code, EXIT_REJECTED);
        let w = out.report.unwrap().menus[0]
            .cyclic_monotonicity
            .clone()
            .unwrap()
            .witness
            .unwrap();
        assert_eq!(w.cycle, vec![1, 2]);
        assert!((w.cycle_sum + 0.6).abs() < 1e-12);
    }

    #[test]
    fn check_softmax_exits_zero() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_fixture(dir.path(), "s.csv", &fixtures::softmax());
        let out = execute(&config(Command::Check, &input, dir.path())).unwrap();
        assert_eq!(out.exit_code, EXIT_PASS);
    }

    #[test]
    fn bad_tolerance_is_usage_error() {
        let cfg = RunConfig {
            tol_cm: -1.0,
            ..RunConfig::new(Command::Check)
        };
        assert_eq!(run(&cfg), EXIT_ERROR);
    }

    #[test]
    fn missing_input_is_usage_error() {
        assert!(matches!(
            execute(&RunConfig::new(Command::Check)),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn inline_model_parses() {
        let m = load_model(r#"{"family": "pairwise_regret", "theta": 0.5}"#).unwrap();
        assert!(matches!(m, PreferenceModel::PairwiseRegret { .. }));
        assert!(load_model(r#"{"family": "nope"}"#).is_err());
    }

    #[test]
    fn random_design_is_seeded() {
        assert_eq!(random_design(3, 4, 3), random_design(3, 4, 3));
        assert_ne!(random_design(3, 4, 3), random_design(4, 4, 3));
    }
}
