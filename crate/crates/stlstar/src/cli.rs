//! Command-line front end: `monitor`, `sweep`, `optimize` and `simulate`
//! subcommands driven by a single JSON run configuration.
//!
//! Exit codes: 0 on success, 2 on configuration or parse errors, 3 when
//! the simulation horizon is shorter than the formula's necessary input
//! length.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::formula::{parse, Formula};
use crate::monitor::{boolean_monitor, format_robustness, monitor};
use crate::odesim::{builtin, integrate, OdeModel};
use crate::rewrite;
use crate::sweep::{
    export, run_sweep, ParamAxis, PerturbationSpace, SimSettings, SweepOptions,
};

/// Run configuration: the model, what to simulate, and what to check.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Builtin model name (`sir`, `lotka_volterra`) or an inline model.
    pub model: ModelRef,
    /// Initial state; the model's default when omitted.
    #[serde(default)]
    pub init: Option<Vec<f64>>,
    /// Named parameter overrides (fixed values; also the base values of
    /// parameters a sweep does not vary).
    #[serde(default)]
    pub params: Option<BTreeMap<String, f64>>,
    /// Perturbation space for `sweep`.
    #[serde(default)]
    pub space: Option<SpaceConfig>,
    /// Formula text.
    pub formula: String,
    /// Sampling step of the simulation.
    pub step: f64,
    /// Simulated duration; must cover the formula's necessary input length.
    pub horizon: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Output directory for files.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ModelRef {
    Builtin(String),
    Inline(InlineModel),
}

/// A model given as arithmetic derivative expressions.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    #[serde(default)]
    pub name: Option<String>,
    pub vars: Vec<VarDef>,
    #[serde(default)]
    pub params: Vec<ParamDef>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VarDef {
    pub name: String,
    /// Derivative of this variable: an expression over variables and
    /// parameters using `+ - * /`, constants and parentheses.
    pub rhs: String,
    #[serde(default)]
    pub init: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDef {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub axes: Vec<AxisConfig>,
    /// Refinement iterations after the initial grid.
    #[serde(default)]
    pub refine: usize,
    /// Refinement threshold on |robustness|; scale-free default when
    /// omitted.
    #[serde(default)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Parser)]
#[command(
    name = "stlstar",
    about = "Robustness monitoring for signal temporal logic with value freezing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the model once and report the formula's robustness and
    /// Boolean satisfaction.
    Monitor(CommonArgs),
    /// Explore the perturbation space: simulate and monitor a grid of
    /// parameter points with adaptive refinement; write CSV and SVG maps.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads for point evaluation.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a formula to use as few frozen indices as possible.
    Optimize {
        /// Formula text; taken from the config when omitted.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the formula after every rewriting pass.
        #[arg(long)]
        explain: bool,
    },
    /// Simulate the model once and dump the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's formula.
    #[arg(long)]
    formula: Option<String>,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
enum CliError {
    /// Configuration, formula or model errors.
    Config(String),
    /// Horizon shorter than the formula's necessary input length.
    Length { required: f64, horizon: f64 },
    /// Runtime failures (I/O, diverging simulation).
    Run(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Length { .. } => ExitCode::from(3),
            CliError::Run(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("error: {m}"),
            CliError::Length { required, horizon } => format!(
                "error: the formula's necessary input length is {required} but the horizon is only {horizon}; \
                 satisfaction over the missing suffix is undefined (reported as satisfied=false)"
            ),
            CliError::Run(m) => format!("error: {m}"),
        }
    }
}

/// Entry point for the binary.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version through the error path with code 0
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    match dispatch(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.message());
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Monitor(common) => cmd_monitor(&load(&common)?, out),
        Command::Sweep {
            common,
            workers,
            out: out_dir,
        } => {
            let mut config = load(&common)?;
            if let Some(workers) = workers {
                config.workers = Some(workers);
            }
            if let Some(dir) = out_dir {
                config.out = Some(dir);
            }
            cmd_sweep(&config, out)
        }
        Command::Optimize {
            formula,
            config,
            explain,
        } => {
            let text = match (formula, config) {
                (Some(text), _) => text,
                (None, Some(path)) => read_config(&path)?.formula,
                (None, None) => {
                    return Err(CliError::Config(
                        "optimize needs --formula or --config".into(),
                    ))
                }
            };
            cmd_optimize(&text, explain, out)
        }
        Command::Simulate { common, out: dir } => {
            let mut config = load(&common)?;
            if let Some(dir) = dir {
                config.out = Some(dir);
            }
            cmd_simulate(&config, out)
        }
    }
}

fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read `{}`: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config `{}`: {e}", path.display())))
}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut config = read_config(&common.config)?;
    if let Some(formula) = &common.formula {
        config.formula = formula.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = Some(seed);
    }
    Ok(config)
}

fn build_model(config: &RunConfig) -> Result<OdeModel, CliError> {
    match &config.model {
        ModelRef::Builtin(name) => builtin(name).map_err(|e| CliError::Config(e.to_string())),
        ModelRef::Inline(inline) => OdeModel::from_expressions(
            inline.name.clone().unwrap_or_else(|| "custom".into()),
            inline
                .vars
                .iter()
                .map(|v| (v.name.clone(), v.rhs.clone(), v.init))
                .collect(),
            inline.params.iter().map(|p| (p.name.clone(), p.value)).collect(),
        )
        .map_err(|e| CliError::Config(e.to_string())),
    }
}

fn resolve_init(config: &RunConfig, model: &OdeModel) -> Result<Vec<f64>, CliError> {
    match &config.init {
        None => Ok(model.default_init().to_vec()),
        Some(init) => {
            if init.len() != model.dim() {
                return Err(CliError::Config(format!(
                    "init has {} values, model `{}` has {} variables",
                    init.len(),
                    model.name(),
                    model.dim()
                )));
            }
            Ok(init.clone())
        }
    }
}

fn resolve_params(config: &RunConfig, model: &OdeModel) -> Result<Vec<f64>, CliError> {
    let mut params = model.default_params().to_vec();
    if let Some(overrides) = &config.params {
        for (name, value) in overrides {
            let position = model
                .param_names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "`{name}` is not a parameter of model `{}` (parameters: {})",
                        model.name(),
                        model.param_names().join(", ")
                    ))
                })?;
            params[position] = *value;
        }
    }
    Ok(params)
}

fn parse_formula(text: &str) -> Result<Formula, CliError> {
    parse(text).map_err(|e| CliError::Config(format!("formula: {e}")))
}

fn check_horizon(config: &RunConfig, phi: &Formula) -> Result<(), CliError> {
    let required = phi.necessary_length();
    if config.horizon < required {
        return Err(CliError::Length {
            required,
            horizon: config.horizon,
        });
    }
    Ok(())
}

fn cmd_monitor(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = build_model(config)?;
    let phi = parse_formula(&config.formula)?;
    check_horizon(config, &phi)?;
    let init = resolve_init(config, &model)?;
    let params = resolve_params(config, &model)?;
    let trajectory = integrate(&model, &init, &params, config.step, config.horizon)
        .map_err(|e| CliError::Run(e.to_string()))?;
    let report = rewrite::optimize(&phi);
    let robustness =
        monitor(&report.output, &trajectory).map_err(|e| CliError::Run(e.to_string()))?;
    let satisfied =
        boolean_monitor(&report.output, &trajectory).map_err(|e| CliError::Run(e.to_string()))?;
    let w = out;
    writeln!(w, "formula: {phi}").map_err(io_err)?;
    writeln!(w, "optimized: {}", report.output).map_err(io_err)?;
    writeln!(w, "robustness: {}", format_robustness(robustness)).map_err(io_err)?;
    writeln!(w, "satisfied: {satisfied}").map_err(io_err)?;
    Ok(())
}

fn cmd_sweep(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = build_model(config)?;
    let phi = parse_formula(&config.formula)?;
    check_horizon(config, &phi)?;
    let space_config = config
        .space
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a `space` section".into()))?;
    let space = PerturbationSpace {
        axes: space_config
            .axes
            .iter()
            .map(|a| ParamAxis {
                name: a.param.clone(),
                lo: a.lo,
                hi: a.hi,
                resolution: a.steps,
            })
            .collect(),
        refine_cap: space_config.refine,
        threshold: space_config.threshold,
    };
    let sim = SimSettings {
        init: resolve_init(config, &model)?,
        base_params: resolve_params(config, &model)?,
        step: config.step,
        horizon: config.horizon,
    };
    let options = SweepOptions {
        workers: config.workers.unwrap_or_else(|| SweepOptions::default().workers),
        progress: true,
    };
    let result =
        run_sweep(&model, &space, &phi, &sim, &options).map_err(|e| match e {
            crate::sweep::SweepError::HorizonTooShort { required, horizon } => {
                CliError::Length { required, horizon }
            }
            other => CliError::Config(other.to_string()),
        })?;
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
    let out_dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = export(&result, &out_dir).map_err(|e| CliError::Run(e.to_string()))?;
    let w = out;
    writeln!(w, "formula: {}", result.formula).map_err(io_err)?;
    writeln!(w, "optimized: {}", result.optimized_formula).map_err(io_err)?;
    writeln!(w, "formula size: {}", result.formula_size).map_err(io_err)?;
    writeln!(w, "trajectories: {}", result.points.len()).map_err(io_err)?;
    writeln!(w, "points per trajectory: {}", result.points_per_trajectory).map_err(io_err)?;
    writeln!(
        w,
        "positive: {}  negative: {}",
        result.positive_count(),
        result.negative_count()
    )
    .map_err(io_err)?;
    writeln!(w, "time: {:.3} s", result.elapsed.as_secs_f64()).map_err(io_err)?;
    for file in files {
        writeln!(w, "wrote: {}", file.display()).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_optimize(text: &str, explain: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let phi = parse_formula(text)?;
    let report = rewrite::optimize(&phi);
    let w = out;
    writeln!(w, "original:  {}", report.input).map_err(io_err)?;
    writeln!(w, "optimized: {}", report.output).map_err(io_err)?;
    writeln!(
        w,
        "frozen indices: {} -> {}",
        report.indices_before, report.indices_after
    )
    .map_err(io_err)?;
    if report.steps.is_empty() {
        writeln!(w, "passes: none (already optimal)").map_err(io_err)?;
    } else {
        let names: Vec<&str> = report.steps.iter().map(|(name, _)| *name).collect();
        writeln!(w, "passes: {}", names.join(", ")).map_err(io_err)?;
        if explain {
            for (name, formula) in &report.steps {
                writeln!(w, "  after {name}: {formula}").map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn cmd_simulate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = build_model(config)?;
    let init = resolve_init(config, &model)?;
    let params = resolve_params(config, &model)?;
    let trajectory = integrate(&model, &init, &params, config.step, config.horizon)
        .map_err(|e| CliError::Run(e.to_string()))?;
    match &config.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Run(e.to_string()))?;
            let path = dir.join("trajectory.csv");
            let file = File::create(&path).map_err(|e| CliError::Run(e.to_string()))?;
            trajectory
                .write_csv(BufWriter::new(file))
                .map_err(|e| CliError::Run(e.to_string()))?;
            writeln!(out, "wrote: {}", path.display()).map_err(io_err)?;
        }
        None => {
            trajectory
                .write_csv(&mut *out)
                .map_err(|e| CliError::Run(e.to_string()))?;
        }
    }
    Ok(())
}

fn io_err(e: io::Error) -> CliError {
    CliError::Run(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let text = r#"{
            "model": "sir",
            "init": [95, 5, 0],
            "params": {"alpha": 0.01, "beta": 0.1},
            "space": {
                "axes": [
                    {"param": "alpha", "lo": 0.005, "hi": 0.02, "steps": 15},
                    {"param": "beta", "lo": 0.05, "hi": 0.3, "steps": 15}
                ],
                "refine": 2,
                "threshold": null
            },
            "formula": "F[1,5](I >= 50)",
            "step": 0.02,
            "horizon": 10,
            "seed": 1,
            "workers": 8,
            "out": "out"
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(&config.model, ModelRef::Builtin(n) if n == "sir"));
        assert_eq!(config.space.as_ref().unwrap().axes.len(), 2);
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.formula, config.formula);
    }

    #[test]
    fn inline_model_config_builds() {
        let text = r#"{
            "model": {
                "name": "logistic",
                "vars": [{"name": "x", "rhs": "r*x*(1 - x/k)", "init": 0.5}],
                "params": [{"name": "r", "value": 1.0}, {"name": "k", "value": 10.0}]
            },
            "formula": "F[0,20](x >= 9)",
            "step": 0.1,
            "horizon": 30
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        let model = build_model(&config).unwrap();
        assert_eq!(model.state_names(), ["x"]);
        assert_eq!(model.param_names(), ["r", "k"]);
        let mut sink = Vec::new();
        cmd_monitor(&config, &mut sink).unwrap();
        let report = String::from_utf8(sink).unwrap();
        assert!(report.contains("satisfied: true"), "{report}");
    }

    #[test]
    fn unknown_parameter_override_is_config_error() {
        let text = r#"{
            "model": "sir",
            "params": {"gamma": 1.0},
            "formula": "true",
            "step": 0.1,
            "horizon": 1
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        let err = cmd_monitor(&config, &mut Vec::new()).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn short_horizon_is_a_length_error_naming_the_required_length() {
        let text = r#"{
            "model": "sir",
            "formula": "F[1,5](I >= 50)",
            "step": 0.1,
            "horizon": 1
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        match cmd_monitor(&config, &mut Vec::new()) {
            Err(CliError::Length { required, horizon }) => {
                assert_eq!(required, 5.0);
                assert_eq!(horizon, 1.0);
            }
            other => panic!("expected length error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn monitor_reports_robustness_and_satisfaction() {
        let text = r#"{
            "model": "sir",
            "formula": "true",
            "step": 0.1,
            "horizon": 1
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        let mut sink = Vec::new();
        cmd_monitor(&config, &mut sink).unwrap();
        let report = String::from_utf8(sink).unwrap();
        assert!(report.contains("robustness: inf"));
        assert!(report.contains("satisfied: true"));
    }

    #[test]
    fn optimize_reports_index_reduction() {
        let mut sink = Vec::new();
        cmd_optimize(
            "G[0,10](*1 !*2 F[0,1](x*1 + x*2 >= x))",
            true,
            &mut sink,
        )
        .unwrap();
        let report = String::from_utf8(sink).unwrap();
        assert!(report.contains("frozen indices: 2 -> 1"), "{report}");
        assert!(report.contains("after minimize-indices"), "{report}");
    }

    #[test]
    fn optimize_on_freeze_free_formula_is_identity() {
        let mut sink = Vec::new();
        cmd_optimize("F[1,5](I >= 50)", false, &mut sink).unwrap();
        let report = String::from_utf8(sink).unwrap();
        assert!(report.contains("frozen indices: 0 -> 0"));
        assert!(report.contains("passes: none"));
    }
}
