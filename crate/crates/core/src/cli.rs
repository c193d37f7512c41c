//! Command-line front end.
//!
//! Exit status: 0 on success, 2 for bad flags, 1 when a computation fails.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{tidy_json, trace_distance_curve, trace_distance_curve_parallel};
use crate::consistency::{
    build_consistency_map, deutsch_ctc_oracle, solve_fixed_point, stability_limit, InteractionRegistry, ScenarioParams,
    ScenarioRegistry, DEFAULT_EPSILONS,
};
use crate::gates::{BellTag, PerturbationRegistry};
use crate::protocols::{
    run_bell_on_tde_with, teleport_to_past, time_loop_correction, time_loop_teleport_with, OutcomePolicy, Resolution,
};
use crate::qlinalg::{trace_distance, PureState};
use crate::{Error, C64, TOL};

/// Oracle and solver must agree to this trace distance.
pub const ORACLE_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "tdesim", version, about = "Time-displaced entanglement and time-loop teleportation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct AmplitudeArgs {
    /// |alpha|^2 of the input qubit (real amplitudes, beta = +sqrt(1 - alpha2))
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_im: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bell measurement on a time-displaced pair
    TdeBell {
        #[arg(long)]
        tau: Option<i64>,
        /// Perturbation model used to resolve degenerate fixed points
        #[arg(long)]
        perturbation: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Teleportation into the past
    Teleport {
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[arg(long, value_parser = parse_tag)]
        outcome: Option<BellTag>,
        #[arg(long)]
        correct: bool,
        #[arg(long)]
        tau: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Teleportation through a time loop with a CNOT
    TimeLoop {
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[arg(long, value_parser = parse_tag)]
        outcome: Option<BellTag>,
        #[arg(long)]
        correct: bool,
        #[arg(long)]
        tau: Option<i64>,
        #[arg(long)]
        perturbation: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace-distance table over beta^2 in [0, 1]
    Sweep {
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent grid points
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Perturbed solutions along a shrinking epsilon schedule
    Stability {
        /// bell-on-tde or time-loop
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_parser = parse_tag)]
        outcome: Option<BellTag>,
        /// Comma-separated, strictly descending, each in (0, 0.5)
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[arg(long)]
        tau: Option<i64>,
        /// axis-jitter, ry or depolarizing
        #[arg(long)]
        perturbation: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the loop solver with the CTC fixed-point iteration
    CtcCompare {
        #[command(flatten)]
        amplitudes: AmplitudeArgs,
        #[arg(long, value_parser = parse_tag)]
        outcome: Option<BellTag>,
        #[arg(long)]
        interaction: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn parse_tag(s: &str) -> Result<BellTag, String> {
    s.parse::<BellTag>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    TdeBell,
    Teleport,
    TimeLoop,
    Sweep,
    Stability,
    CtcCompare,
}

/// Normalized, validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub alpha: C64,
    pub beta: C64,
    pub alpha2: f64,
    pub tau: i64,
    pub outcome: Option<BellTag>,
    pub correct: bool,
    pub epsilons: Vec<f64>,
    pub grid: usize,
    pub jobs: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub scenario: String,
    pub perturbation: String,
    pub interaction: String,
}

/// A flag value that parsed but is out of range.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn amplitudes(args: &AmplitudeArgs, required: bool) -> Result<(C64, C64), ConfigError> {
    let quartet = [args.alpha_re, args.alpha_im, args.beta_re, args.beta_im];
    if quartet.iter().any(Option::is_some) {
        if args.alpha2.is_some() {
            return Err(ConfigError("--alpha2 cannot be combined with --alpha-re/--alpha-im/--beta-re/--beta-im".into()));
        }
        let [ar, ai, br, bi] = quartet.map(|v| v.unwrap_or(0.0));
        if [ar, ai, br, bi].iter().any(|v| !v.is_finite()) {
            return Err(ConfigError("amplitude flags must be finite".into()));
        }
        let (alpha, beta) = (C64::new(ar, ai), C64::new(br, bi));
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > TOL.norm {
            return Err(ConfigError(format!(
                "--alpha-re/--alpha-im/--beta-re/--beta-im give |alpha|^2 + |beta|^2 = {norm}, expected 1"
            )));
        }
        return Ok((alpha, beta));
    }
    match args.alpha2 {
        Some(a2) if !(0.0..=1.0).contains(&a2) => Err(ConfigError(format!("--alpha2 must lie in [0, 1], got {a2}"))),
        Some(a2) => Ok((C64::new(a2.sqrt(), 0.0), C64::new((1.0 - a2).sqrt(), 0.0))),
        None if required => Err(ConfigError("--alpha2 is required (or the --alpha-re/--alpha-im/--beta-re/--beta-im quartet)".into())),
        None => Ok((C64::new(1.0, 0.0), C64::new(0.0, 0.0))),
    }
}

fn check_tau(tau: i64) -> Result<i64, ConfigError> {
    if tau < 1 {
        return Err(ConfigError(format!("--tau must be at least 1, got {tau}")));
    }
    Ok(tau)
}

fn check_epsilons(eps: &[f64]) -> Result<(), ConfigError> {
    if eps.is_empty() {
        return Err(ConfigError("--epsilons needs at least one value".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0 && *e < 0.5)) {
        return Err(ConfigError(format!("--epsilons values must lie in (0, 0.5), got {eps:?}")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ConfigError(format!("--epsilons must be strictly descending, got {eps:?}")));
    }
    Ok(())
}

fn check_name(kind: &str, flag: &str, name: &str, available: &[&str]) -> Result<String, ConfigError> {
    if available.contains(&name) {
        Ok(name.to_string())
    } else {
        Err(ConfigError(format!("{flag}: unknown {kind} '{name}' (available: {})", available.join(", "))))
    }
}

/// Applies defaults and range checks to parsed flags.
pub fn validate_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let perturbations = PerturbationRegistry::builtin();
    let mut cfg = RunConfig {
        command: CommandKind::TdeBell,
        alpha: C64::new(1.0, 0.0),
        beta: C64::new(0.0, 0.0),
        alpha2: 1.0,
        tau: 1,
        outcome: None,
        correct: false,
        epsilons: DEFAULT_EPSILONS.to_vec(),
        grid: 101,
        jobs: 1,
        output_path: None,
        format: Format::Json,
        scenario: "bell-on-tde".into(),
        perturbation: PerturbationRegistry::DEFAULT.into(),
        interaction: InteractionRegistry::DEFAULT.into(),
    };
    let set_amplitudes = |cfg: &mut RunConfig, args: &AmplitudeArgs, required: bool| -> Result<(), ConfigError> {
        let (alpha, beta) = amplitudes(args, required)?;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.alpha2 = alpha.norm_sqr();
        Ok(())
    };
    let set_perturbation = |cfg: &mut RunConfig, name: &Option<String>| -> Result<(), ConfigError> {
        if let Some(name) = name {
            cfg.perturbation = check_name("perturbation model", "--perturbation", name, &perturbations.names())?;
        }
        Ok(())
    };

    match &cli.command {
        Command::TdeBell { tau, perturbation, out } => {
            cfg.tau = check_tau(tau.unwrap_or(1))?;
            set_perturbation(&mut cfg, perturbation)?;
            cfg.output_path = out.clone();
        }
        Command::Teleport { amplitudes, outcome, correct, tau, out } => {
            cfg.command = CommandKind::Teleport;
            set_amplitudes(&mut cfg, amplitudes, true)?;
            cfg.outcome = *outcome;
            cfg.correct = *correct;
            cfg.tau = check_tau(tau.unwrap_or(1))?;
            cfg.output_path = out.clone();
        }
        Command::TimeLoop { amplitudes, outcome, correct, tau, perturbation, out } => {
            cfg.command = CommandKind::TimeLoop;
            set_amplitudes(&mut cfg, amplitudes, true)?;
            cfg.outcome = *outcome;
            cfg.correct = *correct;
            cfg.tau = time_loop_tau(*tau)?;
            set_perturbation(&mut cfg, perturbation)?;
            cfg.output_path = out.clone();
        }
        Command::Sweep { grid, format, out, jobs } => {
            cfg.command = CommandKind::Sweep;
            cfg.grid = grid.unwrap_or(101);
            if cfg.grid < 3 {
                return Err(ConfigError(format!("--grid must be at least 3, got {}", cfg.grid)));
            }
            cfg.jobs = jobs.unwrap_or(1);
            if cfg.jobs == 0 {
                return Err(ConfigError("--jobs must be at least 1".into()));
            }
            cfg.format = format.unwrap_or_default();
            cfg.output_path = out.clone();
        }
        Command::Stability { scenario, outcome, epsilons, amplitudes, tau, perturbation, out } => {
            cfg.command = CommandKind::Stability;
            let scenarios = ScenarioRegistry::builtin();
            if let Some(name) = scenario {
                cfg.scenario = check_name("scenario", "--scenario", name, &scenarios.names())?;
            }
            let is_loop = cfg.scenario == "time-loop";
            set_amplitudes(&mut cfg, amplitudes, is_loop)?;
            cfg.outcome = Some(outcome.unwrap_or(BellTag::PhiPlus));
            if let Some(eps) = epsilons {
                check_epsilons(eps)?;
                cfg.epsilons = eps.clone();
            }
            cfg.tau = if is_loop { time_loop_tau(*tau)? } else { check_tau(tau.unwrap_or(1))? };
            set_perturbation(&mut cfg, perturbation)?;
            cfg.output_path = out.clone();
        }
        Command::CtcCompare { amplitudes, outcome, interaction, out } => {
            cfg.command = CommandKind::CtcCompare;
            set_amplitudes(&mut cfg, amplitudes, true)?;
            cfg.outcome = Some(outcome.unwrap_or(BellTag::PhiPlus));
            cfg.tau = 2;
            if let Some(name) = interaction {
                cfg.interaction =
                    check_name("interaction", "--interaction", name, &InteractionRegistry::builtin().names())?;
            }
            cfg.output_path = out.clone();
        }
    }
    Ok(cfg)
}

fn time_loop_tau(tau: Option<i64>) -> Result<i64, ConfigError> {
    match tau.unwrap_or(2) {
        2 => Ok(2),
        other => Err(ConfigError(format!("--tau must be 2 for the time loop, got {other}"))),
    }
}

fn resolution(cfg: &RunConfig) -> crate::Result<Resolution> {
    Ok(Resolution::new(PerturbationRegistry::builtin().get(&cfg.perturbation)?, cfg.epsilons.clone()))
}

fn policy(cfg: &RunConfig) -> OutcomePolicy {
    cfg.outcome.map_or(OutcomePolicy::AverageAll, OutcomePolicy::PostSelect)
}

fn rho_json(m: &crate::qlinalg::ComplexMatrix) -> Value {
    json!({ "real": m.real_rows(), "imag": m.imag_rows() })
}

fn stability_json(cfg: &RunConfig) -> crate::Result<Value> {
    let outcome = cfg.outcome.unwrap_or(BellTag::PhiPlus);
    let params = ScenarioParams { alpha: cfg.alpha, beta: cfg.beta, tau_cycles: cfg.tau, ..ScenarioParams::default() };
    let scenario = ScenarioRegistry::builtin().build(&cfg.scenario, &params)?;
    let model = PerturbationRegistry::builtin().get(&cfg.perturbation)?;
    let unperturbed = solve_fixed_point(&build_consistency_map(scenario.as_ref(), outcome)?)?;
    let report = stability_limit(scenario.as_ref(), outcome, model.as_ref(), &cfg.epsilons)?;
    let steps: Vec<Value> = report
        .steps
        .iter()
        .map(|s| {
            json!({
                "epsilon": s.epsilon,
                "eigenvalue": s.report.eigenvalue,
                "nullspace_dim": s.report.nullspace_dim,
                "residual": s.report.residual,
                "change_from_previous": s.change_from_previous,
                "distance_to_unperturbed": trace_distance(&s.report.gamma, &unperturbed.gamma).ok(),
                "gamma": rho_json(s.report.gamma.matrix()),
            })
        })
        .collect();
    let limit_output = report.steps.last().expect("non-empty schedule").report.output()?;
    Ok(json!({
        "scenario": cfg.scenario,
        "outcome": outcome,
        "model": report.model,
        "alpha2": scenario.input().map(|_| cfg.alpha2),
        "unperturbed": {
            "eigenvalue": unperturbed.eigenvalue,
            "nullspace_dim": unperturbed.nullspace_dim,
            "unique": unperturbed.unique,
        },
        "steps": steps,
        "limit": rho_json(report.limit.matrix()),
        "limit_output": rho_json(limit_output.matrix()),
    }))
}

fn ctc_json(cfg: &RunConfig) -> crate::Result<Value> {
    let outcome = cfg.outcome.unwrap_or(BellTag::PhiPlus);
    let result = time_loop_teleport_with(cfg.alpha, cfg.beta, OutcomePolicy::PostSelect(outcome), true, &Resolution::default())?;
    let solver = &result.outcome(outcome).output;
    let interaction = InteractionRegistry::builtin().get(&cfg.interaction)?;
    let input = PureState::qubit(cfg.alpha, cfg.beta)?.density();
    let oracle = deutsch_ctc_oracle(&interaction.unitary(), &input)?;
    let distance = trace_distance(solver, &oracle.rho_out)?;
    Ok(json!({
        "alpha2": cfg.alpha2,
        "outcome": outcome,
        "correction": format!("{:?}", time_loop_correction(outcome)),
        "interaction": interaction.name(),
        "solver_output": rho_json(solver.matrix()),
        "oracle_output": rho_json(oracle.rho_out.matrix()),
        "oracle_iterations": oracle.iterations,
        "trace_distance": distance,
        "agree": distance <= ORACLE_AGREEMENT,
    }))
}

/// Runs a validated configuration and returns the text to emit.
pub fn execute(cfg: &RunConfig) -> crate::Result<String> {
    let value = match cfg.command {
        CommandKind::TdeBell => run_bell_on_tde_with(cfg.tau, &resolution(cfg)?)?.to_json(),
        CommandKind::Teleport => {
            let mut r = teleport_to_past(cfg.alpha, cfg.beta, cfg.tau, cfg.correct)?;
            r.policy = policy(cfg);
            r.to_json()
        }
        CommandKind::TimeLoop => {
            time_loop_teleport_with(cfg.alpha, cfg.beta, policy(cfg), cfg.correct, &resolution(cfg)?)?.to_json()
        }
        CommandKind::Sweep => {
            let table = if cfg.jobs > 1 {
                trace_distance_curve_parallel(cfg.grid, cfg.jobs)?
            } else {
                trace_distance_curve(cfg.grid)?
            };
            if cfg.format == Format::Csv {
                let mut buf = Vec::new();
                table.write_csv(&mut buf)?;
                return String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()));
            }
            table.to_json()
        }
        CommandKind::Stability => stability_json(cfg)?,
        CommandKind::CtcCompare => ctc_json(cfg)?,
    };
    let mut value = value;
    tidy_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    text.push('\n');
    Ok(text)
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match validate_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = match execute(&cfg) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cfg.output_path {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}"))
        }
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
