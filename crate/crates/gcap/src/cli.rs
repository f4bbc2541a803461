//! Command-line surface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 closed form requested for a channel kind that has none.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcap_core::functionals::{
    gaussian_holevo_capacity, max_output_p_norm, min_output_entropy, min_output_fp_closed, numeric_inf_fp,
    numeric_min_output_entropy, EnergyBudget, OptimizationReport,
};
use gcap_core::{Error as CoreError, Tolerances};
use serde::Serialize;

use crate::campaign::{self, Configuration, Negate};
use crate::error::{CliError, Result};
use crate::io::{read_channels, ChannelEntry, StateRecord};
use crate::report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "gcap", version, about = "Gaussian channel output norms, entropies, capacities and verification campaigns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random stream; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Objective evaluations per numeric search.
    #[arg(long, global = true)]
    pub budget: Option<usize>,

    /// Pass/fail tolerance of the selected check. For analyze and capacity
    /// it sets the physicality tolerance used to validate inputs.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Record wall time in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal output F_p, maximal output p-norm and minimal output entropy.
    Analyze(AnalyzeArgs),
    /// Energy-constrained Gaussian capacity.
    Capacity(CapacityArgs),
    /// Run a verification campaign.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Comma-separated p values (each > 1).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    /// Also run the numeric search; required for custom channels.
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Total mean energy.
    #[arg(long)]
    pub energy: f64,
    /// Comma-separated mode frequencies; overrides the spec file.
    #[arg(long, value_delimiter = ',')]
    pub omega: Option<Vec<f64>>,
    /// Allow a numeric minimal output entropy for custom channels.
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Theorem1,
    Lemma1,
    Schur,
    Concavity,
    Multiplicativity,
    Additivity,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Theorem1 => "theorem1",
            Target::Lemma1 => "lemma1",
            Target::Schur => "schur",
            Target::Concavity => "concavity",
            Target::Multiplicativity => "multiplicativity",
            Target::Additivity => "additivity",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Trials (theorem1, schur), samples per (A, k) (lemma1), or grid
    /// points per p (concavity) or per split axis (additivity).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Random matrices A in the lemma1 campaign.
    #[arg(long)]
    pub instances: Option<u64>,
    /// Largest mode count (matrix size for schur).
    #[arg(long)]
    pub max_modes: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// Total energy for additivity.
    #[arg(long)]
    pub energy: Option<f64>,
    /// Channels to tensor instead of the built-in configurations
    /// (multiplicativity and additivity).
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub self_test_negate: bool,
}

pub const DEFAULT_BUDGET: usize = 20_000;

/// Completed run: the report and the exit code it implies.
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

fn check_positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::argument(name, format!("must be positive and finite, got {v}")))
    }
}

fn check_ps(ps: &[f64]) -> Result<()> {
    if ps.is_empty() {
        return Err(CliError::argument("p", "no values given"));
    }
    if let Some(p) = ps.iter().find(|p| !(**p > 1.0) || !p.is_finite()) {
        return Err(CliError::argument("p", format!("values must exceed 1, got {p}")));
    }
    Ok(())
}

impl Cli {
    fn budget(&self) -> Result<usize> {
        match self.budget {
            Some(0) => Err(CliError::argument("budget", "must be positive")),
            Some(b) => Ok(b),
            None => Ok(DEFAULT_BUDGET),
        }
    }

    fn input_tolerances(&self) -> Result<Tolerances> {
        let mut tol = Tolerances::default();
        if let Some(t) = self.tol {
            tol.phys = check_positive("tol", t)?;
        }
        Ok(tol)
    }
}

#[derive(Debug, Serialize)]
struct SearchSummary {
    best_value: f64,
    gap_to_closed_form: Option<f64>,
    evaluations: usize,
    budget: usize,
    restarts: usize,
    converged: bool,
    argument: StateRecord,
}

impl From<&OptimizationReport> for SearchSummary {
    fn from(r: &OptimizationReport) -> Self {
        Self {
            best_value: r.best_value,
            gap_to_closed_form: r.gap,
            evaluations: r.evaluations,
            budget: r.budget,
            restarts: r.restarts,
            converged: r.converged,
            argument: StateRecord::from_covariance(&r.argument),
        }
    }
}

#[derive(Debug, Serialize)]
struct AnalyzeRecord {
    channel: String,
    kind: &'static str,
    n_modes: usize,
    p: f64,
    closed_form: bool,
    min_output_fp: f64,
    xi_p: f64,
    s_min: f64,
    numeric_fp: Option<SearchSummary>,
    numeric_entropy: Option<SearchSummary>,
}

fn closed_or_unsupported<T>(r: gcap_core::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(CoreError::UnsupportedKind { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn analyze(cli: &Cli, args: &AnalyzeArgs, report: &mut Report) -> Result<()> {
    check_ps(&args.p)?;
    let budget = cli.budget()?;
    let tol = cli.input_tolerances()?;
    let entries = read_channels(&args.channel, &tol)?;
    for entry in &entries {
        let ch = &entry.channel;
        let kind = ch.kind().name();
        let s_closed = closed_or_unsupported(min_output_entropy(ch))?;
        if s_closed.is_none() && !args.numeric {
            return Err(CliError::Unsupported { kind });
        }
        let entropy_search = if args.numeric {
            log::info!("{}: entropy search", entry.name);
            Some(numeric_min_output_entropy(ch, budget, cli.seed)?)
        } else {
            None
        };
        for &p in &args.p {
            let fp_closed = closed_or_unsupported(min_output_fp_closed(ch, p))?;
            let fp_search = if args.numeric {
                log::info!("{}: F_p search at p = {p}", entry.name);
                Some(numeric_inf_fp(ch, p, budget, cli.seed)?)
            } else {
                None
            };
            let (fp, xi, s) = match (fp_closed, s_closed) {
                (Some(fp), Some(s)) => (fp, max_output_p_norm(ch, p)?, s),
                _ => {
                    let fp = fp_search.as_ref().map(|r| r.best_value).expect("numeric search ran");
                    let s = entropy_search.as_ref().map(|r| r.best_value).expect("numeric search ran");
                    let xi = 2f64.powi(ch.modes() as i32) * fp.powf(-1.0 / p);
                    (fp, xi, s)
                }
            };
            report.push(&AnalyzeRecord {
                channel: entry.name.clone(),
                kind,
                n_modes: ch.modes(),
                p,
                closed_form: fp_closed.is_some(),
                min_output_fp: fp,
                xi_p: xi,
                s_min: s,
                numeric_fp: fp_search.as_ref().map(SearchSummary::from),
                numeric_entropy: entropy_search.as_ref().map(SearchSummary::from),
            })?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CapacityRecord {
    channel: String,
    kind: &'static str,
    n_modes: usize,
    energy: f64,
    omega: Vec<f64>,
    zero_point: f64,
    status: &'static str,
    infeasible: bool,
    capacity: f64,
    max_output_entropy: Option<f64>,
    s_min: Option<f64>,
    s_min_closed_form: bool,
    modulation_min_eigenvalue: Option<f64>,
    search: Option<SearchSummary>,
    s_min_search: Option<SearchSummary>,
}

fn capacity(cli: &Cli, args: &CapacityArgs, report: &mut Report) -> Result<()> {
    let budget = cli.budget()?;
    let tol = cli.input_tolerances()?;
    if !args.energy.is_finite() {
        return Err(CliError::argument("energy", "must be finite"));
    }
    let entries = read_channels(&args.channel, &tol)?;
    for ChannelEntry { name, channel, omega } in &entries {
        let omega = match &args.omega {
            Some(w) => {
                if w.len() != channel.modes() {
                    return Err(CliError::argument(
                        "omega",
                        format!("expected {} entries for {name}, found {}", channel.modes(), w.len()),
                    ));
                }
                for v in w {
                    check_positive("omega", *v)?;
                }
                w.clone()
            }
            None => omega.clone(),
        };
        let kind = channel.kind().name();
        if closed_or_unsupported(min_output_entropy(channel))?.is_none() && !args.numeric {
            return Err(CliError::Unsupported { kind });
        }
        let energy = EnergyBudget::new(args.energy, omega.clone())?;
        log::info!("{name}: capacity search at energy {}", args.energy);
        let r = gaussian_holevo_capacity(channel, &energy, budget, cli.seed)?;
        report.push(&CapacityRecord {
            channel: name.clone(),
            kind,
            n_modes: channel.modes(),
            energy: args.energy,
            zero_point: energy.zero_point(),
            omega,
            status: if r.infeasible { "infeasible" } else { "ok" },
            infeasible: r.infeasible,
            capacity: r.capacity,
            max_output_entropy: r.max_output_entropy.as_ref().map(|s| s.best_value),
            s_min: r.s_min,
            s_min_closed_form: r.s_min_closed_form,
            modulation_min_eigenvalue: r.modulation_min_eigenvalue,
            search: r.max_output_entropy.as_ref().map(SearchSummary::from),
            s_min_search: r.s_min_search.as_ref().map(SearchSummary::from),
        })?;
    }
    Ok(())
}

fn file_configuration(path: &Path, tol: &Tolerances) -> Result<Vec<Configuration>> {
    let entries = read_channels(path, tol)?;
    if entries.len() < 2 {
        return Err(CliError::field("channels", "need at least two channels to tensor"));
    }
    Ok(vec![Configuration {
        name: entries.iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join("+"),
        channels: entries.iter().map(|e| e.channel.clone()).collect(),
        omegas: entries.iter().map(|e| e.omega.clone()).collect(),
    }])
}

fn verify(cli: &Cli, args: &VerifyArgs, report: &mut Report) -> Result<()> {
    let mut tol = Tolerances::default();
    let negate = Negate(args.self_test_negate);
    let positive_count = |name: &'static str, v: Option<u64>, default: u64| match v {
        Some(0) => Err(CliError::argument(name, "must be positive")),
        Some(v) => Ok(v),
        None => Ok(default),
    };
    let max_modes = |default: usize| match args.max_modes {
        Some(0) => Err(CliError::argument("max-modes", "must be positive")),
        Some(m) => Ok(m),
        None => Ok(default),
    };
    let threshold = args.tol_override(cli)?;
    let pass = match args.target {
        Target::Theorem1 => {
            if let Some(t) = threshold {
                tol.prefix_abs = t;
            }
            let trials = positive_count("trials", args.trials, 10_000)?;
            let r = campaign::theorem1(max_modes(4)?, (1.0, 5.0), trials, cli.seed, &tol, negate)?;
            report.push(&r)?;
            r.pass
        }
        Target::Schur => {
            if let Some(t) = threshold {
                tol.prefix_abs = t;
            }
            let trials = positive_count("trials", args.trials, 1_000)?;
            let r = campaign::schur(max_modes(8)?, trials, cli.seed, &tol, negate)?;
            report.push(&r)?;
            r.pass
        }
        Target::Lemma1 => {
            if let Some(t) = threshold {
                tol.prefix_abs = t;
            }
            let samples = positive_count("trials", args.trials, 10_000)?;
            let instances = positive_count("instances", args.instances, 100)?;
            let r = campaign::lemma1(max_modes(3)?, instances, samples, cli.seed, &tol, negate)?;
            report.push(&r)?;
            r.pass
        }
        Target::Concavity => {
            let ps = args.p.clone().unwrap_or_else(|| vec![1.1, 2.0, 3.0, 7.0]);
            check_ps(&ps)?;
            let points = positive_count("trials", args.trials, 2_000)? as usize;
            let r = campaign::concavity(&ps, points, threshold.unwrap_or(1e-9), negate);
            report.push(&r)?;
            r.pass
        }
        Target::Multiplicativity => {
            if let Some(t) = threshold {
                tol.opt = t;
            }
            let ps = args.p.clone().unwrap_or_else(|| vec![2.0, 3.0]);
            check_ps(&ps)?;
            let configs = match &args.channel {
                Some(path) => file_configuration(path, &Tolerances::default())?,
                None => campaign::builtin_pairs(&tol)?,
            };
            let records = campaign::multiplicativity(&configs, &ps, cli.budget()?, cli.seed, &tol, negate)?;
            for r in &records {
                report.push(r)?;
            }
            records.iter().all(|r| r.pass)
        }
        Target::Additivity => {
            if let Some(t) = threshold {
                tol.opt_sup = t;
            }
            let energy = args.energy.unwrap_or(3.0);
            if !energy.is_finite() {
                return Err(CliError::argument("energy", "must be finite"));
            }
            let grid = positive_count("trials", args.trials, 11)? as usize;
            let configs = match &args.channel {
                Some(path) => file_configuration(path, &Tolerances::default())?,
                None => campaign::builtin_additivity(&tol)?,
            };
            let records =
                campaign::additivity(&configs, energy, grid, 50, cli.budget()?, cli.seed, &tol, negate)?;
            for r in &records {
                report.push(r)?;
            }
            records.iter().all(|r| r.pass)
        }
    };
    report.tolerances = (&tol).into();
    report.pass = pass;
    Ok(())
}

impl VerifyArgs {
    fn tol_override(&self, cli: &Cli) -> Result<Option<f64>> {
        match cli.tol {
            Some(t) if !(t >= 0.0) || !t.is_finite() => {
                Err(CliError::argument("tol", format!("must be nonnegative and finite, got {t}")))
            }
            other => Ok(other),
        }
    }
}

/// Runs the parsed command; errors carry their own exit codes.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let (name, tol) = match &cli.command {
        Command::Analyze(_) => ("analyze".to_string(), cli.input_tolerances()?),
        Command::Capacity(_) => ("capacity".to_string(), cli.input_tolerances()?),
        Command::Verify(v) => (format!("verify {}", v.target.name()), Tolerances::default()),
    };
    let mut report = Report::new(name, cli.seed, &tol);
    match &cli.command {
        Command::Analyze(a) => analyze(cli, a, &mut report)?,
        Command::Capacity(a) => capacity(cli, a, &mut report)?,
        Command::Verify(a) => verify(cli, a, &mut report)?,
    }
    let elapsed = start.elapsed().as_secs_f64();
    log::info!("{} finished in {elapsed:.3} s", report.command);
    if cli.timing {
        report.wall_time_seconds = Some(elapsed);
    }
    let exit_code = if report.pass { 0 } else { 1 };
    Ok(Outcome { report, exit_code })
}
