mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use superint_core::checks::{oracle_suite, oracle_table, verify_suite};
use superint_core::{DsoParams, KcParams, ModelConfig, Mutation, MutationTarget, SuiteConfig};

use report::ReportDocument;

/// Spectra, symmetry-algebra checks and radial-oracle comparisons for the
/// N-dimensional double singular oscillator (`dso`) and Kepler–Coulomb
/// system (`kc`).
#[derive(Parser, Debug)]
#[command(name = "superint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Double singular oscillator.
    Dso {
        #[command(subcommand)]
        action: Action,
    },
    /// Kepler–Coulomb system with non-central terms.
    Kc {
        #[command(subcommand)]
        action: Action,
    },
    /// Full verification suite; exit code 2 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = ModelChoice::All)]
        model: ModelChoice,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Radial-oracle comparison, convergence and slope checks.
    Oracle {
        #[arg(long, value_enum, default_value_t = ModelChoice::All)]
        model: ModelChoice,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand, Debug)]
enum Action {
    /// Algebraic spectrum for p = 0..=pmax.
    Spectrum(RunArgs),
    Verify(RunArgs),
    Oracle(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Dso,
    Kc,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Model parameters default to the built-in sector of each model when
/// omitted.
#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Total dimension.
    #[arg(long = "N")]
    dim: Option<u32>,
    /// Oscillator split N = n + (N - n).
    #[arg(long = "n")]
    split: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    c0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    hbar: Option<f64>,
    #[arg(long)]
    l1: Option<u32>,
    #[arg(long)]
    l2: Option<u32>,
    /// Kepler–Coulomb angular quantum number.
    #[arg(long)]
    l: Option<u32>,
    /// Kepler–Coulomb ladder scale used by the algebra and oracle checks.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long)]
    pmax: Option<u32>,
    #[arg(long)]
    max_level: Option<u32>,
    /// Points of the recurrence grid.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Upper end of the recurrence grid (default: tail radius of each function).
    #[arg(long, allow_negative_numbers = true)]
    rmax: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fault injection: perturb one constant, e.g. `--mutate alpha1 1e-3`.
    #[arg(long, num_args = 2, value_names = ["NAME", "DELTA"], allow_negative_numbers = true)]
    mutate: Option<Vec<String>>,
    /// Double every grid.
    #[arg(long)]
    refine: bool,
    /// Leave timing out of the report so output is byte-for-byte reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Spectrum,
    Verify,
    Oracle,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::Verify => "verify",
            Kind::Oracle => "oracle",
        }
    }
}

/// Failure classes mapped onto exit codes.
enum Failure {
    /// Invalid configuration or I/O; exit code 1.
    Error(anyhow::Error),
    /// At least one check failed; exit code 2.
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

impl RunArgs {
    fn dso_config(&self) -> ModelConfig {
        let ModelConfig::Dso { params: d, l1, l2 } = ModelConfig::default_dso() else {
            unreachable!()
        };
        ModelConfig::Dso {
            params: DsoParams {
                dim: self.dim.unwrap_or(d.dim),
                split: self.split.unwrap_or(d.split),
                c1: self.c1.unwrap_or(d.c1),
                c2: self.c2.unwrap_or(d.c2),
                omega: self.omega.unwrap_or(d.omega),
                hbar: self.hbar.unwrap_or(d.hbar),
            },
            l1: self.l1.unwrap_or(l1),
            l2: self.l2.unwrap_or(l2),
        }
    }

    fn kc_config(&self) -> ModelConfig {
        let ModelConfig::Kc { params: k, l, gamma } = ModelConfig::default_kc() else {
            unreachable!()
        };
        ModelConfig::Kc {
            params: KcParams {
                dim: self.dim.unwrap_or(k.dim),
                c0: self.c0.unwrap_or(k.c0),
                c1: self.c1.unwrap_or(k.c1),
                c2: self.c2.unwrap_or(k.c2),
                hbar: self.hbar.unwrap_or(k.hbar),
            },
            l: self.l.unwrap_or(l),
            gamma: self.gamma.unwrap_or(gamma),
        }
    }

    /// Flags that belong to the other model are rejected rather than ignored.
    fn check_flags(&self, choice: ModelChoice) -> Result<()> {
        let dso_only = [("n", self.split.is_some()), ("omega", self.omega.is_some()), ("l1", self.l1.is_some()), ("l2", self.l2.is_some())];
        let kc_only = [("c0", self.c0.is_some()), ("l", self.l.is_some()), ("gamma", self.gamma.is_some())];
        let foreign: &[(&str, bool)] = match choice {
            ModelChoice::Dso => &kc_only,
            ModelChoice::Kc => &dso_only,
            ModelChoice::All => &[],
        };
        if let Some((flag, _)) = foreign.iter().find(|(_, set)| *set) {
            return Err(anyhow!("--{flag} does not apply to this model"));
        }
        Ok(())
    }

    fn suite(&self) -> Result<SuiteConfig> {
        let d = SuiteConfig::default();
        let mutation = match &self.mutate {
            None => None,
            Some(v) => {
                let target: MutationTarget = v[0].parse()?;
                let delta: f64 = v[1].parse().with_context(|| format!("invalid mutation delta {:?}", v[1]))?;
                if !delta.is_finite() {
                    return Err(anyhow!("mutation delta must be finite"));
                }
                Some(Mutation::new(target, delta))
            }
        };
        let suite = SuiteConfig {
            max_level: self.max_level.unwrap_or(d.max_level),
            p_max: self.pmax.unwrap_or(d.p_max),
            grid_points: self.grid_points.unwrap_or(d.grid_points),
            r_max: self.rmax,
            mutation,
            ..d
        };
        suite.validate()?;
        Ok(if self.refine { suite.refined() } else { suite })
    }
}

fn run_one(kind: Kind, cfg: &ModelConfig, suite: &SuiteConfig, timing: bool) -> Result<ReportDocument> {
    let start = Instant::now();
    let mut doc = ReportDocument::new(kind.name(), cfg, suite)?;
    match kind {
        Kind::Spectrum => {}
        Kind::Verify => doc.checks = verify_suite(cfg, suite)?,
        Kind::Oracle => {
            doc.checks = oracle_suite(cfg, suite)?;
            doc.oracle = Some(oracle_table(cfg, suite)?);
        }
    }
    if timing {
        doc.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(doc)
}

fn execute(kind: Kind, choice: ModelChoice, args: &RunArgs) -> Result<(), Failure> {
    args.check_flags(choice)?;
    let suite = args.suite()?;
    let configs = match choice {
        ModelChoice::Dso => vec![args.dso_config()],
        ModelChoice::Kc => vec![args.kc_config()],
        ModelChoice::All => vec![args.dso_config(), args.kc_config()],
    };
    for cfg in &configs {
        cfg.validate().with_context(|| format!("invalid {} configuration", cfg.model()))?;
    }
    let reports = configs
        .iter()
        .map(|cfg| run_one(kind, cfg, &suite, !args.no_timing))
        .collect::<Result<Vec<_>>>()?;
    let rendered = match args.format {
        Format::Json => report::to_json(&reports)?,
        Format::Csv => report::to_csv(&reports)?,
        Format::Text => report::to_text(&reports),
    };
    match &args.out {
        Some(path) => fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    let failures: Vec<_> = reports.iter().flat_map(|r| r.failures()).collect();
    for c in &failures {
        match &c.witness {
            Some(w) => eprintln!("FAIL {} (residual {:.3e}) at {w}", c.name, c.max_residual),
            None => eprintln!("FAIL {} (residual {:.3e})", c.name, c.max_residual),
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (kind, choice, args) = match &cli.command {
        Command::Dso { action } | Command::Kc { action } => {
            let choice = if matches!(cli.command, Command::Dso { .. }) { ModelChoice::Dso } else { ModelChoice::Kc };
            match action {
                Action::Spectrum(a) => (Kind::Spectrum, choice, a),
                Action::Verify(a) => (Kind::Verify, choice, a),
                Action::Oracle(a) => (Kind::Oracle, choice, a),
            }
        }
        Command::Verify { model, run } => (Kind::Verify, *model, run),
        Command::Oracle { model, run } => (Kind::Oracle, *model, run),
    };
    match execute(kind, choice, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Checks) => ExitCode::from(2),
    }
}
