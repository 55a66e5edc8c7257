//! Command-line scenario runner: emits self-describing CSV artifacts.

mod commands;
mod compare;
mod error;
mod output;
mod scenarios;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_decay::model::{params_from_map, parse_kv};
use dirac_decay::ModelParams;

use crate::error::CliError;
use crate::output::{Sink, Table};

#[derive(Debug, Parser)]
#[command(name = "dirac-decay", version, about = "Decay of a two-level system in a Dirac bath")]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,
    /// Artifact directory (tables go to stdout when absent, except for `run`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Model parameters: a key=value file overridden by individual flags.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// key=value file with omega0, g, m, lambda, hbar.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    omega0: Option<f64>,
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Momentum cutoff: a number or `inf`.
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<ModelParams, CliError> {
        let mut map = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_kv(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        set("omega0", self.omega0.map(|v| v.to_string()));
        set("g", self.g.map(|v| v.to_string()));
        set("m", self.m.map(|v| v.to_string()));
        set("lambda", self.lambda.clone());
        set("hbar", self.hbar.map(|v| v.to_string()));
        Ok(params_from_map(&map)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurvivalMethod {
    Volterra,
    Bromwich,
    Spectral,
    Series,
    Discretized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WaveMethod {
    /// Laplace-domain inversion in the regime's natural form.
    Numeric,
    /// Closed-form time-evolving resonant state (massless, no cutoff).
    Massless,
    /// Time-domain convolution (massless with cutoff).
    TimeDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarkovCheck {
    Semigroup,
    Zeno,
    Gksl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Memory kernel K(t) on (0, t_max].
    Kernel {
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Force momentum quadrature instead of the closed form.
        #[arg(long)]
        quadrature: bool,
    },
    /// Amplitude Φ(t) and survival probability P(t).
    Survival {
        #[arg(long, value_enum, default_value_t = SurvivalMethod::Volterra)]
        method: SurvivalMethod,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        /// Output step (also the solver step for volterra and discretized).
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Truncation order of the short-time series.
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Use the nominal series coefficients instead of the corrected ones.
        #[arg(long)]
        nominal: bool,
        /// Bath modes for the discretized propagator.
        #[arg(long, default_value_t = 2000)]
        modes: usize,
    },
    /// Principal-sheet poles and residues.
    Poles,
    /// e^{−|x₁−x₂|} over a grid of (ω₀/g², Λ/g²).
    Crossover {
        #[arg(long, default_value_t = 0.5)]
        w_min: f64,
        #[arg(long, default_value_t = 15.0)]
        w_max: f64,
        #[arg(long, default_value_t = 30)]
        nw: usize,
        #[arg(long, default_value_t = 0.5)]
        l_min: f64,
        #[arg(long, default_value_t = 10.0)]
        l_max: f64,
        #[arg(long, default_value_t = 20)]
        nl: usize,
    },
    /// Environment wave function ψ(t, x) on [−2t, 2t].
    Wavefunction {
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = WaveMethod::Numeric)]
        method: WaveMethod,
        /// Grid points per quarter of [−2t, 2t] (multiple of 4).
        #[arg(long, default_value_t = 512)]
        per_segment: usize,
    },
    /// Survival probability of the waveguide coupled to an SSH ring.
    Ssh {
        #[command(flatten)]
        chain: SshArgs,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
    },
    /// P(l) for several |t₁ − t₂| at fixed t₁ + t₂.
    SshSweep {
        #[command(flatten)]
        chain: SshArgs,
        /// t₁ + t₂.
        #[arg(long, default_value_t = 0.36)]
        sum: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.001,0.0025")]
        deltas: Vec<f64>,
    },
    /// Markovianity diagnostics.
    Markov {
        #[arg(long, value_enum)]
        check: MarkovCheck,
        /// Times at which the composition law is tested.
        #[arg(long, value_delimiter = ',', default_value = "1,2,5")]
        times: Vec<f64>,
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        /// Total protocol time for zeno.
        #[arg(long, default_value_t = 1.0)]
        t_total: f64,
        /// Largest measurement count (powers of two up to this).
        #[arg(long, default_value_t = 1024)]
        n_max: usize,
        /// Decay rate α for the gksl reference forms.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Oscillation frequency β for the gksl conjugate pair.
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
    },
    /// Reproduce a named scenario into the artifact directory.
    Run {
        /// fig4, fig5, fig8, fig9, fig10, fig11, fig12, fig13 or table1.
        scenario: String,
    },
    /// Cross-check amplitudes from several methods.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "volterra,bromwich,spectral,closed")]
        methods: Vec<String>,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 30)]
        n: usize,
        /// Solver step for volterra.
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
    },
}

/// Ring geometry shared by the SSH subcommands; --g and --omega0 default to
/// 0.136 and 0.01 here.
#[derive(Debug, Clone, Args)]
pub struct SshArgs {
    #[arg(long, default_value_t = 2000)]
    cells: usize,
    #[arg(long, default_value_t = 150.0)]
    lmax: f64,
    #[arg(long, default_value_t = 0.5)]
    dl: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let sink = cli.out.clone().map(Sink::Dir).unwrap_or(Sink::Stdout);
    let invocation = invocation(std::env::args().skip(1));
    let mut tables = match cli.command {
        Command::Kernel { t_max, n, quadrature } => {
            vec![commands::kernel(&cli.params.resolve()?, t_max, n, quadrature)?]
        }
        Command::Survival { method, t_max, dt, order, nominal, modes } => {
            let p = cli.params.resolve()?;
            vec![commands::survival(&p, method, t_max, dt, order, nominal, modes)?]
        }
        Command::Poles => vec![commands::poles(&cli.params.resolve()?)?],
        Command::Crossover { w_min, w_max, nw, l_min, l_max, nl } => {
            vec![commands::crossover((w_min, w_max, nw), (l_min, l_max, nl))?]
        }
        Command::Wavefunction { t, method, per_segment } => {
            vec![commands::wavefunction(&cli.params.resolve()?, t, method, per_segment)?]
        }
        Command::Ssh { chain, t1, t2 } => vec![commands::ssh(&chain, &cli.params, t1, t2)?],
        Command::SshSweep { chain, sum, deltas } => {
            vec![commands::ssh_sweep(&chain, &cli.params, sum, &deltas)?]
        }
        Command::Markov { check, times, dt, t_total, n_max, alpha, beta } => {
            let p = cli.params.resolve()?;
            vec![match check {
                MarkovCheck::Semigroup => commands::semigroup(&p, &times, dt)?,
                MarkovCheck::Zeno => commands::zeno(&p, t_total, n_max)?,
                MarkovCheck::Gksl => commands::gksl(alpha, beta)?,
            }]
        }
        Command::Run { scenario } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("artifacts"));
            let mut tables = scenarios::run_scenario(&scenario)?;
            stamp(&mut tables, &invocation);
            for path in Sink::Dir(dir).emit(&tables)? {
                println!("{}", path.display());
            }
            return Ok(());
        }
        Command::Compare { methods, t_max, n, dt } => {
            let p = cli.params.resolve()?;
            let (table, breach) = compare::compare_oracles(&p, t_max, n, dt, &methods)?;
            let mut tables = [table];
            stamp(&mut tables, &invocation);
            sink.emit(&tables)?;
            return match breach {
                Some(msg) => Err(CliError::Tolerance(msg)),
                None => Ok(()),
            };
        }
    };
    stamp(&mut tables, &invocation);
    sink.emit(&tables)?;
    Ok(())
}

/// Command-line arguments without the output location, shell-quoted where needed.
fn invocation<I: Iterator<Item = String>>(args: I) -> String {
    let mut kept = Vec::new();
    let mut skip_next = false;
    for a in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if a == "--out" {
            skip_next = true;
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        if a.is_empty() || a.contains(|c: char| c.is_whitespace() || c == '\'' || c == '"') {
            kept.push(format!("'{}'", a.replace('\'', "'\\''")));
        } else {
            kept.push(a);
        }
    }
    kept.join(" ")
}

fn stamp(tables: &mut [Table], invocation: &str) {
    for t in tables {
        t.meta("invocation", invocation);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error code={} exit={} message={}", e.code(), e.exit_code(), e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
