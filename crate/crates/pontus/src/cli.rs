//! Command-line flags. Each flag maps onto one config field and overrides it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    IntegratorSection, ModelSection, OutputSection, ProtocolSection, RunConfig, SpectrumSection, SweepSection,
};

#[derive(Debug, Parser)]
#[command(
    name = "pontus",
    version,
    about = "Relaxation of a lossy atom-cavity system under one- and two-step quenches"
)]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the dynamical matrix over a range of kappa/g.
    Spectrum(SpectrumArgs),
    /// Time series of one protocol run.
    Simulate(RunArgs),
    /// Single-step vs two-step comparison at t*, as JSON.
    Compare(CompareArgs),
    /// Speed-up verdicts over a 2-D parameter grid.
    PhaseDiagram(PhaseArgs),
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub g: Option<f64>,
    /// Cavity loss of the final stage, in units of g.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Cavity loss of the first stage of a two-step run, in units of g.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<f64>,
    /// Atomic decay rate, in units of g.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Atom-cavity detuning, in units of g.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Thermal photon number of the cavity bath.
    #[arg(long, allow_hyphen_values = true)]
    pub n_th: Option<f64>,
    /// Thermal excitation of the atomic bath.
    #[arg(long, allow_hyphen_values = true)]
    pub n_th_atom: Option<f64>,
    /// Excitation cap N.
    #[arg(long)]
    pub n: Option<usize>,
    /// auto, single-excitation, n-manifold or thermal-restricted.
    #[arg(long)]
    pub generator: Option<String>,
}

impl ModelArgs {
    fn section(&self) -> ModelSection {
        ModelSection {
            g: self.g,
            kappa: self.kappa,
            kappa1: self.kappa1,
            gamma: self.gamma,
            delta: self.delta,
            n_th: self.n_th,
            n_th_atom: self.n_th_atom,
            n: self.n,
            generator: self.generator.clone(),
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct ProtocolArgs {
    /// single-step or two-step.
    #[arg(long = "protocol")]
    pub kind: Option<String>,
    /// Switching time in units of 1/g (default pi/(2 sqrt N)).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// End of the run in units of 1/g.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of uniform samples on [0, t_max].
    #[arg(long)]
    pub samples: Option<usize>,
    /// stationary or ground.
    #[arg(long)]
    pub reference: Option<String>,
    /// Observation time in units of 1/g.
    #[arg(long)]
    pub t_star: Option<f64>,
}

impl ProtocolArgs {
    fn section(&self) -> ProtocolSection {
        ProtocolSection {
            kind: self.kind.clone(),
            tau: self.tau,
            t_max: self.t_max,
            samples: self.samples,
            reference: self.reference.clone(),
            t_star: self.t_star,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct IntegratorArgs {
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

impl IntegratorArgs {
    fn section(&self) -> IntegratorSection {
        IntegratorSection { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_steps: self.max_steps }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output file (default stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write the single-step time series here.
    #[arg(long)]
    pub single_csv: Option<PathBuf>,
    /// Also write the two-step time series here.
    #[arg(long)]
    pub two_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// tau_over_tau0, delta_over_g, gamma_over_g or kappa1_over_g.
    #[arg(long)]
    pub x_axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub x_steps: Option<usize>,
    #[arg(long)]
    pub y_axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub y_steps: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "PONTUS_WORKERS")]
    pub workers: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            model: self.model.section(),
            protocol: self.protocol.section(),
            integrator: self.integrator.section(),
            output: OutputSection { path: self.out.clone(), ..Default::default() },
            ..Default::default()
        }
    }
}

impl Command {
    /// The config fields set on the command line.
    pub fn flag_config(&self) -> RunConfig {
        match self {
            Command::Spectrum(a) => RunConfig {
                model: ModelSection { g: a.g, ..Default::default() },
                spectrum: SpectrumSection { kappa_min: a.kappa_min, kappa_max: a.kappa_max, steps: a.steps },
                output: OutputSection { path: a.out.clone(), ..Default::default() },
                ..Default::default()
            },
            Command::Simulate(a) => a.config(),
            Command::Compare(a) => {
                let mut cfg = a.run.config();
                cfg.output.single_csv = a.single_csv.clone();
                cfg.output.two_csv = a.two_csv.clone();
                cfg
            }
            Command::PhaseDiagram(a) => RunConfig {
                sweep: SweepSection {
                    x_axis: a.x_axis.clone(),
                    x_min: a.x_min,
                    x_max: a.x_max,
                    x_steps: a.x_steps,
                    y_axis: a.y_axis.clone(),
                    y_min: a.y_min,
                    y_max: a.y_max,
                    y_steps: a.y_steps,
                    workers: a.workers,
                },
                ..a.run.config()
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Simulate(_) => "simulate",
            Command::Compare(_) => "compare",
            Command::PhaseDiagram(_) => "phase-diagram",
        }
    }
}
