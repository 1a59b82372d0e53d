use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holodual_cli::{emit_report, run_suite, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "holodual",
    version,
    about = "Numerical and exact checks of Bochner-Martinelli duality on balls in C^n"
)]
struct Cli {
    #[command(subcommand)]
    suite: Suite,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Clone, Copy)]
enum Suite {
    /// Harmonic bases, dimension table and Kelvin extensions
    Harmonics,
    /// Reproduction inside the ball and vanishing outside
    Reproduce,
    /// Exterior potentials of CR and non-CR traces
    CrTest,
    /// Jump of the potential across the sphere
    Jump,
    /// Annihilator table, contour independence, sesquilinearity
    Pairing,
    /// The unit-ball example: contrast rows and the energy identity
    BallExample,
    /// Dirichlet extensions, the Hermitian form and the projection
    Dirichlet,
    /// Search for annihilating functionals
    DensityProbe,
    /// Every suite in order
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Harmonics => "harmonics",
            Suite::Reproduce => "reproduce",
            Suite::CrTest => "cr-test",
            Suite::Jump => "jump",
            Suite::Pairing => "pairing",
            Suite::BallExample => "ball-example",
            Suite::Dirichlet => "dirichlet",
            Suite::DensityProbe => "density-probe",
            Suite::All => "all",
        }
    }
}

#[derive(clap::Args)]
struct Options {
    /// Flat `key = value` configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    rmax: Option<u32>,
    #[arg(long, global = true)]
    smax: Option<u32>,
    #[arg(long, global = true)]
    qmax: Option<u32>,
    /// `AxBxC` for n = 2, a point count otherwise
    #[arg(long, global = true)]
    resolution: Option<String>,
    #[arg(long, global = true)]
    tol_reproduction: Option<f64>,
    #[arg(long, global = true)]
    tol_pairing: Option<f64>,
    #[arg(long, global = true)]
    tol_jump: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat refused checks as failures for the exit status
    #[arg(long, global = true)]
    strict: bool,
    /// Print the effective configuration and exit
    #[arg(long, global = true)]
    print_config: bool,
}

impl Options {
    fn resolve(&self) -> Result<RunConfig, holodual_cli::CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v; })*
            };
        }
        set!(n => n, radius => radius, rmax => r_max, smax => s_max, qmax => q_max, resolution => resolution,
             tol_reproduction => tol_reproduction, tol_pairing => tol_pairing, tol_jump => tol_jump, seed => seed);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.strict |= self.strict;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.opts.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("holodual: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.opts.print_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    let report = match run_suite(cli.suite.name(), &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("holodual: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit_report(&report, cli.opts.format, cfg.out.as_deref()) {
        eprintln!("holodual: {e}");
        return ExitCode::from(2);
    }
    if cfg.out.is_some() || cli.opts.format != Format::Human {
        let s = &report.summary;
        eprintln!("{}: {} passed, {} failed, {} refused", report.suite, s.passed, s.failed, s.refused);
    }
    ExitCode::from(report.exit_code(cfg.strict) as u8)
}
