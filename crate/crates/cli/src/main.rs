use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thetaconv::{failure_summary, run, write_outcome, Command, DumpKind, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "thetaconv", version, about = "Verify θ-convolution inequalities on polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Volume bound for θ-convolution bodies.
    Thm1(Common),
    /// Ball-body inclusion into super-level sets.
    Thm2 {
        #[command(flatten)]
        common: Common,
        /// Concavity exponent for a single-body cone power.
        #[arg(long)]
        alpha: Option<f64>,
        /// Also check the log-concave inclusion.
        #[arg(long)]
        logconcave: bool,
    },
    /// Mass identity and monotone family of one pair.
    Covariogram(Common),
    /// Polar-projection constant of each body.
    Zhang(Common),
    /// Two-body limit-body bound.
    C1(Common),
    /// Random polytope pairs.
    Fuzz {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        /// Comma-separated subset of thm1,thm2,mass,c1,monotone.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
    },
    /// Radial rows of one star body for plotting.
    DumpBody {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = DumpKind::Theta)]
        kind: DumpKind,
        /// θ for theta bodies, level r for superlevel sets.
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
    },
    /// Run a JSON configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Comma-separated body specs.
    #[arg(long, value_delimiter = ',')]
    bodies: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    theta_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    t_grid: Vec<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    tol_exact: Option<f64>,
    #[arg(long)]
    tol_bisection: Option<f64>,
    #[arg(long)]
    tol_cubature: Option<f64>,
    #[arg(long)]
    tol_extrapolation: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn into_config(self, command: Command) -> RunConfig {
        let mut c = RunConfig {
            command,
            bodies: self.bodies,
            theta_grid: self.theta_grid,
            t_grid: self.t_grid,
            p: self.p,
            directions: self.directions,
            seed: self.seed,
            output: self.out,
            format: self.format,
            jobs: self.jobs,
            ..RunConfig::default()
        };
        let t = &mut c.tolerances;
        t.exact = self.tol_exact.unwrap_or(t.exact);
        t.bisection = self.tol_bisection.unwrap_or(t.bisection);
        t.cubature = self.tol_cubature.unwrap_or(t.cubature);
        t.extrapolation = self.tol_extrapolation.unwrap_or(t.extrapolation);
        c
    }
}

fn config(cli: Cli) -> Result<RunConfig, thetaconv::CliError> {
    Ok(match cli.command {
        Sub::Thm1(c) => c.into_config(Command::Thm1),
        Sub::Thm2 { common, alpha, logconcave } => RunConfig {
            alpha,
            logconcave,
            ..common.into_config(Command::Thm2)
        },
        Sub::Covariogram(c) => c.into_config(Command::Covariogram),
        Sub::Zhang(c) => c.into_config(Command::Zhang),
        Sub::C1(c) => c.into_config(Command::C1),
        Sub::Fuzz { common, dim, pairs, checks } => {
            let mut c = common.into_config(Command::Fuzz);
            c.dim = dim;
            c.pairs = pairs;
            if !checks.is_empty() {
                c.checks = checks;
            }
            c
        }
        Sub::DumpBody { common, kind, theta } => RunConfig {
            kind,
            theta,
            ..common.into_config(Command::DumpBody)
        },
        Sub::Run { config } => RunConfig::from_json_file(&config)?,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("THETACONV_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = config(cli).and_then(|c| {
        log::info!("running {}", c.command.name());
        let outcome = run(&c)?;
        write_outcome(&c, &outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            let failures = failure_summary(&outcome);
            if !failures.is_empty() {
                eprintln!("{} of {} checks failed:", failures.len(), outcome.reports.len());
                for f in &failures {
                    eprintln!("  {f}");
                }
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
