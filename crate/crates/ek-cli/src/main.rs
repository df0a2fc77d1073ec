use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ek_cli::commands::{self, CliError};
use ek_cli::config::{hash_value, ConfigError, PointsFile, RunConfig, Setup};
use ek_cli::{envelope, render};

#[derive(Parser)]
#[command(name = "ek", about = "Fourier coefficients, pullback constants and p-adic families of unitary Eisenstein series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to the config's `output`, then stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "EK_JOBS")]
    jobs: Option<usize>,
    /// p-adic precision, overriding the config.
    #[arg(long, global = true, env = "EK_PREC")]
    prec: Option<i64>,
    /// Seed for the randomized checks of `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Global Fourier coefficients for the enumerated β at every κ.
    Coeff,
    /// Family table and congruence report over a points file.
    Family {
        #[arg(long)]
        points: PathBuf,
    },
    /// Kubota-Leopoldt values and their congruence matrix.
    Kl,
    /// U_p eigenvalues and Klingen eigenvalues.
    Hecke,
    /// p-adic pullback constants, unramified ratios and the ℓ scalar.
    Pullback,
    /// List the enumerated β.
    Enumerate,
    /// Seeded invariant checks.
    Selftest,
}

fn load_setup(g: &Global) -> Result<Setup, CliError> {
    let path = g.config.as_ref().ok_or_else(|| ConfigError::Field { field: "--config".into(), msg: "this command needs a config file".into() })?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(p) = g.prec {
        cfg.prec = p;
    }
    Ok(Setup::new(cfg)?)
}

fn run(cli: &Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let g = &cli.global;
    let (name, setup, extra, result) = match &cli.command {
        Command::Selftest => {
            let prec = g.prec.unwrap_or(8);
            ("selftest", None, None, commands::cmd_selftest(g.seed, prec)?)
        }
        Command::Family { points } => {
            let setup = load_setup(g)?;
            let pts = PointsFile::load(points)?;
            let h = hash_value(&serde_json::to_value(&pts).expect("points serialize"));
            let r = commands::cmd_family(&setup, &pts)?;
            ("family", Some(setup), Some(h), r)
        }
        other => {
            let setup = load_setup(g)?;
            let (name, r) = match other {
                Command::Coeff => ("coeff", commands::cmd_coeff(&setup)?),
                Command::Kl => ("kl", commands::cmd_kl(&setup)?),
                Command::Hecke => ("hecke", commands::cmd_hecke(&setup)?),
                Command::Pullback => ("pullback", commands::cmd_pullback(&setup)?),
                Command::Enumerate => ("enumerate", commands::cmd_enumerate(&setup)?),
                Command::Selftest | Command::Family { .. } => unreachable!(),
            };
            (name, Some(setup), None, r)
        }
    };
    let out = g.out.clone().or_else(|| setup.as_ref().and_then(|s| s.config.output.clone()).map(PathBuf::from));
    let failed = name == "selftest" && result["all_pass"] == false;
    let text = render(&envelope(name, setup.as_ref(), extra, result));
    if failed {
        emit(&text, out.as_ref())?;
        return Err(CliError::Compute("selftest reported failures".into()));
    }
    Ok((text, out))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Write { path: p.display().to_string(), msg: e.to_string() }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.global.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(&cli)).and_then(|(text, out)| emit(&text, out.as_ref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
