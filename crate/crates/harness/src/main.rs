use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use latwave::dispersion::{alpha_norm, arcsin_argument, beta, beta_semidiscrete};
use latwave::lattice::Domain;
use latwave::leapfrog::{scheme_residual, solve_horizon, DiscreteProblem, Record};
use latwave_harness::config::{ExperimentConfig, ExperimentId};
use latwave_harness::experiments::run_experiment;
use latwave_harness::HarnessError;

#[derive(Parser)]
#[command(name = "latwave", version, about = "Lattice wave-equation solver and convergence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheme over [−T, T] for a configuration and write the end levels.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the discrete, semidiscrete and continuum frequencies of a plane wave.
    Dispersion {
        /// Comma-separated wave vector.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        dx: f64,
        #[arg(long)]
        dt: f64,
    },
    /// Run a named experiment (E1..E8).
    Experiment {
        id: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        n: Option<u8>,
    },
    /// Audit the propagator bound and the degeneration chain.
    AuditBounds {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        n: Option<u8>,
    },
}

enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Lattice(_) => Failure::Config(e.into()),
            other => Failure::Run(other.into()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("HARNESS_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Failure::Config(anyhow::anyhow!("HARNESS_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Config(e.into()))?;
    }
    Ok(())
}

fn experiment(id: &str, config: Option<PathBuf>, out: Option<PathBuf>, levels: Option<usize>, n: Option<u8>) -> Result<bool, Failure> {
    let id: ExperimentId = id.parse()?;
    let mut cfg = match config {
        Some(path) => {
            let cfg = ExperimentConfig::load(&path)?;
            if cfg.experiment != id {
                return Err(Failure::Config(anyhow::anyhow!("{} configures {}, not {id}", path.display(), cfg.experiment)));
            }
            cfg
        }
        None => ExperimentConfig::default_for(id, n.unwrap_or(1) as usize),
    };
    if let Some(n) = n {
        if n as usize != cfg.n {
            return Err(Failure::Config(anyhow::anyhow!("--n {n} conflicts with n = {} in the configuration", cfg.n)));
        }
    }
    if let Some(l) = levels {
        cfg.lattice.levels = l;
    }
    if out.is_some() {
        cfg.out = out;
    }
    cfg.validate()?;
    let outcome = run_experiment(&cfg)?;
    print!("{}", outcome.summary());
    Ok(outcome.passed())
}

fn solve(config: PathBuf, out: Option<PathBuf>) -> Result<bool, Failure> {
    let cfg = ExperimentConfig::load(&config)?;
    let spec = cfg.base_spec()?;
    spec.require_admissible().map_err(HarnessError::from)?;
    let domain = cfg.domain.clone().unwrap_or(Domain::FullSpace {
        lower: vec![-cfg.window; cfg.n],
        upper: vec![cfg.window; cfg.n],
    });
    let d = &cfg.data;
    let problem = DiscreteProblem::from_data(&domain, spec, &d.f, &d.g, &d.h, d.w.clone()).map_err(HarnessError::from)?;
    let field = solve_horizon(&problem, &Record::Window).map_err(HarnessError::from)?;
    let steps = spec.steps().unwrap_or(0) as i64;
    let residual = scheme_residual(&problem, &field).map_err(HarnessError::from)?;
    println!(
        "solved {} points over {} levels; sup |v(T)| = {:.6e}, sup |v(−T)| = {:.6e}, scheme residual {:.3e}",
        problem.classification.interior().len() + problem.classification.boundary().len(),
        2 * steps + 1,
        field.sup_norm(steps).map_err(HarnessError::from)?,
        field.sup_norm(-steps).map_err(HarnessError::from)?,
        residual
    );
    if let Some(dir) = out.or(cfg.out.clone()) {
        std::fs::create_dir_all(&dir).with_context(|| dir.display().to_string()).map_err(Failure::Run)?;
        for p in [-steps, 0, steps] {
            let path = dir.join(format!("level_{p}.bin"));
            let mut file = std::fs::File::create(&path).with_context(|| path.display().to_string()).map_err(Failure::Run)?;
            field
                .dump_level(p, &mut file)
                .with_context(|| path.display().to_string())
                .map_err(Failure::Run)?;
        }
        println!("wrote snapshots to {}", dir.display());
    }
    Ok(true)
}

fn dispersion(alpha: Vec<f64>, dx: f64, dt: f64) -> Result<bool, Failure> {
    if alpha.is_empty() || !(dx > 0.0) || !(dt >= 0.0) {
        return Err(Failure::Config(anyhow::anyhow!("need --alpha, dx > 0 and dt ≥ 0")));
    }
    println!("|alpha|          = {:.16e}", alpha_norm(&alpha));
    println!("beta0 (dt -> 0)  = {:.16e}", beta_semidiscrete(&alpha, dx));
    println!("arcsin argument  = {:.16e}", arcsin_argument(&alpha, dx, dt));
    match beta(&alpha, dx, dt) {
        Ok(b) => {
            println!("beta             = {b:.16e}");
            Ok(true)
        }
        Err(e) => {
            println!("beta             : {e}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Solve { config, out } => solve(config, out),
        Command::Dispersion { alpha, dx, dt } => dispersion(alpha, dx, dt),
        Command::Experiment {
            id,
            config,
            out,
            levels,
            n,
        } => experiment(&id, config, out, levels, n),
        Command::AuditBounds { out, n } => experiment("E8", None, out, None, n),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
