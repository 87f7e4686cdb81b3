//! `lrvar` subcommands.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lrvar_core::changepoint::{hl_test, TwoSample};
use lrvar_core::sim::{simulate_arma, ArmaSpec, SimConfig, DEFAULT_BURN_IN};
use lrvar_core::study::{evaluate, EstimatorId};
use serde::Serialize;

use crate::config::{parse_smoothing, StudyConfig};
use crate::harness::run_experiment;
use crate::io::{format_significant, read_series_file, write_results, write_series};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "lrvar",
    version,
    about = "Long-run variance estimation and Monte Carlo studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a Gaussian ARMA(1,1) path as a one-column CSV.
    Simulate(SimulateArgs),
    /// Apply one estimator to a series CSV.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo study from a config file.
    Study(StudyArgs),
    /// Studentized two-sample Hodges–Lehmann test.
    Hltest(HlTestArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub ar: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub ma: f64,
    /// Innovation standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub sd: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Series CSV with a header row.
    pub input: PathBuf,
    #[arg(long)]
    pub estimator: EstimatorId,
    /// Block length, bandwidth, or `adaptive`.
    #[arg(long)]
    pub param: String,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// TOML or JSON study config (the bundled reference design when omitted).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Overrides every experiment's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (all cores when omitted).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HlTestArgs {
    /// First sample (CSV).
    pub x: PathBuf,
    /// Second sample (CSV).
    pub y: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct HlTestReport {
    pub n1: usize,
    pub n2: usize,
    pub q: f64,
    pub sigma_f_hat: f64,
    pub block_length_x: usize,
    pub block_length_y: usize,
    pub h_prime_0: f64,
    pub statistic: f64,
    pub p_value: f64,
}

/// Runs a parsed command; the returned value is the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Study(a) => study(a),
        Command::Hltest(a) => hltest(a),
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn simulate(a: SimulateArgs) -> Result<i32> {
    let spec = ArmaSpec::new(a.ar, a.ma, a.sd)?;
    let cfg = SimConfig::new(a.n, a.burn_in, a.seed)?;
    let series = simulate_arma(&spec, &cfg);
    write_series(open_output(a.out.as_ref())?, &series)?;
    Ok(0)
}

fn estimate(a: EstimateArgs) -> Result<i32> {
    let series = read_series_file(&a.input)?;
    let smoothing = match parse_smoothing(a.estimator, &a.param) {
        Ok(s) => s,
        Err(msg) => bail!("invalid --param: {msg}"),
    };
    let e = evaluate(&series, a.estimator, smoothing)?;
    println!("{}", format_significant(e.value, 12));
    Ok(0)
}

fn study(a: StudyArgs) -> Result<i32> {
    let (mut config, config_path) = match &a.config {
        Some(p) => (StudyConfig::load(p)?, p.display().to_string()),
        None => (
            StudyConfig::reference(),
            "<bundled reference design>".to_string(),
        ),
    };
    if let Some(seed) = a.seed {
        for e in &mut config.experiments {
            e.master_seed = seed;
        }
    }
    let experiments = config.resolve()?;
    let master_seed = a.seed.unwrap_or(experiments[0].master_seed);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = a.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build()?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut manifest = RunManifest::new(config_path, &config, master_seed);
    for exp in &experiments {
        let outcomes = pool.install(|| run_experiment(exp));
        let mut records = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            match o {
                Ok(r) => records.push(r),
                Err(e) => {
                    eprintln!("{}: {e}", exp.name);
                    manifest.cell_errors.push(format!("{}: {e}", exp.name));
                }
            }
        }
        let file = format!("{}.csv", exp.name);
        let path = a.out.join(&file);
        write_results(
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            &records,
        )?;
        manifest.outputs.push(file);
    }
    let manifest_path = a.out.join("manifest.json");
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )
    .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(if manifest.cell_errors.is_empty() {
        0
    } else {
        3
    })
}

fn hltest(a: HlTestArgs) -> Result<i32> {
    let x = read_series_file(&a.x)?;
    let y = read_series_file(&a.y)?;
    let r = hl_test(&TwoSample::new(x, y))?;
    let report = HlTestReport {
        n1: r.n1,
        n2: r.n2,
        q: r.q,
        sigma_f_hat: r.sigma_f_hat,
        block_length_x: r.block_length_x,
        block_length_y: r.block_length_y,
        h_prime_0: r.h_prime_0,
        statistic: r.statistic,
        p_value: r.p_value,
    };
    let mut out = open_output(a.out.as_ref())?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}
