use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use transmon_cli::{load_config, run_experiment, CliError, Experiment, RunConfig};
use transmon_core::Variant;

const OUT_DIR_ENV: &str = "TRANSMON_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "transmon-sim", version, about = "Transmon-resonator model hierarchy experiments")]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,

    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory. Falls back to the config, then $TRANSMON_OUT_DIR, then ./out.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for parallel sweeps (the benchmark always runs serially).
    #[arg(long)]
    threads: Option<usize>,

    /// Restrict the run to these models; repeatable.
    #[arg(long = "model", value_parser = parse_variant)]
    models: Vec<Variant>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: transmon_core::Error| e.to_string())
}

fn resolve(args: &Args) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if !args.models.is_empty() {
        cfg.models = args.models.clone();
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    cfg.output_dir = Some(out.clone());
    Ok((cfg, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = resolve(&args).and_then(|(cfg, out)| run_experiment(args.experiment, &cfg, &out));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
