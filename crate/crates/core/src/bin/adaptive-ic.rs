//! Command-line front end of the experiment harness.
//!
//! Exit status: 0 when no run produced a wrong output within the noise
//! budget, 1 otherwise, 2 on usage or configuration errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use adaptive_ic::harness::{stream_csv, Experiment, ExperimentConfig};
use clap::{CommandFactory, Parser};

#[derive(Parser, Debug)]
#[command(name = "adaptive-ic", version, about = "Run noise-resilience experiments and report one CSV row per run")]
struct Cli {
    /// one_third, two_thirds, br_half, shared_rand, shared_rand_erasure or sample_full
    #[arg(long)]
    protocol: Option<String>,
    /// none, random:P, delete:P, midpoint, rolling or enumerate:W
    #[arg(long)]
    adversary: Option<String>,
    /// Expected channel model: term, abort or adp
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Depth of the emulated protocol tree
    #[arg(long)]
    depth: Option<usize>,
    /// Field size of the one_third code
    #[arg(long)]
    field: Option<u32>,
    #[arg(long)]
    c_n: Option<f64>,
    #[arg(long)]
    r_max: Option<usize>,
    /// Fixed input of Alice
    #[arg(long)]
    x: Option<u64>,
    /// Fixed input of Bob
    #[arg(long)]
    y: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Noise-rate budget for the within_budget column
    #[arg(long)]
    threshold: Option<f64>,
    /// JSON config; its fields override the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print pass/fail counts
    #[arg(long)]
    summary: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    ExitCode::from(2)
}

fn config_from(cli: Cli) -> Result<ExperimentConfig, String> {
    let mut flags = serde_json::Map::new();
    let mut set = |key: &str, v: serde_json::Value| {
        if !v.is_null() {
            flags.insert(key.to_string(), v);
        }
    };
    set("protocol", cli.protocol.into());
    set("adversary", cli.adversary.into());
    set("model", cli.model.into());
    set("epsilon", cli.epsilon.into());
    set("n", cli.n.into());
    set("k", cli.k.into());
    set("depth", cli.depth.into());
    set("field", cli.field.into());
    set("c_n", cli.c_n.into());
    set("r_max", cli.r_max.into());
    set("x", cli.x.into());
    set("y", cli.y.into());
    set("trials", cli.trials.into());
    set("seed", cli.seed.into());
    set("threshold", cli.threshold.into());
    set("out", cli.out.map(|p| p.display().to_string()).into());
    if cli.summary {
        set("summary", true.into());
    }
    if let Some(path) = cli.config {
        let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let file: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
        flags.extend(file);
    }
    if !flags.contains_key("protocol") {
        return Err("--protocol is required".into());
    }
    serde_json::from_value(flags.into()).map_err(|e| format!("invalid configuration: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let config = match config_from(cli) {
        Ok(c) => c,
        Err(msg) => return usage_error(msg),
    };
    let experiment = match Experiment::new(&config) {
        Ok(e) => e,
        Err(e) => return usage_error(e),
    };
    let summary = match &config.out {
        Some(path) => std::fs::File::create(path)
            .map_err(Into::into)
            .and_then(|f| stream_csv(&experiment, std::io::BufWriter::new(f))),
        None => stream_csv(&experiment, std::io::stdout().lock()),
    };
    let summary = match summary {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if config.summary {
        if config.out.is_some() {
            println!("{summary}");
        } else {
            eprintln!("{summary}");
        }
    }
    let _ = std::io::stdout().flush();
    if summary.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
