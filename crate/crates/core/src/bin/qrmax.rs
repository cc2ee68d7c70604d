use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qrmax::cli::{emit_outputs, fmt_sig, run_experiment, threads_from_env, with_threads, ExperimentConfig, Subcommand};

/// Build quasiregular maps with a prescribed maximum modulus set and verify them.
#[derive(Parser)]
#[command(name = "qrmax", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: output.dir from the config, else the config's directory)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qrmax: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> qrmax::Result<bool> {
    let config = ExperimentConfig::from_path(&args.config)?;
    let base = args.config.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    let base = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
    let mut report = with_threads(threads_from_env(), || run_experiment(&config, args.subcommand, Some(&base)))??;
    let dir = match (&args.out_dir, &config.output.dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => base.join(d),
        (None, None) => base.clone(),
    };
    let out = emit_outputs(&mut report, &dir)?;
    for s in &report.suites {
        let verdict = if s.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: measured {} bound {}", s.name, fmt_sig(s.measured), fmt_sig(s.bound));
    }
    println!("report: {}", out.json.display());
    Ok(report.passed)
}
