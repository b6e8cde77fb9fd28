use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abc_critic::experiments::{load_config, run, ExperimentKind};

const USAGE: &str = "\
usage:
  abc-critic run <config> [--seed S] [--n N] [--out DIR]
  abc-critic list

Runs the experiment described by a flat `key = value` config file and
writes results.csv plus manifest.txt into the output directory. Exit
codes: 0 success, 2 config error, 3 runtime error.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("list") => {
            for kind in ExperimentKind::ALL {
                println!("{:<18} {}", kind.name(), kind.describe());
            }
            ExitCode::SUCCESS
        }
        Some("run") => run_command(&args[1..]),
        Some("--help") | Some("-h") | Some("help") => {
            print!("{USAGE}");
            ExitCode::SUCCESS
        }
        _ => {
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}

fn run_command(args: &[String]) -> ExitCode {
    let mut config_path: Option<PathBuf> = None;
    let mut seed: Option<u64> = None;
    let mut proposals: Option<u64> = None;
    let mut out: Option<PathBuf> = None;

    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--seed" => match iter.next().map(|v| v.parse::<u64>()) {
                Some(Ok(v)) => seed = Some(v),
                _ => return usage_error("--seed expects an unsigned integer"),
            },
            "--n" => match iter.next().map(|v| v.parse::<u64>()) {
                Some(Ok(v)) if v >= 1 => proposals = Some(v),
                _ => return usage_error("--n expects a positive integer"),
            },
            "--out" => match iter.next() {
                Some(v) => out = Some(PathBuf::from(v)),
                None => return usage_error("--out expects a directory"),
            },
            flag if flag.starts_with('-') => {
                return usage_error(&format!("unknown flag `{flag}`"));
            }
            path => {
                if config_path.replace(PathBuf::from(path)).is_some() {
                    return usage_error("expected exactly one config path");
                }
            }
        }
    }

    let Some(config_path) = config_path else {
        return usage_error("missing config path");
    };
    match execute(&config_path, seed, proposals, out) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("abc-critic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(
    config_path: &Path,
    seed: Option<u64>,
    proposals: Option<u64>,
    out: Option<PathBuf>,
) -> Result<PathBuf, abc_critic::experiments::ExperimentError> {
    let mut cfg = load_config(config_path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(n) = proposals {
        cfg.proposals = n;
    }
    if let Some(out) = out {
        cfg.out_dir = out;
    }
    run(&cfg)
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("abc-critic: {message}");
    eprint!("{USAGE}");
    ExitCode::from(2)
}
