use std::path::PathBuf;
use std::process::ExitCode;

use btq_core::cli::{configure_threads, parse_config, run};
use clap::Parser;
use serde_json::Value;

/// Berezin-Toeplitz / Moyal verification runs.
#[derive(Parser)]
#[command(name = "btq", version)]
struct Args {
    /// gram, toeplitz, commutator-scan, star-defect, phi1-probe, norm-scan,
    /// moyal-check, index-check, beta-check or theta.
    command: String,
    /// JSON configuration; defaults apply to omitted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("btq: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        return fail(e);
    }
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format!("cannot read {}: {e}", path.display())),
        },
        None => "{}".to_string(),
    };
    let mut value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return fail(format!("config: {e}")),
    };
    let Some(obj) = value.as_object_mut() else {
        return fail("config: expected a JSON object");
    };
    match obj.get("command").and_then(Value::as_str) {
        Some(c) if c != args.command => {
            return fail(format!("command {:?} disagrees with config command {c:?}", args.command));
        }
        _ => {
            obj.insert("command".into(), Value::String(args.command.clone()));
        }
    }
    let mut cfg = match parse_config(&value.to_string()) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if args.out.is_some() {
        cfg.output_dir = args.out;
    }
    ExitCode::from(run(&cfg) as u8)
}
