mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use output::{usage, Manifest, UsageError};

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<gracecode::Error>() {
        Some(
            gracecode::Error::Infeasible(_)
            | gracecode::Error::SamplingFailure { .. }
            | gracecode::Error::InvalidParameter(_)
            | gracecode::Error::UnsupportedArity { .. }
            | gracecode::Error::TooLarge(_)
            | gracecode::Error::Mismatch(_)
            | gracecode::Error::Parse { .. },
        ) => 3,
        _ => 1,
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GRACECODE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| usage(format!("GRACECODE_THREADS=`{v}` is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("building the thread pool")?;
    }
    Ok(())
}

/// Swap the value of `--out` in a recorded command line.
fn override_out(args: &mut [String], out: &str) -> Result<()> {
    match args.iter().position(|a| a == "--out") {
        Some(i) if i + 1 < args.len() => {
            args[i + 1] = out.to_string();
            Ok(())
        }
        _ => match args.iter_mut().find(|a| a.starts_with("--out=")) {
            Some(a) => {
                *a = format!("--out={out}");
                Ok(())
            }
            None => Err(usage("manifest command line has no --out".into())),
        },
    }
}

fn execute(argv: Vec<String>, cmd: Command) -> Result<()> {
    let (argv, cmd) = match cmd {
        Command::Replay(r) => {
            let mut recorded = Manifest::load(&r.manifest)?.command_line;
            if let Some(out) = &r.out {
                override_out(&mut recorded, &out.to_string_lossy())?;
            }
            let full = std::iter::once("gracecode".to_string()).chain(recorded.iter().cloned());
            let cli = Cli::try_parse_from(full).map_err(|e| usage(format!("recorded command is invalid: {e}")))?;
            if matches!(cli.command, Command::Replay(_)) {
                return Err(usage("a manifest cannot record a replay".into()));
            }
            (recorded, cli.command)
        }
        c => (argv, c),
    };
    let start = Instant::now();
    let outcome = commands::run(&cmd)?;
    for (path, body) in &outcome.files {
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    let manifest = Manifest {
        command_line: argv,
        spec: serde_json::to_value(&cmd)?,
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: outcome.files.iter().map(|f| f.0.display().to_string()).collect(),
        trials: outcome.trials,
    };
    manifest.write(&outcome.files[0].0)
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let cli = Cli::parse_from(&argv);
    let rest = argv[1..].iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match init_threads().and_then(|()| execute(rest, cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
