//! `lipext` command-line front end.
//!
//! Exit codes: 0 success, 1 negative result (no intersection, failed check), 2 parse or I/O
//! error, 3 invalid input, 4 solver non-convergence or residual above tolerance, 5 enumeration
//! guard, 6 search-box exhaustion.

mod args;
mod commands;
mod io;
mod manifest;

use args::{Cli, Command};
use clap::Parser;
use io::Failure;
use manifest::{ConfigEcho, RunManifest};
use std::path::PathBuf;
use std::time::Instant;

fn run(argv: Vec<String>) -> Result<i32, Failure> {
    let cli = match Cli::try_parse_from(std::iter::once("lipext".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    let g = &cli.global;
    let start = Instant::now();
    let (name, out, default_tol, result) = match &cli.command {
        Command::Replay { manifest } => {
            let m = RunManifest::load(manifest)?;
            return run(m.args);
        }
        Command::Extend(a) => ("extend", a.out.clone(), 1e-6, commands::extend(a, g)),
        Command::Helly(a) => ("helly", a.out.clone(), 1e-9, commands::helly(a, g)),
        Command::Function(a) => ("function", a.out.clone(), 1e-9, commands::function(a, g)),
        Command::Monotone(a) => ("monotone", a.out.clone(), 1e-9, commands::monotone(a, g)),
        Command::Gen(a) => ("gen", a.out.clone(), 1e-9, commands::gen(a, g)),
    };
    let (code, inputs, failure) = match result {
        Ok(o) => (o.code, o.inputs, None),
        Err(f) => (f.code, Vec::<PathBuf>::new(), Some(f)),
    };
    let manifest = RunManifest {
        subcommand: name.into(),
        args: argv,
        inputs,
        output: out,
        config: ConfigEcho { tol: g.tol.unwrap_or(default_tol), seed: g.seed, max_iters: g.max_iters },
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_ms: start.elapsed().as_millis(),
        exit_code: code,
    };
    if let Err(e) = manifest.write() {
        eprintln!("warning: could not write manifest: {e}");
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(code),
    }
}

fn main() {
    let code = match run(std::env::args().skip(1).collect()) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    };
    std::process::exit(code);
}
