//! Command-line front end for the `fbtiling` library.
//!
//! Exit status: 0 on success, 2 on a usage error, 1 on a domain, capacity,
//! i/o or failed-check outcome.

mod args;
mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format};

/// Whether the raw arguments ask for json, for reporting parse failures.
fn wants_json(argv: &[String]) -> bool {
    let mut it = argv.iter();
    let mut format = "json";
    while let Some(a) = it.next() {
        if a == "--format" {
            if let Some(v) = it.next() {
                format = v;
            }
        } else if let Some(v) = a.strip_prefix("--format=") {
            format = v;
        }
    }
    format == "json"
}

fn report(json: bool, kind: &str, message: &str) {
    if json {
        println!("{}", output::error_json(kind, message));
    }
    eprintln!("error: {message}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if wants_json(&argv) {
                let message = e.to_string();
                let first = message.lines().next().unwrap_or_default();
                println!(
                    "{}",
                    output::error_json("usage", first.trim_start_matches("error: "))
                );
            }
            let _ = e.print();
            return ExitCode::from(2);
        }
    };

    let json = cli.global.format == Format::Json;
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
        {
            report(json, "usage", &format!("cannot start {jobs} workers: {e}"));
            return ExitCode::from(2);
        }
    }

    let start = Instant::now();
    let name = commands::name(&cli.command);
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            report(json, e.kind(), &e.to_string());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    let stdout = io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = output::emit(&mut lock, cli.global.format, name, &outcome, elapsed)
        .and_then(|_| lock.flush())
    {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if outcome.failed {
        eprintln!("error: at least one check failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
