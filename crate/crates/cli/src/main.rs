//! `fpade`: command-line experiments for Padé interpolation by F-polynomials.
//!
//! Output is CSV or JSON with 17-significant-digit floats; a fixed seed gives
//! byte-identical artifacts. Failures print one JSON object on stderr and exit
//! with 2 (configuration) or 3 (numerical).

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod failure;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format, RunConfig};
use failure::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(Failure::config("bad_arguments", e.to_string().trim_end())),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("{}", f.to_json());
    ExitCode::from(f.exit_code() as u8)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FPADE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::config(
            "bad_threads",
            format!("FPADE_THREADS must be a positive integer, got `{v}`"),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config("bad_threads", e.to_string()))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let (kind, mut flags) = cli.command.split();
    flags.apply_config()?;
    let cfg = RunConfig::resolve(kind, flags)?;
    let tables = commands::run(kind, &cfg)?;
    write_output(&cfg, &tables)
}

fn render(format: Format, table: &fpade_core::table::Table) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = table.to_json();
            s.push('\n');
            s
        }
    }
}

/// `out.csv` + `brackets` -> `out.brackets.csv`.
fn companion_path(path: &Path, name: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match path.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    path.with_file_name(file)
}

fn write_output(cfg: &RunConfig, tables: &commands::Named) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::config("output_failed", e.to_string());
    match &cfg.output {
        Some(path) => {
            for (i, (name, table)) in tables.iter().enumerate() {
                let target = if i == 0 {
                    path.clone()
                } else {
                    companion_path(path, name)
                };
                std::fs::write(&target, render(cfg.format, table))
                    .map_err(|e| Failure::config("output_failed", format!("{}: {e}", target.display())))?;
            }
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            match cfg.format {
                // CSV on stdout carries the main table only
                Format::Csv => out.write_all(render(Format::Csv, &tables[0].1).as_bytes()).map_err(io),
                Format::Json if tables.len() == 1 => {
                    out.write_all(render(Format::Json, &tables[0].1).as_bytes()).map_err(io)
                }
                Format::Json => {
                    let body: Vec<String> = tables
                        .iter()
                        .map(|(name, t)| format!("{}:{}", fpade_core::table::json_string(name), t.to_json()))
                        .collect();
                    writeln!(out, "{{{}}}", body.join(",")).map_err(io)
                }
            }
        }
    }
}
