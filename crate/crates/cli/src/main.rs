mod args;
mod commands;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use args::{Args, Command, Format};
use commands::{Failure, Report};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".summary.json");
    out.with_file_name(name)
}

fn write_csv(report: &Report, sink: impl Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&report.header)?;
    for row in &report.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(args: &Args, report: &Report) -> anyhow::Result<()> {
    let summary = serde_json::to_string_pretty(&report.summary)?;
    match (args.format, &args.out) {
        (Format::Json, Some(path)) => {
            std::fs::write(path, summary + "\n").with_context(|| format!("writing {}", path.display()))?
        }
        (Format::Json, None) => writeln!(io::stdout().lock(), "{summary}")?,
        (Format::Csv, Some(path)) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(report, file)?;
            let side = summary_path(path);
            std::fs::write(&side, summary + "\n").with_context(|| format!("writing {}", side.display()))?;
        }
        (Format::Csv, None) => {
            write_csv(report, io::stdout().lock())?;
            eprintln!("{}", serde_json::to_string(&report.summary)?);
        }
    }
    Ok(())
}

fn run(args: &Args) -> Result<(), Failure> {
    commands::validate(args)?;
    let report = match args.cmd {
        Command::Verify => commands::verify(args)?,
        Command::Rates => commands::rates(args)?,
        Command::Kfun => commands::kfun(args)?,
        Command::Multnorm => commands::multnorm(args)?,
    };
    if let Err(e) = emit(args, &report) {
        if !is_closed_stdout(&e) {
            return Err(Failure::Output(e));
        }
    }
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(report.failures.join("; ")))
    }
}

/// A reader that stops early (`tapmeans ... | head`) is not an error.
fn is_closed_stdout(e: &anyhow::Error) -> bool {
    let broken = |io: &io::Error| io.kind() == io::ErrorKind::BrokenPipe;
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(broken)
            || c.downcast_ref::<csv::Error>()
                .is_some_and(|cs| matches!(cs.kind(), csv::ErrorKind::Io(io) if broken(io)))
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("FAILED: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Output(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
