use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bfun_cli::{run, Cache, Command, Format, RunConfig, Target};
use bfun_core::bernstein::Method;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bfun",
    version,
    about = "Exact b-function computations for cyclic pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute b-hat by sampling and interpolation and compare with the closed form.
    Bfunction(Opts),
    /// Run one verification target.
    Verify {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value = "jets", value_parser = ["jets", "symbolic"])]
    method: String,
    /// Single exponent for the symbolic identity check.
    #[arg(long)]
    k: Option<u32>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, env = "BFUN_CACHE")]
    cache: Option<PathBuf>,
    /// Largest n run without --force.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_n: Option<u32>,
    #[arg(long)]
    force: bool,
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, o) = match cli.command {
        Cmd::Bfunction(o) => (Command::Bfunction, o),
        Cmd::Verify { target, opts } => (Command::Verify(target), opts),
    };
    let cfg = RunConfig {
        n: o.n as usize,
        method: o.method.parse::<Method>().expect("validated by clap"),
        k: o.k,
        max_n: o.max_n.map(|m| m as usize),
        force: o.force,
        cache: o
            .cache
            .as_deref()
            .map_or_else(Cache::disabled, |d| Cache::open(Some(d))),
    };
    let outcome = match run(cmd, &cfg) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = outcome.report.render(o.format);
    print!("{text}");
    if let Some(out) = &o.out {
        let mut files = vec![(out.clone(), text.clone())];
        for (ext, body) in &outcome.artifacts {
            files.push((out.with_extension(ext), body.clone()));
        }
        for (p, body) in files {
            if let Err(e) = write(&p, &body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if let Some(c) = outcome.report.first_failure() {
        eprintln!(
            "FAIL [{}] {}{}",
            c.anchor,
            c.name,
            c.detail
                .as_deref()
                .map(|d| format!(": {d}"))
                .unwrap_or_default()
        );
    }
    ExitCode::from(outcome.exit_code() as u8)
}
