//! `normvar`: mention counts, indices, VAR estimation and norm-game simulation
//! from a single run configuration.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use normvar_core::Granularity;

use crate::commands::Ctx;
use crate::config::{Overrides, RunConfig, SimulateConfig};
use crate::error::{code, CliError};

#[derive(Debug, Parser)]
#[command(name = "normvar", version, about = "Mention indices, VAR estimation and norm-game dynamics")]
struct Cli {
    /// Run configuration (TOML, or JSON when the extension is `.json`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// First period of the normalization / estimation window, e.g. 1995-01, 1995-Q1 or 1995.
    #[arg(long, global = true)]
    window_start: Option<String>,
    /// Last period of the window (inclusive).
    #[arg(long, global = true)]
    window_end: Option<String>,
    /// Granularity of mention counts and indices.
    #[arg(long, global = true)]
    granularity: Option<Granularity>,
    /// VAR lag order.
    #[arg(long, global = true)]
    lags: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-outlet mention counts and phrase-set tables.
    Count,
    /// Per-group and pooled indices.
    Index,
    /// Assemble the estimation panel.
    Panel,
    /// Estimate the VAR and write coefficient tables.
    Estimate,
    /// Simulate best-response dynamics of a group game.
    Simulate {
        /// Game JSON (`groups`, `b`, `c`, `lambda`); overrides the config.
        #[arg(long)]
        game: Option<PathBuf>,
        /// Number of steps.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run every configured stage.
    Report,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let overrides = Overrides {
        window_start: cli.window_start,
        window_end: cli.window_end,
        granularity: cli.granularity,
        lags: cli.lags,
    };
    let mut cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    if let Command::Simulate { game, steps } = &cli.command {
        if game.is_some() || steps.is_some() {
            let sc = cfg.simulate.get_or_insert_with(SimulateConfig::default);
            if let Some(g) = game {
                let abs = std::path::absolute(g).map_err(|e| CliError::read(g, e))?;
                sc.game = Some(abs.to_string_lossy().into_owned());
                sc.fit = None;
            }
            if let Some(s) = steps {
                sc.steps = *s;
            }
        }
    }
    let ctx = Ctx::new(cfg, cli.out);
    match cli.command {
        Command::Count => commands::count(&ctx),
        Command::Index => commands::index(&ctx),
        Command::Panel => commands::panel(&ctx),
        Command::Estimate => commands::estimate(&ctx),
        Command::Simulate { .. } => commands::simulate(&ctx),
        Command::Report => commands::report(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(code::OTHER as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
