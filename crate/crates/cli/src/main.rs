use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nce_landscape_cli::commands::{landscape_command, presets_text, run_command, verify_command};
use nce_landscape_cli::config::load_config;
use nce_landscape_cli::{CORRUPT_ENV, OUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "nce-landscape",
    version,
    about = "Noise-contrastive estimation landscape harness: optimizer sweeps, \
             certification checks, and segment profiles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the optimizer sweep described by a config file or preset name.
    Run { config: String },
    /// Run the landscape certification suite and write its report.
    Verify { config: String },
    /// Dump loss, gradient, and curvature along the noise-to-data segment.
    Landscape { config: String },
    /// List the shipped preset configs.
    Presets,
}

fn env_out() -> Option<String> {
    std::env::var(OUT_DIR_ENV).ok()
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Run { config } => {
            let cfg = load_config(&config).map_err(|e| e.to_string())?;
            let out_dir = cfg.output_dir(env_out().as_deref());
            let art = run_command(&cfg, &out_dir).map_err(|e| e.to_string())?;
            println!("wrote {}", art.table_path.display());
            for p in &art.plot_paths {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", art.settings_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { config } => {
            let cfg = load_config(&config).map_err(|e| e.to_string())?;
            let out_dir = cfg.output_dir(env_out().as_deref());
            let corrupt = std::env::var(CORRUPT_ENV).ok();
            let art =
                verify_command(&cfg, &out_dir, corrupt.as_deref()).map_err(|e| e.to_string())?;
            println!(
                "{} passed, {} failed, {} skipped, {} inconclusive; report at {}",
                art.passed,
                art.failed,
                art.skipped,
                art.inconclusive,
                art.report_path.display()
            );
            Ok(ExitCode::from(art.status as u8))
        }
        Cmd::Landscape { config } => {
            let cfg = load_config(&config).map_err(|e| e.to_string())?;
            let out_dir = cfg.output_dir(env_out().as_deref());
            let paths = landscape_command(&cfg, &out_dir).map_err(|e| e.to_string())?;
            for p in &paths {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Presets => {
            print!("{}", presets_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}
