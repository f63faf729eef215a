use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqc_cli::config::{RunArgs, RunConfig};
use sqc_cli::pipeline;

#[derive(Parser)]
#[command(version, about = "Certify the divergence-free quasiconvexity counterexample")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and write the certificate report
    Certify(RunArgs),
    /// Generator ranks and the smallest singular value over the sphere
    RankSpectrum(RunArgs),
    /// Search for the penalty weight k and re-check it with the next seed
    FindK(RunArgs),
    /// Integral defect of the extension on the canonical field
    Defect(RunArgs),
    /// Random quadratic forms convex on the cone against random solenoidal fields
    TartarCheck {
        #[command(flatten)]
        args: RunArgs,
        /// Random solenoidal fields per form
        #[arg(long, default_value_t = 20)]
        fields: usize,
        /// Random quadratic forms to draw
        #[arg(long, default_value_t = 100)]
        forms: usize,
    },
}

const EXIT_INVALID: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Certify(a)
        | Command::RankSpectrum(a)
        | Command::FindK(a)
        | Command::Defect(a)
        | Command::TartarCheck { args: a, .. } => a,
    };
    let cfg = match RunConfig::resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let result = match &cli.command {
        Command::Certify(_) => pipeline::certify(&cfg),
        Command::RankSpectrum(_) => pipeline::rank_spectrum(&cfg),
        Command::FindK(_) => pipeline::find_k_stage(&cfg),
        Command::Defect(_) => pipeline::defect_stage(&cfg),
        Command::TartarCheck { fields, forms, .. } => {
            if *fields == 0 || *forms == 0 {
                eprintln!("error: --fields and --forms must be positive");
                return ExitCode::from(EXIT_INVALID);
            }
            pipeline::tartar_stage(&cfg, *fields, *forms)
        }
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                sqc_core::Error::Inexact { .. } | sqc_core::Error::Precondition(_) => EXIT_INVALID,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    let written = match &cfg.output_path {
        Some(p) => std::fs::write(p, &out.text),
        None => std::io::stdout().lock().write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if let Some(s) = &out.summary {
        eprintln!("{s}");
    }
    ExitCode::from(out.exit_code as u8)
}
