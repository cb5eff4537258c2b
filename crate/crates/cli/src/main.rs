use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jtcqed_cli::{presets, run_config, run_path, CliError};

#[derive(Parser)]
#[command(name = "jtcqed", version, about = "Two-resonator Jahn-Teller circuit-QED simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML config
    Run { config: PathBuf },
    /// Run a bundled figure preset
    Preset {
        name: String,
        /// Output directory (default out/<name>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled presets
    Presets,
}

fn execute(cmd: Command) -> Result<Vec<PathBuf>, CliError> {
    match cmd {
        Command::Run { config } => {
            let report = run_path(&config)?;
            Ok(report.files.into_iter().chain([report.manifest]).collect())
        }
        Command::Preset { name, out } => {
            let preset = presets::find(&name).ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}")))?;
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(preset.name));
            let mut written = Vec::new();
            for cfg in presets::with_output(&preset, &dir) {
                let report = run_config(&cfg)?;
                written.extend(report.files);
                written.push(report.manifest);
            }
            Ok(written)
        }
        Command::Presets => {
            print!("{}", presets::table());
            Ok(Vec::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
