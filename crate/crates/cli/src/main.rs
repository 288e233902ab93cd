use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qplasm_cli::{CliError, Format, RunOptions, SweepSpec};

#[derive(Parser)]
#[command(name = "qplasm", version, about = "Plasmonic sensing models and quantum estimation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in the config.
    Run(Output),
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the scenario over a range of one numeric config entry.
    Sweep {
        #[command(flatten)]
        output: Output,
        /// Dotted config path, e.g. transduce.analyte_index.
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl Output {
    fn options(&self) -> RunOptions {
        let format = match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
        RunOptions { out: self.out.clone(), format, seed: self.seed }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<Vec<String>, CliError> = match &cli.command {
        Command::Validate { config } => {
            qplasm_cli::validate(config).map(|s| vec![format!("{}: valid {} config", config.display(), s.name())])
        }
        Command::Run(o) => qplasm_cli::run(&o.config, &o.options()).map(|r| summary(&r)),
        Command::Sweep { output, param, from, to, points } => {
            let spec = SweepSpec { param: param.clone(), from: *from, to: *to, points: *points };
            qplasm_cli::sweep(&output.config, &spec, &output.options()).map(|r| summary(&r))
        }
    };
    match result {
        Ok(lines) => {
            if !cli.quiet {
                for l in lines {
                    eprintln!("{l}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn summary(r: &qplasm_cli::Report) -> Vec<String> {
    let mut lines: Vec<String> = r.files.iter().map(|f| format!("wrote {}", f.display())).collect();
    lines.extend(r.notes.iter().map(|n| format!("note: {n}")));
    lines
}
