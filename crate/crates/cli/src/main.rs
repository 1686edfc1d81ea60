mod commands;
mod wizard;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fairist_core::RenderFormat;
use fairist_service::{ADDR_ENV, DATA_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "fairist",
    version,
    about = "Turn survey answers into FAIR data stewardship recommendations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a schema document and print its diagnostics.
    Validate {
        file: PathBuf,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Answer the survey interactively in the terminal.
    Wizard {
        #[command(flatten)]
        schema: SchemaSource,
        #[command(flatten)]
        output: OutputArgs,
        /// Skip the interactive terminal check (for scripted input).
        #[arg(long, hide = true)]
        no_tty_check: bool,
    },
    /// Compile a report from an answers file.
    Batch {
        #[arg(long)]
        answers: PathBuf,
        #[command(flatten)]
        schema: SchemaSource,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = ADDR_ENV, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, env = DATA_DIR_ENV, default_value = "fairist-data")]
        data_dir: PathBuf,
    },
    /// Write the built-in schema document to a file.
    ExportSchema {
        #[arg(long, required = true)]
        builtin: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct SchemaSource {
    /// Schema document to use instead of the built-in pack.
    #[arg(long, conflicts_with = "builtin")]
    schema: Option<PathBuf>,
    /// Use the built-in pack (the default).
    #[arg(long)]
    builtin: bool,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "md", value_parser = parse_format)]
    format: RenderFormat,
    /// Markdown only: add a bulleted section per dimension after the table.
    #[arg(long)]
    long: bool,
    /// Output path, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

fn parse_format(s: &str) -> Result<RenderFormat, String> {
    s.parse()
        .map_err(|e: fairist_core::render::UnknownFormat| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file, strict } => commands::validate(&file, strict),
        Command::Wizard {
            schema,
            output,
            no_tty_check,
        } => commands::wizard(schema.schema.as_deref(), &output.into(), !no_tty_check),
        Command::Batch {
            answers,
            schema,
            output,
        } => commands::batch(schema.schema.as_deref(), &answers, &output.into()),
        Command::Serve { addr, data_dir } => commands::serve(addr, data_dir),
        Command::ExportSchema { builtin: _, output } => commands::export_builtin(&output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(message) = failure.message() {
                eprintln!("error: {message}");
            }
            ExitCode::from(failure.code())
        }
    }
}

impl From<OutputArgs> for commands::Output {
    fn from(args: OutputArgs) -> Self {
        commands::Output {
            format: args.format,
            long: args.long,
            path: args.output,
        }
    }
}
