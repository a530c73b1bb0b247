use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ardlkit::dataio::{write_csv, DateFormat};
use ardlkit::error::{Error, ErrorClass, Result};
use ardlkit::pipeline::config::InputConfig;
use ardlkit::pipeline::{render_report, run_with, AnalysisReport, Format, PipelineConfig, RunOptions};
use ardlkit::simgen::{generate, Dgp};

#[derive(Parser)]
#[command(name = "ardlkit", version, about = "Unit roots, ARDL bounds testing, ECM and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unit-root table and integration order for every series.
    Unitroot(RunArgs),
    /// Model stages only: lag selection, bounds test, long run, ECM, diagnostics.
    Ardl(RunArgs),
    /// Full analysis.
    Pipeline(RunArgs),
    /// Generate a synthetic dataset from a DGP description.
    Simulate(SimulateArgs),
    /// Re-render a json report.
    Render(RenderArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV input; replaces the config's input path.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Report long-run and ECM tables whatever the bounds decision.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Config => 2,
        ErrorClass::Data => 3,
        ErrorClass::Numerical => 4,
        ErrorClass::Precondition => 5,
    }
}

fn write_out(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn load_config(args: &RunArgs) -> Result<PipelineConfig> {
    match (&args.config, &args.input) {
        (Some(c), _) => PipelineConfig::load(c),
        (None, Some(input)) => PipelineConfig::from_json(&format!(
            "{{\"input\": {}}}",
            serde_json::to_string(&InputConfig {
                path: input.clone(),
                date_column: "date".into(),
                date_format: DateFormat::default(),
                value_columns: None,
                missing: Default::default(),
            })
            .map_err(|e| Error::Config(e.to_string()))?
        )),
        (None, None) => Err(Error::Config("either --config or --input is required".into())),
    }
}

fn emit(report: &AnalysisReport, cfg: &PipelineConfig, args: &RunArgs) -> Result<()> {
    if args.output.is_some() || args.format.is_some() {
        let fmt = args.format.unwrap_or_default();
        return write_out(args.output.as_deref(), &render_report(report, fmt));
    }
    let mut wrote = false;
    if let Some(p) = &cfg.output.json {
        write_out(Some(&cfg.resolve(p)), &render_report(report, Format::Json))?;
        wrote = true;
    }
    if let Some(p) = &cfg.output.text {
        write_out(Some(&cfg.resolve(p)), &render_report(report, Format::Text))?;
        wrote = true;
    }
    if !wrote {
        write_out(None, &render_report(report, Format::Json))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Unitroot(args) | Command::Ardl(args) | Command::Pipeline(args)
            if args.config.is_none() && args.input.is_none() =>
        {
            Err(Error::Config("either --config or --input is required".into()))
        }
        Command::Unitroot(args) => {
            let cfg = load_config(&args)?;
            let opts = RunOptions {
                input: args.input.clone(),
                models: false,
                ..RunOptions::default()
            };
            emit(&run_with(&cfg, &opts)?, &cfg, &args)
        }
        Command::Ardl(args) => {
            let cfg = load_config(&args)?;
            if cfg.models.is_empty() {
                return Err(Error::Config("the ardl command needs at least one model in the config".into()));
            }
            let opts = RunOptions {
                input: args.input.clone(),
                force: args.force,
                unit_root_table: false,
                models: true,
            };
            emit(&run_with(&cfg, &opts)?, &cfg, &args)
        }
        Command::Pipeline(args) => {
            let cfg = load_config(&args)?;
            let opts = RunOptions {
                input: args.input.clone(),
                force: args.force,
                ..RunOptions::default()
            };
            emit(&run_with(&cfg, &opts)?, &cfg, &args)
        }
        Command::Simulate(args) => {
            if !args.config.exists() {
                return Err(Error::Config(format!("config file {} not found", args.config.display())));
            }
            let text = std::fs::read_to_string(&args.config)?;
            let mut dgp: Dgp = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            if let Some(seed) = args.seed {
                dgp.seed = seed;
            }
            let data = generate(&dgp).map_err(|e| match e {
                Error::InvalidParameters(m) => Error::Config(m),
                other => other,
            })?;
            let mut buf = Vec::new();
            write_csv(&data, &mut buf, DateFormat::default())?;
            write_out(args.output.as_deref(), &String::from_utf8_lossy(&buf))
        }
        Command::Render(args) => {
            if !args.input.exists() {
                return Err(Error::FileNotFound(args.input.clone()));
            }
            let text = std::fs::read_to_string(&args.input)?;
            let report: AnalysisReport =
                serde_json::from_str(&text).map_err(|e| Error::InvalidDataset(format!("not a report: {e}")))?;
            let fmt = args.format.unwrap_or(Format::Text);
            write_out(args.output.as_deref(), &render_report(&report, fmt))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = e.to_string();
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                if !msg.contains(&s.to_string()) {
                    msg.push_str(&format!(": {s}"));
                }
                src = s.source();
            }
            eprintln!("error: {msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
