//! Command-line front end: one subcommand per pipeline stage plus `run` and `report`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use socialrm::harness::{emit_report, load_config, run_pipeline, ReportFormat, RunOptions, Stage};
use socialrm::Error;

#[derive(Parser)]
#[command(name = "socialrm", version, about = "Simulate, fit and audit preference-based reward models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Sample voters, the slate and the comparison dataset.
    Simulate(StageArgs),
    /// Fit the reward model to the saved dataset.
    Fit(StageArgs),
    /// Run the axiom audits against the saved model.
    Audit(StageArgs),
    /// Compute the worst-case regret of the learned winner.
    Distort(StageArgs),
    /// Cross-check the saved run against the brute-force oracles.
    Verify(StageArgs),
    /// Run the full pipeline, or the stages named with --stage.
    Run {
        #[command(flatten)]
        args: StageArgs,
        /// Restrict the run to these stages (repeatable).
        #[arg(long = "stage", value_enum)]
        stages: Vec<StageName>,
    },
    /// Print the saved audit and regret reports.
    Report {
        /// Config whose output directory holds the reports.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run directory; overrides the config's.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args)]
struct StageArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root seed; overrides the config's.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Print the report after the stages finish.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageName {
    Simulate,
    Fit,
    Audit,
    Distort,
    Verify,
}

impl From<StageName> for Stage {
    fn from(s: StageName) -> Self {
        match s {
            StageName::Simulate => Stage::Simulate,
            StageName::Fit => Stage::Fit,
            StageName::Audit => Stage::Audit,
            StageName::Distort => Stage::Distort,
            StageName::Verify => Stage::Verify,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Rows,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::Table,
            Format::Rows => ReportFormat::Rows,
        }
    }
}

fn run_stages(args: &StageArgs, stages: &[Stage]) -> socialrm::Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    let mut opts = RunOptions::for_config(&config).stages(stages);
    if let Some(n) = args.threads {
        opts = opts.threads(n);
    }
    let manifest = run_pipeline(&config, &opts)?;
    for record in &manifest.stages {
        let note = record.note.as_deref().unwrap_or("");
        eprintln!("{:<9} {:<8} {note}", record.stage.name(), format!("{:?}", record.status).to_lowercase());
    }
    if let Some(format) = args.format {
        if stages.contains(&Stage::Audit) {
            print!("{}", emit_report(&config.output_dir, format.into())?);
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> socialrm::Result<()> {
    match cli.command {
        Command::Simulate(args) => run_stages(&args, &[Stage::Simulate]),
        Command::Fit(args) => run_stages(&args, &[Stage::Fit]),
        Command::Audit(args) => run_stages(&args, &[Stage::Audit]),
        Command::Distort(args) => run_stages(&args, &[Stage::Distort]),
        Command::Verify(args) => run_stages(&args, &[Stage::Verify]),
        Command::Run { args, stages } => {
            let stages: Vec<Stage> = if stages.is_empty() {
                Stage::ALL.to_vec()
            } else {
                stages.into_iter().map(Stage::from).collect()
            };
            run_stages(&args, &stages)
        }
        Command::Report { config, out, format } => {
            let dir = match (out, config) {
                (Some(out), _) => out,
                (None, Some(path)) => load_config(&path)?.output_dir,
                (None, None) => return Err(Error::input("report needs --out or --config")),
            };
            print!("{}", emit_report(&dir, format.into())?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are validation errors; --help and --version are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
