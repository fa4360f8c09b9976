//! `plangen`: generate, solve, validate, transform, assemble and score
//! PDDL planning datasets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod exit;

#[derive(Parser, Debug)]
#[command(name = "plangen", version, about = "PDDL planning dataset toolkit")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "PLANGEN_SEED")]
    seed: Option<u64>,
    /// More logging; for `validate` also prints the execution trace.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Worker threads. Output does not depend on this.
    #[arg(short, long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a plan against a domain and problem.
    Validate(ValidateArgs),
    /// Solve a problem with the internal or an external planner.
    Plan(PlanArgs),
    /// Generate problems (and reference plans) from a generation config.
    Gen(GenArgs),
    /// Rename every symbol of a domain/problem/plan tuple.
    Anonymize(AnonymizeArgs),
    /// Standard plan to compact encoding.
    Encode(EncodeArgs),
    /// Compact encoding to standard plan.
    Decode(DecodeArgs),
    /// Deduplicate tuples and split them into a dataset.
    Assemble(AssembleArgs),
    /// Token statistics for a dataset.
    Stats(StatsArgs),
    /// Reward and advantage for a group of compact candidate plans.
    Score(ScoreArgs),
    /// Planner-based vs verifier-reward training cost.
    Cost(CostArgs),
    /// Build a dataset end to end from a pipeline config.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub problem: PathBuf,
    /// Plan file, `-` for stdin.
    #[arg(long)]
    pub plan: PathBuf,
    /// Fail when the problem names a different domain.
    #[arg(long)]
    pub strict_domain_name: bool,
    /// Cross-check with an external validator, e.g. `Validate {domain} {problem} {plan}`.
    #[arg(long, value_name = "COMMAND")]
    pub external_val: Option<String>,
    /// Seconds allowed for the external validator.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, default_value = "greedy-best-first")]
    pub strategy: String,
    #[arg(long)]
    pub heuristic: Option<String>,
    #[arg(long, default_value_t = 200_000)]
    pub max_expansions: u64,
    #[arg(long, default_value_t = 1_000)]
    pub max_plan_length: usize,
    /// External planner, e.g. `planner {domain} {problem} {plan}`.
    #[arg(long, value_name = "COMMAND")]
    pub external: Option<String>,
    /// Seconds allowed for the external planner.
    #[arg(long, default_value_t = 300.0)]
    pub timeout: f64,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub dpgc: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Skip planning; only problems are written.
    #[arg(long)]
    pub no_solve: bool,
    /// External planner used instead of the internal one.
    #[arg(long, value_name = "COMMAND")]
    pub external: Option<String>,
    #[arg(long, default_value_t = 300.0)]
    pub timeout: f64,
    /// Only check the config and print its diagnostics.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug)]
pub struct AnonymizeArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Also write the symbol map as JSON.
    #[arg(long)]
    pub map_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Standard plan file, `-` for stdin.
    #[arg(long, default_value = "-")]
    pub plan: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Compact plan file, `-` for stdin.
    #[arg(long, default_value = "-")]
    pub compact: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AssembleArgs {
    /// Directory of tuple `.jsonl` files.
    #[arg(long)]
    pub in_dir: PathBuf,
    /// `train,validation[,test]`
    #[arg(long, default_value = "0.8,0.2")]
    pub ratios: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 4096)]
    pub limit: usize,
    #[arg(long, default_value = "whitespace")]
    pub counter: String,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub problem: PathBuf,
    /// Compact plans separated by blank lines, `-` for stdin.
    #[arg(long)]
    pub candidates: PathBuf,
    /// Id recorded with every reward; defaults to the problem file stem.
    #[arg(long)]
    pub tuple_id: Option<String>,
    #[arg(long, default_value_t = plangen::reward::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Also write one JSON record per candidate here.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CostArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Compare both models and report the break-even epoch count.
    #[arg(long)]
    pub compare: bool,
    /// Separate parameters for the verifier-reward model.
    #[arg(long)]
    pub rl_params: Option<PathBuf>,
    #[arg(long, default_value_t = plangen::cost::DEFAULT_E_MAX)]
    pub e_max: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// Pipeline config (JSON); paths inside are relative to it.
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            });
        }
    };
    init_logging(cli.verbose);
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.into())
            .build_global()
        {
            eprintln!("error: cannot start {jobs} worker threads: {e}");
            return ExitCode::from(exit::IO);
        }
    }
    let ctx = commands::Context {
        seed: cli.seed,
        verbose: cli.verbose,
    };
    let result = match cli.command {
        Command::Validate(a) => commands::validate(&ctx, a),
        Command::Plan(a) => commands::plan(&ctx, a),
        Command::Gen(a) => commands::gen(&ctx, a),
        Command::Anonymize(a) => commands::anonymize(&ctx, a),
        Command::Encode(a) => commands::encode(a),
        Command::Decode(a) => commands::decode(a),
        Command::Assemble(a) => commands::assemble(&ctx, a),
        Command::Stats(a) => commands::stats(a),
        Command::Score(a) => commands::score(a),
        Command::Cost(a) => commands::cost(a),
        Command::Pipeline(a) => commands::pipeline(&ctx, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e))
        }
    }
}
