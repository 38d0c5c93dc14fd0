use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use samoo::cli::{self, Options};

#[derive(Parser)]
#[command(name = "samoo", version, about = "Budgeted surrogate-assisted optimization experiments")]
struct Cli {
    /// Output directory (overrides SAMOO_OUT_DIR and the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated seeds overriding the config
    #[arg(long, global = true, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Only report errors
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a config and write histories, fronts and a summary
    Run { config: PathBuf },
    /// Run two configs on the same seeds and report paired winners
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Also draw both final fronts to front.svg (2 objectives only)
        #[arg(long)]
        svg: bool,
    },
    /// List built-in problems, algorithms and surrogate kernels
    List,
    /// Serve a bundled evaluator over stdin/stdout
    #[command(hide = true)]
    Evaluator { kind: EvaluatorKind },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvaluatorKind {
    /// f = x
    Echo,
    /// f = sum of squares
    Sphere,
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let level = if args.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_target(false)
        .format_timestamp(None)
        .init();
    let opts = Options {
        out: args.out,
        seeds: args.seeds,
        quiet: args.quiet,
    };
    let result = match args.command {
        Command::Run { config } => cli::cmd_run(&config, &opts).map(|_| ()),
        Command::Compare { a, b, svg } => cli::cmd_compare(&a, &b, &opts, svg).map(|_| ()),
        Command::List => {
            print!("{}", cli::cmd_list());
            Ok(())
        }
        Command::Evaluator { kind } => {
            let stdin = io::stdin().lock();
            let stdout = BufWriter::new(io::stdout().lock());
            let served = match kind {
                EvaluatorKind::Echo => samoo::base::external::serve(stdin, stdout, |x| (x.to_vec(), vec![])),
                EvaluatorKind::Sphere => samoo::base::external::serve(stdin, stdout, |x| {
                    (vec![x.iter().map(|v| v * v).sum()], vec![])
                }),
            };
            served.map_err(samoo::Error::from)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
