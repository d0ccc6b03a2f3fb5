use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nomilp::eval::Scheme;
use nomilp_cli::commands::{scheme_scores, stem_label, write_output};
use nomilp_cli::{
    compare, exit, nominate, simulate, to_json, CliError, MrrArg, NominateOptions, TieBreakArg,
};

#[derive(Parser)]
#[command(
    name = "nomilp",
    version,
    about = "Supervised vertex nomination by min-max-rank weighting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn weights for one query and write the nomination list as JSON.
    Nominate {
        /// CSV with header `id,d1,...,dJ`.
        dissimilarities: PathBuf,
        /// Ids known to resemble the query, one per line.
        supervision: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        node_limit: usize,
        #[arg(long, default_value_t = 600.0)]
        time_budget_s: f64,
        /// How the single-column baseline breaks ties.
        #[arg(long, value_enum, default_value_t = TieBreakArg::Index)]
        tie_break: TieBreakArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print one line per branch-and-bound node to stderr.
        #[arg(long)]
        trace: bool,
        /// Rank convention for the hold-out evaluation.
        #[arg(long, value_enum, default_value_t = MrrArg::Full)]
        restrict_mrr: MrrArg,
        /// Ids to score by mean reciprocal rank, one per line.
        #[arg(long)]
        holdout: Option<PathBuf>,
        /// Also write the integer program in LP format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// Result file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the RDPG simulation described by a `key = value` config.
    Simulate {
        config: PathBuf,
        /// Summary table; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Per-replicate table.
        #[arg(long)]
        replicates: Option<PathBuf>,
        /// Directory receiving ILP.csv, ASE.csv and LSE.csv score files.
        #[arg(long)]
        scores_dir: Option<PathBuf>,
    },
    /// Wilcoxon signed-rank comparison of two `case,score` files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        label_a: Option<String>,
        #[arg(long)]
        label_b: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Nominate {
            dissimilarities,
            supervision,
            node_limit,
            time_budget_s,
            tie_break,
            seed,
            trace,
            restrict_mrr,
            holdout,
            export_lp,
            out,
        } => {
            let opts = NominateOptions {
                node_limit,
                time_budget_s,
                tie_break,
                seed,
                restrict_mrr,
                holdout,
            };
            let mut stderr = std::io::stderr().lock();
            let sink: Option<&mut dyn std::io::Write> =
                if trace { Some(&mut stderr) } else { None };
            let result = nominate(&dissimilarities, &supervision, &opts, sink)?;
            if let Some(path) = export_lp {
                write_file(&path, &result.lp_text)?;
            }
            write_output(out.as_deref(), &result.json)?;
            if result.exit_code == exit::SOLVER_LIMIT {
                eprintln!(
                    "solver stopped on a limit after {} nodes; result is the best found",
                    result.document.provenance.stats.nodes
                );
            }
            Ok(result.exit_code)
        }
        Command::Simulate {
            config,
            out,
            replicates,
            scores_dir,
        } => {
            let result = simulate(&config)?;
            if let Some(path) = replicates {
                write_file(&path, &result.replicates)?;
            }
            if let Some(dir) = scores_dir {
                fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
                for scheme in Scheme::ALL {
                    let path = dir.join(format!("{scheme}.csv"));
                    write_file(&path, &scheme_scores(&result.outcome.replicates, scheme))?;
                }
            }
            write_output(out.as_deref(), &result.table)?;
            let hits: usize = result
                .outcome
                .rows
                .iter()
                .filter(|r| r.scheme == Scheme::Ilp)
                .map(|r| r.limit_hits)
                .sum();
            if hits > 0 {
                eprintln!("{hits} replicate(s) hit the ILP node limit");
            }
            Ok(exit::SUCCESS)
        }
        Command::Compare {
            a,
            b,
            label_a,
            label_b,
            out,
        } => {
            let la = label_a.unwrap_or_else(|| stem_label(&a));
            let lb = label_b.unwrap_or_else(|| stem_label(&b));
            let report = compare(&a, &b, &la, &lb)?;
            write_output(out.as_deref(), &to_json(&report))?;
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
