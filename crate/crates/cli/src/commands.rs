use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::ValueEnum;
use nomilp::eval::{
    compare_paired, run_simulation, singleton_baseline, ComparisonReport, ReplicateRecord, Scheme,
    SimulationOutcome, SimulationRow, TieBreak,
};
use nomilp::ilp::{self, SolveStatus};
use nomilp::ranking::{max_rank_of, mrr_with_mode, MrrMode};
use nomilp::solver::SolverConfig;
use nomilp::spectral::RNG_ALGORITHM;
use nomilp::{ingest_matrix, ItemId, SupervisionInstance};
use sha2::{Digest, Sha256};

use crate::document::{
    Evaluation, InputDigest, NominationDocument, Provenance, RankedItem, RunConfig,
    SingletonSummary,
};
use crate::error::{exit, CliError};
use crate::formats::{parse_config, parse_dissimilarity_csv, parse_id_list, parse_scores, to_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum TieBreakArg {
    #[default]
    Index,
    Seeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum MrrArg {
    #[default]
    Full,
    Candidate,
}

impl From<MrrArg> for MrrMode {
    fn from(m: MrrArg) -> Self {
        match m {
            MrrArg::Full => MrrMode::Full,
            MrrArg::Candidate => MrrMode::Candidate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NominateOptions {
    pub node_limit: usize,
    pub time_budget_s: f64,
    pub tie_break: TieBreakArg,
    pub seed: u64,
    pub restrict_mrr: MrrArg,
    pub holdout: Option<PathBuf>,
}

impl Default for NominateOptions {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            node_limit: solver.node_limit,
            time_budget_s: solver.time_budget.as_secs_f64(),
            tie_break: TieBreakArg::Index,
            seed: 0,
            restrict_mrr: MrrArg::Full,
            holdout: None,
        }
    }
}

pub struct NominateOutput {
    pub document: NominationDocument,
    pub json: String,
    /// The program in CPLEX LP format.
    pub lp_text: String,
    pub exit_code: i32,
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|e| {
        let line = e.as_bytes()[..e.utf8_error().valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count() as u64
            + 1;
        CliError::parse(path, line, "invalid UTF-8")
    })
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn digest(role: &str, path: &Path, bytes: &[u8]) -> InputDigest {
    InputDigest {
        role: role.into(),
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

/// Solves the program for a dissimilarity CSV and supervision file.
///
/// `trace` receives one line per branch-and-bound node when given. The exit
/// code is [`exit::SOLVER_LIMIT`] when the solver stopped on a limit.
pub fn nominate(
    dissim_path: &Path,
    s_path: &Path,
    opts: &NominateOptions,
    mut trace: Option<&mut dyn Write>,
) -> Result<NominateOutput, CliError> {
    if !(opts.time_budget_s.is_finite() && opts.time_budget_s > 0.0) {
        return Err(CliError::Invalid("--time-budget-s must be positive".into()));
    }
    if opts.node_limit == 0 {
        return Err(CliError::Invalid("--node-limit must be positive".into()));
    }
    let dissim_bytes = read_bytes(dissim_path)?;
    let table = parse_dissimilarity_csv(dissim_path, &dissim_bytes)?;
    let index = table.index_of();
    let s_text = read_text(s_path)?;
    let s_rows = parse_id_list(s_path, &s_text, &index)?;
    let mut inputs = vec![
        digest("dissimilarities", dissim_path, &dissim_bytes),
        digest("supervision", s_path, s_text.as_bytes()),
    ];
    let holdout_rows = match &opts.holdout {
        Some(path) => {
            let text = read_text(path)?;
            inputs.push(digest("holdout", path, text.as_bytes()));
            Some(parse_id_list(path, &text, &index)?)
        }
        None => None,
    };

    let matrix = ingest_matrix(&table.rows)?;
    let inst = SupervisionInstance::new(
        ItemId::labeled(table.ids.len(), "query"),
        matrix.rows(),
        &s_rows,
    )
    .map_err(|e| CliError::Invalid(format!("{}: {e}", s_path.display())))?;
    let model = ilp::build_model(&matrix, &inst)?;
    let solver = SolverConfig {
        node_limit: opts.node_limit,
        time_budget: Duration::from_secs_f64(opts.time_budget_s),
        ..SolverConfig::default()
    };
    let solution = match trace.as_mut() {
        Some(sink) => ilp::solve_traced(&model, &solver, &mut |node| {
            // a closed sink should not abort the solve
            let _ = writeln!(sink, "{node}");
        })?,
        None => ilp::solve(&model, &solver)?,
    };
    let list = ilp::solution_to_ranker(&matrix, &solution)?;

    let tie_break = match opts.tie_break {
        TieBreakArg::Index => TieBreak::Index,
        TieBreakArg::Seeded => TieBreak::Seeded(opts.seed),
    };
    let single = singleton_baseline(&matrix, &inst, tie_break)?;

    let evaluation = match holdout_rows {
        Some(rows) => {
            let mode = MrrMode::from(opts.restrict_mrr);
            let invalid =
                |e: nomilp::Error| CliError::Invalid(format!("hold-out set cannot be scored: {e}"));
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            sorted.dedup();
            Some(Evaluation {
                holdout: sorted.iter().map(|&r| table.ids[r].clone()).collect(),
                ilp_mrr: mrr_with_mode(&list, &sorted, &inst, mode).map_err(invalid)?,
                singleton_mrr: mrr_with_mode(&single.list, &sorted, &inst, mode)
                    .map_err(invalid)?,
            })
        }
        None => None,
    };

    let ranking = list
        .ordering()
        .into_iter()
        .map(|row| RankedItem {
            id: table.ids[row].clone(),
            rank: list.rank(row),
            fused: list.fused_values()[row],
            supervised: inst.in_s(row),
        })
        .collect();

    let document = NominationDocument {
        alpha: solution.alpha.as_slice().to_vec(),
        objective: solution.objective_value,
        status: solution.status,
        max_rank: max_rank_of(&list, inst.s_set()),
        ranking,
        singleton: SingletonSummary {
            column: table.columns[single.column].clone(),
            objective: single.objective(&inst),
            max_rank: single.max_rank,
            tied: single
                .argmin
                .iter()
                .map(|&j| table.columns[j].clone())
                .collect(),
        },
        evaluation,
        provenance: Provenance {
            tool: "nomilp".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generator: RNG_ALGORITHM.into(),
            inputs,
            config: RunConfig {
                node_limit: solver.node_limit,
                time_budget_s: opts.time_budget_s,
                feas_tol: solver.feas_tol,
                int_tol: solver.int_tol,
                branching: solver.branching,
                node_order: solver.node_order,
                tie_break: format!("{:?}", opts.tie_break).to_lowercase(),
                seed: opts.seed,
                restrict_mrr: format!("{:?}", opts.restrict_mrr).to_lowercase(),
            },
            columns: table.columns.clone(),
            column_shift: matrix.column_shift().to_vec(),
            big_m: model.big_m(),
            stats: solution.stats.clone(),
        },
    };
    let exit_code = match solution.status {
        SolveStatus::IterationLimit => exit::SOLVER_LIMIT,
        SolveStatus::Optimal => exit::SUCCESS,
        SolveStatus::Infeasible => exit::FAILURE,
    };
    Ok(NominateOutput {
        json: to_json(&document),
        lp_text: model.to_lp_format(),
        document,
        exit_code,
    })
}

pub struct SimulateOutput {
    pub outcome: SimulationOutcome,
    pub table: String,
    pub replicates: String,
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

/// One row per `(alpha_truth, scheme)`.
pub fn simulation_table(rows: &[SimulationRow]) -> String {
    csv_text(
        &[
            "alpha_truth",
            "scheme",
            "mean_rr",
            "ci_halfwidth",
            "mean_max_rank",
            "reps_used",
            "limit_hits",
        ],
        rows.iter().map(|r| {
            vec![
                r.alpha_truth.to_string(),
                r.scheme.to_string(),
                r.mean_rr.to_string(),
                r.ci_halfwidth.to_string(),
                r.mean_max_rank.to_string(),
                r.reps_used.to_string(),
                r.limit_hits.to_string(),
            ]
        }),
    )
}

/// One row per `(alpha_truth, replicate)`.
pub fn replicate_table(records: &[ReplicateRecord]) -> String {
    csv_text(
        &[
            "alpha_truth",
            "replicate",
            "rr_ilp",
            "rr_ase",
            "rr_lse",
            "max_rank_ilp",
            "max_rank_ase",
            "max_rank_lse",
            "ilp_objective",
            "ilp_status",
        ],
        records.iter().map(|r| {
            let mut row = vec![r.alpha_truth.to_string(), r.replicate.to_string()];
            row.extend(Scheme::ALL.iter().map(|&s| r.rr_of(s).to_string()));
            row.extend(Scheme::ALL.iter().map(|&s| r.max_rank_of(s).to_string()));
            row.push(r.ilp_objective.to_string());
            row.push(r.ilp_status.to_string());
            row
        }),
    )
}

/// `case,score` file of one scheme's reciprocal ranks, ready for `compare`.
pub fn scheme_scores(records: &[ReplicateRecord], scheme: Scheme) -> String {
    csv_text(
        &["case", "score"],
        records.iter().map(|r| {
            vec![
                format!("a{}-r{}", r.alpha_truth, r.replicate),
                r.rr_of(scheme).to_string(),
            ]
        }),
    )
}

pub fn simulate(config_path: &Path) -> Result<SimulateOutput, CliError> {
    let cfg = parse_config(config_path, &read_text(config_path)?)?;
    let outcome = run_simulation(&cfg)?;
    Ok(SimulateOutput {
        table: simulation_table(&outcome.rows),
        replicates: replicate_table(&outcome.replicates),
        outcome,
    })
}

/// Pairs two score files by case (in the order of `a_path`) and tests
/// whether `a` scores higher.
pub fn compare(
    a_path: &Path,
    b_path: &Path,
    label_a: &str,
    label_b: &str,
) -> Result<ComparisonReport, CliError> {
    let a = parse_scores(a_path, &read_bytes(a_path)?)?;
    let b = parse_scores(b_path, &read_bytes(b_path)?)?;
    if a.len() != b.len() {
        return Err(CliError::Invalid(format!(
            "{} has {} cases but {} has {}",
            a_path.display(),
            a.len(),
            b_path.display(),
            b.len()
        )));
    }
    let lookup: std::collections::HashMap<&str, f64> =
        b.iter().map(|(c, s)| (c.as_str(), *s)).collect();
    let mut cases = Vec::with_capacity(a.len());
    let mut xs = Vec::with_capacity(a.len());
    let mut ys = Vec::with_capacity(a.len());
    for (case, score) in &a {
        let Some(&other) = lookup.get(case.as_str()) else {
            return Err(CliError::Invalid(format!(
                "case {case:?} missing from {}",
                b_path.display()
            )));
        };
        cases.push(case.clone());
        xs.push(*score);
        ys.push(other);
    }
    Ok(compare_paired(label_a, label_b, cases, xs, ys)?)
}

/// File stem of `path`, used as a default label.
pub fn stem_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
