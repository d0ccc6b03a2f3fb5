//! Text formats read and written by the commands.
//!
//! * Dissimilarity CSV: header `id,d1,...,dJ`, one row per non-query item.
//! * Id lists (supervision and hold-out files): one id per line; blank lines
//!   and lines starting with `#` are ignored.
//! * Experiment config: `key = value` lines whose keys are the
//!   [`ExperimentConfig`] field names; `#` starts a comment. Missing keys keep
//!   their default values.
//! * Score files for `compare`: CSV with header `case,score`.
//! * JSON documents: floats are written with 17 significant digits.

use std::collections::{HashMap, HashSet};
use std::io;
use std::path::Path;

use nomilp::eval::{ExperimentConfig, SimulationMode};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::CliError;

/// Parsed dissimilarity CSV. `rows[i]` belongs to `ids[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityTable {
    pub ids: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DissimilarityTable {
    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect()
    }
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    let line = err.position().map_or(0, |p| p.line());
    CliError::parse(path, line, err.to_string())
}

fn parse_number(path: &Path, line: u64, column: &str, field: &str) -> Result<f64, CliError> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::parse(
            path,
            line,
            format!("column {column}: {field:?} is not a finite number"),
        )),
    }
}

pub fn parse_dissimilarity_csv(path: &Path, bytes: &[u8]) -> Result<DissimilarityTable, CliError> {
    let mut rdr = csv_reader(bytes);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.is_empty() || &header[0] != "id" {
        return Err(CliError::parse(path, 1, "header must start with `id`"));
    }
    if header.len() < 2 {
        return Err(CliError::parse(
            path,
            1,
            "header names no dissimilarity columns",
        ));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(CliError::parse(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(CliError::parse(path, line, "empty id"));
        }
        if !seen.insert(id.to_owned()) {
            return Err(CliError::parse(path, line, format!("duplicate id {id:?}")));
        }
        let values = record
            .iter()
            .skip(1)
            .zip(&columns)
            .map(|(field, col)| parse_number(path, line, col, field))
            .collect::<Result<Vec<_>, _>>()?;
        ids.push(id.to_owned());
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(CliError::parse(path, 2, "no data rows"));
    }
    Ok(DissimilarityTable { ids, columns, rows })
}

/// Row indices of the ids listed in `text`, in file order, duplicates kept.
pub fn parse_id_list(
    path: &Path,
    text: &str,
    index: &HashMap<&str, usize>,
) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let id = raw.trim();
        if id.is_empty() || id.starts_with('#') {
            continue;
        }
        match index.get(id) {
            Some(&row) => out.push(row),
            None => {
                return Err(CliError::parse(
                    path,
                    i as u64 + 1,
                    format!("unknown id {id:?}"),
                ))
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: no ids listed",
            path.display()
        )));
    }
    Ok(out)
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn parse_grid(value: &str) -> Option<Vec<f64>> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .unwrap_or(value);
    inner
        .split(',')
        .map(|x| x.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect()
}

/// Reads a `key = value` experiment config and validates it.
pub fn parse_config(path: &Path, text: &str) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::parse(path, line_no, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_owned()) {
            return Err(CliError::parse(
                path,
                line_no,
                format!("duplicate key {key}"),
            ));
        }
        let bad = || CliError::parse(path, line_no, format!("invalid value {value:?} for {key}"));
        match key {
            "n" => cfg.n = value.parse().map_err(|_| bad())?,
            "k" => cfg.k = value.parse().map_err(|_| bad())?,
            "alpha_truth_grid" => cfg.alpha_truth_grid = parse_grid(value).ok_or_else(bad)?,
            "s_size" => cfg.s_size = value.parse().map_err(|_| bad())?,
            "star_size" => cfg.star_size = value.parse().map_err(|_| bad())?,
            "monte_carlo_reps" => cfg.monte_carlo_reps = value.parse().map_err(|_| bad())?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
            "m_embed" => cfg.m_embed = value.parse().map_err(|_| bad())?,
            "mode" => cfg.mode = value.parse::<SimulationMode>().map_err(|_| bad())?,
            "node_limit" => cfg.node_limit = value.parse().map_err(|_| bad())?,
            "exclude_limit_hits" => cfg.exclude_limit_hits = parse_bool(value).ok_or_else(bad)?,
            other => {
                return Err(CliError::parse(
                    path,
                    line_no,
                    format!("unknown key {other}"),
                ));
            }
        }
    }
    cfg.validate()
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

/// Inverse of [`parse_config`].
pub fn format_config(cfg: &ExperimentConfig) -> String {
    let grid: Vec<String> = cfg.alpha_truth_grid.iter().map(f64::to_string).collect();
    format!(
        "n = {}\nk = {}\nalpha_truth_grid = {}\ns_size = {}\nstar_size = {}\n\
         monte_carlo_reps = {}\nseed = {}\nm_embed = {}\nmode = {}\nnode_limit = {}\n\
         exclude_limit_hits = {}\n",
        cfg.n,
        cfg.k,
        grid.join(", "),
        cfg.s_size,
        cfg.star_size,
        cfg.monte_carlo_reps,
        cfg.seed,
        cfg.m_embed,
        cfg.mode,
        cfg.node_limit,
        cfg.exclude_limit_hits
    )
}

/// `(case, score)` pairs from a `case,score` CSV.
pub fn parse_scores(path: &Path, bytes: &[u8]) -> Result<Vec<(String, f64)>, CliError> {
    let mut rdr = csv_reader(bytes);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["case", "score"] {
        return Err(CliError::parse(path, 1, "header must be `case,score`"));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(CliError::parse(
                path,
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        if !seen.insert(record[0].to_owned()) {
            return Err(CliError::parse(
                path,
                line,
                format!("duplicate case {:?}", &record[0]),
            ));
        }
        out.push((
            record[0].to_owned(),
            parse_number(path, line, "score", &record[1])?,
        ));
    }
    Ok(out)
}

/// Pretty JSON layout with every float written as `{:.16e}`.
struct Sig17(PrettyFormatter<'static>);

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as indented JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("documents contain only string keys");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
