//! Plot-ready CSV and report tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::scenario::ScenarioRecord;
use super::stats::{summarize_stats, SummaryStats};
use crate::qos::QosTriple;

pub const RESULTS_HEADER: &str =
    "algorithm,instance,level,seed,best_fitness,agg_response_time,agg_energy,agg_cost,evaluations,wall_time_s";

/// Placeholder written to `wall_time_s` when timing is suppressed.
pub const NO_TIMING: &str = "NA";

/// One row of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: String,
    pub instance: String,
    pub level: usize,
    pub seed: u64,
    pub best_fitness: f64,
    pub aggregate: QosTriple,
    pub evaluations: u64,
    pub wall_time_s: Option<f64>,
}

impl From<&ScenarioRecord> for ResultRow {
    fn from(r: &ScenarioRecord) -> Self {
        ResultRow {
            algorithm: r.record.algorithm.name().to_owned(),
            instance: r.record.instance.clone(),
            level: r.level,
            seed: r.record.seed,
            best_fitness: r.record.best_fitness,
            aggregate: r.aggregate,
            evaluations: r.record.evaluations,
            wall_time_s: Some(r.record.wall_time_s),
        }
    }
}

/// Which quantity of a result row to summarize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Fitness,
    ResponseTime,
    Energy,
    Cost,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Fitness, Metric::ResponseTime, Metric::Energy, Metric::Cost];

    pub fn of(self, row: &ResultRow) -> f64 {
        match self {
            Metric::Fitness => row.best_fitness,
            Metric::ResponseTime => row.aggregate.response_time,
            Metric::Energy => row.aggregate.energy,
            Metric::Cost => row.aggregate.cost,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Fitness => "fitness",
            Metric::ResponseTime => "response_time",
            Metric::Energy => "energy",
            Metric::Cost => "cost",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric `{s}` (fitness, response_time, energy, cost)"))
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Header plus one row per record; reals with six decimals. With `timing`
/// off the wall-time column holds [`NO_TIMING`] so output is reproducible.
pub fn emit_results_csv(rows: &[ResultRow], timing: bool) -> String {
    let mut w = csv_writer();
    w.write_record(RESULTS_HEADER.split(',')).expect("in-memory write");
    for r in rows {
        let wall = match (timing, r.wall_time_s) {
            (true, Some(t)) => format!("{t:.6}"),
            _ => NO_TIMING.to_owned(),
        };
        w.write_record([
            r.algorithm.clone(),
            r.instance.clone(),
            r.level.to_string(),
            r.seed.to_string(),
            format!("{:.6}", r.best_fitness),
            format!("{:.6}", r.aggregate.response_time),
            format!("{:.6}", r.aggregate.energy),
            format!("{:.6}", r.aggregate.cost),
            r.evaluations.to_string(),
            wall,
        ])
        .expect("in-memory write");
    }
    into_string(w)
}

/// Records as result rows.
pub fn result_rows(records: &[ScenarioRecord]) -> Vec<ResultRow> {
    records.iter().map(ResultRow::from).collect()
}

/// Long-format convergence traces: one row per record and generation,
/// generation 0 being the initial population.
pub fn emit_traces_csv(records: &[ScenarioRecord]) -> String {
    let mut w = csv_writer();
    w.write_record(["algorithm", "instance", "level", "seed", "generation", "best_fitness"])
        .expect("in-memory write");
    for r in records {
        for (g, f) in r.record.trace.iter().enumerate() {
            w.write_record([
                r.record.algorithm.name().to_owned(),
                r.record.instance.clone(),
                r.level.to_string(),
                r.record.seed.to_string(),
                g.to_string(),
                format!("{f:.6}"),
            ])
            .expect("in-memory write");
        }
    }
    into_string(w)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResultsParseError {
    #[error("header does not match the results schema")]
    BadHeader,
    #[error("row {row}, column {column}: {message}")]
    BadField { row: usize, column: usize, message: String },
    #[error("malformed CSV: {0}")]
    Csv(String),
}

/// Reads a results CSV written by [`emit_results_csv`]. Rows are numbered
/// from 1.
pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>, ResultsParseError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| ResultsParseError::Csv(e.to_string()))?;
    if header.iter().ne(RESULTS_HEADER.split(',')) {
        return Err(ResultsParseError::BadHeader);
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| ResultsParseError::Csv(e.to_string()))?;
        fn field<T: FromStr>(rec: &csv::StringRecord, row: usize, column: usize) -> Result<T, ResultsParseError> {
            let raw = rec.get(column).unwrap_or("");
            raw.parse().map_err(|_| ResultsParseError::BadField {
                row,
                column,
                message: format!("cannot parse `{raw}`"),
            })
        }
        let wall = match rec.get(9) {
            Some(NO_TIMING) | Some("") | None => None,
            Some(_) => Some(field(&rec, row, 9)?),
        };
        out.push(ResultRow {
            algorithm: rec[0].to_owned(),
            instance: rec[1].to_owned(),
            level: field(&rec, row, 2)?,
            seed: field(&rec, row, 3)?,
            best_fitness: field(&rec, row, 4)?,
            aggregate: QosTriple::new(field(&rec, row, 5)?, field(&rec, row, 6)?, field(&rec, row, 7)?),
            evaluations: field(&rec, row, 8)?,
            wall_time_s: wall,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("group `{0}` has no records")]
pub struct EmptyGroup(pub String);

/// Values of `metric` grouped by algorithm, groups in first-seen order.
pub fn group_by_algorithm(rows: &[ResultRow], metric: Metric) -> Vec<(String, Vec<f64>)> {
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(name, _)| *name == r.algorithm) {
            Some((_, vals)) => vals.push(metric.of(r)),
            None => groups.push((r.algorithm.clone(), vec![metric.of(r)])),
        }
    }
    groups
}

/// Values of `metric` keyed by level, then grouped by algorithm.
pub fn group_by_level(rows: &[ResultRow], metric: Metric) -> BTreeMap<usize, Vec<(String, Vec<f64>)>> {
    let mut levels: BTreeMap<usize, Vec<ResultRow>> = BTreeMap::new();
    for r in rows {
        levels.entry(r.level).or_default().push(r.clone());
    }
    levels.into_iter().map(|(l, rs)| (l, group_by_algorithm(&rs, metric))).collect()
}

fn summarize_groups(groups: &[(String, Vec<f64>)]) -> Result<Vec<(String, SummaryStats)>, EmptyGroup> {
    groups
        .iter()
        .map(|(name, vals)| {
            summarize_stats(vals).map(|s| (name.clone(), s)).map_err(|_| EmptyGroup(name.clone()))
        })
        .collect()
}

/// Five-number summary, mean and std per group, one CSV row each.
pub fn emit_boxplot_data(groups: &[(String, Vec<f64>)]) -> Result<String, EmptyGroup> {
    let stats = summarize_groups(groups)?;
    let mut w = csv_writer();
    w.write_record(["group", "count", "min", "q1", "median", "q3", "max", "mean", "std"])
        .expect("in-memory write");
    for (name, s) in stats {
        let mut rec = vec![name, s.count.to_string()];
        rec.extend([s.min, s.q1, s.median, s.q3, s.max, s.mean, s.std].map(|v| format!("{v:.6}")));
        w.write_record(&rec).expect("in-memory write");
    }
    Ok(into_string(w))
}

/// Fixed-point with `decimals` places, or scientific notation for
/// magnitudes where fixed-point stops being readable.
fn table_number(v: f64, decimals: usize) -> String {
    if v.abs() >= 1e9 {
        format!("{v:.decimals$e}")
    } else {
        format!("{v:.decimals$}")
    }
}

/// Mean / standard deviation table with one column per group: means with
/// four decimals, deviations with five.
pub fn format_mean_std_table(title: &str, groups: &[(String, Vec<f64>)]) -> Result<String, EmptyGroup> {
    let stats = summarize_groups(groups)?;
    let cells: Vec<(String, String, String)> = stats
        .iter()
        .map(|(name, s)| (name.clone(), table_number(s.mean, 4), table_number(s.std, 5)))
        .collect();
    let label_w = "Std. Deviation".len();
    let col_w = cells.iter().map(|(n, m, s)| n.len().max(m.len()).max(s.len())).max().unwrap_or(0) + 2;
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let mut row = |label: &str, pick: &dyn Fn(&(String, String, String)) -> String| {
        let _ = write!(out, "{label:label_w$}");
        for c in &cells {
            let _ = write!(out, "{:>col_w$}", pick(c));
        }
        out.push('\n');
    };
    row("", &|c| c.0.to_uppercase());
    row("Mean", &|c| c.1.clone());
    row("Std. Deviation", &|c| c.2.clone());
    Ok(out)
}
