use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::qos::QosTriple;

#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    pub service_id: String,
    pub qos: QosTriple,
}

/// Services available for sampling into problem instances.
#[derive(Debug, Clone, PartialEq)]
pub struct ServicePool {
    pub entries: Vec<PoolEntry>,
    /// Where the pool came from (file path, or a synthetic spec summary).
    pub source: String,
}

impl ServicePool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A CSV column addressed by 0-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

impl std::str::FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// Digits become an index, anything else a header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.trim().to_owned()),
        })
    }
}

/// Which columns hold response time, energy and cost.
///
/// QWS-style files have no energy attribute, so the mapping is always the
/// caller's choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub response_time: ColumnRef,
    pub energy: ColumnRef,
    pub cost: ColumnRef,
    /// Service label column; row numbers are used when absent.
    pub id: Option<ColumnRef>,
}

impl ColumnMap {
    /// Columns 1, 2, 3 for the triple; no id column.
    pub fn positional() -> Self {
        Self {
            response_time: ColumnRef::Index(1),
            energy: ColumnRef::Index(2),
            cost: ColumnRef::Index(3),
            id: None,
        }
    }

    pub fn with_id(mut self, id: ColumnRef) -> Self {
        self.id = Some(id);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoolError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("response time, energy and cost must map to three distinct columns")]
    DuplicateColumns,
    #[error("row {row} has no column {column}")]
    ShortRow { row: usize, column: usize },
    #[error("row {row}, column {column}: not a decimal number")]
    BadNumber { row: usize, column: usize },
    #[error("row {row}, column {column}: value must be finite and non-negative")]
    InvalidValue { row: usize, column: usize },
    #[error("no data rows")]
    EmptyFile,
    #[error("malformed CSV: {0}")]
    Csv(String),
}

fn resolve(col: &ColumnRef, headers: Option<&csv::StringRecord>) -> Result<usize, PoolError> {
    match col {
        ColumnRef::Index(i) => Ok(*i),
        ColumnRef::Name(name) => headers
            .and_then(|h| h.iter().position(|c| c.trim() == name))
            .ok_or_else(|| PoolError::MissingColumn(name.clone())),
    }
}

pub fn load_service_pool_csv(
    path: impl AsRef<Path>,
    map: &ColumnMap,
    has_header: bool,
) -> Result<ServicePool, PoolError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| PoolError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_service_pool_csv(file, map, has_header, &path.display().to_string())
}

/// Parses comma-separated rows; `#` lines are comments. Data rows are
/// numbered from 1, columns from 0.
pub fn parse_service_pool_csv<R: Read>(
    reader: R,
    map: &ColumnMap,
    has_header: bool,
    source: &str,
) -> Result<ServicePool, PoolError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = if has_header {
        Some(rdr.headers().map_err(|e| PoolError::Csv(e.to_string()))?.clone())
    } else {
        None
    };
    let cols = [
        resolve(&map.response_time, headers.as_ref())?,
        resolve(&map.energy, headers.as_ref())?,
        resolve(&map.cost, headers.as_ref())?,
    ];
    if cols[0] == cols[1] || cols[1] == cols[2] || cols[0] == cols[2] {
        return Err(PoolError::DuplicateColumns);
    }
    let id_col = map.id.as_ref().map(|c| resolve(c, headers.as_ref())).transpose()?;

    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| PoolError::Csv(e.to_string()))?;
        let mut vals = [0.0; 3];
        for (v, &column) in vals.iter_mut().zip(&cols) {
            let field = rec.get(column).ok_or(PoolError::ShortRow { row, column })?;
            let x: f64 = field.parse().map_err(|_| PoolError::BadNumber { row, column })?;
            if !x.is_finite() || x < 0.0 {
                return Err(PoolError::InvalidValue { row, column });
            }
            *v = x;
        }
        let service_id = match id_col {
            Some(column) => rec.get(column).ok_or(PoolError::ShortRow { row, column })?.to_owned(),
            None => row.to_string(),
        };
        entries.push(PoolEntry { service_id, qos: QosTriple::from_array(vals) });
    }
    if entries.is_empty() {
        return Err(PoolError::EmptyFile);
    }
    Ok(ServicePool { entries, source: source.to_owned() })
}

/// `service_id,response_time,energy,cost` CSV, readable back with
/// `ColumnMap::positional().with_id(ColumnRef::Index(0))` and a header.
pub fn write_service_pool_csv(pool: &ServicePool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["service_id", "response_time", "energy", "cost"];
    w.write_record(header).expect("in-memory write");
    for e in &pool.entries {
        let q = e.qos;
        let row = [
            e.service_id.clone(),
            format!("{:?}", q.response_time),
            format!("{:?}", q.energy),
            format!("{:?}", q.cost),
        ];
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
