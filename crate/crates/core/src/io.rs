//! File formats: JSON for structured artifacts, CSV for result tables, and the
//! tab-separated MovieLens ratings file.
//!
//! Numbers in CSV and terminal output use [`format_number`]; JSON keeps the
//! shortest representation that round-trips exactly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{QuantileTable, Theorem1Table, TransferRow};
use crate::graph::{Graph, GraphSignal, Rating, RatingTable, MAX_RATING, MIN_RATING};
use crate::graphon::{KernelRange, StepGraphon};
use crate::homomorphism::{ConvergenceRow, Motif};
use crate::linalg::Matrix;
use crate::sampling::SampleLabels;
use crate::spectral::FourierCoefficients;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Decimal with 12 significant digits, trailing zeros kept. Scientific notation is
/// used when the decimal exponent is below -5 or at least 12.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeEntry {
    Weighted(usize, usize, f64),
    Plain(usize, usize),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<EdgeEntry>,
}

fn edge_triples(edges: &[EdgeEntry]) -> Vec<(usize, usize, f64)> {
    edges
        .iter()
        .map(|e| match *e {
            EdgeEntry::Weighted(i, j, w) => (i, j, w),
            EdgeEntry::Plain(i, j) => (i, j, 1.0),
        })
        .collect()
}

/// `{"n": 3, "edges": [[0, 1, 1.0], [1, 2]]}`; a missing weight means 1.
pub fn graph_from_json(s: &str) -> Result<Graph> {
    let f: GraphFile = serde_json::from_str(s)?;
    Graph::new(f.n, &edge_triples(&f.edges))
}

pub fn graph_to_json(g: &Graph) -> Result<String> {
    let f = GraphFile {
        n: g.n(),
        edges: g
            .edges()
            .into_iter()
            .map(|(i, j, w)| EdgeEntry::Weighted(i, j, w))
            .collect(),
    };
    Ok(serde_json::to_string(&f)?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledGraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<f64>,
    seed: u64,
    stream: u64,
}

/// Sampled graph with its latent labels and RNG provenance.
pub fn sampled_graph_to_json(g: &Graph, labels: &SampleLabels) -> Result<String> {
    let f = SampledGraphFile {
        n: g.n(),
        edges: g.edges().into_iter().map(|(i, j, _)| (i, j)).collect(),
        labels: labels.u.clone(),
        seed: labels.seed,
        stream: labels.stream,
    };
    Ok(serde_json::to_string(&f)?)
}

pub fn sampled_graph_from_json(s: &str) -> Result<(Graph, SampleLabels)> {
    let f: SampledGraphFile = serde_json::from_str(s)?;
    if f.labels.len() != f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            actual: f.labels.len(),
        });
    }
    let edges: Vec<_> = f.edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
    Ok((
        Graph::new(f.n, &edges)?,
        SampleLabels::new(f.labels, f.seed, f.stream)?,
    ))
}

/// A signal is a plain JSON array of numbers.
pub fn signal_from_json(s: &str) -> Result<GraphSignal> {
    GraphSignal::new(serde_json::from_str(s)?)
}

pub fn signal_to_json(x: &GraphSignal) -> Result<String> {
    Ok(serde_json::to_string(x.values())?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepGraphonFile {
    #[serde(rename = "N")]
    blocks: usize,
    range: (f64, f64),
    values: Vec<Vec<f64>>,
}

/// `{"N": 2, "range": [0, 1], "values": [[..], [..]]}`
pub fn step_graphon_from_json(s: &str) -> Result<StepGraphon> {
    let f: StepGraphonFile = serde_json::from_str(s)?;
    if f.values.len() != f.blocks {
        return Err(Error::DimensionMismatch {
            expected: f.blocks,
            actual: f.values.len(),
        });
    }
    let values = Matrix::from_rows(&f.values)?;
    StepGraphon::new(values, KernelRange::new(f.range.0, f.range.1)?)
}

pub fn step_graphon_to_json(w: &StepGraphon) -> Result<String> {
    let f = StepGraphonFile {
        blocks: w.blocks(),
        range: (w.range().lo, w.range().hi),
        values: w.values().to_rows(),
    };
    Ok(serde_json::to_string(&f)?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MotifFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// `{"n": 3, "edges": [[0, 1], [1, 2], [2, 0]]}` with an optional `"name"`.
pub fn motif_from_json(s: &str) -> Result<Motif> {
    let f: MotifFile = serde_json::from_str(s)?;
    match f.name {
        Some(name) => Motif::named(name, f.n, f.edges),
        None => Motif::new(f.n, f.edges),
    }
}

pub fn motif_to_json(m: &Motif) -> Result<String> {
    let f = MotifFile {
        name: Some(m.name().to_string()),
        n: m.nodes(),
        edges: m.edges().to_vec(),
    };
    Ok(serde_json::to_string(&f)?)
}

pub fn coefficients_to_json(c: &FourierCoefficients) -> Result<String> {
    Ok(serde_json::to_string(c)?)
}

pub fn coefficients_from_json(s: &str) -> Result<FourierCoefficients> {
    Ok(serde_json::from_str(s)?)
}

/// `j,sigma,coeff` rows in spectrum order.
pub fn coefficients_to_csv(c: &FourierCoefficients) -> String {
    let mut out = String::from("j,sigma,coeff\n");
    for row in &c.coefficients {
        let _ = writeln!(
            out,
            "{},{},{}",
            row.index,
            format_number(row.sigma),
            format_number(row.value)
        );
    }
    out
}

pub fn pollution_csv(t: &QuantileTable) -> String {
    let mut out = String::from("n,q68,q95,q997\n");
    for r in &t.rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n,
            format_number(r.q68),
            format_number(r.q95),
            format_number(r.q997)
        );
    }
    out
}

pub fn movielens_csv(rows: &[TransferRow]) -> String {
    let mut out = String::from("n,mean_rel_diff,std_rel_diff\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.n,
            format_number(r.mean_rel_diff),
            format_number(r.std_rel_diff)
        );
    }
    out
}

pub fn theorem1_csv(t: &Theorem1Table) -> String {
    let mut out = String::from("n,median_error,mean_error\n");
    for r in &t.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.n,
            format_number(r.median_error),
            format_number(r.mean_error)
        );
    }
    out
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,motif,reference,mean_abs_error,stderr\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.motif,
            format_number(r.reference),
            format_number(r.mean_abs_error),
            format_number(r.stderr)
        );
    }
    out
}

/// Record of one run: the command, its full configuration, the seed and the library version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub version: String,
}

impl RunManifest {
    pub fn new(
        command: impl Into<String>,
        config: &impl Serialize,
        master_seed: u64,
    ) -> Result<Self> {
        Ok(Self {
            command: command.into(),
            config: serde_json::to_value(config)?,
            master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Parses `user<TAB>item<TAB>rating<TAB>timestamp` lines with 1-based ids.
///
/// The table is sized by the largest user and item ids seen. Blank lines are skipped.
pub fn parse_movielens_str(text: &str) -> Result<RatingTable> {
    let mut entries = Vec::new();
    let mut first_seen: HashMap<(usize, usize), usize> = HashMap::new();
    let (mut users, mut items) = (0, 0);
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!(
                "expected 4 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let id = |s: &str, what: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(err(format!("{what} id {s:?} is not a positive integer"))),
            }
        };
        let user = id(fields[0], "user")?;
        let item = id(fields[1], "item")?;
        let rating: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| err(format!("rating {:?} is not a number", fields[2])))?;
        if !(MIN_RATING..=MAX_RATING).contains(&rating) {
            return Err(err(format!(
                "rating {rating} outside [{MIN_RATING}, {MAX_RATING}]"
            )));
        }
        fields[3]
            .trim()
            .parse::<i64>()
            .map_err(|_| err(format!("timestamp {:?} is not an integer", fields[3])))?;
        if let Some(prev) = first_seen.insert((user, item), line_no) {
            return Err(err(format!(
                "duplicate rating for user {user}, item {item} (first on line {prev})"
            )));
        }
        users = users.max(user);
        items = items.max(item);
        entries.push(Rating {
            user: user - 1,
            item: item - 1,
            rating,
        });
    }
    if entries.is_empty() {
        return Err(Error::Data("no ratings".into()));
    }
    let table = RatingTable::new(users, items, entries)?;
    log::info!(
        "parsed {} ratings from {} users on {} items",
        table.entries().len(),
        users,
        items
    );
    Ok(table)
}

pub fn parse_movielens(path: impl AsRef<Path>) -> Result<RatingTable> {
    parse_movielens_str(&std::fs::read_to_string(path)?)
}

/// Writes a table back in the ratings-file layout with timestamp 0.
pub fn movielens_to_string(r: &RatingTable) -> String {
    let mut out = String::new();
    for e in r.entries() {
        let _ = writeln!(out, "{}\t{}\t{}\t0", e.user + 1, e.item + 1, e.rating);
    }
    out
}
