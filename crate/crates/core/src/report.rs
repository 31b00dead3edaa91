//! Descriptive statistics per thread, distributions, and correlation summaries.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Thread;
use crate::partition::StreamPartition;
use crate::stream::LinkStream;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("cannot build a distribution from no samples")]
    EmptySample,
    #[error("sample contains NaN")]
    NotANumber,
    #[error("the stream has no linked pair")]
    NoLinkedPairs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreadStats {
    pub part: u32,
    pub label: String,
    pub n_messages: usize,
    pub n_events: usize,
    pub n_authors: usize,
    pub n_distinct_pairs: usize,
    pub duration: i64,
}

/// One record per part. Message counts come from the thread whose root id
/// labels the part; parts without a matching thread report zero messages.
pub fn thread_stats(partition: &StreamPartition, threads: &[Thread]) -> Vec<ThreadStats> {
    let by_root: HashMap<&str, &Thread> = threads.iter().map(|t| (t.root.as_str(), t)).collect();
    partition
        .parts()
        .iter()
        .map(|part| {
            let pairs: BTreeSet<_> = partition.part_events(part).map(|e| e.pair()).collect();
            ThreadStats {
                part: part.id.0,
                label: part.label.clone(),
                n_messages: by_root.get(part.label.as_str()).map_or(0, |t| t.members.len()),
                n_events: part.events.len(),
                n_authors: part.nodes.len(),
                n_distinct_pairs: pairs.len(),
                duration: part.duration(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcdfPoint {
    pub value: f64,
    /// Number of samples `>= value`.
    pub count_ge: usize,
    pub fraction: f64,
}

/// `P(X >= x)` at every distinct sample value, ascending in `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ccdf {
    pub samples: usize,
    pub points: Vec<CcdfPoint>,
}

pub fn ccdf(samples: &[f64]) -> Result<Ccdf, ReportError> {
    if samples.is_empty() {
        return Err(ReportError::EmptySample);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(ReportError::NotANumber);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut points = Vec::new();
    let mut k = 0;
    while k < n {
        let x = sorted[k];
        points.push(CcdfPoint {
            value: x,
            count_ge: n - k,
            fraction: (n - k) as f64 / n as f64,
        });
        while k < n && sorted[k] == x {
            k += 1;
        }
    }
    Ok(Ccdf { samples: n, points })
}

/// Pooled inter-contact gaps of every linked pair. Boundary gaps (from `alpha`
/// to the first contact and from the last contact to `omega`) are excluded
/// unless requested.
pub fn intercontact_gaps(stream: &LinkStream, include_boundary: bool) -> Result<Vec<i64>, ReportError> {
    let groups = stream.pair_groups();
    if groups.is_empty() {
        return Err(ReportError::NoLinkedPairs);
    }
    let mut gaps = Vec::new();
    for (_, times) in groups {
        if include_boundary {
            gaps.push(times[0] - stream.alpha());
        }
        gaps.extend(times.windows(2).map(|w| w[1] - w[0]));
        if include_boundary {
            gaps.push(stream.omega() - times[times.len() - 1]);
        }
    }
    Ok(gaps)
}

pub fn intercontact_distribution(stream: &LinkStream, include_boundary: bool) -> Result<Ccdf, ReportError> {
    let gaps = intercontact_gaps(stream, include_boundary)?;
    let samples: Vec<f64> = gaps.into_iter().map(|g| g as f64).collect();
    ccdf(&samples)
}

/// A correlation coefficient, or why it is missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Coefficient {
    Value(f64),
    Omitted { omitted: &'static str },
}

impl Coefficient {
    pub fn value(&self) -> Option<f64> {
        match self {
            Coefficient::Value(v) => Some(*v),
            Coefficient::Omitted { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub x_name: String,
    pub y_name: String,
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
    pub pearson: Coefficient,
    pub spearman: Coefficient,
}

fn pearson(points: &[(f64, f64)]) -> Coefficient {
    if points.len() < 2 {
        return Coefficient::Omitted {
            omitted: "fewer than 2 points",
        };
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Coefficient::Omitted {
            omitted: "zero variance",
        };
    }
    Coefficient::Value(sxy / (sxx * syy).sqrt())
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut out = vec![0.0; values.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[k]] {
            end += 1;
        }
        let rank = (k + end) as f64 / 2.0 + 1.0;
        for &i in &order[k..=end] {
            out[i] = rank;
        }
        k = end + 1;
    }
    out
}

fn spearman(points: &[(f64, f64)]) -> Coefficient {
    if points.len() < 2 {
        return Coefficient::Omitted {
            omitted: "fewer than 2 points",
        };
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ranked: Vec<(f64, f64)> = ranks(&xs).into_iter().zip(ranks(&ys)).collect();
    pearson(&ranked)
}

/// Scatter of two per-thread metrics with Pearson and Spearman coefficients.
pub fn correlation_table(x_name: &str, y_name: &str, points: Vec<(f64, f64)>) -> CorrelationTable {
    CorrelationTable {
        x_name: x_name.to_owned(),
        y_name: y_name.to_owned(),
        pearson: pearson(&points),
        spearman: spearman(&points),
        points,
    }
}

/// Fraction of threads with at least as many messages as authors.
pub fn messages_at_least_authors(stats: &[ThreadStats]) -> Option<f64> {
    if stats.is_empty() {
        return None;
    }
    let hits = stats.iter().filter(|s| s.n_messages >= s.n_authors).count();
    Some(hits as f64 / stats.len() as f64)
}
