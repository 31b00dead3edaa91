//! Graph density and the delta-density of a link stream.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::StaticGraph;
use crate::stream::{LinkEvent, LinkStream, NodeId, Timestamp};

/// A window length in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delta(i64);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeltaParseError {
    #[error("empty duration")]
    Empty,
    #[error("invalid duration `{0}`: expected an integer with optional unit s, m, h, d, w or y")]
    Invalid(String),
    #[error("duration `{0}` overflows")]
    Overflow(String),
}

const UNITS: [(char, i64); 6] = [
    ('y', 365 * 86_400),
    ('w', 7 * 86_400),
    ('d', 86_400),
    ('h', 3_600),
    ('m', 60),
    ('s', 1),
];

impl Delta {
    pub const MINUTE: Delta = Delta(60);
    pub const HOUR: Delta = Delta(3_600);
    pub const DAY: Delta = Delta(86_400);
    pub const WEEK: Delta = Delta(7 * 86_400);
    pub const YEAR: Delta = Delta(365 * 86_400);

    /// Panics on a negative length.
    pub fn seconds(s: i64) -> Self {
        assert!(s >= 0, "negative delta {s}");
        Delta(s)
    }

    pub fn as_secs(self) -> i64 {
        self.0
    }

    /// Compact label using the largest unit that divides the length exactly.
    pub fn label(self) -> String {
        if self.0 == 0 {
            return "0s".into();
        }
        for (unit, secs) in UNITS {
            if self.0 % secs == 0 {
                return format!("{}{}", self.0 / secs, unit);
            }
        }
        unreachable!("seconds divide everything")
    }

    /// Parses a comma-separated list such as `1m,1h,1d,1w,30d,1y,20y`.
    pub fn parse_list(s: &str) -> Result<Vec<Delta>, DeltaParseError> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for Delta {
    type Err = DeltaParseError;

    /// Accepts plain seconds or a unit suffix; `y` is 365 days.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let last = s.chars().last().ok_or(DeltaParseError::Empty)?;
        let (digits, mult) = match UNITS.iter().find(|(u, _)| *u == last) {
            Some(&(_, m)) => (&s[..s.len() - 1], m),
            None => (s, 1),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(DeltaParseError::Invalid(s.to_owned()));
        }
        let n: i64 = digits
            .parse()
            .map_err(|_| DeltaParseError::Overflow(s.to_owned()))?;
        n.checked_mul(mult)
            .map(Delta)
            .ok_or_else(|| DeltaParseError::Overflow(s.to_owned()))
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.0)
    }
}

/// Why a density could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// Fewer than two nodes, so there is no pair to sample.
    TooFewNodes,
    /// Zero-length interval where a positive one is required.
    ZeroDuration,
    /// Every term of an aggregate had an empty denominator.
    ZeroDenominator,
}

/// An exact density in `[0, 1]`, or a marker explaining why none exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityValue {
    Exact(BigRational),
    Degenerate(Degeneracy),
}

impl DensityValue {
    pub fn from_ratio(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        DensityValue::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        DensityValue::Exact(BigRational::zero())
    }

    pub fn ratio(&self) -> Option<&BigRational> {
        match self {
            DensityValue::Exact(r) => Some(r),
            DensityValue::Degenerate(_) => None,
        }
    }

    pub fn numerator(&self) -> Option<&BigInt> {
        self.ratio().map(|r| r.numer())
    }

    pub fn denominator(&self) -> Option<&BigInt> {
        self.ratio().map(|r| r.denom())
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.ratio().and_then(ToPrimitive::to_f64)
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, DensityValue::Degenerate(_))
    }

    /// `numerator/denominator`, or the degeneracy name.
    pub fn exact_string(&self) -> String {
        match self {
            DensityValue::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
            DensityValue::Degenerate(d) => format!("{d:?}"),
        }
    }
}

impl fmt::Display for DensityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_f64() {
            Some(x) => write!(f, "{x}"),
            None => write!(f, "{}", self.exact_string()),
        }
    }
}

/// `2m / (n (n - 1))` for `m` distinct linked pairs among `n` nodes.
pub fn pair_density(n: usize, linked_pairs: usize) -> DensityValue {
    if n < 2 {
        return DensityValue::Degenerate(Degeneracy::TooFewNodes);
    }
    let n = n as i128;
    DensityValue::from_ratio(2 * linked_pairs as i128, n * (n - 1))
}

/// Probability that two distinct random vertices are adjacent.
pub fn graph_density(g: &StaticGraph) -> DensityValue {
    pair_density(g.vertex_count(), g.edge_count())
}

/// Sorted inter-contact gaps of every linked pair of a stream, with suffix sums,
/// so that the clipped gap total can be read off for any window length.
#[derive(Debug, Clone)]
pub struct GapProfile {
    n_nodes: usize,
    duration: i64,
    linked_pairs: usize,
    gaps: Vec<i64>,
    /// `suffix[k] = gaps[k..].sum()`, with a trailing 0.
    suffix: Vec<i128>,
}

impl GapProfile {
    /// `events` must be time-ordered, lie in `[alpha, omega]`, and only touch
    /// nodes counted in `n_nodes`.
    pub fn from_events<'a, I>(n_nodes: usize, alpha: Timestamp, omega: Timestamp, events: I) -> Self
    where
        I: IntoIterator<Item = &'a LinkEvent>,
    {
        let mut last: HashMap<(NodeId, NodeId), Timestamp> = HashMap::new();
        let mut gaps = Vec::new();
        for e in events {
            let prev = last.entry(e.pair()).or_insert(alpha);
            debug_assert!(e.t >= *prev, "events out of order");
            gaps.push(e.t - *prev);
            *prev = e.t;
        }
        let linked_pairs = last.len();
        gaps.extend(last.into_values().map(|t| omega - t));
        Self::from_gaps(n_nodes, omega - alpha, linked_pairs, gaps)
    }

    pub fn from_stream(stream: &LinkStream) -> Self {
        Self::from_events(
            stream.node_count(),
            stream.alpha(),
            stream.omega(),
            stream.events(),
        )
    }

    fn from_gaps(n_nodes: usize, duration: i64, linked_pairs: usize, mut gaps: Vec<i64>) -> Self {
        gaps.sort_unstable();
        let mut suffix = vec![0i128; gaps.len() + 1];
        for k in (0..gaps.len()).rev() {
            suffix[k] = suffix[k + 1] + gaps[k] as i128;
        }
        Self {
            n_nodes,
            duration,
            linked_pairs,
            gaps,
            suffix,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n_nodes
    }

    pub fn duration(&self) -> i64 {
        self.duration
    }

    pub fn linked_pairs(&self) -> usize {
        self.linked_pairs
    }

    /// Largest gap over linked pairs, boundary gaps included.
    pub fn max_gap(&self) -> Option<i64> {
        self.gaps.last().copied()
    }

    fn all_pairs(&self) -> i128 {
        let n = self.n_nodes as i128;
        n * (n - 1) / 2
    }

    /// `sum over all pairs and gaps of max(0, g - delta)`, unlinked pairs counting
    /// one gap of the full duration. Assumes `delta < duration`.
    pub fn clipped_total(&self, delta: Delta) -> i128 {
        let d = delta.as_secs();
        let first = self.gaps.partition_point(|&g| g <= d);
        let above = (self.gaps.len() - first) as i128;
        let linked = self.suffix[first] - above * d as i128;
        let unlinked = self.all_pairs() - self.linked_pairs as i128;
        linked + unlinked * (self.duration - d) as i128
    }

    /// Numerator `2 * clipped_total` and denominator `n (n - 1) (duration - delta)`
    /// of the subtracted fraction; `None` when `delta >= duration` or `n < 2`.
    pub fn terms(&self, delta: Delta) -> Option<(i128, i128)> {
        if self.n_nodes < 2 || delta.as_secs() >= self.duration {
            return None;
        }
        let n = self.n_nodes as i128;
        Some((
            2 * self.clipped_total(delta),
            n * (n - 1) * (self.duration - delta.as_secs()) as i128,
        ))
    }

    /// `delta_density` for this gap set.
    pub fn density(&self, delta: Delta) -> DensityValue {
        if self.n_nodes < 2 {
            return DensityValue::Degenerate(Degeneracy::TooFewNodes);
        }
        match self.terms(delta) {
            Some((num, den)) => DensityValue::from_ratio(den - num, den),
            None => pair_density(self.n_nodes, self.linked_pairs),
        }
    }
}

/// Probability that a uniformly random pair of distinct nodes interacts during a
/// uniformly random window of length `delta` inside `[alpha, omega]`.
///
/// When `delta >= omega - alpha` no window fits; the value is then the density of
/// the induced graph taken over the full node set, which is the limit of the
/// formula as `delta` grows.
pub fn delta_density(stream: &LinkStream, delta: Delta) -> DensityValue {
    GapProfile::from_stream(stream).density(delta)
}

/// `delta_density` for each window length, sharing one gap computation.
pub fn delta_density_profile(stream: &LinkStream, deltas: &[Delta]) -> Vec<(Delta, DensityValue)> {
    let profile = GapProfile::from_stream(stream);
    deltas.iter().map(|&d| (d, profile.density(d))).collect()
}
