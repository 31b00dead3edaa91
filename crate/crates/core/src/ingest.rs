//! Message tables, reply-thread reconstruction, bias-correction filters, and
//! conversion of retained threads into a link stream and its thread partition.
//!
//! Input tables have the header `id,timestamp,author,parent` (comma- or
//! tab-separated). Timestamps are integer UTC seconds; an empty parent marks a
//! root message.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::partition::{partition_by_labels, PartitionError, StreamPartition};
use crate::stream::{LinkStream, StreamBuilder, StreamError, Timestamp};

const COLUMNS: [&str; 4] = ["id", "timestamp", "author", "parent"];

/// Two years of 365 days.
pub const TWO_YEARS: i64 = 730 * 86_400;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("missing column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("line {line}: timestamp `{value}` is not an integer")]
    BadTimestamp { line: u64, value: String },
    #[error("line {line}: duplicate message id `{id}`")]
    DuplicateId { line: u64, id: String },
    #[error("line {line}: empty message id")]
    EmptyId { line: u64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A message `m` with author `a(m)`, date `t(m)` and parent `p(m)`; roots have `parent == id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub id: String,
    pub author: String,
    pub time: Timestamp,
    pub parent: String,
}

impl Message {
    pub fn is_root(&self) -> bool {
        self.parent == self.id
    }
}

fn detect_delimiter(head: &[u8]) -> u8 {
    let first_line = head.split(|&b| b == b'\n').next().unwrap_or(&[]);
    if first_line.contains(&b'\t') {
        b'\t'
    } else {
        b','
    }
}

/// Reads a message table in file order. Duplicate ids are rejected.
pub fn parse_messages<R: Read>(mut input: R) -> Result<Vec<Message>, IngestError> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(&buf))
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(buf.as_slice());
    let header = reader.headers()?.clone();
    let mut col = [0usize; 4];
    for (slot, name) in col.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(IngestError::MissingColumn(name))?;
    }
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut messages = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IngestError::Malformed {
                line,
                reason: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(col[k]).unwrap_or("");
        let id = field(0).to_owned();
        if id.is_empty() {
            return Err(IngestError::EmptyId { line });
        }
        let raw_time = field(1);
        let time = raw_time
            .trim()
            .parse::<Timestamp>()
            .map_err(|_| IngestError::BadTimestamp {
                line,
                value: raw_time.to_owned(),
            })?;
        let parent = match field(3) {
            "" => id.clone(),
            p => p.to_owned(),
        };
        if seen.insert(id.clone(), ()).is_some() {
            return Err(IngestError::DuplicateId { line, id });
        }
        messages.push(Message {
            id,
            author: field(2).to_owned(),
            time,
            parent,
        });
    }
    Ok(messages)
}

/// Writes messages in the input format; roots get an empty parent field.
pub fn write_messages<'a, W, I>(out: W, messages: I) -> Result<(), IngestError>
where
    W: Write,
    I: IntoIterator<Item = &'a Message>,
{
    let mut writer = csv::WriterBuilder::new().from_writer(out);
    writer.write_record(COLUMNS)?;
    for m in messages {
        let time = m.time.to_string();
        let parent = if m.is_root() { "" } else { m.parent.as_str() };
        writer.write_record([m.id.as_str(), time.as_str(), m.author.as_str(), parent])?;
    }
    writer.flush()?;
    Ok(())
}

/// Where a thread's ancestor chains end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ThreadOrigin {
    /// A root message present in the corpus.
    Root,
    /// The chain reaches this parent id, which is absent from the corpus.
    Dangling(String),
    /// The chain loops; keyed by the smallest id on the loop.
    Cycle(String),
}

/// Status flags. Duration and start-cutoff checks are filled in by [`clean`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThreadStatus {
    pub consistent: bool,
    pub complete: bool,
    pub within_duration: Option<bool>,
    pub within_start_cutoff: Option<bool>,
}

/// The reply closure of a root: the root, its answers, their answers, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    /// Root message id; for a thread without a root in the corpus, its oldest member.
    pub root: String,
    pub origin: ThreadOrigin,
    /// Indices into the message list, in file order.
    pub members: Vec<usize>,
    pub start: Timestamp,
    pub end: Timestamp,
    pub status: ThreadStatus,
}

impl Thread {
    pub fn duration(&self) -> i64 {
        self.end - self.start
    }
}

#[derive(Clone)]
enum Walk {
    Unvisited,
    OnPath,
    Done(usize),
}

/// Groups every message into exactly one thread by following parent links.
///
/// Chains ending at a missing parent form an incomplete thread per missing id.
/// Loops make the thread inconsistent, as does any reply dated before its parent.
/// Threads are ordered by start time, then root id.
pub fn resolve_threads(messages: &[Message]) -> Vec<Thread> {
    let index: HashMap<&str, usize> = messages
        .iter()
        .enumerate()
        .map(|(k, m)| (m.id.as_str(), k))
        .collect();
    let mut origins: Vec<ThreadOrigin> = Vec::new();
    let mut origin_key: HashMap<(ThreadOrigin, usize), usize> = HashMap::new();
    let mut state = vec![Walk::Unvisited; messages.len()];

    for start in 0..messages.len() {
        if let Walk::Done(_) = state[start] {
            continue;
        }
        let mut path: Vec<usize> = Vec::new();
        let mut cur = start;
        let group = loop {
            match state[cur] {
                Walk::Done(g) => break g,
                Walk::OnPath => {
                    let pos = path.iter().position(|&p| p == cur).expect("on current path");
                    let key = path[pos..]
                        .iter()
                        .map(|&p| messages[p].id.as_str())
                        .min()
                        .expect("non-empty loop")
                        .to_owned();
                    break intern_origin(&mut origins, &mut origin_key, ThreadOrigin::Cycle(key), 0);
                }
                Walk::Unvisited => {
                    state[cur] = Walk::OnPath;
                    path.push(cur);
                    let m = &messages[cur];
                    if m.is_root() {
                        break intern_origin(&mut origins, &mut origin_key, ThreadOrigin::Root, cur);
                    }
                    match index.get(m.parent.as_str()) {
                        Some(&p) => cur = p,
                        None => {
                            break intern_origin(
                                &mut origins,
                                &mut origin_key,
                                ThreadOrigin::Dangling(m.parent.clone()),
                                0,
                            )
                        }
                    }
                }
            }
        };
        for p in path {
            state[p] = Walk::Done(group);
        }
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); origins.len()];
    for (k, s) in state.iter().enumerate() {
        match s {
            Walk::Done(g) => members[*g].push(k),
            _ => unreachable!("every message resolved"),
        }
    }

    let mut threads: Vec<Thread> = origins
        .into_iter()
        .zip(members)
        .map(|(origin, members)| build_thread(messages, origin, members))
        .collect();
    threads.sort_by(|a, b| (a.start, &a.root).cmp(&(b.start, &b.root)));
    threads
}

fn intern_origin(
    origins: &mut Vec<ThreadOrigin>,
    keys: &mut HashMap<(ThreadOrigin, usize), usize>,
    origin: ThreadOrigin,
    root_index: usize,
) -> usize {
    *keys.entry((origin.clone(), root_index)).or_insert_with(|| {
        origins.push(origin);
        origins.len() - 1
    })
}

fn build_thread(messages: &[Message], origin: ThreadOrigin, members: Vec<usize>) -> Thread {
    let start = members.iter().map(|&k| messages[k].time).min().expect("non-empty");
    let end = members.iter().map(|&k| messages[k].time).max().expect("non-empty");
    let root = match origin {
        ThreadOrigin::Root => members
            .iter()
            .find(|&&k| messages[k].is_root())
            .map(|&k| messages[k].id.clone())
            .expect("rooted thread contains its root"),
        _ => members
            .iter()
            .min_by_key(|&&k| (messages[k].time, k))
            .map(|&k| messages[k].id.clone())
            .expect("non-empty"),
    };
    let by_id: HashMap<&str, usize> = members.iter().map(|&k| (messages[k].id.as_str(), k)).collect();
    let time_ordered = members.iter().all(|&k| {
        let m = &messages[k];
        m.is_root()
            || by_id
                .get(m.parent.as_str())
                .map_or(true, |&p| messages[p].time <= m.time)
    });
    let status = ThreadStatus {
        consistent: time_ordered && !matches!(origin, ThreadOrigin::Cycle(_)),
        complete: !matches!(origin, ThreadOrigin::Dangling(_)),
        within_duration: None,
        within_start_cutoff: None,
    };
    Thread {
        root,
        origin,
        members,
        start,
        end,
        status,
    }
}

/// Which threads [`clean`] removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CleaningPolicy {
    /// Remove threads whose last message is more than this after the first.
    pub max_thread_duration: Option<i64>,
    /// Remove threads starting later than `window.end - start_cutoff`.
    pub start_cutoff: Option<i64>,
    pub drop_inconsistent: bool,
    pub drop_incomplete: bool,
    /// Also treat threads starting within this distance of the window start, or
    /// ending within it of the window end, as incomplete.
    pub incomplete_guard_band: Option<i64>,
}

impl Default for CleaningPolicy {
    fn default() -> Self {
        Self {
            max_thread_duration: Some(TWO_YEARS),
            start_cutoff: Some(TWO_YEARS),
            drop_inconsistent: true,
            drop_incomplete: true,
            incomplete_guard_band: None,
        }
    }
}

impl CleaningPolicy {
    /// Keeps everything.
    pub fn permissive() -> Self {
        Self {
            max_thread_duration: None,
            start_cutoff: None,
            drop_inconsistent: false,
            drop_incomplete: false,
            incomplete_guard_band: None,
        }
    }
}

/// Closed collection period `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CollectionWindow {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl CollectionWindow {
    /// Smallest window covering every message time.
    pub fn covering(messages: &[Message]) -> Option<Self> {
        let start = messages.iter().map(|m| m.time).min()?;
        let end = messages.iter().map(|m| m.time).max()?;
        Some(Self { start, end })
    }
}

/// Removed-thread counts, one reason per thread (the first that applies, in field order).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RemovalReport {
    pub incomplete: usize,
    pub inconsistent: usize,
    pub max_duration: usize,
    pub late_start: usize,
}

impl RemovalReport {
    pub fn total(&self) -> usize {
        self.incomplete + self.inconsistent + self.max_duration + self.late_start
    }
}

#[derive(Debug, Clone)]
pub struct CleanOutcome {
    pub kept: Vec<Thread>,
    pub report: RemovalReport,
}

/// Drops threads failing any enabled filter.
pub fn clean(
    threads: &[Thread],
    policy: &CleaningPolicy,
    window: CollectionWindow,
) -> CleanOutcome {
    let mut report = RemovalReport::default();
    let mut kept = Vec::new();
    for thread in threads {
        let mut t = thread.clone();
        let guard_incomplete = policy.incomplete_guard_band.is_some_and(|g| {
            t.start < window.start.saturating_add(g) || t.end > window.end.saturating_sub(g)
        });
        if guard_incomplete {
            t.status.complete = false;
        }
        let within_duration = policy.max_thread_duration.map_or(true, |m| t.duration() <= m);
        let within_cutoff = policy
            .start_cutoff
            .map_or(true, |c| t.start <= window.end.saturating_sub(c));
        t.status.within_duration = Some(within_duration);
        t.status.within_start_cutoff = Some(within_cutoff);

        if policy.drop_incomplete && !t.status.complete {
            report.incomplete += 1;
        } else if policy.drop_inconsistent && !t.status.consistent {
            report.inconsistent += 1;
        } else if !within_duration {
            report.max_duration += 1;
        } else if !within_cutoff {
            report.late_start += 1;
        } else {
            kept.push(t);
        }
    }
    CleanOutcome { kept, report }
}

/// Messages of the given threads, in file order.
pub fn retained_messages<'a>(threads: &[Thread], messages: &'a [Message]) -> Vec<&'a Message> {
    let mut idx: Vec<usize> = threads.iter().flat_map(|t| t.members.iter().copied()).collect();
    idx.sort_unstable();
    idx.into_iter().map(|k| &messages[k]).collect()
}

/// Messages that produced no link.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConversionDiagnostics {
    pub roots: usize,
    pub self_replies: usize,
    /// Replies whose parent is missing from the corpus.
    pub dangling: usize,
    /// Threads with no link at all; they have no part.
    pub linkless_threads: usize,
}

/// The stream `(t(m), a(m), a(p(m)))` over every reply of the given threads, and
/// its partition by thread (labelled with the thread's root id).
///
/// Every author of a retained message is a node, including authors whose messages
/// drew no reply. The interval is spanned by the first and last link.
pub fn to_stream_and_partition(
    threads: &[Thread],
    messages: &[Message],
) -> Result<(Arc<LinkStream>, Option<StreamPartition>, ConversionDiagnostics), IngestError> {
    let index: HashMap<&str, usize> = messages
        .iter()
        .enumerate()
        .map(|(k, m)| (m.id.as_str(), k))
        .collect();
    let mut diag = ConversionDiagnostics::default();
    let mut links: Vec<(Timestamp, &str, &str, usize)> = Vec::new();
    let mut authors: BTreeMap<&str, ()> = BTreeMap::new();
    for (ti, thread) in threads.iter().enumerate() {
        let before = links.len();
        for &k in &thread.members {
            let m = &messages[k];
            authors.insert(m.author.as_str(), ());
            if m.is_root() {
                diag.roots += 1;
                continue;
            }
            let Some(&p) = index.get(m.parent.as_str()) else {
                diag.dangling += 1;
                continue;
            };
            let parent_author = messages[p].author.as_str();
            if parent_author == m.author {
                diag.self_replies += 1;
                continue;
            }
            links.push((m.time, m.author.as_str(), parent_author, ti));
        }
        if links.len() == before {
            diag.linkless_threads += 1;
        }
    }

    let (alpha, omega) = match (
        links.iter().map(|l| l.0).min(),
        links.iter().map(|l| l.0).max(),
    ) {
        (Some(a), Some(o)) => (a, o),
        _ => {
            let window = threads
                .iter()
                .flat_map(|t| t.members.iter().map(|&k| messages[k].time));
            let (lo, hi) = window.fold((i64::MAX, i64::MIN), |(lo, hi), t| (lo.min(t), hi.max(t)));
            if lo > hi {
                (0, 0)
            } else {
                (lo, hi)
            }
        }
    };

    let mut builder: StreamBuilder<usize> = StreamBuilder::new(alpha, omega);
    for author in authors.keys() {
        builder.add_node(author);
    }
    for &(t, a, b, ti) in &links {
        builder.add_tagged(t, a, b, ti);
    }
    let (stream, tags, _) = builder.build()?;
    let stream = Arc::new(stream);
    if tags.is_empty() {
        return Ok((stream, None, diag));
    }
    let labels: Vec<Option<&str>> = tags.iter().map(|&ti| Some(threads[ti].root.as_str())).collect();
    let partition = partition_by_labels(Arc::clone(&stream), &labels)?;
    Ok((stream, Some(partition), diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(id: &str, t: i64, author: &str, parent: &str) -> Message {
        Message {
            id: id.into(),
            author: author.into(),
            time: t,
            parent: if parent.is_empty() { id.into() } else { parent.into() },
        }
    }

    #[test]
    fn parses_root_rows() {
        let ms = parse_messages("id,timestamp,author,parent\nm1,100,alice,\n".as_bytes()).unwrap();
        assert_eq!(ms, vec![msg("m1", 100, "alice", "")]);
        assert!(ms[0].is_root());
    }

    #[test]
    fn parses_replies_and_dangling_parents() {
        let input = "id,timestamp,author,parent\nm1,100,alice,\nm2,150,bob,m1\nm3,160,carol,mX\n";
        let ms = parse_messages(input.as_bytes()).unwrap();
        assert_eq!(ms.len(), 3);
        assert_eq!(ms[1].parent, "m1");
        assert_eq!(ms[2].parent, "mX");
    }

    #[test]
    fn parses_tsv_and_reordered_columns() {
        let input = "author\tparent\tid\ttimestamp\nalice\t\tm1\t5\n";
        let ms = parse_messages(input.as_bytes()).unwrap();
        assert_eq!(ms, vec![msg("m1", 5, "alice", "")]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_messages("id,timestamp,author,parent\nm1,1,a,\nm2,soon,b,m1\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, IngestError::BadTimestamp { line: 3, .. }), "{err}");

        let err = parse_messages("id,timestamp,author,parent\nm1,1,a,\nm1,2,b,\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId { line: 3, ref id } if id == "m1"));

        let err = parse_messages("id,timestamp,author\nm1,1,a\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn("parent")));

        let err = parse_messages("id,timestamp,author,parent\nm1,1,a\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 2, .. }), "{err}");
    }

    #[test]
    fn write_then_parse() {
        let ms = vec![msg("m1", 100, "alice", ""), msg("m2", 150, "bob, jr", "m1")];
        let mut out = Vec::new();
        write_messages(&mut out, &ms).unwrap();
        assert_eq!(parse_messages(out.as_slice()).unwrap(), ms);
    }

    #[test]
    fn closure_of_reply_chain() {
        let ms = vec![msg("m1", 1, "a", ""), msg("m2", 2, "b", "m1"), msg("m3", 3, "a", "m2")];
        let ts = resolve_threads(&ms);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].root, "m1");
        assert_eq!(ts[0].members, vec![0, 1, 2]);
        assert!(ts[0].status.consistent && ts[0].status.complete);
    }

    #[test]
    fn reply_before_parent_is_inconsistent() {
        let ms = vec![msg("m1", 100, "a", ""), msg("m2", 50, "b", "m1")];
        let ts = resolve_threads(&ms);
        assert_eq!(ts.len(), 1);
        assert!(!ts[0].status.consistent);
    }

    #[test]
    fn dangling_parent_is_incomplete() {
        let ms = vec![msg("m2", 10, "a", "mX"), msg("m3", 12, "b", "m2"), msg("m4", 11, "c", "mX")];
        let ts = resolve_threads(&ms);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].origin, ThreadOrigin::Dangling("mX".into()));
        assert_eq!(ts[0].root, "m2");
        assert!(!ts[0].status.complete);
        assert_eq!(ts[0].members.len(), 3);
    }

    #[test]
    fn loops_are_inconsistent() {
        let ms = vec![msg("a", 1, "x", "b"), msg("b", 2, "y", "a"), msg("c", 3, "z", "b")];
        let ts = resolve_threads(&ms);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].origin, ThreadOrigin::Cycle("a".into()));
        assert!(!ts[0].status.consistent);
        assert_eq!(ts[0].members.len(), 3);
    }

    #[test]
    fn every_message_in_exactly_one_thread() {
        let ms = vec![
            msg("r1", 1, "a", ""),
            msg("r2", 2, "b", ""),
            msg("x", 3, "c", "r2"),
            msg("y", 4, "a", "x"),
            msg("z", 5, "d", "r1"),
            msg("q", 6, "d", "gone"),
        ];
        let ts = resolve_threads(&ms);
        let mut all: Vec<usize> = ts.iter().flat_map(|t| t.members.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..ms.len()).collect::<Vec<_>>());
        assert_eq!(ts.len(), 3);
    }

    fn window(start: i64, end: i64) -> CollectionWindow {
        CollectionWindow { start, end }
    }

    #[test]
    fn long_thread_is_removed() {
        let year = 365 * 86_400;
        let ms = vec![msg("r", 0, "a", ""), msg("s", 3 * year, "b", "r")];
        let ts = resolve_threads(&ms);
        let out = clean(&ts, &CleaningPolicy::default(), window(0, 10 * year));
        assert!(out.kept.is_empty());
        assert_eq!(out.report.max_duration, 1);
    }

    #[test]
    fn short_early_thread_is_kept() {
        let year = 365 * 86_400;
        let ms = vec![msg("r", 0, "a", ""), msg("s", 86_400, "b", "r")];
        let ts = resolve_threads(&ms);
        let out = clean(&ts, &CleaningPolicy::default(), window(0, 5 * year));
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.report.total(), 0);
        assert_eq!(out.kept[0].status.within_duration, Some(true));
    }

    #[test]
    fn late_start_is_removed() {
        let ms = vec![msg("r", 95, "a", ""), msg("s", 96, "b", "r")];
        let ts = resolve_threads(&ms);
        let policy = CleaningPolicy {
            start_cutoff: Some(10),
            ..CleaningPolicy::default()
        };
        let out = clean(&ts, &policy, window(0, 100));
        assert_eq!(out.report.late_start, 1);
    }

    #[test]
    fn guard_band_marks_edge_threads_incomplete() {
        let ms = vec![msg("r", 1, "a", ""), msg("s", 2, "b", "r"), msg("u", 50, "a", "")];
        let ts = resolve_threads(&ms);
        let policy = CleaningPolicy {
            incomplete_guard_band: Some(5),
            ..CleaningPolicy::permissive()
        };
        let policy = CleaningPolicy {
            drop_incomplete: true,
            ..policy
        };
        let out = clean(&ts, &policy, window(0, 100));
        assert_eq!(out.report.incomplete, 1);
        assert_eq!(out.kept.len(), 1);
    }

    #[test]
    fn permissive_policy_keeps_everything() {
        let ms = vec![
            msg("r1", 100, "a", ""),
            msg("r2", 50, "b", "r1"),
            msg("q", 6, "d", "gone"),
        ];
        let ts = resolve_threads(&ms);
        let out = clean(&ts, &CleaningPolicy::permissive(), window(0, 100));
        assert_eq!(out.kept.len(), ts.len());
        assert_eq!(out.report.total(), 0);
    }

    #[test]
    fn clean_is_idempotent() {
        let ms = vec![
            msg("r1", 0, "a", ""),
            msg("r2", 10, "b", "r1"),
            msg("r3", 5, "a", ""),
            msg("r4", 1_000, "b", "r3"),
            msg("r5", 990, "c", ""),
        ];
        let policy = CleaningPolicy {
            max_thread_duration: Some(100),
            start_cutoff: Some(20),
            ..CleaningPolicy::default()
        };
        let w = window(0, 1_000);
        let once = clean(&resolve_threads(&ms), &policy, w);
        let twice = clean(&once.kept, &policy, w);
        assert_eq!(twice.kept, once.kept);
        assert_eq!(twice.report.total(), 0);
    }

    #[test]
    fn thread_to_events() {
        let ms = vec![
            msg("m1", 100, "alice", ""),
            msg("m2", 150, "bob", "m1"),
            msg("m3", 200, "alice", "m2"),
        ];
        let ts = resolve_threads(&ms);
        let (s, p, diag) = to_stream_and_partition(&ts, &ms).unwrap();
        let p = p.unwrap();
        assert_eq!(s.events().len(), 2);
        assert_eq!((s.alpha(), s.omega()), (150, 200));
        assert_eq!(p.len(), 1);
        assert_eq!(p.parts()[0].label, "m1");
        assert_eq!(diag.roots, 1);
        let e = s.events()[0];
        let mut pair = [s.label(e.u), s.label(e.v)];
        pair.sort_unstable();
        assert_eq!(pair, ["alice", "bob"]);
    }

    #[test]
    fn single_message_thread_has_no_part() {
        let ms = vec![
            msg("m1", 100, "alice", ""),
            msg("m2", 150, "bob", "m1"),
            msg("solo", 120, "carol", ""),
        ];
        let ts = resolve_threads(&ms);
        let (s, p, diag) = to_stream_and_partition(&ts, &ms).unwrap();
        assert_eq!(p.unwrap().len(), 1);
        assert_eq!(diag.linkless_threads, 1);
        // carol is an author of a retained message, hence a node
        assert_eq!(s.node_count(), 3);
    }

    #[test]
    fn link_count_excludes_roots_and_self_replies() {
        let ms = vec![
            msg("a1", 1, "a", ""),
            msg("a2", 2, "a", "a1"),
            msg("a3", 3, "b", "a2"),
            msg("b1", 4, "c", ""),
            msg("b2", 5, "d", "b1"),
        ];
        let ts = resolve_threads(&ms);
        let (s, p, diag) = to_stream_and_partition(&ts, &ms).unwrap();
        assert_eq!(s.events().len(), ms.len() - 2 - 1);
        assert_eq!(diag.self_replies, 1);
        let p = p.unwrap();
        assert_eq!(p.len(), 2);
        let total: usize = p.parts().iter().map(|part| part.events.len()).sum();
        assert_eq!(total, s.events().len());
    }
}
