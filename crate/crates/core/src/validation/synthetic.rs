//! Seeded generator of message tables with planted threads: short bursts of
//! replies inside small author groups, over sparse long-lived background threads.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{resolve_threads, to_stream_and_partition, IngestError, Message, Thread};
use crate::partition::StreamPartition;
use crate::stream::{LinkStream, Timestamp};

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("no planted threads, so the thread partition would be empty")]
    NoThreads,
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyntheticConfig {
    /// Size of the author pool.
    pub authors: usize,
    /// Number of planted threads.
    pub threads: usize,
    /// Inclusive range of messages per planted thread (root included).
    pub messages_per_thread: (usize, usize),
    /// Inclusive range of distinct authors per planted thread.
    pub authors_per_thread: (usize, usize),
    /// Inclusive range of planted thread durations, in seconds.
    pub thread_duration: (i64, i64),
    /// Number of two-message background threads between random authors.
    pub background_threads: usize,
    /// Inclusive range of background thread durations, in seconds.
    pub background_duration: (i64, i64),
    /// First possible message time.
    pub start: Timestamp,
    /// Length of the generated period, in seconds.
    pub span: i64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            authors: 300,
            threads: 60,
            messages_per_thread: (3, 12),
            authors_per_thread: (2, 4),
            thread_duration: (3_600, 3 * 86_400),
            background_threads: 40,
            background_duration: (86_400, 60 * 86_400),
            // 2010-01-01T00:00:00Z
            start: 1_262_304_000,
            span: 10 * 365 * 86_400,
            seed: 1,
        }
    }
}

impl SyntheticConfig {
    fn check(&self) -> Result<(), SyntheticError> {
        let fail = |msg: String| Err(SyntheticError::Infeasible(msg));
        if self.threads == 0 {
            return Err(SyntheticError::NoThreads);
        }
        let (amin, amax) = self.authors_per_thread;
        if amin < 2 || amin > amax {
            return fail(format!("authors per thread {amin}..={amax} must be at least 2 and ordered"));
        }
        if amax > self.authors {
            return fail(format!(
                "a thread with {amax} authors does not fit in a pool of {}",
                self.authors
            ));
        }
        if self.background_threads > 0 && self.authors < 2 {
            return fail("background threads need two authors".into());
        }
        let (mmin, mmax) = self.messages_per_thread;
        if mmin < 2 || mmin > mmax {
            return fail(format!("messages per thread {mmin}..={mmax} must be at least 2 and ordered"));
        }
        for (name, (lo, hi)) in [
            ("thread", self.thread_duration),
            ("background", self.background_duration),
        ] {
            if lo < 0 || lo > hi || hi > self.span {
                return fail(format!("{name} duration {lo}..={hi} must be ordered and within the span"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Sorted by time, then id.
    pub messages: Vec<Message>,
    /// `(message id, thread label)`, aligned with `messages`.
    pub labels: Vec<(String, String)>,
    /// Planted thread durations, in generation order.
    pub planted_durations: Vec<i64>,
    pub threads: Vec<Thread>,
    pub stream: Arc<LinkStream>,
    pub partition: StreamPartition,
}

impl SyntheticData {
    pub fn mean_planted_duration(&self) -> i64 {
        let n = self.planted_durations.len() as i64;
        self.planted_durations.iter().sum::<i64>() / n.max(1)
    }
}

fn author_name(k: usize) -> String {
    format!("user{k:05}@example.org")
}

struct ThreadPlan<'a> {
    label: String,
    start: Timestamp,
    duration: i64,
    messages: usize,
    group: &'a [usize],
}

fn plant(rng: &mut ChaCha8Rng, plan: ThreadPlan<'_>, out: &mut Vec<(Message, String)>) {
    let mut offsets: Vec<i64> = (1..plan.messages)
        .map(|_| rng.random_range(0..=plan.duration))
        .collect();
    offsets.sort_unstable();
    if let Some(last) = offsets.last_mut() {
        *last = plan.duration;
    }
    let mut local: Vec<(String, usize)> = Vec::with_capacity(plan.messages);
    let root_author = plan.group[rng.random_range(0..plan.group.len())];
    let root_id = format!("{}.0", plan.label);
    out.push((
        Message {
            id: root_id.clone(),
            author: author_name(root_author),
            time: plan.start,
            parent: root_id.clone(),
        },
        plan.label.clone(),
    ));
    local.push((root_id, root_author));
    for (m, off) in offsets.into_iter().enumerate() {
        let (parent_id, parent_author) = local[rng.random_range(0..local.len())].clone();
        let author = loop {
            let a = plan.group[rng.random_range(0..plan.group.len())];
            if a != parent_author {
                break a;
            }
        };
        let id = format!("{}.{}", plan.label, m + 1);
        out.push((
            Message {
                id: id.clone(),
                author: author_name(author),
                time: plan.start + off,
                parent: parent_id,
            },
            plan.label.clone(),
        ));
        local.push((id, author));
    }
}

/// Messages only, without building the stream.
pub fn generate_messages(config: &SyntheticConfig) -> Result<(Vec<(Message, String)>, Vec<i64>), SyntheticError> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    let mut durations = Vec::with_capacity(config.threads);
    for k in 0..config.threads {
        let (lo, hi) = config.thread_duration;
        let duration = rng.random_range(lo..=hi);
        let start = config.start + rng.random_range(0..=config.span - duration);
        let (mlo, mhi) = config.messages_per_thread;
        let messages = rng.random_range(mlo..=mhi);
        let (alo, ahi) = config.authors_per_thread;
        let size = rng.random_range(alo..=ahi).min(messages);
        let group = sample(&mut rng, config.authors, size.max(2)).into_vec();
        durations.push(duration);
        plant(
            &mut rng,
            ThreadPlan {
                label: format!("t{k:05}"),
                start,
                duration,
                messages,
                group: &group,
            },
            &mut out,
        );
    }
    for k in 0..config.background_threads {
        let (lo, hi) = config.background_duration;
        let duration = rng.random_range(lo..=hi);
        let start = config.start + rng.random_range(0..=config.span - duration);
        let group = sample(&mut rng, config.authors, 2).into_vec();
        plant(
            &mut rng,
            ThreadPlan {
                label: format!("b{k:05}"),
                start,
                duration,
                messages: 2,
                group: &group,
            },
            &mut out,
        );
    }
    out.sort_by(|a, b| (a.0.time, &a.0.id).cmp(&(b.0.time, &b.0.id)));
    Ok((out, durations))
}

/// Messages, ground-truth labels, reconstructed threads, and the resulting
/// stream and partition. Identical seeds give identical output.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SyntheticData, SyntheticError> {
    let (tagged, planted_durations) = generate_messages(config)?;
    let (messages, thread_labels): (Vec<Message>, Vec<String>) = tagged.into_iter().unzip();
    let labels = messages
        .iter()
        .zip(thread_labels)
        .map(|(m, l)| (m.id.clone(), l))
        .collect();
    let threads = resolve_threads(&messages);
    let (stream, partition, _) = to_stream_and_partition(&threads, &messages)?;
    let partition = partition.ok_or(SyntheticError::NoThreads)?;
    Ok(SyntheticData {
        messages,
        labels,
        planted_durations,
        threads,
        stream,
        partition,
    })
}
