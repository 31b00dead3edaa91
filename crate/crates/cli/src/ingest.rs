use std::io::Write;

use anyhow::{bail, Result};
use linkdens_core::ingest::{
    clean, parse_messages, resolve_threads, retained_messages, write_messages, CleanOutcome,
    CollectionWindow, Message, Thread,
};
use serde_json::json;

use crate::args::{IngestArgs, PolicyArgs, RunConfig};
use crate::output::{read_input, OutDir};

/// Parsed input, its hash, and the threads kept by the policy.
pub struct Cleaned {
    pub messages: Vec<Message>,
    pub threads: Vec<Thread>,
    pub outcome: CleanOutcome,
    pub window: CollectionWindow,
    pub input_sha256: String,
}

pub fn load(input: &std::path::Path) -> Result<(Vec<Message>, String)> {
    let (bytes, hash) = read_input(input)?;
    let messages = parse_messages(bytes.as_slice())
        .map_err(|e| anyhow::anyhow!("{}: {e}", input.display()))?;
    Ok((messages, hash))
}

pub fn clean_input(input: &std::path::Path, policy: &PolicyArgs) -> Result<Cleaned> {
    let (messages, input_sha256) = load(input)?;
    let Some(window) = policy.window.or_else(|| CollectionWindow::covering(&messages)) else {
        bail!("{}: no messages", input.display());
    };
    let threads = resolve_threads(&messages);
    let outcome = clean(&threads, &policy.policy(), window);
    Ok(Cleaned {
        messages,
        threads,
        outcome,
        window,
        input_sha256,
    })
}

pub fn run(args: &IngestArgs, stdout: &mut dyn Write) -> Result<()> {
    let c = clean_input(&args.input, &args.policy)?;
    let kept = retained_messages(&c.outcome.kept, &c.messages);
    let report = c.outcome.report;

    let mut out = OutDir::create(&args.out)?;
    out.with_writer("cleaned.csv", |w| Ok(write_messages(w, kept.iter().copied())?))?;
    out.json("removal_report.json", &report)?;
    out.json(
        "summary.json",
        &json!({
            "run": RunConfig::from(args),
            "input_sha256": c.input_sha256,
            "window": c.window,
            "messages": c.messages.len(),
            "threads": c.threads.len(),
            "kept_threads": c.outcome.kept.len(),
            "kept_messages": kept.len(),
            "removed": report,
        }),
    )?;

    writeln!(stdout, "messages: {}", c.messages.len())?;
    writeln!(stdout, "threads: {}", c.threads.len())?;
    writeln!(stdout, "window: {},{}", c.window.start, c.window.end)?;
    writeln!(
        stdout,
        "removed: incomplete={} inconsistent={} max_duration={} late_start={}",
        report.incomplete, report.inconsistent, report.max_duration, report.late_start
    )?;
    writeln!(
        stdout,
        "kept: {} threads, {} messages",
        c.outcome.kept.len(),
        kept.len()
    )?;
    Ok(())
}
