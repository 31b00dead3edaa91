use std::io::Write;

use anyhow::Result;
use linkdens_core::ingest::write_messages;
use linkdens_core::validation::generate_messages;
use serde_json::json;

use crate::args::{RunConfig, SynthArgs};
use crate::output::OutDir;

pub fn run(args: &SynthArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = args.config();
    let (tagged, durations) = generate_messages(&config)?;

    let mut out = OutDir::create(&args.out)?;
    out.with_writer("messages.csv", |w| {
        Ok(write_messages(w, tagged.iter().map(|(m, _)| m))?)
    })?;
    out.csv(
        "labels.csv",
        &["id", "thread"],
        tagged.iter().map(|(m, l)| [m.id.clone(), l.clone()]),
    )?;
    let mean = durations.iter().sum::<i64>() / durations.len().max(1) as i64;
    out.json(
        "summary.json",
        &json!({
            "run": RunConfig::Synth {
                out: args.out.display().to_string(),
                config: config.clone(),
            },
            "messages": tagged.len(),
            "planted_threads": config.threads,
            "background_threads": config.background_threads,
            "mean_planted_duration": mean,
        }),
    )?;
    writeln!(stdout, "messages: {}", tagged.len())?;
    writeln!(
        stdout,
        "threads: {} planted, {} background",
        config.threads, config.background_threads
    )?;
    writeln!(stdout, "mean planted duration: {mean}s")?;
    Ok(())
}
