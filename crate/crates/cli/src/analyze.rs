use std::io::Write;

use anyhow::{bail, Result};
use linkdens_core::ingest::{resolve_threads, to_stream_and_partition, Message, Thread};
use linkdens_core::metrics::thread::{intra_thread_from_profiles, part_gap_profiles, per_thread_values};
use linkdens_core::metrics::{delta_density_profile, graph_density, pair_density, inter_thread_delta_densities, PairSampler};
use linkdens_core::relations::{
    node_overlap_graph, quotient_stream, temporal_overlap_graph_with_stats, NodeOverlapOptions,
    QuotientStream,
};
use linkdens_core::report::{
    ccdf, correlation_table, intercontact_gaps, messages_at_least_authors, thread_stats, Ccdf,
    ThreadStats,
};
use linkdens_core::{Delta, DensityValue, PartId, StreamPartition};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::{AnalyzeArgs, RunConfig, Stage};
use crate::ingest::{clean_input, load};
use crate::output::{num, OutDir};

fn density_json(v: &DensityValue) -> Value {
    match v {
        DensityValue::Exact(_) => json!({ "value": v.to_f64(), "exact": v.exact_string() }),
        DensityValue::Degenerate(d) => json!({ "value": null, "degenerate": d }),
    }
}

fn cell(v: Option<&DensityValue>) -> (String, String) {
    match v {
        Some(v @ DensityValue::Exact(_)) => (v.to_f64().map(num).unwrap_or_default(), v.exact_string()),
        Some(v) => (String::new(), v.exact_string()),
        None => (String::new(), String::new()),
    }
}

fn ccdf_of(values: &[f64]) -> Option<Ccdf> {
    ccdf(values).ok()
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Writes `scatter_<x>_<y>.csv` and returns its coefficients.
fn scatter(out: &mut OutDir, x: &str, y: &str, rows: Vec<(u32, f64, f64)>) -> Result<Value> {
    let name = format!("scatter_{x}_{y}.csv");
    out.csv(
        &name,
        &["part", x, y],
        rows.iter().map(|&(p, a, b)| [p.to_string(), num(a), num(b)]),
    )?;
    let table = correlation_table(x, y, rows.into_iter().map(|(_, a, b)| (a, b)).collect());
    Ok(serde_json::to_value(table)?)
}

struct Input {
    messages: Vec<Message>,
    threads: Vec<Thread>,
    input_sha256: String,
    removed: Option<Value>,
}

fn read(args: &AnalyzeArgs) -> Result<Input> {
    if args.clean {
        let c = clean_input(&args.input, &args.policy)?;
        return Ok(Input {
            messages: c.messages,
            threads: c.outcome.kept,
            input_sha256: c.input_sha256,
            removed: Some(json!({ "window": c.window, "removed": c.outcome.report })),
        });
    }
    let (messages, input_sha256) = load(&args.input)?;
    let threads = resolve_threads(&messages);
    Ok(Input {
        messages,
        threads,
        input_sha256,
        removed: None,
    })
}

pub fn run(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    let input = read(args)?;
    let (stream, partition, conversion) = to_stream_and_partition(&input.threads, &input.messages)?;
    let Some(partition) = partition else {
        bail!(
            "{}: empty stream, no reply links between distinct authors",
            args.input.display()
        );
    };
    let stats = thread_stats(&partition, &input.threads);
    let linked_pairs = stream.pair_groups().len();

    let mut out = OutDir::create(&args.out)?;
    let mut summary = Map::new();
    summary.insert("run".into(), serde_json::to_value(RunConfig::from(args))?);
    summary.insert("input_sha256".into(), json!(input.input_sha256));
    if let Some(removed) = input.removed {
        summary.insert("cleaning".into(), removed);
    }
    summary.insert(
        "stream".into(),
        json!({
            "messages": input.messages.len(),
            "threads": input.threads.len(),
            "parts": partition.len(),
            "nodes": stream.node_count(),
            "events": stream.events().len(),
            "linked_pairs": linked_pairs,
            "alpha": stream.alpha(),
            "omega": stream.omega(),
            "graph_density": density_json(&pair_density(stream.node_count(), linked_pairs)),
            "unlinked_messages": conversion,
        }),
    );

    if args.runs(Stage::Stats) {
        summary.insert("thread_stats".into(), stats_stage(&mut out, &stats)?);
    }
    if args.runs(Stage::Intercontact) {
        let gaps = intercontact_gaps(&stream, args.include_boundary_gaps)?;
        let samples: Vec<f64> = gaps.iter().map(|&g| g as f64).collect();
        out.ccdf("intercontact_ccdf.csv", ccdf_of(&samples).as_ref())?;
        summary.insert(
            "intercontact".into(),
            json!({
                "gaps": gaps.len(),
                "include_boundary_gaps": args.include_boundary_gaps,
                "median": median(&samples),
            }),
        );
    }
    let quotient = args.runs(Stage::Quotient).then(|| quotient_stream(&partition));
    if args.runs(Stage::Density) {
        let rows = density_stage(&mut out, &stream, quotient.as_ref(), &partition, &args.delta)?;
        summary.insert("delta_density".into(), rows);
    }
    let intra = if args.runs(Stage::Intra) {
        let (values, json) = intra_stage(&mut out, &partition, &args.delta)?;
        summary.insert("intra_thread".into(), json);
        Some(values)
    } else {
        None
    };
    if args.runs(Stage::Inter) {
        let json = inter_stage(&mut out, args, &partition, intra.as_deref())?;
        summary.insert("inter_thread".into(), json);
    }
    if args.runs(Stage::Overlap) {
        let json = overlap_stage(&mut out, args, &partition, &stats)?;
        summary.insert("overlap".into(), json);
    }
    if let Some(q) = &quotient {
        out.csv(
            "quotient_stream.csv",
            &["t", "i", "j", "multiplicity"],
            q.events.iter().map(|e| {
                [
                    e.t.to_string(),
                    e.i.0.to_string(),
                    e.j.0.to_string(),
                    e.multiplicity.to_string(),
                ]
            }),
        )?;
        let graph = q.graph();
        let degrees = graph.degrees();
        let samples: Vec<f64> = degrees.values().map(|&d| d as f64).collect();
        out.ccdf("ccdf_quotient_degree.csv", ccdf_of(&samples).as_ref())?;
        let connected = q.connected_parts();
        summary.insert(
            "quotient".into(),
            json!({
                "links": q.events.len(),
                "witnesses": q.events.iter().map(|e| e.multiplicity as u64).sum::<u64>(),
                "connected_parts": connected,
                "isolated_parts": q.part_count - connected,
                "graph_edges": graph.edge_count(),
                "graph_density": density_json(&graph_density(&graph)),
            }),
        );
    }

    summary.insert("files".into(), json!(out.written()));
    out.json("summary.json", &Value::Object(summary))?;

    writeln!(
        stdout,
        "stream: {} nodes, {} events, {} threads",
        stream.node_count(),
        stream.events().len(),
        partition.len()
    )?;
    writeln!(stdout, "wrote {} files to {}", out.written().len(), args.out.display())?;
    Ok(())
}

fn stats_stage(out: &mut OutDir, stats: &[ThreadStats]) -> Result<Value> {
    out.csv(
        "thread_stats.csv",
        &[
            "part",
            "label",
            "n_messages",
            "n_events",
            "n_authors",
            "n_distinct_pairs",
            "duration",
        ],
        stats.iter().map(|s| {
            [
                s.part.to_string(),
                s.label.clone(),
                s.n_messages.to_string(),
                s.n_events.to_string(),
                s.n_authors.to_string(),
                s.n_distinct_pairs.to_string(),
                s.duration.to_string(),
            ]
        }),
    )?;
    let columns: [(&str, fn(&ThreadStats) -> f64); 5] = [
        ("n_messages", |s| s.n_messages as f64),
        ("n_events", |s| s.n_events as f64),
        ("n_authors", |s| s.n_authors as f64),
        ("n_distinct_pairs", |s| s.n_distinct_pairs as f64),
        ("duration", |s| s.duration as f64),
    ];
    for (name, f) in columns {
        let samples: Vec<f64> = stats.iter().map(f).collect();
        out.ccdf(&format!("ccdf_{name}.csv"), ccdf_of(&samples).as_ref())?;
    }
    let size_duration = scatter(
        out,
        "n_messages",
        "duration",
        stats.iter().map(|s| (s.part, s.n_messages as f64, s.duration as f64)).collect(),
    )?;
    let size_authors = scatter(
        out,
        "n_messages",
        "n_authors",
        stats.iter().map(|s| (s.part, s.n_messages as f64, s.n_authors as f64)).collect(),
    )?;
    Ok(json!({
        "threads": stats.len(),
        "messages_at_least_authors": messages_at_least_authors(stats),
        "correlations": [size_duration, size_authors],
    }))
}

fn density_stage(
    out: &mut OutDir,
    stream: &linkdens_core::LinkStream,
    quotient: Option<&QuotientStream>,
    partition: &StreamPartition,
    deltas: &[Delta],
) -> Result<Value> {
    let main = delta_density_profile(stream, deltas);
    let q = quotient.map(|q| delta_density_profile(&q.to_link_stream(partition), deltas));
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for (k, (d, v)) in main.iter().enumerate() {
        let qv = q.as_ref().map(|q| &q[k].1);
        let (s, s_exact) = cell(Some(v));
        let (qf, q_exact) = cell(qv);
        rows.push([d.label(), d.as_secs().to_string(), s, s_exact, qf, q_exact]);
        json_rows.push(json!({
            "delta": d.label(),
            "seconds": d.as_secs(),
            "stream": density_json(v),
            "quotient": qv.map(density_json),
        }));
    }
    out.csv(
        "delta_density_profile.csv",
        &["delta", "seconds", "stream", "stream_exact", "quotient", "quotient_exact"],
        rows,
    )?;
    Ok(Value::Array(json_rows))
}

/// Per-part intra values (as floats, `None` when degenerate) for each delta.
type PerDelta = Vec<Vec<Option<f64>>>;

fn intra_stage(out: &mut OutDir, partition: &StreamPartition, deltas: &[Delta]) -> Result<(PerDelta, Value)> {
    let profiles = part_gap_profiles(partition);
    let mut per_delta = Vec::new();
    let mut rows = Vec::new();
    for &d in deltas {
        let values: Vec<Option<f64>> = per_thread_values(&profiles, d).iter().map(DensityValue::to_f64).collect();
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        out.ccdf(&format!("intra_thread_ccdf_{}.csv", d.label()), ccdf_of(&defined).as_ref())?;
        rows.push(json!({
            "delta": d.label(),
            "aggregate": density_json(&intra_thread_from_profiles(&profiles, d)),
            "median": median(&defined),
            "mean": mean(&defined),
            "degenerate_parts": values.len() - defined.len(),
        }));
        per_delta.push(values);
    }
    Ok((per_delta, Value::Array(rows)))
}

fn inter_stage(
    out: &mut OutDir,
    args: &AnalyzeArgs,
    partition: &StreamPartition,
    intra: Option<&[Vec<Option<f64>>]>,
) -> Result<Value> {
    let k = partition.len();
    let sampler = match args.sample_pairs {
        _ if k < 2 => return Ok(json!({ "skipped": "fewer than two threads" })),
        Some(n) => PairSampler::Uniform {
            size: n as usize,
            seed: args.seed,
        },
        None if k <= args.exact_threshold => PairSampler::Exhaustive,
        None => {
            return Ok(json!({
                "skipped": format!(
                    "{k} threads exceed the exact-mode threshold of {}; pass --sample-pairs",
                    args.exact_threshold
                )
            }))
        }
    };
    let results = (0..k as u32)
        .into_par_iter()
        .map(|i| inter_thread_delta_densities(partition, PartId(i), &args.delta, sampler))
        .collect::<Result<Vec<_>, _>>()?;
    let sampled = results.iter().any(|r| r.iter().any(|v| v.sampled));
    let counterparts = results.first().map_or(0, |r| r.first().map_or(0, |v| v.counterparts));
    let mut rows = Vec::new();
    for (di, d) in args.delta.iter().enumerate() {
        let values: Vec<f64> = results
            .iter()
            .map(|r| r[di].value.to_f64().expect("inter-thread values are exact"))
            .collect();
        out.ccdf(&format!("inter_thread_ccdf_{}.csv", d.label()), ccdf_of(&values).as_ref())?;
        let mut row = json!({
            "delta": d.label(),
            "mean": mean(&values),
            "median": median(&values),
        });
        if let Some(intra) = intra {
            let points: Vec<(u32, f64, f64)> = intra[di]
                .iter()
                .zip(&values)
                .enumerate()
                .filter_map(|(p, (a, &b))| a.map(|a| (p as u32, a, b)))
                .collect();
            let denser = points.iter().filter(|p| p.1 > p.2).count();
            row["intra_denser_fraction"] = json!((!points.is_empty()).then(|| denser as f64 / points.len() as f64));
            row["correlation"] = scatter(out, &format!("intra_{}", d.label()), &format!("inter_{}", d.label()), points)?;
        }
        rows.push(row);
    }
    Ok(json!({
        "sampled": sampled,
        "counterparts_per_thread": counterparts,
        "seed": sampled.then_some(args.seed),
        "by_delta": rows,
    }))
}

fn overlap_stage(
    out: &mut OutDir,
    args: &AnalyzeArgs,
    partition: &StreamPartition,
    stats: &[ThreadStats],
) -> Result<Value> {
    let (x, sweep) = temporal_overlap_graph_with_stats(partition);
    let y = node_overlap_graph(
        partition,
        NodeOverlapOptions {
            max_candidate_pairs: args.overlap_pair_cap,
        },
    )?;
    for (name, g) in [("temporal_overlap_edges.csv", &x.graph), ("node_overlap_edges.csv", &y.graph)] {
        out.csv(
            name,
            &["i", "j", "weight"],
            g.edges()
                .iter()
                .map(|e| [e.u.to_string(), e.v.to_string(), e.weight.to_string()]),
        )?;
    }
    let (xd, yd) = (x.graph.degrees(), y.graph.degrees());
    let degree = |m: &std::collections::BTreeMap<u32, usize>, p: u32| m.get(&p).copied().unwrap_or(0);
    out.csv(
        "overlap_degrees.csv",
        &["part", "label", "x_degree", "y_degree", "n_messages", "n_authors", "duration"],
        stats.iter().map(|s| {
            [
                s.part.to_string(),
                s.label.clone(),
                degree(&xd, s.part).to_string(),
                degree(&yd, s.part).to_string(),
                s.n_messages.to_string(),
                s.n_authors.to_string(),
                s.duration.to_string(),
            ]
        }),
    )?;
    let mut correlations = Vec::new();
    for (name, m) in [("x_degree", &xd), ("y_degree", &yd)] {
        let samples: Vec<f64> = stats.iter().map(|s| degree(m, s.part) as f64).collect();
        out.ccdf(&format!("ccdf_{name}.csv"), ccdf_of(&samples).as_ref())?;
        for (other, f) in [
            ("n_messages", (|s: &ThreadStats| s.n_messages as f64) as fn(&ThreadStats) -> f64),
            ("duration", |s: &ThreadStats| s.duration as f64),
        ] {
            let rows = stats.iter().map(|s| (s.part, degree(m, s.part) as f64, f(s))).collect();
            correlations.push(scatter(out, name, other, rows)?);
        }
    }
    Ok(json!({
        "temporal": {
            "edges": x.graph.edge_count(),
            "density": density_json(&graph_density(&x.graph)),
            "sweep": sweep,
        },
        "node": {
            "edges": y.graph.edge_count(),
            "density": density_json(&graph_density(&y.graph)),
        },
        "correlations": correlations,
    }))
}
