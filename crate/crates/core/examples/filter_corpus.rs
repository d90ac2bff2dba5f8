//! Completeness filtering and the cold/hot split.
//!
//! cargo run --example filter_corpus -- [CORPUS.jsonl]

use maltmap::corpus::{filter_complete, parse_corpus, partition_fermentation, RejectReason};
use maltmap::synth::corpus_with_incomplete;

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl").to_string());
    let corpus = parse_corpus(&path)?;
    let (kept, report) = filter_complete(&corpus);
    let (cold, hot) = partition_fermentation(&kept);
    println!("{path}: kept {} of {}, {} cold / {} hot", kept.len(), report.total_seen, cold.len(), hot.len());

    // A dirty synthetic corpus at the published scale.
    let dirty = corpus_with_incomplete(114_347, 62_121, 7);
    let (_, report) = filter_complete(&dirty);
    println!("synthetic: discard rate {:.4}%", 100.0 * report.discard_rate());
    for reason in [
        RejectReason::MissingVitals,
        RejectReason::MissingGrain,
        RejectReason::MissingHop,
        RejectReason::MissingMashOrHopUsage,
        RejectReason::MalformedField,
    ] {
        println!("  {:<28} {}", reason.code(), report.count(reason));
    }
    Ok(())
}
