//! Malt counting, grist shares, percentize and cumulative usage.

use std::collections::BTreeMap;

use maltmap::corpus::parse_corpus;
use maltmap::grist::{category_malt_stats, cumulative_usage, percentize, style_avg_subtypes};

fn main() -> anyhow::Result<()> {
    let corpus = parse_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl"))?;
    for category in corpus.categories() {
        let stats = category_malt_stats(&corpus, category)?;
        println!(
            "{category}: {} malt types in use, {:.2} per recipe",
            stats.distinct_types_in_category, stats.avg_types_per_recipe
        );
        let shares: BTreeMap<String, f64> = stats
            .grist_percent
            .iter()
            .map(|(m, p)| (m.to_string(), *p))
            .collect();
        println!("  grist: {shares:.1?}");
        println!("  types covering 50% of the grist: {:?}", cumulative_usage(&shares, 50.0)?);
    }
    let stout = style_avg_subtypes(&corpus, "Stout")?;
    println!("Stout subtypes per recipe: {:.2?}", stout.avg_subtypes);
    println!("percentize [3, 1, 2, 2] -> {:?}", percentize(&[3.0, 1.0, 2.0, 2.0])?);
    Ok(())
}
