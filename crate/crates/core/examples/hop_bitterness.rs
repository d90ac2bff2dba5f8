//! Attenuation, relative bitterness ratio and hop-method statistics.

use maltmap::corpus::parse_corpus;
use maltmap::hops::{adf, category_mean_ibu, category_rbr, hop_diversity, method_usage, rbr};

fn main() -> anyhow::Result<()> {
    let a = adf(1.050, 1.012)?;
    println!("ADF(1.050, 1.012) = {a:.4}");
    println!("RBR(30 IBU, 1.050, 0.7655) = {:.4}", rbr(30.0, 1.050, 0.7655)?);

    let corpus = parse_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl"))?;
    for category in corpus.categories() {
        let usage = method_usage(&corpus, category)?;
        let used: Vec<String> = usage
            .iter()
            .filter(|(_, &u)| u > 0.0)
            .map(|(m, u)| format!("{m} {:.0}%", 100.0 * u))
            .collect();
        println!(
            "{category}: mean IBU {:.1}, RBR {:.2}, methods [{}]",
            category_mean_ibu(&corpus, category)?,
            category_rbr(&corpus, category)?.rbr,
            used.join(", ")
        );
    }
    let ipa = hop_diversity(&corpus, "American IPA")?;
    println!("American IPA hops per method: {:.2?}", ipa.avg_distinct_hops);
    Ok(())
}
