//! Writes the bundled synthetic corpus, or a custom one.
//!
//! cargo run --example generate_synthetic -- [OUT] [RECIPES_PER_STYLE] [SEED]

use std::fs::File;
use std::io::BufWriter;

use maltmap::corpus::write_jsonl;
use maltmap::synth::{generate_corpus, BUNDLED_RECIPES_PER_STYLE, BUNDLED_SEED};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl").to_string());
    let per_style = args.next().map(|s| s.parse()).transpose()?.unwrap_or(BUNDLED_RECIPES_PER_STYLE);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(BUNDLED_SEED);
    let corpus = generate_corpus(per_style, seed);
    write_jsonl(&corpus, BufWriter::new(File::create(&out)?))?;
    println!("wrote {} recipes over {} styles to {out}", corpus.len(), corpus.styles().len());
    Ok(())
}
