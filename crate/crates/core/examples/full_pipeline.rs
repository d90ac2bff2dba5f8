//! Runs every stage on the bundled corpus and verifies the manifest.
//!
//! cargo run --example full_pipeline -- [OUT_DIR] [SEED]

use maltmap::pipeline::{run_pipeline, verify_manifest, PipelineConfig, MANIFEST_FILE};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out_dir = args.next().unwrap_or_else(|| "pipeline-out".into());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);
    let cfg = PipelineConfig {
        inputs: vec![concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl").into()],
        out_dir: out_dir.clone().into(),
        seed: Some(seed),
        ..Default::default()
    };
    let manifest = run_pipeline(&cfg)?;
    for f in &manifest.outputs {
        println!("{:<20} {}", f.path, &f.sha256[..16]);
    }
    let taxonomy = std::fs::read_to_string(format!("{out_dir}/taxonomy.csv"))?;
    let mut supers: Vec<&str> = taxonomy.lines().skip(1).filter_map(|l| l.rsplit(',').next()).collect();
    supers.sort_unstable();
    supers.dedup();
    println!("superclusters: {}", supers.len());
    let checks = verify_manifest(format!("{out_dir}/{MANIFEST_FILE}"))?;
    println!("manifest verified: {}", checks.iter().all(|c| c.ok()));
    Ok(())
}
