//! Relational SOM on a planted dissimilarity and on the bundled styles.

use maltmap::corpus::parse_corpus;
use maltmap::eval::adjusted_rand_index;
use maltmap::gower::{build_feature_table, gower_matrix};
use maltmap::som::{assign, quantization_error, superclusters, train, SomConfig};
use maltmap::synth::planted_dissimilarity;

fn main() -> anyhow::Result<()> {
    let (d, truth) = planted_dissimilarity(4, 80, 1.0, 7);
    let model = train(&d, &SomConfig::new(1))?;
    let units = assign(&model, &d)?;
    let taxonomy = superclusters(&model, &d, 4)?;
    println!(
        "planted: QE {:.3} -> {:.3}, unit ARI {:.3}, supercluster ARI {:.3}",
        model.training_log[0],
        quantization_error(&model, &d)?,
        adjusted_rand_index(&units, &truth)?,
        adjusted_rand_index(&taxonomy.observation_partition(), &truth)?
    );

    let corpus = parse_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl"))?;
    let d = gower_matrix(&build_feature_table(&corpus)?)?;
    let model = train(&d, &SomConfig::new(42))?;
    let taxonomy = superclusters(&model, &d, 4)?;
    taxonomy.write_csv(std::io::stdout().lock())?;
    println!("styles per supercluster: {:?}", taxonomy.counts);
    Ok(())
}
