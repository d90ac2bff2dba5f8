//! Per-style features and Gower dissimilarities, including mixed columns.

use maltmap::corpus::parse_corpus;
use maltmap::gower::{build_feature_table, constant_columns, gower_matrix, Cell, FeatureSpec, FeatureTable};

fn main() -> anyhow::Result<()> {
    let table = FeatureTable::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![FeatureSpec::numeric("abv"), FeatureSpec::nominal("yeast")],
        vec![
            vec![Cell::Num(4.0), Cell::Cat("lager".into())],
            vec![Cell::Num(6.0), Cell::Cat("ale".into())],
            vec![Cell::Missing, Cell::Cat("ale".into())],
        ],
    )?;
    let d = gower_matrix(&table)?;
    println!("mixed: d(a,b)={} d(a,c)={} d(b,c)={}", d.get(0, 1), d.get(0, 2), d.get(1, 2));

    let corpus = parse_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl"))?;
    let features = build_feature_table(&corpus)?;
    println!("{} styles x {} features", features.rows(), features.columns().len());
    println!("constant columns: {:?}", constant_columns(&features));
    let d = gower_matrix(&features)?;
    let labels = d.labels();
    let (mut best, mut pair) = (f64::INFINITY, (0, 0));
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            if d.get(i, j) < best {
                best = d.get(i, j);
                pair = (i, j);
            }
        }
    }
    println!("closest styles: {} / {} at {best:.4}", labels[pair.0], labels[pair.1]);
    Ok(())
}
