//! Agglomerative clustering, optimal leaf ordering and tree cuts.

use maltmap::corpus::parse_corpus;
use maltmap::gower::{build_feature_table, gower_matrix};
use maltmap::seriate::{agglomerate, cut, optimal_leaf_order, path_cost, Linkage};

fn main() -> anyhow::Result<()> {
    let corpus = parse_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/data/recipes.jsonl"))?;
    let d = gower_matrix(&build_feature_table(&corpus)?)?;
    for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
        let tree = agglomerate(&d, linkage)?;
        let olo = optimal_leaf_order(&tree, &d)?;
        println!(
            "{linkage:?}: input order cost {:.4}, optimal {:.4}",
            path_cost(&d, &tree.input_order()),
            olo.cost
        );
    }
    let tree = agglomerate(&d, Linkage::Average)?;
    let olo = optimal_leaf_order(&tree, &d)?;
    let groups = cut(&tree, 4)?;
    for &i in &olo.order {
        println!("  {:<16} group {}", d.labels()[i], groups[i]);
    }
    Ok(())
}
