//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use maltmap::gower::{Cell, FeatureKind, FeatureSpec, FeatureTable};
use maltmap::matrix::DissimilarityMatrix;
use maltmap::seriate::Dendrogram;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Textbook Gower: double loop over pairs and columns, ranges recomputed from
/// scratch. `None` where a pair shares no comparable feature.
pub fn naive_gower(table: &FeatureTable) -> Vec<Vec<Option<f64>>> {
    let n = table.rows();
    let cols = table.columns();
    let mut ranges = Vec::new();
    for c in 0..cols.len() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..n {
            if let Cell::Num(v) = table.cell(r, c) {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        ranges.push(hi - lo);
    }
    let mut out = vec![vec![Some(0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut num = 0.0;
            let mut den = 0.0;
            for (c, spec) in cols.iter().enumerate() {
                let term = match (table.cell(i, c), table.cell(j, c)) {
                    (Cell::Num(a), Cell::Num(b)) => {
                        if !(ranges[c] > 0.0) {
                            continue;
                        }
                        (a - b).abs() / ranges[c]
                    }
                    (Cell::Cat(a), Cell::Cat(b)) => {
                        if a == b {
                            0.0
                        } else {
                            1.0
                        }
                    }
                    _ => continue,
                };
                num += spec.weight * term;
                den += spec.weight;
            }
            out[i][j] = if den > 0.0 { Some(num / den) } else { None };
        }
    }
    out
}

/// Random mixed table: numeric and nominal columns, about 10% missing cells,
/// random positive weights.
pub fn random_table(rng: &mut StdRng, n: usize) -> FeatureTable {
    let n_num = rng.random_range(1..=4);
    let n_cat = rng.random_range(0..=3);
    let mut columns = Vec::new();
    for c in 0..n_num {
        let mut s = FeatureSpec::numeric(format!("x{c}"));
        s.weight = rng.random_range(0.2..3.0);
        columns.push(s);
    }
    for c in 0..n_cat {
        let mut s = FeatureSpec::nominal(format!("g{c}"));
        s.weight = rng.random_range(0.2..3.0);
        columns.push(s);
    }
    let mut rows = Vec::new();
    for _ in 0..n {
        let mut row = Vec::new();
        for spec in &columns {
            if rng.random_bool(0.1) {
                row.push(Cell::Missing);
                continue;
            }
            row.push(match spec.kind {
                FeatureKind::Numeric => Cell::Num(rng.random_range(-50.0..50.0)),
                FeatureKind::Nominal => Cell::Cat(["a", "b", "c"][rng.random_range(0..3)].to_string()),
            });
        }
        rows.push(row);
    }
    let labels = (0..n).map(|i| format!("r{i}")).collect();
    FeatureTable::new(labels, columns, rows).unwrap()
}

/// Random symmetric dissimilarities; with `ties` the values come from a
/// small integer set.
pub fn random_dissimilarity(rng: &mut StdRng, n: usize, ties: bool) -> DissimilarityMatrix {
    let labels = (0..n).map(|i| format!("l{i}")).collect();
    DissimilarityMatrix::from_fn(labels, |_, _| {
        if ties {
            rng.random_range(1..=4) as f64
        } else {
            rng.random_range(0.01..10.0)
        }
    })
    .unwrap()
}

/// Every leaf order reachable by flipping internal nodes.
pub fn reachable_orders(tree: &Dendrogram, node: usize) -> Vec<Vec<usize>> {
    match tree.children(node) {
        None => vec![vec![node]],
        Some((l, r)) => {
            let left = reachable_orders(tree, l);
            let right = reachable_orders(tree, r);
            let mut out = Vec::new();
            for a in &left {
                for b in &right {
                    out.push(a.iter().chain(b).copied().collect());
                    out.push(b.iter().chain(a).copied().collect());
                }
            }
            out
        }
    }
}

pub fn order_cost(d: &DissimilarityMatrix, order: &[usize]) -> f64 {
    order.windows(2).map(|w| d.get(w[0], w[1])).sum()
}

/// Minimum adjacent-pair cost over all reachable orders.
pub fn brute_force_olo(tree: &Dendrogram, d: &DissimilarityMatrix) -> f64 {
    reachable_orders(tree, tree.root())
        .iter()
        .map(|o| order_cost(d, o))
        .fold(f64::INFINITY, f64::min)
}

/// Two-sided exact Mann-Whitney p by enumerating every split of the pooled
/// sample, with U counted pairwise (ties as one half).
pub fn enumerate_mw_p(x: &[f64], y: &[f64]) -> f64 {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let n = pooled.len();
    let nx = x.len();
    let centre = (nx * y.len()) as f64 / 2.0;
    let u_of = |mask: u32| -> f64 {
        let mut u = 0.0;
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for j in (0..n).filter(|j| mask >> j & 1 == 0) {
                if pooled[i] > pooled[j] {
                    u += 1.0;
                } else if pooled[i] == pooled[j] {
                    u += 0.5;
                }
            }
        }
        u
    };
    let observed = (u_of((1u32 << nx) - 1) - centre).abs();
    let mut total = 0u64;
    let mut extreme = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != nx {
            continue;
        }
        total += 1;
        if (u_of(mask) - centre).abs() >= observed {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
