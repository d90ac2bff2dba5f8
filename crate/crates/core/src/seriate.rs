//! Agglomerative clustering and optimal leaf ordering of the resulting tree.
//!
//! Node ids follow the usual convention: leaves are `0..n`, the `k`-th merge
//! creates node `n + k`. Each merge lists the child holding the smallest leaf
//! index first, so the natural left-to-right reading of a tree is stable.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_real;
use crate::matrix::DissimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::Config(format!("unknown linkage `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Builds a tree from explicit merges, checking that every node is used
    /// exactly once and only after it exists.
    pub fn from_merges(leaves: usize, linkage: Linkage, merges: Vec<Merge>) -> Result<Self> {
        if leaves == 0 || merges.len() + 1 != leaves {
            return Err(Error::Config(format!(
                "{} merges cannot join {leaves} leaves",
                merges.len()
            )));
        }
        let mut used = vec![false; 2 * leaves - 1];
        for (k, m) in merges.iter().enumerate() {
            for child in [m.left, m.right] {
                if child >= leaves + k || used[child] {
                    return Err(Error::Config(format!("merge {k} reuses or forward-references node {child}")));
                }
                used[child] = true;
            }
            if !(m.height.is_finite() && m.height >= 0.0) {
                return Err(Error::Config(format!("merge {k} height {}", m.height)));
            }
        }
        Ok(Dendrogram {
            leaves,
            linkage,
            merges,
        })
    }

    pub fn root(&self) -> usize {
        2 * self.leaves - 2
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        (node >= self.leaves).then(|| {
            let m = &self.merges[node - self.leaves];
            (m.left, m.right)
        })
    }

    /// Leaves in left-to-right order of the tree as stored.
    pub fn input_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.leaves);
        let mut stack = vec![self.root()];
        while let Some(node) = stack.pop() {
            match self.children(node) {
                None => out.push(node),
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dendrogram serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafOrder {
    pub order: Vec<usize>,
    pub cost: f64,
}

impl LeafOrder {
    /// `# cost=<value>` followed by one label per line.
    pub fn write_txt<W: Write>(&self, labels: &[String], mut out: W) -> std::io::Result<()> {
        writeln!(out, "# cost={}", fmt_real(self.cost))?;
        for &i in &self.order {
            writeln!(out, "{}", labels[i])?;
        }
        out.flush()
    }
}

/// Sum of dissimilarities between neighbours of `order`.
pub fn path_cost(d: &DissimilarityMatrix, order: &[usize]) -> f64 {
    order.windows(2).map(|w| d.get(w[0], w[1])).sum()
}

/// Lance-Williams agglomeration. Among equal minimum distances the pair with
/// the lowest `(i, j)`, `i` and `j` being the smallest leaf of each cluster,
/// merges first.
pub fn agglomerate(d: &DissimilarityMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Insufficient("agglomeration needs at least two leaves".into()));
    }
    // slot i represents the active cluster whose smallest leaf is i
    let mut dist: Vec<f64> = d.values().to_vec();
    let mut active = vec![true; n];
    let mut node_of = (0..n).collect::<Vec<_>>();
    let mut size = vec![1usize; n];
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                let v = dist[i * n + j];
                if v < best.0 {
                    best = (v, i, j);
                }
            }
        }
        let (height, i, j) = best;
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let (dik, djk) = (dist[i * n + k], dist[j * n + k]);
            let updated = match linkage {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => {
                    (size[i] as f64 * dik + size[j] as f64 * djk) / (size[i] + size[j]) as f64
                }
            };
            dist[i * n + k] = updated;
            dist[k * n + i] = updated;
        }
        merges.push(Merge {
            left: node_of[i],
            right: node_of[j],
            height,
        });
        active[j] = false;
        size[i] += size[j];
        node_of[i] = n + step;
    }
    Ok(Dendrogram {
        leaves: n,
        linkage,
        merges,
    })
}

/// Node layout over leaf positions in the tree's input order: every node
/// covers a contiguous range, split at `mid` between its children.
struct Layout {
    start: Vec<usize>,
    mid: Vec<usize>,
    end: Vec<usize>,
}

impl Layout {
    fn new(tree: &Dendrogram) -> Self {
        let total = 2 * tree.leaves - 1;
        let mut size = vec![1usize; total];
        for (k, m) in tree.merges.iter().enumerate() {
            size[tree.leaves + k] = size[m.left] + size[m.right];
        }
        let mut start = vec![0; total];
        let mut mid = vec![0; total];
        let mut end = vec![0; total];
        let mut stack = vec![(tree.root(), 0usize)];
        while let Some((node, s)) = stack.pop() {
            start[node] = s;
            end[node] = s + size[node];
            if let Some((l, r)) = tree.children(node) {
                mid[node] = s + size[l];
                stack.push((l, s));
                stack.push((r, s + size[l]));
            } else {
                mid[node] = s;
            }
        }
        Layout { start, mid, end }
    }

    /// Positions that can close an ordering of `node` opened at `p`.
    fn partners(&self, tree: &Dendrogram, node: usize, p: usize) -> std::ops::Range<usize> {
        if tree.children(node).is_none() {
            p..p + 1
        } else if p < self.mid[node] {
            self.mid[node]..self.end[node]
        } else {
            self.start[node]..self.mid[node]
        }
    }
}

/// Optimal leaf ordering: among the orderings reachable by swapping children
/// of internal nodes, one that minimizes the sum of neighbour
/// dissimilarities.
///
/// Dynamic program over the best path cost `M(v, l, r)` of subtree `v`
/// starting at leaf `l` and ending at `r`. Each pair of leaves is an
/// endpoint pair only at their lowest common ancestor, so one `n x n` table
/// holds every `M`. The split `min_m M(L, l, m) + D(m, k)` is computed once
/// per `(l, k)` before minimizing over `k`, giving `O(n^3)` overall. Ties keep
/// the earliest candidate in input order, and the root is always read with its
/// stored left child first.
pub fn optimal_leaf_order(tree: &Dendrogram, d: &DissimilarityMatrix) -> Result<LeafOrder> {
    let n = tree.leaves;
    if d.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: d.len(),
        });
    }
    let leaf_at = tree.input_order();
    if n == 1 {
        return Ok(LeafOrder {
            order: leaf_at,
            cost: 0.0,
        });
    }
    let layout = Layout::new(tree);
    let dist = |a: usize, b: usize| d.get(leaf_at[a], leaf_at[b]);
    let mut cost = vec![0.0f64; n * n];
    let mut split = vec![(usize::MAX, usize::MAX); n * n];
    let mut inner = vec![(0.0f64, usize::MAX); n * n];

    for (k, m) in tree.merges.iter().enumerate() {
        let v = n + k;
        let (left, right) = (m.left, m.right);
        let (a0, a1) = (layout.start[v], layout.mid[v]);
        let (b0, b1) = (layout.mid[v], layout.end[v]);
        for l in a0..a1 {
            for kk in b0..b1 {
                let mut best = (f64::INFINITY, usize::MAX);
                for mm in layout.partners(tree, left, l) {
                    let c = cost[l * n + mm] + dist(mm, kk);
                    if c < best.0 {
                        best = (c, mm);
                    }
                }
                inner[l * n + kk] = best;
            }
        }
        for l in a0..a1 {
            for r in b0..b1 {
                let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
                for kk in layout.partners(tree, right, r) {
                    let (c_in, mm) = inner[l * n + kk];
                    let c = c_in + cost[kk * n + r];
                    if c < best.0 {
                        best = (c, mm, kk);
                    }
                }
                cost[l * n + r] = best.0;
                cost[r * n + l] = best.0;
                split[l * n + r] = (best.1, best.2);
            }
        }
    }

    let root = tree.root();
    let mut best = (f64::INFINITY, 0, 0);
    for l in layout.start[root]..layout.mid[root] {
        for r in layout.mid[root]..layout.end[root] {
            if cost[l * n + r] < best.0 {
                best = (cost[l * n + r], l, r);
            }
        }
    }

    let mut positions = Vec::with_capacity(n);
    // explicit stack of (node, first, last, reversed)
    let mut stack = vec![(root, best.1, best.2)];
    while let Some((node, first, last)) = stack.pop() {
        match tree.children(node) {
            None => positions.push(first),
            Some((left, right)) => {
                if first < layout.mid[node] {
                    let (mm, kk) = split[first * n + last];
                    stack.push((right, kk, last));
                    stack.push((left, first, mm));
                } else {
                    // read the left-first solution backwards
                    let (mm, kk) = split[last * n + first];
                    stack.push((left, mm, last));
                    stack.push((right, first, kk));
                }
            }
        }
    }
    let order: Vec<usize> = positions.into_iter().map(|p| leaf_at[p]).collect();
    let cost = path_cost(d, &order);
    Ok(LeafOrder { order, cost })
}

/// Flat clustering by removing the `k - 1` highest merges (ties: the later
/// merge counts as higher). Groups are numbered `1..=k` by first leaf
/// appearance.
pub fn cut(tree: &Dendrogram, k: usize) -> Result<Vec<usize>> {
    let n = tree.leaves;
    if k < 1 || k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            range: format!("[1, {n}]"),
        });
    }
    let mut ranked: Vec<usize> = (0..tree.merges.len()).collect();
    ranked.sort_by(|&a, &b| {
        tree.merges[a]
            .height
            .total_cmp(&tree.merges[b].height)
            .then(a.cmp(&b))
    });
    let kept = &ranked[..ranked.len() - (k - 1)];

    let mut min_leaf: Vec<usize> = (0..2 * n - 1).collect();
    for (idx, m) in tree.merges.iter().enumerate() {
        min_leaf[n + idx] = min_leaf[m.left].min(min_leaf[m.right]);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &idx in kept {
        let m = &tree.merges[idx];
        let a = find(&mut parent, min_leaf[m.left]);
        let b = find(&mut parent, min_leaf[m.right]);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label_of_root = vec![0usize; n];
    let mut next = 0;
    let mut groups = vec![0; n];
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        if label_of_root[root] == 0 {
            next += 1;
            label_of_root[root] = next;
        }
        groups[leaf] = label_of_root[root];
    }
    Ok(groups)
}
