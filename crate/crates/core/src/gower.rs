//! Per-style feature table and Gower dissimilarities over mixed
//! numeric/nominal columns.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::corpus::{Corpus, HopMethod, MaltType};
use crate::error::{Error, Result};
use crate::export::{csv_writer, fmt_real};
use crate::grist::style_avg_subtypes;
use crate::hops::hop_diversity;
use crate::matrix::DissimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Nominal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub weight: f64,
}

impl FeatureSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Numeric,
            weight: 1.0,
        }
    }

    pub fn nominal(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Nominal,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Num(f64),
    Cat(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    row_labels: Vec<String>,
    columns: Vec<FeatureSpec>,
    values: Vec<Cell>,
}

impl FeatureTable {
    pub fn new(row_labels: Vec<String>, columns: Vec<FeatureSpec>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        let mut names = std::collections::HashSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::Format(format!("duplicate feature `{}`", c.name)));
            }
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(Error::Config(format!("feature `{}` weight must be positive", c.name)));
            }
        }
        let mut labels = std::collections::HashSet::new();
        for l in &row_labels {
            if !labels.insert(l.as_str()) {
                return Err(Error::Format(format!("duplicate row label `{l}`")));
            }
        }
        if rows.len() != row_labels.len() {
            return Err(Error::Dimension {
                expected: row_labels.len(),
                got: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(rows.len() * columns.len());
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::Dimension {
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            for (cell, spec) in row.iter().zip(&columns) {
                let ok = match (cell, spec.kind) {
                    (Cell::Missing, _) => true,
                    (Cell::Num(v), FeatureKind::Numeric) => v.is_finite(),
                    (Cell::Cat(_), FeatureKind::Nominal) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Format(format!("cell {cell:?} in column `{}`", spec.name)));
                }
            }
            values.extend(row);
        }
        Ok(FeatureTable {
            row_labels,
            columns,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn columns(&self) -> &[FeatureSpec] {
        &self.columns
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.values[row * self.columns.len() + col]
    }

    pub fn set_weight(&mut self, column: &str, weight: f64) -> Result<()> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::Config(format!("weight {weight} must be positive")));
        }
        let spec = self
            .columns
            .iter_mut()
            .find(|c| c.name == column)
            .ok_or_else(|| Error::Config(format!("no feature `{column}`")))?;
        spec.weight = weight;
        Ok(())
    }

    /// Numeric column values (missing or nominal cells as `None`).
    pub fn numeric_column(&self, col: usize) -> Vec<Option<f64>> {
        (0..self.rows())
            .map(|r| match self.cell(r, col) {
                Cell::Num(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Copy with rows in the given order.
    pub fn reorder_rows(&self, order: &[usize]) -> Self {
        let width = self.columns.len();
        FeatureTable {
            row_labels: order.iter().map(|&i| self.row_labels[i].clone()).collect(),
            columns: self.columns.clone(),
            values: order
                .iter()
                .flat_map(|&i| self.values[i * width..(i + 1) * width].iter().cloned())
                .collect(),
        }
    }

    /// Replaces every numeric column with its per-column empirical CDF.
    pub fn percentized(&self) -> Result<Self> {
        let mut out = self.clone();
        let width = self.columns.len();
        for (c, spec) in self.columns.iter().enumerate() {
            if spec.kind != FeatureKind::Numeric {
                continue;
            }
            let column = self.numeric_column(c);
            let present: Vec<(usize, f64)> =
                column.iter().enumerate().filter_map(|(r, v)| Some((r, (*v)?))).collect();
            if present.is_empty() {
                continue;
            }
            let ranks = crate::grist::percentize(&present.iter().map(|p| p.1).collect::<Vec<_>>())?;
            for ((r, _), p) in present.iter().zip(ranks) {
                out.values[r * width + c] = Cell::Num(p);
            }
        }
        Ok(out)
    }

    /// CSV with header `style,<feature names>`; missing cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        let mut header = vec!["style".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for (r, label) in self.row_labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            for c in 0..self.columns.len() {
                rec.push(match self.cell(r, c) {
                    Cell::Missing => String::new(),
                    Cell::Num(v) => fmt_real(*v),
                    Cell::Cat(s) => s.clone(),
                });
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<features csv>", e))?;
        Ok(())
    }

    /// Reads the layout written by [`FeatureTable::write_csv`]. A column is
    /// numeric when every non-empty cell parses as a number, nominal otherwise.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let names: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
        let mut labels = Vec::new();
        let mut raw: Vec<Vec<String>> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != names.len() + 1 {
                return Err(Error::Dimension {
                    expected: names.len() + 1,
                    got: rec.len(),
                });
            }
            labels.push(rec[0].to_string());
            raw.push(rec.iter().skip(1).map(|s| s.trim().to_string()).collect());
        }
        let columns: Vec<FeatureSpec> = names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let numeric = raw
                    .iter()
                    .all(|row| row[c].is_empty() || row[c].parse::<f64>().is_ok_and(f64::is_finite));
                if numeric {
                    FeatureSpec::numeric(name.clone())
                } else {
                    FeatureSpec::nominal(name.clone())
                }
            })
            .collect();
        let rows = raw
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .zip(&columns)
                    .map(|(s, spec)| match (s.is_empty(), spec.kind) {
                        (true, _) => Cell::Missing,
                        (false, FeatureKind::Numeric) => Cell::Num(s.parse().expect("checked numeric")),
                        (false, FeatureKind::Nominal) => Cell::Cat(s),
                    })
                    .collect()
            })
            .collect();
        FeatureTable::new(labels, columns, rows)
    }
}

pub const VITAL_FEATURES: [&str; 6] = ["sg", "fg", "adf", "abv", "srm", "ibu"];

/// Column names of [`build_feature_table`]: malt-type subtype averages, hop
/// method diversity averages, then style means of the vital statistics.
pub fn feature_names() -> Vec<String> {
    MaltType::ALL
        .iter()
        .map(|m| format!("malt_{m}"))
        .chain(HopMethod::ALL.iter().map(|h| format!("hop_{h}")))
        .chain(VITAL_FEATURES.iter().map(|v| v.to_string()))
        .collect()
}

/// One row per style (sorted by name) with 22 numeric features.
pub fn build_feature_table(corpus: &Corpus) -> Result<FeatureTable> {
    if corpus.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let mut styles: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in corpus.recipes.iter().enumerate() {
        styles.entry(r.style.as_str()).or_default().push(i);
    }
    let mut labels = Vec::with_capacity(styles.len());
    let mut rows = Vec::with_capacity(styles.len());
    for (style, members) in &styles {
        let malt = style_avg_subtypes(corpus, style)?;
        let hop = hop_diversity(corpus, style)?;
        let mut row: Vec<Cell> = MaltType::ALL
            .iter()
            .map(|m| Cell::Num(malt.avg_subtypes[m]))
            .chain(HopMethod::ALL.iter().map(|h| Cell::Num(hop.avg_distinct_hops[h])))
            .collect();
        let mut sums = [0.0f64; 6];
        let mut count = 0usize;
        for &i in members {
            let Some(v) = corpus.recipes[i].vitals else { continue };
            let adf = v.adf()?;
            for (s, x) in sums.iter_mut().zip([v.og, v.fg, adf, v.abv, v.srm, v.ibu]) {
                *s += x;
            }
            count += 1;
        }
        row.extend(sums.iter().map(|s| {
            if count == 0 {
                Cell::Missing
            } else {
                Cell::Num(s / count as f64)
            }
        }));
        labels.push(style.to_string());
        rows.push(row);
    }
    let columns = feature_names().into_iter().map(FeatureSpec::numeric).collect();
    FeatureTable::new(labels, columns, rows)
}

/// Numeric columns whose observed range is zero (or that have no values);
/// they do not contribute to [`gower_matrix`].
pub fn constant_columns(table: &FeatureTable) -> Vec<String> {
    column_ranges(table)
        .iter()
        .zip(table.columns())
        .filter(|(r, spec)| spec.kind == FeatureKind::Numeric && !matches!(r, Some(x) if *x > 0.0))
        .map(|(_, spec)| spec.name.clone())
        .collect()
}

fn column_ranges(table: &FeatureTable) -> Vec<Option<f64>> {
    (0..table.columns().len())
        .map(|c| {
            let present: Vec<f64> = table.numeric_column(c).into_iter().flatten().collect();
            if present.is_empty() {
                return None;
            }
            let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Some(hi - lo)
        })
        .collect()
}

/// Gower dissimilarity between every pair of rows:
/// `d_ij = sum_k w_k delta_ijk d_ijk / sum_k w_k delta_ijk`, where numeric
/// terms are range-normalized absolute differences and nominal terms are
/// mismatch indicators. Missing cells and zero-range columns get
/// `delta = 0`.
pub fn gower_matrix(table: &FeatureTable) -> Result<DissimilarityMatrix> {
    let n = table.rows();
    if n < 2 {
        return Err(Error::Insufficient("gower needs at least two rows".into()));
    }
    let ranges = column_ranges(table);
    let constant = constant_columns(table);
    if !constant.is_empty() {
        log::warn!("constant feature columns ignored: {}", constant.join(", "));
    }
    let width = table.columns().len();
    let pair = |i: usize, j: usize| -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for c in 0..width {
            let spec = &table.columns()[c];
            let term = match (table.cell(i, c), table.cell(j, c)) {
                (Cell::Num(a), Cell::Num(b)) => match ranges[c] {
                    Some(r) if r > 0.0 => (a - b).abs() / r,
                    _ => continue,
                },
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
        (den > 0.0).then(|| num / den)
    };
    let upper: Vec<Vec<Option<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| ((i + 1)..n).map(|j| pair(i, j)).collect())
        .collect();
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, d) in row.iter().enumerate() {
            let j = i + 1 + off;
            let d = d.ok_or_else(|| {
                Error::NoComparableFeatures(table.row_labels()[i].clone(), table.row_labels()[j].clone())
            })?;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DissimilarityMatrix::new(table.row_labels().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Fermentation, IngredientEntry, Recipe, VitalStats};

    fn mixed_fixture() -> FeatureTable {
        FeatureTable::new(
            vec!["p".into(), "q".into(), "r".into(), "s".into()],
            vec![FeatureSpec::numeric("x"), FeatureSpec::nominal("color")],
            vec![
                vec![Cell::Num(0.0), Cell::Cat("A".into())],
                vec![Cell::Num(10.0), Cell::Cat("A".into())],
                vec![Cell::Num(5.0), Cell::Cat("B".into())],
                vec![Cell::Num(0.0), Cell::Missing],
            ],
        )
        .unwrap()
    }

    #[test]
    fn hand_gower_values() {
        let d = gower_matrix(&mixed_fixture()).unwrap();
        assert_eq!(d.get(0, 1), 0.5);
        assert_eq!(d.get(0, 2), 0.75);
        // (0, missing) vs (10, A): only the numeric column counts
        assert_eq!(d.get(3, 1), 1.0);
        assert_eq!(d.get(3, 0), 0.0);
    }

    #[test]
    fn identical_rows_are_zero() {
        let t = FeatureTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![FeatureSpec::numeric("x"), FeatureSpec::numeric("y")],
            vec![
                vec![Cell::Num(1.0), Cell::Num(2.0)],
                vec![Cell::Num(1.0), Cell::Num(2.0)],
                vec![Cell::Num(3.0), Cell::Num(5.0)],
            ],
        )
        .unwrap();
        assert_eq!(gower_matrix(&t).unwrap().get(0, 1), 0.0);
    }

    #[test]
    fn no_comparable_columns_is_an_error() {
        let t = FeatureTable::new(
            vec!["a".into(), "b".into()],
            vec![FeatureSpec::numeric("x"), FeatureSpec::nominal("c")],
            vec![vec![Cell::Num(1.0), Cell::Missing], vec![Cell::Missing, Cell::Cat("z".into())]],
        )
        .unwrap();
        assert!(matches!(gower_matrix(&t), Err(Error::NoComparableFeatures(_, _))));
    }

    #[test]
    fn constant_columns_are_flagged_and_ignored() {
        let t = FeatureTable::new(
            vec!["a".into(), "b".into()],
            vec![FeatureSpec::numeric("x"), FeatureSpec::numeric("k")],
            vec![vec![Cell::Num(1.0), Cell::Num(7.0)], vec![Cell::Num(2.0), Cell::Num(7.0)]],
        )
        .unwrap();
        assert_eq!(constant_columns(&t), vec!["k".to_string()]);
        assert_eq!(gower_matrix(&t).unwrap().get(0, 1), 1.0);
    }

    #[test]
    fn weights_shift_balance() {
        let mut t = mixed_fixture();
        t.set_weight("color", 3.0).unwrap();
        let d = gower_matrix(&t).unwrap();
        assert_eq!(d.get(0, 2), (0.5 + 3.0) / 4.0);
        assert!(t.set_weight("color", 0.0).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(FeatureTable::new(
            vec!["a".into()],
            vec![FeatureSpec::numeric("x"), FeatureSpec::numeric("x")],
            vec![vec![Cell::Num(1.0), Cell::Num(1.0)]],
        )
        .is_err());
        assert!(FeatureTable::new(
            vec!["a".into()],
            vec![FeatureSpec::numeric("x")],
            vec![vec![Cell::Cat("z".into())]],
        )
        .is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = mixed_fixture();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("style,x,color\np,0,A\n"));
        assert_eq!(FeatureTable::read_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn percentized_columns() {
        let p = mixed_fixture().percentized().unwrap();
        let col: Vec<_> = p.numeric_column(0).into_iter().flatten().collect();
        assert_eq!(col, vec![0.5, 1.0, 0.75, 0.5]);
        assert_eq!(p.cell(2, 1), &Cell::Cat("B".into()));
    }

    fn recipe(id: &str, style: &str, ibu: f64, hops: &[(&str, HopMethod)]) -> Recipe {
        let mut ingredients = vec![IngredientEntry::grain("Pale", MaltType::Base, 4000.0)];
        ingredients.extend(hops.iter().map(|(n, m)| IngredientEntry::hop(n, *m, ibu)));
        Recipe {
            id: id.into(),
            style: style.into(),
            category: "C".into(),
            fermentation: Fermentation::Hot,
            ingredients,
            vitals: Some(VitalStats {
                og: 1.050,
                fg: 1.010,
                abv: 5.0,
                srm: 5.0,
                ibu,
            }),
        }
    }

    #[test]
    fn feature_table_shape_and_values() {
        let corpus = Corpus::from_recipes(vec![
            recipe("1", "Stout", 40.0, &[("Fuggle", HopMethod::Boil)]),
            recipe("2", "IPA", 60.0, &[("Citra", HopMethod::Boil), ("Mosaic", HopMethod::DryHop)]),
            recipe("3", "IPA", 70.0, &[("Citra", HopMethod::Boil)]),
            recipe("4", "Pils", 30.0, &[("Saaz", HopMethod::Boil)]),
        ]);
        let t = build_feature_table(&corpus).unwrap();
        assert_eq!((t.rows(), t.columns().len()), (3, 22));
        assert_eq!(t.row_labels(), ["IPA", "Pils", "Stout"]);
        let col = |name: &str| t.columns().iter().position(|c| c.name == name).unwrap();
        assert_eq!(t.cell(0, col("ibu")), &Cell::Num(65.0));
        assert_eq!(t.cell(0, col("hop_dry_hop")), &Cell::Num(0.5));
        assert_eq!(t.cell(2, col("hop_dry_hop")), &Cell::Num(0.0));
        assert_eq!(t.cell(1, col("malt_base")), &Cell::Num(1.0));
        assert!(build_feature_table(&Corpus::default()).is_err());
    }
}
