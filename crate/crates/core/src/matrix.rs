use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::export::{csv_writer, fmt_real};

/// Symmetric, zero-diagonal dissimilarities between labelled observations,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Builds and validates a matrix from a row-major `n * n` buffer.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: values.len(),
            });
        }
        let m = DissimilarityMatrix { labels, values };
        m.validate()?;
        Ok(m)
    }

    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self::new(labels, values)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let mut seen = std::collections::HashSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                return Err(Error::InvalidMatrix(format!("duplicate label `{l}`")));
            }
        }
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidMatrix(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let d = self.get(i, j);
                if !d.is_finite() {
                    return Err(Error::InvalidMatrix(format!("non-finite entry at ({i}, {j})")));
                }
                if d != self.get(j, i) {
                    return Err(Error::InvalidMatrix(format!("asymmetric entry at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Element-wise square, for feeding distances to a method that expects
    /// squared dissimilarities.
    pub fn squared(&self) -> Self {
        DissimilarityMatrix {
            labels: self.labels.clone(),
            values: self.values.iter().map(|v| v * v).collect(),
        }
    }

    /// Restriction to the given observations, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let values = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        DissimilarityMatrix { labels, values }
    }

    /// Square CSV: header `,label_1,...,label_n`, one row per label.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (i, label) in self.labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.row(i).iter().map(|&v| fmt_real(v)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<dissimilarity csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let labels: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
        let n = labels.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if i >= n || rec.get(0) != Some(labels[i].as_str()) {
                return Err(Error::Format(format!("dissimilarity row {} label order", i + 1)));
            }
            if rec.len() != n + 1 {
                return Err(Error::Dimension {
                    expected: n + 1,
                    got: rec.len(),
                });
            }
            for cell in rec.iter().skip(1) {
                values.push(
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Format(format!("dissimilarity cell `{cell}`")))?,
                );
            }
        }
        Self::new(labels, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(DissimilarityMatrix::new(labels(2), vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DissimilarityMatrix::new(labels(2), vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DissimilarityMatrix::new(labels(2), vec![0.0, f64::NAN, f64::NAN, 0.0]).is_err());
        assert!(DissimilarityMatrix::new(labels(2), vec![0.0; 3]).is_err());
        assert!(DissimilarityMatrix::new(vec!["a".into(), "a".into()], vec![0.0; 4]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = DissimilarityMatrix::from_fn(labels(4), |i, j| ((i * 7 + j * 3) as f64).sqrt() / 3.0).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(",s0,s1,s2,s3\ns0,0,"));
        assert_eq!(DissimilarityMatrix::read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn subset_keeps_order() {
        let m = DissimilarityMatrix::from_fn(labels(3), |i, j| (i + j) as f64).unwrap();
        let s = m.subset(&[2, 0]);
        assert_eq!(s.labels(), ["s2", "s0"]);
        assert_eq!(s.get(0, 1), 2.0);
    }
}
