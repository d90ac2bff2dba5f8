//! Online relational self-organizing map.
//!
//! Prototypes live in the convex hull of the observations: unit `k` is a
//! weight vector `beta_k` on the simplex over the `n` observations, and its
//! distance to observation `i` is `(D beta_k)_i - 0.5 * beta_k' D beta_k`,
//! which only needs the dissimilarity matrix. Training draws one observation
//! per step, finds its best-matching unit and pulls every unit's weights
//! toward the observation's indicator vector with a Gaussian grid
//! neighbourhood.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::{csv_writer, fmt_real};
use crate::matrix::DissimilarityMatrix;
use crate::rng::SeededRng;
use crate::seriate::{agglomerate, cut, Linkage};

const SIMPLEX_DRIFT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub grid_w: usize,
    pub grid_h: usize,
    /// Defaults to `100 * n` when unset.
    pub iterations: Option<usize>,
    pub seed: u64,
    pub mu0: f64,
    /// Defaults to `max(grid_w, grid_h) / 2` when unset.
    pub sigma0: Option<f64>,
    pub sigma_final: f64,
    /// Square the dissimilarities before training.
    #[serde(default)]
    pub squared: bool,
}

impl SomConfig {
    pub fn new(seed: u64) -> Self {
        SomConfig {
            grid_w: 5,
            grid_h: 5,
            iterations: None,
            seed,
            mu0: 0.3,
            sigma0: None,
            sigma_final: 0.5,
            squared: false,
        }
    }

    pub fn units(&self) -> usize {
        self.grid_w * self.grid_h
    }

    pub fn iterations_for(&self, n: usize) -> usize {
        self.iterations.unwrap_or(100 * n)
    }

    pub fn initial_radius(&self) -> f64 {
        self.sigma0
            .unwrap_or(self.grid_w.max(self.grid_h) as f64 / 2.0)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.units() < 2 {
            return Err(Error::Config("SOM grid needs at least two units".into()));
        }
        if self.iterations_for(n) < self.units() {
            return Err(Error::Config(format!(
                "{} iterations < {} units",
                self.iterations_for(n),
                self.units()
            )));
        }
        if !(self.mu0 > 0.0 && self.mu0 <= 1.0) {
            return Err(Error::Config(format!("mu0 {} outside (0, 1]", self.mu0)));
        }
        let s0 = self.initial_radius();
        if !(s0 > 0.0 && s0.is_finite() && self.sigma_final > 0.0 && self.sigma_final.is_finite()) {
            return Err(Error::Config("neighbourhood radii must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomModel {
    pub config: SomConfig,
    pub unit_coords: Vec<(usize, usize)>,
    /// Row-major `units x n` convex weights, serialized with 17 significant
    /// digits.
    #[serde(serialize_with = "serialize_reals")]
    pub beta: Vec<f64>,
    pub labels: Vec<String>,
    /// Quantization error before training, then after every epoch of `n`
    /// steps (and after the final partial epoch).
    pub training_log: Vec<f64>,
}

impl SomModel {
    pub fn units(&self) -> usize {
        self.unit_coords.len()
    }

    pub fn n_obs(&self) -> usize {
        self.labels.len()
    }

    pub fn beta_row(&self, unit: usize) -> &[f64] {
        let n = self.n_obs();
        &self.beta[unit * n..(unit + 1) * n]
    }

    /// Largest deviation of any beta row from the simplex (negative entries or
    /// sum away from one).
    pub fn simplex_violation(&self) -> f64 {
        simplex_violation(&self.beta, self.n_obs())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: SomModel = serde_json::from_str(text)?;
        let n = model.n_obs();
        if model.beta.len() != model.units() * n || model.units() != model.config.units() {
            return Err(Error::Format("model.json beta dimensions".into()));
        }
        if model.simplex_violation() > 1e-9 {
            return Err(Error::Format("model.json beta rows off the simplex".into()));
        }
        Ok(model)
    }

    fn effective<'a>(&self, d: &'a DissimilarityMatrix) -> std::borrow::Cow<'a, DissimilarityMatrix> {
        effective(d, self.config.squared)
    }

    fn check_labels(&self, d: &DissimilarityMatrix) -> Result<()> {
        if d.labels() != self.labels.as_slice() {
            return Err(Error::LabelMismatch);
        }
        Ok(())
    }
}

fn serialize_reals<S: serde::Serializer>(values: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::{Error as _, SerializeSeq};
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for &v in values {
        let raw = serde_json::value::RawValue::from_string(fmt_real(v)).map_err(S::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

fn simplex_violation(beta: &[f64], n: usize) -> f64 {
    beta.chunks(n)
        .map(|row| {
            let neg = row.iter().cloned().fold(0.0f64, |acc, v| acc.max(-v));
            neg.max((row.iter().sum::<f64>() - 1.0).abs())
        })
        .fold(0.0, f64::max)
}

fn effective(d: &DissimilarityMatrix, squared: bool) -> std::borrow::Cow<'_, DissimilarityMatrix> {
    if squared {
        std::borrow::Cow::Owned(d.squared())
    } else {
        std::borrow::Cow::Borrowed(d)
    }
}

fn grid_coords(cfg: &SomConfig) -> Vec<(usize, usize)> {
    (0..cfg.units()).map(|u| (u % cfg.grid_w, u / cfg.grid_w)).collect()
}

fn grid_dist2(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = a.0 as f64 - b.0 as f64;
    let dy = a.1 as f64 - b.1 as f64;
    dx * dx + dy * dy
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn d_times(d: &DissimilarityMatrix, beta: &[f64]) -> Vec<f64> {
    (0..d.len()).map(|i| dot(d.row(i), beta)).collect()
}

/// `(D beta)_i - 0.5 * beta' D beta`. May be negative when `D` is not
/// Euclidean.
pub fn relational_distance(d: &DissimilarityMatrix, beta: &[f64], i: usize) -> Result<f64> {
    if beta.len() != d.len() {
        return Err(Error::Dimension {
            expected: d.len(),
            got: beta.len(),
        });
    }
    if i >= d.len() {
        return Err(Error::Dimension {
            expected: d.len(),
            got: i,
        });
    }
    let db = d_times(d, beta);
    Ok(db[i] - 0.5 * dot(beta, &db))
}

/// Distances of every observation to every unit, `units x n` row-major.
fn all_distances(beta: &[f64], d: &DissimilarityMatrix) -> Vec<f64> {
    let n = d.len();
    beta.chunks(n)
        .flat_map(|row| {
            let db = d_times(d, row);
            let half_q = 0.5 * dot(row, &db);
            db.into_iter().map(move |v| v - half_q).collect::<Vec<_>>()
        })
        .collect()
}

fn argmin_unit(dist: &[f64], units: usize, n: usize, i: usize) -> (usize, f64) {
    let mut best = (0, dist[i]);
    for k in 1..units {
        let v = dist[k * n + i];
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// State handed to a training observer after each epoch.
pub struct EpochSnapshot<'a> {
    pub epoch: usize,
    pub step: usize,
    pub beta: &'a [f64],
    pub quantization_error: f64,
}

/// Seeded random points on the simplex (normalized exponential draws), one
/// row per unit.
pub fn random_prototypes(units: usize, n: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut beta = Vec::with_capacity(units * n);
    for _ in 0..units {
        let row: Vec<f64> = (0..n).map(|_| rng.exponential() + f64::MIN_POSITIVE).collect();
        let s: f64 = row.iter().sum();
        beta.extend(row.into_iter().map(|v| v / s));
    }
    beta
}

pub fn train(d: &DissimilarityMatrix, cfg: &SomConfig) -> Result<SomModel> {
    train_observed(d, cfg, |_| {})
}

/// [`train`] with a callback after every epoch.
pub fn train_observed(
    d: &DissimilarityMatrix,
    cfg: &SomConfig,
    observer: impl FnMut(EpochSnapshot<'_>),
) -> Result<SomModel> {
    let n = d.len();
    if n == 0 {
        return Err(Error::Empty("dissimilarity matrix"));
    }
    cfg.validate(n)?;
    let mut rng = SeededRng::new(cfg.seed);
    let init = random_prototypes(cfg.units(), n, &mut rng);
    let draws = std::iter::repeat_with(move || rng.index(n));
    train_from(d, cfg, init, draws, observer)
}

/// Training from explicit initial prototypes and an explicit sequence of
/// sampled observations; [`train`] feeds both from the seeded generator.
pub fn train_from(
    d: &DissimilarityMatrix,
    cfg: &SomConfig,
    init: Vec<f64>,
    draws: impl IntoIterator<Item = usize>,
    mut observer: impl FnMut(EpochSnapshot<'_>),
) -> Result<SomModel> {
    let n = d.len();
    cfg.validate(n)?;
    let units = cfg.units();
    if init.len() != units * n {
        return Err(Error::Dimension {
            expected: units * n,
            got: init.len(),
        });
    }
    if simplex_violation(&init, n) > 1e-9 {
        return Err(Error::Config("initial prototypes must lie on the simplex".into()));
    }
    if n < units {
        log::warn!("{n} observations for {units} SOM units; some units will stay empty");
    }
    let d = effective(d, cfg.squared);
    let d = d.as_ref();
    let coords = grid_coords(cfg);
    let total = cfg.iterations_for(n);
    let sigma0 = cfg.initial_radius();

    let mut beta = init;
    let mut dbeta: Vec<f64> = beta.chunks(n).flat_map(|row| d_times(d, row)).collect();
    let mut quad: Vec<f64> = (0..units)
        .map(|k| dot(&beta[k * n..(k + 1) * n], &dbeta[k * n..(k + 1) * n]))
        .collect();

    let qe = |dbeta: &[f64], quad: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                (0..units)
                    .map(|k| dbeta[k * n + i] - 0.5 * quad[k])
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0)
            })
            .sum::<f64>()
            / n as f64
    };
    let mut log = vec![qe(&dbeta, &quad)];
    observer(EpochSnapshot {
        epoch: 0,
        step: 0,
        beta: &beta,
        quantization_error: log[0],
    });

    let mut draws = draws.into_iter();
    for t in 0..total {
        let i = draws
            .next()
            .ok_or_else(|| Error::Insufficient("draw sequence ended early".into()))?;
        if i >= n {
            return Err(Error::Dimension { expected: n, got: i });
        }
        let mut bmu = 0;
        let mut best = f64::INFINITY;
        for k in 0..units {
            let v = dbeta[k * n + i] - 0.5 * quad[k];
            if v < best {
                best = v;
                bmu = k;
            }
        }
        let progress = t as f64 / total as f64;
        let mu = cfg.mu0 * (1.0 - progress);
        let sigma = if total > 1 {
            sigma0 + (cfg.sigma_final - sigma0) * t as f64 / (total - 1) as f64
        } else {
            sigma0
        };
        let d_col = d.row(i);
        for k in 0..units {
            let lambda = mu * (-grid_dist2(coords[k], coords[bmu]) / (2.0 * sigma * sigma)).exp();
            if lambda <= 0.0 {
                continue;
            }
            let keep = 1.0 - lambda;
            let row = &mut beta[k * n..(k + 1) * n];
            let drow = &mut dbeta[k * n..(k + 1) * n];
            let old_di = drow[i];
            for v in row.iter_mut() {
                *v *= keep;
            }
            row[i] += lambda;
            for (dv, dc) in drow.iter_mut().zip(d_col) {
                *dv = keep * *dv + lambda * dc;
            }
            quad[k] = keep * keep * quad[k] + 2.0 * lambda * keep * old_di + lambda * lambda * d_col[i];
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_DRIFT {
                for v in row.iter_mut() {
                    *v /= sum;
                }
                let fresh = d_times(d, row);
                quad[k] = dot(row, &fresh);
                drow.copy_from_slice(&fresh);
            }
        }
        let step = t + 1;
        if step % n == 0 || step == total {
            let e = qe(&dbeta, &quad);
            log.push(e);
            observer(EpochSnapshot {
                epoch: log.len() - 1,
                step,
                beta: &beta,
                quantization_error: e,
            });
        }
    }

    Ok(SomModel {
        config: cfg.clone(),
        unit_coords: coords,
        beta,
        labels: d.labels().to_vec(),
        training_log: log,
    })
}

/// Best-matching unit of every observation (ties to the lowest unit).
pub fn assign(model: &SomModel, d: &DissimilarityMatrix) -> Result<Vec<usize>> {
    model.check_labels(d)?;
    let d = model.effective(d);
    let n = d.len();
    let dist = all_distances(&model.beta, &d);
    Ok((0..n).map(|i| argmin_unit(&dist, model.units(), n, i).0).collect())
}

/// Mean over observations of the (non-negative part of the) distance to the
/// best-matching unit.
pub fn quantization_error(model: &SomModel, d: &DissimilarityMatrix) -> Result<f64> {
    model.check_labels(d)?;
    let d = model.effective(d);
    let n = d.len();
    let dist = all_distances(&model.beta, &d);
    Ok((0..n)
        .map(|i| argmin_unit(&dist, model.units(), n, i).1.max(0.0))
        .sum::<f64>()
        / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Taxonomy {
    pub labels: Vec<String>,
    /// Observation -> unit (0-based).
    pub assignment: Vec<usize>,
    /// Unit -> supercluster id (1-based).
    pub superclusters: Vec<usize>,
    /// Observations per supercluster, indexed by id - 1.
    pub counts: Vec<usize>,
}

impl Taxonomy {
    pub fn supercluster_of(&self, obs: usize) -> usize {
        self.superclusters[self.assignment[obs]]
    }

    pub fn observation_partition(&self) -> Vec<usize> {
        (0..self.labels.len()).map(|i| self.supercluster_of(i)).collect()
    }

    /// `style,cluster,supercluster` with 1-based cluster (unit) numbers.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["style", "cluster", "supercluster"])?;
        for (i, label) in self.labels.iter().enumerate() {
            w.write_record([
                label.clone(),
                (self.assignment[i] + 1).to_string(),
                self.supercluster_of(i).to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<taxonomy csv>", e))?;
        Ok(())
    }
}

/// Groups the SOM units into `k` superclusters by average-linkage clustering
/// of prototype-to-prototype relational distances
/// `beta_a' D beta_b - 0.5 (beta_a' D beta_a + beta_b' D beta_b)` over the
/// non-empty units. Empty units join the supercluster of the nearest
/// non-empty unit on the grid.
pub fn superclusters(model: &SomModel, d: &DissimilarityMatrix, k: usize) -> Result<Taxonomy> {
    let assignment = assign(model, d)?;
    let units = model.units();
    let mut occupied: Vec<usize> = assignment.clone();
    occupied.sort_unstable();
    occupied.dedup();
    if k < 1 || k > occupied.len() {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            range: format!("[1, {}]", occupied.len()),
        });
    }
    let de = model.effective(d);
    let db: Vec<Vec<f64>> = occupied.iter().map(|&u| d_times(&de, model.beta_row(u))).collect();
    let quad: Vec<f64> = occupied
        .iter()
        .zip(&db)
        .map(|(&u, v)| dot(model.beta_row(u), v))
        .collect();
    let names: Vec<String> = occupied.iter().map(|u| format!("unit{}", u + 1)).collect();
    let unit_d = DissimilarityMatrix::from_fn(names, |a, b| {
        let cross = dot(model.beta_row(occupied[a]), &db[b]);
        (cross - 0.5 * (quad[a] + quad[b])).max(0.0)
    })?;
    let groups = if occupied.len() == 1 {
        vec![1]
    } else {
        cut(&agglomerate(&unit_d, Linkage::Average)?, k)?
    };

    let mut super_of = vec![0usize; units];
    for (&u, &g) in occupied.iter().zip(&groups) {
        super_of[u] = g;
    }
    for u in 0..units {
        if super_of[u] != 0 {
            continue;
        }
        let nearest = occupied
            .iter()
            .copied()
            .min_by(|&a, &b| {
                grid_dist2(model.unit_coords[u], model.unit_coords[a])
                    .total_cmp(&grid_dist2(model.unit_coords[u], model.unit_coords[b]))
                    .then(a.cmp(&b))
            })
            .expect("at least one occupied unit");
        super_of[u] = groups[occupied.binary_search(&nearest).unwrap()];
    }
    let mut counts = vec![0usize; k];
    for &u in &assignment {
        counts[super_of[u] - 1] += 1;
    }
    Ok(Taxonomy {
        labels: model.labels.clone(),
        assignment,
        superclusters: super_of,
        counts,
    })
}
