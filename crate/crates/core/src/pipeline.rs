//! End-to-end run: filter, statistics, features, dissimilarities, SOM,
//! taxonomy and seriation, with a manifest of hashes for every file read or
//! written.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{filter_complete, parse_corpus, write_jsonl, Corpus};
use crate::error::{Error, Result};
use crate::gower::{build_feature_table, gower_matrix};
use crate::report::{
    fermentation_tests, write_diversity_csv, write_grist_csv, write_heatmap_csv, write_hop_diversity_csv,
    write_hops_csv, write_tests_jsonl, TestSelection,
};
use crate::seriate::{agglomerate, optimal_leaf_order, Linkage};
use crate::som::{superclusters, train, SomConfig};

pub const SEED_ENV: &str = "MALTMAP_SEED";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Optional SOM settings; unset fields keep the [`SomConfig`] defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SomOverrides {
    pub grid_w: Option<usize>,
    pub grid_h: Option<usize>,
    pub iterations: Option<usize>,
    pub mu0: Option<f64>,
    pub sigma0: Option<f64>,
    pub sigma_final: Option<f64>,
    pub squared: Option<bool>,
}

impl SomOverrides {
    pub fn apply(&self, seed: u64) -> SomConfig {
        let mut cfg = SomConfig::new(seed);
        if let Some(v) = self.grid_w {
            cfg.grid_w = v;
        }
        if let Some(v) = self.grid_h {
            cfg.grid_h = v;
        }
        cfg.iterations = self.iterations;
        if let Some(v) = self.mu0 {
            cfg.mu0 = v;
        }
        cfg.sigma0 = self.sigma0;
        if let Some(v) = self.sigma_final {
            cfg.sigma_final = v;
        }
        if let Some(v) = self.squared {
            cfg.squared = v;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub som: SomOverrides,
    pub tests: TestSelection,
    pub linkage: Linkage,
    pub k: usize,
    pub percentize_heatmap: bool,
    /// Worker threads for the parallel stages; does not change any output.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Vec::new(),
            out_dir: PathBuf::from("out"),
            seed: None,
            som: SomOverrides::default(),
            tests: TestSelection::default(),
            linkage: Linkage::Average,
            k: 4,
            percentize_heatmap: true,
            threads: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The configured seed, else the `MALTMAP_SEED` environment variable.
    pub fn resolve_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not a 64-bit integer"))),
            Err(_) => Err(Error::Config(format!("a seed is required (flag, config or {SEED_ENV})"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Filter,
    Statistics,
    Features,
    Dissim,
    Som,
    Taxonomy,
    Seriate,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Filter => "filter",
            Stage::Statistics => "statistics",
            Stage::Features => "features",
            Stage::Dissim => "dissim",
            Stage::Som => "som",
            Stage::Taxonomy => "taxonomy",
            Stage::Seriate => "seriate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("pipeline stage `{}` failed: {source}", stage.as_str())]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub som: u64,
    pub bootstrap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seeds: Seeds,
    pub config: PipelineConfig,
    pub inputs: Vec<FileHash>,
    /// Paths relative to the manifest's directory.
    pub outputs: Vec<FileHash>,
    pub stages: Vec<Stage>,
    pub status: String,
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Outcome of re-hashing one manifest entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashCheck {
    pub path: String,
    pub expected: String,
    pub actual: Option<String>,
}

impl HashCheck {
    pub fn ok(&self) -> bool {
        self.actual.as_deref() == Some(self.expected.as_str())
    }
}

/// Re-hashes every input and output listed in a manifest.
pub fn verify_manifest(path: impl AsRef<Path>) -> Result<Vec<HashCheck>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let check = |p: PathBuf, entry: &FileHash| HashCheck {
        path: entry.path.clone(),
        expected: entry.sha256.clone(),
        actual: sha256_file(p).ok(),
    };
    Ok(manifest
        .inputs
        .iter()
        .map(|e| check(PathBuf::from(&e.path), e))
        .chain(manifest.outputs.iter().map(|e| check(base.join(&e.path), e)))
        .collect())
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    seed: u64,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
    stages: Vec<Stage>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let path = self.cfg.out_dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        drop(w);
        self.outputs.push(FileHash {
            path: name.to_string(),
            sha256: sha256_file(&path)?,
        });
        Ok(())
    }

    fn manifest(&self, status: String) -> Manifest {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: Seeds {
                som: self.seed,
                bootstrap: self.seed,
            },
            config: PipelineConfig {
                seed: Some(self.seed),
                ..self.cfg.clone()
            },
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            stages: self.stages.clone(),
            status,
        }
    }

    fn write_manifest(&self, status: String) -> Result<()> {
        let path = self.cfg.out_dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self.manifest(status))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

fn load_inputs(paths: &[PathBuf]) -> Result<Corpus> {
    if paths.is_empty() {
        return Err(Error::Config("no input corpus given".into()));
    }
    let mut all = Corpus::default();
    for p in paths {
        let c = parse_corpus(p)?;
        let offset = all.recipes.len() + all.malformed.len();
        all.recipes.extend(c.recipes);
        all.malformed.extend(c.malformed.into_iter().map(|mut m| {
            m.line += offset;
            m
        }));
        all.provenance.sources.extend(c.provenance.sources);
    }
    Ok(all)
}

/// Runs every stage in order and writes `manifest.json` into the output
/// directory. On failure the manifest records the completed stages and the
/// failing one.
pub fn run_pipeline(cfg: &PipelineConfig) -> std::result::Result<Manifest, PipelineError> {
    let fail = |stage| move |source| PipelineError { stage, source };
    let seed = cfg.resolve_seed().map_err(fail(Stage::Filter))?;
    if cfg.k == 0 {
        return Err(fail(Stage::Filter)(Error::Config("k must be at least 1".into())));
    }
    fs::create_dir_all(&cfg.out_dir).map_err(|e| fail(Stage::Filter)(Error::io(&cfg.out_dir, e)))?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cfg.threads {
            b = b.num_threads(t);
        }
        b.build()
            .map_err(|e| fail(Stage::Filter)(Error::Config(format!("thread pool: {e}"))))?
    };
    let mut run = Run {
        cfg,
        seed,
        inputs: Vec::new(),
        outputs: Vec::new(),
        stages: Vec::new(),
    };
    let result = pool.install(|| stages(&mut run));
    match result {
        Ok(()) => {
            run.write_manifest("complete".into()).map_err(fail(Stage::Seriate))?;
            Ok(run.manifest("complete".into()))
        }
        Err(e) => {
            let note = format!("failed at {}: {}", e.stage.as_str(), e.source);
            if let Err(w) = run.write_manifest(note) {
                log::error!("could not write partial manifest: {w}");
            }
            Err(e)
        }
    }
}

fn stages(run: &mut Run<'_>) -> std::result::Result<(), PipelineError> {
    let fail = |stage| move |source| PipelineError { stage, source };
    let cfg = run.cfg;

    let stage = Stage::Filter;
    let corpus = load_inputs(&cfg.inputs).map_err(fail(stage))?;
    for p in &cfg.inputs {
        run.inputs.push(FileHash {
            path: p.display().to_string(),
            sha256: sha256_file(p).map_err(fail(stage))?,
        });
    }
    let (kept, report) = filter_complete(&corpus);
    log::info!(
        "kept {} of {} records (discard rate {:.4})",
        report.kept,
        report.total_seen,
        report.discard_rate()
    );
    run.write("kept.jsonl", |w| {
        write_jsonl(&kept, w).map_err(|e| Error::io("kept.jsonl", e))
    })
    .map_err(fail(stage))?;
    run.write("rejects.csv", |w| report.write_csv(w)).map_err(fail(stage))?;
    run.stages.push(stage);

    let stage = Stage::Statistics;
    if !kept.is_empty() {
        run.write("grist.csv", |w| write_grist_csv(&kept, w)).map_err(fail(stage))?;
        run.write("diversity.csv", |w| write_diversity_csv(&kept, w)).map_err(fail(stage))?;
        run.write("hops.csv", |w| write_hops_csv(&kept, w)).map_err(fail(stage))?;
        run.write("hop_diversity.csv", |w| write_hop_diversity_csv(&kept, w))
            .map_err(fail(stage))?;
        let tests = fermentation_tests(&kept, cfg.tests, run.seed);
        run.write("tests.jsonl", |w| write_tests_jsonl(&tests, w)).map_err(fail(stage))?;
    }
    run.stages.push(stage);

    let stage = Stage::Features;
    let table = build_feature_table(&kept).map_err(fail(stage))?;
    run.write("features.csv", |w| table.write_csv(w)).map_err(fail(stage))?;
    run.stages.push(stage);

    let stage = Stage::Dissim;
    let d = gower_matrix(&table).map_err(fail(stage))?;
    run.write("dissim.csv", |w| d.write_csv(w)).map_err(fail(stage))?;
    run.stages.push(stage);

    let stage = Stage::Som;
    let som_cfg = cfg.som.apply(run.seed);
    let model = train(&d, &som_cfg).map_err(fail(stage))?;
    run.write("model.json", |w| {
        w.write_all(model.to_json().as_bytes())
            .map_err(|e| Error::io("model.json", e))
    })
    .map_err(fail(stage))?;
    run.stages.push(stage);

    let stage = Stage::Taxonomy;
    let taxonomy = superclusters(&model, &d, cfg.k).map_err(fail(stage))?;
    run.write("taxonomy.csv", |w| taxonomy.write_csv(w)).map_err(fail(stage))?;
    run.stages.push(stage);

    let stage = Stage::Seriate;
    let tree = agglomerate(&d, cfg.linkage).map_err(fail(stage))?;
    let order = optimal_leaf_order(&tree, &d).map_err(fail(stage))?;
    run.write("dendrogram.json", |w| {
        w.write_all(tree.to_json().as_bytes())
            .map_err(|e| Error::io("dendrogram.json", e))
    })
    .map_err(fail(stage))?;
    run.write("order.txt", |w| {
        order.write_txt(d.labels(), w).map_err(|e| Error::io("order.txt", e))
    })
    .map_err(fail(stage))?;
    run.write("heatmap.csv", |w| {
        write_heatmap_csv(&table, &order.order, cfg.percentize_heatmap, w)
    })
    .map_err(fail(stage))?;
    run.stages.push(stage);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_keep_defaults() {
        let cfg = SomOverrides::default().apply(9);
        assert_eq!(cfg, SomConfig::new(9));
        let o = SomOverrides {
            grid_w: Some(3),
            squared: Some(true),
            ..Default::default()
        };
        let cfg = o.apply(9);
        assert_eq!((cfg.grid_w, cfg.grid_h, cfg.squared), (3, 5, true));
    }

    #[test]
    fn config_json_defaults_and_unknown_keys() {
        let cfg: PipelineConfig = serde_json::from_str(r#"{"inputs":["a.jsonl"],"seed":3}"#).unwrap();
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.linkage, Linkage::Average);
        assert!(cfg.percentize_heatmap);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"sed":3}"#).is_err());
    }

    #[test]
    fn explicit_seed_wins() {
        let cfg = PipelineConfig {
            seed: Some(5),
            ..Default::default()
        };
        assert_eq!(cfg.resolve_seed().unwrap(), 5);
    }
}
