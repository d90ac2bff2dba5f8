//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage
//! error. Diagnostics go to standard error; data goes to files or standard
//! output.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{filter_complete, parse_corpus, partition_fermentation, write_jsonl, Corpus};
use crate::error::Error;
use crate::gower::{build_feature_table, gower_matrix, FeatureTable};
use crate::inference::{bootstrap_t_one_sample, brown_forsythe, mann_whitney, welch_t, BootstrapConfig, MwMode};
use crate::matrix::DissimilarityMatrix;
use crate::pipeline::{run_pipeline, verify_manifest, PipelineConfig, SEED_ENV};
use crate::report::{summarize, write_diversity_csv, write_grist_csv, write_heatmap_csv, write_hop_diversity_csv, write_hops_csv};
use crate::seriate::{agglomerate, optimal_leaf_order, Linkage};
use crate::som::{superclusters, train, SomConfig, SomModel};

#[derive(Debug, Parser)]
#[command(name = "maltmap", version, about = "Beer-recipe analytics and style taxonomy")]
pub struct Cli {
    /// Worker threads for parallel stages (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Keep complete recipes and report the rejected ones.
    Filter(FilterArgs),
    /// Print corpus counts and per-category statistics as JSON.
    Summary(InputArgs),
    /// Grist percentages and malt diversity.
    Grist(TableArgs),
    /// Hop usage, IBU contributions and RBR per category.
    Hops(TableArgs),
    /// Per-style feature table.
    Features(FeaturesArgs),
    /// Gower dissimilarity matrix of a feature table.
    Dissim(DissimArgs),
    /// Train a relational SOM.
    Som(SomArgs),
    /// Assign styles to SOM units and superclusters.
    Taxonomy(TaxonomyArgs),
    /// Hierarchical clustering and optimal leaf ordering.
    Seriate(SeriateArgs),
    /// Hypothesis test on a `group,value` CSV.
    Test(TestArgs),
    /// Run every stage and write a manifest.
    Pipeline(PipelineArgs),
    /// Re-hash the files listed in a manifest.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub rejects: PathBuf,
    /// Also write the cold-fermented subset.
    #[arg(long)]
    pub cold: Option<PathBuf>,
    /// Also write the hot-fermented subset.
    #[arg(long)]
    pub hot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Apply the completeness filter first.
    #[arg(long)]
    pub filter: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-style diversity table.
    #[arg(long)]
    pub diversity: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DissimArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SomArgs {
    #[arg(long)]
    pub dissim: PathBuf,
    /// Grid size as WxH.
    #[arg(long, default_value = "5x5", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Required unless MALTMAP_SEED is set.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long)]
    pub sigma_final: Option<f64>,
    /// Square the dissimilarities before training.
    #[arg(long)]
    pub squared: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TaxonomyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub dissim: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SeriateArgs {
    #[arg(long)]
    pub dissim: PathBuf,
    #[arg(long, default_value = "average", value_parser = parse_linkage)]
    pub linkage: Linkage,
    /// Leaf order file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub dendrogram: Option<PathBuf>,
    /// Write the feature table reordered by the leaf order.
    #[arg(long, requires = "features")]
    pub heatmap: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Percentize heatmap columns.
    #[arg(long)]
    pub percentize: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TestKind {
    Welch,
    MannWhitney,
    BrownForsythe,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MwModeArg {
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV with header `group,value`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: TestKind,
    /// Null value of the one-sample test.
    #[arg(long, default_value_t = 0.0)]
    pub mu0: f64,
    /// Bootstrap seed; required for the bootstrap unless MALTMAP_SEED is set.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.2)]
    pub trim: f64,
    #[arg(long, default_value_t = 5000)]
    pub resamples: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub mw_mode: MwModeArg,
    /// Write the JSON result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// JSON config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_parser = parse_linkage)]
    pub linkage: Option<Linkage>,
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long)]
    pub no_percentize: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid `{s}` is not WxH"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("grid width `{w}`"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("grid height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("grid sides must be positive".into());
    }
    Ok((w, h))
}

fn parse_linkage(s: &str) -> Result<Linkage, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] Error),
    #[error(transparent)]
    Pipeline(#[from] crate::pipeline::PipelineError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Pipeline(_) => 1,
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run_subcommand<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn seed_or_env(seed: Option<u64>) -> CliResult<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not a 64-bit integer"))),
        Err(_) => Err(CliError::Usage(format!("--seed is required (or set {SEED_ENV})"))),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> CliResult {
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> crate::Result<()>) -> CliResult {
    let mut w = create(path)?;
    body(&mut w)?;
    finish(w, path)
}

fn load(paths: &[PathBuf]) -> CliResult<Corpus> {
    let mut all = Corpus::default();
    for p in paths {
        let c = parse_corpus(p)?;
        for m in &c.malformed {
            log::warn!("{}:{}: {}", p.display(), m.line, m.message);
        }
        all.recipes.extend(c.recipes);
        all.malformed.extend(c.malformed);
    }
    Ok(all)
}

fn read_dissim(path: &Path) -> CliResult<DissimilarityMatrix> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(DissimilarityMatrix::read_csv(f)?)
}

fn read_features(path: &Path) -> CliResult<FeatureTable> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(FeatureTable::read_csv(f)?)
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Filter(a) => {
            let corpus = load(&a.input)?;
            let (kept, report) = filter_complete(&corpus);
            write_file(&a.out, |w| write_jsonl(&kept, w).map_err(|e| Error::io(&a.out, e)))?;
            write_file(&a.rejects, |w| report.write_csv(w))?;
            let (cold, hot) = partition_fermentation(&kept);
            for (path, part) in [(&a.cold, &cold), (&a.hot, &hot)] {
                if let Some(p) = path {
                    write_file(p, |w| write_jsonl(part, w).map_err(|e| Error::io(p, e)))?;
                }
            }
            eprintln!(
                "kept {} of {} records; discard rate {:.2}%",
                report.kept,
                report.total_seen,
                100.0 * report.discard_rate()
            );
        }
        Command::Summary(a) => {
            let mut corpus = load(&a.input)?;
            if a.filter {
                corpus = filter_complete(&corpus).0;
            }
            let s = summarize(&corpus)?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            serde_json::to_writer_pretty(&mut out, &s).map_err(Error::from)?;
            writeln!(out).map_err(|e| Error::io("<stdout>", e))?;
        }
        Command::Grist(a) => {
            let corpus = load(&a.input)?;
            write_file(&a.out, |w| write_grist_csv(&corpus, w))?;
            if let Some(p) = &a.diversity {
                write_file(p, |w| write_diversity_csv(&corpus, w))?;
            }
        }
        Command::Hops(a) => {
            let corpus = load(&a.input)?;
            write_file(&a.out, |w| write_hops_csv(&corpus, w))?;
            if let Some(p) = &a.diversity {
                write_file(p, |w| write_hop_diversity_csv(&corpus, w))?;
            }
        }
        Command::Features(a) => {
            let corpus = load(&a.input)?;
            let table = build_feature_table(&corpus)?;
            write_file(&a.out, |w| table.write_csv(w))?;
        }
        Command::Dissim(a) => {
            let table = read_features(&a.features)?;
            let d = gower_matrix(&table)?;
            write_file(&a.out, |w| d.write_csv(w))?;
        }
        Command::Som(a) => {
            let seed = seed_or_env(a.seed)?;
            let d = read_dissim(&a.dissim)?;
            let mut cfg = SomConfig::new(seed);
            (cfg.grid_w, cfg.grid_h) = a.grid;
            cfg.iterations = a.iterations;
            if let Some(v) = a.mu0 {
                cfg.mu0 = v;
            }
            cfg.sigma0 = a.sigma0;
            if let Some(v) = a.sigma_final {
                cfg.sigma_final = v;
            }
            cfg.squared = a.squared;
            let model = train(&d, &cfg)?;
            fs::write(&a.out, model.to_json()).map_err(|e| Error::io(&a.out, e))?;
        }
        Command::Taxonomy(a) => {
            let text = fs::read_to_string(&a.model).map_err(|e| Error::io(&a.model, e))?;
            let model = SomModel::from_json(&text)?;
            let d = read_dissim(&a.dissim)?;
            let t = superclusters(&model, &d, a.k)?;
            write_file(&a.out, |w| t.write_csv(w))?;
        }
        Command::Seriate(a) => {
            let d = read_dissim(&a.dissim)?;
            let tree = agglomerate(&d, a.linkage)?;
            let order = optimal_leaf_order(&tree, &d)?;
            write_file(&a.out, |w| order.write_txt(d.labels(), w).map_err(|e| Error::io(&a.out, e)))?;
            if let Some(p) = &a.dendrogram {
                fs::write(p, tree.to_json()).map_err(|e| Error::io(p, e))?;
            }
            if let (Some(p), Some(f)) = (&a.heatmap, &a.features) {
                let table = read_features(f)?;
                if table.row_labels() != d.labels() {
                    return Err(Error::LabelMismatch.into());
                }
                write_file(p, |w| write_heatmap_csv(&table, &order.order, a.percentize, w))?;
            }
        }
        Command::Test(a) => run_test(a)?,
        Command::Pipeline(a) => {
            let mut cfg = match &a.config {
                Some(p) => PipelineConfig::from_json_file(p)?,
                None => PipelineConfig::default(),
            };
            if !a.input.is_empty() {
                cfg.inputs = a.input.clone();
            }
            if let Some(v) = &a.out_dir {
                cfg.out_dir = v.clone();
            }
            if let Some(v) = a.seed {
                cfg.seed = Some(v);
            }
            if let Some(v) = a.k {
                cfg.k = v;
            }
            if let Some(v) = a.linkage {
                cfg.linkage = v;
            }
            if let Some((w, h)) = a.grid {
                cfg.som.grid_w = Some(w);
                cfg.som.grid_h = Some(h);
            }
            if a.no_percentize {
                cfg.percentize_heatmap = false;
            }
            cfg.threads = cli.threads;
            if cfg.inputs.is_empty() {
                return Err(CliError::Usage("--input (or `inputs` in the config) is required".into()));
            }
            cfg.seed = Some(seed_or_env(cfg.seed)?);
            let manifest = run_pipeline(&cfg)?;
            eprintln!(
                "pipeline complete: {} outputs in {}",
                manifest.outputs.len(),
                cfg.out_dir.display()
            );
        }
        Command::Verify(a) => {
            let checks = verify_manifest(&a.manifest)?;
            let bad: Vec<_> = checks.iter().filter(|c| !c.ok()).collect();
            for c in &bad {
                eprintln!("hash mismatch: {}", c.path);
            }
            if !bad.is_empty() {
                return Err(Error::Format(format!("{} of {} files changed", bad.len(), checks.len())).into());
            }
            eprintln!("{} files verified", checks.len());
        }
    }
    Ok(())
}

/// Groups of a `group,value` CSV in order of first appearance.
pub fn read_groups(path: &Path) -> crate::Result<Vec<(String, Vec<f64>)>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(f);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "group" || &headers[1] != "value" {
        return Err(Error::Format("test data header must be `group,value`".into()));
    }
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let value: f64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("value `{}`", &rec[1])))?;
        match groups.iter_mut().find(|(g, _)| g == &rec[0]) {
            Some((_, v)) => v.push(value),
            None => groups.push((rec[0].to_string(), vec![value])),
        }
    }
    Ok(groups)
}

fn run_test(a: &TestArgs) -> CliResult {
    let seed = match a.method {
        TestKind::Bootstrap => Some(seed_or_env(a.seed)?),
        _ => None,
    };
    let groups = read_groups(&a.data)?;
    let need = |k: usize| -> CliResult {
        if groups.len() == k {
            Ok(())
        } else {
            Err(Error::Insufficient(format!("{} groups in the data, the test needs {k}", groups.len())).into())
        }
    };
    let result = match a.method {
        TestKind::Welch => {
            need(2)?;
            welch_t(&groups[0].1, &groups[1].1)?
        }
        TestKind::MannWhitney => {
            need(2)?;
            let mode = match a.mw_mode {
                MwModeArg::Auto => MwMode::Auto,
                MwModeArg::Exact => MwMode::Exact,
                MwModeArg::Normal => MwMode::NormalApprox,
            };
            mann_whitney(&groups[0].1, &groups[1].1, mode)?
        }
        TestKind::BrownForsythe => {
            let samples: Vec<Vec<f64>> = groups.iter().map(|(_, v)| v.clone()).collect();
            brown_forsythe(&samples)?
        }
        TestKind::Bootstrap => {
            need(1)?;
            let cfg = BootstrapConfig {
                trim: a.trim,
                resamples: a.resamples,
                seed: seed.expect("seed resolved above"),
                ci_level: 0.95,
            };
            bootstrap_t_one_sample(&groups[0].1, a.mu0, &cfg)?
        }
    };
    let json = result.to_json() + "\n";
    match &a.out {
        Some(p) => fs::write(p, json).map_err(|e| Error::io(p, e))?,
        None => io::stdout()
            .write_all(json.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    Ok(())
}
