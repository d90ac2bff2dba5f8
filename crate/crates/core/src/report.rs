//! Tabular exports of the corpus statistics.

use std::io::Write;

use serde::Serialize;

use crate::corpus::{Corpus, Fermentation, HopMethod, MaltType};
use crate::error::{Error, Result};
use crate::export::{csv_writer, fmt_real};
use crate::gower::FeatureTable;
use crate::grist::{avg_types_per_recipe, grist_percentage, style_avg_subtypes};
use crate::hops::{category_mean_ibu, category_rbr, hop_diversity, method_mean_contribution, method_usage};
use crate::inference::{
    bootstrap_t_one_sample, brown_forsythe, mann_whitney, welch_t, BootstrapConfig, MwMode, TestResult,
};

fn sorted_categories(corpus: &Corpus) -> Vec<String> {
    let mut c: Vec<String> = corpus.categories().into_iter().map(str::to_string).collect();
    c.sort();
    c
}

fn sorted_styles(corpus: &Corpus) -> Vec<String> {
    let mut s: Vec<String> = corpus.styles().into_iter().map(str::to_string).collect();
    s.sort();
    s
}

fn flush<W: Write>(mut w: csv::Writer<W>, what: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(what, e))
}

/// `category,malt_type,grist_percent,avg_types_per_recipe`; grist cells are
/// empty for a category without grain mass.
pub fn write_grist_csv<W: Write>(corpus: &Corpus, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["category", "malt_type", "grist_percent", "avg_types_per_recipe"])?;
    for c in sorted_categories(corpus) {
        let avg = fmt_real(avg_types_per_recipe(corpus, &c)?);
        let grist = match grist_percentage(corpus, &c) {
            Ok(g) => Some(g),
            Err(Error::ZeroGrainMass(_)) => None,
            Err(e) => return Err(e),
        };
        for m in MaltType::ALL {
            let pct = grist.as_ref().map(|g| fmt_real(g[&m])).unwrap_or_default();
            w.write_record([c.as_str(), m.as_str(), &pct, &avg])?;
        }
    }
    flush(w, "<grist csv>")
}

/// `style,malt_type,avg_subtypes`.
pub fn write_diversity_csv<W: Write>(corpus: &Corpus, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["style", "malt_type", "avg_subtypes"])?;
    for s in sorted_styles(corpus) {
        let d = style_avg_subtypes(corpus, &s)?;
        for m in MaltType::ALL {
            w.write_record([s.as_str(), m.as_str(), &fmt_real(d.avg_subtypes[&m])])?;
        }
    }
    flush(w, "<diversity csv>")
}

/// `category,hop_method,usage_fraction,mean_ibu_contribution,rbr`; the rbr
/// cell is empty when no recipe of the category has usable vitals.
pub fn write_hops_csv<W: Write>(corpus: &Corpus, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["category", "hop_method", "usage_fraction", "mean_ibu_contribution", "rbr"])?;
    for c in sorted_categories(corpus) {
        let usage = method_usage(corpus, &c)?;
        let contribution = method_mean_contribution(corpus, &c)?;
        let rbr = category_rbr(corpus, &c).map(|r| fmt_real(r.rbr)).unwrap_or_default();
        for m in HopMethod::ALL {
            w.write_record([
                c.as_str(),
                m.as_str(),
                &fmt_real(usage[&m]),
                &fmt_real(contribution[&m]),
                &rbr,
            ])?;
        }
    }
    flush(w, "<hops csv>")
}

/// `style,hop_method,avg_distinct_hops`.
pub fn write_hop_diversity_csv<W: Write>(corpus: &Corpus, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["style", "hop_method", "avg_distinct_hops"])?;
    for s in sorted_styles(corpus) {
        let d = hop_diversity(corpus, &s)?;
        for m in HopMethod::ALL {
            w.write_record([s.as_str(), m.as_str(), &fmt_real(d.avg_distinct_hops[&m])])?;
        }
    }
    flush(w, "<hop diversity csv>")
}

/// Feature table with rows in `order`, optionally percentized column-wise.
pub fn write_heatmap_csv<W: Write>(table: &FeatureTable, order: &[usize], percentize: bool, out: W) -> Result<()> {
    let ordered = table.reorder_rows(order);
    if percentize {
        ordered.percentized()?.write_csv(out)
    } else {
        ordered.write_csv(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CategorySummary {
    pub category: String,
    pub recipes: usize,
    pub styles: usize,
    pub avg_types_per_recipe: f64,
    pub mean_ibu: Option<f64>,
    pub rbr: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub recipes: usize,
    pub cold: usize,
    pub hot: usize,
    pub styles: usize,
    pub categories: Vec<CategorySummary>,
}

pub fn summarize(corpus: &Corpus) -> Result<CorpusSummary> {
    if corpus.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let cold = corpus
        .recipes
        .iter()
        .filter(|r| r.fermentation == Fermentation::Cold)
        .count();
    let mut categories = Vec::new();
    for c in sorted_categories(corpus) {
        let members: Vec<_> = corpus.recipes.iter().filter(|r| r.category == c).collect();
        let mut styles: Vec<&str> = members.iter().map(|r| r.style.as_str()).collect();
        styles.sort_unstable();
        styles.dedup();
        categories.push(CategorySummary {
            recipes: members.len(),
            styles: styles.len(),
            avg_types_per_recipe: avg_types_per_recipe(corpus, &c)?,
            mean_ibu: category_mean_ibu(corpus, &c).ok(),
            rbr: category_rbr(corpus, &c).ok().map(|r| r.rbr),
            category: c,
        });
    }
    Ok(CorpusSummary {
        recipes: corpus.len(),
        cold,
        hot: corpus.len() - cold,
        styles: corpus.styles().len(),
        categories,
    })
}

/// Which hypothesis tests the pipeline runs on the filtered corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestSelection {
    pub welch: bool,
    pub mann_whitney: bool,
    pub brown_forsythe: bool,
    pub bootstrap: bool,
}

impl Default for TestSelection {
    fn default() -> Self {
        TestSelection {
            welch: true,
            mann_whitney: true,
            brown_forsythe: true,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelledTest {
    pub variable: String,
    pub comparison: String,
    #[serde(flatten)]
    pub result: TestResult,
}

/// Cold versus hot comparisons of every vital statistic, and a bootstrap-t
/// test of the recipes' ADF against the RBR reference attenuation. Tests that
/// cannot run on the data (for example an empty fermentation class) are
/// skipped with a warning.
pub fn fermentation_tests(corpus: &Corpus, selection: TestSelection, seed: u64) -> Vec<LabelledTest> {
    let vitals: Vec<_> = corpus
        .recipes
        .iter()
        .filter_map(|r| Some((r.fermentation, r.vitals?)))
        .collect();
    let column = |class: Fermentation, pick: fn(&crate::corpus::VitalStats) -> f64| -> Vec<f64> {
        vitals.iter().filter(|(f, _)| *f == class).map(|(_, v)| pick(v)).collect()
    };
    let fields: [(&str, fn(&crate::corpus::VitalStats) -> f64); 5] = [
        ("og", |v| v.og),
        ("fg", |v| v.fg),
        ("abv", |v| v.abv),
        ("srm", |v| v.srm),
        ("ibu", |v| v.ibu),
    ];
    let mut out = Vec::new();
    let mut push = |variable: &str, comparison: &str, r: Result<TestResult>| match r {
        Ok(result) => out.push(LabelledTest {
            variable: variable.to_string(),
            comparison: comparison.to_string(),
            result,
        }),
        Err(e) => log::warn!("skipping {comparison} test on {variable}: {e}"),
    };
    for (name, pick) in fields {
        let cold = column(Fermentation::Cold, pick);
        let hot = column(Fermentation::Hot, pick);
        if selection.welch {
            push(name, "cold_vs_hot", welch_t(&cold, &hot));
        }
        if selection.mann_whitney {
            push(name, "cold_vs_hot", mann_whitney(&cold, &hot, MwMode::Auto));
        }
        if selection.brown_forsythe {
            push(name, "cold_vs_hot", brown_forsythe(&[cold, hot]));
        }
    }
    if selection.bootstrap {
        let adf: Vec<f64> = vitals.iter().filter_map(|(_, v)| v.adf().ok()).collect();
        push(
            "adf",
            "reference_0.7655",
            bootstrap_t_one_sample(&adf, crate::hops::RBR_REFERENCE_ADF, &BootstrapConfig::new(seed)),
        );
    }
    out
}

pub fn write_tests_jsonl<W: Write>(tests: &[LabelledTest], mut out: W) -> Result<()> {
    for t in tests {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n").map_err(|e| Error::io("<tests jsonl>", e))?;
    }
    Ok(())
}
