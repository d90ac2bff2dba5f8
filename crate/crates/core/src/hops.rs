//! Hopping-method analytics: nested IBU averages, relative bitterness ratio,
//! attenuation and per-style hop diversity.

use std::collections::{BTreeMap, HashSet};

use crate::corpus::{Corpus, HopMethod, Recipe};
use crate::error::{Error, Result};

/// Reference attenuation at which the RBR correction factor is exactly one.
pub const RBR_REFERENCE_ADF: f64 = 0.7655;

pub const ADF_MAX: f64 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub struct IbuBreakdown {
    pub per_recipe_method_mean: BTreeMap<String, f64>,
    pub per_category_mean: BTreeMap<String, f64>,
    pub method_usage_share: BTreeMap<(String, HopMethod), f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbrResult {
    pub category: String,
    pub rbr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopDiversity {
    pub style: String,
    pub avg_distinct_hops: BTreeMap<HopMethod, f64>,
}

/// Apparent attenuation `(og - fg) / (og - 1)` together with a flag that is
/// `false` when the raw value fell outside `[0, 1.2]` and was clamped.
pub fn adf_flagged(og: f64, fg: f64) -> Result<(f64, bool)> {
    if !og.is_finite() || !fg.is_finite() {
        return Err(Error::NonFinite("gravity"));
    }
    if og <= 1.0 {
        return Err(Error::GravityOutOfRange(og));
    }
    let raw = (og - fg) / (og - 1.0);
    let clamped = raw.clamp(0.0, ADF_MAX);
    Ok((clamped, clamped == raw))
}

pub fn adf(og: f64, fg: f64) -> Result<f64> {
    let (value, in_band) = adf_flagged(og, fg)?;
    if !in_band {
        log::warn!("ADF for og={og} fg={fg} clamped to {value}");
    }
    Ok(value)
}

/// Relative bitterness ratio: `(ibu / sg) * (1 + (adf - 0.7655))`.
pub fn rbr(ibu: f64, sg: f64, adf: f64) -> Result<f64> {
    if !(sg > 0.0) {
        return Err(Error::Config(format!("specific gravity {sg} must be positive")));
    }
    let value = (ibu / sg) * (1.0 + (adf - RBR_REFERENCE_ADF));
    if !value.is_finite() {
        return Err(Error::NonFinite("rbr"));
    }
    Ok(value)
}

/// IBU summed per hopping method, in method order. Entries without a method
/// are ignored.
pub fn method_ibu_sums(recipe: &Recipe) -> BTreeMap<HopMethod, f64> {
    let mut sums = BTreeMap::new();
    for (_, method, ibu) in recipe.hops() {
        if let Some(m) = method {
            *sums.entry(m).or_insert(0.0) += ibu;
        }
    }
    sums
}

/// Mean over the recipe's distinct hopping methods of the per-method IBU sum.
pub fn recipe_method_mean_ibu(recipe: &Recipe) -> Result<f64> {
    let sums = method_ibu_sums(recipe);
    if sums.is_empty() {
        return Err(Error::NoHops(recipe.id.clone()));
    }
    Ok(sums.values().sum::<f64>() / sums.len() as f64)
}

fn category_recipes<'a>(corpus: &'a Corpus, category: &str) -> Result<Vec<&'a Recipe>> {
    let recipes: Vec<_> = corpus.recipes.iter().filter(|r| r.category == category).collect();
    if recipes.is_empty() {
        return Err(Error::UnknownCategory(category.to_string()));
    }
    Ok(recipes)
}

/// Category mean of the per-recipe method means. Recipes without hops do not
/// enter the denominator.
pub fn category_mean_ibu(corpus: &Corpus, category: &str) -> Result<f64> {
    let means: Vec<f64> = category_recipes(corpus, category)?
        .into_iter()
        .filter_map(|r| recipe_method_mean_ibu(r).ok())
        .collect();
    if means.is_empty() {
        return Err(Error::Insufficient(format!("category `{category}` has no hopped recipe")));
    }
    Ok(means.iter().sum::<f64>() / means.len() as f64)
}

/// Fraction of the category's recipes using each method at least once.
pub fn method_usage(corpus: &Corpus, category: &str) -> Result<BTreeMap<HopMethod, f64>> {
    let recipes = category_recipes(corpus, category)?;
    let n = recipes.len() as f64;
    Ok(HopMethod::ALL
        .iter()
        .map(|&m| {
            let users = recipes
                .iter()
                .filter(|r| r.hops().any(|(_, method, _)| method == Some(m)))
                .count();
            (m, users as f64 / n)
        })
        .collect())
}

/// Mean IBU contributed by each method over the recipes that use it; methods
/// nobody uses map to 0.
pub fn method_mean_contribution(corpus: &Corpus, category: &str) -> Result<BTreeMap<HopMethod, f64>> {
    let recipes = category_recipes(corpus, category)?;
    let mut acc: BTreeMap<HopMethod, (f64, usize)> =
        HopMethod::ALL.iter().map(|&m| (m, (0.0, 0))).collect();
    for r in recipes {
        for (m, sum) in method_ibu_sums(r) {
            let slot = acc.get_mut(&m).unwrap();
            slot.0 += sum;
            slot.1 += 1;
        }
    }
    Ok(acc
        .into_iter()
        .map(|(m, (s, c))| (m, if c == 0 { 0.0 } else { s / c as f64 }))
        .collect())
}

pub fn recipe_rbr(recipe: &Recipe) -> Result<f64> {
    let v = recipe
        .vitals
        .ok_or_else(|| Error::Insufficient(format!("recipe `{}` has no vitals", recipe.id)))?;
    rbr(v.ibu, v.og, adf(v.og, v.fg)?)
}

/// Mean per-recipe RBR of a category (recipes lacking vitals are skipped).
pub fn category_rbr(corpus: &Corpus, category: &str) -> Result<RbrResult> {
    let values: Vec<f64> = category_recipes(corpus, category)?
        .into_iter()
        .filter_map(|r| recipe_rbr(r).ok())
        .collect();
    if values.is_empty() {
        return Err(Error::Insufficient(format!("category `{category}` has no vitals")));
    }
    Ok(RbrResult {
        category: category.to_string(),
        rbr: values.iter().sum::<f64>() / values.len() as f64,
    })
}

pub fn ibu_breakdown(corpus: &Corpus) -> IbuBreakdown {
    let per_recipe_method_mean = corpus
        .recipes
        .iter()
        .filter_map(|r| Some((r.id.clone(), recipe_method_mean_ibu(r).ok()?)))
        .collect();
    let mut per_category_mean = BTreeMap::new();
    let mut method_usage_share = BTreeMap::new();
    for c in corpus.categories() {
        if let Ok(mean) = category_mean_ibu(corpus, c) {
            per_category_mean.insert(c.to_string(), mean);
        }
        if let Ok(usage) = method_usage(corpus, c) {
            for (m, share) in usage {
                method_usage_share.insert((c.to_string(), m), share);
            }
        }
    }
    IbuBreakdown {
        per_recipe_method_mean,
        per_category_mean,
        method_usage_share,
    }
}

/// Average number of distinct hop names per method over every recipe of the
/// style, including recipes that never use the method.
pub fn hop_diversity(corpus: &Corpus, style: &str) -> Result<HopDiversity> {
    let recipes: Vec<_> = corpus.style(style).collect();
    if recipes.is_empty() {
        return Err(Error::UnknownStyle(style.to_string()));
    }
    let n = recipes.len() as f64;
    let avg_distinct_hops = HopMethod::ALL
        .iter()
        .map(|&m| {
            let total: usize = recipes
                .iter()
                .map(|r| {
                    r.hops()
                        .filter(|(_, method, _)| *method == Some(m))
                        .map(|(e, _, _)| e.subtype_key())
                        .collect::<HashSet<_>>()
                        .len()
                })
                .sum();
            (m, total as f64 / n)
        })
        .collect();
    Ok(HopDiversity {
        style: style.to_string(),
        avg_distinct_hops,
    })
}
