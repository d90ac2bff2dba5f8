//! Malt usage: subtype counts, per-category and per-style averages, grist
//! mass shares, percentize normalization and the cumulative-usage trend.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::corpus::{Corpus, MaltType, Recipe};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMaltStats {
    pub category: String,
    /// Distinct malt types per recipe, in corpus order.
    pub per_recipe_type_counts: Vec<(String, usize)>,
    pub distinct_types_in_category: usize,
    pub avg_types_per_recipe: f64,
    /// Empty when the category has no grain mass.
    pub grist_percent: BTreeMap<MaltType, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StyleMaltDiversity {
    pub style: String,
    pub avg_subtypes: BTreeMap<MaltType, f64>,
}

/// Distinct grain subtypes (normalized names) of one malt type in a recipe.
pub fn distinct_subtypes(recipe: &Recipe, malt_type: MaltType) -> usize {
    recipe
        .grains()
        .filter(|(_, m, _)| *m == malt_type)
        .map(|(e, _, _)| e.subtype_key())
        .collect::<HashSet<_>>()
        .len()
}

/// Distinct malt types used by one recipe.
pub fn recipe_malt_types(recipe: &Recipe) -> BTreeSet<MaltType> {
    recipe.grains().map(|(_, m, _)| m).collect()
}

fn category_recipes<'a>(corpus: &'a Corpus, category: &str) -> Result<Vec<&'a Recipe>> {
    let recipes: Vec<_> = corpus.recipes.iter().filter(|r| r.category == category).collect();
    if recipes.is_empty() {
        return Err(Error::UnknownCategory(category.to_string()));
    }
    Ok(recipes)
}

fn style_recipes<'a>(corpus: &'a Corpus, style: &str) -> Result<Vec<&'a Recipe>> {
    let recipes: Vec<_> = corpus.recipes.iter().filter(|r| r.style == style).collect();
    if recipes.is_empty() {
        return Err(Error::UnknownStyle(style.to_string()));
    }
    Ok(recipes)
}

/// Size of the union of malt types over all recipes of a category.
pub fn category_distinct_types(corpus: &Corpus, category: &str) -> Result<usize> {
    let union: BTreeSet<MaltType> = category_recipes(corpus, category)?
        .into_iter()
        .flat_map(recipe_malt_types)
        .collect();
    Ok(union.len())
}

/// Mean number of distinct malt types per recipe of a category.
pub fn avg_types_per_recipe(corpus: &Corpus, category: &str) -> Result<f64> {
    let recipes = category_recipes(corpus, category)?;
    let total: usize = recipes.iter().map(|r| recipe_malt_types(r).len()).sum();
    Ok(total as f64 / recipes.len() as f64)
}

/// The literal union-size-over-recipe-count ratio, kept as a diagnostic next
/// to [`avg_types_per_recipe`].
pub fn union_types_over_recipes(corpus: &Corpus, category: &str) -> Result<f64> {
    let n = category_recipes(corpus, category)?.len();
    Ok(category_distinct_types(corpus, category)? as f64 / n as f64)
}

pub fn style_avg_subtypes(corpus: &Corpus, style: &str) -> Result<StyleMaltDiversity> {
    let recipes = style_recipes(corpus, style)?;
    let n = recipes.len() as f64;
    let avg_subtypes = MaltType::ALL
        .iter()
        .map(|&m| {
            let sum: usize = recipes.iter().map(|r| distinct_subtypes(r, m)).sum();
            (m, sum as f64 / n)
        })
        .collect();
    Ok(StyleMaltDiversity {
        style: style.to_string(),
        avg_subtypes,
    })
}

/// Mass share (percent) of every malt type in a category. Types that are
/// absent get 0.
pub fn grist_percentage(corpus: &Corpus, category: &str) -> Result<BTreeMap<MaltType, f64>> {
    let mut mass: BTreeMap<MaltType, f64> = MaltType::ALL.iter().map(|&m| (m, 0.0)).collect();
    for r in category_recipes(corpus, category)? {
        for (_, m, g) in r.grains() {
            *mass.get_mut(&m).unwrap() += g;
        }
    }
    let total: f64 = mass.values().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroGrainMass(category.to_string()));
    }
    Ok(mass.into_iter().map(|(m, g)| (m, 100.0 * g / total)).collect())
}

pub fn category_malt_stats(corpus: &Corpus, category: &str) -> Result<CategoryMaltStats> {
    let recipes = category_recipes(corpus, category)?;
    let per_recipe_type_counts = recipes
        .iter()
        .map(|r| (r.id.clone(), recipe_malt_types(r).len()))
        .collect();
    let grist_percent = match grist_percentage(corpus, category) {
        Ok(p) => p,
        Err(Error::ZeroGrainMass(_)) => BTreeMap::new(),
        Err(e) => return Err(e),
    };
    Ok(CategoryMaltStats {
        category: category.to_string(),
        per_recipe_type_counts,
        distinct_types_in_category: category_distinct_types(corpus, category)?,
        avg_types_per_recipe: avg_types_per_recipe(corpus, category)?,
        grist_percent,
    })
}

/// Empirical CDF of each value within its column: `#{x_j <= v} / n`.
pub fn percentize(column: &[f64]) -> Result<Vec<f64>> {
    if column.is_empty() {
        return Err(Error::Empty("percentize column"));
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("percentize input"));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = column.len() as f64;
    Ok(column
        .iter()
        .map(|v| sorted.partition_point(|x| x <= v) as f64 / n)
        .collect())
}

/// Shortest prefix of labels, ranked by share (descending, ties by label),
/// whose cumulative share reaches `cutoff` percent. If the shares never reach
/// the cutoff every label is returned.
pub fn cumulative_usage<L>(shares: &BTreeMap<L, f64>, cutoff: f64) -> Result<Vec<L>>
where
    L: Ord + Clone,
{
    if shares.is_empty() {
        return Err(Error::Empty("cumulative usage shares"));
    }
    if !(cutoff > 0.0 && cutoff <= 100.0) {
        return Err(Error::Config(format!("cutoff {cutoff} outside (0, 100]")));
    }
    let total: f64 = shares.values().sum();
    if !total.is_finite() || total > 100.0 + 1e-9 {
        return Err(Error::Config(format!("shares sum to {total} > 100")));
    }
    let mut ranked: Vec<(&L, f64)> = shares.iter().map(|(l, s)| (l, *s)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = Vec::new();
    let mut acc = 0.0;
    for (label, share) in ranked {
        out.push(label.clone());
        acc += share;
        if acc >= cutoff {
            break;
        }
    }
    Ok(out)
}
