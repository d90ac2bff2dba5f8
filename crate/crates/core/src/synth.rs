//! Seeded synthetic recipes and planted dissimilarity fixtures.

use crate::corpus::{
    Corpus, Fermentation, IngredientEntry, IngredientKind, HopMethod, MaltType, Recipe, VitalStats,
};
use crate::matrix::DissimilarityMatrix;
use crate::rng::SeededRng;

/// Seed of the bundled 200-recipe corpus in `data/recipes.jsonl`.
pub const BUNDLED_SEED: u64 = 20_250_301;
pub const BUNDLED_RECIPES_PER_STYLE: usize = 10;

struct Family {
    category: &'static str,
    styles: [(&'static str, Fermentation); 5],
    malts: &'static [(&'static str, MaltType, f64)],
    hops: &'static [(&'static str, HopMethod, f64)],
    og: (f64, f64),
    attenuation: (f64, f64),
    srm: (f64, f64),
}

use Fermentation::{Cold, Hot};

const FAMILIES: [Family; 4] = [
    Family {
        category: "Lager",
        styles: [
            ("Pilsner", Cold),
            ("Helles", Cold),
            ("Vienna Lager", Cold),
            ("Dortmunder", Cold),
            ("American Lager", Cold),
        ],
        malts: &[("Pilsner", MaltType::Base, 4200.0), ("Carapils", MaltType::Crystal, 250.0)],
        hops: &[("Saaz", HopMethod::Boil, 22.0), ("Hallertau", HopMethod::Aroma, 6.0)],
        og: (1.044, 1.052),
        attenuation: (0.78, 0.84),
        srm: (2.5, 6.0),
    },
    Family {
        category: "Pale Ale",
        styles: [
            ("American IPA", Hot),
            ("Pale Ale", Hot),
            ("Double IPA", Hot),
            ("Session IPA", Hot),
            ("ESB", Hot),
        ],
        malts: &[
            ("Pale Ale", MaltType::Base, 5200.0),
            ("Crystal 40", MaltType::Crystal, 400.0),
            ("Munich", MaltType::Specialty, 300.0),
        ],
        hops: &[
            ("Columbus", HopMethod::Boil, 40.0),
            ("Citra", HopMethod::Whirlpool, 18.0),
            ("Mosaic", HopMethod::DryHop, 4.0),
        ],
        og: (1.056, 1.075),
        attenuation: (0.74, 0.80),
        srm: (5.0, 11.0),
    },
    Family {
        category: "Stout & Porter",
        styles: [
            ("Stout", Hot),
            ("Porter", Hot),
            ("Brown Ale", Hot),
            ("Imperial Stout", Hot),
            ("Schwarzbier", Cold),
        ],
        malts: &[
            ("Maris Otter", MaltType::Base, 4800.0),
            ("Roasted Barley", MaltType::Roasted, 450.0),
            ("Chocolate", MaltType::Roasted, 300.0),
            ("Crystal 120", MaltType::Crystal, 350.0),
        ],
        hops: &[("East Kent Goldings", HopMethod::Boil, 35.0), ("Fuggle", HopMethod::FirstWort, 8.0)],
        og: (1.052, 1.085),
        attenuation: (0.68, 0.75),
        srm: (25.0, 45.0),
    },
    Family {
        category: "Specialty",
        styles: [
            ("Hefeweizen", Hot),
            ("Witbier", Hot),
            ("Berliner Weisse", Hot),
            ("Gose", Hot),
            ("Rauchbier", Cold),
        ],
        malts: &[
            ("Wheat", MaltType::Base, 2600.0),
            ("Pilsner", MaltType::Base, 1800.0),
            ("Acidulated", MaltType::Acidulated, 200.0),
            ("Beech Smoked", MaltType::Smoked, 600.0),
        ],
        hops: &[("Tettnang", HopMethod::Mash, 4.0), ("Hallertau", HopMethod::HopStand, 6.0)],
        og: (1.034, 1.050),
        attenuation: (0.80, 0.88),
        srm: (2.5, 8.0),
    },
];

fn between(rng: &mut SeededRng, range: (f64, f64)) -> f64 {
    range.0 + rng.uniform() * (range.1 - range.0)
}

fn round_to(v: f64, digits: i32) -> f64 {
    let f = 10f64.powi(digits);
    (v * f).round() / f
}

/// Style-level centre of the recipe distribution.
struct StyleCentre {
    og: f64,
    attenuation: f64,
    srm: f64,
    malt_scale: Vec<f64>,
    hop_scale: Vec<f64>,
}

fn style_centre(family: &Family, rng: &mut SeededRng) -> StyleCentre {
    StyleCentre {
        og: between(rng, family.og),
        attenuation: between(rng, family.attenuation),
        srm: between(rng, family.srm),
        malt_scale: family.malts.iter().map(|_| 0.7 + 0.6 * rng.uniform()).collect(),
        hop_scale: family.hops.iter().map(|_| 0.7 + 0.6 * rng.uniform()).collect(),
    }
}

fn make_recipe(id: String, family: &Family, style: (&str, Fermentation), c: &StyleCentre, rng: &mut SeededRng) -> Recipe {
    let mut ingredients = Vec::new();
    for (m, scale) in family.malts.iter().zip(&c.malt_scale) {
        // Minor malts are occasionally left out.
        if m.1 != MaltType::Base && rng.uniform() < 0.15 {
            continue;
        }
        let mass = m.2 * scale * (1.0 + 0.1 * rng.normal()).max(0.3);
        ingredients.push(IngredientEntry::grain(m.0, m.1, round_to(mass, 0)));
    }
    let mut total_ibu = 0.0;
    for (h, scale) in family.hops.iter().zip(&c.hop_scale) {
        let ibu = round_to(h.2 * scale * (1.0 + 0.15 * rng.normal()).max(0.2), 1);
        total_ibu += ibu;
        ingredients.push(IngredientEntry::hop(h.0, h.1, ibu));
    }
    if rng.uniform() < 0.2 {
        ingredients.push(IngredientEntry::other("Irish Moss", IngredientKind::Adjunct));
    }
    let og = round_to(c.og + 0.002 * rng.normal(), 3).clamp(1.020, 1.150);
    let att = (c.attenuation + 0.015 * rng.normal()).clamp(0.55, 0.95);
    let fg = round_to(1.0 + (og - 1.0) * (1.0 - att), 3).max(0.990);
    let abv = round_to((og - fg) * 131.25, 2);
    let srm = round_to((c.srm * (1.0 + 0.1 * rng.normal())).max(1.0), 1);
    Recipe {
        id,
        style: style.0.to_string(),
        category: family.category.to_string(),
        fermentation: style.1,
        ingredients,
        vitals: Some(VitalStats {
            og,
            fg,
            abv,
            srm,
            ibu: round_to(total_ibu, 1),
        }),
    }
}

/// Complete recipes over 20 styles in four families, `per_style` recipes
/// each, interleaved style by style.
pub fn generate_corpus(per_style: usize, seed: u64) -> Corpus {
    let mut rng = SeededRng::new(seed);
    let mut styles = Vec::new();
    for family in &FAMILIES {
        for &style in &family.styles {
            styles.push((family, style, style_centre(family, &mut rng)));
        }
    }
    let mut recipes = Vec::with_capacity(per_style * styles.len());
    for round in 0..per_style {
        for (s, (family, style, centre)) in styles.iter().enumerate() {
            let id = format!("r{:05}", round * styles.len() + s + 1);
            recipes.push(make_recipe(id, family, *style, centre, &mut rng));
        }
    }
    Corpus::from_recipes(recipes)
}

/// The 200-recipe corpus shipped as `data/recipes.jsonl`.
pub fn bundled_corpus() -> Corpus {
    generate_corpus(BUNDLED_RECIPES_PER_STYLE, BUNDLED_SEED)
}

/// `total` recipes of which exactly `complete` pass the completeness filter.
/// The incomplete ones are spread at seeded positions and cycle through the
/// rejection reasons (missing vitals, no grain, no hop, hop without method,
/// negative mass).
pub fn corpus_with_incomplete(total: usize, complete: usize, seed: u64) -> Corpus {
    assert!(complete <= total, "complete count exceeds total");
    let per_style = total.div_ceil(20);
    let mut corpus = generate_corpus(per_style, seed);
    corpus.recipes.truncate(total);
    let mut rng = SeededRng::new(seed ^ 0x0005_eed0_fbad);
    let mut idx: Vec<usize> = (0..total).collect();
    for i in (1..total).rev() {
        let j = rng.index(i + 1);
        idx.swap(i, j);
    }
    for (k, &i) in idx[..total - complete].iter().enumerate() {
        let r = &mut corpus.recipes[i];
        match k % 5 {
            0 => r.vitals = None,
            1 => r.ingredients.retain(|e| e.kind() != IngredientKind::Grain),
            2 => r.ingredients.retain(|e| e.kind() != IngredientKind::Hop),
            3 => {
                let h = r.ingredients.iter_mut().find(|e| e.kind() == IngredientKind::Hop).unwrap();
                *h = IngredientEntry {
                    name: h.name.clone(),
                    detail: crate::corpus::IngredientDetail::Hop {
                        method: None,
                        ibu: 10.0,
                    },
                };
            }
            _ => {
                let g = r.ingredients.iter_mut().find(|e| e.kind() == IngredientKind::Grain).unwrap();
                if let crate::corpus::IngredientDetail::Grain { mass_g, .. } = &mut g.detail {
                    *mass_g = -1.0;
                }
            }
        }
    }
    corpus
}

/// `n` points in `k` Gaussian blobs (standard deviation `sd`) centred on a
/// circle of radius 10, with Euclidean dissimilarities. Point `i` belongs to
/// cluster `i % k`.
pub fn planted_dissimilarity(k: usize, n: usize, sd: f64, seed: u64) -> (DissimilarityMatrix, Vec<usize>) {
    let mut rng = SeededRng::new(seed);
    let mut pts = Vec::with_capacity(n);
    let truth: Vec<usize> = (0..n).map(|i| i % k).collect();
    for &c in &truth {
        let ang = std::f64::consts::TAU * c as f64 / k as f64;
        pts.push((10.0 * ang.cos() + sd * rng.normal(), 10.0 * ang.sin() + sd * rng.normal()));
    }
    let labels = (0..n).map(|i| format!("obs{i:03}")).collect();
    let d = DissimilarityMatrix::from_fn(labels, |i, j| {
        let (a, b): ((f64, f64), (f64, f64)) = (pts[i], pts[j]);
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    })
    .expect("finite symmetric distances");
    (d, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{filter_complete, RejectReason};

    #[test]
    fn bundled_corpus_is_complete_and_balanced() {
        let c = bundled_corpus();
        assert_eq!(c.len(), 200);
        assert_eq!(c.styles().len(), 20);
        assert_eq!(c.categories().len(), 4);
        let (kept, report) = filter_complete(&c);
        assert_eq!(kept.len(), 200);
        assert_eq!(report.rejections.len(), 0);
    }

    #[test]
    fn generation_is_seeded() {
        assert_eq!(generate_corpus(2, 5).recipes, generate_corpus(2, 5).recipes);
        assert_ne!(generate_corpus(2, 5).recipes, generate_corpus(2, 6).recipes);
    }

    #[test]
    fn incomplete_counts_are_exact() {
        let c = corpus_with_incomplete(1003, 611, 9);
        let (kept, report) = filter_complete(&c);
        assert_eq!(report.total_seen, 1003);
        assert_eq!(kept.len(), 611);
        for reason in [
            RejectReason::MissingVitals,
            RejectReason::MissingGrain,
            RejectReason::MissingHop,
            RejectReason::MissingMashOrHopUsage,
            RejectReason::MalformedField,
        ] {
            assert!(report.count(reason) > 0, "{reason:?}");
        }
    }

    #[test]
    fn planted_labels_cycle() {
        let (d, truth) = planted_dissimilarity(3, 9, 1.0, 1);
        assert_eq!(d.len(), 9);
        assert_eq!(truth, vec![0, 1, 2, 0, 1, 2, 0, 1, 2]);
        assert!(d.get(0, 3) < d.get(0, 1));
    }
}
