//! Recipe records, JSON Lines ingestion, completeness filtering and the
//! cold/hot fermentation split.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fermentation {
    Cold,
    Hot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IngredientKind {
    Grain,
    Hop,
    ExtractDry,
    ExtractLiquid,
    Adjunct,
    Sugar,
    Fruit,
}

impl IngredientKind {
    pub const ALL: [IngredientKind; 7] = [
        IngredientKind::Grain,
        IngredientKind::Hop,
        IngredientKind::ExtractDry,
        IngredientKind::ExtractLiquid,
        IngredientKind::Adjunct,
        IngredientKind::Sugar,
        IngredientKind::Fruit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IngredientKind::Grain => "grain",
            IngredientKind::Hop => "hop",
            IngredientKind::ExtractDry => "extract_dry",
            IngredientKind::ExtractLiquid => "extract_liquid",
            IngredientKind::Adjunct => "adjunct",
            IngredientKind::Sugar => "sugar",
            IngredientKind::Fruit => "fruit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaltType {
    Base,
    Crystal,
    Roasted,
    Specialty,
    Acidulated,
    Smoked,
    GlutenFree,
}

impl MaltType {
    pub const ALL: [MaltType; 7] = [
        MaltType::Base,
        MaltType::Crystal,
        MaltType::Roasted,
        MaltType::Specialty,
        MaltType::Acidulated,
        MaltType::Smoked,
        MaltType::GlutenFree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MaltType::Base => "base",
            MaltType::Crystal => "crystal",
            MaltType::Roasted => "roasted",
            MaltType::Specialty => "specialty",
            MaltType::Acidulated => "acidulated",
            MaltType::Smoked => "smoked",
            MaltType::GlutenFree => "gluten_free",
        }
    }
}

impl fmt::Display for MaltType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopMethod {
    Boil,
    Aroma,
    DryHop,
    DryHopHk,
    Whirlpool,
    FirstWort,
    HopStand,
    Hopback,
    Mash,
}

impl HopMethod {
    pub const ALL: [HopMethod; 9] = [
        HopMethod::Boil,
        HopMethod::Aroma,
        HopMethod::DryHop,
        HopMethod::DryHopHk,
        HopMethod::Whirlpool,
        HopMethod::FirstWort,
        HopMethod::HopStand,
        HopMethod::Hopback,
        HopMethod::Mash,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HopMethod::Boil => "boil",
            HopMethod::Aroma => "aroma",
            HopMethod::DryHop => "dry_hop",
            HopMethod::DryHopHk => "dry_hop_hk",
            HopMethod::Whirlpool => "whirlpool",
            HopMethod::FirstWort => "first_wort",
            HopMethod::HopStand => "hop_stand",
            HopMethod::Hopback => "hopback",
            HopMethod::Mash => "mash",
        }
    }
}

impl fmt::Display for HopMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind-specific payload of an ingredient entry. Grain and hop entries carry
/// the fields the analytics need; every other kind is just a label.
#[derive(Debug, Clone, PartialEq)]
pub enum IngredientDetail {
    Grain { malt_type: MaltType, mass_g: f64 },
    /// `method` is optional here so that incomplete hop usage can be reported
    /// by the filter instead of failing ingestion.
    Hop { method: Option<HopMethod>, ibu: f64 },
    Other(IngredientKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngredientEntry {
    pub name: String,
    pub detail: IngredientDetail,
}

impl IngredientEntry {
    pub fn grain(name: &str, malt_type: MaltType, mass_g: f64) -> Self {
        IngredientEntry {
            name: name.to_string(),
            detail: IngredientDetail::Grain { malt_type, mass_g },
        }
    }

    pub fn hop(name: &str, method: HopMethod, ibu: f64) -> Self {
        IngredientEntry {
            name: name.to_string(),
            detail: IngredientDetail::Hop {
                method: Some(method),
                ibu,
            },
        }
    }

    pub fn other(name: &str, kind: IngredientKind) -> Self {
        IngredientEntry {
            name: name.to_string(),
            detail: IngredientDetail::Other(kind),
        }
    }

    pub fn kind(&self) -> IngredientKind {
        match self.detail {
            IngredientDetail::Grain { .. } => IngredientKind::Grain,
            IngredientDetail::Hop { .. } => IngredientKind::Hop,
            IngredientDetail::Other(kind) => kind,
        }
    }

    /// Subtype key: case-folded, whitespace-collapsed name.
    pub fn subtype_key(&self) -> String {
        normalize_name(&self.name)
    }
}

pub fn normalize_name(name: &str) -> String {
    name.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalStats {
    pub og: f64,
    pub fg: f64,
    pub abv: f64,
    pub srm: f64,
    pub ibu: f64,
}

impl VitalStats {
    pub fn is_valid(&self) -> bool {
        let all_finite = [self.og, self.fg, self.abv, self.srm, self.ibu]
            .iter()
            .all(|v| v.is_finite());
        all_finite
            && self.og > self.fg
            && self.fg >= 0.980
            && self.og <= 1.200
            && self.abv >= 0.0
            && self.srm >= 0.0
            && self.ibu >= 0.0
    }

    /// Apparent degree of fermentation; see [`crate::hops::adf`].
    pub fn adf(&self) -> Result<f64> {
        crate::hops::adf(self.og, self.fg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub id: String,
    pub style: String,
    pub category: String,
    pub fermentation: Fermentation,
    pub ingredients: Vec<IngredientEntry>,
    /// `None` when at least one of the five vital fields was absent.
    pub vitals: Option<VitalStats>,
}

impl Recipe {
    pub fn grains(&self) -> impl Iterator<Item = (&IngredientEntry, MaltType, f64)> {
        self.ingredients.iter().filter_map(|e| match e.detail {
            IngredientDetail::Grain { malt_type, mass_g } => Some((e, malt_type, mass_g)),
            _ => None,
        })
    }

    pub fn hops(&self) -> impl Iterator<Item = (&IngredientEntry, Option<HopMethod>, f64)> {
        self.ingredients.iter().filter_map(|e| match e.detail {
            IngredientDetail::Hop { method, ibu } => Some((e, method, ibu)),
            _ => None,
        })
    }

    pub fn has_kind(&self, kind: IngredientKind) -> bool {
        self.ingredients.iter().any(|e| e.kind() == kind)
    }

    /// Number of distinct (normalized) ingredient names of one kind.
    pub fn distinct_of_kind(&self, kind: IngredientKind) -> usize {
        self.ingredients
            .iter()
            .filter(|e| e.kind() == kind)
            .map(IngredientEntry::subtype_key)
            .collect::<HashSet<_>>()
            .len()
    }

    fn completeness(&self) -> Option<RejectReason> {
        match &self.vitals {
            Some(v) if v.is_valid() => {}
            _ => return Some(RejectReason::MissingVitals),
        }
        if self.grains().next().is_none() {
            return Some(RejectReason::MissingGrain);
        }
        if self.hops().next().is_none() {
            return Some(RejectReason::MissingHop);
        }
        if self.hops().any(|(_, method, _)| method.is_none()) {
            return Some(RejectReason::MissingMashOrHopUsage);
        }
        let finite = self.ingredients.iter().all(|e| match e.detail {
            IngredientDetail::Grain { mass_g, .. } => mass_g.is_finite() && mass_g >= 0.0,
            IngredientDetail::Hop { ibu, .. } => ibu.is_finite() && ibu >= 0.0,
            IngredientDetail::Other(_) => true,
        });
        if !finite || self.style.is_empty() || self.category.is_empty() {
            return Some(RejectReason::MalformedField);
        }
        None
    }
}

/// A line that could not be turned into a [`Recipe`].
#[derive(Debug, Clone, PartialEq)]
pub struct MalformedLine {
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Provenance {
    pub sources: Vec<PathBuf>,
    pub ingested_at: Option<SystemTime>,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub recipes: Vec<Recipe>,
    /// Lines skipped during ingestion; they count as seen records when the
    /// corpus is filtered.
    pub malformed: Vec<MalformedLine>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn from_recipes(recipes: Vec<Recipe>) -> Self {
        Corpus {
            recipes,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.recipes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recipes.is_empty()
    }

    pub fn category<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a Recipe> + 'a {
        self.recipes.iter().filter(move |r| r.category == category)
    }

    pub fn style<'a>(&'a self, style: &'a str) -> impl Iterator<Item = &'a Recipe> + 'a {
        self.recipes.iter().filter(move |r| r.style == style)
    }

    /// Category names in first-appearance order.
    pub fn categories(&self) -> Vec<&str> {
        first_appearance(self.recipes.iter().map(|r| r.category.as_str()))
    }

    /// Style names in first-appearance order.
    pub fn styles(&self) -> Vec<&str> {
        first_appearance(self.recipes.iter().map(|r| r.style.as_str()))
    }
}

fn first_appearance<'a>(names: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = HashSet::new();
    names.filter(|n| seen.insert(*n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    MissingVitals,
    MissingGrain,
    MissingHop,
    MissingMashOrHopUsage,
    MalformedField,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::MissingVitals => "missing_vitals",
            RejectReason::MissingGrain => "missing_grain",
            RejectReason::MissingHop => "missing_hop",
            RejectReason::MissingMashOrHopUsage => "missing_mash_or_hop_usage",
            RejectReason::MalformedField => "malformed_field",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RejectionReport {
    pub total_seen: usize,
    pub kept: usize,
    pub rejections: Vec<(String, RejectReason)>,
}

impl RejectionReport {
    pub fn discard_rate(&self) -> f64 {
        if self.total_seen == 0 {
            0.0
        } else {
            self.rejections.len() as f64 / self.total_seen as f64
        }
    }

    pub fn count(&self, reason: RejectReason) -> usize {
        self.rejections.iter().filter(|(_, r)| *r == reason).count()
    }

    /// CSV with header `id,reason`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["id", "reason"])?;
        for (id, reason) in &self.rejections {
            w.write_record([id.as_str(), reason.code()])?;
        }
        w.flush().map_err(|e| Error::io("<rejections>", e))?;
        Ok(())
    }
}

// Wire schema -----------------------------------------------------------------

#[derive(Debug, Deserialize, Serialize)]
struct RawRecipe {
    id: String,
    style: String,
    category: String,
    fermentation: Fermentation,
    #[serde(default)]
    vitals: Option<RawVitals>,
    ingredients: Vec<RawIngredient>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct RawVitals {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    og: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    abv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    srm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ibu: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
struct RawIngredient {
    kind: IngredientKind,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    malt_type: Option<MaltType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mass_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hop_method: Option<HopMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ibu: Option<f64>,
}

impl RawRecipe {
    fn into_recipe(self) -> std::result::Result<Recipe, String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        let ingredients = self
            .ingredients
            .into_iter()
            .map(RawIngredient::into_entry)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let vitals = self.vitals.and_then(|v| {
            Some(VitalStats {
                og: v.og?,
                fg: v.fg?,
                abv: v.abv?,
                srm: v.srm?,
                ibu: v.ibu?,
            })
        });
        Ok(Recipe {
            id: self.id,
            style: self.style,
            category: self.category,
            fermentation: self.fermentation,
            ingredients,
            vitals,
        })
    }

    fn from_recipe(r: &Recipe) -> Self {
        RawRecipe {
            id: r.id.clone(),
            style: r.style.clone(),
            category: r.category.clone(),
            fermentation: r.fermentation,
            vitals: Some(match r.vitals {
                Some(v) => RawVitals {
                    og: Some(v.og),
                    fg: Some(v.fg),
                    abv: Some(v.abv),
                    srm: Some(v.srm),
                    ibu: Some(v.ibu),
                },
                None => RawVitals::default(),
            }),
            ingredients: r
                .ingredients
                .iter()
                .map(|e| {
                    let mut raw = RawIngredient {
                        kind: e.kind(),
                        name: e.name.clone(),
                        malt_type: None,
                        mass_g: None,
                        hop_method: None,
                        ibu: None,
                    };
                    match e.detail {
                        IngredientDetail::Grain { malt_type, mass_g } => {
                            raw.malt_type = Some(malt_type);
                            raw.mass_g = Some(mass_g);
                        }
                        IngredientDetail::Hop { method, ibu } => {
                            raw.hop_method = method;
                            raw.ibu = Some(ibu);
                        }
                        IngredientDetail::Other(_) => {}
                    }
                    raw
                })
                .collect(),
        }
    }
}

impl RawIngredient {
    fn into_entry(self) -> std::result::Result<IngredientEntry, String> {
        let detail = match self.kind {
            IngredientKind::Grain => {
                if self.hop_method.is_some() || self.ibu.is_some() {
                    return Err(format!("grain `{}` carries hop fields", self.name));
                }
                let malt_type = self
                    .malt_type
                    .ok_or_else(|| format!("grain `{}` lacks malt_type", self.name))?;
                let mass_g = self
                    .mass_g
                    .ok_or_else(|| format!("grain `{}` lacks mass_g", self.name))?;
                IngredientDetail::Grain { malt_type, mass_g }
            }
            IngredientKind::Hop => {
                if self.malt_type.is_some() {
                    return Err(format!("hop `{}` carries malt_type", self.name));
                }
                let ibu = self
                    .ibu
                    .ok_or_else(|| format!("hop `{}` lacks ibu", self.name))?;
                IngredientDetail::Hop {
                    method: self.hop_method,
                    ibu,
                }
            }
            other => {
                if self.malt_type.is_some() || self.hop_method.is_some() {
                    return Err(format!("{} `{}` carries grain/hop fields", other.as_str(), self.name));
                }
                IngredientDetail::Other(other)
            }
        };
        Ok(IngredientEntry {
            name: self.name,
            detail,
        })
    }
}

/// Serializes one recipe as a single JSON line (no trailing newline).
pub fn recipe_to_json(recipe: &Recipe) -> String {
    serde_json::to_string(&RawRecipe::from_recipe(recipe)).expect("recipe serializes")
}

pub fn write_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for r in &corpus.recipes {
        out.write_all(recipe_to_json(r).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses JSON Lines from any reader. Blank lines are ignored; lines that fail
/// to parse or validate are collected in [`Corpus::malformed`] with their
/// 1-based line number.
pub fn parse_reader<R: Read>(reader: R) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut seen_ids = HashSet::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(format!("<line {line_no}>"), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RawRecipe>(&line)
            .map_err(|e| (None, e.to_string()))
            .and_then(|raw| {
                let id = raw.id.clone();
                raw.into_recipe().map_err(|msg| (Some(id), msg))
            });
        match parsed {
            Ok(recipe) if !seen_ids.insert(recipe.id.clone()) => {
                corpus.malformed.push(MalformedLine {
                    line: line_no,
                    message: format!("duplicate id `{}`", recipe.id),
                    id: Some(recipe.id),
                });
            }
            Ok(recipe) => corpus.recipes.push(recipe),
            Err((id, message)) => corpus.malformed.push(MalformedLine {
                line: line_no,
                id: id.or_else(|| sniff_id(&line)),
                message,
            }),
        }
    }
    if corpus.recipes.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(corpus)
}

fn sniff_id(line: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(line).ok()?;
    value.get("id")?.as_str().map(str::to_string)
}

pub fn parse_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut corpus = parse_reader(file)?;
    corpus.provenance = Provenance {
        sources: vec![path.to_path_buf()],
        ingested_at: Some(SystemTime::now()),
    };
    Ok(corpus)
}

/// Keeps the recipes that satisfy every completeness rule. Each input record,
/// including lines that were malformed at ingestion, appears exactly once in
/// the report.
pub fn filter_complete(corpus: &Corpus) -> (Corpus, RejectionReport) {
    let mut kept = Vec::with_capacity(corpus.recipes.len());
    let mut rejections = Vec::new();
    for m in &corpus.malformed {
        let id = m.id.clone().unwrap_or_else(|| format!("line:{}", m.line));
        rejections.push((id, RejectReason::MalformedField));
    }
    for r in &corpus.recipes {
        match r.completeness() {
            None => kept.push(r.clone()),
            Some(reason) => rejections.push((r.id.clone(), reason)),
        }
    }
    let report = RejectionReport {
        total_seen: corpus.recipes.len() + corpus.malformed.len(),
        kept: kept.len(),
        rejections,
    };
    let filtered = Corpus {
        recipes: kept,
        malformed: Vec::new(),
        provenance: corpus.provenance.clone(),
    };
    (filtered, report)
}

/// Stable split into (cold, hot).
pub fn partition_fermentation(corpus: &Corpus) -> (Corpus, Corpus) {
    let (cold, hot): (Vec<_>, Vec<_>) = corpus
        .recipes
        .iter()
        .cloned()
        .partition(|r| r.fermentation == Fermentation::Cold);
    let part = |recipes| Corpus {
        recipes,
        malformed: Vec::new(),
        provenance: corpus.provenance.clone(),
    };
    (part(cold), part(hot))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"id":"r1","style":"Pils","category":"Lager","fermentation":"cold","vitals":{"og":1.048,"fg":1.010,"abv":5.0,"srm":3.5,"ibu":35},"ingredients":[{"kind":"grain","name":"Pilsner","malt_type":"base","mass_g":4500},{"kind":"hop","name":"Saaz","hop_method":"boil","ibu":35}]}"#;

    fn line(id: &str, ferm: &str) -> String {
        GOOD.replace("\"r1\"", &format!("\"{id}\"")).replace("\"cold\"", &format!("\"{ferm}\""))
    }

    #[test]
    fn parses_three_valid_lines() {
        let text = [line("a", "cold"), line("b", "hot"), line("c", "cold")].join("\n");
        let corpus = parse_reader(text.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 3);
        assert!(corpus.malformed.is_empty());
        let r = &corpus.recipes[0];
        assert_eq!(r.vitals.unwrap().ibu, 35.0);
        assert_eq!(r.grains().count(), 1);
    }

    #[test]
    fn grain_without_malt_type_is_malformed_and_others_kept() {
        let bad = line("bad", "hot").replace(r#","malt_type":"base""#, "");
        let text = [line("a", "cold"), bad, line("c", "hot")].join("\n");
        let corpus = parse_reader(text.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.malformed.len(), 1);
        assert_eq!(corpus.malformed[0].line, 2);
        assert_eq!(corpus.malformed[0].id.as_deref(), Some("bad"));
        let (_, report) = filter_complete(&corpus);
        assert_eq!(report.rejections, vec![("bad".to_string(), RejectReason::MalformedField)]);
        assert_eq!(report.total_seen, 3);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_reader("".as_bytes()), Err(Error::NoRecords)));
        assert!(matches!(parse_reader("\n\n".as_bytes()), Err(Error::NoRecords)));
    }

    #[test]
    fn broken_json_and_duplicates_are_collected() {
        let text = [line("a", "cold"), "{not json".to_string(), line("a", "hot")].join("\n");
        let corpus = parse_reader(text.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 1);
        let lines: Vec<_> = corpus.malformed.iter().map(|m| m.line).collect();
        assert_eq!(lines, vec![2, 3]);
    }

    #[test]
    fn missing_ibu_vital_rejected_as_missing_vitals() {
        let text = line("a", "cold").replacen(r#","ibu":35}"#, "}", 1);
        let corpus = parse_reader(text.as_bytes()).unwrap();
        assert!(corpus.recipes[0].vitals.is_none());
        let (kept, report) = filter_complete(&corpus);
        assert!(kept.is_empty());
        assert_eq!(report.rejections[0].1, RejectReason::MissingVitals);
    }

    #[test]
    fn grains_without_hops_rejected_as_missing_hop() {
        let text = line("a", "cold").replace(
            r#",{"kind":"hop","name":"Saaz","hop_method":"boil","ibu":35}"#,
            "",
        );
        let corpus = parse_reader(text.as_bytes()).unwrap();
        let (_, report) = filter_complete(&corpus);
        assert_eq!(report.rejections[0].1, RejectReason::MissingHop);
    }

    #[test]
    fn method_less_hop_rejected_as_missing_usage() {
        let text = line("a", "cold").replace(r#""hop_method":"boil","#, "");
        let corpus = parse_reader(text.as_bytes()).unwrap();
        let (_, report) = filter_complete(&corpus);
        assert_eq!(report.rejections[0].1, RejectReason::MissingMashOrHopUsage);
    }

    #[test]
    fn out_of_range_vitals_rejected() {
        let text = line("a", "cold").replace(r#""fg":1.010"#, r#""fg":1.060"#);
        let corpus = parse_reader(text.as_bytes()).unwrap();
        let (_, report) = filter_complete(&corpus);
        assert_eq!(report.rejections[0].1, RejectReason::MissingVitals);
    }

    #[test]
    fn partition_preserves_order() {
        let labels = ["cold", "hot", "cold", "hot", "cold"];
        let text = labels
            .iter()
            .enumerate()
            .map(|(i, f)| line(&format!("r{i}"), f))
            .collect::<Vec<_>>()
            .join("\n");
        let corpus = parse_reader(text.as_bytes()).unwrap();
        let (cold, hot) = partition_fermentation(&corpus);
        let ids = |c: &Corpus| c.recipes.iter().map(|r| r.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&cold), ["r0", "r2", "r4"]);
        assert_eq!(ids(&hot), ["r1", "r3"]);
    }

    #[test]
    fn all_cold_leaves_hot_empty() {
        let corpus = parse_reader(line("a", "cold").as_bytes()).unwrap();
        let (cold, hot) = partition_fermentation(&corpus);
        assert_eq!(cold.len(), 1);
        assert!(hot.is_empty());
    }

    #[test]
    fn jsonl_round_trip_preserves_recipes() {
        let corpus = parse_reader(GOOD.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&corpus, &mut buf).unwrap();
        let again = parse_reader(buf.as_slice()).unwrap();
        assert_eq!(corpus.recipes, again.recipes);
    }

    #[test]
    fn rejection_csv_layout() {
        let report = RejectionReport {
            total_seen: 2,
            kept: 1,
            rejections: vec![("x".into(), RejectReason::MissingGrain)],
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "id,reason\nx,missing_grain\n");
    }

    #[test]
    fn subtype_key_normalizes() {
        let e = IngredientEntry::grain("  Pale   ALE ", MaltType::Base, 1.0);
        assert_eq!(e.subtype_key(), "pale ale");
    }
}
