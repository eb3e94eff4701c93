//! Textual interchange: complexes, orbit catalogs, towers and cone sidecars
//! as JSON; CSV writers live next to the data they render.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::connect::BlockSidecar;
use crate::ech_core::{ClassLabel, FilteredTower, Orbit, OrbitKind};
use crate::error::{Error, Result};
use crate::homalg::matrix::SparseF2Matrix;
use crate::homalg::{Generator, GradedComplex};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorRecord {
    id: String,
    grading: i64,
    #[serde(with = "crate::rational::serde_rational")]
    action: Rational,
    #[serde(default)]
    class: ClassLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexRecord {
    generators: Vec<GeneratorRecord>,
    differential: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    umap: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complete_through: Option<i64>,
}

fn pairs(c: &GradedComplex, m: &SparseF2Matrix) -> Vec<[String; 2]> {
    let gens = c.generators();
    m.columns()
        .iter()
        .enumerate()
        .flat_map(|(src, col)| col.iter().map(move |&tgt| [gens[src].id.clone(), gens[tgt].id.clone()]))
        .collect()
}

pub fn complex_to_json(c: &GradedComplex) -> String {
    let record = ComplexRecord {
        generators: c
            .generators()
            .iter()
            .map(|g| GeneratorRecord {
                id: g.id.clone(),
                grading: g.grading,
                action: g.action,
                class: g.class.clone(),
            })
            .collect(),
        differential: pairs(c, c.differential()),
        umap: c.umap().map(|u| pairs(c, u)),
        complete_through: c.complete_through(),
    };
    serde_json::to_string_pretty(&record).expect("complex records serialize") + "\n"
}

/// Parses and shape-checks; chain-level validation is left to the caller.
pub fn complex_from_json(s: &str) -> Result<GradedComplex> {
    let record: ComplexRecord = serde_json::from_str(s)?;
    let gens = record
        .generators
        .into_iter()
        .map(|g| Generator::new(g.id, g.grading, g.action).with_class(g.class))
        .collect();
    let as_refs = |v: &[[String; 2]]| -> Vec<(String, String)> { v.iter().map(|[a, b]| (a.clone(), b.clone())).collect() };
    let d = as_refs(&record.differential);
    let u = record.umap.as_deref().map(as_refs);
    let d_refs: Vec<(&str, &str)> = d.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let u_refs: Option<Vec<(&str, &str)>> = u.as_ref().map(|u| u.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect());
    if let Some(dup) = duplicate(&d_refs) {
        return Err(Error::Shape(format!("differential pair {} → {} listed twice", dup.0, dup.1)));
    }
    if let Some(dup) = u_refs.as_deref().and_then(duplicate) {
        return Err(Error::Shape(format!("umap pair {} → {} listed twice", dup.0, dup.1)));
    }
    Ok(GradedComplex::from_pairs(gens, &d_refs, u_refs.as_deref())?.with_complete_through(record.complete_through))
}

// a repeated pair would cancel mod 2, which is never what a file means
fn duplicate<'a>(pairs: &[(&'a str, &'a str)]) -> Option<(&'a str, &'a str)> {
    let mut seen = std::collections::HashSet::new();
    pairs.iter().find(|p| !seen.insert(**p)).copied()
}

pub fn read_complex(path: &Path) -> Result<GradedComplex> {
    complex_from_json(&fs::read_to_string(path)?)
}

pub fn write_complex(path: &Path, c: &GradedComplex) -> Result<()> {
    fs::write(path, complex_to_json(c))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitRecord {
    id: String,
    kind: String,
    rotation_or_winding: String,
    #[serde(with = "crate::rational::serde_rational")]
    action: Rational,
    #[serde(default)]
    class: ClassLabel,
}

pub fn orbits_to_json(orbits: &[Orbit]) -> String {
    let records: Vec<OrbitRecord> = orbits
        .iter()
        .map(|o| {
            let value = match o.kind {
                OrbitKind::Elliptic { rotation } => rational::format(&rotation),
                OrbitKind::PositiveHyperbolic { winding } | OrbitKind::NegativeHyperbolic { winding } => winding.to_string(),
            };
            OrbitRecord {
                id: o.id.clone(),
                kind: o.kind.name().to_string(),
                rotation_or_winding: value,
                action: o.action,
                class: o.class.clone(),
            }
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("orbit records serialize") + "\n"
}

pub fn orbits_from_json(s: &str) -> Result<Vec<Orbit>> {
    let records: Vec<OrbitRecord> = serde_json::from_str(s)?;
    records
        .into_iter()
        .map(|r| {
            let winding = || {
                r.rotation_or_winding
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("orbit {}: winding {:?} is not an integer", r.id, r.rotation_or_winding)))
            };
            let kind = match r.kind.as_str() {
                "elliptic" => OrbitKind::Elliptic {
                    rotation: rational::parse(&r.rotation_or_winding)?,
                },
                "positive_hyperbolic" => OrbitKind::PositiveHyperbolic { winding: winding()? },
                "negative_hyperbolic" => OrbitKind::NegativeHyperbolic { winding: winding()? },
                other => return Err(Error::Parse(format!("orbit {}: unknown kind {other:?}", r.id))),
            };
            Orbit::new(r.id, kind, r.action, r.class)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerIndex {
    base: String,
    thresholds: Vec<String>,
    levels: Vec<String>,
}

pub const TOWER_INDEX: &str = "tower.json";

/// Writes `tower.json`, `base.json` and one `level_{i}.json` per threshold.
pub fn write_tower(dir: &Path, tower: &FilteredTower) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut levels = Vec::new();
    for i in 0..tower.thresholds().len() {
        let name = format!("level_{i}.json");
        let path = dir.join(&name);
        write_complex(&path, tower.level(i))?;
        written.push(path);
        levels.push(name);
    }
    let base = dir.join("base.json");
    write_complex(&base, tower.base())?;
    written.push(base);
    let index = TowerIndex {
        base: "base.json".into(),
        thresholds: tower.thresholds().iter().map(rational::format).collect(),
        levels,
    };
    let path = dir.join(TOWER_INDEX);
    fs::write(&path, serde_json::to_string_pretty(&index)? + "\n")?;
    written.push(path);
    Ok(written)
}

/// Rebuilds the tower from the base and thresholds, and checks that the
/// stored levels agree with the recomputed truncations.
pub fn read_tower(dir: &Path) -> Result<FilteredTower> {
    let index: TowerIndex = serde_json::from_str(&fs::read_to_string(dir.join(TOWER_INDEX))?)?;
    if index.levels.len() != index.thresholds.len() {
        return Err(Error::Shape("tower index lists a different number of levels and thresholds".into()));
    }
    let base = read_complex(&dir.join(&index.base))?;
    let thresholds = index.thresholds.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?;
    let tower = FilteredTower::new(base, thresholds)?;
    for (i, name) in index.levels.iter().enumerate() {
        if read_complex(&dir.join(name))? != *tower.level(i) {
            return Err(Error::MismatchedBase(format!("{name} is not the truncation of the base")));
        }
    }
    Ok(tower)
}

/// A map on `c` given as `[source, target]` id pairs, e.g. a homotopy `K`
/// on the tensor complex.
pub fn map_from_json(s: &str, c: &GradedComplex) -> Result<SparseF2Matrix> {
    let pairs: Vec<[String; 2]> = serde_json::from_str(s)?;
    let index = c.id_index();
    let mut entries = Vec::with_capacity(pairs.len());
    for [src, tgt] in &pairs {
        let find = |id: &String| index.get(id.as_str()).copied().ok_or_else(|| Error::Shape(format!("unknown generator {id:?}")));
        entries.push((find(tgt)?, find(src)?));
    }
    SparseF2Matrix::from_entries(c.len(), c.len(), entries)
}

pub fn map_to_json(m: &SparseF2Matrix, c: &GradedComplex) -> String {
    serde_json::to_string_pretty(&pairs(c, m)).expect("pairs serialize") + "\n"
}

pub fn sidecar_to_json(s: &BlockSidecar) -> String {
    serde_json::to_string_pretty(s).expect("sidecar serializes") + "\n"
}
