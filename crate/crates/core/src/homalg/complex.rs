use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::ech_core::ClassLabel;
use crate::error::{Error, Result};
use crate::rational::{format, Rational};

use super::matrix::SparseF2Matrix;

/// Id of the empty orbit set.
pub const EMPTY_ID: &str = "∅";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub id: String,
    pub grading: i64,
    pub action: Rational,
    pub class: ClassLabel,
}

impl Generator {
    pub fn new(id: impl Into<String>, grading: i64, action: Rational) -> Self {
        Self {
            id: id.into(),
            grading,
            action,
            class: ClassLabel::zero(),
        }
    }

    pub fn with_class(mut self, class: ClassLabel) -> Self {
        self.class = class;
        self
    }
}

/// A finite free F2 chain complex whose generators carry a grading, an
/// action and a homology class label. Column `j` of `differential` is
/// `∂(generator j)`; the optional `umap` is stored the same way.
///
/// `complete_through` records the largest grading `G` such that every
/// generator of grading `≤ G` of the (possibly infinite) complex being
/// modelled is present. `None` means the complex is exact as given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedComplex {
    generators: Vec<Generator>,
    differential: SparseF2Matrix,
    umap: Option<SparseF2Matrix>,
    complete_through: Option<i64>,
}

impl GradedComplex {
    /// Checks shapes and id uniqueness only; chain-level invariants are
    /// reported by [`GradedComplex::validate`].
    pub fn new(
        generators: Vec<Generator>,
        differential: SparseF2Matrix,
        umap: Option<SparseF2Matrix>,
    ) -> Result<Self> {
        let n = generators.len();
        if differential.rows() != n || differential.cols() != n {
            return Err(Error::Shape(format!(
                "differential is {}x{} for {n} generators",
                differential.rows(),
                differential.cols()
            )));
        }
        if let Some(u) = &umap {
            if u.rows() != n || u.cols() != n {
                return Err(Error::Shape(format!("umap is {}x{} for {n} generators", u.rows(), u.cols())));
            }
        }
        let mut seen = HashSet::with_capacity(n);
        for g in &generators {
            if !seen.insert(g.id.as_str()) {
                return Err(Error::Shape(format!("duplicate generator id {:?}", g.id)));
            }
        }
        Ok(Self {
            generators,
            differential,
            umap,
            complete_through: None,
        })
    }

    /// Builds a complex from id pairs `(source, target)`.
    pub fn from_pairs(
        generators: Vec<Generator>,
        differential: &[(&str, &str)],
        umap: Option<&[(&str, &str)]>,
    ) -> Result<Self> {
        let index: HashMap<&str, usize> = generators.iter().enumerate().map(|(i, g)| (g.id.as_str(), i)).collect();
        let n = generators.len();
        let lookup = |pairs: &[(&str, &str)]| -> Result<SparseF2Matrix> {
            let entries = pairs
                .iter()
                .map(|(s, t)| {
                    let s = index.get(s).ok_or_else(|| Error::Shape(format!("unknown generator {s:?}")))?;
                    let t = index.get(t).ok_or_else(|| Error::Shape(format!("unknown generator {t:?}")))?;
                    Ok((*t, *s))
                })
                .collect::<Result<Vec<_>>>()?;
            SparseF2Matrix::from_entries(n, n, entries)
        };
        let d = lookup(differential)?;
        let u = umap.map(lookup).transpose()?;
        Self::new(generators, d, u)
    }

    pub fn with_complete_through(mut self, g: Option<i64>) -> Self {
        self.complete_through = g;
        self
    }

    pub fn with_umap(mut self, umap: Option<SparseF2Matrix>) -> Result<Self> {
        if let Some(u) = &umap {
            if u.rows() != self.len() || u.cols() != self.len() {
                return Err(Error::Shape("umap has the wrong size".into()));
            }
        }
        self.umap = umap;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    pub fn differential(&self) -> &SparseF2Matrix {
        &self.differential
    }

    pub fn umap(&self) -> Option<&SparseF2Matrix> {
        self.umap.as_ref()
    }

    pub fn complete_through(&self) -> Option<i64> {
        self.complete_through
    }

    /// Whether homology in grading `g` agrees with that of the modelled
    /// complex: gradings `g` and `g + 1` must be complete.
    pub fn homology_exact_in(&self, g: i64) -> bool {
        self.complete_through.is_none_or(|top| g < top)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn id_index(&self) -> HashMap<&str, usize> {
        self.generators.iter().enumerate().map(|(i, g)| (g.id.as_str(), i)).collect()
    }

    /// Gradings that carry at least one generator, ascending.
    pub fn gradings(&self) -> Vec<i64> {
        let mut g: Vec<i64> = self.generators.iter().map(|g| g.grading).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    pub fn min_grading(&self) -> Option<i64> {
        self.generators.iter().map(|g| g.grading).min()
    }

    /// Generator counts per grading.
    pub fn counts_by_grading(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry(g.grading).or_insert(0) += 1;
        }
        out
    }

    /// Smallest strictly positive generator action.
    pub fn min_positive_action(&self) -> Option<Rational> {
        self.generators
            .iter()
            .map(|g| g.action)
            .filter(|a| *a > Rational::from_integer(0))
            .min()
    }

    /// Index of the unique generator of action zero (the empty orbit set).
    pub fn empty_set_index(&self) -> Option<usize> {
        let zero = Rational::from_integer(0);
        let mut it = self.generators.iter().enumerate().filter(|(_, g)| g.action == zero);
        let first = it.next()?.0;
        if it.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// Reorders generators: new generator `i` is old generator `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut inverse = vec![usize::MAX; n];
        if perm.len() != n {
            return Err(Error::Shape("permutation has the wrong length".into()));
        }
        for (new, &old) in perm.iter().enumerate() {
            if old >= n || inverse[old] != usize::MAX {
                return Err(Error::Shape("not a permutation".into()));
            }
            inverse[old] = new;
        }
        let remap = |m: &SparseF2Matrix| {
            let cols = perm
                .iter()
                .map(|&old| m.col(old).iter().map(|&r| inverse[r]).collect())
                .collect();
            SparseF2Matrix::from_columns(n, cols)
        };
        let generators = perm.iter().map(|&old| self.generators[old].clone()).collect();
        Ok(Self {
            generators,
            differential: remap(&self.differential),
            umap: self.umap.as_ref().map(remap),
            complete_through: self.complete_through,
        })
    }

    /// Subcomplex spanned by the generators satisfying `keep`, in their
    /// original order. Entries leaving the kept set are dropped.
    pub fn restrict<F: Fn(&Generator) -> bool>(&self, keep: F) -> (Self, Vec<usize>) {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.generators[i])).collect();
        let differential = self.differential.submatrix(&kept, &kept);
        let umap = self.umap.as_ref().map(|u| u.submatrix(&kept, &kept));
        let generators = kept.iter().map(|&i| self.generators[i].clone()).collect();
        (
            Self {
                generators,
                differential,
                umap,
                complete_through: self.complete_through,
            },
            kept,
        )
    }

    /// Direct sum; ids must stay distinct.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let n = self.len();
        let m = other.len();
        let shift = |mat: &SparseF2Matrix, off: usize| -> Vec<Vec<usize>> {
            mat.columns().iter().map(|c| c.iter().map(|r| r + off).collect()).collect()
        };
        let mut dcols = shift(&self.differential, 0);
        dcols.extend(shift(&other.differential, n));
        let umap = match (&self.umap, &other.umap) {
            (Some(a), Some(b)) => {
                let mut cols = shift(a, 0);
                cols.extend(shift(b, n));
                Some(SparseF2Matrix::from_columns(n + m, cols))
            }
            _ => None,
        };
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        let complete = match (self.complete_through, other.complete_through) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(Self::new(generators, SparseF2Matrix::from_columns(n + m, dcols), umap)?.with_complete_through(complete))
    }

    /// Every violated invariant, with offending generator ids.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let zero = Rational::from_integer(0);
        for g in &self.generators {
            if g.action < zero {
                violations.push(Violation::NegativeAction { id: g.id.clone(), action: g.action });
            }
        }
        self.check_map(&self.differential, -1, MapKind::Differential, &mut violations);
        if let Ok(d2) = self.differential.mul(&self.differential) {
            for (r, c) in d2.entries() {
                violations.push(Violation::DifferentialSquare {
                    source: self.generators[c].id.clone(),
                    target: self.generators[r].id.clone(),
                });
            }
        }
        if let Some(u) = &self.umap {
            self.check_map(u, -2, MapKind::Umap, &mut violations);
            let du = self.differential.mul(u).expect("square");
            let ud = u.mul(&self.differential).expect("square");
            for (r, c) in du.add(&ud).expect("same shape").entries() {
                violations.push(Violation::UmapNotChainMap {
                    source: self.generators[c].id.clone(),
                    target: self.generators[r].id.clone(),
                });
            }
        }
        ValidationReport { violations }
    }

    fn check_map(&self, m: &SparseF2Matrix, degree: i64, kind: MapKind, out: &mut Vec<Violation>) {
        for (r, c) in m.entries() {
            let (s, t) = (&self.generators[c], &self.generators[r]);
            if t.grading != s.grading + degree {
                out.push(Violation::Grading {
                    kind,
                    source: s.id.clone(),
                    target: t.id.clone(),
                    source_grading: s.grading,
                    target_grading: t.grading,
                });
            }
            if t.action >= s.action {
                out.push(Violation::Action {
                    kind,
                    source: s.id.clone(),
                    target: t.id.clone(),
                    source_action: s.action,
                    target_action: t.action,
                });
            }
            if t.class != s.class {
                out.push(Violation::Class {
                    kind,
                    source: s.id.clone(),
                    target: t.id.clone(),
                });
            }
        }
    }

    /// Fails unless the algebraic invariants hold (everything except the
    /// action filtration).
    pub fn ensure_algebraic(&self) -> Result<()> {
        let report = self.validate().algebraic();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// Fails unless every invariant holds.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Differential,
    Umap,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapKind::Differential => write!(f, "∂"),
            MapKind::Umap => write!(f, "U"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NegativeAction {
        id: String,
        action: Rational,
    },
    DifferentialSquare {
        source: String,
        target: String,
    },
    Grading {
        kind: MapKind,
        source: String,
        target: String,
        source_grading: i64,
        target_grading: i64,
    },
    Action {
        kind: MapKind,
        source: String,
        target: String,
        source_action: Rational,
        target_action: Rational,
    },
    Class {
        kind: MapKind,
        source: String,
        target: String,
    },
    UmapNotChainMap {
        source: String,
        target: String,
    },
}

impl Violation {
    /// Action-filtration violations are not algebraic: homology is still
    /// defined without them.
    pub fn is_algebraic(&self) -> bool {
        !matches!(self, Violation::Action { .. } | Violation::NegativeAction { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeAction { id, action } => {
                write!(f, "generator {id} has negative action {}", format(action))
            }
            Violation::DifferentialSquare { source, target } => {
                write!(f, "∂² has entry {source} -> {target}")
            }
            Violation::Grading {
                kind,
                source,
                target,
                source_grading,
                target_grading,
            } => write!(
                f,
                "{kind} entry {source} -> {target} maps grading {source_grading} to {target_grading}"
            ),
            Violation::Action {
                kind,
                source,
                target,
                source_action,
                target_action,
            } => write!(
                f,
                "{kind} entry {source} -> {target} does not decrease action ({} -> {})",
                format(source_action),
                format(target_action)
            ),
            Violation::Class { kind, source, target } => {
                write!(f, "{kind} entry {source} -> {target} changes the class label")
            }
            Violation::UmapNotChainMap { source, target } => {
                write!(f, "U∂ + ∂U has entry {source} -> {target}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn algebraic(self) -> Self {
        Self {
            violations: self.violations.into_iter().filter(Violation::is_algebraic).collect(),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// A graded linear map between two complexes. `action_slack` bounds how
/// far an entry may raise action.
#[derive(Debug, Clone)]
pub struct ChainMap<'a> {
    pub source: &'a GradedComplex,
    pub target: &'a GradedComplex,
    pub degree: i64,
    pub matrix: SparseF2Matrix,
    pub action_slack: Rational,
}

impl<'a> ChainMap<'a> {
    pub fn new(
        source: &'a GradedComplex,
        target: &'a GradedComplex,
        degree: i64,
        matrix: SparseF2Matrix,
        action_slack: Rational,
    ) -> Result<Self> {
        if matrix.rows() != target.len() || matrix.cols() != source.len() {
            return Err(Error::Shape(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.len(),
                source.len()
            )));
        }
        Ok(Self {
            source,
            target,
            degree,
            matrix,
            action_slack,
        })
    }

    pub fn identity(c: &'a GradedComplex) -> Self {
        Self {
            source: c,
            target: c,
            degree: 0,
            matrix: SparseF2Matrix::identity(c.len()),
            action_slack: Rational::from_integer(0),
        }
    }

    /// The U-map of `c` as a chain map of degree −2.
    pub fn umap(c: &'a GradedComplex) -> Result<Self> {
        let u = c.umap().ok_or(Error::MissingUmap("complex"))?;
        Ok(Self {
            source: c,
            target: c,
            degree: -2,
            matrix: u.clone(),
            action_slack: Rational::from_integer(0),
        })
    }

    /// Problems with degree, class, action slack or commutation with the
    /// differentials, as readable strings.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (r, c) in self.matrix.entries() {
            let (s, t) = (self.source.generator(c), self.target.generator(r));
            if t.grading != s.grading + self.degree {
                out.push(format!(
                    "entry {} -> {} shifts grading by {} instead of {}",
                    s.id,
                    t.id,
                    t.grading - s.grading,
                    self.degree
                ));
            }
            if t.class != s.class {
                out.push(format!("entry {} -> {} changes the class label", s.id, t.id));
            }
            if t.action > s.action + self.action_slack {
                out.push(format!(
                    "entry {} -> {} raises action beyond slack ({} -> {})",
                    s.id,
                    t.id,
                    format(&s.action),
                    format(&t.action)
                ));
            }
        }
        let lhs = self.matrix.mul(self.source.differential()).expect("shapes checked");
        let rhs = self.target.differential().mul(&self.matrix).expect("shapes checked");
        for (r, c) in lhs.add(&rhs).expect("same shape").entries() {
            out.push(format!(
                "f∂ + ∂f has entry {} -> {}",
                self.source.generator(c).id,
                self.target.generator(r).id
            ));
        }
        out
    }

    pub fn ensure_chain_map(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::NotChainMap(p.join("; ")))
        }
    }

    /// Smallest slack that would make every entry admissible.
    pub fn actual_slack(&self) -> Rational {
        self.matrix
            .entries()
            .map(|(r, c)| self.target.generator(r).action - self.source.generator(c).action)
            .fold(Rational::from_integer(0), |a, b| a.max(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pair() -> GradedComplex {
        GradedComplex::from_pairs(
            vec![Generator::new("a", 1, int(2)), Generator::new("b", 0, int(1))],
            &[("a", "b")],
            None,
        )
        .unwrap()
    }

    #[test]
    fn valid_pair_has_empty_report() {
        assert!(pair().validate().is_empty());
    }

    #[test]
    fn grading_preserving_entry_is_named() {
        let c = GradedComplex::from_pairs(
            vec![Generator::new("a", 1, int(2)), Generator::new("b", 1, int(1))],
            &[("a", "b")],
            None,
        )
        .unwrap();
        let report = c.validate();
        assert_eq!(report.violations.len(), 1);
        let msg = report.violations[0].to_string();
        assert!(msg.contains("a -> b") && msg.contains("grading 1 to 1"), "{msg}");
    }

    #[test]
    fn action_increasing_entry_names_both_actions() {
        let c = GradedComplex::from_pairs(
            vec![Generator::new("a", 1, rat(1, 2)), Generator::new("b", 0, rat(3, 4))],
            &[("a", "b")],
            None,
        )
        .unwrap();
        let report = c.validate();
        assert_eq!(report.violations.len(), 1);
        let msg = report.violations[0].to_string();
        assert!(msg.contains("1/2") && msg.contains("3/4"), "{msg}");
        assert!(report.clone().algebraic().is_empty());
    }

    #[test]
    fn nonzero_square_is_reported() {
        let c = GradedComplex::from_pairs(
            vec![
                Generator::new("a", 2, int(3)),
                Generator::new("b", 1, int(2)),
                Generator::new("c", 0, int(1)),
            ],
            &[("a", "b"), ("b", "c")],
            None,
        )
        .unwrap();
        let report = c.validate();
        assert!(report
            .violations
            .contains(&Violation::DifferentialSquare { source: "a".into(), target: "c".into() }));
    }

    #[test]
    fn umap_must_commute() {
        let c = GradedComplex::from_pairs(
            vec![
                Generator::new("x", 3, int(4)),
                Generator::new("y", 2, int(3)),
                Generator::new("z", 1, int(2)),
                Generator::new("w", 0, int(1)),
            ],
            &[("x", "y"), ("z", "w")],
            Some(&[("x", "z")]),
        )
        .unwrap();
        let v = c.validate();
        assert!(
            v.violations
                .contains(&Violation::UmapNotChainMap { source: "x".into(), target: "w".into() }),
            "{v}"
        );
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let r = GradedComplex::new(
            vec![Generator::new("a", 0, int(0)), Generator::new("a", 0, int(1))],
            SparseF2Matrix::zeros(2, 2),
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn chain_map_problems_are_reported() {
        let c = pair();
        let bad = ChainMap::new(&c, &c, 0, SparseF2Matrix::from_entries(2, 2, [(0, 0)]).unwrap(), int(0)).unwrap();
        assert!(bad.ensure_chain_map().is_err());
        assert!(ChainMap::identity(&c).ensure_chain_map().is_ok());
    }
}
