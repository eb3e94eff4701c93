use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::homalg::{homology_with, induced_map_in, ChainMap, GradedComplex, HomologyResult, SparseF2Matrix};
use crate::par::Exec;
use crate::rational::{format, Rational};

/// The subcomplex of generators with action below `l`.
///
/// Requires a genuinely filtered complex; closure under ∂ and U then
/// follows from strict action decrease and is re-checked anyway.
pub fn truncate(c: &GradedComplex, l: Rational) -> Result<GradedComplex> {
    c.ensure_valid()?;
    if let Some(g) = c.generators().iter().find(|g| g.action == l) {
        return Err(Error::LDegenerate { id: g.id.clone(), threshold: l });
    }
    let (sub, kept) = c.restrict(|g| g.action < l);
    let mut keep = vec![false; c.len()];
    for &i in &kept {
        keep[i] = true;
    }
    for (r, col) in c.differential().entries() {
        debug_assert!(!keep[col] || keep[r], "truncation is not closed");
        if keep[col] && !keep[r] {
            return Err(Error::Shape("truncation is not a subcomplex".into()));
        }
    }
    let removed_min = c
        .generators()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| !k)
        .map(|(g, _)| g.grading)
        .min();
    let complete = match (sub.complete_through(), removed_min) {
        (Some(a), Some(b)) => Some(a.min(b - 1)),
        (a, b) => a.or(b.map(|b| b - 1)),
    };
    Ok(sub.with_complete_through(complete))
}

/// Generator-wise inclusion of one truncation into a larger one.
pub fn inclusion<'a>(small: &'a GradedComplex, large: &'a GradedComplex) -> Result<ChainMap<'a>> {
    let index = large.id_index();
    let mut entries = Vec::with_capacity(small.len());
    for (j, g) in small.generators().iter().enumerate() {
        let &i = index
            .get(g.id.as_str())
            .ok_or_else(|| Error::MismatchedBase(format!("generator {} missing from the larger complex", g.id)))?;
        let h = large.generator(i);
        if h.grading != g.grading || h.action != g.action || h.class != g.class {
            return Err(Error::MismatchedBase(format!("generator {} differs between the complexes", g.id)));
        }
        entries.push((i, j));
    }
    let m = SparseF2Matrix::from_entries(large.len(), small.len(), entries)?;
    let f = ChainMap::new(small, large, 0, m, Rational::from_integer(0))?;
    f.ensure_chain_map().map_err(|e| Error::MismatchedBase(e.to_string()))?;
    Ok(f)
}

/// Result of [`FilteredTower::stabilization_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stabilization {
    /// Every inclusion from this level on is an isomorphism.
    At { index: usize, threshold: Rational },
    NotStabilized,
}

/// Truncations of a base complex at increasing thresholds, followed by the
/// base itself as the final level.
#[derive(Debug, Clone)]
pub struct FilteredTower {
    base: GradedComplex,
    thresholds: Vec<Rational>,
    levels: Vec<GradedComplex>,
    homologies: Vec<HomologyResult>,
}

impl FilteredTower {
    pub fn new(base: GradedComplex, thresholds: Vec<Rational>) -> Result<Self> {
        Self::new_with(base, thresholds, Exec::default())
    }

    pub fn new_with(base: GradedComplex, thresholds: Vec<Rational>, exec: Exec) -> Result<Self> {
        base.ensure_valid()?;
        if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "thresholds must increase strictly ({} then {})",
                format(&w[0]),
                format(&w[1])
            )));
        }
        let levels = exec
            .map(&thresholds, |&l| truncate(&base, l))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let mut homologies = exec
            .map(&levels, |c| homology_with(c, Exec::Sequential))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        homologies.push(homology_with(&base, exec)?);
        Ok(Self {
            base,
            thresholds,
            levels,
            homologies,
        })
    }

    /// Thresholds strictly between consecutive distinct generator actions,
    /// plus one above the top: each filtration jump gets its own level.
    pub fn at_action_gaps(base: GradedComplex) -> Result<Self> {
        let thresholds = action_gap_thresholds(&base);
        Self::new(base, thresholds)
    }

    pub fn base(&self) -> &GradedComplex {
        &self.base
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    /// Number of levels including the base.
    pub fn len(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Level `i`; index `thresholds().len()` is the base.
    pub fn level(&self, i: usize) -> &GradedComplex {
        self.levels.get(i).unwrap_or(&self.base)
    }

    pub fn homology(&self, i: usize) -> &HomologyResult {
        &self.homologies[i]
    }

    pub fn base_homology(&self) -> &HomologyResult {
        self.homologies.last().expect("base homology is always present")
    }

    /// Matrix of the inclusion-induced map `H_g(level i) → H_g(level j)`.
    pub fn induced_inclusion(&self, i: usize, j: usize, g: i64) -> Result<SparseF2Matrix> {
        if i > j || j >= self.len() {
            return Err(Error::InvalidArgument(format!("no inclusion from level {i} to level {j}")));
        }
        let f = inclusion(self.level(i), self.level(j))?;
        induced_map_in(&f, &self.homologies[i], &self.homologies[j], g)
    }

    /// Whether the base class with coordinates `coords` in `H_g` lies in the
    /// image of `H_g(level i)`.
    pub fn in_image(&self, i: usize, g: i64, coords: &[usize]) -> Result<bool> {
        let m = self.induced_inclusion(i, self.len() - 1, g)?;
        let r = m.rank();
        let mut cols = m.columns().to_vec();
        cols.push(coords.to_vec());
        Ok(SparseF2Matrix::from_columns(m.rows(), cols).rank() == r)
    }

    /// Smallest level from which every consecutive inclusion (ending with
    /// the base) induces an isomorphism on `H_g`.
    pub fn stabilization_profile(&self, g: i64) -> Result<Stabilization> {
        let n = self.len();
        let mut first = n - 1;
        for i in (0..n - 1).rev() {
            let m = self.induced_inclusion(i, i + 1, g)?;
            if !m.is_invertible() {
                break;
            }
            first = i;
        }
        if first == n - 1 {
            return Ok(Stabilization::NotStabilized);
        }
        Ok(Stabilization::At {
            index: first,
            threshold: self.thresholds[first],
        })
    }

    /// Stabilization profiles of every grading carrying generators.
    pub fn stabilization_profiles(&self) -> Result<BTreeMap<i64, Stabilization>> {
        self.base
            .gradings()
            .into_iter()
            .map(|g| Ok((g, self.stabilization_profile(g)?)))
            .collect()
    }
}

/// Midpoints between consecutive distinct actions and one unit above the
/// largest.
pub fn action_gap_thresholds(c: &GradedComplex) -> Vec<Rational> {
    let mut actions: Vec<Rational> = c.generators().iter().map(|g| g.action).collect();
    actions.sort();
    actions.dedup();
    let two = Rational::from_integer(2);
    let mut out: Vec<Rational> = actions.windows(2).map(|w| (w[0] + w[1]) / two).collect();
    if let Some(top) = actions.last() {
        out.push(*top + Rational::from_integer(1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::Generator;
    use crate::rational::{int, rat};

    fn staircase() -> GradedComplex {
        GradedComplex::from_pairs(
            vec![
                Generator::new("∅", 0, int(0)),
                Generator::new("x", 1, int(2)),
                Generator::new("y", 0, int(1)),
                Generator::new("z", 2, int(3)),
            ],
            &[("x", "y")],
            None,
        )
        .unwrap()
    }

    #[test]
    fn truncation_above_everything_is_identity() {
        let c = staircase();
        let t = truncate(&c, int(10)).unwrap();
        assert_eq!(t.generators(), c.generators());
        assert_eq!(t.complete_through(), None);
    }

    #[test]
    fn truncation_just_above_zero() {
        let t = truncate(&staircase(), rat(1, 100)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.generator(0).id, "∅");
        assert_eq!(t.complete_through(), Some(-1));
    }

    #[test]
    fn tie_is_rejected() {
        assert!(matches!(truncate(&staircase(), int(2)), Err(Error::LDegenerate { .. })));
    }

    #[test]
    fn acyclic_pair_stabilizes_once_both_enter() {
        let tower = FilteredTower::new(staircase(), vec![rat(1, 2), rat(3, 2), rat(5, 2), int(4)]).unwrap();
        // y alone (level 1) has H_0 of dim 2; x kills it at level 2.
        assert_eq!(
            tower.stabilization_profile(0).unwrap(),
            Stabilization::At { index: 2, threshold: rat(5, 2) }
        );
        assert_eq!(
            tower.stabilization_profile(2).unwrap(),
            Stabilization::At { index: 3, threshold: int(4) }
        );
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let a = staircase();
        let b = GradedComplex::from_pairs(vec![Generator::new("∅", 0, int(1))], &[], None).unwrap();
        assert!(matches!(inclusion(&a, &b), Err(Error::MismatchedBase(_))));
    }
}
