//! Homology by column reduction, one grading at a time.
//!
//! Generators of each grading are ordered by (action, id) and the boundary
//! columns reduced left to right, persistence style. Zero columns carry
//! their cycle (the accumulated column operations `V`); a zero column that
//! is not the pivot of any boundary one grading up is *essential* and gives
//! one homology basis element, born at the action of its generator. Because
//! every basis element is the leading term of its cycle, the image of the
//! sublevel set below `L` is spanned exactly by the essential classes born
//! below `L`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rational::Rational;

use super::complex::{ChainMap, GradedComplex};
use super::matrix::{xor_sorted, SparseF2Matrix};

#[derive(Debug, Clone, PartialEq, Eq)]
struct GradingData {
    /// Generator indices in (action, id) order.
    order: Vec<usize>,
    /// For each essential position, its cycle (sorted positions).
    essential: Vec<(usize, Vec<usize>)>,
    /// Reduced boundary columns of grading `g + 1` keyed by pivot position
    /// in this grading.
    killers: HashMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyResult {
    n_generators: usize,
    /// `(grading, position within grading)` for each generator.
    place: Vec<(i64, usize)>,
    grades: BTreeMap<i64, GradingData>,
    actions: Vec<Rational>,
    complete_through: Option<i64>,
    induced_u: Option<BTreeMap<i64, SparseF2Matrix>>,
}

struct Reduced {
    order: Vec<usize>,
    /// Per column: reduced boundary (positions in grading g − 1).
    r: Vec<Vec<usize>>,
    /// Per zero column: cycle as positions in this grading.
    v: Vec<Vec<usize>>,
}

fn sort_key(c: &GradedComplex, i: usize) -> (Rational, &str) {
    let g = c.generator(i);
    (g.action, g.id.as_str())
}

fn reduce_grading(c: &GradedComplex, order: Vec<usize>, place: &[(i64, usize)]) -> Reduced {
    let d = c.differential();
    let mut r: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    let mut v: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    let mut pivot: HashMap<usize, usize> = HashMap::new();
    for (j, &gi) in order.iter().enumerate() {
        let mut col: Vec<usize> = d.col(gi).iter().map(|&t| place[t].1).collect();
        col.sort_unstable();
        let mut vc = vec![j];
        while let Some(&low) = col.last() {
            match pivot.get(&low) {
                Some(&k) => {
                    col = xor_sorted(&col, &r[k]);
                    vc = xor_sorted(&vc, &v[k]);
                }
                None => {
                    pivot.insert(low, j);
                    break;
                }
            }
        }
        r.push(col);
        v.push(vc);
    }
    Reduced { order, r, v }
}

/// Homology of `c` with the default execution policy.
pub fn homology(c: &GradedComplex) -> Result<HomologyResult> {
    homology_with(c, Exec::default())
}

/// Homology of `c`. Only the algebraic invariants are required; a complex
/// whose differential fails to decrease action still has homology, but
/// births are then meaningless.
pub fn homology_with(c: &GradedComplex, exec: Exec) -> Result<HomologyResult> {
    c.ensure_algebraic()?;
    let mut by_grading: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in c.generators().iter().enumerate() {
        by_grading.entry(g.grading).or_default().push(i);
    }
    let mut place = vec![(0i64, 0usize); c.len()];
    let mut orders: Vec<(i64, Vec<usize>)> = Vec::with_capacity(by_grading.len());
    for (g, mut idx) in by_grading {
        idx.sort_by(|&a, &b| sort_key(c, a).cmp(&sort_key(c, b)));
        for (p, &i) in idx.iter().enumerate() {
            place[i] = (g, p);
        }
        orders.push((g, idx));
    }
    let reduced: Vec<(i64, Reduced)> = exec.map(&orders, |(g, order)| (*g, reduce_grading(c, order.clone(), &place)));
    let reduced: BTreeMap<i64, Reduced> = reduced.into_iter().collect();

    let mut grades = BTreeMap::new();
    for (&g, red) in &reduced {
        let mut killers: HashMap<usize, Vec<usize>> = HashMap::new();
        if let Some(up) = reduced.get(&(g + 1)) {
            for col in &up.r {
                if let Some(&low) = col.last() {
                    killers.insert(low, col.clone());
                }
            }
        }
        let essential = (0..red.order.len())
            .filter(|&j| red.r[j].is_empty() && !killers.contains_key(&j))
            .map(|j| (j, red.v[j].clone()))
            .collect();
        grades.insert(
            g,
            GradingData {
                order: red.order.clone(),
                essential,
                killers,
            },
        );
    }

    let mut result = HomologyResult {
        n_generators: c.len(),
        place,
        grades,
        actions: c.generators().iter().map(|g| g.action).collect(),
        complete_through: c.complete_through(),
        induced_u: None,
    };
    if let Some(u) = c.umap() {
        let gradings: Vec<i64> = result.grades.keys().copied().collect();
        let maps = exec.map(&gradings, |&g| result.map_basis(g, g - 2, |z| u.apply(z)).map(|m| (g, m)));
        result.induced_u = Some(maps.into_iter().collect::<Result<_>>()?);
    }
    Ok(result)
}

impl HomologyResult {
    pub fn n_generators(&self) -> usize {
        self.n_generators
    }

    pub fn complete_through(&self) -> Option<i64> {
        self.complete_through
    }

    /// Whether `H_g` agrees with the homology of the modelled complex.
    pub fn exact_in(&self, g: i64) -> bool {
        self.complete_through.is_none_or(|top| g < top)
    }

    pub fn dim(&self, g: i64) -> usize {
        self.grades.get(&g).map_or(0, |d| d.essential.len())
    }

    /// Dimensions of every grading that carries generators.
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.grades.iter().map(|(&g, d)| (g, d.essential.len())).collect()
    }

    /// Nonzero dimensions only.
    pub fn nonzero_dims(&self) -> BTreeMap<i64, usize> {
        self.dims().into_iter().filter(|&(_, d)| d > 0).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.grades.values().map(|d| d.essential.len()).sum()
    }

    /// Gradings that carry generators, ascending.
    pub fn gradings(&self) -> Vec<i64> {
        self.grades.keys().copied().collect()
    }

    /// Cycle representatives of the basis of `H_g`, each a sorted list of
    /// generator indices.
    pub fn representatives(&self, g: i64) -> Vec<Vec<usize>> {
        let Some(d) = self.grades.get(&g) else {
            return Vec::new();
        };
        d.essential
            .iter()
            .map(|(_, cyc)| {
                let mut v: Vec<usize> = cyc.iter().map(|&p| d.order[p]).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// The generator whose action is the birth of each basis element.
    pub fn leading_generators(&self, g: i64) -> Vec<usize> {
        self.grades
            .get(&g)
            .map(|d| d.essential.iter().map(|(p, _)| d.order[*p]).collect())
            .unwrap_or_default()
    }

    /// Birth actions of the basis of `H_g`, non-decreasing.
    pub fn births(&self, g: i64) -> Vec<Rational> {
        self.leading_generators(g).into_iter().map(|i| self.actions[i]).collect()
    }

    /// Least threshold `L` at which the class with the given basis
    /// coordinates lies in the image of the sublevel set, i.e. the maximal
    /// birth over its support.
    pub fn filtration_level(&self, g: i64, coords: &[usize]) -> Result<Rational> {
        let births = self.births(g);
        if coords.is_empty() {
            return Err(Error::ZeroClass);
        }
        coords
            .iter()
            .map(|&k| {
                births
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("basis index {k} out of range in grading {g}")))
            })
            .try_fold(Rational::from_integer(0), |acc, b| Ok(acc.max(b?)))
    }

    /// Coordinates of the homology class of `chain` (generator indices, all
    /// of grading `g`) in the basis of `H_g`.
    pub fn coordinates(&self, g: i64, chain: &[usize]) -> Result<Vec<usize>> {
        let mut positions = Vec::with_capacity(chain.len());
        for &i in chain {
            let &(gi, p) = self
                .place
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("generator index {i} out of range")))?;
            if gi != g {
                return Err(Error::InvalidArgument(format!(
                    "generator {i} has grading {gi}, expected {g}"
                )));
            }
            positions.push(p);
        }
        self.coordinates_of_positions(g, super::matrix::reduce_mod2(positions))
    }

    fn coordinates_of_positions(&self, g: i64, mut z: Vec<usize>) -> Result<Vec<usize>> {
        if z.is_empty() {
            return Ok(Vec::new());
        }
        let d = self
            .grades
            .get(&g)
            .ok_or_else(|| Error::NotACycle(format!("no generators in grading {g}")))?;
        let ess_index: HashMap<usize, usize> = d.essential.iter().enumerate().map(|(k, (p, _))| (*p, k)).collect();
        let mut coords = Vec::new();
        while let Some(&low) = z.last() {
            if let Some(col) = d.killers.get(&low) {
                z = xor_sorted(&z, col);
            } else if let Some(&k) = ess_index.get(&low) {
                z = xor_sorted(&z, &d.essential[k].1);
                coords.push(k);
            } else {
                return Err(Error::NotACycle(format!(
                    "chain in grading {g} has nonzero boundary (generator {})",
                    d.order[low]
                )));
            }
        }
        coords.sort_unstable();
        Ok(coords)
    }

    /// Whether the chain is a boundary.
    pub fn is_boundary(&self, g: i64, chain: &[usize]) -> Result<bool> {
        Ok(self.coordinates(g, chain)?.is_empty())
    }

    /// A chain representing the class with the given coordinates.
    pub fn chain_of(&self, g: i64, coords: &[usize]) -> Vec<usize> {
        let reps = self.representatives(g);
        let mut acc = Vec::new();
        for &k in coords {
            acc.extend_from_slice(&reps[k]);
        }
        super::matrix::reduce_mod2(acc)
    }

    /// Matrix `H_g → H_target` of a chain-level map given on representatives.
    fn map_basis<F>(&self, g: i64, target: i64, f: F) -> Result<SparseF2Matrix>
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        self.map_basis_into(self, g, target, f)
    }

    fn map_basis_into<F>(&self, tgt: &HomologyResult, g: i64, target: i64, f: F) -> Result<SparseF2Matrix>
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        let cols = self
            .representatives(g)
            .iter()
            .map(|z| tgt.coordinates(target, &f(z)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseF2Matrix::from_columns(tgt.dim(target), cols))
    }

    /// Induced U-map `H_g → H_{g−2}`, if the complex carried one.
    pub fn induced_u(&self, g: i64) -> Option<SparseF2Matrix> {
        let maps = self.induced_u.as_ref()?;
        Some(
            maps.get(&g)
                .cloned()
                .unwrap_or_else(|| SparseF2Matrix::zeros(self.dim(g - 2), self.dim(g))),
        )
    }

    pub fn has_u(&self) -> bool {
        self.induced_u.is_some()
    }

    /// Ranks of the induced U-map per source grading.
    pub fn u_ranks(&self) -> Option<BTreeMap<i64, usize>> {
        let maps = self.induced_u.as_ref()?;
        Some(maps.iter().map(|(&g, m)| (g, m.rank())).collect())
    }
}

/// Matrices of the map induced by `f` on homology, keyed by source grading:
/// each sends `H_g(source)` to `H_{g+degree}(target)`.
pub fn induced_map(
    f: &ChainMap<'_>,
    hsrc: &HomologyResult,
    htgt: &HomologyResult,
) -> Result<BTreeMap<i64, SparseF2Matrix>> {
    if hsrc.n_generators != f.source.len() || htgt.n_generators != f.target.len() {
        return Err(Error::Shape("homology results do not match the map".into()));
    }
    f.ensure_chain_map()?;
    hsrc.gradings()
        .into_iter()
        .map(|g| Ok((g, hsrc.map_basis_into(htgt, g, g + f.degree, |z| f.matrix.apply(z))?)))
        .collect()
}

/// The single grading-`g` block of [`induced_map`].
pub fn induced_map_in(
    f: &ChainMap<'_>,
    hsrc: &HomologyResult,
    htgt: &HomologyResult,
    g: i64,
) -> Result<SparseF2Matrix> {
    if hsrc.n_generators != f.source.len() || htgt.n_generators != f.target.len() {
        return Err(Error::Shape("homology results do not match the map".into()));
    }
    f.ensure_chain_map()?;
    hsrc.map_basis_into(htgt, g, g + f.degree, |z| f.matrix.apply(z))
}
