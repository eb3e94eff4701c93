//! Spectral invariants `c_σ`, `c_k` and the connected-sum sweep.
//!
//! Homology bases are filtration compatible (see [`crate::homalg`]), so the
//! least threshold at which a class `σ` enters the image of the sublevel
//! homology is exactly the largest birth in its support. `c_k` minimizes
//! that over all `σ` with `U^k σ = [∅]`: with the basis sorted by birth,
//! this is the shortest prefix whose `U^k`-images span `[∅]`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::connect::{build_cone_complex, ConeData};
use crate::ech_core::FilteredTower;
use crate::error::{Error, Result};
use crate::homalg::{GradedComplex, HomologyResult, SparseF2Matrix};
use crate::par::Exec;
use crate::rational::{format, Rational};

/// `c_σ` for the class with basis coordinates `coords` in `H_g` of the base.
pub fn c_sigma(tower: &FilteredTower, g: i64, coords: &[usize]) -> Result<Rational> {
    let h = tower.base_homology();
    if coords.is_empty() {
        return Err(Error::ZeroClass);
    }
    if !h.exact_in(g) {
        return Err(Error::InsufficientDepth(format!("grading {g} is beyond the truncation")));
    }
    h.filtration_level(g, coords)
}

/// Grading and basis coordinates of the contact class `[∅]`.
pub fn empty_class(c: &GradedComplex, h: &HomologyResult) -> Result<(i64, Vec<usize>)> {
    let i = c
        .empty_set_index()
        .ok_or_else(|| Error::InvalidArgument("no unique generator of action 0 (the empty orbit set)".into()))?;
    let g = c.generator(i).grading;
    let coords = h.coordinates(g, &[i])?;
    if coords.is_empty() {
        return Err(Error::ZeroClass);
    }
    Ok((g, coords))
}

/// `U^k_*: H_{g+2k} → H_g` on the base homology.
fn u_power(h: &HomologyResult, g: i64, k: usize) -> Result<SparseF2Matrix> {
    let mut m = SparseF2Matrix::identity(h.dim(g));
    for step in 1..=k as i64 {
        let u = h.induced_u(g + 2 * step).ok_or(Error::MissingUmap("base complex"))?;
        m = m.mul(&u)?;
    }
    Ok(m)
}

fn in_span(columns: &[Vec<usize>], rows: usize, target: &[usize]) -> bool {
    let base = SparseF2Matrix::from_columns(rows, columns.to_vec());
    let mut with = columns.to_vec();
    with.push(target.to_vec());
    SparseF2Matrix::from_columns(rows, with).rank() == base.rank()
}

/// One `c_k` with the class realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectralValue {
    pub k: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub value: Rational,
    /// Generator ids of a cycle representing the minimizing class.
    pub witness: Vec<String>,
    /// Index of the first tower threshold above the value, if any.
    pub threshold_index: Option<usize>,
}

/// `c_k`: the least `c_σ` over classes with `U^k σ = [∅]`.
pub fn c_k(tower: &FilteredTower, k: usize) -> Result<Rational> {
    c_k_detailed(tower, k).map(|v| v.value)
}

pub fn c_k_detailed(tower: &FilteredTower, k: usize) -> Result<SpectralValue> {
    let base = tower.base();
    let h = tower.base_homology();
    let (g0, target) = empty_class(base, h)?;
    let g = g0 + 2 * k as i64;
    if !h.exact_in(g) {
        return Err(Error::InsufficientDepth(format!(
            "c_{k} needs grading {g}, the model is exact only below {}",
            h.complete_through().map_or("∞".to_string(), |t| t.to_string())
        )));
    }
    let m = u_power(h, g0, k)?;
    let births = h.births(g);
    for p in 1..=births.len() {
        if in_span(&m.columns()[..p], m.rows(), &target) {
            let coords = solve_prefix(&m, p, &target);
            let chain = h.chain_of(g, &coords);
            let value = births[p - 1];
            return Ok(SpectralValue {
                k,
                value,
                witness: chain.iter().map(|&i| base.generator(i).id.clone()).collect(),
                threshold_index: tower.thresholds().iter().position(|t| *t > value),
            });
        }
    }
    Err(Error::InsufficientDepth(format!("no class σ in grading {g} with U^{k} σ = [∅]")))
}

/// Some `x` supported on the first `p` columns of `m` with `m x = target`,
/// returned as sorted column indices. Assumes a solution exists.
fn solve_prefix(m: &SparseF2Matrix, p: usize, target: &[usize]) -> Vec<usize> {
    // Column reduction tracking combinations.
    let mut pivots: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new(); // (low, column, combo)
    for j in 0..p {
        let mut col = m.col(j).to_vec();
        let mut combo = vec![j];
        reduce(&mut col, &mut combo, &pivots);
        if let Some(&low) = col.last() {
            pivots.push((low, col, combo));
        }
    }
    let mut t = target.to_vec();
    let mut combo = Vec::new();
    reduce(&mut t, &mut combo, &pivots);
    debug_assert!(t.is_empty(), "target not in span");
    combo
}

fn reduce(col: &mut Vec<usize>, combo: &mut Vec<usize>, pivots: &[(usize, Vec<usize>, Vec<usize>)]) {
    use crate::homalg::matrix::xor_sorted;
    while let Some(&low) = col.last() {
        match pivots.iter().find(|(l, _, _)| *l == low) {
            Some((_, pc, pk)) => {
                *col = xor_sorted(col, pc);
                *combo = xor_sorted(combo, pk);
            }
            None => break,
        }
    }
}

/// `c_0, …, c_kmax` (cells past the truncation are `None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTable {
    pub entries: Vec<Option<SpectralValue>>,
}

impl SpectrumTable {
    pub fn get(&self, k: usize) -> Option<Rational> {
        self.entries.get(k).and_then(|e| e.as_ref().map(|v| v.value))
    }

    /// Defined values, in order, up to the first gap.
    pub fn values(&self) -> Vec<Rational> {
        self.entries.iter().map_while(|e| e.as_ref().map(|v| v.value)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,c_k,threshold_index,witness\n");
        for (k, e) in self.entries.iter().enumerate() {
            match e {
                Some(v) => {
                    let _ = writeln!(
                        out,
                        "{k},{},{},{}",
                        format(&v.value),
                        v.threshold_index.map_or(String::new(), |i| i.to_string()),
                        v.witness.join(" + ")
                    );
                }
                None => {
                    let _ = writeln!(out, "{k},insufficient-depth,,");
                }
            }
        }
        out
    }
}

pub fn spectrum_table(tower: &FilteredTower, kmax: usize) -> Result<SpectrumTable> {
    let mut entries = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        match c_k_detailed(tower, k) {
            Ok(v) => entries.push(Some(v)),
            Err(Error::InsufficientDepth(_)) => entries.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(SpectrumTable { entries })
}

/// A tower holding only the base complex: enough for `c_k`, which is read
/// off the filtration-compatible basis.
pub fn base_tower(c: GradedComplex) -> Result<FilteredTower> {
    FilteredTower::new(c, Vec::new())
}

/// `max { c_i(1) + c_j(2) : i + j = k }`.
pub fn max_convolution(s1: &SpectrumTable, s2: &SpectrumTable, k: usize) -> Result<Rational> {
    (0..=k)
        .map(|i| match (s1.get(i), s2.get(k - i)) {
            (Some(a), Some(b)) => Ok(a + b),
            _ => Err(Error::InsufficientDepth(format!("spectrum tables do not reach c_{i} + c_{}", k - i))),
        })
        .try_fold(None, |acc: Option<Rational>, x| {
            let x = x?;
            Ok(Some(acc.map_or(x, |a| a.max(x))))
        })
        .map(|m| m.expect("k + 1 ≥ 1 terms"))
}

/// One cell of the conjecture sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub eps: Rational,
    pub k: usize,
    pub c_k_cone: Option<Rational>,
    pub maxconv: Option<Rational>,
    pub diff: Option<Rational>,
    /// The cone values at the two smallest ε agree.
    pub converged: bool,
}

/// For each ε and `k ≤ kmax`: `c_k` of the connected-sum complex, the
/// max-convolution of the factors' spectra, and their difference. Cells
/// beyond the truncation are left empty rather than failing the sweep.
pub fn conjecture_sweep(c1: &GradedComplex, c2: &GradedComplex, kmax: usize, eps_list: &[Rational]) -> Result<Vec<SweepRow>> {
    conjecture_sweep_with(c1, c2, kmax, eps_list, Exec::default())
}

pub fn conjecture_sweep_with(
    c1: &GradedComplex,
    c2: &GradedComplex,
    kmax: usize,
    eps_list: &[Rational],
    exec: Exec,
) -> Result<Vec<SweepRow>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("need at least one ε".into()));
    }
    let s1 = spectrum_table(&base_tower(c1.clone())?, kmax)?;
    let s2 = spectrum_table(&base_tower(c2.clone())?, kmax)?;
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort();
    eps_sorted.dedup();

    let tables = exec
        .map(&eps_sorted, |&eps| -> Result<SpectrumTable> {
            let d = ConeData::new(c1.clone(), c2.clone(), eps, None)?;
            let cone = build_cone_complex(&d)?;
            spectrum_table(&base_tower(cone)?, kmax)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(eps_sorted.len() * (kmax + 1));
    for k in 0..=kmax {
        let maxconv = max_convolution(&s1, &s2, k).ok();
        let converged = match tables.as_slice() {
            [a, b, ..] => a.get(k).is_some() && a.get(k) == b.get(k),
            [a] => a.get(k).is_some(),
            [] => false,
        };
        for (eps, table) in eps_sorted.iter().zip(&tables) {
            let c = table.get(k);
            rows.push(SweepRow {
                eps: *eps,
                k,
                c_k_cone: c,
                maxconv,
                diff: c.zip(maxconv).map(|(a, b)| a - b),
                converged,
            });
        }
    }
    // Output order: by ε as given, then k.
    let order: Vec<Rational> = {
        let mut seen = Vec::new();
        for e in eps_list {
            if !seen.contains(e) {
                seen.push(*e);
            }
        }
        seen
    };
    rows.sort_by_key(|r| (order.iter().position(|e| *e == r.eps), r.k));
    Ok(rows)
}

/// CSV with columns `eps,k,c_k_cone,maxconv,diff,converged`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let cell = |x: &Option<Rational>| x.as_ref().map_or("insufficient-depth".to_string(), format);
    let mut out = String::from("eps,k,c_k_cone,maxconv,diff,converged\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format(&r.eps),
            r.k,
            cell(&r.c_k_cone),
            cell(&r.maxconv),
            cell(&r.diff),
            r.converged
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ellipsoid_with_count;
    use crate::rational::{int, rat};

    fn b() -> Rational {
        rat(141421, 100000)
    }

    #[test]
    fn ellipsoid_values() {
        let m = ellipsoid_with_count(int(1), b(), 8).unwrap();
        let tower = FilteredTower::at_action_gaps(m.complex.clone()).unwrap();
        assert_eq!(c_k(&tower, 0).unwrap(), int(0));
        assert_eq!(c_k(&tower, 1).unwrap(), int(1));
        assert_eq!(c_k(&tower, 2).unwrap(), b());
        assert_eq!(c_sigma(&tower, 2, &[0]).unwrap(), int(1));
        assert!(matches!(c_sigma(&tower, 2, &[]), Err(Error::ZeroClass)));
        assert!(matches!(c_k(&tower, 8), Err(Error::InsufficientDepth(_))));
    }

    #[test]
    fn max_convolution_small_cases() {
        let m = ellipsoid_with_count(int(1), b(), 6).unwrap();
        let t = spectrum_table(&base_tower(m.complex).unwrap(), 4).unwrap();
        assert_eq!(max_convolution(&t, &t, 0).unwrap(), int(0));
        assert_eq!(max_convolution(&t, &t, 1).unwrap(), int(1));
        assert!(max_convolution(&t, &t, 9).is_err());
    }

    #[test]
    fn sweep_marks_cells_past_the_truncation() {
        let c = ellipsoid_with_count(int(1), b(), 4).unwrap().complex;
        let rows = conjecture_sweep(&c, &c, 6, &[rat(1, 100), rat(1, 10000)]).unwrap();
        assert_eq!(rows.len(), 14);
        assert!(rows.iter().filter(|r| r.k == 0).all(|r| r.c_k_cone == Some(int(0)) && r.converged));
        assert!(rows.iter().any(|r| r.c_k_cone.is_none()));
        assert!(sweep_csv(&rows).contains("insufficient-depth"));
    }
}
