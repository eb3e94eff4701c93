//! The connected-sum complex: `C_o ⊕ C_h` over the tensor product of two
//! models, where `C_h` is `C_o` with the special hyperbolic orbit `h`
//! appended (grading +1, action +ε).
//!
//! Block differential
//!
//! ```text
//! ∂_# = [ ∂_oo   0   ]      ∂_oo = ∂₁⊗id + id⊗∂₂
//!       [ ∂_ho  ∂_hh ]      ∂_hh = h ∂_oo h⁻¹
//!                           ∂_ho = h (φ + ∂K + K∂),  φ = U₁⊗id + id⊗U₂
//! ```
//!
//! and `F = [[id, 0], [hK, h]]` is a chain isomorphism from `Cone(φ)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ech_core::{truncate, ClassLabel};
use crate::error::{Error, Result};
use crate::homalg::{
    derived_tensor, h_id, homology, induced_map, mapping_cone_shifted, tensor, tensor_left_u, tensor_u_sum,
    ChainMap, GradedComplex, Generator, HomologyResult, SparseF2Matrix,
};
use crate::rational::{format, Rational};

/// Inputs of the connected-sum construction.
#[derive(Debug, Clone)]
pub struct ConeData {
    pub c1: GradedComplex,
    pub c2: GradedComplex,
    /// `𝒜(h)`.
    pub eps: Rational,
    /// Homotopy term on `C_o`; zero when absent.
    pub k_map: Option<SparseF2Matrix>,
    tensor: GradedComplex,
}

/// Default handle action: the smallest positive tensor action over 10⁶.
pub fn default_eps(c1: &GradedComplex, c2: &GradedComplex) -> Result<Rational> {
    let a0 = min_positive_tensor_action(c1, c2)
        .ok_or_else(|| Error::InvalidArgument("the tensor product has no generator of positive action".into()))?;
    Ok(a0 / Rational::from_integer(1_000_000))
}

/// Smallest positive `𝒜(a) + 𝒜(b)` over generator pairs.
pub fn min_positive_tensor_action(c1: &GradedComplex, c2: &GradedComplex) -> Option<Rational> {
    let zero = Rational::from_integer(0);
    let mut best: Option<Rational> = None;
    for a in c1.generators() {
        for b in c2.generators() {
            let s = a.action + b.action;
            if s > zero && best.is_none_or(|x| s < x) {
                best = Some(s);
            }
        }
    }
    best
}

impl ConeData {
    pub fn new(c1: GradedComplex, c2: GradedComplex, eps: Rational, k_map: Option<SparseF2Matrix>) -> Result<Self> {
        c1.umap().ok_or(Error::MissingUmap("first summand"))?;
        c2.umap().ok_or(Error::MissingUmap("second summand"))?;
        c1.ensure_valid()?;
        c2.ensure_valid()?;
        if eps <= Rational::from_integer(0) {
            return Err(Error::EpsTooLarge(format!("𝒜(h) = {} must be positive", format(&eps))));
        }
        if let Some(a0) = min_positive_tensor_action(&c1, &c2) {
            if eps >= a0 {
                return Err(Error::EpsTooLarge(format!(
                    "𝒜(h) = {} is not below the smallest positive action {}",
                    format(&eps),
                    format(&a0)
                )));
            }
        }
        let tensor = tensor(&c1, &c2)?;
        if let Some(k) = &k_map {
            check_homotopy(&tensor, k)?;
        }
        Ok(Self {
            c1,
            c2,
            eps,
            k_map,
            tensor,
        })
    }

    /// `ConeData` with the default ε and `K = 0`.
    pub fn with_defaults(c1: GradedComplex, c2: GradedComplex) -> Result<Self> {
        c1.umap().ok_or(Error::MissingUmap("first summand"))?;
        c2.umap().ok_or(Error::MissingUmap("second summand"))?;
        let eps = default_eps(&c1, &c2)?;
        Self::new(c1, c2, eps, None)
    }

    /// `C_o = c1 ⊗ c2`.
    pub fn tensor(&self) -> &GradedComplex {
        &self.tensor
    }

    pub fn k(&self) -> SparseF2Matrix {
        self.k_map
            .clone()
            .unwrap_or_else(|| SparseF2Matrix::zeros(self.tensor.len(), self.tensor.len()))
    }

    /// `U₁ ⊗ id + id ⊗ U₂`.
    pub fn phi(&self) -> SparseF2Matrix {
        tensor_u_sum(&self.c1, &self.c2).expect("checked on construction")
    }
}

fn check_homotopy(t: &GradedComplex, k: &SparseF2Matrix) -> Result<()> {
    if k.rows() != t.len() || k.cols() != t.len() {
        return Err(Error::InvalidHomotopy(format!(
            "K is {}x{}, C_o has {} generators",
            k.rows(),
            k.cols(),
            t.len()
        )));
    }
    for (r, c) in k.entries() {
        let (s, g) = (t.generator(c), t.generator(r));
        if g.grading != s.grading - 1 {
            return Err(Error::InvalidHomotopy(format!("entry {} -> {} is not of degree −1", s.id, g.id)));
        }
        if g.action >= s.action {
            return Err(Error::InvalidHomotopy(format!(
                "entry {} -> {} does not decrease action ({} -> {})",
                s.id,
                g.id,
                format(&s.action),
                format(&g.action)
            )));
        }
        if g.class != s.class {
            return Err(Error::InvalidHomotopy(format!("entry {} -> {} changes the class", s.id, g.id)));
        }
    }
    Ok(())
}

/// A random admissible `K` on `t`: degree −1, action-decreasing,
/// class-preserving.
pub fn random_homotopy(t: &GradedComplex, seed: u64, density: f64) -> SparseF2Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = t.len();
    let cols = (0..n)
        .map(|j| {
            let s = t.generator(j);
            (0..n)
                .filter(|&i| {
                    let g = t.generator(i);
                    g.grading == s.grading - 1 && g.action < s.action && g.class == s.class
                })
                .filter(|_| rng.gen_bool(density))
                .collect()
        })
        .collect();
    SparseF2Matrix::from_columns(n, cols)
}

/// The four blocks of `∂_#`, each indexed by `C_o` generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDifferential {
    pub d_oo: SparseF2Matrix,
    pub d_oh: SparseF2Matrix,
    pub d_ho: SparseF2Matrix,
    pub d_hh: SparseF2Matrix,
}

impl BlockDifferential {
    pub fn new(d: &ConeData) -> Self {
        let t = d.tensor();
        let n = t.len();
        let dd = t.differential();
        let k = d.k();
        let d_ho = d
            .phi()
            .add(&dd.mul(&k).expect("square"))
            .and_then(|m| m.add(&k.mul(dd).expect("square")))
            .expect("same shape");
        Self {
            d_oo: dd.clone(),
            d_oh: SparseF2Matrix::zeros(n, n),
            d_ho,
            d_hh: dd.clone(),
        }
    }

    /// `[[A, B], [C, D]]` as one matrix on `C_o ⊕ C_h`.
    pub fn assemble(a: &SparseF2Matrix, b: &SparseF2Matrix, c: &SparseF2Matrix, d: &SparseF2Matrix) -> SparseF2Matrix {
        let n = a.cols();
        let mut cols = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut col = a.col(j).to_vec();
            col.extend(c.col(j).iter().map(|&r| r + n));
            cols.push(col);
        }
        for j in 0..n {
            let mut col = b.col(j).to_vec();
            col.extend(d.col(j).iter().map(|&r| r + n));
            cols.push(col);
        }
        SparseF2Matrix::from_columns(2 * n, cols)
    }

    pub fn total(&self) -> SparseF2Matrix {
        Self::assemble(&self.d_oo, &self.d_oh, &self.d_ho, &self.d_hh)
    }

    /// Supports of the four blocks as `[source, target]` id pairs, with h
    /// appended on the `C_h` side.
    pub fn sidecar(&self, t: &GradedComplex) -> BlockSidecar {
        let ids = |m: &SparseF2Matrix, src_h: bool, tgt_h: bool| -> Vec<[String; 2]> {
            m.entries()
                .map(|(r, c)| {
                    let s = &t.generator(c).id;
                    let g = &t.generator(r).id;
                    [
                        if src_h { h_id(s) } else { s.clone() },
                        if tgt_h { h_id(g) } else { g.clone() },
                    ]
                })
                .collect()
        };
        BlockSidecar {
            d_oo: ids(&self.d_oo, false, false),
            d_oh: ids(&self.d_oh, true, false),
            d_ho: ids(&self.d_ho, false, true),
            d_hh: ids(&self.d_hh, true, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSidecar {
    pub d_oo: Vec<[String; 2]>,
    pub d_oh: Vec<[String; 2]>,
    pub d_ho: Vec<[String; 2]>,
    pub d_hh: Vec<[String; 2]>,
}

fn cone_generators(t: &GradedComplex, eps: Rational) -> Vec<Generator> {
    let mut gens: Vec<Generator> = t.generators().to_vec();
    gens.extend(t.generators().iter().map(|g| Generator {
        id: h_id(&g.id),
        grading: g.grading + 1,
        action: g.action + eps,
        class: g.class.clone(),
    }));
    gens
}

/// `U_# = F · diag(U₁⊗id) · F⁻¹ = [[U, 0], [h(KU + UK), hUh⁻¹]]`.
fn cone_umap(d: &ConeData) -> Result<SparseF2Matrix> {
    let u = tensor_left_u(&d.c1, &d.c2)?;
    let k = d.k();
    let lower = k.mul(&u)?.add(&u.mul(&k)?)?;
    let n = u.cols();
    Ok(BlockDifferential::assemble(&u, &SparseF2Matrix::zeros(n, n), &lower, &u))
}

/// The connected-sum complex with its U-map.
pub fn build_cone_complex(d: &ConeData) -> Result<GradedComplex> {
    let t = d.tensor();
    let blocks = BlockDifferential::new(d);
    let gens = cone_generators(t, d.eps);
    let umap = cone_umap(d)?;
    let cone = GradedComplex::new(gens, blocks.total(), Some(umap))?.with_complete_through(t.complete_through());
    let report = cone.validate();
    if !report.is_empty() {
        // The only way valid inputs can fail is an entry whose action drop
        // is swallowed by ε.
        let msg = report
            .violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        if report.violations.iter().all(|v| !v.is_algebraic()) {
            return Err(Error::EpsTooLarge(msg));
        }
        return Err(Error::Invalid(report));
    }
    Ok(cone)
}

/// `Cone^L`: o-part below `L`, h-part with o-action below `L − ε`.
pub fn filtered_cone(d: &ConeData, l: Rational) -> Result<GradedComplex> {
    truncate(&build_cone_complex(d)?, l)
}

/// Derived tensor product of the two models.
pub fn connected_sum_homology(c1: &GradedComplex, c2: &GradedComplex) -> Result<HomologyResult> {
    derived_tensor(c1, c2)
}

/// One of the four block identities behind `F ∂_cone = ∂_# F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// `(row, col)` entries where the two sides differ.
    pub failures: Vec<(usize, usize)>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The chain equivalence `F: Cone(φ) → C_#` and its verification.
#[derive(Debug, Clone)]
pub struct ChainEquivalence {
    /// `Cone(φ)` with the target copy raised by ε.
    pub source: GradedComplex,
    pub target: GradedComplex,
    pub f: SparseF2Matrix,
    pub identities: Vec<IdentityCheck>,
    pub eps: Rational,
}

impl ChainEquivalence {
    pub fn identities_hold(&self) -> bool {
        self.identities.iter().all(IdentityCheck::holds)
    }

    pub fn chain_map(&self) -> Result<ChainMap<'_>> {
        ChainMap::new(&self.source, &self.target, 0, self.f.clone(), self.eps)
    }

    /// Fails with a report naming every broken identity.
    pub fn ensure(&self) -> Result<()> {
        let broken: Vec<String> = self
            .identities
            .iter()
            .filter(|c| !c.holds())
            .map(|c| format!("{} ({} entries)", c.name, c.failures.len()))
            .collect();
        if broken.is_empty() {
            Ok(())
        } else {
            Err(Error::NotChainMap(broken.join("; ")))
        }
    }

    /// Whether `F_*` is an isomorphism in every grading.
    pub fn induces_isomorphism(&self) -> Result<bool> {
        let hs = homology(&self.source)?;
        let ht = homology(&self.target)?;
        if hs.dims() != ht.dims() {
            return Ok(false);
        }
        let f = self.chain_map()?;
        Ok(induced_map(&f, &hs, &ht)?.values().all(|m| m.is_invertible()))
    }
}

fn diff_entries(a: &SparseF2Matrix, b: &SparseF2Matrix) -> Vec<(usize, usize)> {
    a.add(b).expect("same shape").entries().collect()
}

/// Builds `F = [[id, 0], [hK, h]]` and checks, block by block,
///
/// - oo: `∂_oo + ∂_oh hK = ∂₁⊗id + id⊗∂₂`
/// - oh: `∂_oh h = 0`
/// - ho: `hK∂ + hφ = ∂_ho + ∂_hh hK`
/// - hh: `h ∂_oo = ∂_hh h`
pub fn chain_equivalence(d: &ConeData) -> Result<ChainEquivalence> {
    let blocks = BlockDifferential::new(d);
    chain_equivalence_for(d, &blocks)
}

/// As [`chain_equivalence`], against arbitrary blocks.
pub fn chain_equivalence_for(d: &ConeData, blocks: &BlockDifferential) -> Result<ChainEquivalence> {
    let t = d.tensor();
    let n = t.len();
    let k = d.k();
    let phi = d.phi();
    let dt = t.differential();
    let id = SparseF2Matrix::identity(n);
    let checks = vec![
        IdentityCheck {
            name: "oo: ∂_oo + ∂_oh·hK = ∂₁⊗id + id⊗∂₂",
            failures: diff_entries(&blocks.d_oo.add(&blocks.d_oh.mul(&k)?)?, dt),
        },
        IdentityCheck {
            name: "oh: ∂_oh·h = 0",
            failures: blocks.d_oh.entries().collect(),
        },
        IdentityCheck {
            name: "ho: hK∂ + hφ = ∂_ho + ∂_hh·hK",
            failures: diff_entries(&k.mul(dt)?.add(&phi)?, &blocks.d_ho.add(&blocks.d_hh.mul(&k)?)?),
        },
        IdentityCheck {
            name: "hh: h∂_oo = ∂_hh·h",
            failures: diff_entries(&blocks.d_oo, &blocks.d_hh),
        },
    ];
    let f = BlockDifferential::assemble(&id, &SparseF2Matrix::zeros(n, n), &k, &id);
    let phi_map = ChainMap::new(t, t, -2, phi, Rational::from_integer(0))?;
    let source = mapping_cone_shifted(&phi_map, d.eps)?;
    let gens = cone_generators(t, d.eps);
    let target = GradedComplex::new(gens, blocks.total(), None)?.with_complete_through(t.complete_through());
    Ok(ChainEquivalence {
        source,
        target,
        f,
        identities: checks,
        eps: d.eps,
    })
}

/// Per-grading verdict of the Theorem 1.1 comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub grading: i64,
    pub cone: usize,
    pub derived: usize,
    pub verdict: Verdict,
}

/// Graded dims of the cone complex beside those of the derived tensor
/// product; gradings beyond the completeness bound are excluded.
pub fn compare_with_derived(d: &ConeData) -> Result<Vec<ComparisonRow>> {
    let cone = build_cone_complex(d)?;
    let hc = homology(&cone)?;
    let hd = connected_sum_homology(&d.c1, &d.c2)?;
    let mut gradings: Vec<i64> = hc.gradings();
    gradings.extend(hd.gradings());
    gradings.sort_unstable();
    gradings.dedup();
    Ok(gradings
        .into_iter()
        .map(|g| {
            let (a, b) = (hc.dim(g), hd.dim(g));
            let verdict = if !hc.exact_in(g) || !hd.exact_in(g) {
                Verdict::Excluded
            } else if a == b {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            ComparisonRow {
                grading: g,
                cone: a,
                derived: b,
                verdict,
            }
        })
        .collect())
}

/// Class bookkeeping of the cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    /// Cone generators whose label is not the sum of their factors' labels.
    pub leaks: Vec<String>,
    /// Graded homology dims of each class summand.
    pub summands: BTreeMap<ClassLabel, BTreeMap<i64, usize>>,
    /// Graded dims of the whole cone.
    pub total: BTreeMap<i64, usize>,
    /// Generators in class `Γ₁ + Γ₂`.
    pub target_generators: Vec<String>,
}

impl ClassReport {
    /// No leaks and the summand dims add up to the total.
    pub fn ok(&self) -> bool {
        let mut sum: BTreeMap<i64, usize> = BTreeMap::new();
        for dims in self.summands.values() {
            for (&g, &k) in dims {
                *sum.entry(g).or_default() += k;
            }
        }
        sum.retain(|_, k| *k > 0);
        let total: BTreeMap<i64, usize> = self.total.iter().filter(|(_, &k)| k > 0).map(|(&g, &k)| (g, k)).collect();
        self.leaks.is_empty() && sum == total
    }
}

/// Checks that every cone generator carries the sum of its factors' labels
/// (h contributes zero) and that homology splits over class summands.
pub fn class_decomposition_check(
    d: &ConeData,
    cone: &GradedComplex,
    gamma1: &ClassLabel,
    gamma2: &ClassLabel,
) -> Result<ClassReport> {
    let n2 = d.c2.len();
    let n = d.tensor().len();
    if cone.len() != 2 * n {
        return Err(Error::Shape("cone does not match the cone data".into()));
    }
    let target = gamma1.checked_add(gamma2)?;
    let mut leaks = Vec::new();
    let mut target_generators = Vec::new();
    for (idx, g) in cone.generators().iter().enumerate() {
        let o = idx % n;
        let expected = d.c1.generator(o / n2).class.checked_add(&d.c2.generator(o % n2).class)?;
        if g.class != expected {
            leaks.push(g.id.clone());
        }
        if g.class == target {
            target_generators.push(g.id.clone());
        }
    }
    let mut classes: Vec<ClassLabel> = cone.generators().iter().map(|g| g.class.clone()).collect();
    classes.sort();
    classes.dedup();
    let mut summands = BTreeMap::new();
    for class in classes {
        let (sub, _) = cone.restrict(|g| g.class == class);
        summands.insert(class, homology(&sub)?.dims());
    }
    Ok(ClassReport {
        leaks,
        summands,
        total: homology(cone)?.dims(),
        target_generators,
    })
}
