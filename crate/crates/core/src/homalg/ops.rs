use crate::error::{Error, Result};
use crate::rational::Rational;

use super::complex::{ChainMap, GradedComplex, Generator, EMPTY_ID};
use super::homology::{homology, HomologyResult};
use super::matrix::SparseF2Matrix;

/// Id of the tensor generator `a ⊗ b`.
pub fn tensor_id(a: &str, b: &str) -> String {
    format!("{a}⊗{b}")
}

/// Id of the copy of `id` in the second summand of a cone.
pub fn h_id(id: &str) -> String {
    if id == EMPTY_ID {
        "h".to_string()
    } else {
        format!("{id}·h")
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// Tensor product over F2. Generator `(i, j)` sits at index `i·|c2| + j`;
/// grading, action and class add. The result carries no U-map.
pub fn tensor(c1: &GradedComplex, c2: &GradedComplex) -> Result<GradedComplex> {
    let (n1, n2) = (c1.len(), c2.len());
    let mut generators = Vec::with_capacity(n1 * n2);
    for a in c1.generators() {
        for b in c2.generators() {
            generators.push(Generator {
                id: tensor_id(&a.id, &b.id),
                grading: a.grading + b.grading,
                action: a.action + b.action,
                class: a.class.checked_add(&b.class)?,
            });
        }
    }
    let d = tensor_matrix(c1.differential(), c2.differential(), n1, n2);
    // H_g of a truncated factor is exact below its completeness bound; the
    // product is exact as long as every contributing pair is.
    let complete = match (c1.min_grading(), c2.min_grading()) {
        (Some(m1), Some(m2)) => min_opt(
            c1.complete_through().map(|g| g + m2),
            c2.complete_through().map(|g| g + m1),
        ),
        _ => None,
    };
    Ok(GradedComplex::new(generators, d, None)?.with_complete_through(complete))
}

/// `A ⊗ id + id ⊗ B` on the tensor basis.
fn tensor_matrix(a: &SparseF2Matrix, b: &SparseF2Matrix, n1: usize, n2: usize) -> SparseF2Matrix {
    let mut cols = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let mut col: Vec<usize> = a.col(i).iter().map(|&r| r * n2 + j).collect();
            col.extend(b.col(j).iter().map(|&r| i * n2 + r));
            cols.push(col);
        }
    }
    SparseF2Matrix::from_columns(n1 * n2, cols)
}

/// `U₁ ⊗ id` on the tensor basis.
pub fn tensor_left_u(c1: &GradedComplex, c2: &GradedComplex) -> Result<SparseF2Matrix> {
    let u1 = c1.umap().ok_or(Error::MissingUmap("first factor"))?;
    Ok(tensor_matrix(u1, &SparseF2Matrix::zeros(c2.len(), c2.len()), c1.len(), c2.len()))
}

/// `U₁ ⊗ id + id ⊗ U₂` on the tensor basis.
pub fn tensor_u_sum(c1: &GradedComplex, c2: &GradedComplex) -> Result<SparseF2Matrix> {
    let u1 = c1.umap().ok_or(Error::MissingUmap("first factor"))?;
    let u2 = c2.umap().ok_or(Error::MissingUmap("second factor"))?;
    Ok(tensor_matrix(u1, u2, c1.len(), c2.len()))
}

/// Mapping cone of `f: A → B` of degree `d`. The source keeps its gradings;
/// the target copy is shifted by `−1 − d` so that `f` lowers cone grading by
/// one. Differential `[[∂_A, 0], [f, ∂_B]]`.
pub fn mapping_cone(f: &ChainMap<'_>) -> Result<GradedComplex> {
    mapping_cone_shifted(f, Rational::from_integer(0))
}

/// As [`mapping_cone`], with the target copy's actions raised by `offset`.
pub fn mapping_cone_shifted(f: &ChainMap<'_>, offset: Rational) -> Result<GradedComplex> {
    f.ensure_chain_map()?;
    let (a, b) = (f.source, f.target);
    let (n, m) = (a.len(), b.len());
    let shift = -1 - f.degree;
    let mut generators: Vec<Generator> = a.generators().to_vec();
    generators.extend(b.generators().iter().map(|g| Generator {
        id: h_id(&g.id),
        grading: g.grading + shift,
        action: g.action + offset,
        class: g.class.clone(),
    }));
    let mut cols: Vec<Vec<usize>> = Vec::with_capacity(n + m);
    for j in 0..n {
        let mut col = a.differential().col(j).to_vec();
        col.extend(f.matrix.col(j).iter().map(|&r| r + n));
        cols.push(col);
    }
    for j in 0..m {
        cols.push(b.differential().col(j).iter().map(|&r| r + n).collect());
    }
    let complete = min_opt(a.complete_through(), b.complete_through().map(|g| g + shift));
    Ok(GradedComplex::new(generators, SparseF2Matrix::from_columns(n + m, cols), None)?.with_complete_through(complete))
}

/// The complex whose homology is the derived tensor product over F[U]:
/// the cone of `U₁ ⊗ id + id ⊗ U₂` on `c1 ⊗ c2`.
pub fn derived_tensor_complex(c1: &GradedComplex, c2: &GradedComplex) -> Result<GradedComplex> {
    let phi = tensor_u_sum(c1, c2)?;
    let t = tensor(c1, c2)?;
    let f = ChainMap::new(&t, &t, -2, phi, Rational::from_integer(0))?;
    mapping_cone(&f)
}

pub fn derived_tensor(c1: &GradedComplex, c2: &GradedComplex) -> Result<HomologyResult> {
    homology(&derived_tensor_complex(c1, c2)?)
}
