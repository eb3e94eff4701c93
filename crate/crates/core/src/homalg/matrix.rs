//! Sparse matrices over F2 stored column-major as sorted row-index lists.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Symmetric difference of two sorted index lists (addition over F2).
pub fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorts and cancels repeated indices in pairs.
pub fn reduce_mod2(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseF2Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<usize>>,
}

impl SparseF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from `(row, col)` positions. Positions must be in
    /// bounds and unique.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut columns = vec![Vec::new(); cols];
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Shape(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            columns[c].push(r);
        }
        for (c, col) in columns.iter_mut().enumerate() {
            col.sort_unstable();
            if let Some(w) = col.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Shape(format!("duplicate entry ({}, {c})", w[0])));
            }
        }
        Ok(Self { rows, cols, columns })
    }

    /// Builds a matrix from columns, reducing repeated rows mod 2.
    pub fn from_columns(rows: usize, columns: Vec<Vec<usize>>) -> Self {
        let columns: Vec<Vec<usize>> = columns.into_iter().map(reduce_mod2).collect();
        debug_assert!(columns.iter().flatten().all(|&r| r < rows));
        Self {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].binary_search(&r).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&r| (r, c)))
    }

    /// Image of a vector given as a sorted set of column indices.
    pub fn apply(&self, v: &[usize]) -> Vec<usize> {
        let mut acc = Vec::new();
        for &c in v {
            acc.extend_from_slice(&self.columns[c]);
        }
        reduce_mod2(acc)
    }

    /// The composite `self ∘ rhs`.
    pub fn mul(&self, rhs: &SparseF2Matrix) -> Result<SparseF2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let columns = rhs.columns.iter().map(|col| self.apply(col)).collect();
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            columns,
        })
    }

    pub fn add(&self, rhs: &SparseF2Matrix) -> Result<SparseF2Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let columns = self
            .columns
            .iter()
            .zip(&rhs.columns)
            .map(|(a, b)| xor_sorted(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            columns,
        })
    }

    pub fn transpose(&self) -> SparseF2Matrix {
        let mut columns = vec![Vec::new(); self.rows];
        for (r, c) in self.entries() {
            columns[r].push(c);
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            columns,
        }
    }

    /// Restriction to the given rows and columns, re-indexed in the order
    /// supplied.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseF2Matrix {
        let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let columns = cols
            .iter()
            .map(|&c| {
                let mut col: Vec<usize> = self.columns[c]
                    .iter()
                    .filter_map(|r| row_pos.get(r).copied())
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        Self {
            rows: rows.len(),
            cols: cols.len(),
            columns,
        }
    }

    /// Rank over F2 by column reduction.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut rank = 0;
        for col in &self.columns {
            let mut v = col.clone();
            while let Some(&low) = v.last() {
                match pivots.get(&low) {
                    Some(p) => v = xor_sorted(&v, p),
                    None => {
                        pivots.insert(low, v);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    /// Square and of full rank.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse by Gauss–Jordan elimination on packed rows.
    pub fn inverse(&self) -> Option<SparseF2Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let words = n.div_ceil(64);
        // Row i holds [self | identity] with the identity in the second half.
        let mut rows: Vec<Vec<u64>> = vec![vec![0u64; 2 * words]; n];
        for (r, c) in self.entries() {
            rows[r][c / 64] |= 1 << (c % 64);
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row[words + i / 64] |= 1 << (i % 64);
        }
        for col in 0..n {
            let bit = |row: &Vec<u64>| row[col / 64] >> (col % 64) & 1 == 1;
            let pivot = (col..n).find(|&r| bit(&rows[r]))?;
            rows.swap(col, pivot);
            let prow = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && bit(row) {
                    for (a, b) in row.iter_mut().zip(&prow) {
                        *a ^= b;
                    }
                }
            }
        }
        let mut columns = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for (c, column) in columns.iter_mut().enumerate() {
                if row[words + c / 64] >> (c % 64) & 1 == 1 {
                    column.push(r);
                }
            }
        }
        Some(Self { rows: n, cols: n, columns })
    }

    /// Dense 0/1 rows, for display and small tests.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (r, c) in self.entries() {
            out[r][c] = 1;
        }
        out
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Shape("ragged dense matrix".into()));
            }
            for (c, &x) in row.iter().enumerate() {
                if x % 2 == 1 {
                    entries.push((r, c));
                }
            }
        }
        Self::from_entries(nrows, ncols, entries)
    }
}

impl fmt::Debug for SparseF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseF2Matrix {}x{}", self.rows, self.cols)?;
        for row in self.to_dense() {
            let s: String = row.iter().map(|&x| if x == 1 { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}
