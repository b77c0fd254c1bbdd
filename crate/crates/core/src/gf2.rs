//! Bit-packed linear algebra over GF(2).
//!
//! Two layers live here. The free functions at the top are the hot kernels:
//! they operate on vectors that fit in a single `u64` word, which is all the
//! graph and matroid code needs for graphs of up to 64 vertices. [`Gf2Matrix`]
//! is the general labeled matrix, with rows and columns indexed by arbitrary
//! label sets and rows packed into as many words as needed.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("duplicate row label at position {0}")]
    DuplicateRow(usize),
    #[error("duplicate column label at position {0}")]
    DuplicateColumn(usize),
    #[error("unknown row label {0}")]
    UnknownRow(String),
    #[error("unknown column label {0}")]
    UnknownColumn(String),
}

/// Incremental row-echelon basis for single-word vectors.
///
/// Slot `h` holds the basis vector whose highest set bit is `h`.
#[derive(Clone, Debug)]
pub struct WordBasis {
    slots: [u64; 64],
    rank: usize,
}

impl Default for WordBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl WordBasis {
    pub fn new() -> Self {
        Self {
            slots: [0; 64],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduces `v` against the basis; zero means `v` lies in the span.
    #[inline]
    pub fn reduce(&self, mut v: u64) -> u64 {
        while v != 0 {
            let h = 63 - v.leading_zeros() as usize;
            let b = self.slots[h];
            if b == 0 {
                return v;
            }
            v ^= b;
        }
        0
    }

    /// Inserts `v`, returning `true` if it increased the rank.
    #[inline]
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let h = 63 - r.leading_zeros() as usize;
        self.slots[h] = r;
        self.rank += 1;
        true
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }
}

/// GF(2) rank of a list of single-word vectors.
#[inline]
pub fn rank_of_words<I: IntoIterator<Item = u64>>(vectors: I) -> usize {
    let mut basis = WordBasis::new();
    for v in vectors {
        basis.insert(v);
        if basis.rank == 64 {
            break;
        }
    }
    basis.rank
}

/// A matrix over GF(2) whose rows and columns are indexed by label sets.
///
/// Labels are kept in insertion order; every operation that selects a subset
/// of rows or columns preserves that order.
#[derive(Clone)]
pub struct Gf2Matrix<R = usize, C = usize> {
    rows: Vec<R>,
    cols: Vec<C>,
    row_index: HashMap<R, usize>,
    col_index: HashMap<C, usize>,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl<R, C> Gf2Matrix<R, C>
where
    R: Clone + Eq + Hash + fmt::Debug,
    C: Clone + Eq + Hash + fmt::Debug,
{
    /// Zero matrix with the given labels.
    pub fn zeros(rows: Vec<R>, cols: Vec<C>) -> Result<Self, Gf2Error> {
        let mut row_index = HashMap::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if row_index.insert(r.clone(), i).is_some() {
                return Err(Gf2Error::DuplicateRow(i));
            }
        }
        let mut col_index = HashMap::with_capacity(cols.len());
        for (j, c) in cols.iter().enumerate() {
            if col_index.insert(c.clone(), j).is_some() {
                return Err(Gf2Error::DuplicateColumn(j));
            }
        }
        let words_per_row = cols.len().div_ceil(64);
        let bits = vec![0; words_per_row * rows.len()];
        Ok(Self {
            rows,
            cols,
            row_index,
            col_index,
            words_per_row,
            bits,
        })
    }

    /// Builds a matrix from an entry function over positional indices.
    pub fn from_fn(
        rows: Vec<R>,
        cols: Vec<C>,
        mut entry: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, cols)?;
        for i in 0..m.rows.len() {
            for j in 0..m.cols.len() {
                if entry(i, j) {
                    m.set_at(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> &[R] {
        &self.rows
    }

    pub fn cols(&self) -> &[C] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_position(&self, label: &R) -> Result<usize, Gf2Error> {
        self.row_index
            .get(label)
            .copied()
            .ok_or_else(|| Gf2Error::UnknownRow(format!("{label:?}")))
    }

    pub fn col_position(&self, label: &C) -> Result<usize, Gf2Error> {
        self.col_index
            .get(label)
            .copied()
            .ok_or_else(|| Gf2Error::UnknownColumn(format!("{label:?}")))
    }

    #[inline]
    pub fn get_at(&self, i: usize, j: usize) -> bool {
        let w = self.bits[i * self.words_per_row + j / 64];
        (w >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set_at(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words_per_row + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn get(&self, row: &R, col: &C) -> Result<bool, Gf2Error> {
        Ok(self.get_at(self.row_position(row)?, self.col_position(col)?))
    }

    pub fn set(&mut self, row: &R, col: &C, value: bool) -> Result<(), Gf2Error> {
        let (i, j) = (self.row_position(row)?, self.col_position(col)?);
        self.set_at(i, j, value);
        Ok(())
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// GF(2) rank. Matrices with no rows or no columns have rank 0.
    pub fn rank(&self) -> usize {
        if self.rows.is_empty() || self.cols.is_empty() {
            return 0;
        }
        let wpr = self.words_per_row;
        let mut scratch = self.bits.clone();
        let nrows = self.rows.len();
        let mut rank = 0;
        for col in 0..self.cols.len() {
            if rank == nrows {
                break;
            }
            let (wi, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..nrows).find(|&r| scratch[r * wpr + wi] & bit != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..wpr {
                    scratch.swap(p * wpr + k, rank * wpr + k);
                }
            }
            for r in 0..nrows {
                if r != rank && scratch[r * wpr + wi] & bit != 0 {
                    for k in wi..wpr {
                        scratch[r * wpr + k] ^= scratch[rank * wpr + k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Transpose, with rows becoming columns.
    pub fn transpose(&self) -> Gf2Matrix<C, R> {
        Gf2Matrix::from_fn(self.cols.clone(), self.rows.clone(), |i, j| self.get_at(j, i))
            .expect("labels already validated")
    }

    /// Submatrix on the given row and column labels, in this matrix's label order.
    pub fn submatrix(&self, rowset: &[R], colset: &[C]) -> Result<Self, Gf2Error> {
        let mut rsel = vec![false; self.rows.len()];
        for r in rowset {
            rsel[self.row_position(r)?] = true;
        }
        let mut csel = vec![false; self.cols.len()];
        for c in colset {
            csel[self.col_position(c)?] = true;
        }
        let ri: Vec<usize> = (0..self.rows.len()).filter(|&i| rsel[i]).collect();
        let ci: Vec<usize> = (0..self.cols.len()).filter(|&j| csel[j]).collect();
        Self::from_fn(
            ri.iter().map(|&i| self.rows[i].clone()).collect(),
            ci.iter().map(|&j| self.cols[j].clone()).collect(),
            |a, b| self.get_at(ri[a], ci[b]),
        )
    }

    /// Basis of the column nullspace: each entry lists column labels whose
    /// columns sum to zero. The returned sets are linearly independent.
    pub fn column_nullspace(&self) -> Vec<Vec<C>> {
        let t = self.transpose();
        // Row-reduce the transposed matrix, tracking which original columns
        // were combined into each row.
        let n = t.nrows();
        let wpr = t.words_per_row;
        let tw = n.div_ceil(64);
        let mut rows: Vec<(Vec<u64>, Vec<u64>)> = (0..n)
            .map(|i| {
                let mut tag = vec![0u64; tw];
                tag[i / 64] |= 1 << (i % 64);
                (t.row_words(i).to_vec(), tag)
            })
            .collect();
        let mut pivot_row = 0;
        for col in 0..t.ncols() {
            let (wi, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (pivot_row..n).find(|&r| rows[r].0[wi] & bit != 0) else {
                continue;
            };
            rows.swap(p, pivot_row);
            let (pv, pt) = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && row.0[wi] & bit != 0 {
                    for k in 0..wpr {
                        row.0[k] ^= pv[k];
                    }
                    for k in 0..tw {
                        row.1[k] ^= pt[k];
                    }
                }
            }
            pivot_row += 1;
        }
        rows[pivot_row..]
            .iter()
            .map(|(_, tag)| {
                (0..n)
                    .filter(|&i| (tag[i / 64] >> (i % 64)) & 1 == 1)
                    .map(|i| self.cols[i].clone())
                    .collect()
            })
            .collect()
    }

    /// A nonempty subset of `subset` whose columns sum to zero, or `None` if
    /// the selected columns are independent.
    pub fn column_dependency(&self, subset: &[C]) -> Result<Option<Vec<C>>, Gf2Error> {
        let sub = self.submatrix(&self.rows.clone(), subset)?;
        Ok(sub.column_nullspace().into_iter().next())
    }
}

impl<R: fmt::Debug, C: fmt::Debug> fmt::Debug for Gf2Matrix<R, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {:?} x {:?}", self.rows, self.cols)?;
        for i in 0..self.rows.len() {
            for j in 0..self.cols.len() {
                let w = self.bits[i * self.words_per_row + j / 64];
                write!(f, "{}", (w >> (j % 64)) & 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl<R: PartialEq, C: PartialEq> PartialEq for Gf2Matrix<R, C> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.bits == other.bits
    }
}

impl<R: Eq, C: Eq> Eq for Gf2Matrix<R, C> {}
