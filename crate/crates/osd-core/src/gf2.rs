//! Dense GF(2) linear algebra with word-packed rows.
//!
//! Provides the matrix/permutation machinery used by every decoder in this
//! crate: full reduced elimination with column-permutation bookkeeping,
//! row-restricted elimination (only a sub-block of rows is touched), and
//! instrumented operation counts so elimination cost can be measured rather
//! than estimated.

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix is rank deficient: found rank {rank}, needed {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index maps do not form a permutation")]
    InvalidPermutation,
}

/// Packed bit vector over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor_words(&mut self, words: &[u64]) {
        debug_assert_eq!(self.words.len(), words.len());
        for (a, b) in self.words.iter_mut().zip(words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Dense binary matrix, rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS).max(1);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    /// Build from rows of 0/1 bytes; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Gf2Error::DimensionMismatch {
                    expected: ncols,
                    got: row.len(),
                });
            }
            for (c, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn set_row(&mut self, r: usize, v: &BitVec) {
        debug_assert_eq!(v.len, self.cols);
        self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
            .copy_from_slice(&v.words);
    }

    /// row[dst] ^= row[src]
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words_per_row;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for i in 0..w {
            self.data.swap(a * w + i, b * w + i);
        }
    }

    /// New matrix whose column `j` is column `order[j]` of `self`.
    pub fn permute_cols(&self, order: &[usize]) -> BitMatrix {
        debug_assert_eq!(order.len(), self.cols);
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (j, &src) in order.iter().enumerate() {
                if self.get(r, src) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    /// v * M over GF(2); |v| must equal the row count.
    pub fn mat_vec_encode(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        if v.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.cols);
        for r in v.iter_ones() {
            out.xor_words(self.row_words(r));
        }
        Ok(out)
    }

    /// M * vᵀ over GF(2); |v| must equal the column count.
    pub fn mat_vec_syndrome(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u64, |acc, (a, b)| acc ^ (a & b));
            if parity.count_ones() & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }
}

/// Direction for applying a [`Permutation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Bijection on `[0, size)` stored with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(size: usize) -> Self {
        let forward: Vec<usize> = (0..size).collect();
        Self {
            inverse: forward.clone(),
            forward,
        }
    }

    pub fn from_forward(forward: Vec<usize>) -> Result<Self, Gf2Error> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &f) in forward.iter().enumerate() {
            if f >= n || inverse[f] != usize::MAX {
                return Err(Gf2Error::InvalidPermutation);
            }
            inverse[f] = i;
        }
        Ok(Self { forward, inverse })
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    #[inline]
    pub fn forward(&self, i: usize) -> usize {
        self.forward[i]
    }

    #[inline]
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn forward_slice(&self) -> &[usize] {
        &self.forward
    }

    /// out[i] = v[p(i)] with p taken forward or inverse.
    pub fn apply<T: Clone>(&self, v: &[T], dir: Direction) -> Result<Vec<T>, Gf2Error> {
        if v.len() != self.size() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.size(),
                got: v.len(),
            });
        }
        let map = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        Ok(map.iter().map(|&j| v[j].clone()).collect())
    }

    pub fn apply_bits(&self, v: &BitVec, dir: Direction) -> Result<BitVec, Gf2Error> {
        if v.len() != self.size() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.size(),
                got: v.len(),
            });
        }
        let map = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let mut out = BitVec::zeros(v.len());
        for (i, &j) in map.iter().enumerate() {
            if v.get(j) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Composition: apply(compose(p, q), v) = apply(p, apply(q, v)).
    pub fn compose(&self, q: &Permutation) -> Permutation {
        debug_assert_eq!(self.size(), q.size());
        // apply(self.compose(q), v) = apply(self, apply(q, v)) = v[q(self(i))]
        let forward: Vec<usize> = (0..self.size()).map(|i| q.forward[self.forward[i]]).collect();
        Permutation::from_forward(forward).expect("composition of bijections")
    }
}

/// Outcome bookkeeping for one elimination pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EliminationReport {
    /// Columns that yielded a pivot, in discovery order.
    pub pivot_cols: Vec<usize>,
    /// Scanned columns that were linearly dependent on earlier pivots.
    pub dependent_cols: Vec<usize>,
    pub row_add_count: u64,
    pub row_swap_count: u64,
}

/// Core elimination: find `needed` pivots by scanning `col_order`.
///
/// Pivot rows are drawn from `pivot_rows`; the pivot's column is cleared in
/// every other row of `clear_rows` (a superset of `pivot_rows`). Rows outside
/// `clear_rows` are never modified.
pub(crate) fn eliminate_general(
    m: &mut BitMatrix,
    pivot_rows: std::ops::Range<usize>,
    clear_rows: std::ops::Range<usize>,
    col_order: &[usize],
    needed: usize,
) -> Result<EliminationReport, Gf2Error> {
    debug_assert!(clear_rows.start <= pivot_rows.start && pivot_rows.end <= clear_rows.end);
    let mut report = EliminationReport::default();
    let mut next_pivot_row = pivot_rows.start;
    for &col in col_order {
        if report.pivot_cols.len() == needed {
            break;
        }
        // lowest-index unused pivot row with a 1 in this column
        let found = (next_pivot_row..pivot_rows.end).find(|&r| m.get(r, col));
        match found {
            None => report.dependent_cols.push(col),
            Some(r) => {
                if r != next_pivot_row {
                    m.swap_rows(r, next_pivot_row);
                    report.row_swap_count += 1;
                }
                for other in clear_rows.clone() {
                    if other != next_pivot_row && m.get(other, col) {
                        m.xor_row(other, next_pivot_row);
                        report.row_add_count += 1;
                    }
                }
                report.pivot_cols.push(col);
                next_pivot_row += 1;
            }
        }
    }
    if report.pivot_cols.len() < needed {
        return Err(Gf2Error::RankDeficient {
            rank: report.pivot_cols.len(),
            needed,
        });
    }
    Ok(report)
}

/// Full reduced elimination, left to right, producing a systematic matrix.
///
/// Dependent columns are moved after the last pivot column; the returned
/// permutation records the move, so that applying it forward to a vector in
/// the input column order yields the output column order.
pub fn rref_full(m: &BitMatrix) -> Result<(BitMatrix, Permutation, EliminationReport), Gf2Error> {
    let rows = m.rows();
    let cols = m.cols();
    let mut work = m.clone();
    let natural: Vec<usize> = (0..cols).collect();
    let report = eliminate_general(&mut work, 0..rows, 0..rows, &natural, rows)?;

    // pivots first, then dependents, then columns never scanned
    let mut order = report.pivot_cols.clone();
    order.extend_from_slice(&report.dependent_cols);
    let last_scanned = *report
        .pivot_cols
        .iter()
        .chain(report.dependent_cols.iter())
        .max()
        .unwrap_or(&0);
    if !order.is_empty() {
        order.extend(last_scanned + 1..cols);
    }
    let systematic = work.permute_cols(&order);
    let perm = Permutation::from_forward(order)?;
    Ok((systematic, perm, report))
}

/// Restricted elimination: pivots and row operations confined to `row_range`,
/// pivot columns scanned in the order given by `col_order`. Rows outside the
/// range are untouched; the column layout is not physically changed.
pub fn eliminate_restricted(
    m: &BitMatrix,
    row_range: std::ops::Range<usize>,
    col_order: &[usize],
) -> Result<(BitMatrix, EliminationReport), Gf2Error> {
    let needed = row_range.len();
    let mut work = m.clone();
    let report = eliminate_general(&mut work, row_range.clone(), row_range, col_order, needed)?;
    Ok((work, report))
}

/// v * M with plain 0/1 byte sequences (thin wrapper over the packed path).
pub fn mat_vec_encode(v: &[u8], m: &BitMatrix) -> Result<Vec<u8>, Gf2Error> {
    if v.len() != m.rows() {
        return Err(Gf2Error::DimensionMismatch {
            expected: m.rows(),
            got: v.len(),
        });
    }
    Ok(m.mat_vec_encode(&BitVec::from_bits(v))?.to_bits())
}
