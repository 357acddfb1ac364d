//! Dense Boolean matrices stored as word-parallel row bitsets.

use std::fmt;

use crate::error::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A `rows x cols` Boolean matrix. Row `x` holds the set of columns `y` with
/// entry `(x, y)` set. Padding bits past `cols` are always zero, so derived
/// equality and hashing compare exactly the stored entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for x in 0..rows {
            for y in 0..cols {
                m.set(x, y, true);
            }
        }
        m
    }

    /// Builds a matrix from a row-major bit pattern: bit `x * cols + y` of
    /// `pattern` is entry `(x, y)`. Requires `rows * cols <= 64`.
    pub fn from_bits(rows: usize, cols: usize, pattern: u64) -> Self {
        assert!(rows * cols <= 64, "bit pattern too small for {rows}x{cols}");
        let mut m = Self::zeros(rows, cols);
        for x in 0..rows {
            for y in 0..cols {
                if pattern >> (x * cols + y) & 1 == 1 {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn from_pairs<I>(rows: usize, cols: usize, pairs: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (x, y) in pairs {
            if x >= rows {
                return Err(Error::IndexOutOfRange { index: x, size: rows });
            }
            if y >= cols {
                return Err(Error::IndexOutOfRange { index: y, size: cols });
            }
            m.set(x, y, true);
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.rows && y < self.cols);
        self.words[x * self.stride + y / WORD_BITS] >> (y % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        assert!(x < self.rows && y < self.cols, "entry ({x}, {y}) out of range");
        let w = &mut self.words[x * self.stride + y / WORD_BITS];
        let mask = 1u64 << (y % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, x: usize) -> &[u64] {
        &self.words[x * self.stride..(x + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, x: usize) -> &mut [u64] {
        &mut self.words[x * self.stride..(x + 1) * self.stride]
    }

    /// Iterates the columns set in row `x`, ascending.
    pub fn row(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(x)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * WORD_BITS + b))
    }

    pub fn row_count(&self, x: usize) -> usize {
        self.row_words(x).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_count(&self, y: usize) -> usize {
        (0..self.rows).filter(|&x| self.get(x, y)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// All set entries in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |x| self.row(x).map(move |y| (x, y)))
    }

    /// Boolean product `self · rhs`: entry `(x, z)` is set iff some `y` has
    /// `(x, y)` in `self` and `(y, z)` in `rhs`.
    pub fn mul(&self, rhs: &BoolMatrix) -> Result<BoolMatrix, Error> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = BoolMatrix::zeros(self.rows, rhs.cols);
        for x in 0..self.rows {
            for y in self.row(x) {
                let src = rhs.row_words(y);
                // Split borrows: `src` lives in `rhs`, never in `out`.
                for (d, s) in out.row_words_mut(x).iter_mut().zip(src) {
                    *d |= *s;
                }
            }
        }
        Ok(out)
    }

    /// Row `dst` |= row `src`.
    pub(crate) fn or_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            return;
        }
        for w in 0..self.stride {
            let v = self.words[src * self.stride + w];
            self.words[dst * self.stride + w] |= v;
        }
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(self.cols, self.rows);
        for (x, y) in self.pairs() {
            out.set(y, x, true);
        }
        out
    }

    pub fn union(&self, rhs: &BoolMatrix) -> Result<BoolMatrix, Error> {
        self.zip_words(rhs, |a, b| a | b)
    }

    pub fn intersection(&self, rhs: &BoolMatrix) -> Result<BoolMatrix, Error> {
        self.zip_words(rhs, |a, b| a & b)
    }

    fn zip_words(&self, rhs: &BoolMatrix, f: impl Fn(u64, u64) -> u64) -> Result<BoolMatrix, Error> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                left: self.rows * self.cols,
                right: rhs.rows * rhs.cols,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&rhs.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(BoolMatrix {
            words,
            ..self.clone()
        })
    }

    /// Entries `(x, y)` of `self` with both `x` and `y` in the given index
    /// lists, relabeled by position in those lists.
    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(row_ids.len(), col_ids.len());
        for (i, &x) in row_ids.iter().enumerate() {
            for (j, &y) in col_ids.iter().enumerate() {
                if self.get(x, y) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolMatrix({}x{}", self.rows, self.cols)?;
        for x in 0..self.rows {
            f.write_str(if x == 0 { ": " } else { " " })?;
            for y in 0..self.cols {
                f.write_str(if self.get(x, y) { "1" } else { "0" })?;
            }
        }
        f.write_str(")")
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}
