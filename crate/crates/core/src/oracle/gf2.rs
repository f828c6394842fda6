//! Dense matrices over GF(2), packed 64 columns per word.

use crate::channel::Bit;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn from_rows(rows: &[Vec<Bit>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.words[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.words[r * self.stride + c / 64];
        let bit = 1u64 << (c % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / 64] ^= 1u64 << (c % 64);
    }

    /// ORs `word` into word `w` of row `r`. Bits past the last column are
    /// dropped.
    pub fn or_word(&mut self, r: usize, w: usize, word: u64) {
        let tail = self.cols - 64 * w;
        let word = if tail < 64 { word & ((1u64 << tail) - 1) } else { word };
        self.words[r * self.stride + w] |= word;
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        let (s, d) = (src * self.stride, dst * self.stride);
        for k in from_word..self.stride {
            let v = self.words[s + k];
            self.words[d + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.stride {
                self.words.swap(a * self.stride + k, b * self.stride + k);
            }
        }
    }

    /// Reduces in place to reduced row echelon form and returns the pivot
    /// column of each nonzero row, in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(p, row);
            for r in 0..self.rows {
                if r != row && self.get(r, col) {
                    self.xor_row_into(row, r, col / 64);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Product with a bit vector.
    pub fn mul_vec(&self, x: &[Bit]) -> Vec<Bit> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(0u8, |acc, c| acc ^ (self.get(r, c) as u8 & x[c]))
            })
            .collect()
    }

    /// A basis of `{x : A x = 0}`, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<Bit>> {
        let mut r = self.clone();
        let pivots = r.rref();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![0u8; self.cols];
                x[free] = 1;
                for (i, &p) in pivots.iter().enumerate() {
                    if r.get(i, free) {
                        x[p] = 1;
                    }
                }
                x
            })
            .collect()
    }
}

/// Parity of the AND of two packed rows.
#[inline]
pub fn dot_words(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}
