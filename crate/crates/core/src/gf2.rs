//! Dense linear algebra over GF(2) on packed `u64` rows.

use std::fmt;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
fn get_bit(v: &[u64], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn top_bit(v: &[u64]) -> Option<usize> {
    crate::poly2::deg_words(v)
}

/// Row-major dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols).max(1);
        Gf2Matrix {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.set(i, i, true);
        }
        a
    }

    /// Builds a `rows x columns.len()` matrix whose column `j` is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut a = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for i in 0..rows {
                if i / 64 < c.len() && get_bit(c, i) {
                    a.set(i, j, true);
                }
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        get_bit(self.row(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.stride + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.bits.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        let s = self.stride;
        let (lo, hi) = self.bits.split_at_mut(dst.max(src) * s);
        if dst < src {
            xor_into(&mut lo[dst * s..(dst + 1) * s], &hi[..s]);
        } else {
            xor_into(&mut hi[..s], &lo[src * s..(src + 1) * s]);
        }
    }

    /// Matrix-vector product `A v` with `v` packed as `cols` bits.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.rows).max(1)];
        for i in 0..self.rows {
            let parity = self
                .row(i)
                .iter()
                .zip(v)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1;
            if parity == 1 {
                out[i / 64] |= 1 << (i % 64);
            }
        }
        out
    }

    /// Reduces in place to reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// One solution of `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let mut aug = Gf2Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    aug.set(i, j, true);
                }
            }
            if i / 64 < b.len() && get_bit(b, i) {
                aug.set(i, self.cols, true);
            }
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; words_for(self.cols).max(1)];
        for (r, &c) in pivots.iter().enumerate() {
            if aug.get(r, self.cols) {
                x[c / 64] |= 1 << (c % 64);
            }
        }
        Some(x)
    }

    /// A basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let mut red = self.clone();
        let pivots = red.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; words_for(self.cols).max(1)];
            v[f / 64] |= 1 << (f % 64);
            for (r, &c) in pivots.iter().enumerate() {
                if red.get(r, f) {
                    v[c / 64] |= 1 << (c % 64);
                }
            }
            out.push(v);
        }
        out
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Incremental echelon basis of packed bit vectors.
///
/// Every stored vector has a distinct leading bit and carries the set of
/// accepted inputs it is a combination of, so membership tests also yield
/// coordinates with respect to the accepted inputs.
#[derive(Clone, Debug, Default)]
pub struct XorBasis {
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
    accepted: usize,
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.accepted
    }

    fn reduce_tagged(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let mut v = v.to_vec();
        let mut tag = vec![0u64; words_for(self.accepted + 1)];
        // Rows are kept sorted by descending pivot.
        for (pivot, row, rtag) in &self.rows {
            if pivot / 64 < v.len() && get_bit(&v, *pivot) {
                xor_into(&mut v, row);
                xor_into(&mut tag, rtag);
            }
        }
        (v, tag)
    }

    /// Adds `v`; returns `true` iff it was independent of the vectors so far.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let (res, mut tag) = self.reduce_tagged(v);
        let Some(pivot) = top_bit(&res) else {
            return false;
        };
        let idx = self.accepted;
        tag.resize(words_for(idx + 1), 0);
        tag[idx / 64] ^= 1 << (idx % 64);
        self.accepted += 1;
        let pos = self.rows.partition_point(|(p, _, _)| *p > pivot);
        self.rows.insert(pos, (pivot, res, tag));
        true
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        top_bit(&self.reduce_tagged(v).0).is_none()
    }

    /// Coordinates of `v` over the accepted vectors (bit `i` = i-th accepted).
    pub fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        let (res, mut tag) = self.reduce_tagged(v);
        if top_bit(&res).is_some() {
            return None;
        }
        tag.resize(words_for(self.accepted).max(1), 0);
        Some(tag)
    }

    /// Residual of `v` after reduction; a canonical coset representative.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut out = v.to_vec();
        for (pivot, row) in self.reduced_rows() {
            if pivot / 64 < out.len() && get_bit(&out, pivot) {
                xor_into(&mut out, &row);
            }
        }
        out
    }

    /// The fully reduced echelon basis, sorted by descending pivot. Two
    /// bases span the same space iff these agree.
    pub fn reduced_rows(&self) -> Vec<(usize, Vec<u64>)> {
        let mut rows: Vec<(usize, Vec<u64>)> =
            self.rows.iter().map(|(p, r, _)| (*p, r.clone())).collect();
        // Ascending pivot pass clears every pivot bit from the other rows.
        for i in (0..rows.len()).rev() {
            let (pivot, row) = rows[i].clone();
            for (j, (_, other)) in rows.iter_mut().enumerate() {
                if j != i && pivot / 64 < other.len() && get_bit(other, pivot) {
                    xor_into(other, &row);
                }
            }
        }
        rows
    }
}
