//! Dense bit-packed linear algebra over GF(2) and the Walsh-Hadamard
//! transform.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Mask selecting the live bits of the last word of a `len`-bit vector.
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// A vector in `F_2^len`. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Gf2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Gf2Vector {
            len,
            words: vec![!0; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Gf2Vector::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Gf2Vector::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Gf2Vector::from_fn(bits.len(), |i| bits[i])
    }

    /// Low `len` bits of `word`; bit `i` of the word is coordinate `i`.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= WORD, "from_word needs len <= 64");
        let mut v = Gf2Vector::zeros(len);
        if len > 0 {
            v.words[0] = word;
            v.clear_tail();
        }
        v
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        assert_eq!(
            words.len(),
            words_for(len),
            "word count does not match length"
        );
        let mut v = Gf2Vector { len, words };
        v.clear_tail();
        v
    }

    /// The vector packed into one word, if it fits.
    pub fn to_word(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Standard inner product `sum_i a_i b_i` over GF(2).
    pub fn dot(&self, other: &Gf2Vector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Indices of the set coordinates, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }
}

impl BitXorAssign<&Gf2Vector> for Gf2Vector {
    fn bitxor_assign(&mut self, rhs: &Gf2Vector) {
        assert_eq!(self.len, rhs.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &Gf2Vector {
    type Output = Gf2Vector;
    fn bitxor(self, rhs: &Gf2Vector) -> Gf2Vector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector[{self}]")
    }
}

/// Dense row-major matrix over GF(2); each row occupies `stride` words.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Gf2Matrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix whose rows are `rows`. An empty slice gives the 0x0 matrix.
    pub fn from_rows(rows: &[Gf2Vector]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::input(format!(
                "row length {} differs from first row length {cols}",
                bad.len()
            )));
        }
        let mut m = Gf2Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Matrix with `rows` rows whose columns are `columns`.
    pub fn from_columns(rows: usize, columns: &[Gf2Vector]) -> Result<Self> {
        let mut m = Gf2Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::input(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for i in c.iter_ones() {
                m.set(i, j, true);
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
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / WORD] >> (c % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> Gf2Vector {
        Gf2Vector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        Gf2Vector::from_fn(self.rows, |r| self.get(r, c))
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &Gf2Vector) -> Gf2Vector {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        Gf2Vector::from_fn(self.rows, |r| {
            let ones: u32 = self
                .row_words(r)
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            ones & 1 == 1
        })
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, v) in b.iter_mut().zip(a) {
            *d ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// Row rank over GF(2). Forward elimination on a private copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in rank + 1..self.rows {
                if m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            let row = pivots.len();
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(row, p);
            for r in 0..self.rows {
                if r != row && m.get(r, c) {
                    m.xor_row_into(row, r);
                }
            }
            pivots.push(c);
        }
        (m, pivots)
    }

    /// Basis of `{x : M x = 0}`, one vector per free column in ascending
    /// column order; the vector for free column `f` has `x_f = 1` and zeros
    /// on every other free column.
    pub fn kernel_basis(&self) -> Vec<Gf2Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = Gf2Vector::unit(self.cols, f);
                for (i, &p) in pivots.iter().enumerate() {
                    if r.get(i, f) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }

    /// Some `x` with `M x = b`, or `None` if `b` is outside the column span.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &Gf2Vector) -> Result<Option<Gf2Vector>> {
        if b.len() != self.rows {
            return Err(Error::input(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Gf2Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                aug.set(r, c, true);
            }
            aug.set(r, self.cols, b.get(r));
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = Gf2Vector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            x.set(p, red.get(i, self.cols));
        }
        Ok(Some(x))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

/// Rank of a matrix with at most 64 columns given as one word per row.
/// The slice is used as scratch space.
pub fn rank_words(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for r in &mut rows[i + 1..] {
            if *r & low != 0 {
                *r ^= pivot;
            }
        }
    }
    rank
}

/// Dimension of the span of `vectors`.
pub fn span_dim(vectors: &[Gf2Vector]) -> Result<usize> {
    Ok(Gf2Matrix::from_rows(vectors)?.rank())
}

/// Largest transform dimension accepted by [`SignedTable`].
pub const MAX_TABLE_DIM: u32 = 30;

/// A table of `2^dim` signed integers indexed by `F_2^dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTable {
    dim: u32,
    values: Vec<i64>,
}

impl SignedTable {
    pub fn new(dim: u32, values: Vec<i64>) -> Result<Self> {
        crate::error::ensure_capacity("table dimension", MAX_TABLE_DIM as u64, dim as u64)?;
        if values.len() != 1usize << dim {
            return Err(Error::input(format!(
                "table of dimension {dim} needs {} entries, got {}",
                1u64 << dim,
                values.len()
            )));
        }
        Ok(SignedTable { dim, values })
    }

    pub fn zeros(dim: u32) -> Result<Self> {
        crate::error::ensure_capacity("table dimension", MAX_TABLE_DIM as u64, dim as u64)?;
        Ok(SignedTable {
            dim,
            values: vec![0; 1usize << dim],
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [i64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<i64> {
        self.values
    }

    /// `s^(a) = sum_z s(z) (-1)^<a,z>`. Overflow of any intermediate is an
    /// error rather than a wrap.
    pub fn walsh_hadamard(&self) -> Result<SignedTable> {
        let mut out = self.clone();
        out.walsh_hadamard_in_place()?;
        Ok(out)
    }

    pub fn walsh_hadamard_in_place(&mut self) -> Result<()> {
        let n = self.values.len();
        let mut h = 1;
        while h < n {
            for block in self.values.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let s = a.checked_add(*b).ok_or(Error::Overflow("walsh_hadamard"))?;
                    let d = a.checked_sub(*b).ok_or(Error::Overflow("walsh_hadamard"))?;
                    *a = s;
                    *b = d;
                }
            }
            h *= 2;
        }
        Ok(())
    }
}

/// Unnormalised Walsh-Hadamard transform of a floating-point table whose
/// length is a power of two.
pub fn walsh_hadamard_f64(values: &mut [f64]) {
    let n = values.len();
    assert!(
        n.is_power_of_two(),
        "transform length must be a power of two"
    );
    let mut h = 1;
    while h < n {
        for block in values.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}
