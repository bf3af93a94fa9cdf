//! Bit-packed linear algebra over `F_2` and binary linear codes.
//!
//! Vectors and matrix rows are packed little-endian into `u64` words:
//! coordinate `i` lives in bit `i % 64` of word `i / 64`. For vectors of
//! length at most 64 the single word doubles as the integer index used by
//! the dense distributions in [`crate::spectral`].

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

const WORD: usize = 64;

/// Largest code dimension for which codewords are enumerated exhaustively.
pub const DEFAULT_ENUM_CAP: usize = 28;

/// Rejection-sampling retries for full-rank generator matrices.
const MAX_RANK_RETRIES: usize = 1000;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

fn low_mask(len: usize) -> u64 {
    if len >= WORD {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A vector in `F_2^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Vector {
    len: usize,
    words: Vec<u64>,
}

impl GF2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Unit vector with a single one at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Build from the little-endian integer encoding. Requires `len <= 64`.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= WORD, "integer encoding needs len <= 64, got {len}");
        let mut words = vec![0; words_for(len)];
        if len > 0 {
            words[0] = index & low_mask(len);
        }
        Self { len, words }
    }

    /// Little-endian integer encoding. Requires `len <= 64`.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= WORD, "integer encoding needs len <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.gen()).collect();
        if let Some(last) = words.last_mut() {
            *last &= low_mask(len - (words_for(len) - 1) * WORD);
        }
        Self { len, words }
    }

    /// Uniformly random vector of exactly `weight` ones.
    pub fn random_of_weight<R: Rng + ?Sized>(len: usize, weight: usize, rng: &mut R) -> Self {
        assert!(weight <= len);
        let mut v = Self::zeros(len);
        for pos in rand::seq::index::sample(rng, len, weight) {
            v.set(pos, true);
        }
        v
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

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product `x^T y` over `F_2`.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        Error::check_dim(self.len, other.len)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        Error::check_dim(self.len, other.len)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

impl fmt::Display for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Vector({self})")
    }
}

impl FromStr for GF2Vector {
    type Err = Error;

    /// Parse a string of `0`/`1` characters, coordinate 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected character {other:?} in bit string"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

/// A dense `rows x cols` matrix over `F_2`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stack row vectors. All rows must share the same length `cols`.
    pub fn from_rows(rows: &[GF2Vector], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            Error::check_dim(cols, v.len())?;
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        Ok(m)
    }

    /// Parse rows given as `0`/`1` strings. Ragged input is rejected.
    pub fn from_strings(rows: &[&str]) -> Result<Self> {
        let vecs = rows
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<GF2Vector>().map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse { line: i + 1, msg },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cols = vecs.first().map_or(0, GF2Vector::len);
        if let Some((i, v)) = vecs.iter().enumerate().find(|(_, v)| v.len() != cols) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("ragged row: length {} but expected {cols}", v.len()),
            });
        }
        Self::from_rows(&vecs, cols)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let vecs: Vec<_> = (0..rows).map(|_| GF2Vector::random(cols, rng)).collect();
        Self::from_rows(&vecs, cols).expect("rows have matching length")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> GF2Vector {
        assert!(r < self.rows);
        GF2Vector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols);
        let idx = r * self.stride + c / WORD;
        let mask = 1u64 << (c % WORD);
        if bit {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    /// `M v` over `F_2`.
    pub fn mat_vec_mul(&self, v: &GF2Vector) -> Result<GF2Vector> {
        Error::check_dim(self.cols, v.len())?;
        let mut out = GF2Vector::zeros(self.rows);
        for r in 0..self.rows {
            let parity: u32 = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// `M^T v`: XOR of the rows selected by `v`.
    pub fn transpose_mul(&self, v: &GF2Vector) -> Result<GF2Vector> {
        Error::check_dim(self.rows, v.len())?;
        let mut out = GF2Vector::zeros(self.cols);
        for r in (0..self.rows).filter(|&r| v.get(r)) {
            for (o, w) in out.words.iter_mut().zip(self.row_words(r)) {
                *o ^= w;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in (0..self.cols).filter(|&k| self.get(r, k)) {
                let src = other.row_words(k).to_vec();
                for (o, w) in out.row_words_mut(r).iter_mut().zip(&src) {
                    *o ^= w;
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Append `v` as an extra last row.
    pub fn stack_row(&self, v: &GF2Vector) -> Result<Self> {
        Error::check_dim(self.cols, v.len())?;
        let mut out = self.clone();
        out.rows += 1;
        out.data.extend_from_slice(v.words());
        Ok(out)
    }

    /// Reduced row echelon form and its pivot columns.
    fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, next);
            let pivot = m.row_words(next).to_vec();
            for r in 0..m.rows {
                if r != next && m.get(r, c) {
                    for (o, w) in m.row_words_mut(r).iter_mut().zip(&pivot) {
                        *o ^= w;
                    }
                }
            }
            pivots.push(c);
            next += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : M x = 0}`, one basis vector per row.
    pub fn nullspace(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(free.len(), self.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, true);
            for (row, &p) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    basis.set(b, p, true);
                }
            }
        }
        basis
    }

    /// Each column packed into a `u64` (bit `r` = entry `(r, c)`). Needs `rows <= 64`.
    pub fn column_masks(&self) -> Vec<u64> {
        assert!(self.rows <= WORD, "column masks need at most 64 rows");
        (0..self.cols)
            .map(|c| {
                (0..self.rows)
                    .filter(|&r| self.get(r, c))
                    .fold(0u64, |acc, r| acc | (1 << r))
            })
            .collect()
    }

    /// Each row packed into a `u64`. Needs `cols <= 64`.
    pub fn row_masks(&self) -> Vec<u64> {
        assert!(self.cols <= WORD, "row masks need at most 64 columns");
        (0..self.rows)
            .map(|r| self.row_words(r).first().copied().unwrap_or(0))
            .collect()
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// Binary linear `[n, k]` code given by a full-row-rank generator and a
/// parity-check matrix whose rows span the dual.
#[derive(Clone)]
pub struct LinearCode {
    gen: GF2Matrix,
    parity: GF2Matrix,
    min_dist: OnceLock<usize>,
    dual_min_dist: OnceLock<usize>,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearCode")
            .field("n", &self.n())
            .field("k", &self.k())
            .field("gen", &self.gen)
            .finish()
    }
}

impl LinearCode {
    /// Code spanned by the rows of `gen`, which must be linearly independent.
    pub fn from_generator(gen: GF2Matrix) -> Result<Self> {
        let rank = gen.rank();
        if rank != gen.rows() {
            return Err(Error::RankDeficient {
                rank,
                rows: gen.rows(),
            });
        }
        let parity = gen.nullspace();
        Ok(Self::from_parts(gen, parity))
    }

    /// Pair an explicit generator and parity-check matrix, validating both.
    pub fn new(gen: GF2Matrix, parity: GF2Matrix) -> Result<Self> {
        Error::check_dim(gen.cols(), parity.cols())?;
        let n = gen.cols();
        let rank_g = gen.rank();
        if rank_g != gen.rows() {
            return Err(Error::RankDeficient {
                rank: rank_g,
                rows: gen.rows(),
            });
        }
        let rank_h = parity.rank();
        if rank_h != parity.rows() {
            return Err(Error::RankDeficient {
                rank: rank_h,
                rows: parity.rows(),
            });
        }
        if rank_g + rank_h != n {
            return Err(Error::InvalidParameter(format!(
                "ranks {rank_g} + {rank_h} do not add up to n = {n}"
            )));
        }
        if !gen.mul(&parity.transpose())?.is_zero() {
            return Err(Error::InvalidParameter(
                "generator is not orthogonal to the parity-check matrix".into(),
            ));
        }
        Ok(Self::from_parts(gen, parity))
    }

    fn from_parts(gen: GF2Matrix, parity: GF2Matrix) -> Self {
        Self {
            gen,
            parity,
            min_dist: OnceLock::new(),
            dual_min_dist: OnceLock::new(),
        }
    }

    /// `[n, 1]` repetition code.
    pub fn repetition(n: usize) -> Self {
        let gen = GF2Matrix::from_rows(&[GF2Vector::ones(n)], n).unwrap();
        Self::from_generator(gen).unwrap()
    }

    /// The whole space `F_2^n`.
    pub fn full_space(n: usize) -> Self {
        Self::from_generator(GF2Matrix::identity(n)).unwrap()
    }

    /// The `[7, 4, 3]` Hamming code.
    pub fn hamming_7_4() -> Self {
        let gen = GF2Matrix::from_strings(&["1000110", "0100101", "0010011", "0001111"]).unwrap();
        Self::from_generator(gen).unwrap()
    }

    /// Uniformly random `[n, k]` code: the generator is drawn uniformly among
    /// full-rank `k x n` matrices by rejection. Deterministic in `seed`.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidParameter(format!(
                "random code needs 1 <= k < n, got n = {n}, k = {k}"
            )));
        }
        let mut rng = rng::seeded(seed);
        for _ in 0..MAX_RANK_RETRIES {
            let gen = GF2Matrix::random(k, n, &mut rng);
            if gen.rank() == k {
                return Self::from_generator(gen);
            }
        }
        Err(Error::SamplingFailed {
            rows: k,
            cols: n,
            attempts: MAX_RANK_RETRIES,
        })
    }

    pub fn n(&self) -> usize {
        self.gen.cols()
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn generator(&self) -> &GF2Matrix {
        &self.gen
    }

    pub fn parity_check(&self) -> &GF2Matrix {
        &self.parity
    }

    /// The dual code: generator and parity-check matrices swap roles.
    pub fn dual(&self) -> Self {
        let dual = Self::from_parts(self.parity.clone(), self.gen.clone());
        if let Some(&d) = self.dual_min_dist.get() {
            let _ = dual.min_dist.set(d);
        }
        if let Some(&d) = self.min_dist.get() {
            let _ = dual.dual_min_dist.set(d);
        }
        dual
    }

    /// Codeword `G^T m` for message `m`.
    pub fn encode(&self, message: &GF2Vector) -> Result<GF2Vector> {
        self.gen.transpose_mul(message)
    }

    /// Syndrome `H y`.
    pub fn syndrome(&self, y: &GF2Vector) -> Result<GF2Vector> {
        self.parity.mat_vec_mul(y)
    }

    pub fn contains(&self, y: &GF2Vector) -> Result<bool> {
        Ok(self.syndrome(y)?.is_zero())
    }

    fn check_enumerable(&self, cap: usize) -> Result<()> {
        if self.k() > cap {
            return Err(Error::EnumerationCap {
                what: "code dimension",
                value: self.k(),
                cap,
            });
        }
        if self.n() > WORD {
            return Err(Error::EnumerationCap {
                what: "block length",
                value: self.n(),
                cap: WORD,
            });
        }
        Ok(())
    }

    /// Visit every codeword (as its integer encoding) in Gray-code order,
    /// starting with zero. Stops early when `visit` returns `false`.
    fn walk_codewords(&self, mut visit: impl FnMut(u64) -> bool) {
        let rows = self.gen.row_masks();
        let mut cw = 0u64;
        if !visit(cw) {
            return;
        }
        for i in 1u64..(1u64 << self.k()) {
            cw ^= rows[i.trailing_zeros() as usize];
            if !visit(cw) {
                return;
            }
        }
    }

    /// All `2^k` codewords, integer-encoded, in Gray-code order.
    pub fn codewords(&self) -> Result<Vec<u64>> {
        self.check_enumerable(DEFAULT_ENUM_CAP)?;
        let mut out = Vec::with_capacity(1 << self.k());
        self.walk_codewords(|c| {
            out.push(c);
            true
        });
        Ok(out)
    }

    /// `A_w = #{c : |c| = w}` for `w = 0..=n`.
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        self.check_enumerable(DEFAULT_ENUM_CAP)?;
        let mut dist = vec![0u64; self.n() + 1];
        self.walk_codewords(|c| {
            dist[c.count_ones() as usize] += 1;
            true
        });
        Ok(dist)
    }

    /// Exact minimum distance by exhaustive enumeration (cached).
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.min_dist.get() {
            return Ok(d);
        }
        let d = self.min_distance_with_cap(DEFAULT_ENUM_CAP)?;
        let _ = self.min_dist.set(d);
        Ok(d)
    }

    /// Minimum distance with an explicit enumeration cap on `k`.
    pub fn min_distance_with_cap(&self, cap: usize) -> Result<usize> {
        self.check_enumerable(cap)?;
        if self.k() == 0 {
            return Err(Error::TrivialCode);
        }
        let mut best = usize::MAX;
        self.walk_codewords(|c| {
            if c != 0 {
                best = best.min(c.count_ones() as usize);
            }
            best > 1
        });
        Ok(best)
    }

    /// Minimum distance of the dual code, `d⊥` (cached).
    pub fn dual_distance(&self) -> Result<usize> {
        if let Some(&d) = self.dual_min_dist.get() {
            return Ok(d);
        }
        let d = self.dual().min_distance()?;
        let _ = self.dual_min_dist.set(d);
        Ok(d)
    }

    /// Text form: `n k` on the first line, then the `k` generator rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.k());
        for r in 0..self.k() {
            s.push_str(&self.gen.row(r).to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `n k` header".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad integer {t:?} in header"),
                })
            })
            .collect::<Result<_>>()?;
        let [n, k] = dims[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `n k`".into(),
            });
        };
        let mut rows = Vec::with_capacity(k);
        for (line, row) in lines {
            let v: GF2Vector = row.parse().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line, msg },
                other => other,
            })?;
            if v.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("ragged row: length {} but n = {n}", v.len()),
                });
            }
            rows.push(v);
        }
        if rows.len() != k {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares k = {k} rows, found {}", rows.len()),
            });
        }
        Self::from_generator(GF2Matrix::from_rows(&rows, n)?)
    }
}
