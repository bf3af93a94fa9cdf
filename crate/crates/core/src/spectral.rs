//! Dense distributions over `F_2^n` and their Fourier calculus.
//!
//! Index convention: bit `i` of an index is coordinate `i` of the vector
//! (see [`crate::gf2::GF2Vector::to_index`]). The forward transform carries
//! the `1/2^n` factor, the inverse carries none:
//!
//! ```text
//! f̂(y) = 2^-n Σ_x f(x) (-1)^{x·y}        f(x) = Σ_y f̂(y) (-1)^{x·y}
//! ```

use std::ops::{Add, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{GF2Matrix, GF2Vector, LinearCode};

/// Default cap on `n` for dense distributions (2^22 doubles = 32 MiB).
pub const DEFAULT_MAX_N: usize = 22;
/// Absolute cap on `n`; anything between the two caps needs an explicit opt-in.
pub const HARD_MAX_N: usize = 26;

/// Most negative entry treated as roundoff and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-15;
/// Normalization slack for constructed and computed distributions.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Normalization slack accepted when loading distributions from CSV.
pub const CSV_NORMALIZATION_TOL: f64 = 1e-9;

const PAR_MIN_LEN: usize = 1 << 15;
const SERIAL_BLOCK: usize = 1 << 12;

fn check_n(n: usize) -> Result<()> {
    if n > HARD_MAX_N {
        Err(Error::EnumerationCap {
            what: "dense dimension n",
            value: n,
            cap: HARD_MAX_N,
        })
    } else {
        Ok(())
    }
}

fn log2_exact(len: usize) -> Result<usize> {
    if len.is_power_of_two() {
        Ok(len.trailing_zeros() as usize)
    } else {
        Err(Error::NotPowerOfTwo(len))
    }
}

/// Neumaier-compensated sum.
pub(crate) fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn butterfly_block<T>(data: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let len = data.len();
    let mut h = 1;
    while h < len {
        for chunk in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Unnormalized in-place Walsh–Hadamard transform:
/// `data[y] <- Σ_x data[x] (-1)^{popcount(x & y)}`.
///
/// Large inputs run the low butterfly layers block-wise in parallel and the
/// remaining layers across chunks, so results do not depend on scheduling.
pub fn walsh_hadamard_in_place<T>(data: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Send + Sync,
{
    let len = data.len();
    log2_exact(len)?;
    if len < PAR_MIN_LEN {
        butterfly_block(data);
        return Ok(());
    }
    data.par_chunks_mut(SERIAL_BLOCK).for_each(butterfly_block);
    let mut h = SERIAL_BLOCK;
    while h < len {
        data.par_chunks_mut(2 * h).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(h);
            lo.par_chunks_mut(SERIAL_BLOCK)
                .zip(hi.par_chunks_mut(SERIAL_BLOCK))
                .for_each(|(lo, hi)| {
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = x + y;
                        *b = x - y;
                    }
                });
        });
        h *= 2;
    }
    Ok(())
}

/// Probability mass function on `F_2^n`, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    n: usize,
    mass: Vec<f64>,
}

impl Pmf {
    /// Validate raw masses. Entries in `[-1e-15, 0)` are treated as roundoff,
    /// clamped to zero and the vector renormalized.
    pub fn from_masses(mass: Vec<f64>) -> Result<Self> {
        Self::validated(mass, NORMALIZATION_TOL)
    }

    fn validated(mut mass: Vec<f64>, tol: f64) -> Result<Self> {
        let n = log2_exact(mass.len())?;
        check_n(n)?;
        let mut clamped = false;
        for (index, m) in mass.iter_mut().enumerate() {
            if !m.is_finite() || *m < -NEGATIVE_CLAMP {
                return Err(Error::NegativeMass { index, value: *m });
            }
            if *m < 0.0 {
                *m = 0.0;
                clamped = true;
            }
        }
        let total = stable_sum(mass.iter().copied());
        if (total - 1.0).abs() > tol {
            return Err(Error::NotNormalized(total));
        }
        if clamped {
            mass.iter_mut().for_each(|m| *m /= total);
        }
        Ok(Self { n, mass })
    }

    /// Masses given up to a positive factor.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = stable_sum(weights.iter().copied());
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be finite, non-negative and not all zero".into(),
            ));
        }
        Self::from_masses(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n)?;
        let len = 1usize << n;
        Ok(Self {
            n,
            mass: vec![1.0 / len as f64; len],
        })
    }

    /// Point mass at `index`.
    pub fn delta(n: usize, index: usize) -> Result<Self> {
        check_n(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidParameter(format!(
                "index {index} outside F_2^{n}"
            )));
        }
        let mut mass = vec![0.0; 1 << n];
        mass[index] = 1.0;
        Ok(Self { n, mass })
    }

    /// i.i.d. Bernoulli(δ) coordinates.
    pub fn bernoulli_product(n: usize, delta: f64) -> Result<Self> {
        check_n(n)?;
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!(
                "Bernoulli parameter {delta} outside [0, 1]"
            )));
        }
        let mass = (0..1usize << n)
            .map(|x| {
                let w = x.count_ones() as i32;
                delta.powi(w) * (1.0 - delta).powi(n as i32 - w)
            })
            .collect();
        Ok(Self { n, mass })
    }

    /// Single Bernoulli(δ) bit as a pmf on `F_2`.
    pub fn bernoulli(delta: f64) -> Result<Self> {
        Self::bernoulli_product(1, delta)
    }

    /// Uniform distribution on the codewords of `code`.
    pub fn code_uniform(code: &LinearCode) -> Result<Self> {
        check_n(code.n())?;
        let cws = code.codewords()?;
        let p = 1.0 / cws.len() as f64;
        let mut mass = vec![0.0; 1 << code.n()];
        for c in cws {
            mass[c as usize] = p;
        }
        Ok(Self { n: code.n(), mass })
    }

    /// Uniform distribution on the Hamming sphere `S(0, w)`.
    pub fn sphere_uniform(n: usize, w: usize) -> Result<Self> {
        check_n(n)?;
        if w > n {
            return Err(Error::InvalidParameter(format!("radius {w} > n = {n}")));
        }
        let mass: Vec<f64> = (0..1usize << n)
            .map(|x| {
                if x.count_ones() as usize == w {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self::from_weights(mass)
    }

    /// Convex combination `Σ weight_i * pmf_i`; weights must sum to one.
    pub fn mixture(parts: &[(f64, &Pmf)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidParameter("empty mixture".into()));
        };
        let n = first.n;
        let mut mass = vec![0.0; 1 << n];
        for (w, p) in parts {
            Error::check_dim(n, p.n)?;
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            for (m, q) in mass.iter_mut().zip(&p.mass) {
                *m += w * q;
            }
        }
        Self::from_masses(mass)
    }

    /// Product law of `(X, Y)` with `X ~ self`, `Y ~ other`; `X` occupies the
    /// low `self.n` coordinates.
    pub fn product(&self, other: &Pmf) -> Result<Self> {
        let n = self.n + other.n;
        check_n(n)?;
        let mut mass = vec![0.0; 1 << n];
        for (hi, q) in other.mass.iter().enumerate() {
            for (lo, p) in self.mass.iter().enumerate() {
                mass[lo | hi << self.n] = p * q;
            }
        }
        Ok(Self { n, mass })
    }

    /// Result of a floating-point pipeline (e.g. a transform) that should be a pmf.
    pub(crate) fn from_computed(mass: Vec<f64>) -> Result<Self> {
        Self::from_masses(mass)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, index: usize) -> f64 {
        self.mass[index]
    }

    /// `P(A)` for the event `A = {x : event(x)}`.
    pub fn probability(&self, event: impl Fn(usize) -> bool) -> f64 {
        stable_sum(
            self.mass
                .iter()
                .enumerate()
                .filter(|(x, _)| event(*x))
                .map(|(_, m)| *m),
        )
    }

    pub fn spectrum(&self) -> Spectrum {
        fwht_forward(&self.mass).expect("pmf length is a power of two")
    }

    pub fn sampler(&self) -> PmfSampler {
        PmfSampler::new(self)
    }

    /// CSV with header `index,mass` and one row per point.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.mass.len() * 24);
        s.push_str("index,mass\n");
        for (i, m) in self.mass.iter().enumerate() {
            s.push_str(&format!("{i},{m}\n"));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "index,mass" => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "expected header `index,mass`".into(),
                })
            }
        }
        let mut mass = Vec::new();
        for (i, line) in lines {
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let (idx, m) = line
                .split_once(',')
                .ok_or_else(|| bad("expected `index,mass`".into()))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad index {idx:?}")))?;
            if idx != mass.len() {
                return Err(bad(format!("index {idx} out of order")));
            }
            let m: f64 = m
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad mass {m:?}")))?;
            mass.push(m);
        }
        Self::validated(mass, CSV_NORMALIZATION_TOL)
    }
}

/// Inverse-CDF sampler over a dense pmf.
#[derive(Clone, Debug)]
pub struct PmfSampler {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl PmfSampler {
    pub fn new(pmf: &Pmf) -> Self {
        let mut acc = 0.0;
        let cdf = pmf
            .mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        let last_positive = pmf.mass.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        Self { cdf, last_positive }
    }

    /// Draw an index; zero-mass points are never returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().unwrap_or(&1.0);
        let u = rng.gen::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.last_positive)
    }
}

/// Fourier coefficients `f̂(y)` of a function on `F_2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n: usize,
    coef: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coef(&self) -> &[f64] {
        &self.coef
    }

    pub fn get(&self, y: usize) -> f64 {
        self.coef[y]
    }

    /// `2^{n-1} f̂(e)`, the bias of `e^T Z` when the source is the law of `Z`.
    pub fn bias(&self, e: usize) -> f64 {
        self.coef[e] * (1u64 << self.n) as f64 / 2.0
    }
}

/// Forward transform with the `1/2^n` normalization.
pub fn fwht_forward(f: &[f64]) -> Result<Spectrum> {
    let n = log2_exact(f.len())?;
    let mut coef = f.to_vec();
    walsh_hadamard_in_place(&mut coef)?;
    let scale = 1.0 / f.len() as f64;
    coef.iter_mut().for_each(|c| *c *= scale);
    Ok(Spectrum { n, coef })
}

/// Inverse transform (no normalization factor).
pub fn fwht_inverse(s: &Spectrum) -> Vec<f64> {
    let mut f = s.coef.clone();
    walsh_hadamard_in_place(&mut f).expect("spectrum length is a power of two");
    f
}

/// `(f * g)(x) = Σ_y f(y) g(x + y)`, computed through the transform.
pub fn convolve(f: &Pmf, g: &Pmf) -> Result<Pmf> {
    Error::check_dim(f.n, g.n)?;
    let mut a = f.mass.clone();
    let mut b = g.mass.clone();
    walsh_hadamard_in_place(&mut a)?;
    walsh_hadamard_in_place(&mut b)?;
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    walsh_hadamard_in_place(&mut a)?;
    let scale = 1.0 / a.len() as f64;
    a.iter_mut().for_each(|x| *x *= scale);
    Pmf::from_computed(a)
}

/// Total variation distance `½ Σ |P(x) - Q(x)|`.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    Error::check_dim(p.n, q.n)?;
    let tv = 0.5 * stable_sum(p.mass.iter().zip(&q.mass).map(|(a, b)| (a - b).abs()));
    Ok(tv.clamp(0.0, 1.0))
}

/// Distance to the uniform distribution on `F_2^n` without materializing it.
pub fn tv_to_uniform(p: &Pmf) -> f64 {
    let u = 1.0 / p.mass.len() as f64;
    (0.5 * stable_sum(p.mass.iter().map(|a| (a - u).abs()))).clamp(0.0, 1.0)
}

/// `|P(A) - Q(A)|` for one event.
pub fn event_gap(p: &Pmf, q: &Pmf, event: impl Fn(usize) -> bool) -> Result<f64> {
    Error::check_dim(p.n, q.n)?;
    Ok((p.probability(&event) - q.probability(&event)).abs())
}

/// Bias of `e^T Z` for `Z ~ P`, via the Fourier coefficient `2^{n-1} P̂(e)`.
pub fn bias_of(e: &GF2Vector, p: &Pmf) -> Result<f64> {
    Error::check_dim(p.n, e.len())?;
    Ok(p.spectrum().bias(e.to_index() as usize))
}

/// Law of `M Z` for `Z ~ P`.
pub fn pushforward(m: &GF2Matrix, p: &Pmf) -> Result<Pmf> {
    Error::check_dim(m.cols(), p.n)?;
    check_n(m.rows())?;
    let cols = m.column_masks();
    let mut out = vec![0.0; 1 << m.rows()];
    // Gray-code walk: consecutive z differ in one coordinate, so the image
    // changes by exactly one column.
    let mut image = 0u64;
    out[0] += p.mass[0];
    for step in 1usize..p.mass.len() {
        image ^= cols[step.trailing_zeros() as usize];
        let z = step ^ (step >> 1);
        out[image as usize] += p.mass[z];
    }
    Pmf::from_computed(out)
}

/// Law of `(G Z, e^T Z)`, i.e. the pushforward under `G` with `e^T` stacked
/// as the last row. The bit `e^T Z` is coordinate `k` of the result.
pub fn joint_pushforward(g: &GF2Matrix, e: &GF2Vector, p: &Pmf) -> Result<Pmf> {
    pushforward(&g.stack_row(e)?, p)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `V_n(t) = |B(0, t)| = Σ_{j <= t} C(n, j)`.
pub fn ball_volume(n: usize, t: usize) -> Result<BigUint> {
    if t > n {
        return Err(Error::InvalidParameter(format!("radius {t} > n = {n}")));
    }
    Ok((0..=t).map(|j| binomial(n, j)).sum())
}

/// Pascal triangle rows `0..=n`.
struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut row = vec![BigInt::one(); m + 1];
            for j in 1..m {
                row[j] = &rows[m - 1][j - 1] + &rows[m - 1][j];
            }
            rows.push(row);
        }
        Self { rows }
    }

    fn get(&self, m: usize, j: usize) -> BigInt {
        if j > m {
            BigInt::zero()
        } else {
            self.rows[m][j].clone()
        }
    }

    /// `K_w(i) = Σ_j (-1)^j C(i, j) C(n - i, w - j)`.
    fn krawtchouk(&self, n: usize, w: usize, i: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for j in 0..=w.min(i) {
            let term = self.get(i, j) * self.get(n - i, w - j);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
}

/// Exact Krawtchouk value `K_w^{(n)}(i)` from the defining sum.
pub fn krawtchouk(n: usize, w: usize, i: usize) -> Result<BigInt> {
    if w > n || i > n {
        return Err(Error::InvalidParameter(format!(
            "Krawtchouk indices w = {w}, i = {i} must not exceed n = {n}"
        )));
    }
    Ok(BinomialTable::new(n).krawtchouk(n, w, i))
}

/// Full table `K_w^{(n)}(i)` indexed `[w][i]`.
pub fn krawtchouk_table(n: usize) -> Vec<Vec<BigInt>> {
    let table = BinomialTable::new(n);
    (0..=n)
        .map(|w| (0..=n).map(|i| table.krawtchouk(n, w, i)).collect())
        .collect()
}

/// Constants `(C, c)` in `|K_w(i)| / C(n, w) <= C (1 - 2w/n)^i`
/// for `w <= c n`, `i <= n/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrawtchoukBoundParams {
    /// Multiplicative constant `C >= 1`.
    pub constant: f64,
    /// Weight fraction `c` in `(0, 1)`.
    pub weight_fraction: f64,
    /// Block length for which the pair was certified, if any.
    pub certified_n: Option<usize>,
}

impl KrawtchoukBoundParams {
    pub fn new(constant: f64, weight_fraction: f64) -> Result<Self> {
        if !constant.is_finite() || constant < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "C = {constant} must be >= 1"
            )));
        }
        if !(weight_fraction > 0.0 && weight_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "c = {weight_fraction} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            constant,
            weight_fraction,
            certified_n: None,
        })
    }

    /// Largest weight `w` with `w <= c n`, evaluated exactly.
    pub fn max_weight(&self, n: usize) -> usize {
        max_weight(self.weight_fraction, n)
    }
}

fn max_weight(c: f64, n: usize) -> usize {
    let bound = BigRational::from_float(c).expect("finite c") * BigInt::from(n);
    bound.floor().to_integer().to_usize().unwrap_or(0).min(n)
}

/// Outcome of an exhaustive Krawtchouk bound scan.
#[derive(Clone, Debug, PartialEq)]
pub struct KboundCheck {
    pub n: usize,
    pub holds: bool,
    /// Largest `|K_w(i)| / (C(n,w) (1-2w/n)^i)` over the range, i.e. the
    /// smallest constant that would work.
    pub worst_ratio: f64,
    pub worst_w: usize,
    pub worst_i: usize,
}

struct RatioScan {
    worst: Option<BigRational>,
    worst_w: usize,
    worst_i: usize,
    infinite: bool,
}

fn scan_ratios(n: usize, c: f64) -> RatioScan {
    let table = BinomialTable::new(n);
    let w_max = max_weight(c, n);
    let big_n = BigInt::from(n);
    let mut scan = RatioScan {
        worst: None,
        worst_w: 0,
        worst_i: 0,
        infinite: false,
    };
    for w in 0..=w_max {
        let cnw = table.get(n, w);
        let base = BigInt::from(n as i64 - 2 * w as i64);
        let mut n_pow = BigInt::one();
        let mut base_pow = BigInt::one();
        for i in 0..=n / 2 {
            let k = table.krawtchouk(n, w, i).abs();
            // ratio = |K| n^i / (C(n,w) (n-2w)^i)
            let denom = &cnw * &base_pow;
            if denom.is_positive() {
                let ratio = BigRational::new(k * &n_pow, denom);
                if scan.worst.as_ref().is_none_or(|r| ratio > *r) && !scan.infinite {
                    scan.worst = Some(ratio);
                    scan.worst_w = w;
                    scan.worst_i = i;
                }
            } else if !k.is_zero() && !scan.infinite {
                scan.infinite = true;
                scan.worst_w = w;
                scan.worst_i = i;
            }
            n_pow *= &big_n;
            base_pow *= &base;
        }
    }
    scan
}

/// Check the Krawtchouk bound exhaustively with exact rational arithmetic.
pub fn kbound_check(n: usize, params: &KrawtchoukBoundParams) -> KboundCheck {
    let scan = scan_ratios(n, params.weight_fraction);
    let constant = BigRational::from_float(params.constant).expect("finite C");
    let (holds, worst_ratio) = if scan.infinite {
        (false, f64::INFINITY)
    } else {
        let worst = scan.worst.unwrap_or_else(BigRational::zero);
        (worst <= constant, worst.to_f64().unwrap_or(f64::INFINITY))
    };
    KboundCheck {
        n,
        holds,
        worst_ratio,
        worst_w: scan.worst_w,
        worst_i: scan.worst_i,
    }
}

/// Smallest `C >= 1`, rounded up to a multiple of `1e-6`, for which the
/// bound holds at this `n` and `c`.
pub fn kbound_fit(n: usize, c: f64) -> Result<KrawtchoukBoundParams> {
    if !(c > 0.0 && c < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "c = {c} must lie in (0, 1/2)"
        )));
    }
    let scan = scan_ratios(n, c);
    let worst = scan
        .worst
        .expect("w = 0 is always in range")
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let mut constant = if worst <= 1.0 {
        1.0
    } else {
        (worst * 1e6).ceil() / 1e6
    };
    let mut params = KrawtchoukBoundParams::new(constant, c)?;
    while !kbound_check(n, &params).holds {
        constant += 1e-6;
        params.constant = constant;
    }
    params.certified_n = Some(n);
    Ok(params)
}
