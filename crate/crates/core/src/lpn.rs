//! LPN instances and a maximum-likelihood reference solver.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::GF2Vector;
use crate::rng;
use crate::spectral::walsh_hadamard_in_place;

/// Largest secret length the exhaustive solver accepts.
pub const MAX_SOLVER_K: usize = 20;

/// Samples `(a_i, b_i)` with `b_i = a_i^T m + noise`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpnInstance {
    pub k: usize,
    pub delta: f64,
    pub samples: Vec<(GF2Vector, bool)>,
    /// Hidden secret, kept for scoring synthetic instances.
    pub secret: Option<GF2Vector>,
    pub seed: Option<u64>,
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=0.5).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "noise rate {delta} outside [0, 1/2]"
        )))
    }
}

impl LpnInstance {
    pub fn new(
        k: usize,
        delta: f64,
        samples: Vec<(GF2Vector, bool)>,
        secret: Option<GF2Vector>,
    ) -> Result<Self> {
        check_delta(delta)?;
        for (a, _) in &samples {
            Error::check_dim(k, a.len())?;
        }
        if let Some(m) = &secret {
            Error::check_dim(k, m.len())?;
        }
        Ok(Self {
            k,
            delta,
            samples,
            secret,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of samples whose label disagrees with `a^T m` for the secret.
    pub fn flip_rate(&self) -> Option<f64> {
        let m = self.secret.as_ref()?;
        let flips = self
            .samples
            .iter()
            .filter(|(a, b)| a.dot(m).expect("lengths checked") != *b)
            .count();
        Some(flips as f64 / self.samples.len().max(1) as f64)
    }

    /// CSV: a `#` line carrying `k`, `delta`, `seed` (and the secret when
    /// known), then `a_bits,b` rows.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# k={},delta={}", self.k, self.delta);
        if let Some(seed) = self.seed {
            s.push_str(&format!(",seed={seed}"));
        }
        if let Some(m) = &self.secret {
            s.push_str(&format!(",secret={m}"));
        }
        s.push_str("\na_bits,b\n");
        for (a, b) in &self.samples {
            s.push_str(&format!("{a},{}\n", u8::from(*b)));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, msg: String| Error::Parse {
            line: line + 1,
            msg,
        };
        let (_, meta) = lines.next().ok_or_else(|| bad(0, "empty input".into()))?;
        let meta = meta
            .strip_prefix('#')
            .ok_or_else(|| bad(0, "missing `# k=..,delta=..` line".into()))?;
        let (mut k, mut delta, mut seed, mut secret) = (None, None, None, None);
        for field in meta.split(',') {
            let (key, value) = field
                .trim()
                .split_once('=')
                .ok_or_else(|| bad(0, format!("bad field {field:?}")))?;
            match key {
                "k" => k = value.parse::<usize>().ok(),
                "delta" => delta = value.parse::<f64>().ok(),
                "seed" => seed = value.parse::<u64>().ok(),
                "secret" => secret = Some(value.parse::<GF2Vector>()?),
                other => return Err(bad(0, format!("unknown field {other:?}"))),
            }
        }
        let k = k.ok_or_else(|| bad(0, "missing or bad k".into()))?;
        let delta = delta.ok_or_else(|| bad(0, "missing or bad delta".into()))?;
        match lines.next() {
            Some((_, h)) if h.trim() == "a_bits,b" => {}
            _ => return Err(bad(1, "expected header `a_bits,b`".into())),
        }
        let mut samples = Vec::new();
        for (i, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| bad(i, "expected `a_bits,b`".into()))?;
            let a: GF2Vector = a.parse().map_err(|_| bad(i, format!("bad bits {a:?}")))?;
            if a.len() != k {
                return Err(bad(i, format!("row has {} bits, k = {k}", a.len())));
            }
            let b = match b.trim() {
                "0" => false,
                "1" => true,
                other => return Err(bad(i, format!("bad label {other:?}"))),
            };
            samples.push((a, b));
        }
        let mut inst = Self::new(k, delta, samples, secret)?;
        inst.seed = seed;
        Ok(inst)
    }
}

/// Draw a uniform secret and `n_samples` labelled samples from `rng`.
pub fn gen_lpn_with<R: Rng + ?Sized>(
    k: usize,
    delta: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<LpnInstance> {
    check_delta(delta)?;
    if k == 0 || n_samples == 0 {
        return Err(Error::InvalidParameter(
            "LPN needs k >= 1 and at least one sample".into(),
        ));
    }
    let secret = GF2Vector::random(k, rng);
    let samples = (0..n_samples)
        .map(|_| {
            let a = GF2Vector::random(k, rng);
            let noise = rng.gen::<f64>() < delta;
            let b = a.dot(&secret).expect("same length") ^ noise;
            (a, b)
        })
        .collect();
    Ok(LpnInstance {
        k,
        delta,
        samples,
        secret: Some(secret),
        seed: None,
    })
}

/// Synthetic instance, deterministic in `seed`.
pub fn gen_lpn(k: usize, delta: f64, n_samples: usize, seed: u64) -> Result<LpnInstance> {
    let mut inst = gen_lpn_with(k, delta, n_samples, &mut rng::seeded(seed))?;
    inst.seed = Some(seed);
    Ok(inst)
}

fn check_solver_cap(k: usize) -> Result<()> {
    if k > MAX_SOLVER_K {
        Err(Error::EnumerationCap {
            what: "LPN secret length",
            value: k,
            cap: MAX_SOLVER_K,
        })
    } else {
        Ok(())
    }
}

/// Maximum-likelihood decoding on integer-encoded samples.
///
/// The agreement count of every candidate at once is a Walsh–Hadamard
/// transform of the signed label histogram:
/// `corr(m) = Σ_i (-1)^{b_i + a_i·m}`. Ties go to the smallest candidate.
pub(crate) fn solve_ml_encoded(k: usize, samples: impl IntoIterator<Item = (u64, bool)>) -> u64 {
    let mut corr = vec![0i64; 1 << k];
    for (a, b) in samples {
        corr[a as usize] += if b { -1 } else { 1 };
    }
    walsh_hadamard_in_place(&mut corr).expect("power-of-two length");
    let mut best = 0usize;
    for (m, &c) in corr.iter().enumerate() {
        if c > corr[best] {
            best = m;
        }
    }
    best as u64
}

/// Candidate maximizing `#{i : a_i^T m' = b_i}` over all of `F_2^k`.
pub fn solve_ml(inst: &LpnInstance) -> Result<GF2Vector> {
    check_solver_cap(inst.k)?;
    let m = solve_ml_encoded(inst.k, inst.samples.iter().map(|(a, b)| (a.to_index(), *b)));
    Ok(GF2Vector::from_index(m, inst.k))
}

/// Monte-Carlo success rate with a 95% normal-approximation half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverStats {
    pub trials: usize,
    pub successes: usize,
    pub alpha_hat: f64,
    pub ci_halfwidth: f64,
}

impl SolverStats {
    pub fn from_counts(successes: usize, trials: usize) -> Self {
        let alpha_hat = successes as f64 / trials as f64;
        let ci_halfwidth = 1.96 * (alpha_hat * (1.0 - alpha_hat) / trials as f64).sqrt();
        Self {
            trials,
            successes,
            alpha_hat,
            ci_halfwidth,
        }
    }

    /// Standard error of `alpha_hat`.
    pub fn sigma(&self) -> f64 {
        (self.alpha_hat * (1.0 - self.alpha_hat) / self.trials as f64).sqrt()
    }
}

/// Success probability of [`solve_ml`] on fresh instances. Trial `t` uses
/// stream `t` of `seed`, so the estimate does not depend on thread count.
pub fn estimate_alpha(
    k: usize,
    delta: f64,
    n_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<SolverStats> {
    check_solver_cap(k)?;
    check_delta(delta)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, t);
            let inst = gen_lpn_with(k, delta, n_samples, &mut r)?;
            Ok(solve_ml(&inst)? == *inst.secret.as_ref().expect("synthetic"))
        })
        .collect::<Result<Vec<bool>>>()?;
    let successes = outcomes.into_iter().filter(|&s| s).count();
    Ok(SolverStats::from_counts(successes, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_samples_are_consistent() {
        let inst = gen_lpn(8, 0.0, 50, 1).unwrap();
        let m = inst.secret.clone().unwrap();
        assert!(inst.samples.iter().all(|(a, b)| a.dot(&m).unwrap() == *b));
        assert_eq!(inst.flip_rate(), Some(0.0));
    }

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(
            gen_lpn(6, 0.1, 20, 9).unwrap(),
            gen_lpn(6, 0.1, 20, 9).unwrap()
        );
        assert_ne!(
            gen_lpn(6, 0.1, 20, 9).unwrap(),
            gen_lpn(6, 0.1, 20, 10).unwrap()
        );
    }

    #[test]
    fn flip_rate_concentrates() {
        let inst = gen_lpn(8, 0.2, 10_000, 4).unwrap();
        let rate = inst.flip_rate().unwrap();
        let sigma = (0.2f64 * 0.8 / 10_000.0).sqrt();
        assert!((rate - 0.2).abs() <= 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn parameter_validation() {
        assert!(gen_lpn(8, 0.6, 10, 0).is_err());
        assert!(gen_lpn(8, -0.1, 10, 0).is_err());
        assert!(gen_lpn(8, 0.1, 0, 0).is_err());
        assert!(estimate_alpha(8, 0.1, 10, 0, 0).is_err());
        let big = gen_lpn(21, 0.1, 5, 0).unwrap();
        assert!(matches!(solve_ml(&big), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn ml_matches_brute_force() {
        for seed in 0..30 {
            let inst = gen_lpn(6, 0.3, 25, seed).unwrap();
            let agreements = |m: u64| {
                inst.samples
                    .iter()
                    .filter(|(a, b)| ((a.to_index() & m).count_ones() % 2 == 1) == *b)
                    .count()
            };
            let brute = (0..64u64)
                .fold((0u64, 0usize), |(bm, bc), m| {
                    let c = agreements(m);
                    if c > bc {
                        (m, c)
                    } else {
                        (bm, bc)
                    }
                })
                .0;
            assert_eq!(solve_ml(&inst).unwrap().to_index(), brute);
        }
    }

    #[test]
    fn noiseless_spanning_instances_always_solved() {
        let stats = estimate_alpha(10, 0.0, 30, 1000, 2).unwrap();
        assert_eq!(stats.successes, 1000);
    }

    #[test]
    fn pure_noise_success_is_chance_level() {
        let k = 6;
        let trials = 2000;
        let stats = estimate_alpha(k, 0.5, 30, trials, 5).unwrap();
        let p = 1.0 / 64.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((stats.alpha_hat - p).abs() <= 3.0 * sigma, "{stats:?}");
    }

    #[test]
    fn stats_are_deterministic() {
        let a = estimate_alpha(8, 0.2, 40, 300, 77).unwrap();
        let b = estimate_alpha(8, 0.2, 40, 300, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stats_formula() {
        let s = SolverStats::from_counts(30, 100);
        assert_eq!(s.alpha_hat, 0.3);
        assert!((s.ci_halfwidth - 1.96 * (0.21f64 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csv_roundtrip() {
        let inst = gen_lpn(5, 0.125, 12, 3).unwrap();
        let back = LpnInstance::from_csv(&inst.to_csv()).unwrap();
        assert_eq!(inst, back);
        assert!(LpnInstance::from_csv("# k=3,delta=0.1\na_bits,b\n01,1\n").is_err());
    }
}
