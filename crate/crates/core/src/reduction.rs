//! Worst-case decoding to LPN, run end to end.
//!
//! Given `y = G^T m + e` with `|e| = w`, the reduction shifts `y` by a random
//! codeword `G^T m'`, draws `Z_i ~ P`, and hands the solver the samples
//! `(G Z_i, Z_i^T (y + G^T m'))`. Because
//! `Z_i^T (G^T (m + m') + e) = (G Z_i)^T (m + m') + e^T Z_i`, these are LPN
//! samples for the secret `m + m'` whose labels carry the noise bit
//! `e^T Z_i`. The solver's answer shifted back by `m'` is scored as a WDP
//! solution.
//!
//! The planted error is known to the harness (never to the solver), which
//! makes the smoothing distance `ε` exactly computable.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{GF2Vector, LinearCode};
use crate::lpn::{self, SolverStats, MAX_SOLVER_K};
use crate::rng;
use crate::smoothing::achievability_dist;
use crate::spectral::{
    bias_of, joint_pushforward, pushforward, tv_distance, tv_to_uniform, Pmf, PmfSampler,
};
use crate::TOLERANCE;

/// A decoding instance `y = G^T m + e`, with the planted pair kept for scoring.
#[derive(Clone, Debug)]
pub struct WdpInstance {
    pub code: LinearCode,
    pub y: GF2Vector,
    pub w: usize,
    pub planted_m: Option<GF2Vector>,
    pub planted_e: Option<GF2Vector>,
}

impl WdpInstance {
    /// Whether `m` solves the instance, i.e. `|y + G^T m| = w`.
    pub fn is_solution(&self, m: &GF2Vector) -> Result<bool> {
        let residual = self.y.xor(&self.code.encode(m)?)?;
        Ok(residual.weight() == self.w)
    }
}

/// Plant a uniform message and a uniform weight-`w` error.
pub fn gen_wdp(code: &LinearCode, w: usize, seed: u64) -> Result<WdpInstance> {
    if w > code.n() {
        return Err(Error::InvalidParameter(format!(
            "error weight {w} > n = {}",
            code.n()
        )));
    }
    let mut r = rng::seeded(seed);
    let m = GF2Vector::random(code.k(), &mut r);
    let e = GF2Vector::random_of_weight(code.n(), w, &mut r);
    let y = code.encode(&m)?.xor(&e)?;
    Ok(WdpInstance {
        code: code.clone(),
        y,
        w,
        planted_m: Some(m),
        planted_e: Some(e),
    })
}

/// One LPN sample built from `z`: `(G z, z^T shifted_y)`.
pub fn lpn_sample(
    code: &LinearCode,
    shifted_y: &GF2Vector,
    z: &GF2Vector,
) -> Result<(GF2Vector, bool)> {
    Ok((code.generator().mat_vec_mul(z)?, z.dot(shifted_y)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionOutcome {
    pub candidate: GF2Vector,
    pub success: bool,
}

fn check_caps(inst: &WdpInstance) -> Result<()> {
    if inst.code.k() > MAX_SOLVER_K {
        return Err(Error::EnumerationCap {
            what: "LPN secret length",
            value: inst.code.k(),
            cap: MAX_SOLVER_K,
        });
    }
    Ok(())
}

fn reduce_with<R: Rng + ?Sized>(
    inst: &WdpInstance,
    sampler: &PmfSampler,
    n_samples: usize,
    r: &mut R,
) -> Result<ReductionOutcome> {
    let code = &inst.code;
    let k = code.k();
    let shift = GF2Vector::random(k, r);
    let shifted = inst.y.xor(&code.encode(&shift)?)?;
    let cols = code.generator().column_masks();
    let y_word = shifted.to_index();
    let samples = (0..n_samples).map(|_| {
        let z = sampler.sample(r) as u64;
        let a = (0..cols.len())
            .filter(|j| z >> j & 1 == 1)
            .fold(0u64, |acc, j| acc ^ cols[j]);
        (a, (z & y_word).count_ones() % 2 == 1)
    });
    let solution = lpn::solve_ml_encoded(k, samples.collect::<Vec<_>>());
    let candidate = GF2Vector::from_index(solution, k).xor(&shift)?;
    let success = inst.is_solution(&candidate)?;
    Ok(ReductionOutcome { candidate, success })
}

/// Run the reduction once with `n_samples` draws from `p`.
pub fn reduce_once(
    inst: &WdpInstance,
    p: &Pmf,
    n_samples: usize,
    seed: u64,
) -> Result<ReductionOutcome> {
    Error::check_dim(inst.code.n(), p.n())?;
    check_caps(inst)?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    reduce_with(inst, &p.sampler(), n_samples, &mut rng::seeded(seed))
}

/// Threshold `bias >= constant * k^{-exponent}` standing in for
/// "at least inverse-polynomial in k".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasThreshold {
    pub exponent: f64,
    pub constant: f64,
}

impl Default for BiasThreshold {
    fn default() -> Self {
        Self {
            exponent: 1.0,
            constant: 1.0,
        }
    }
}

impl BiasThreshold {
    pub fn value(&self, k: usize) -> f64 {
        self.constant * (k as f64).powf(-self.exponent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuaranteeVerdict {
    /// `N ε < α̂` and the success rate clears the guarantee band.
    Ok,
    /// `N ε >= α̂` or zero bias: the union bound promises nothing useful.
    NoGuarantee,
    /// `N ε < α̂` yet the success rate falls below the band.
    Violated,
}

impl GuaranteeVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            GuaranteeVerdict::Ok => "ok",
            GuaranteeVerdict::NoGuarantee => "no_guarantee",
            GuaranteeVerdict::Violated => "violated",
        }
    }
}

/// Everything measured in one reduction experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub n: usize,
    pub k: usize,
    pub w: usize,
    pub n_samples: usize,
    pub gamma: f64,
    /// Noise rate of the induced LPN problem, `1/2 - bias`.
    pub delta: f64,
    /// `d_tv(P_{GZ, e^T Z}, U_k × Ber(δ))` for the planted `e`.
    pub eps_exact: f64,
    /// `d_tv(P_{GZ}, U_k)`
    pub tv_message: f64,
    pub bias: f64,
    pub alpha: SolverStats,
    /// `α̂ - N ε`
    pub guarantee: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Standard error of `success_rate - α̂`.
    pub sigma: f64,
    /// `tv_message < α̂ / N`
    pub meaningful_syndrome: bool,
    pub meaningful_bias: bool,
    pub verdict: GuaranteeVerdict,
}

impl ReductionReport {
    pub const CSV_HEADER: &'static str = "n,k,w,N,gamma,delta,eps_exact,bias,alpha_hat,guarantee,success_rate,meaningful_syndrome,meaningful_bias,verdict";

    pub fn alpha_hat(&self) -> f64 {
        self.alpha.alpha_hat
    }

    /// `success_rate >= α̂ - N ε - 3σ`.
    pub fn within_guarantee_band(&self) -> bool {
        self.success_rate >= self.guarantee - 3.0 * self.sigma
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.w,
            self.n_samples,
            self.gamma,
            self.delta,
            self.eps_exact,
            self.bias,
            self.alpha.alpha_hat,
            self.guarantee,
            self.success_rate,
            self.meaningful_syndrome,
            self.meaningful_bias,
            self.verdict.as_str()
        )
    }
}

/// [`run_experiment_with`] using the default bias threshold `1/k`.
pub fn run_experiment(
    code: &LinearCode,
    w: usize,
    gamma: f64,
    n_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<ReductionReport> {
    run_experiment_with(
        code,
        w,
        gamma,
        n_samples,
        trials,
        seed,
        BiasThreshold::default(),
    )
}

/// Plant a WDP instance, smooth with the mixture distribution at `gamma`,
/// compute `ε` exactly, estimate the solver's `α̂` on genuine LPN at the
/// induced noise rate, and run `trials` independent reductions.
pub fn run_experiment_with(
    code: &LinearCode,
    w: usize,
    gamma: f64,
    n_samples: usize,
    trials: usize,
    seed: u64,
    threshold: BiasThreshold,
) -> Result<ReductionReport> {
    if trials == 0 || n_samples == 0 {
        return Err(Error::InvalidParameter(
            "trials and sample count must be positive".into(),
        ));
    }
    let (n, k) = (code.n(), code.k());
    let p = achievability_dist(n, gamma)?;
    let inst = gen_wdp(code, w, rng::derive_seed(seed, 1))?;
    check_caps(&inst)?;
    let e = inst.planted_e.as_ref().expect("planted");

    let bias = bias_of(e, &p)?;
    if bias < -TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "planted error has negative bias {bias}; use |e| <= n/2"
        )));
    }
    let delta = (0.5 - bias).clamp(0.0, 0.5);
    let joint = joint_pushforward(code.generator(), e, &p)?;
    let target = Pmf::uniform(k)?.product(&Pmf::bernoulli(delta)?)?;
    let eps_exact = tv_distance(&joint, &target)?;
    let tv_message = tv_to_uniform(&pushforward(code.generator(), &p)?);

    let alpha = lpn::estimate_alpha(k, delta, n_samples, trials, rng::derive_seed(seed, 2))?;

    let sampler = p.sampler();
    let reduce_seed = rng::derive_seed(seed, 3);
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| reduce_with(&inst, &sampler, n_samples, &mut rng::stream(reduce_seed, t)))
        .collect::<Result<Vec<_>>>()?;
    let successes = outcomes.iter().filter(|o| o.success).count();
    let success_rate = successes as f64 / trials as f64;

    let alpha_hat = alpha.alpha_hat;
    let guarantee = alpha_hat - n_samples as f64 * eps_exact;
    let success_var = success_rate * (1.0 - success_rate) / trials as f64;
    let sigma = (alpha.sigma().powi(2) + success_var).sqrt();
    // at δ = 1/2 the labels carry no information about the secret
    let verdict = if n_samples as f64 * eps_exact >= alpha_hat || bias <= TOLERANCE {
        GuaranteeVerdict::NoGuarantee
    } else if success_rate >= guarantee - 3.0 * sigma {
        GuaranteeVerdict::Ok
    } else {
        GuaranteeVerdict::Violated
    };

    Ok(ReductionReport {
        n,
        k,
        w,
        n_samples,
        gamma,
        delta,
        eps_exact,
        tv_message,
        bias,
        alpha,
        guarantee,
        trials,
        successes,
        success_rate,
        sigma,
        meaningful_syndrome: tv_message < alpha_hat / n_samples as f64,
        meaningful_bias: bias >= threshold.value(k),
        verdict,
    })
}
