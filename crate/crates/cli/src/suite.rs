//! Random instance generators for the bound-verification suites.
//!
//! Instance `i` of each kind draws from its own ChaCha stream, so suites can
//! be evaluated in parallel and still reproduce exactly.

use std::collections::BTreeMap;

use rand::Rng;
use smoothlab::gf2::LinearCode;
use smoothlab::rng;
use smoothlab::smoothing::{
    achievability_dist, data_processing_chain, theorem_bound, verify_dual_bound, verify_flatness,
    BoundCertificate, ChainRecord, FlatnessRecord,
};
use smoothlab::spectral::{
    convolve, kbound_fit, pushforward, tv_to_uniform, KrawtchoukBoundParams, Pmf,
};
use smoothlab::Result;

const FLATNESS_TAG: u64 = 1;
const DUAL_TAG: u64 = 2;
const THEOREM_TAG: u64 = 3;
const CHAIN_TAG: u64 = 4;
const MAX_ATTEMPTS: usize = 1000;

/// Random `[n, k]` code with `1 <= k < n`.
pub fn random_code<R: Rng + ?Sized>(n: usize, r: &mut R) -> Result<LinearCode> {
    let k = r.gen_range(1..n);
    LinearCode::random(n, k, r.gen())
}

/// Draw from a mix of structured laws (mixtures, i.i.d. noise, spheres,
/// point masses) and sparse random weight vectors.
pub fn random_pmf<R: Rng + ?Sized>(n: usize, r: &mut R) -> Result<Pmf> {
    match r.gen_range(0..6) {
        0 => achievability_dist(n, r.gen()),
        1 => Pmf::bernoulli_product(n, r.gen_range(0.0..0.5)),
        2 => Pmf::sphere_uniform(n, r.gen_range(0..=n)),
        3 => Pmf::delta(n, r.gen_range(0..1usize << n)),
        4 => {
            let a = Pmf::bernoulli_product(n, r.gen_range(0.0..0.5))?;
            let b = Pmf::sphere_uniform(n, r.gen_range(1..=n))?;
            let t = r.gen::<f64>();
            Pmf::mixture(&[(t, &a), (1.0 - t, &b)])
        }
        _ => {
            let sparsity = r.gen::<f64>();
            let mut w: Vec<f64> = (0..1usize << n)
                .map(|_| if r.gen_bool(sparsity) { 0.0 } else { r.gen() })
                .collect();
            let spike = r.gen_range(0..w.len());
            w[spike] += r.gen::<f64>() + 1e-3;
            Pmf::from_weights(w)
        }
    }
}

/// Suite settings shared by every instance kind.
#[derive(Clone, Debug)]
pub struct Suite {
    pub n_values: Vec<usize>,
    pub seed: u64,
    /// Fixed smoothing level; `None` uses each instance's exact distance.
    pub eps: Option<f64>,
    /// Fixed weight; `None` draws `w` uniformly from `[1, c n]`.
    pub w: Option<usize>,
    params: BTreeMap<usize, KrawtchoukBoundParams>,
}

impl Suite {
    /// Fit certified Krawtchouk constants with weight fraction `c` at every `n`.
    pub fn new(n_values: Vec<usize>, c: f64, seed: u64) -> Result<Self> {
        let params = n_values
            .iter()
            .map(|&n| Ok((n, kbound_fit(n, c)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_values,
            seed,
            eps: None,
            w: None,
            params,
        })
    }

    pub fn params(&self, n: usize) -> &KrawtchoukBoundParams {
        &self.params[&n]
    }

    pub fn fitted(&self) -> impl Iterator<Item = (&usize, &KrawtchoukBoundParams)> {
        self.params.iter()
    }

    fn pick_n<R: Rng + ?Sized>(&self, r: &mut R) -> usize {
        self.n_values[r.gen_range(0..self.n_values.len())]
    }

    fn pick_w<R: Rng + ?Sized>(&self, n: usize, r: &mut R) -> usize {
        self.w
            .unwrap_or_else(|| r.gen_range(1..=self.params(n).max_weight(n).max(1)))
    }

    /// Flatness record together with the code dimension `k`.
    pub fn flatness(&self, i: u64) -> Result<(usize, FlatnessRecord)> {
        let mut r = rng::stream(rng::derive_seed(self.seed, FLATNESS_TAG), i);
        let n = self.pick_n(&mut r);
        let code = random_code(n, &mut r)?;
        let rho = random_pmf(n, &mut r)?;
        let eps = match self.eps {
            Some(e) => e,
            None => tv_to_uniform(&convolve(&Pmf::code_uniform(&code)?, &rho)?),
        };
        Ok((code.k(), verify_flatness(&code, &rho, eps)?))
    }

    /// Codes are resampled until `2 d⊥ < n`.
    pub fn dual_bound(&self, i: u64) -> Result<BoundCertificate> {
        let mut r = rng::stream(rng::derive_seed(self.seed, DUAL_TAG), i);
        let n = self.pick_n(&mut r);
        let mut code = random_code(n, &mut r)?;
        for _ in 0..MAX_ATTEMPTS {
            if 2 * code.dual_distance()? < n {
                break;
            }
            code = random_code(n, &mut r)?;
        }
        let rho = random_pmf(n, &mut r)?;
        let w = self.pick_w(n, &mut r);
        let eps = match self.eps {
            Some(e) => e,
            None => tv_to_uniform(&convolve(&Pmf::code_uniform(&code.dual())?, &rho)?),
        };
        verify_dual_bound(&code, &rho, w, eps, self.params(n))
    }

    pub fn theorem(&self, i: u64) -> Result<BoundCertificate> {
        let mut r = rng::stream(rng::derive_seed(self.seed, THEOREM_TAG), i);
        let n = self.pick_n(&mut r);
        let code = random_code(n, &mut r)?;
        let p = match r.gen_range(0..3) {
            0 => achievability_dist(n, r.gen())?,
            1 => Pmf::bernoulli_product(n, r.gen_range(0.0..0.5))?,
            _ => random_pmf(n, &mut r)?,
        };
        let w = self.pick_w(n, &mut r);
        let eps = match self.eps {
            Some(e) => e,
            None => tv_to_uniform(&pushforward(code.generator(), &p)?),
        };
        theorem_bound(&code, &p, w, eps, self.params(n))
    }

    pub fn chain(&self, i: u64) -> Result<(usize, usize, ChainRecord)> {
        let mut r = rng::stream(rng::derive_seed(self.seed, CHAIN_TAG), i);
        let n = self.pick_n(&mut r);
        let code = random_code(n, &mut r)?;
        let p = random_pmf(n, &mut r)?;
        Ok((n, code.k(), data_processing_chain(&code, &p)?))
    }
}
