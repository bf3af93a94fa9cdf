//! Smoothing checks and exhaustive verifiers for the finite-length bounds
//! relating smoothing quality to the bias of parities `e^T Z`.
//!
//! Every verifier checks its own hypotheses and reports a [`Verdict`] that
//! separates "hypothesis violated" (the bound makes no claim) from "bound
//! violated" (a genuine counterexample, which should never happen).

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::gf2::{GF2Vector, LinearCode};
use crate::spectral::{
    self, ball_volume, binomial, convolve, joint_pushforward, kbound_check, pushforward,
    tv_distance, tv_to_uniform, KrawtchoukBoundParams, Pmf, Spectrum,
};
use crate::TOLERANCE;

/// Outcome of a bound verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    BoundViolated,
    /// Hypotheses of the statement do not hold; the reasons are listed.
    HypothesisFailed(Vec<String>),
}

impl Verdict {
    fn decide(failures: Vec<String>, holds: bool) -> Self {
        if !failures.is_empty() {
            Verdict::HypothesisFailed(failures)
        } else if holds {
            Verdict::Holds
        } else {
            Verdict::BoundViolated
        }
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::BoundViolated)
    }

    pub fn hypotheses_hold(&self) -> bool {
        !matches!(self, Verdict::HypothesisFailed(_))
    }

    /// `true`, `false` or `hyp_fail`.
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "true",
            Verdict::BoundViolated => "false",
            Verdict::HypothesisFailed(_) => "hyp_fail",
        }
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn pow2(e: usize) -> f64 {
    2f64.powi(e as i32)
}

/// The three smoothing distances of one `(code, P_Z)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingReport {
    pub n: usize,
    pub k: usize,
    /// `d_tv(P_{X_C + Z}, U_n)`
    pub tv_codeword: f64,
    /// `d_tv(P_{HZ}, U_{n-k})`
    pub tv_syndrome: f64,
    /// `d_tv(P_{GZ}, U_k)`
    pub tv_message: f64,
}

impl SmoothingReport {
    /// `|tv_codeword - tv_syndrome|`, zero up to roundoff.
    pub fn residual(&self) -> f64 {
        (self.tv_codeword - self.tv_syndrome).abs()
    }
}

/// Compute codeword, syndrome and message smoothing distances. Fails if the
/// codeword and syndrome forms disagree by more than [`TOLERANCE`].
pub fn smooths_check(code: &LinearCode, p: &Pmf) -> Result<SmoothingReport> {
    Error::check_dim(code.n(), p.n())?;
    let tv_codeword = tv_to_uniform(&convolve(&Pmf::code_uniform(code)?, p)?);
    let tv_syndrome = tv_to_uniform(&pushforward(code.parity_check(), p)?);
    let tv_message = tv_to_uniform(&pushforward(code.generator(), p)?);
    let report = SmoothingReport {
        n: code.n(),
        k: code.k(),
        tv_codeword,
        tv_syndrome,
        tv_message,
    };
    if report.residual() > TOLERANCE {
        return Err(Error::IdentityViolated {
            what: "codeword and syndrome smoothing distances differ",
            residual: report.residual(),
        });
    }
    Ok(report)
}

/// `(1 - γ) U_n + γ · uniform(S(0, 1))`.
pub fn achievability_dist(n: usize, gamma: f64) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} outside [0, 1]"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let base = (1.0 - gamma) / pow2(n);
    let spike = gamma / n as f64;
    let mass = (0..1usize << n)
        .map(|x| {
            if x.count_ones() == 1 {
                base + spike
            } else {
                base
            }
        })
        .collect();
    Pmf::from_masses(mass)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AchievabilityRecord {
    pub n: usize,
    pub k: usize,
    pub weight: usize,
    pub gamma: f64,
    pub bias: f64,
    pub bias_predicted: f64,
    /// `d_tv(P_{GZ, e^T Z}, U_k × Ber(1/2 - bias))`
    pub tv_joint: f64,
    pub tv_bound: f64,
    pub bias_ok: bool,
    pub tv_ok: bool,
    pub verdict: Verdict,
}

impl AchievabilityRecord {
    /// Both conclusions hold, independently of the hypotheses.
    pub fn conclusion_holds(&self) -> bool {
        self.bias_ok && self.tv_ok
    }
}

/// Whether `|C| < 2^{n-1} / V_n(2)`, decided in integers.
pub fn small_code_condition(n: usize, k: usize) -> bool {
    let lhs = (BigUint::from(1u32) << k) * ball_volume(n, 2.min(n)).expect("2 <= n");
    lhs < BigUint::from(1u32) << (n - 1)
}

/// Evaluate the mixture distribution against a fixed code and error vector:
/// exact bias of `e^T Z` and joint distance to `U_k × Ber(δ)` with
/// `δ = 1/2 - bias`.
pub fn verify_achievability(
    code: &LinearCode,
    e: &GF2Vector,
    gamma: f64,
) -> Result<AchievabilityRecord> {
    let n = code.n();
    Error::check_dim(n, e.len())?;
    let p = achievability_dist(n, gamma)?;
    let weight = e.weight();

    let mut failures = Vec::new();
    if !small_code_condition(n, code.k()) {
        failures.push(format!("|C| = 2^{} is not below 2^(n-1)/V_n(2)", code.k()));
    }
    if e.is_zero() {
        failures.push("e = 0".into());
    }
    if 2 * weight >= n {
        failures.push(format!("|e| = {weight} is not below n/2"));
    }
    // [G; e^T] must have full rank, otherwise e^T Z is a function of G Z
    if !e.is_zero() && code.contains(e)? {
        failures.push("e is a codeword".into());
    }

    let bias = spectral::bias_of(e, &p)?;
    let ratio = weight as f64 / n as f64;
    let bias_predicted = gamma / 2.0 * (1.0 - 2.0 * ratio);
    let joint = joint_pushforward(code.generator(), e, &p)?;
    let target = Pmf::uniform(code.k())?.product(&Pmf::bernoulli(0.5 - bias)?)?;
    let tv_joint = tv_distance(&joint, &target)?;
    let tv_bound = gamma * (1.5 - ratio);

    let bias_ok = (bias - bias_predicted).abs() <= TOLERANCE;
    let tv_ok = tv_joint <= tv_bound + TOLERANCE;
    Ok(AchievabilityRecord {
        n,
        k: code.k(),
        weight,
        gamma,
        bias,
        bias_predicted,
        tv_joint,
        tv_bound,
        bias_ok,
        tv_ok,
        verdict: Verdict::decide(failures, bias_ok && tv_ok),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessRecord {
    pub n: usize,
    pub distance: usize,
    pub t: usize,
    /// `Σ_{|x| <= t} ρ(x)`
    pub low_tail: f64,
    /// `Σ_{|x| >= n - t} ρ(x)`
    pub high_tail: f64,
    /// `|C_0| V_n(t) / 2^n`
    pub ball_term: f64,
    pub eps: f64,
    pub bound: f64,
    /// Actual `d_tv(P_{C_0} * ρ, U_n)`.
    pub tv_actual: f64,
    pub verdict: Verdict,
}

/// Tail masses of `ρ` near `0` and near the all-ones vector against
/// `|C_0| V_n(t) / 2^n + ε`, where `t = ⌊(d - 1)/2⌋`.
pub fn verify_flatness(c0: &LinearCode, rho: &Pmf, eps: f64) -> Result<FlatnessRecord> {
    let n = c0.n();
    Error::check_dim(n, rho.n())?;
    let distance = c0.min_distance()?;
    let t = (distance - 1) / 2;
    let tv_actual = tv_to_uniform(&convolve(&Pmf::code_uniform(c0)?, rho)?);

    let mut failures = Vec::new();
    if tv_actual > eps + TOLERANCE {
        failures.push(format!(
            "smoothing precondition fails: tv = {tv_actual} > eps = {eps}"
        ));
    }

    let low_tail = rho.probability(|x| x.count_ones() as usize <= t);
    let high_tail = rho.probability(|x| x.count_ones() as usize + t >= n);
    let ball_term = pow2(c0.k()) * big_to_f64(&ball_volume(n, t)?) / pow2(n);
    let bound = ball_term + eps;
    let holds = low_tail <= bound + TOLERANCE && high_tail <= bound + TOLERANCE;
    Ok(FlatnessRecord {
        n,
        distance,
        t,
        low_tail,
        high_tail,
        ball_term,
        eps,
        bound,
        tv_actual,
        verdict: Verdict::decide(failures, holds),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Sphere average of `2^n ρ̂` against the dual-distance bound.
    DualBound,
    /// Worst-case bias at weight `w` against the main bound.
    Theorem,
}

/// Certificate for one evaluation of the dual bound or the main bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub n: usize,
    pub k: usize,
    pub w: usize,
    pub d_dual: usize,
    pub t_dual: usize,
    pub eps: f64,
    pub constant: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Dual-ball term (involves `|C⊥| V_n(t⊥)`).
    pub dual_ball_term: f64,
    /// Krawtchouk term (involves `C n (1 - 2w/n)^{t⊥}`).
    pub krawtchouk_term: f64,
    /// Smoothing term (involves `ε`).
    pub eps_term: f64,
    pub witness_e: Option<GF2Vector>,
    pub verdict: Verdict,
}

impl BoundCertificate {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + TOLERANCE
    }

    pub const CSV_HEADER: &'static str = "n,k,w,d_dual,t_dual,eps,C,lhs,rhs,term1,term2,term3,ok";

    /// One CSV row following [`Self::CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.w,
            self.d_dual,
            self.t_dual,
            self.eps,
            self.constant,
            self.lhs,
            self.rhs,
            self.dual_ball_term,
            self.krawtchouk_term,
            self.eps_term,
            self.verdict.as_str()
        )
    }
}

fn sphere_points(n: usize, w: usize) -> impl Iterator<Item = usize> {
    (0..1usize << n).filter(move |x| x.count_ones() as usize == w)
}

fn check_weight(n: usize, w: usize) -> Result<()> {
    if w > n {
        Err(Error::InvalidParameter(format!("weight {w} > n = {n}")))
    } else {
        Ok(())
    }
}

fn param_failures(n: usize, w: usize, params: &KrawtchoukBoundParams) -> Vec<String> {
    let mut failures = Vec::new();
    let w_max = params.max_weight(n);
    if w > w_max {
        failures.push(format!(
            "w = {w} exceeds c n (c = {}, max {w_max})",
            params.weight_fraction
        ));
    }
    if params.certified_n != Some(n) && !kbound_check(n, params).holds {
        failures.push(format!(
            "Krawtchouk constants (C = {}, c = {}) are not valid at n = {n}",
            params.constant, params.weight_fraction
        ));
    }
    failures
}

/// `(1/C(n,w)) Σ_{|x|=w} 2^n ρ̂(x)` against
/// `|C⊥| V_n(t⊥)/2^{n-1} + C n (1 - 2w/n)^{t⊥} + 2ε`.
pub fn verify_dual_bound(
    code: &LinearCode,
    rho: &Pmf,
    w: usize,
    eps: f64,
    params: &KrawtchoukBoundParams,
) -> Result<BoundCertificate> {
    let n = code.n();
    Error::check_dim(n, rho.n())?;
    check_weight(n, w)?;
    let dual = code.dual();
    let d_dual = dual.min_distance()?;
    let t_dual = (d_dual - 1) / 2;

    let mut failures = Vec::new();
    if 2 * d_dual >= n {
        failures.push(format!("dual distance {d_dual} is not below n/2"));
    }
    failures.extend(param_failures(n, w, params));
    let tv_actual = tv_to_uniform(&convolve(&Pmf::code_uniform(&dual)?, rho)?);
    if tv_actual > eps + TOLERANCE {
        failures.push(format!(
            "smoothing precondition fails: tv = {tv_actual} > eps = {eps}"
        ));
    }

    let spectrum = rho.spectrum();
    let scale = pow2(n);
    let sphere_sum = spectral::stable_sum(sphere_points(n, w).map(|x| scale * spectrum.get(x)));
    let lhs = sphere_sum / big_to_f64(&binomial(n, w));

    let dual_ball_term = pow2(n - code.k()) * big_to_f64(&ball_volume(n, t_dual)?) / pow2(n - 1);
    let base = 1.0 - 2.0 * w as f64 / n as f64;
    let krawtchouk_term = params.constant * n as f64 * base.powi(t_dual as i32);
    let eps_term = 2.0 * eps;
    let rhs = dual_ball_term + krawtchouk_term + eps_term;
    Ok(BoundCertificate {
        kind: BoundKind::DualBound,
        n,
        k: code.k(),
        w,
        d_dual,
        t_dual,
        eps,
        constant: params.constant,
        lhs,
        rhs,
        dual_ball_term,
        krawtchouk_term,
        eps_term,
        witness_e: None,
        verdict: Verdict::decide(failures, lhs <= rhs + TOLERANCE),
    })
}

/// Weight-`w` vector minimizing `|P̂(x)|`, smallest index among ties.
pub fn weakest_parity(spectrum: &Spectrum, w: usize) -> Option<usize> {
    // values within this relative gap count as tied and the lower index wins
    const TIE: f64 = 1e-9;
    let mut best: Option<(f64, usize)> = None;
    for x in sphere_points(spectrum.n(), w) {
        let v = spectrum.get(x).abs();
        if best.is_none_or(|(b, _)| v < b - TIE * b) {
            best = Some((v, x));
        }
    }
    best.map(|(_, x)| x)
}

/// Locate the weight-`w` error vector whose parity is least biased and bound
/// that bias by `√(|C⊥|V_n(t⊥)/2^{n+1}) + (√(Cn)/2)(1-2w/n)^{t⊥/2} + √(ε/2)`.
pub fn theorem_bound(
    code: &LinearCode,
    p: &Pmf,
    w: usize,
    eps: f64,
    params: &KrawtchoukBoundParams,
) -> Result<BoundCertificate> {
    let n = code.n();
    Error::check_dim(n, p.n())?;
    check_weight(n, w)?;
    let d_dual = code.dual_distance()?;
    let t_dual = (d_dual - 1) / 2;

    let mut failures = param_failures(n, w, params);
    let tv_message = tv_to_uniform(&pushforward(code.generator(), p)?);
    if tv_message > eps + TOLERANCE {
        failures.push(format!(
            "smoothing precondition fails: tv = {tv_message} > eps = {eps}"
        ));
    }

    let spectrum = p.spectrum();
    let witness = weakest_parity(&spectrum, w).expect("sphere is non-empty for w <= n");
    let lhs = spectrum.bias(witness).abs();

    let dual_size_ball = pow2(n - code.k()) * big_to_f64(&ball_volume(n, t_dual)?);
    let dual_ball_term = (dual_size_ball / pow2(n + 1)).sqrt();
    let base = (1.0 - 2.0 * w as f64 / n as f64).abs();
    let krawtchouk_term =
        (params.constant * n as f64).sqrt() / 2.0 * base.powf(t_dual as f64 / 2.0);
    let eps_term = (eps / 2.0).sqrt();
    let rhs = dual_ball_term + krawtchouk_term + eps_term;
    Ok(BoundCertificate {
        kind: BoundKind::Theorem,
        n,
        k: code.k(),
        w,
        d_dual,
        t_dual,
        eps,
        constant: params.constant,
        lhs,
        rhs,
        dual_ball_term,
        krawtchouk_term,
        eps_term,
        witness_e: Some(GF2Vector::from_index(witness as u64, n)),
        verdict: Verdict::decide(failures, lhs <= rhs + TOLERANCE),
    })
}

/// Mean of `|bias(x^T Z)|` over the weight-`w` sphere.
pub fn average_bias(p: &Pmf, w: usize) -> Result<f64> {
    let n = p.n();
    if w == 0 || w > n {
        return Err(Error::InvalidParameter(format!(
            "weight {w} outside [1, {n}]"
        )));
    }
    let spectrum = p.spectrum();
    Ok(average_bias_from(&spectrum, w))
}

/// [`average_bias`] on a precomputed spectrum.
pub fn average_bias_from(spectrum: &Spectrum, w: usize) -> f64 {
    let n = spectrum.n();
    let total = spectral::stable_sum(sphere_points(n, w).map(|x| spectrum.bias(x).abs()));
    total / big_to_f64(&binomial(n, w))
}

/// Both sides of the self-smoothing step: `tv(P_{C⊥} * P * P, U_n)` never
/// exceeds `tv(P_{C⊥} * P, U_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

pub fn data_processing_chain(code: &LinearCode, p: &Pmf) -> Result<ChainRecord> {
    Error::check_dim(code.n(), p.n())?;
    let dual = Pmf::code_uniform(&code.dual())?;
    let once = convolve(&dual, p)?;
    let twice = convolve(&once, p)?;
    let lhs = tv_to_uniform(&twice);
    let rhs = tv_to_uniform(&once);
    Ok(ChainRecord {
        lhs,
        rhs,
        verdict: Verdict::decide(Vec::new(), lhs <= rhs + TOLERANCE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::GF2Matrix;
    use crate::spectral::kbound_fit;

    #[test]
    fn uniform_smooths_everything() {
        let code = LinearCode::random(8, 4, 1).unwrap();
        let r = smooths_check(&code, &Pmf::uniform(8).unwrap()).unwrap();
        assert!(r.tv_codeword < 1e-15 && r.tv_syndrome < 1e-15 && r.tv_message < 1e-15);
    }

    #[test]
    fn delta_smoothing_distance() {
        for seed in 0..10 {
            let code = LinearCode::random(7, 3, seed).unwrap();
            let r = smooths_check(&code, &Pmf::delta(7, 0).unwrap()).unwrap();
            let expected = 1.0 - 8.0 / 128.0;
            assert!((r.tv_codeword - expected).abs() < 1e-14);
            assert!((r.tv_syndrome - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn achievability_masses() {
        let u = achievability_dist(4, 0.0).unwrap();
        assert_eq!(u, Pmf::uniform(4).unwrap());
        let s = achievability_dist(4, 1.0).unwrap();
        assert!(tv_distance(&s, &Pmf::sphere_uniform(4, 1).unwrap()).unwrap() < 1e-15);
        let m = achievability_dist(4, 0.5).unwrap();
        assert!((m.get(0b0100) - 0.15625).abs() < 1e-15);
        assert!((m.get(0b0110) - 0.03125).abs() < 1e-15);
        assert!(achievability_dist(4, 1.5).is_err());
    }

    #[test]
    fn achievability_small_example_reports_hypotheses() {
        let code = LinearCode::random(4, 2, 3).unwrap();
        let e: GF2Vector = "0100".parse().unwrap();
        let rec = verify_achievability(&code, &e, 0.5).unwrap();
        assert!((rec.bias - 0.125).abs() < 1e-15);
        assert!(rec.conclusion_holds());
        // |C| = 4 is far above 2^3 / V_4(2) = 8/11
        assert!(matches!(rec.verdict, Verdict::HypothesisFailed(_)));
    }

    #[test]
    fn achievability_gamma_zero() {
        let code = LinearCode::random(10, 2, 5).unwrap();
        let e = GF2Vector::unit(10, 3);
        let rec = verify_achievability(&code, &e, 0.0).unwrap();
        assert!(rec.bias.abs() < 1e-15);
        assert!(rec.tv_joint < 1e-15);
        assert_eq!(rec.verdict, Verdict::Holds);
    }

    #[test]
    fn achievability_needs_e_outside_code() {
        // small code, |e| < n/2, e != 0, but e in C: e^T Z = G Z
        let g = GF2Matrix::from_strings(&["1100000000"]).unwrap();
        let code = LinearCode::from_generator(g).unwrap();
        assert!(small_code_condition(10, 1));
        let e: GF2Vector = "1100000000".parse().unwrap();
        let rec = verify_achievability(&code, &e, 0.1).unwrap();
        assert!(rec.bias_ok);
        assert!(rec.tv_joint > 0.45 && !rec.tv_ok);
        match rec.verdict {
            Verdict::HypothesisFailed(why) => assert_eq!(why, vec!["e is a codeword".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_code_condition_values() {
        // V_10(2) = 56, 2^9 / 56 ≈ 9.14
        assert!(small_code_condition(10, 3));
        assert!(!small_code_condition(10, 4));
        assert!(!small_code_condition(8, 4));
    }

    #[test]
    fn flatness_uniform_and_code_pmf() {
        let code = LinearCode::random(10, 3, 2).unwrap();
        let rec = verify_flatness(&code, &Pmf::uniform(10).unwrap(), 0.0).unwrap();
        assert_eq!(rec.verdict, Verdict::Holds);
        let vt = ball_volume(10, rec.t).unwrap().to_f64().unwrap() / 1024.0;
        assert!((rec.low_tail - vt).abs() < 1e-15);

        let pc = Pmf::code_uniform(&code).unwrap();
        let eps = tv_to_uniform(&convolve(&pc, &pc).unwrap());
        let rec = verify_flatness(&code, &pc, eps).unwrap();
        assert!(rec.low_tail >= 1.0 / 8.0 - 1e-15);
        assert_eq!(rec.verdict, Verdict::Holds);
    }

    #[test]
    fn flatness_precondition_reported_separately() {
        let code = LinearCode::random(10, 3, 2).unwrap();
        let rec = verify_flatness(&code, &Pmf::delta(10, 0).unwrap(), 0.01).unwrap();
        assert!(matches!(rec.verdict, Verdict::HypothesisFailed(_)));
    }

    #[test]
    fn dual_bound_uniform_rho() {
        let params = kbound_fit(12, 0.16).unwrap();
        for seed in 0..20 {
            let code = LinearCode::random(12, 8, seed).unwrap();
            let cert =
                verify_dual_bound(&code, &Pmf::uniform(12).unwrap(), 1, 0.0, &params).unwrap();
            assert!(cert.lhs.abs() < 1e-12);
            assert!(cert.holds());
        }
    }

    #[test]
    fn dual_bound_weight_zero() {
        let params = kbound_fit(12, 0.16).unwrap();
        let code = LinearCode::random(12, 8, 1).unwrap();
        let p = achievability_dist(12, 0.7).unwrap();
        let rho = convolve(&p, &p).unwrap();
        let eps =
            tv_to_uniform(&convolve(&Pmf::code_uniform(&code.dual()).unwrap(), &rho).unwrap());
        let cert = verify_dual_bound(&code, &rho, 0, eps, &params).unwrap();
        assert!((cert.lhs - 1.0).abs() < 1e-12);
        if cert.verdict.hypotheses_hold() {
            assert!(cert.rhs > 1.0);
        }
    }

    #[test]
    fn theorem_uniform_lhs_zero() {
        let params = kbound_fit(10, 0.16).unwrap();
        let code = LinearCode::random(10, 5, 3).unwrap();
        let cert = theorem_bound(&code, &Pmf::uniform(10).unwrap(), 1, 0.0, &params).unwrap();
        assert!(cert.lhs < 1e-15);
        assert_eq!(cert.verdict, Verdict::Holds);
    }

    #[test]
    fn theorem_full_weight_witness_is_all_ones() {
        let params = kbound_fit(8, 0.16).unwrap();
        let code = LinearCode::random(8, 4, 3).unwrap();
        let p = Pmf::bernoulli_product(8, 0.2).unwrap();
        let cert = theorem_bound(&code, &p, 8, 1.0, &params).unwrap();
        assert_eq!(cert.witness_e, Some(GF2Vector::ones(8)));
        let direct = p.spectrum().bias(0xff).abs();
        assert_eq!(cert.lhs, direct);
        // w = 8 > c n, so no claim is made
        assert!(matches!(cert.verdict, Verdict::HypothesisFailed(_)));
    }

    #[test]
    fn theorem_witness_ties_break_low() {
        // radially symmetric pmf: every sphere point ties
        let s = Pmf::bernoulli_product(6, 0.3).unwrap().spectrum();
        assert_eq!(weakest_parity(&s, 2), Some(0b11));
    }

    #[test]
    fn average_bias_examples() {
        assert!(average_bias(&Pmf::uniform(6).unwrap(), 2).unwrap() < 1e-15);
        let p = Pmf::bernoulli_product(6, 0.2).unwrap();
        for w in 1..=6 {
            let expected = 0.5 * 0.6f64.powi(w as i32);
            assert!((average_bias(&p, w).unwrap() - expected).abs() < 1e-14);
        }
        assert!(average_bias(&p, 0).is_err());
        assert!(average_bias(&p, 7).is_err());
    }

    #[test]
    fn chain_on_random_instance() {
        let code = LinearCode::random(9, 4, 8).unwrap();
        let p = achievability_dist(9, 0.4).unwrap();
        let rec = data_processing_chain(&code, &p).unwrap();
        assert_eq!(rec.verdict, Verdict::Holds);
    }
}
