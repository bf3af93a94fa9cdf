//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command as Process;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use smoothlab::gf2::{GF2Vector, LinearCode};
use smoothlab::reduction::{run_experiment, ReductionReport};
use smoothlab::rng;
use smoothlab::smoothing::{small_code_condition, smooths_check, verify_achievability, Verdict};
use smoothlab::spectral::{
    fwht_forward, kbound_check, kbound_fit, krawtchouk, walsh_hadamard_in_place,
    KrawtchoukBoundParams, Pmf,
};
use smoothlab_cli::suite::{random_code, random_pmf};
use smoothlab_cli::{cmd_reduction, cmd_verify_bounds, ExperimentConfig};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion(no: usize, name: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; too slow")),
        Err(d) => (false, d),
    };
    println!(
        "criterion {no} [{}] {name}: {detail} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn codeword_syndrome_identity() -> Check {
    let mut r = rng::seeded(101);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = 4 + i % 11;
        let code = random_code(n, &mut r).map_err(|e| e.to_string())?;
        let p = random_pmf(n, &mut r).map_err(|e| e.to_string())?;
        let rep = smooths_check(&code, &p).map_err(|e| format!("n={n}: {e}"))?;
        worst = worst.max(rep.residual());
    }
    ensure(worst <= 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!(
        "200 instances, n in [4, 14], max residual {worst:e}"
    ))
}

fn bias_formula() -> Check {
    let mut r = rng::seeded(102);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let n = 1 + i % 14;
        let p = random_pmf(n, &mut r).map_err(|e| e.to_string())?;
        let e = r.gen_range(0..1usize << n);
        let spectral = p.spectrum().bias(e);
        let odd = p.probability(|z| (z & e).count_ones() % 2 == 1);
        worst = worst.max((spectral - (0.5 - odd)).abs());
    }
    ensure(worst <= 1e-12, || format!("max gap {worst:e}"))?;
    Ok(format!("500 (P, e) pairs, n <= 14, max gap {worst:e}"))
}

fn krawtchouk_identities() -> Check {
    let mut checked = 0usize;
    for n in 0..=16usize {
        let len = 1usize << n;
        for w in 0..=n {
            let kw: Vec<i64> = (0..=n)
                .map(|i| {
                    i64::try_from(krawtchouk(n, w, i).expect("in range")).expect("fits in i64")
                })
                .collect();
            let mut ind: Vec<i64> = (0..len)
                .map(|x| i64::from(x.count_ones() as usize == w))
                .collect();
            walsh_hadamard_in_place(&mut ind).map_err(|e| e.to_string())?;
            let real: Vec<f64> = (0..len)
                .map(|x| {
                    if x.count_ones() as usize == w {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let spectrum = fwht_forward(&real).map_err(|e| e.to_string())?;
            for (x, &value) in ind.iter().enumerate() {
                let i = x.count_ones() as usize;
                ensure(value == kw[i], || {
                    format!("integer transform n={n} w={w} x={x}")
                })?;
                let scaled = spectrum.get(x) * len as f64;
                ensure(
                    scaled.round() as i64 == kw[i] && (scaled - scaled.round()).abs() < 1e-6,
                    || format!("float round-trip n={n} w={w} x={x}: {scaled}"),
                )?;
            }
            for i in 0..=n {
                let sign = if w % 2 == 0 { 1 } else { -1 };
                ensure(kw[i] == sign * kw[n - i], || {
                    format!("reflection n={n} w={w} i={i}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "sphere transforms and {checked} reflection pairs for n <= 16"
    ))
}

fn krawtchouk_certification() -> Check {
    let params = KrawtchoukBoundParams::new(1.0, 0.16).map_err(|e| e.to_string())?;
    let big = kbound_check(300, &params);
    ensure(big.holds, || {
        format!("n=300 fails: worst ratio {}", big.worst_ratio)
    })?;
    let mut fitted = Vec::new();
    for n in 8..=14 {
        let fit = kbound_fit(n, 0.3).map_err(|e| e.to_string())?;
        ensure(
            fit.certified_n == Some(n) && kbound_check(n, &fit).holds,
            || format!("fit at n={n} not certified"),
        )?;
        fitted.push(format!("{n}:{}", fit.constant));
    }
    Ok(format!(
        "n=300 C=1 c=0.16 holds (worst ratio {}); fitted C at c=0.3: {}",
        big.worst_ratio,
        fitted.join(" ")
    ))
}

fn bound_suites() -> Check {
    let mut cfg = ExperimentConfig::new();
    cfg.set("instances", "500").unwrap();
    cfg.set("n", "8..=14").unwrap();
    cfg.set("seed", "7").unwrap();
    let report = cmd_verify_bounds(&cfg).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for kind in ["flatness", "dual_bound", "theorem", "chain"] {
        let rows: Vec<&str> = report
            .csv
            .lines()
            .filter(|l| l.starts_with(&format!("{kind},")))
            .collect();
        let holds = rows.iter().filter(|l| l.ends_with(",true")).count();
        let violated = rows.iter().filter(|l| l.ends_with(",false")).count();
        ensure(violated == 0, || format!("{kind}: {violated} violations"))?;
        ensure(holds == 500, || {
            format!(
                "{kind}: only {holds} of {} rows with valid hypotheses",
                rows.len()
            )
        })?;
        summary.push(format!("{kind} {holds}/500"));
    }
    ensure(report.violations == 0, || {
        format!("{} violations", report.violations)
    })?;
    Ok(format!(
        "zero violations; valid instances: {}",
        summary.join(", ")
    ))
}

struct AchievabilityTally {
    instances: usize,
    bias_exact: usize,
    tv_within: usize,
    codeword_errors: usize,
    /// Instances with `e` outside the code where the distance bound fails.
    tv_fail_outside: usize,
}

fn achievability_tally(code: &LinearCode, gammas: &[f64]) -> AchievabilityTally {
    let n = code.n();
    let records: Vec<(Verdict, bool, bool, bool)> = (1..1usize << n)
        .into_par_iter()
        .filter(|e| 2 * (e.count_ones() as usize) < n)
        .flat_map_iter(|e| {
            let ev = GF2Vector::from_index(e as u64, n);
            let in_code = code.contains(&ev).expect("length n");
            gammas
                .iter()
                .map(move |&g| {
                    let rec = verify_achievability(code, &ev, g).expect("valid input");
                    (rec.verdict, rec.bias_ok, rec.tv_ok, in_code)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    AchievabilityTally {
        instances: records.len(),
        bias_exact: records.iter().filter(|r| r.1).count(),
        tv_within: records.iter().filter(|r| r.2).count(),
        codeword_errors: records.iter().filter(|r| r.3).count(),
        tv_fail_outside: records.iter().filter(|r| !r.2 && !r.3).count(),
    }
}

fn achievability() -> Check {
    let gammas = [0.1, 0.5, 0.9];
    let mut notes = Vec::new();

    // literal criterion: k = n/2 and the small-code hypothesis
    let mut literal = 0;
    for n in [8, 10, 12, 14] {
        if small_code_condition(n, n / 2) {
            let code = LinearCode::random(n, n / 2, n as u64).map_err(|e| e.to_string())?;
            let t = achievability_tally(&code, &gammas);
            ensure(
                t.bias_exact == t.instances && t.tv_within == t.instances,
                || format!("n={n}: bound failed"),
            )?;
            literal += t.instances;
        }
    }
    notes.push(format!(
        "k = n/2 instances meeting |C| < 2^(n-1)/V_n(2): {literal} (hypothesis fails at every n)"
    ));

    // same codes with the hypothesis ignored: bias exactness still required
    let mut unconditioned = Vec::new();
    for n in [8, 10, 12, 14] {
        let code = LinearCode::random(n, n / 2, n as u64).map_err(|e| e.to_string())?;
        let t = achievability_tally(&code, &gammas);
        ensure(t.bias_exact == t.instances, || {
            format!("n={n}: bias formula off")
        })?;
        unconditioned.push(format!(
            "n={n}: tv bound {}/{} (e in C: {}, failures with e outside C: {})",
            t.tv_within, t.instances, t.codeword_errors, t.tv_fail_outside
        ));
    }
    notes.push(format!(
        "k = n/2 without the hypothesis, bias exact everywhere; {}",
        unconditioned.join(", ")
    ));

    // largest k that satisfies the hypothesis
    let mut largest = Vec::new();
    for n in [8, 10, 12, 14] {
        let k = (1..n)
            .rev()
            .find(|&k| small_code_condition(n, k))
            .ok_or("no admissible k")?;
        let code = LinearCode::random(n, k, 1000 + n as u64).map_err(|e| e.to_string())?;
        let t = achievability_tally(&code, &gammas);
        ensure(t.bias_exact == t.instances, || {
            format!("n={n} k={k}: bias formula off")
        })?;
        ensure(t.tv_fail_outside == 0, || {
            format!(
                "n={n} k={k}: tv bound failed {} times with e outside C",
                t.tv_fail_outside
            )
        })?;
        largest.push(format!(
            "n={n} k={k} {}/{} (rest have e in C: {})",
            t.tv_within, t.instances, t.codeword_errors
        ));
    }
    notes.push(format!(
        "largest admissible k, all hypotheses valid: {}",
        largest.join(", ")
    ));
    Ok(notes.join("; "))
}

fn reduction_line(rep: &ReductionReport) -> String {
    format!(
        "n={} k={} gamma={} N={}: success {:.4} >= alpha_hat {:.4} - N eps {:.4} - 3 sigma {:.4} [{}]",
        rep.n,
        rep.k,
        rep.gamma,
        rep.n_samples,
        rep.success_rate,
        rep.alpha_hat(),
        rep.n_samples as f64 * rep.eps_exact,
        3.0 * rep.sigma,
        rep.verdict.as_str()
    )
}

fn reduction_guarantee() -> Check {
    let code = LinearCode::random(12, 6, 2024).map_err(|e| e.to_string())?;
    let rep = run_experiment(&code, 1, 0.6, 40, 2000, 9).map_err(|e| e.to_string())?;
    ensure(rep.within_guarantee_band(), || reduction_line(&rep))?;
    ensure(rep.eps_exact + 1e-12 >= rep.tv_message, || {
        "eps below message distance".into()
    })?;
    // a configuration where N eps < alpha_hat, so the band is not vacuous
    let small = LinearCode::random(12, 2, 2025).map_err(|e| e.to_string())?;
    let side = run_experiment(&small, 1, 0.02, 20, 2000, 9).map_err(|e| e.to_string())?;
    ensure(side.within_guarantee_band(), || reduction_line(&side))?;
    ensure(side.guarantee > 0.0, || {
        format!("reference guarantee vacuous: {}", reduction_line(&side))
    })?;
    Ok(format!(
        "{}; {}",
        reduction_line(&rep),
        reduction_line(&side)
    ))
}

fn naive_spectrum(f: &[f64]) -> Vec<f64> {
    let len = f.len();
    (0..len)
        .map(|y| {
            let s: f64 = (0..len)
                .map(|x| {
                    if (x & y).count_ones() % 2 == 0 {
                        f[x]
                    } else {
                        -f[x]
                    }
                })
                .sum();
            s / len as f64
        })
        .collect()
}

fn fwht() -> Check {
    let mut r = rng::seeded(108);
    let mut worst: f64 = 0.0;
    for n in 0..=10 {
        let f: Vec<f64> = (0..1usize << n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let fast = fwht_forward(&f).map_err(|e| e.to_string())?;
        for (a, b) in fast.coef().iter().zip(naive_spectrum(&f)) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || {
        format!("max deviation from naive {worst:e}")
    })?;
    let big = Pmf::uniform(22).map_err(|e| e.to_string())?;
    let mut data: Vec<f64> = big.mass().iter().map(|m| m * r.gen::<f64>()).collect();
    data[0] += 1.0;
    let start = Instant::now();
    let s = fwht_forward(&data).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(s.coef().len() == 1 << 22, || "wrong length".into())?;
    ensure(secs < 1.0, || {
        format!("n = 22 forward transform took {secs:.3} s")
    })?;
    Ok(format!(
        "max deviation {worst:e} at n <= 10; n = 22 forward transform {secs:.3} s"
    ))
}

fn determinism() -> Check {
    let mut red = ExperimentConfig::new();
    red.set("seed", "5").unwrap();
    let mut vb = ExperimentConfig::new();
    vb.set("seed", "5").unwrap();
    let a = cmd_reduction(&red).map_err(|e| e.to_string())?;
    let b = cmd_reduction(&red).map_err(|e| e.to_string())?;
    ensure(a.csv == b.csv, || "reduction CSV differs".into())?;
    let c = cmd_verify_bounds(&vb).map_err(|e| e.to_string())?;
    let d = cmd_verify_bounds(&vb).map_err(|e| e.to_string())?;
    ensure(c.csv == d.csv, || "verify-bounds CSV differs".into())?;

    // the binary, with different worker pool sizes
    let bin = env!("CARGO_BIN_EXE_smoothlab");
    let run = |args: &[&str], threads: &str| -> Result<Vec<u8>, String> {
        let out = Process::new(bin)
            .args(args)
            .env("SMOOTHLAB_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        Ok(out.stdout)
    };
    let red_args = ["reduction", "--seed", "5", "--trials", "500"];
    let vb_args = ["verify-bounds", "--seed", "5", "--set", "instances=100"];
    ensure(run(&red_args, "1")? == run(&red_args, "4")?, || {
        "binary reduction output differs".into()
    })?;
    ensure(run(&vb_args, "1")? == run(&vb_args, "4")?, || {
        "binary verify-bounds output differs".into()
    })?;
    Ok(format!(
        "identical CSV across runs ({} + {} bytes) and across 1 vs 4 threads",
        a.csv.len(),
        c.csv.len()
    ))
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        criterion(
            1,
            "codeword/syndrome smoothing identity",
            secs(10),
            codeword_syndrome_identity,
        ),
        criterion(2, "bias as a Fourier coefficient", secs(5), bias_formula),
        criterion(
            3,
            "sphere transform and Krawtchouk reflection",
            secs(10),
            krawtchouk_identities,
        ),
        criterion(
            4,
            "Krawtchouk bound certification",
            secs(60),
            krawtchouk_certification,
        ),
        criterion(
            5,
            "flatness, dual bound, main bound and chain suites",
            secs(300),
            bound_suites,
        ),
        criterion(6, "mixture achievability", secs(120), achievability),
        criterion(
            7,
            "reduction success guarantee",
            secs(600),
            reduction_guarantee,
        ),
        criterion(8, "fast transform accuracy and speed", secs(10), fwht),
        criterion(9, "reproducible CSV", secs(300), determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
