use std::path::Path;

use rayon::prelude::*;
use smoothlab::gf2::LinearCode;
use smoothlab::lpn::estimate_alpha;
use smoothlab::reduction::{run_experiment_with, BiasThreshold, GuaranteeVerdict, ReductionReport};
use smoothlab::rng;
use smoothlab::smoothing::{
    achievability_dist, average_bias_from, smooths_check, weakest_parity, BoundCertificate,
    FlatnessRecord,
};
use smoothlab::spectral::{
    kbound_check, kbound_fit, pushforward, tv_to_uniform, KrawtchoukBoundParams, Pmf,
};
use smoothlab::Error;

use crate::suite::Suite;
use crate::{render, timed, CliError, ExperimentConfig, Report, Row};

fn code_seed(seed: u64, n: usize, k: usize, index: usize) -> u64 {
    rng::derive_seed(rng::derive_seed(seed, index as u64), (n << 16 | k) as u64)
}

fn dims(cfg: &ExperimentConfig, default_n: &[usize]) -> Result<Vec<(usize, usize)>, CliError> {
    let ns = cfg.range_list_or("n", default_n)?;
    let ks = cfg
        .get("k")
        .map(|_| cfg.range_list_or("k", &[]))
        .transpose()?;
    let mut out = Vec::new();
    for &n in &ns {
        match &ks {
            Some(ks) => out.extend(ks.iter().map(|&k| (n, k))),
            None => out.push((n, n / 2)),
        }
    }
    Ok(out)
}

fn read_text(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

/// Codeword, syndrome and message distances to uniform for the mixture
/// distribution over a grid of `(n, k, seed, γ)`.
pub fn cmd_smooth_sweep(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let grid = dims(cfg, &[10])?;
    let gammas = cfg.list_or("gamma", &[0.0, 0.25, 0.5, 1.0])?;
    let seeds: usize = cfg.value_or("seeds", 1)?;
    let seed: u64 = cfg.value_or("seed", 0)?;

    let mut jobs = Vec::new();
    for &(n, k) in &grid {
        for s in 0..seeds {
            for &gamma in &gammas {
                jobs.push((n, k, code_seed(seed, n, k, s), gamma));
            }
        }
    }
    let results: Vec<(Row, bool)> = jobs
        .par_iter()
        .map(|&(n, k, cs, gamma)| {
            let (outcome, elapsed) = timed(|| -> Result<_, CliError> {
                cfg.check_n(n)?;
                let code = LinearCode::random(n, k, cs)?;
                Ok(smooths_check(&code, &achievability_dist(n, gamma)?)?)
            });
            let (tail, violated) = match outcome {
                Ok(r) => (
                    format!(
                        "{},{},{},{},ok",
                        r.tv_codeword,
                        r.tv_syndrome,
                        r.tv_message,
                        r.residual()
                    ),
                    false,
                ),
                Err(CliError::Core(Error::IdentityViolated { residual, .. })) => {
                    (format!(",,,{residual},violation"), true)
                }
                Err(e) => (format!(",,,,error: {}", csv_text(&e.to_string())), false),
            };
            let cells = format!("{n},{k},{cs},{gamma},{tail}");
            (Row { cells, elapsed }, violated)
        })
        .collect();
    let violations = results.iter().filter(|(_, v)| *v).count();
    let rows: Vec<Row> = results.into_iter().map(|(r, _)| r).collect();
    Ok(Report {
        csv: render(
            "n,k,code_seed,gamma,tv_codeword,tv_syndrome,tv_message,residual,status",
            &rows,
            cfg.timestamp,
        ),
        rows: rows.len(),
        violations,
        notes: vec![format!(
            "{} rows, {violations} identity violations",
            rows.len()
        )],
    })
}

fn csv_text(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

pub(crate) const BOUNDS_HEADER: &str =
    "kind,instance,n,k,w,d_dual,t_dual,eps,C,lhs,rhs,term1,term2,term3,ok";

fn flatness_cells(rec: &FlatnessRecord, k: usize) -> String {
    format!(
        "{},{k},,{},{},{},,{},{},{},,{},{}",
        rec.n,
        rec.distance,
        rec.t,
        rec.eps,
        rec.low_tail.max(rec.high_tail),
        rec.bound,
        rec.ball_term,
        rec.eps,
        rec.verdict.as_str()
    )
}

fn kbound_cells(n: usize, params: &KrawtchoukBoundParams) -> (String, bool) {
    let check = kbound_check(n, params);
    let cells = format!(
        "{n},,{},,,,{},{},{},,,,{}",
        check.worst_w, params.constant, check.worst_ratio, params.constant, check.holds
    );
    (cells, check.holds)
}

/// Batch certificates: Krawtchouk constants, flatness, the dual bound, the
/// main bound and the self-smoothing chain. Only violations under valid
/// hypotheses count toward the exit code.
pub fn cmd_verify_bounds(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let n_values = cfg.range_list_or("n", &(8..=14).collect::<Vec<_>>())?;
    for &n in &n_values {
        cfg.check_n(n)?;
        if n < 2 {
            return Err(CliError::Usage("bound suites need n >= 2".into()));
        }
    }
    let instances: u64 = cfg.value_or("instances", 500)?;
    let c: f64 = cfg.value_or("c", 0.3)?;
    let seed: u64 = cfg.value_or("seed", 0)?;
    let mut suite = Suite::new(n_values.clone(), c, seed)?;
    suite.eps = cfg
        .get("eps")
        .map(|_| cfg.value_or("eps", 0.0))
        .transpose()?;
    suite.w = cfg
        .get("w")
        .map(|_| cfg.value_or("w", 0usize))
        .transpose()?;
    if let Some(w) = suite.w {
        if n_values.iter().any(|&n| w > n) {
            return Err(CliError::Usage(format!("w = {w} exceeds some n")));
        }
    }
    let kbound_n = cfg.range_list_or("kbound_n", &[300])?;
    let kbound_c: f64 = cfg.value_or("kbound_c", 0.16)?;
    let kbound_constant: f64 = cfg.value_or("C", 1.0)?;

    let mut rows: Vec<(Row, bool)> = Vec::new();
    for (&n, params) in suite.fitted() {
        let ((cells, holds), elapsed) = timed(|| kbound_cells(n, params));
        let cells = format!("kbound_fit,{n},{cells}");
        rows.push((Row { cells, elapsed }, !holds));
    }
    let fixed = KrawtchoukBoundParams::new(kbound_constant, kbound_c)?;
    let scans: Vec<_> = kbound_n
        .par_iter()
        .map(|&n| (n, timed(|| kbound_cells(n, &fixed))))
        .collect();
    for (n, ((cells, holds), elapsed)) in scans {
        let cells = format!("kbound,{n},{cells}");
        rows.push((Row { cells, elapsed }, !holds));
    }

    let flat: Vec<_> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let (rec, elapsed) = timed(|| suite.flatness(i));
            rec.map(|(k, rec)| {
                let violated = rec.verdict.is_violation();
                let cells = format!("flatness,{i},{}", flatness_cells(&rec, k));
                (Row { cells, elapsed }, violated)
            })
        })
        .collect::<Result<_, _>>()?;
    rows.extend(flat);

    let bound_row = |kind: &str, i: u64, cert: BoundCertificate, elapsed| {
        let violated = cert.verdict.is_violation();
        let cells = format!("{kind},{i},{}", cert.csv_row());
        (Row { cells, elapsed }, violated)
    };
    let dual: Vec<_> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let (cert, elapsed) = timed(|| suite.dual_bound(i));
            cert.map(|c| bound_row("dual_bound", i, c, elapsed))
        })
        .collect::<Result<_, _>>()?;
    rows.extend(dual);
    let theorem: Vec<_> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let (cert, elapsed) = timed(|| suite.theorem(i));
            cert.map(|c| bound_row("theorem", i, c, elapsed))
        })
        .collect::<Result<_, _>>()?;
    rows.extend(theorem);
    let chain: Vec<_> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let (rec, elapsed) = timed(|| suite.chain(i));
            rec.map(|(n, k, rec)| {
                let cells = format!(
                    "chain,{i},{n},{k},,,,,,{},{},,,,{}",
                    rec.lhs,
                    rec.rhs,
                    rec.verdict.as_str()
                );
                (Row { cells, elapsed }, rec.verdict.is_violation())
            })
        })
        .collect::<Result<_, _>>()?;
    rows.extend(chain);

    let violations = rows.iter().filter(|(_, v)| *v).count();
    let hyp_fail = rows
        .iter()
        .filter(|(r, _)| r.cells.ends_with(",hyp_fail"))
        .count();
    let rows: Vec<Row> = rows.into_iter().map(|(r, _)| r).collect();
    Ok(Report {
        csv: render(BOUNDS_HEADER, &rows, cfg.timestamp),
        rows: rows.len(),
        violations,
        notes: vec![format!(
            "{} rows: {violations} bound violations, {hyp_fail} with failed hypotheses",
            rows.len()
        )],
    })
}

/// The reduction end to end for each `(w, γ, N)` on one code.
pub fn cmd_reduction(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let seed: u64 = cfg.value_or("seed", 0)?;
    let code = match cfg.get("code") {
        Some(path) => LinearCode::from_text(&read_text(path)?)?,
        None => {
            let n: usize = cfg.value_or("n", 12)?;
            let k: usize = cfg.value_or("k", n / 2)?;
            cfg.check_n(n)?;
            LinearCode::random(n, k, code_seed(seed, n, k, 0))?
        }
    };
    cfg.check_n(code.n())?;
    let ws = cfg.list_or("w", &[1usize])?;
    let gammas = cfg.list_or("gamma", &[0.6])?;
    let samples = cfg.list_or("N", &[40usize])?;
    let trials: usize = cfg.value_or("trials", 2000)?;
    let threshold = BiasThreshold {
        exponent: cfg.value_or("l", 1.0)?,
        constant: cfg.value_or("const", 1.0)?,
    };

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut violations = 0;
    for &w in &ws {
        for &gamma in &gammas {
            for &n_samples in &samples {
                let (rep, elapsed) = timed(|| {
                    run_experiment_with(&code, w, gamma, n_samples, trials, seed, threshold)
                });
                let rep = rep?;
                if rep.verdict == GuaranteeVerdict::Violated {
                    violations += 1;
                }
                notes.push(reduction_note(&rep));
                rows.push(Row {
                    cells: rep.csv_row(),
                    elapsed,
                });
            }
        }
    }
    Ok(Report {
        csv: render(ReductionReport::CSV_HEADER, &rows, cfg.timestamp),
        rows: rows.len(),
        violations,
        notes,
    })
}

fn reduction_note(rep: &ReductionReport) -> String {
    format!(
        "n={} k={} w={} gamma={} N={}: success {:.4} vs alpha_hat {:.4} - N eps {:.4} - 3 sigma {:.4} => {}",
        rep.n,
        rep.k,
        rep.w,
        rep.gamma,
        rep.n_samples,
        rep.success_rate,
        rep.alpha_hat(),
        rep.n_samples as f64 * rep.eps_exact,
        3.0 * rep.sigma,
        rep.verdict.as_str()
    )
}

/// Worst and average bias at each weight against the smoothing distance.
pub fn cmd_tradeoff(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let seed: u64 = cfg.value_or("seed", 0)?;
    let mut jobs: Vec<(String, usize, Pmf)> = Vec::new();
    if let Some(path) = cfg.get("pmf") {
        let p = Pmf::from_csv(&read_text(path)?)?;
        cfg.check_n(p.n())?;
        let ks = cfg.list_or("k", &[p.n() / 2])?;
        jobs.extend(ks.into_iter().map(|k| (String::new(), k, p.clone())));
    } else {
        let gammas = cfg.list_or("gamma", &[0.1, 0.5, 0.9])?;
        for (n, k) in dims(cfg, &[12])? {
            cfg.check_n(n)?;
            for &gamma in &gammas {
                jobs.push((gamma.to_string(), k, achievability_dist(n, gamma)?));
            }
        }
    }
    let source = if cfg.get("pmf").is_some() {
        "file"
    } else {
        "mixture"
    };
    let blocks: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|(gamma, k, p)| -> Result<Vec<Row>, CliError> {
            let n = p.n();
            let (eps, spectrum) = {
                let code = LinearCode::random(n, *k, code_seed(seed, n, *k, 0))?;
                (
                    tv_to_uniform(&pushforward(code.generator(), p)?),
                    p.spectrum(),
                )
            };
            Ok((1..=n)
                .map(|w| {
                    let (cells, elapsed) = timed(|| {
                        let witness = weakest_parity(&spectrum, w).expect("1 <= w <= n");
                        let worst = spectrum.bias(witness).abs();
                        let avg = average_bias_from(&spectrum, w);
                        format!("{source},{n},{k},{w},{gamma},{worst},{avg},{eps}")
                    });
                    Row { cells, elapsed }
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<Row> = blocks.into_iter().flatten().collect();
    Ok(Report {
        csv: render(
            "source,n,k,w,gamma,bias_worst,bias_avg,eps",
            &rows,
            cfg.timestamp,
        ),
        rows: rows.len(),
        violations: 0,
        notes: vec![format!("{} rows", rows.len())],
    })
}

/// Fitted Krawtchouk constants per `(n, c)`, and whether `C = 1` suffices.
pub fn cmd_kbound_scan(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let ns = cfg.range_list_or("n", &(8..=14).collect::<Vec<_>>())?;
    let cs = cfg.list_or("c", &[0.16])?;
    let jobs: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| cs.iter().map(move |&c| (n, c)))
        .collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(n, c)| -> Result<Row, CliError> {
            let (cells, elapsed) = timed(|| -> Result<String, CliError> {
                let fit = kbound_fit(n, c)?;
                let unit = kbound_check(n, &KrawtchoukBoundParams::new(1.0, c)?);
                Ok(format!(
                    "{n},{c},{},{},{},{},{}",
                    fit.constant, unit.worst_w, unit.worst_i, unit.worst_ratio, unit.holds
                ))
            });
            Ok(Row {
                cells: cells?,
                elapsed,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(Report {
        csv: render(
            "n,c,C_fit,worst_w,worst_i,worst_ratio,holds_with_C1",
            &rows,
            cfg.timestamp,
        ),
        rows: rows.len(),
        violations: 0,
        notes: vec![format!("{} rows", rows.len())],
    })
}

/// Monte-Carlo success rate of the maximum-likelihood LPN solver.
pub fn cmd_lpn_bench(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let ks = cfg.list_or("k", &[8usize])?;
    let deltas = cfg.list_or("delta", &[0.125])?;
    let samples = cfg.list_or("N", &[100usize])?;
    let trials: usize = cfg.value_or("trials", 1000)?;
    let seed: u64 = cfg.value_or("seed", 0)?;
    let mut rows = Vec::new();
    for &k in &ks {
        for &delta in &deltas {
            for &n_samples in &samples {
                let (stats, elapsed) = timed(|| estimate_alpha(k, delta, n_samples, trials, seed));
                let s = stats?;
                rows.push(Row {
                    cells: format!(
                        "{k},{delta},{n_samples},{},{},{},{}",
                        s.trials, s.successes, s.alpha_hat, s.ci_halfwidth
                    ),
                    elapsed,
                });
            }
        }
    }
    Ok(Report {
        csv: render(
            "k,delta,N,trials,successes,alpha_hat,ci_halfwidth",
            &rows,
            cfg.timestamp,
        ),
        rows: rows.len(),
        violations: 0,
        notes: vec![format!("{} rows", rows.len())],
    })
}
