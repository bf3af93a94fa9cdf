use smoothlab::gf2::LinearCode;
use smoothlab::reduction::{run_experiment, GuaranteeVerdict};

#[test]
fn zero_error_gives_noiseless_lpn() {
    // e = 0: every label is exact and ε reduces to the message distance
    let code = LinearCode::random(12, 6, 7).unwrap();
    let rep = run_experiment(&code, 0, 0.6, 40, 1000, 5).unwrap();
    assert_eq!(rep.bias, 0.5);
    assert_eq!(rep.delta, 0.0);
    assert!((rep.eps_exact - rep.tv_message).abs() < 1e-12);
    assert!(rep.alpha_hat() > 0.99);
    assert!(rep.within_guarantee_band(), "{rep:?}");
}

#[test]
fn reference_configuration_meets_its_guarantee() {
    let code = LinearCode::random(12, 6, 1).unwrap();
    let rep = run_experiment(&code, 1, 0.6, 40, 500, 11).unwrap();
    assert!((rep.delta - (0.5 - 0.3 * (1.0 - 2.0 / 12.0))).abs() < 1e-12);
    assert!(rep.within_guarantee_band(), "{rep:?}");
    assert_ne!(rep.verdict, GuaranteeVerdict::Violated);
}

#[test]
fn success_rate_weakens_with_gamma() {
    let code = LinearCode::random(10, 5, 3).unwrap();
    let low = run_experiment(&code, 1, 0.1, 30, 600, 2).unwrap();
    let high = run_experiment(&code, 1, 0.9, 30, 600, 2).unwrap();
    assert!(high.bias > low.bias);
    assert!(high.alpha_hat() > low.alpha_hat());
    assert!(high.eps_exact > low.eps_exact);
}
