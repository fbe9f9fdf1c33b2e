mod common;

use common::{baseline, simpson};
use habitlock::anticipated::{expected_price_random, TwoStageSolver};
use habitlock::quadrature::QuadratureSpec;
use habitlock::ModelError;

#[test]
fn expectation_matches_simpson_and_lies_in_range() {
    let m = baseline();
    let solver = TwoStageSolver::new(&m).unwrap();
    let spec = QuadratureSpec::default();
    let mut prev_gap = f64::INFINITY;
    for delta in [1.0, 10.0, 100.0] {
        let rep = expected_price_random(&solver, delta, &spec).unwrap();
        assert!(rep.min_price <= rep.expected_price && rep.expected_price <= rep.max_price);
        assert!(rep.quantiles.windows(2).all(|w| w[0].1 <= w[1].1));

        let oracle = simpson(
            |s| delta * (-delta * s).exp() * solver.reopening_price(s.max(1e-12)).unwrap(),
            0.0,
            rep.truncation,
            20_000,
        );
        assert!((rep.expected_price - oracle).abs() < 1e-6, "delta {delta}: {} vs {oracle}", rep.expected_price);

        let gap = (rep.expected_price - rep.two_sector_benchmark).abs();
        assert!(gap < prev_gap, "delta {delta}");
        prev_gap = gap;
    }
    assert!(prev_gap < 1e-3);
}

#[test]
fn slow_exit_rates_hit_the_price_pole() {
    let m = baseline();
    let solver = TwoStageSolver::new(&m).unwrap();
    for delta in [0.01, 0.1] {
        let err = expected_price_random(&solver, delta, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, ModelError::UndefinedExpectation(_)), "{err}");
    }
    // the shadow price of wealth at reopening changes sign near s = 200.8
    assert!(solver.terminal(200.0).unwrap().lambda > 0.0);
    assert!(solver.terminal(201.5).unwrap().lambda < 0.0);
}

#[test]
fn non_positive_rate_is_rejected() {
    let solver = TwoStageSolver::new(&baseline()).unwrap();
    assert!(expected_price_random(&solver, 0.0, &QuadratureSpec::default()).is_err());
}
