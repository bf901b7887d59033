mod common;

use ddopt::algorithms::{rcm, rda, RcmConfig, RdaConfig};
use ddopt::distribution::{wasserstein1_sorted, wasserstein1_uniform, DecisionBox, SampleBatch};
use ddopt::experiments::{market_problem, one_dim_example, MarketParams};
use ddopt::inner_solver::{max_violation, solve_constrained, SolverConfig};
use ddopt::numerics::{distance, project_nonneg};
use ddopt::trace_io::TraceTable;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn projection_is_idempotent(v in prop::collection::vec(-5.0..5.0f64, 1..6)) {
        let p = project_nonneg(&v);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert_eq!(project_nonneg(&p), p);
    }

    #[test]
    fn box_clamp_lands_inside(v in prop::collection::vec(-20.0..20.0f64, 3)) {
        let b = DecisionBox::cube(3, -1.0, 2.0).unwrap();
        prop_assert!(b.contains(&b.clamp(&v)));
    }

    #[test]
    fn solve_satisfies_kkt(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qp = common::random_qp(&mut rng);
        let s = solve_constrained(&qp.f, &qp.g, &qp.b, &SolverConfig::default()).unwrap();
        prop_assert!(s.kkt_stationarity <= 1e-8);
        prop_assert!(s.kkt_complementarity <= 1e-8);
        prop_assert!(max_violation(&qp.g, &qp.b, &s.x_star) <= 1e-8);
        prop_assert!(s.lambda_star.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn wasserstein_metric_axioms(
        a in prop::collection::vec(-5.0..5.0f64, 50),
        b in prop::collection::vec(-5.0..5.0f64, 50),
        c in prop::collection::vec(-5.0..5.0f64, 50),
    ) {
        let (a, b, c) = (SampleBatch::from_values(a, 0), SampleBatch::from_values(b, 0), SampleBatch::from_values(c, 0));
        let w = |x: &SampleBatch<f64>, y: &SampleBatch<f64>| wasserstein1_sorted(x, y).unwrap();
        prop_assert!(w(&a, &a) == 0.0);
        prop_assert!((w(&a, &b) - w(&b, &a)).abs() <= 1e-12);
        prop_assert!(w(&a, &c) <= w(&a, &b) + w(&b, &c) + 1e-12);
    }

    #[test]
    fn uniform_w1_symmetric_and_translation_exact(a in -3.0..3.0f64, w in 0.1..3.0f64, s in -2.0..2.0f64) {
        let d = wasserstein1_uniform(a, a + w, a + s, a + w + s).unwrap();
        prop_assert!((d - s.abs()).abs() <= 1e-12);
        let e = wasserstein1_uniform(a + s, a + w + s, a, a + w).unwrap();
        prop_assert!((d - e).abs() <= 1e-12);
    }

    #[test]
    fn rcm_contracts_at_rate_theta(theta in 0.05..0.95f64, x0 in 0.1..2.0f64) {
        let p = one_dim_example::<f64>(theta).unwrap();
        let tr = rcm(&p, &[x0], &RcmConfig::default()).unwrap();
        // below the inner tolerance the solver may return the unconstrained minimizer
        for w in tr.records.windows(2).filter(|w| theta * w[0].x[0] > 1e-8) {
            prop_assert!((w[1].x[0] - theta * w[0].x[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn traces_round_trip(theta in 0.1..1.5f64, iters in 1usize..40) {
        let p = one_dim_example::<f64>(theta).unwrap();
        let cfg = RdaConfig { max_iterations: iters, ..RdaConfig::new(0.5) };
        let tr = rda(&p, &[1.0], &cfg).unwrap();
        let t = TraceTable::from_trace(&tr);
        let csv = t.to_csv().unwrap();
        prop_assert_eq!(TraceTable::from_csv(&csv).unwrap().to_csv().unwrap(), csv);
        let json = t.to_json().unwrap();
        prop_assert_eq!(TraceTable::from_json(&json).unwrap().to_json().unwrap(), json);
    }

    #[test]
    fn market_iterates_stay_feasible(eps in 0.0..0.4f64, eps_g in 0.0..0.4f64) {
        let p = market_problem::<f64>(&MarketParams { eps, eps_g, ..MarketParams::default() }).unwrap();
        let tr = rcm(&p, &[1.0, 1.0], &RcmConfig::default()).unwrap();
        for w in tr.records.windows(2) {
            // x_{t+1} solves the problem frozen at x_t
            let b = p.constraint_rhs(&w[0].x).unwrap();
            prop_assert!(max_violation(p.g(), &b, &w[1].x) <= 1e-8);
        }
        prop_assert!(distance(&tr.records[0].x, &[1.0, 1.0]) == 0.0);
    }
}
