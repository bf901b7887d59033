//! RDA on the step-size window where both Lyapunov coefficients are below one.

mod common;

use ddopt::algorithms::{rda, RdaConfig};
use ddopt::analysis::{compute_constants, equilibrium_oracle};
use ddopt::numerics::distance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn effective_window_midpoint_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tested = 0;
    let mut draws = 0;
    while tested < 300 && draws < 50_000 {
        draws += 1;
        let eps = common::log_uniform(&mut rng, 1e-4, 0.3);
        let eps_g = common::log_uniform(&mut rng, 1e-4, 0.3);
        let inst = common::random_instance(&mut rng, eps, eps_g);
        let r = compute_constants(&inst.problem).unwrap();
        if !(r.rda_condition_9 && r.rda_condition_10) {
            continue;
        }
        let Some((lo, hi)) = r.effective_window() else {
            continue;
        };
        tested += 1;
        let eta = 0.5 * (lo + hi);
        let kappa = r.kappa(eta).unwrap();
        assert!(kappa < 1.0, "kappa({eta}) = {kappa}");
        let eq = equilibrium_oracle(&inst.problem, &inst.x0, 1e-10).unwrap();
        let alpha = r.alpha.unwrap();
        let cfg = RdaConfig {
            max_iterations: 200,
            ..RdaConfig::new(eta)
        };
        let tr = rda(&inst.problem, &inst.x0, &cfg).unwrap();
        let v: Vec<f64> = tr.records[1..]
            .iter()
            .map(|rec| {
                let dl = distance(rec.lambda.as_ref().unwrap(), &eq.lambda);
                let dx = distance(&rec.x, &eq.x);
                dl * dl + alpha * dx * dx
            })
            .collect();
        for (t, w) in v.windows(2).enumerate() {
            assert!(
                w[1] <= w[0] + 1e-7,
                "draw {draws}, t={}: V rose from {} to {}",
                t + 1,
                w[0],
                w[1]
            );
        }
    }
    assert_eq!(tested, 300);
}

#[test]
fn condition_9_implies_rcm_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        let eps = common::log_uniform(&mut rng, 1e-3, 2.0);
        let eps_g = common::log_uniform(&mut rng, 1e-3, 2.0);
        let r = compute_constants(&common::random_instance(&mut rng, eps, eps_g).problem).unwrap();
        if r.rda_condition_9 {
            assert!(r.rcm_condition);
        }
    }
}
