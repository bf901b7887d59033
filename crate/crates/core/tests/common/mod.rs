#![allow(dead_code)]

use std::sync::Arc;

use ddopt::distribution::{DecisionBox, DistributionMap};
use ddopt::inner_solver::QuadraticForm;
use ddopt::numerics::{min_eig_gram, spectral_norm, symmetric_eigenvalues, Matrix, Vector};
use ddopt::problem::{QuadraticLoss, RegularityConstants};
use ddopt::ProblemF64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Matrix::from_row_major(rows, cols, data).unwrap()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Matrix with spectral norm exactly `target` (zero matrix when `target = 0`).
pub fn scaled_to_norm(rng: &mut ChaCha8Rng, rows: usize, cols: usize, target: f64) -> Matrix<f64> {
    loop {
        let m = uniform_matrix(rng, rows, cols);
        let s = spectral_norm(&m).unwrap();
        if s > 1e-3 {
            return m.scaled(target / s);
        }
    }
}

/// Random orthogonal matrix by Gram-Schmidt.
pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    loop {
        let a = uniform_matrix(rng, n, n);
        let mut q: Vec<Vec<f64>> = Vec::new();
        let mut ok = true;
        for j in 0..n {
            let mut v: Vec<f64> = (0..n).map(|i| a[(i, j)]).collect();
            for u in &q {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
            let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nv < 1e-3 {
                ok = false;
                break;
            }
            q.push(v.into_iter().map(|a| a / nv).collect());
        }
        if ok {
            let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q[j][i]).collect()).collect();
            return Matrix::from_rows(&rows).unwrap();
        }
    }
}

/// Symmetric matrix with eigenvalues drawn from `[lo, hi]`, including both ends.
pub fn spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Matrix<f64> {
    let q = orthogonal(rng, n);
    let mut eig: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    eig[0] = lo;
    if n > 1 {
        eig[n - 1] = hi;
    }
    let m = q.matmul(&Matrix::diag(&eig)).matmul(&q.transpose());
    // symmetrize rounding noise
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (m[(i, j)] + m[(j, i)])).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

/// Full row rank `rows x cols` matrix with `λ_min(GGᵀ) >= 0.05 λ_max(GGᵀ)`.
pub fn full_row_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
    assert!(rows <= cols);
    loop {
        let g = uniform_matrix(rng, rows, cols);
        let Ok(lo) = min_eig_gram(&g) else { continue };
        let hi = *symmetric_eigenvalues(&g.gram()).unwrap().last().unwrap();
        if lo >= 0.05 * hi {
            return g;
        }
    }
}

pub struct QpInstance {
    pub f: QuadraticForm<f64>,
    pub g: Matrix<f64>,
    pub b: Vec<f64>,
}

pub fn random_qp(rng: &mut ChaCha8Rng) -> QpInstance {
    let n = rng.random_range(1..=4);
    let dw = rng.random_range(1..=n.min(3));
    let hi = rng.random_range(1.0..4.0);
    let h = spd(rng, n, 1.0, hi);
    let c = uniform_vec(rng, n, -2.0, 2.0);
    QpInstance {
        f: QuadraticForm::new(h, c.into(), 0.0).unwrap(),
        g: full_row_rank(rng, dw, n),
        b: uniform_vec(rng, dw, -1.0, 1.0),
    }
}

/// Random performative problem with point-mass maps whose means shift
/// linearly in the decision:
///
/// `l(x, z) = ½ xᵀHx + xᵀ(c + Bz)`, `E z = z₀ + M x`, `ξ(x) = ξ₀ + M_g x`.
pub struct RandomInstance {
    pub problem: ProblemF64,
    pub x0: Vec<f64>,
    pub h: Matrix<f64>,
    pub g: Matrix<f64>,
}

pub fn random_instance(rng: &mut ChaCha8Rng, eps: f64, eps_g: f64) -> RandomInstance {
    let n = rng.random_range(1..=4);
    let dw = rng.random_range(1..=n.min(3));
    let dz = rng.random_range(1..=3);
    let hi = rng.random_range(1.0..4.0);
    let lo = rng.random_range(0.5..=hi);
    let h = spd(rng, n, lo, hi);
    let c = uniform_vec(rng, n, -2.0, 2.0);
    let beta_z = rng.random_range(0.5..2.0);
    let b = scaled_to_norm(rng, n, dz, beta_z);
    let loss = QuadraticLoss::new(
        h.clone(),
        c.into(),
        b,
        Vector::zeros(dz),
        Vector::zeros(dz),
        0.0,
    )
    .unwrap();
    let z0 = uniform_vec(rng, dz, -1.0, 1.0);
    let objective_map = shifted_point(rng, z0, n, eps);
    let xi0 = uniform_vec(rng, dw, 0.5, 2.0);
    let constraint_map = shifted_point(rng, xi0, n, eps_g);
    let g = full_row_rank(rng, dw, n);
    let eig = symmetric_eigenvalues(&h).unwrap();
    let constants = RegularityConstants {
        gamma: eig[0],
        beta_x: *eig.last().unwrap(),
        beta_z,
        l_z: 1.0,
        eps,
        eps_g,
    };
    let problem = ProblemF64::new(
        Arc::new(loss),
        objective_map,
        constraint_map,
        g.clone(),
        constants,
        DecisionBox::cube(n, -1e3, 1e3).unwrap(),
    )
    .unwrap();
    RandomInstance {
        problem,
        x0: uniform_vec(rng, n, -1.0, 1.0),
        h,
        g,
    }
}

fn shifted_point(rng: &mut ChaCha8Rng, base: Vec<f64>, n: usize, eps: f64) -> DistributionMap<f64> {
    let d = base.len();
    let m = DistributionMap::point(base);
    if eps == 0.0 {
        m.decision_dim(n).build().unwrap()
    } else {
        m.mean_shift(scaled_to_norm(rng, d, n, eps))
            .declared_sensitivity(eps)
            .build()
            .unwrap()
    }
}

/// Log-uniform draw in `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}
