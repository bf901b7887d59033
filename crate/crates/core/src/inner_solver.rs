//! Solves `min f(x) s.t. G x <= b` for smooth strongly convex `f`.
//!
//! Two routes: exact active-set enumeration for quadratics, and projected
//! dual ascent on the strongly concave dual for everything else.

use crate::error::{Error, Result};
use crate::numerics::{
    self, dot, min_eig_gram, norm, project_nonneg, solve_linear, spectral_norm, Matrix, Vector,
};
use crate::scalar::Scalar;

/// `½ xᵀ H x + qᵀ x + c` with the extreme eigenvalues of `H` cached.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm<T> {
    hessian: Matrix<T>,
    linear: Vector<T>,
    constant: T,
    eig_min: T,
    eig_max: T,
}

impl<T: Scalar> QuadraticForm<T> {
    /// Requires a symmetric positive definite Hessian.
    pub fn new(hessian: Matrix<T>, linear: Vector<T>, constant: T) -> Result<Self> {
        if hessian.rows() != hessian.cols() || hessian.rows() != linear.len() {
            return Err(Error::invalid("quadratic form shape mismatch"));
        }
        let eig = numerics::symmetric_eigenvalues(&hessian)?;
        let (eig_min, eig_max) = (eig[0], eig[eig.len() - 1]);
        if !(eig_min > T::zero()) {
            return Err(Error::AssumptionViolation {
                assumption: "loss is strongly convex in x",
                detail: format!("Hessian has smallest eigenvalue {eig_min}"),
            });
        }
        Ok(Self {
            hessian,
            linear,
            constant,
            eig_min,
            eig_max,
        })
    }

    pub fn hessian(&self) -> &Matrix<T> {
        &self.hessian
    }

    pub fn linear(&self) -> &Vector<T> {
        &self.linear
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    /// Unconstrained minimizer of `f(x) + sᵀx`.
    fn argmin_with_linear(&self, s: &[T]) -> Result<Vector<T>> {
        let rhs: Vec<T> = self.linear.iter().zip(s).map(|(&q, &v)| -(q + v)).collect();
        solve_linear(&self.hessian, &rhs)
    }
}

/// What the inner solver needs from an objective.
pub trait SmoothObjective<T: Scalar> {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vector<T>;
    fn strong_convexity(&self) -> T;
    fn smoothness(&self) -> T;
    fn quadratic(&self) -> Option<&QuadraticForm<T>> {
        None
    }
}

impl<T: Scalar> SmoothObjective<T> for QuadraticForm<T> {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, x: &[T]) -> T {
        let hx = self.hessian.mul_vec(x);
        T::of(0.5) * dot(x, &hx) + dot(&self.linear, x) + self.constant
    }

    fn gradient(&self, x: &[T]) -> Vector<T> {
        &self.hessian.mul_vec(x) + &self.linear
    }

    fn strong_convexity(&self) -> T {
        self.eig_min
    }

    fn smoothness(&self) -> T {
        self.eig_max
    }

    fn quadratic(&self) -> Option<&QuadraticForm<T>> {
        Some(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    DualAscent,
    ActiveSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub tolerance: T,
    pub max_iterations: usize,
    pub method: Method,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::default_tolerance(),
            max_iterations: 1_000_000,
            method: Method::Auto,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_tolerance(tolerance: T) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) || self.max_iterations == 0 {
            return Err(Error::Config(
                "solver tolerance must be > 0 and max_iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub x_star: Vector<T>,
    pub lambda_star: Vector<T>,
    /// `‖∇f(x*) + Gᵀλ*‖`
    pub kkt_stationarity: T,
    /// `max_i |λ*_i (G x* − b)_i|`
    pub kkt_complementarity: T,
    /// `max_i [G x* − b]_i⁺`
    pub feasibility: T,
    pub iterations: usize,
}

/// Largest componentwise violation of `G x <= b`.
pub fn max_violation<T: Scalar>(g: &Matrix<T>, b: &[T], x: &[T]) -> T {
    g.mul_vec(x)
        .iter()
        .zip(b)
        .fold(T::zero(), |m, (&gx, &bi)| m.max(gx - bi))
}

fn residuals<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    g: &Matrix<T>,
    b: &[T],
    x: Vector<T>,
    lambda: Vector<T>,
    iterations: usize,
) -> SolveResult<T> {
    let grad = f.gradient(&x);
    let stationarity = (&grad + &g.tr_mul_vec(&lambda)).norm();
    let slack = &g.mul_vec(&x) - b;
    let complementarity = lambda
        .iter()
        .zip(slack.iter())
        .fold(T::zero(), |m, (&l, &s)| m.max((l * s).abs()));
    let feasibility = slack.iter().fold(T::zero(), |m, &s| m.max(s));
    SolveResult {
        x_star: x,
        lambda_star: lambda,
        kkt_stationarity: stationarity,
        kkt_complementarity: complementarity,
        feasibility,
        iterations,
    }
}

/// Solves the constrained problem, starting dual ascent from `λ = 0`.
pub fn solve_constrained<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    g: &Matrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
) -> Result<SolveResult<T>> {
    solve_constrained_from(f, g, b, cfg, None)
}

/// As [`solve_constrained`], with an optional dual warm start.
pub fn solve_constrained_from<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    g: &Matrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
    lambda0: Option<&[T]>,
) -> Result<SolveResult<T>> {
    cfg.validate()?;
    if g.cols() != f.dim() || g.rows() != b.len() {
        return Err(Error::invalid(format!(
            "G is {}x{}, objective dimension {}, rhs length {}",
            g.rows(),
            g.cols(),
            f.dim(),
            b.len()
        )));
    }
    if !b.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("non-finite constraint right-hand side"));
    }
    min_eig_gram(g)?;
    match (cfg.method, f.quadratic()) {
        (Method::ActiveSet, None) => Err(Error::invalid(
            "active-set route needs a quadratic objective",
        )),
        (Method::ActiveSet, Some(q)) => active_set(q, g, b, cfg),
        (Method::Auto, Some(q)) if g.rows() <= 6 => active_set(q, g, b, cfg),
        _ => dual_ascent(f, g, b, cfg, lambda0),
    }
}

/// Enumerates active sets by size, then lexicographically; the first set
/// whose KKT solution is primal feasible with nonnegative multipliers wins.
fn active_set<T: Scalar>(
    q: &QuadraticForm<T>,
    g: &Matrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
) -> Result<SolveResult<T>> {
    let n = q.dim();
    let m = g.rows();
    let tol = cfg.tolerance;
    let mut tried = 0usize;
    for size in 0..=m.min(n) {
        for active in combinations(m, size) {
            tried += 1;
            let k = active.len();
            let mut kkt = Matrix::zeros(n + k, n + k);
            let mut rhs = vec![T::zero(); n + k];
            for i in 0..n {
                for j in 0..n {
                    kkt[(i, j)] = q.hessian[(i, j)];
                }
                rhs[i] = -q.linear[i];
            }
            for (a, &row) in active.iter().enumerate() {
                for j in 0..n {
                    kkt[(n + a, j)] = g[(row, j)];
                    kkt[(j, n + a)] = g[(row, j)];
                }
                rhs[n + a] = b[row];
            }
            let Ok(sol) = solve_linear(&kkt, &rhs) else {
                continue;
            };
            let x: Vector<T> = sol[..n].iter().copied().collect();
            if active.iter().enumerate().any(|(a, _)| sol[n + a] < -tol) {
                continue;
            }
            if max_violation(g, b, &x) > tol {
                continue;
            }
            let mut lambda = Vector::zeros(m);
            for (a, &row) in active.iter().enumerate() {
                lambda[row] = sol[n + a].max(T::zero());
            }
            return Ok(residuals(q, g, b, x, lambda, tried));
        }
    }
    Err(Error::Infeasible(
        "no active set yields a feasible KKT point".into(),
    ))
}

/// Index subsets of `0..m` of the given size in lexicographic order.
fn combinations(m: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    if size > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] < m - size + i) else {
            return out;
        };
        cur[i] += 1;
        for j in (i + 1)..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn dual_ascent<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    g: &Matrix<T>,
    b: &[T],
    cfg: &SolverConfig<T>,
    lambda0: Option<&[T]>,
) -> Result<SolveResult<T>> {
    let gamma = f.strong_convexity();
    let beta = f.smoothness();
    let gamma_d = min_eig_gram(g)? / beta;
    let g_norm = spectral_norm(g)?;
    let l_d = g_norm * g_norm / gamma;
    let step = T::of(2.0) / (gamma_d + l_d);
    let tol = cfg.tolerance;

    let mut lambda: Vector<T> = match lambda0 {
        Some(l) if l.len() == g.rows() => project_nonneg(l),
        Some(_) => return Err(Error::invalid("dual warm start has the wrong length")),
        None => Vector::zeros(g.rows()),
    };
    let mut x = Vector::zeros(f.dim());
    let mut best: Option<SolveResult<T>> = None;
    for it in 1..=cfg.max_iterations {
        x = lagrangian_min_from(f, g, &lambda, cfg, &x)?;
        let current = residuals(f, g, b, x.clone(), lambda.clone(), it);
        if current.kkt_stationarity <= tol
            && current.kkt_complementarity <= tol
            && current.feasibility <= tol
        {
            return Ok(current);
        }
        let worst = |r: &SolveResult<T>| {
            r.kkt_stationarity
                .max(r.kkt_complementarity)
                .max(r.feasibility)
        };
        if best.as_ref().is_none_or(|bst| worst(&current) < worst(bst)) {
            best = Some(current);
        }
        let slack = &g.mul_vec(&x) - b;
        lambda = project_nonneg(&lambda.axpy(step, &slack));
        if !lambda.is_finite() {
            break;
        }
    }
    let best = best.expect("at least one iteration");
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        stationarity: best.kkt_stationarity.as_f64(),
        complementarity: best.kkt_complementarity.as_f64(),
        feasibility: best.feasibility.as_f64(),
    })
}

/// `argmin_x f(x) + λᵀ G x`.
pub fn solve_lagrangian_min<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    g: &Matrix<T>,
    lambda: &[T],
    cfg: &SolverConfig<T>,
) -> Result<Vector<T>> {
    cfg.validate()?;
    if g.rows() != lambda.len() || g.cols() != f.dim() {
        return Err(Error::invalid("solve_lagrangian_min: shape mismatch"));
    }
    if lambda.iter().any(|&l| l < T::zero()) {
        return Err(Error::invalid("multipliers must be nonnegative"));
    }
    lagrangian_min_from(f, g, lambda, cfg, &Vector::zeros(f.dim()))
}

fn lagrangian_min_from<T: Scalar, F: SmoothObjective<T> + ?Sized>(
    f: &F,
    g: &Matrix<T>,
    lambda: &[T],
    cfg: &SolverConfig<T>,
    start: &[T],
) -> Result<Vector<T>> {
    let shift = g.tr_mul_vec(lambda);
    if let Some(q) = f.quadratic() {
        return q.argmin_with_linear(&shift);
    }
    let gamma = f.strong_convexity();
    let step = T::one() / f.smoothness();
    let stop = cfg.tolerance * gamma.min(T::one());
    let mut x = start.to_vec();
    for _ in 0..cfg.max_iterations {
        let grad = &f.gradient(&x) + &shift;
        if norm(&grad) <= stop {
            return Ok(x.into());
        }
        for (xi, gi) in x.iter_mut().zip(grad.iter()) {
            *xi -= step * *gi;
        }
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
    }
    let grad = &f.gradient(&x) + &shift;
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        stationarity: norm(&grad).as_f64(),
        complementarity: 0.0,
        feasibility: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(h: &[f64], q: &[f64]) -> QuadraticForm<f64> {
        let n = q.len();
        QuadraticForm::new(
            Matrix::from_row_major(n, n, h.to_vec()).unwrap(),
            q.to_vec().into(),
            0.0,
        )
        .unwrap()
    }

    /// Smooth but not quadratic: `Σ cosh(x_i) + x_i²`, γ = 3, β = 3 + cosh bound.
    struct Cosh;
    impl SmoothObjective<f64> for Cosh {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0].cosh() + x[0] * x[0]
        }
        fn gradient(&self, x: &[f64]) -> Vector<f64> {
            vec![x[0].sinh() + 2.0 * x[0]].into()
        }
        fn strong_convexity(&self) -> f64 {
            3.0
        }
        fn smoothness(&self) -> f64 {
            5.0
        }
    }

    #[test]
    fn lower_bound_constraint_both_routes() {
        let f = quad(&[2.0], &[0.0]);
        let g = Matrix::from_row_major(1, 1, vec![-1.0]).unwrap();
        for method in [Method::ActiveSet, Method::DualAscent] {
            let cfg = SolverConfig::default().with_method(method);
            let r = solve_constrained(&f, &g, &[-0.5], &cfg).unwrap();
            assert!((r.x_star[0] - 0.5).abs() < 1e-9, "{method:?}");
            assert!((r.lambda_star[0] - 1.0).abs() < 1e-9, "{method:?}");
        }
    }

    #[test]
    fn inactive_constraint() {
        let f = quad(&[2.0, 0.0, 0.0, 2.0], &[0.0, 0.0]);
        let g = Matrix::from_row_major(1, 2, vec![1.0, 0.0]).unwrap();
        let r = solve_constrained(&f, &g, &[10.0], &SolverConfig::default()).unwrap();
        assert_eq!(r.x_star.as_slice(), &[0.0, 0.0]);
        assert_eq!(r.lambda_star.as_slice(), &[0.0]);
    }

    #[test]
    fn lagrangian_min_examples() {
        let f = quad(&[2.0], &[0.0]);
        let g = Matrix::from_row_major(1, 1, vec![-1.0]).unwrap();
        let cfg = SolverConfig::default();
        assert!((solve_lagrangian_min(&f, &g, &[1.0], &cfg).unwrap()[0] - 0.5).abs() < 1e-15);
        assert_eq!(solve_lagrangian_min(&f, &g, &[0.0], &cfg).unwrap()[0], 0.0);

        // ‖x − c‖² = ½ xᵀ(2I)x − 2cᵀx + ‖c‖²
        let c = [1.0, -2.0];
        let f = quad(&[2.0, 0.0, 0.0, 2.0], &[-2.0, 4.0]);
        let g = Matrix::from_row_major(2, 2, vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        let l = [0.3, 1.1];
        let x = solve_lagrangian_min(&f, &g, &l, &cfg).unwrap();
        let gt = g.tr_mul_vec(&l);
        for i in 0..2 {
            assert!((x[i] - (c[i] - gt[i] / 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn non_quadratic_uses_gradient_descent() {
        let g = Matrix::from_row_major(1, 1, vec![-1.0]).unwrap();
        let r = solve_constrained(&Cosh, &g, &[-1.0], &SolverConfig::default()).unwrap();
        assert!((r.x_star[0] - 1.0).abs() < 1e-9);
        assert!((r.lambda_star[0] - (1f64.sinh() + 2.0)).abs() < 1e-8);
        assert!(r.kkt_stationarity <= 1e-10);
    }

    #[test]
    fn active_set_requires_quadratic() {
        let g = Matrix::from_row_major(1, 1, vec![-1.0]).unwrap();
        let cfg = SolverConfig::default().with_method(Method::ActiveSet);
        assert!(solve_constrained(&Cosh, &g, &[-1.0], &cfg).is_err());
    }

    #[test]
    fn rank_deficient_g_rejected() {
        let f = quad(&[2.0, 0.0, 0.0, 2.0], &[0.0, 0.0]);
        let g = Matrix::from_row_major(2, 2, vec![1.0, 1.0, 2.0, 2.0]).unwrap();
        assert!(matches!(
            solve_constrained(&f, &g, &[1.0, 1.0], &SolverConfig::default()),
            Err(Error::AssumptionViolation { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_reports_residuals() {
        let f = quad(&[2.0], &[0.0]);
        let g = Matrix::from_row_major(1, 1, vec![-1.0]).unwrap();
        let cfg = SolverConfig {
            tolerance: 1e-12,
            max_iterations: 1,
            method: Method::DualAscent,
        };
        assert!(matches!(
            solve_constrained(&f, &g, &[-0.5], &cfg),
            Err(Error::NoConvergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn combinations_order() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }
}
