//! The linearly constrained decision-dependent problem
//!
//! ```text
//!     min_x  E_{z ~ D(x)} l(x, z)   s.t.  G x <= ξ(x) = E_{w ~ D_g(x)} w
//! ```
//!
//! together with the frozen objectives `f_{x'}(x) = E_{z ~ D(x')} l(x, z)`
//! that both algorithms solve repeatedly.

use std::sync::Arc;

use serde::Serialize;

use crate::distribution::DistributionMap;
pub use crate::distribution::{DecisionBox, Moments};
use crate::error::{Error, Result};
pub use crate::inner_solver::QuadraticForm;
use crate::inner_solver::SmoothObjective;
use crate::numerics::{dot, min_eig_gram, project_nonneg, Matrix, Vector};
use crate::scalar::Scalar;

/// Loss `l(x, z)` with expectation oracles in terms of the moments of `z`.
pub trait Loss<T: Scalar>: Send + Sync {
    fn decision_dim(&self) -> usize;
    fn sample_dim(&self) -> usize;
    fn value(&self, x: &[T], z: &[T]) -> T;
    fn expected_value(&self, x: &[T], z: &Moments<T>) -> T;
    fn expected_gradient(&self, x: &[T], z: &Moments<T>) -> Vector<T>;
    /// The frozen expectation as a quadratic in `x`, when it is one.
    fn expected_quadratic(&self, _z: &Moments<T>) -> Option<QuadraticForm<T>> {
        None
    }
}

/// `l(x, z) = ½ xᵀHx + xᵀ(c + Bz) + ½ Σ S_i z_i² + sᵀz + k`.
#[derive(Clone, Debug)]
pub struct QuadraticLoss<T> {
    hessian: Matrix<T>,
    linear: Vector<T>,
    coupling: Matrix<T>,
    z_square: Vector<T>,
    z_linear: Vector<T>,
    constant: T,
}

impl<T: Scalar> QuadraticLoss<T> {
    /// `coupling` is `n x d_z`; `z_square` holds the diagonal `S`.
    pub fn new(
        hessian: Matrix<T>,
        linear: Vector<T>,
        coupling: Matrix<T>,
        z_square: Vector<T>,
        z_linear: Vector<T>,
        constant: T,
    ) -> Result<Self> {
        let n = linear.len();
        let dz = coupling.cols();
        if hessian.shape() != (n, n)
            || coupling.rows() != n
            || z_square.len() != dz
            || z_linear.len() != dz
        {
            return Err(Error::invalid("quadratic loss shape mismatch"));
        }
        QuadraticForm::new(hessian.clone(), linear.clone(), T::zero())?;
        Ok(Self {
            hessian,
            linear,
            coupling,
            z_square,
            z_linear,
            constant,
        })
    }

    pub fn hessian(&self) -> &Matrix<T> {
        &self.hessian
    }

    fn z_terms(&self, z: &Moments<T>) -> T {
        let half = T::of(0.5);
        let sq: T = self
            .z_square
            .iter()
            .zip(z.mean.iter().zip(z.variance.iter()))
            .map(|(&s, (&m, &v))| half * s * (m * m + v))
            .sum();
        sq + dot(&self.z_linear, &z.mean) + self.constant
    }

    fn shifted_linear(&self, zmean: &[T]) -> Vector<T> {
        &self.coupling.mul_vec(zmean) + &self.linear
    }
}

impl<T: Scalar> Loss<T> for QuadraticLoss<T> {
    fn decision_dim(&self) -> usize {
        self.linear.len()
    }

    fn sample_dim(&self) -> usize {
        self.coupling.cols()
    }

    fn value(&self, x: &[T], z: &[T]) -> T {
        let half = T::of(0.5);
        let xhx = dot(x, &self.hessian.mul_vec(x));
        let lin = dot(x, &self.shifted_linear(z));
        let sq: T = self
            .z_square
            .iter()
            .zip(z)
            .map(|(&s, &zi)| half * s * zi * zi)
            .sum();
        half * xhx + lin + sq + dot(&self.z_linear, z) + self.constant
    }

    fn expected_value(&self, x: &[T], z: &Moments<T>) -> T {
        let xhx = dot(x, &self.hessian.mul_vec(x));
        T::of(0.5) * xhx + dot(x, &self.shifted_linear(&z.mean)) + self.z_terms(z)
    }

    fn expected_gradient(&self, x: &[T], z: &Moments<T>) -> Vector<T> {
        &self.hessian.mul_vec(x) + &self.shifted_linear(&z.mean)
    }

    fn expected_quadratic(&self, z: &Moments<T>) -> Option<QuadraticForm<T>> {
        QuadraticForm::new(
            self.hessian.clone(),
            self.shifted_linear(&z.mean),
            self.z_terms(z),
        )
        .ok()
    }
}

/// Regularity constants the convergence analysis consumes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularityConstants<T> {
    /// Strong convexity in `x`.
    pub gamma: T,
    /// Smoothness in `x`.
    pub beta_x: T,
    /// Lipschitz constant of `∇_x l` in `z`.
    pub beta_z: T,
    /// Lipschitz constant of `l` in `z`.
    pub l_z: T,
    pub eps: T,
    pub eps_g: T,
}

impl<T: Scalar> RegularityConstants<T> {
    fn validate(&self) -> Result<()> {
        let all = [
            self.gamma,
            self.beta_x,
            self.beta_z,
            self.l_z,
            self.eps,
            self.eps_g,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("regularity constants must be finite"));
        }
        if !(self.gamma > T::zero()) || self.gamma > self.beta_x {
            return Err(Error::invalid(format!(
                "need 0 < gamma <= beta_x, got gamma = {}, beta_x = {}",
                self.gamma, self.beta_x
            )));
        }
        if [self.beta_z, self.l_z, self.eps, self.eps_g]
            .iter()
            .any(|&v| v < T::zero())
        {
            return Err(Error::invalid(
                "beta_z, L_z, eps, eps_g must be nonnegative",
            ));
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct PerformativeProblem<T: Scalar> {
    loss: Arc<dyn Loss<T>>,
    objective_map: DistributionMap<T>,
    constraint_map: DistributionMap<T>,
    g: Matrix<T>,
    constants: RegularityConstants<T>,
    decision_box: DecisionBox<T>,
}

impl<T: Scalar> std::fmt::Debug for PerformativeProblem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PerformativeProblem")
            .field("n", &self.decision_dim())
            .field("G", &self.g)
            .field("constants", &self.constants)
            .field("decision_box", &self.decision_box)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> PerformativeProblem<T> {
    pub fn new(
        loss: Arc<dyn Loss<T>>,
        objective_map: DistributionMap<T>,
        constraint_map: DistributionMap<T>,
        g: Matrix<T>,
        constants: RegularityConstants<T>,
        decision_box: DecisionBox<T>,
    ) -> Result<Self> {
        constants.validate()?;
        let n = loss.decision_dim();
        if g.cols() != n || decision_box.dim() != n {
            return Err(Error::invalid(format!(
                "G has {} columns and the box {} coordinates; loss expects n = {n}",
                g.cols(),
                decision_box.dim()
            )));
        }
        if objective_map.dimension() != loss.sample_dim() {
            return Err(Error::invalid(format!(
                "objective map has dimension {}, loss expects d_z = {}",
                objective_map.dimension(),
                loss.sample_dim()
            )));
        }
        if constraint_map.dimension() != g.rows() {
            return Err(Error::invalid(format!(
                "constraint map has dimension {}, G has d_w = {} rows",
                constraint_map.dimension(),
                g.rows()
            )));
        }
        for (map, name) in [
            (&objective_map, "objective"),
            (&constraint_map, "constraint"),
        ] {
            if map.decision_dim().is_some_and(|d| d != n) {
                return Err(Error::invalid(format!(
                    "{name} map decision dimension differs from n"
                )));
            }
        }
        let slack = T::of(1e-12);
        if objective_map.declared_sensitivity() > constants.eps + slack {
            return Err(Error::invalid(
                "eps is below the objective map's declared sensitivity",
            ));
        }
        if constraint_map.declared_sensitivity() > constants.eps_g + slack {
            return Err(Error::invalid(
                "eps_g is below the constraint map's declared sensitivity",
            ));
        }
        min_eig_gram(&g)?;
        Ok(Self {
            loss,
            objective_map,
            constraint_map,
            g,
            constants,
            decision_box,
        })
    }

    pub fn decision_dim(&self) -> usize {
        self.g.cols()
    }

    pub fn constraint_dim(&self) -> usize {
        self.g.rows()
    }

    pub fn g(&self) -> &Matrix<T> {
        &self.g
    }

    pub fn constants(&self) -> &RegularityConstants<T> {
        &self.constants
    }

    pub fn decision_box(&self) -> &DecisionBox<T> {
        &self.decision_box
    }

    pub fn objective_map(&self) -> &DistributionMap<T> {
        &self.objective_map
    }

    pub fn constraint_map(&self) -> &DistributionMap<T> {
        &self.constraint_map
    }

    pub fn loss(&self) -> &dyn Loss<T> {
        self.loss.as_ref()
    }

    fn check_len(&self, v: &[T], what: &str) -> Result<()> {
        if v.len() != self.decision_dim() {
            return Err(Error::invalid(format!(
                "{what} has length {}, expected {}",
                v.len(),
                self.decision_dim()
            )));
        }
        Ok(())
    }

    /// `f_deploy(x)`.
    pub fn expected_loss(&self, deploy: &[T], x: &[T]) -> Result<T> {
        self.check_len(x, "x")?;
        let m = self.objective_map.moments(deploy)?;
        Ok(self.loss.expected_value(x, &m))
    }

    /// `∇_x f_deploy(x)`.
    pub fn expected_grad(&self, deploy: &[T], x: &[T]) -> Result<Vector<T>> {
        self.check_len(x, "x")?;
        let m = self.objective_map.moments(deploy)?;
        Ok(self.loss.expected_gradient(x, &m))
    }

    /// `ξ(deploy)`.
    pub fn constraint_rhs(&self, deploy: &[T]) -> Result<Vector<T>> {
        self.check_len(deploy, "deploy")?;
        self.constraint_map.mean(deploy)
    }

    /// `[G x − ξ(deploy)]₊`.
    pub fn feasibility_residual(&self, deploy: &[T], x: &[T]) -> Result<Vector<T>> {
        self.check_len(x, "x")?;
        let xi = self.constraint_rhs(deploy)?;
        Ok(project_nonneg(&(&self.g.mul_vec(x) - &xi)))
    }

    /// Performative risk `f_x(x)`.
    pub fn performative_risk(&self, x: &[T]) -> Result<T> {
        self.expected_loss(x, x)
    }

    /// The objective with `D` frozen at `deploy`.
    pub fn frozen_objective(&self, deploy: &[T]) -> Result<FrozenObjective<T>> {
        self.check_len(deploy, "deploy")?;
        let moments = self.objective_map.moments(deploy)?;
        let quadratic = self.loss.expected_quadratic(&moments);
        Ok(FrozenObjective {
            loss: Arc::clone(&self.loss),
            moments,
            quadratic,
            gamma: self.constants.gamma,
            beta: self.constants.beta_x,
        })
    }
}

/// `x ↦ E_{z ~ D(deploy)} l(x, z)`.
pub struct FrozenObjective<T: Scalar> {
    loss: Arc<dyn Loss<T>>,
    moments: Moments<T>,
    quadratic: Option<QuadraticForm<T>>,
    gamma: T,
    beta: T,
}

impl<T: Scalar> FrozenObjective<T> {
    pub fn moments(&self) -> &Moments<T> {
        &self.moments
    }
}

impl<T: Scalar> SmoothObjective<T> for FrozenObjective<T> {
    fn dim(&self) -> usize {
        self.loss.decision_dim()
    }

    fn value(&self, x: &[T]) -> T {
        self.loss.expected_value(x, &self.moments)
    }

    fn gradient(&self, x: &[T]) -> Vector<T> {
        self.loss.expected_gradient(x, &self.moments)
    }

    fn strong_convexity(&self) -> T {
        self.gamma
    }

    fn smoothness(&self) -> T {
        self.beta
    }

    fn quadratic(&self) -> Option<&QuadraticForm<T>> {
        self.quadratic.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_problem(theta: f64) -> PerformativeProblem<f64> {
        let loss = QuadraticLoss::new(
            Matrix::from_row_major(1, 1, vec![2.0]).unwrap(),
            vec![0.0].into(),
            Matrix::zeros(1, 1),
            vec![0.0].into(),
            vec![0.0].into(),
            0.0,
        )
        .unwrap();
        let obj = DistributionMap::point(vec![0.0]).build().unwrap();
        let con = DistributionMap::point(vec![0.0])
            .mean_shift(Matrix::from_row_major(1, 1, vec![-theta]).unwrap())
            .declared_sensitivity(theta)
            .build()
            .unwrap();
        PerformativeProblem::new(
            Arc::new(loss),
            obj,
            con,
            Matrix::from_row_major(1, 1, vec![-1.0]).unwrap(),
            RegularityConstants {
                gamma: 2.0,
                beta_x: 2.0,
                beta_z: 0.0,
                l_z: 0.0,
                eps: 0.0,
                eps_g: theta,
            },
            DecisionBox::cube(1, -2.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_loss_and_residual() {
        let p = scalar_problem(0.5);
        assert_eq!(p.expected_loss(&[0.0], &[3.0]).unwrap(), 9.0);
        assert_eq!(p.expected_grad(&[0.0], &[2.0]).unwrap().as_slice(), &[4.0]);
        assert_eq!(p.constraint_rhs(&[2.0]).unwrap().as_slice(), &[-1.0]);
        let r = p.feasibility_residual(&[1.0], &[0.4]).unwrap();
        assert!((r[0] - 0.1).abs() < 1e-15);
        assert_eq!(
            p.feasibility_residual(&[1.0], &[0.5]).unwrap().as_slice(),
            &[0.0]
        );
        assert_eq!(
            p.feasibility_residual(&[1.0], &[1.5]).unwrap().as_slice(),
            &[0.0]
        );
    }

    #[test]
    fn constants_validated() {
        let p = scalar_problem(0.5);
        let mut c = *p.constants();
        c.gamma = 3.0;
        assert!(c.validate().is_err());
        c.gamma = 1.0;
        c.eps = -0.1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn eps_must_cover_declared_sensitivity() {
        let p = scalar_problem(0.5);
        let mut c = *p.constants();
        c.eps_g = 0.1;
        let r = PerformativeProblem::new(
            Arc::clone(&p.loss),
            p.objective_map.clone(),
            p.constraint_map.clone(),
            p.g.clone(),
            c,
            p.decision_box.clone(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn variance_enters_value_not_gradient() {
        let loss = QuadraticLoss::new(
            Matrix::from_row_major(1, 1, vec![1.0]).unwrap(),
            vec![0.0].into(),
            Matrix::from_row_major(1, 1, vec![1.0]).unwrap(),
            vec![2.0].into(),
            vec![0.0].into(),
            0.0,
        )
        .unwrap();
        let a = Moments {
            mean: vec![1.0].into(),
            variance: vec![0.0].into(),
        };
        let b = Moments {
            mean: vec![1.0].into(),
            variance: vec![0.25].into(),
        };
        assert!(
            (loss.expected_value(&[1.0], &b) - loss.expected_value(&[1.0], &a) - 0.25_f64).abs()
                < 1e-15
        );
        assert_eq!(
            loss.expected_gradient(&[1.0], &a),
            loss.expected_gradient(&[1.0], &b)
        );
    }
}
