//! Repeated constrained minimization (RCM) and repeated dual ascent (RDA).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner_solver::{solve_constrained, solve_lagrangian_min, SolverConfig};
use crate::numerics::{distance, project_nonneg, Vector};
use crate::problem::PerformativeProblem;
use crate::scalar::Scalar;

/// Abort threshold factor: diverged once `‖x_t‖ > DIVERGENCE_FACTOR (1 + ‖x₀‖)`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub struct RcmConfig<T> {
    pub max_iterations: usize,
    pub inner: SolverConfig<T>,
    /// Halt once `‖x_{t+1} − x_t‖` drops to this.
    pub stop_distance: T,
}

impl<T: Scalar> Default for RcmConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            inner: SolverConfig::default(),
            stop_distance: T::of(1e-12),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RdaConfig<T> {
    pub max_iterations: usize,
    pub eta: T,
    pub inner: SolverConfig<T>,
    /// `λ₁`; empty means zeros.
    pub lambda_init: Vec<T>,
    /// Halt once both `‖x_t − x_{t−1}‖` and `‖λ_{t+1} − λ_t‖` drop to this.
    pub stop_distance: T,
}

impl<T: Scalar> RdaConfig<T> {
    pub fn new(eta: T) -> Self {
        Self {
            max_iterations: 10_000,
            eta,
            inner: SolverConfig::default(),
            lambda_init: Vec::new(),
            stop_distance: T::of(1e-12),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Rcm,
    Rda,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rcm => "rcm",
            Algorithm::Rda => "rda",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStatus {
    Converged,
    BudgetExhausted,
    Diverged,
}

impl TraceStatus {
    pub fn name(self) -> &'static str {
        match self {
            TraceStatus::Converged => "converged",
            TraceStatus::BudgetExhausted => "budget-exhausted",
            TraceStatus::Diverged => "diverged",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(TraceStatus::Converged),
            "budget-exhausted" => Ok(TraceStatus::BudgetExhausted),
            "diverged" => Ok(TraceStatus::Diverged),
            other => Err(Error::Schema(format!("unknown trace status {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord<T> {
    pub t: usize,
    pub x: Vector<T>,
    /// RDA only: the multiplier produced at this step, `λ_{t+1}`. Record 0
    /// carries `λ₁`.
    pub lambda: Option<Vector<T>>,
    /// `max_i [G x_t − ξ(x_t)]₊`.
    pub constraint_residual: T,
    /// `f_{x_t}(x_t)`.
    pub objective_value: T,
    pub dist_to_reference: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T> {
    pub algorithm: Algorithm,
    pub records: Vec<TraceRecord<T>>,
    pub status: TraceStatus,
    pub inner_tolerance: T,
}

impl<T: Scalar> Trace<T> {
    pub fn last(&self) -> &TraceRecord<T> {
        self.records
            .last()
            .expect("trace has at least the initial record")
    }

    pub fn decision_dim(&self) -> usize {
        self.records.first().map_or(0, |r| r.x.len())
    }

    pub fn constraint_dim(&self) -> usize {
        self.records
            .first()
            .and_then(|r| r.lambda.as_ref())
            .map_or(0, |l| l.len())
    }

    /// Fills `dist_to_reference` with `‖x_t − x_ref‖`.
    pub fn attach_reference(&mut self, x_ref: &[T]) {
        for r in &mut self.records {
            r.dist_to_reference = Some(distance(&r.x, x_ref));
        }
    }

    pub fn iterates(&self) -> impl Iterator<Item = &Vector<T>> {
        self.records.iter().map(|r| &r.x)
    }
}

fn check_start<T: Scalar>(p: &PerformativeProblem<T>, x0: &[T]) -> Result<()> {
    if x0.len() != p.decision_dim() {
        return Err(Error::invalid(format!(
            "x0 has length {}, problem has n = {}",
            x0.len(),
            p.decision_dim()
        )));
    }
    p.decision_box().check(x0)
}

fn record<T: Scalar>(
    p: &PerformativeProblem<T>,
    t: usize,
    x: Vector<T>,
    lambda: Option<Vector<T>>,
) -> Result<TraceRecord<T>> {
    let residual = p
        .feasibility_residual(&x, &x)?
        .iter()
        .fold(T::zero(), |m, &v| m.max(v));
    let objective_value = p.performative_risk(&x)?;
    Ok(TraceRecord {
        t,
        x,
        lambda,
        constraint_residual: residual,
        objective_value,
        dist_to_reference: None,
    })
}

fn diverged<T: Scalar>(x: &[T], limit: T) -> bool {
    !x.iter().all(|v| v.is_finite()) || crate::numerics::norm(x) > limit
}

/// Algorithm 1: `x_{t+1} = argmin f_{x_t}(x) s.t. G x <= ξ(x_t)`.
pub fn rcm<T: Scalar>(
    p: &PerformativeProblem<T>,
    x0: &[T],
    cfg: &RcmConfig<T>,
) -> Result<Trace<T>> {
    check_start(p, x0)?;
    if cfg.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be >= 1".into()));
    }
    let limit = T::of(DIVERGENCE_FACTOR) * (T::one() + crate::numerics::norm(x0));
    let mut records = vec![record(p, 0, x0.to_vec().into(), None)?];
    let mut status = TraceStatus::BudgetExhausted;
    let mut x = Vector::from(x0.to_vec());
    for t in 1..=cfg.max_iterations {
        let step = || -> Result<Vector<T>> {
            let f = p.frozen_objective(&x)?;
            let b = p.constraint_rhs(&x)?;
            Ok(solve_constrained(&f, p.g(), &b, &cfg.inner)?.x_star)
        };
        let next = step().map_err(Error::at_iteration(t))?;
        if diverged(&next, limit) {
            records.push(TraceRecord {
                t,
                constraint_residual: T::nan(),
                objective_value: T::nan(),
                x: next,
                lambda: None,
                dist_to_reference: None,
            });
            status = TraceStatus::Diverged;
            break;
        }
        let moved = distance(&next, &x);
        records.push(record(p, t, next.clone(), None).map_err(Error::at_iteration(t))?);
        x = next;
        if moved <= cfg.stop_distance {
            status = TraceStatus::Converged;
            break;
        }
    }
    Ok(Trace {
        algorithm: Algorithm::Rcm,
        records,
        status,
        inner_tolerance: cfg.inner.tolerance,
    })
}

/// Algorithm 2, one iteration:
///
/// ```text
///     x_t     = argmin_x L_{x_{t−1}}(x, λ_t)
///     ȳ_t     = argmin_x L_{x_t}(x, λ_t)
///     λ_{t+1} = [λ_t + η (G ȳ_t − ξ(x_t))]₊
/// ```
pub fn rda<T: Scalar>(
    p: &PerformativeProblem<T>,
    x0: &[T],
    cfg: &RdaConfig<T>,
) -> Result<Trace<T>> {
    check_start(p, x0)?;
    if !(cfg.eta > T::zero()) || !cfg.eta.is_finite() {
        return Err(Error::Config(format!(
            "eta must be positive, got {}",
            cfg.eta
        )));
    }
    if cfg.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be >= 1".into()));
    }
    let dw = p.constraint_dim();
    let mut lambda: Vector<T> = if cfg.lambda_init.is_empty() {
        Vector::zeros(dw)
    } else if cfg.lambda_init.len() != dw {
        return Err(Error::Config(format!("lambda_init needs length {dw}")));
    } else if cfg
        .lambda_init
        .iter()
        .any(|&l| l < T::zero() || !l.is_finite())
    {
        return Err(Error::Config(
            "lambda_init must be componentwise >= 0".into(),
        ));
    } else {
        cfg.lambda_init.clone().into()
    };

    let limit = T::of(DIVERGENCE_FACTOR) * (T::one() + crate::numerics::norm(x0));
    let mut records = vec![record(p, 0, x0.to_vec().into(), Some(lambda.clone()))?];
    let mut status = TraceStatus::BudgetExhausted;
    let mut x_prev = Vector::from(x0.to_vec());
    for t in 1..=cfg.max_iterations {
        let step = || -> Result<(Vector<T>, Vector<T>)> {
            let f_prev = p.frozen_objective(&x_prev)?;
            let x_t = solve_lagrangian_min(&f_prev, p.g(), &lambda, &cfg.inner)?;
            if diverged(&x_t, limit) {
                return Ok((x_t, lambda.clone()));
            }
            let f_t = p.frozen_objective(&x_t)?;
            let y_bar = solve_lagrangian_min(&f_t, p.g(), &lambda, &cfg.inner)?;
            let xi = p.constraint_rhs(&x_t)?;
            let gy = p.g().mul_vec(&y_bar);
            let grad = &gy - &xi;
            Ok((x_t, project_nonneg(&lambda.axpy(cfg.eta, &grad))))
        };
        let (x_t, next_lambda) = step().map_err(Error::at_iteration(t))?;
        if diverged(&x_t, limit) || !next_lambda.is_finite() {
            records.push(TraceRecord {
                t,
                x: x_t,
                lambda: Some(next_lambda),
                constraint_residual: T::nan(),
                objective_value: T::nan(),
                dist_to_reference: None,
            });
            status = TraceStatus::Diverged;
            break;
        }
        let moved = distance(&x_t, &x_prev).max(distance(&next_lambda, &lambda));
        records.push(
            record(p, t, x_t.clone(), Some(next_lambda.clone())).map_err(Error::at_iteration(t))?,
        );
        x_prev = x_t;
        lambda = next_lambda;
        if moved <= cfg.stop_distance {
            status = TraceStatus::Converged;
            break;
        }
    }
    Ok(Trace {
        algorithm: Algorithm::Rda,
        records,
        status,
        inner_tolerance: cfg.inner.tolerance,
    })
}

/// Ratios `‖x_{t+1} − x_ref‖ / ‖x_t − x_ref‖` over the steps whose starting
/// distance exceeds ten inner tolerances.
pub fn measured_contraction<T: Scalar>(trace: &Trace<T>, x_ref: &[T]) -> Result<Vec<T>> {
    let floor = T::of(10.0) * trace.inner_tolerance;
    let d: Vec<T> = trace.iterates().map(|x| distance(x, x_ref)).collect();
    let ratios: Vec<T> = d
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no iterate is farther than {:e} from the reference",
            floor.as_f64()
        )));
    }
    Ok(ratios)
}
