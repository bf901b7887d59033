//! Convergence constants, condition checks, reference oracles and the
//! optimality-gap bound.

use serde_json::{Map, Value};

use crate::algorithms::{rcm, RcmConfig, TraceStatus};
use crate::error::{Error, Result};
use crate::inner_solver::{solve_constrained, SolverConfig};
use crate::numerics::{distance, min_eig_gram, spectral_norm, Matrix, Vector};
use crate::problem::{PerformativeProblem, RegularityConstants};
use crate::scalar::Scalar;

/// Consecutive expanding steps after which the equilibrium oracle gives up.
pub const EXPANSION_STREAK: usize = 5;

/// Every constant and condition flag of the convergence theory.
///
/// Quantities that only exist when `a₂ > 0` (and, for the `b` family,
/// `ρ₄ < 1`) are `None` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsReport<T> {
    pub gamma: T,
    pub beta_x: T,
    pub beta_z: T,
    pub l_z: T,
    pub eps: T,
    pub eps_g: T,
    pub g_norm: T,
    pub lam_min_gram: T,
    pub l_xstar: T,
    pub gamma_d: T,
    pub l_d: T,
    pub rho1: T,
    pub rho2: T,
    pub rho3: T,
    pub rho4: T,
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub alpha_bar_sqrt: T,
    pub alpha: Option<T>,
    pub a3: Option<T>,
    pub b3: Option<T>,
    /// Smaller root of `a₁η² − a₂η + a₃`.
    pub s1: Option<T>,
    /// Larger root of `a₁η² − a₂η + a₃`.
    pub s1_upper: Option<T>,
    /// Positive root of `b₁η² + b₂η − b₃`; infinite when `b₁ = b₂ = 0`.
    pub s2: Option<T>,
    /// `εβ_z/γ + L_{x*} ε_g`.
    pub rcm_rate: T,
    pub rcm_condition: bool,
    pub rda_condition_9: bool,
    pub rda_condition_10: bool,
    /// `ε_g (1 + ‖G‖²/γ²) < 2γ_d`, evaluated only when `ε = 0`.
    pub rda_fixed_obj_condition: bool,
}

impl<T: Scalar> ConstantsReport<T> {
    /// `‖λ_{t+1} − λ*‖²` coefficient: `1 + a₁η² − a₂η + a₃`.
    pub fn kappa1(&self, eta: T) -> Option<T> {
        Some(T::one() + self.a1 * eta * eta - self.a2 * eta + self.a3?)
    }

    /// `α ‖x_{t−1} − x_s‖²` coefficient: `ρ₄ + (b₁η² + b₂η)/α`.
    pub fn kappa2(&self, eta: T) -> Option<T> {
        let alpha = self.alpha?;
        if !(alpha > T::zero()) {
            return None;
        }
        Some(self.rho4 + (self.b1 * eta * eta + self.b2 * eta) / alpha)
    }

    /// Rate of the Lyapunov function `‖λ_{t+1} − λ*‖² + α‖x_t − x_s‖²`.
    pub fn kappa(&self, eta: T) -> Option<T> {
        Some(self.kappa1(eta)?.max(self.kappa2(eta)?))
    }

    /// `η²a₁ − ηa₂ + αa₃`, in its printed form.
    pub fn kappa1_stated(&self, eta: T) -> Option<T> {
        Some(eta * eta * self.a1 - eta * self.a2 + self.alpha? * self.a3?)
    }

    /// `η²b₁ + ηb₂ + b₃`, in its printed form.
    pub fn kappa2_stated(&self, eta: T) -> Option<T> {
        Some(eta * eta * self.b1 + eta * self.b2 + self.b3?)
    }

    /// Dual rate when the objective map is fixed (`ε = 0`).
    pub fn kappa3(&self, eta: T) -> T {
        let eg = self.eps_g;
        let g2 = self.g_norm * self.g_norm / (self.gamma * self.gamma);
        let ld = self.l_d;
        T::one() - T::of(2.0) * eta * self.gamma_d
            + eta * eta * ld * ld
            + eg * eta
            + eg * ld * eta * eta
            + g2 * (eg * eg * eta * eta + eg * eta + eg * ld * eta * eta)
    }

    /// Step-size ceiling accompanying the fixed-objective condition.
    pub fn fixed_objective_eta_bound(&self) -> T {
        let eg = self.eps_g;
        let g2 = self.g_norm * self.g_norm / (self.gamma * self.gamma);
        let ld = self.l_d;
        let num = T::of(2.0) * self.gamma_d - eg * (T::one() + g2);
        let den = ld * ld + eg * ld + eg * eg * g2 + eg * eg * ld * g2;
        num / den
    }

    /// `(s₁, s₂)` when `s₁ < s₂`.
    pub fn stated_window(&self) -> Option<(T, T)> {
        let (s1, s2) = (self.s1?, self.s2?);
        (s1 < s2).then_some((s1, s2))
    }

    /// `(s₁, min(s₁', s₂))`: where both Lyapunov coefficients are below one.
    pub fn effective_window(&self) -> Option<(T, T)> {
        let (s1, s1u, s2) = (self.s1?, self.s1_upper?, self.s2?);
        let hi = s1u.min(s2);
        (s1 < hi).then_some((s1, hi))
    }

    /// Flat JSON object with stable keys; non-finite numbers become strings.
    pub fn to_json_value(&self) -> Value {
        let mut m = Map::new();
        let num = |v: T| json_number(v.as_f64());
        let opt = |v: Option<T>| v.map_or(Value::Null, num);
        for (k, v) in [
            ("gamma", self.gamma),
            ("beta_x", self.beta_x),
            ("beta_z", self.beta_z),
            ("L_z", self.l_z),
            ("eps", self.eps),
            ("eps_g", self.eps_g),
            ("g_norm", self.g_norm),
            ("lam_min_gram", self.lam_min_gram),
            ("L_xstar", self.l_xstar),
            ("gamma_d", self.gamma_d),
            ("L_d", self.l_d),
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("rho3", self.rho3),
            ("rho4", self.rho4),
            ("a1", self.a1),
            ("a2", self.a2),
        ] {
            m.insert(k.into(), num(v));
        }
        m.insert("a3".into(), opt(self.a3));
        m.insert("b1".into(), num(self.b1));
        m.insert("b2".into(), num(self.b2));
        m.insert("b3".into(), opt(self.b3));
        m.insert("alpha_bar_sqrt".into(), num(self.alpha_bar_sqrt));
        m.insert("alpha".into(), opt(self.alpha));
        m.insert("s1".into(), opt(self.s1));
        m.insert("s1_upper".into(), opt(self.s1_upper));
        m.insert("s2".into(), opt(self.s2));
        let mid = self.stated_window().map(|(a, b)| (a + b) * T::of(0.5));
        m.insert("eta_mid".into(), opt(mid));
        m.insert("kappa_mid".into(), opt(mid.and_then(|e| self.kappa(e))));
        let eff = self.effective_window();
        m.insert("window_lower".into(), opt(eff.map(|w| w.0)));
        m.insert("window_upper".into(), opt(eff.map(|w| w.1)));
        m.insert("rcm_rate".into(), num(self.rcm_rate));
        m.insert("rcm_condition".into(), Value::Bool(self.rcm_condition));
        m.insert("rda_condition_9".into(), Value::Bool(self.rda_condition_9));
        m.insert(
            "rda_condition_10".into(),
            Value::Bool(self.rda_condition_10),
        );
        m.insert(
            "rda_fixed_obj_condition".into(),
            Value::Bool(self.rda_fixed_obj_condition),
        );
        Value::Object(m)
    }
}

pub(crate) fn json_number(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    } else if v.is_nan() {
        Value::Null
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn compute_constants<T: Scalar>(p: &PerformativeProblem<T>) -> Result<ConstantsReport<T>> {
    compute_constants_from(p.constants(), p.g())
}

pub fn compute_constants_from<T: Scalar>(
    c: &RegularityConstants<T>,
    g: &Matrix<T>,
) -> Result<ConstantsReport<T>> {
    let two = T::of(2.0);
    let four = T::of(4.0);
    let one = T::one();
    let zero = T::zero();
    let g_norm = spectral_norm(g)?;
    let lam_min_gram = min_eig_gram(g)?;
    let (gamma, beta_x) = (c.gamma, c.beta_x);
    let l_xstar = (beta_x / (gamma * lam_min_gram)).sqrt();
    let gamma_d = lam_min_gram / beta_x;
    let l_d = g_norm * g_norm / gamma;

    let rho1 = c.eps * c.beta_z / gamma;
    let rho2 = rho1 * g_norm + c.eps_g;
    let rho3 = rho1 * g_norm / gamma + g_norm * g_norm / (gamma * gamma);
    let rho4 = rho1 * rho1 + rho1 * g_norm / gamma;
    let a1 = l_d * l_d + l_d * rho2 + rho2 * rho2 * rho3 + l_d * rho2 * rho3;
    let a2 = two * gamma_d - rho2 * (one + rho3);
    let b1 = rho4 * (rho2 * rho2 + l_d * rho2);
    let b2 = rho2 * rho4;
    let alpha_bar_sqrt = (one - l_d * l_d / (four * gamma_d * (rho2 + l_d))).max(zero);

    let (mut alpha, mut a3, mut s1, mut s1_upper, mut b3, mut s2) =
        (None, None, None, None, None, None);
    if a2 > zero {
        let al = (one - alpha_bar_sqrt) * a2 * a2 / (four * rho3 * a1);
        let a3v = al * rho3;
        // a₂² − 4a₁a₃ = a₂²√ᾱ; written this way the roots coincide exactly when √ᾱ = 0
        let disc = a2 * alpha_bar_sqrt.sqrt();
        alpha = Some(al);
        a3 = Some(a3v);
        s1 = Some((a2 - disc) / (two * a1));
        s1_upper = Some((a2 + disc) / (two * a1));
        if rho4 < one {
            let b3v = al * (one - rho4);
            b3 = Some(b3v);
            s2 = Some(if b1 > zero {
                (-b2 + (b2 * b2 + four * b1 * b3v).sqrt()) / (two * b1)
            } else if b2 > zero {
                b3v / b2
            } else {
                T::infinity()
            });
        }
    }

    let rcm_rate = rho1 + l_xstar * c.eps_g;
    let g2 = g_norm * g_norm / (gamma * gamma);
    let cross = c.eps * c.beta_z * g_norm / (gamma * gamma);
    let cond9 = (c.eps * c.beta_z * g_norm / gamma + c.eps_g) * (one + cross + g2) < two * gamma_d;
    let cond10 = rho1 * (one + cross) < one;
    let cond13 = c.eps.is_zero() && c.eps_g * (one + g2) < two * gamma_d;
    Ok(ConstantsReport {
        gamma,
        beta_x,
        beta_z: c.beta_z,
        l_z: c.l_z,
        eps: c.eps,
        eps_g: c.eps_g,
        g_norm,
        lam_min_gram,
        l_xstar,
        gamma_d,
        l_d,
        rho1,
        rho2,
        rho3,
        rho4,
        a1,
        a2,
        b1,
        b2,
        alpha_bar_sqrt,
        alpha,
        a3,
        b3,
        s1,
        s1_upper,
        s2,
        rcm_rate,
        rcm_condition: rcm_rate < one,
        rda_condition_9: cond9,
        rda_condition_10: cond10,
        rda_fixed_obj_condition: cond13,
    })
}

/// `εβ_z/γ + L_{x*} ε_g < 1`.
pub fn check_rcm_condition<T: Scalar>(r: &ConstantsReport<T>) -> bool {
    r.rcm_condition
}

pub fn check_rda_conditions<T: Scalar>(r: &ConstantsReport<T>) -> (bool, bool) {
    (r.rda_condition_9, r.rda_condition_10)
}

/// Fixed-objective condition together with the step-size ceiling.
pub fn check_fixed_objective_condition<T: Scalar>(r: &ConstantsReport<T>, eta: T) -> Result<bool> {
    if !r.eps.is_zero() {
        return Err(Error::Precondition(format!(
            "fixed-objective condition needs eps = 0, got {}",
            r.eps
        )));
    }
    Ok(r.rda_fixed_obj_condition && eta > T::zero() && eta < r.fixed_objective_eta_bound())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium<T> {
    pub x: Vector<T>,
    /// Multiplier of the problem frozen at `x`.
    pub lambda: Vector<T>,
    /// `‖x − argmin_{frozen at x}‖`.
    pub residual: T,
    pub iterations: usize,
}

/// Runs RCM to a fixed point and certifies it by re-solving at the terminus.
pub fn equilibrium_oracle<T: Scalar>(
    p: &PerformativeProblem<T>,
    x0: &[T],
    tol: T,
) -> Result<Equilibrium<T>> {
    if !(tol > T::zero()) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let inner = SolverConfig::with_tolerance(tol / T::of(100.0));
    let cfg = RcmConfig {
        max_iterations: 100_000,
        inner: inner.clone(),
        stop_distance: tol,
    };
    let trace = rcm(p, x0, &cfg)?;
    let steps: Vec<T> = trace
        .records
        .windows(2)
        .map(|w| distance(&w[1].x, &w[0].x))
        .collect();
    let mut streak = 0;
    for w in steps.windows(2) {
        if w[1] > w[0] {
            streak += 1;
            if streak >= EXPANSION_STREAK {
                return Err(Error::NoEquilibriumCertificate(format!(
                    "RCM steps grew {EXPANSION_STREAK} times in a row"
                )));
            }
        } else {
            streak = 0;
        }
    }
    if trace.status != TraceStatus::Converged {
        return Err(Error::NoEquilibriumCertificate(format!(
            "RCM ended with status {}",
            trace.status.name()
        )));
    }
    let x = trace.last().x.clone();
    let frozen = p.frozen_objective(&x)?;
    let b = p.constraint_rhs(&x)?;
    let sol = solve_constrained(&frozen, p.g(), &b, &inner)?;
    let residual = distance(&sol.x_star, &x);
    if residual > T::of(10.0) * tol {
        return Err(Error::NoEquilibriumCertificate(format!(
            "fixed-point residual {residual} exceeds {}",
            T::of(10.0) * tol
        )));
    }
    Ok(Equilibrium {
        x,
        lambda: sol.lambda_star,
        residual,
        iterations: trace.records.len() - 1,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalPoint<T> {
    pub x: Vector<T>,
    pub value: T,
    /// Diagonal of one refined grid cell.
    pub resolution: T,
}

fn axis<T: Scalar>(lo: T, hi: T, k: usize) -> Vec<T> {
    if k == 1 || lo == hi {
        return vec![lo];
    }
    let step = (hi - lo) / T::of((k - 1) as f64);
    (0..k)
        .map(|i| {
            if i + 1 == k {
                hi
            } else {
                lo + step * T::of(i as f64)
            }
        })
        .collect()
}

fn grid_argmin<T: Scalar>(
    p: &PerformativeProblem<T>,
    axes: &[Vec<T>],
) -> Result<Option<(Vector<T>, T)>> {
    let n = axes.len();
    let mut idx = vec![0usize; n];
    let mut best: Option<(Vector<T>, T)> = None;
    let g = p.g();
    loop {
        let x: Vec<T> = idx.iter().zip(axes).map(|(&i, a)| a[i]).collect();
        let xi = p.constraint_rhs(&x)?;
        let gx = g.mul_vec(&x);
        if gx.iter().zip(xi.iter()).all(|(&a, &b)| a <= b) {
            let v = p.performative_risk(&x)?;
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((x.into(), v));
            }
        }
        let Some(k) = (0..n).rev().find(|&k| idx[k] + 1 < axes[k].len()) else {
            return Ok(best);
        };
        idx[k] += 1;
        idx[k + 1..].fill(0);
    }
}

/// Grid search for `min f_x(x) s.t. G x <= ξ(x)` over the decision box,
/// followed by one 10x finer pass around the best point.
pub fn optimal_oracle<T: Scalar>(
    p: &PerformativeProblem<T>,
    grid_per_dim: usize,
) -> Result<OptimalPoint<T>> {
    let n = p.decision_dim();
    if n > 3 {
        return Err(Error::invalid("optimal_oracle supports n <= 3"));
    }
    if grid_per_dim < 11 {
        return Err(Error::invalid(
            "optimal_oracle needs at least 11 points per dimension",
        ));
    }
    let bx = p.decision_box();
    let coarse: Vec<Vec<T>> = (0..n)
        .map(|i| axis(bx.lower[i], bx.upper[i], grid_per_dim))
        .collect();
    let Some((best, _)) = grid_argmin(p, &coarse)? else {
        return Err(Error::Infeasible(
            "no grid point satisfies G x <= xi(x)".into(),
        ));
    };
    let h: Vec<T> = (0..n)
        .map(|i| (bx.upper[i] - bx.lower[i]) / T::of((grid_per_dim - 1) as f64))
        .collect();
    let fine: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let step = h[i] / T::of(10.0);
            (-10..=10)
                .map(|k| best[i] + step * T::of(k as f64))
                .filter(|v| *v >= bx.lower[i] && *v <= bx.upper[i])
                .collect()
        })
        .collect();
    let (x, value) = grid_argmin(p, &fine)?.expect("coarse optimum lies on the fine grid");
    let resolution = h
        .iter()
        .map(|&s| (s / T::of(10.0)) * (s / T::of(10.0)))
        .sum::<T>()
        .sqrt();
    Ok(OptimalPoint {
        x,
        value,
        resolution,
    })
}

/// `2(L_z ε + ε_g √d_w ‖λ*‖) / (γ (1 − L_{x*} ε_g √d_w)²)`.
pub fn gap_bound_value<T: Scalar>(r: &ConstantsReport<T>, d_w: usize, lambda_norm: T) -> Result<T> {
    let sq = T::of(d_w as f64).sqrt();
    let premise = r.l_xstar * r.eps_g * sq;
    if !(premise < T::one()) {
        return Err(Error::BoundInapplicable(format!(
            "L_x* eps_g sqrt(d_w) = {premise} is not below 1"
        )));
    }
    let gap = T::one() - premise;
    Ok(T::of(2.0) * (r.l_z * r.eps + r.eps_g * sq * lambda_norm) / (r.gamma * gap * gap))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub x_s: Vector<T>,
    pub x_o: Vector<T>,
    pub lambda_s_star: Vector<T>,
    pub measured_distance: T,
    pub bound_value: T,
    pub resolution: T,
    pub bound_holds: bool,
}

impl<T: Scalar> BoundReport<T> {
    pub fn to_json_value(&self) -> Value {
        let vec = |v: &Vector<T>| Value::Array(v.iter().map(|x| json_number(x.as_f64())).collect());
        let mut m = Map::new();
        m.insert("x_s".into(), vec(&self.x_s));
        m.insert("x_o".into(), vec(&self.x_o));
        m.insert("lambda_s_star".into(), vec(&self.lambda_s_star));
        m.insert(
            "measured_distance".into(),
            json_number(self.measured_distance.as_f64()),
        );
        m.insert("bound_value".into(), json_number(self.bound_value.as_f64()));
        m.insert("resolution".into(), json_number(self.resolution.as_f64()));
        m.insert("bound_holds".into(), Value::Bool(self.bound_holds));
        Value::Object(m)
    }
}

/// Compares the grid optimum against `x_s` and the distance bound.
pub fn optimality_gap_bound<T: Scalar>(
    p: &PerformativeProblem<T>,
    x_s: &[T],
    lambda_s_star: &[T],
    grid_per_dim: usize,
) -> Result<BoundReport<T>> {
    let r = compute_constants(p)?;
    let lambda = Vector::from(lambda_s_star.to_vec());
    let bound_value = gap_bound_value(&r, p.constraint_dim(), lambda.norm())?;
    let opt = optimal_oracle(p, grid_per_dim)?;
    let measured_distance = distance(&opt.x, x_s);
    Ok(BoundReport {
        x_s: x_s.to_vec().into(),
        x_o: opt.x,
        lambda_s_star: lambda,
        measured_distance,
        bound_value,
        resolution: opt.resolution,
        bound_holds: measured_distance <= bound_value + opt.resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::one_dim_example;

    #[test]
    fn one_dim_constants() {
        for (theta, holds) in [(0.5, true), (1.1, false)] {
            let p = one_dim_example::<f64>(theta).unwrap();
            let r = compute_constants(&p).unwrap();
            assert_eq!(r.l_xstar, 1.0);
            assert_eq!(check_rcm_condition(&r), holds);
        }
    }

    #[test]
    fn static_case_reduces() {
        let c = RegularityConstants::<f64> {
            gamma: 1.0,
            beta_x: 2.0,
            beta_z: 1.0,
            l_z: 1.0,
            eps: 0.0,
            eps_g: 0.0,
        };
        let g = Matrix::from_row_major(1, 2, vec![1.0, 1.0]).unwrap();
        let r = compute_constants_from(&c, &g).unwrap();
        assert_eq!((r.rho1, r.rho2, r.rho4), (0.0, 0.0, 0.0));
        assert!(r.rcm_condition && r.rda_condition_9 && r.rda_condition_10);
        // the lower window edge stays positive even without distribution shift
        let s1 = r.a2 * (1.0 - r.alpha_bar_sqrt.sqrt()) / (2.0 * r.a1);
        assert!(s1 > 0.0);
        assert!((r.s1.unwrap() - s1).abs() < 1e-12);
        assert!(r.gamma_d <= r.l_d);
        assert_eq!(r.s2, Some(f64::INFINITY));
        assert!(check_fixed_objective_condition(&r, 0.1).unwrap());
        assert!(r.kappa3(0.1) < 1.0);
    }

    #[test]
    fn fixed_objective_condition_needs_eps_zero() {
        let p = crate::experiments::market_problem::<f64>(&Default::default()).unwrap();
        let r = compute_constants(&p).unwrap();
        assert!(matches!(
            check_fixed_objective_condition(&r, 0.1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn large_eps_g_breaks_condition_9_only() {
        let c = RegularityConstants {
            gamma: 2.0,
            beta_x: 2.0,
            beta_z: 0.0,
            l_z: 0.0,
            eps: 0.0,
            eps_g: 3.0,
        };
        let g = Matrix::from_row_major(1, 1, vec![1.0]).unwrap();
        let r = compute_constants_from(&c, &g).unwrap();
        assert_eq!(check_rda_conditions(&r), (false, true));
        assert!(r.s1.is_none() && r.s2.is_none());
    }

    #[test]
    fn equilibrium_and_optimum_of_one_dim() {
        let p = one_dim_example::<f64>(0.5).unwrap();
        let eq = equilibrium_oracle(&p, &[1.0], 1e-10).unwrap();
        assert!(eq.x[0].abs() < 1e-9);
        let opt = optimal_oracle(&p, 41).unwrap();
        assert!(opt.x[0].abs() <= opt.resolution);
    }

    #[test]
    fn divergent_rcm_has_no_certificate() {
        let p = one_dim_example::<f64>(1.1).unwrap();
        assert!(matches!(
            equilibrium_oracle(&p, &[1.0], 1e-10),
            Err(Error::NoEquilibriumCertificate(_))
        ));
    }

    #[test]
    fn bound_premise_enforced() {
        let p = one_dim_example::<f64>(1.1).unwrap();
        let r = compute_constants(&p).unwrap();
        assert!(matches!(
            gap_bound_value(&r, 1, 0.0),
            Err(Error::BoundInapplicable(_))
        ));
    }

    #[test]
    fn json_marks_infinity() {
        assert_eq!(json_number(f64::INFINITY), Value::from("inf"));
        assert_eq!(json_number(1.5), Value::from(1.5));
    }
}
