//! Problem constructors for the market, dynamic-pricing and scalar examples,
//! plus parking-data ingestion and a synthetic substitute generator.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::distribution::{DecisionBox, DistributionMap};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::problem::{PerformativeProblem, QuadraticLoss, RegularityConstants};
use crate::scalar::Scalar;

/// How the market maps' declared sensitivities are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensitivityRule {
    /// The exact W₁ Lipschitz constants `ε/2` and `ε_g/2`.
    #[default]
    Exact,
    /// `ε (1/(ζ_R1 − ζ_L1) + 1/ζ_R1)` and `ε_g (1/(0.2 v̲₁) + 1/(1.2 v̲₁))`.
    Paper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarketParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub zeta_l1: f64,
    pub zeta_r1: f64,
    pub zeta_l2: f64,
    pub zeta_r2: f64,
    pub e1: f64,
    pub v1_lower: f64,
    pub v2_lower: f64,
    /// Slope of demand 1's upper endpoint in `x₁`.
    pub eps: f64,
    /// Slope of cost 1's upper endpoint in `x₁`.
    pub eps_g: f64,
    pub sensitivity_rule: SensitivityRule,
    pub box_lower: f64,
    pub box_upper: f64,
    pub x0: [f64; 2],
}

impl Default for MarketParams {
    fn default() -> Self {
        Self {
            a1: 0.8,
            a2: 0.2,
            a3: 0.6,
            a4: 1.0,
            zeta_l1: 1.0,
            zeta_r1: 5.5,
            zeta_l2: 0.5,
            zeta_r2: 2.2,
            e1: 1.2,
            v1_lower: 1.7,
            v2_lower: 2.5,
            eps: 0.7,
            eps_g: 0.7,
            sensitivity_rule: SensitivityRule::Exact,
            box_lower: 0.0,
            box_upper: 10.0,
            x0: [1.0, 1.0],
        }
    }
}

impl MarketParams {
    fn validate(&self) -> Result<()> {
        let ok = self.a1 > 0.0
            && self.a2 > 0.0
            && self.zeta_l1 < self.zeta_r1
            && self.zeta_l2 < self.zeta_r2
            && self.v1_lower > 0.0
            && self.v2_lower > 0.0
            && self.eps >= 0.0
            && self.eps_g >= 0.0
            && self.box_lower < self.box_upper;
        if !ok {
            return Err(Error::invalid(format!(
                "invalid market parameters {self:?}"
            )));
        }
        Ok(())
    }

    pub fn objective_sensitivity(&self) -> f64 {
        match self.sensitivity_rule {
            SensitivityRule::Exact => self.eps / 2.0,
            SensitivityRule::Paper => {
                self.eps * (1.0 / (self.zeta_r1 - self.zeta_l1) + 1.0 / self.zeta_r1)
            }
        }
    }

    pub fn constraint_sensitivity(&self) -> f64 {
        match self.sensitivity_rule {
            SensitivityRule::Exact => self.eps_g / 2.0,
            SensitivityRule::Paper => {
                self.eps_g * (1.0 / (0.2 * self.v1_lower) + 1.0 / (1.2 * self.v1_lower))
            }
        }
    }

    fn decision_box<T: Scalar>(&self) -> Result<DecisionBox<T>> {
        DecisionBox::cube(2, T::of(self.box_lower), T::of(self.box_upper))
    }
}

fn mat<T: Scalar>(rows: usize, cols: usize, v: &[f64]) -> Result<Matrix<T>> {
    Matrix::from_row_major(rows, cols, v.iter().map(|&x| T::of(x)).collect())
}

fn vecf<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::of(x)).collect()
}

/// Demand base `ζ = (ζ₁, ζ₂)` with `ζ₁ ~ U[ζ_L1, ζ_R1 + ε x₁]`, `ζ₂ ~ U[ζ_L2, ζ_R2]`.
pub fn market_demand_map<T: Scalar>(p: &MarketParams) -> Result<DistributionMap<T>> {
    p.validate()?;
    DistributionMap::uniform(vecf(&[p.zeta_l1, p.zeta_l2]), vecf(&[p.zeta_r1, p.zeta_r2]))
        .upper_shift(mat(2, 2, &[p.eps, 0.0, 0.0, 0.0])?)
        .decision_box(p.decision_box()?)
        .decision_dim(2)
        .declared_sensitivity(T::of(p.objective_sensitivity()))
        .build()
}

/// Demand 1 alone, `U[ζ_L1, ζ_R1 + ε x₁]`.
pub fn market_demand1_map<T: Scalar>(p: &MarketParams) -> Result<DistributionMap<T>> {
    p.validate()?;
    DistributionMap::uniform(vecf(&[p.zeta_l1]), vecf(&[p.zeta_r1]))
        .upper_shift(mat(1, 2, &[p.eps, 0.0])?)
        .decision_box(p.decision_box()?)
        .declared_sensitivity(T::of(p.objective_sensitivity()))
        .build()
}

/// Cost 1 alone, `U[v̲₁, 1.2 v̲₁ + ε_g x₁]`.
pub fn market_cost1_map<T: Scalar>(p: &MarketParams) -> Result<DistributionMap<T>> {
    p.validate()?;
    DistributionMap::uniform(vecf(&[p.v1_lower]), vecf(&[1.2 * p.v1_lower]))
        .upper_shift(mat(1, 2, &[p.eps_g, 0.0])?)
        .decision_box(p.decision_box()?)
        .declared_sensitivity(T::of(p.constraint_sensitivity()))
        .build()
}

/// Constraint mean `ξ(x) = −(e₁ + E v₁(x₁) + E v₂)`.
pub fn market_constraint_map<T: Scalar>(p: &MarketParams) -> Result<DistributionMap<T>> {
    p.validate()?;
    DistributionMap::uniform(
        vecf(&[p.v1_lower, p.v2_lower]),
        vecf(&[1.2 * p.v1_lower, 1.2 * p.v2_lower]),
    )
    .upper_shift(mat(2, 2, &[p.eps_g, 0.0, 0.0, 0.0])?)
    .readout(vecf(&[-p.e1]), mat(1, 2, &[-1.0, -1.0])?)
    .decision_box(p.decision_box()?)
    .decision_dim(2)
    .declared_sensitivity(T::of(p.constraint_sensitivity()))
    .build()
}

/// Two-good market: `l(x, ζ) = −x·ζ + a₁x₁² + a₂x₂²` subject to
/// `a₃x₁ + a₄x₂ >= e₁ + E v₁(x₁) + E v₂`.
pub fn market_problem<T: Scalar>(p: &MarketParams) -> Result<PerformativeProblem<T>> {
    p.validate()?;
    let loss = QuadraticLoss::new(
        mat(2, 2, &[2.0 * p.a1, 0.0, 0.0, 2.0 * p.a2])?,
        vecf(&[0.0, 0.0]).into(),
        mat(2, 2, &[-1.0, 0.0, 0.0, -1.0])?,
        vecf(&[0.0, 0.0]).into(),
        vecf(&[0.0, 0.0]).into(),
        T::zero(),
    )?;
    let bx = p.decision_box::<T>()?;
    let constants = RegularityConstants {
        gamma: T::of(2.0 * p.a1.min(p.a2)),
        beta_x: T::of(2.0 * p.a1.max(p.a2)),
        beta_z: T::one(),
        l_z: bx.max_norm(),
        eps: T::of(p.objective_sensitivity()),
        eps_g: T::of(p.constraint_sensitivity()),
    };
    PerformativeProblem::new(
        Arc::new(loss),
        market_demand_map(p)?,
        market_constraint_map(p)?,
        mat(1, 2, &[-p.a3, -p.a4])?,
        constants,
        bx,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PricingParams {
    pub v: f64,
    pub t: f64,
    pub c1: f64,
    pub c2: f64,
    pub eta: f64,
    pub x0: f64,
    pub x_bar: f64,
    pub a: f64,
    pub eps: f64,
}

impl Default for PricingParams {
    fn default() -> Self {
        Self {
            v: 0.03,
            t: 0.005,
            c1: 0.5,
            c2: 5.0,
            eta: 0.18,
            x0: -1.0,
            x_bar: 3.0,
            a: 0.157,
            eps: 0.1,
        }
    }
}

impl PricingParams {
    fn validate(&self) -> Result<()> {
        let gamma = self.v + 2.0 * self.a * self.a;
        if !(self.v > 0.0
            && self.t > 0.0
            && gamma > 0.0
            && self.eps >= 0.0
            && self.x_bar > 0.0
            && self.c1 != 0.0)
        {
            return Err(Error::invalid(format!(
                "invalid pricing parameters {self:?}"
            )));
        }
        Ok(())
    }

    /// Strong convexity `v + 2A²`.
    pub fn gamma(&self) -> f64 {
        self.v + 2.0 * self.a * self.a
    }
}

/// `l = (ζ − A x − 0.7)² − t z₂ + (v/2) x²` with `z = (ζ, z₂)`, written in
/// the quadratic-loss form.
fn pricing_loss<T: Scalar>(p: &PricingParams) -> Result<QuadraticLoss<T>> {
    QuadraticLoss::new(
        mat(1, 1, &[p.gamma()])?,
        vecf(&[1.4 * p.a]).into(),
        mat(1, 2, &[-2.0 * p.a, 0.0])?,
        vecf(&[2.0, 0.0]).into(),
        vecf(&[-1.4, -p.t]).into(),
        T::of(0.49),
    )
}

fn pricing_from_tables<T: Scalar>(
    p: &PricingParams,
    objective_table: Matrix<T>,
    z2_table: Matrix<T>,
) -> Result<PerformativeProblem<T>> {
    p.validate()?;
    let eps = T::of(p.eps);
    let bx = DecisionBox::cube(1, T::of(-p.x_bar), T::of(p.x_bar))?;
    let objective_map = DistributionMap::empirical(objective_table)
        .mean_shift(mat(2, 1, &[0.0, -p.eps])?)
        .declared_sensitivity(eps)
        .build()?;
    // ξ(x) = c₂ − E z₂(x) = c₂ − z̄₂ + εx
    let constraint_map = DistributionMap::empirical(z2_table)
        .readout(vecf(&[p.c2]), mat(1, 1, &[-1.0])?)
        .mean_shift(mat(1, 1, &[p.eps])?)
        .declared_sensitivity(eps)
        .build()?;
    let growth = 2.0 * (0.7 + p.x_bar * p.a);
    let constants = RegularityConstants {
        gamma: T::of(p.gamma()),
        beta_x: T::of(p.gamma()),
        beta_z: T::of(2.0 * p.a),
        l_z: T::of(growth.hypot(p.t)),
        eps,
        eps_g: eps,
    };
    PerformativeProblem::new(
        Arc::new(pricing_loss(p)?),
        objective_map,
        constraint_map,
        mat(1, 1, &[-p.c1])?,
        constants,
        bx,
    )
}

/// Pricing problem with point-mass base distributions at the given means.
pub fn pricing_problem<T: Scalar>(
    p: &PricingParams,
    base_z2_mean: f64,
    base_zeta_mean: f64,
) -> Result<PerformativeProblem<T>> {
    pricing_from_tables(
        p,
        mat(1, 2, &[base_zeta_mean, base_z2_mean])?,
        mat(1, 1, &[base_z2_mean])?,
    )
}

/// Pricing problem whose base distribution is the empirical distribution of
/// `(occupancy, occupied_time)` over records at the nominal price.
pub fn pricing_problem_from_records<T: Scalar>(
    p: &PricingParams,
    records: &[ParkingRecord],
) -> Result<PerformativeProblem<T>> {
    let at_nominal: Vec<&ParkingRecord> = records
        .iter()
        .filter(|r| (r.price - p.x_bar).abs() < 1e-9)
        .collect();
    if at_nominal.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no records at the nominal price {}",
            p.x_bar
        )));
    }
    let m = at_nominal.len();
    let obj: Vec<f64> = at_nominal
        .iter()
        .flat_map(|r| [r.occupancy, r.occupied_time])
        .collect();
    let z2: Vec<f64> = at_nominal.iter().map(|r| r.occupied_time).collect();
    pricing_from_tables(p, mat(m, 2, &obj)?, mat(m, 1, &z2)?)
}

/// Loss `x²` with constraint `x >= θ x_t`, encoded as `G = [−1]`,
/// `ξ(x_t) = −θ x_t`.
pub fn one_dim_example<T: Scalar>(theta: f64) -> Result<PerformativeProblem<T>> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::invalid(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let loss = QuadraticLoss::new(
        mat(1, 1, &[2.0])?,
        vecf(&[0.0]).into(),
        Matrix::zeros(1, 1),
        vecf(&[0.0]).into(),
        vecf(&[0.0]).into(),
        T::zero(),
    )?;
    let objective_map = DistributionMap::point(vecf(&[0.0])).build()?;
    let constraint_map = DistributionMap::point(vecf(&[0.0]))
        .mean_shift(mat(1, 1, &[-theta])?)
        .declared_sensitivity(T::of(theta))
        .build()?;
    PerformativeProblem::new(
        Arc::new(loss),
        objective_map,
        constraint_map,
        mat(1, 1, &[-1.0])?,
        RegularityConstants {
            gamma: T::of(2.0),
            beta_x: T::of(2.0),
            beta_z: T::zero(),
            l_z: T::zero(),
            eps: T::zero(),
            eps_g: T::of(theta),
        },
        DecisionBox::cube(1, T::of(-2.0), T::of(2.0))?,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParkingRecord {
    /// Dollars per hour.
    pub price: f64,
    /// Hours.
    pub total_time: f64,
    /// Hours.
    pub occupied_time: f64,
    /// `occupied_time / total_time`.
    pub occupancy: f64,
}

impl ParkingRecord {
    pub fn new(price: f64, total_time: f64, occupied_time: f64) -> Result<Self> {
        if !price.is_finite() || !total_time.is_finite() || !occupied_time.is_finite() {
            return Err(Error::invalid("non-finite field"));
        }
        if !(total_time > 0.0) {
            return Err(Error::invalid(format!(
                "total_time {total_time} must be positive"
            )));
        }
        if occupied_time < 0.0 || occupied_time > total_time {
            return Err(Error::invalid(format!(
                "occupied_time {occupied_time} outside [0, {total_time}]"
            )));
        }
        Ok(Self {
            price,
            total_time,
            occupied_time,
            occupancy: occupied_time / total_time,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParkingLoad {
    pub records: Vec<ParkingRecord>,
    pub rejected: usize,
    /// One message per rejected row.
    pub errors: Vec<String>,
}

const PARKING_COLUMNS: [&str; 3] = ["price", "total_time", "occupied_time"];

/// Reads `price,total_time,occupied_time` (extra columns ignored).
pub fn load_parking_csv(path: impl AsRef<Path>, delimiter: u8) -> Result<ParkingLoad> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_path(path.as_ref())
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Schema(format!("{other:?}")),
        })?;
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = PARKING_COLUMNS
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
        })
        .collect::<Result<_>>()?;
    let mut out = ParkingLoad::default();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let parsed = rec.map_err(Error::from).and_then(|rec| {
            let field = |k: usize| -> Result<f64> {
                let raw = rec.get(idx[k]).unwrap_or("").trim();
                raw.parse::<f64>().map_err(|_| {
                    Error::invalid(format!("{}: cannot parse {raw:?}", PARKING_COLUMNS[k]))
                })
            };
            ParkingRecord::new(field(0)?, field(1)?, field(2)?)
        });
        match parsed {
            Ok(r) => out.records.push(r),
            Err(e) => {
                out.rejected += 1;
                out.errors.push(format!("row {line}: {e}"));
            }
        }
    }
    Ok(out)
}

pub fn write_parking_csv(
    path: impl AsRef<Path>,
    records: &[ParkingRecord],
    delimiter: u8,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_path(path.as_ref())?;
    w.write_record(PARKING_COLUMNS)?;
    for r in records {
        w.write_record([
            format!("{}", r.price),
            format!("{}", r.total_time),
            format!("{}", r.occupied_time),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticParkingConfig {
    /// Mean of the base occupancy before truncation to [0, 1].
    pub zeta_mean: f64,
    pub zeta_sd: f64,
    pub total_time_min: f64,
    pub total_time_max: f64,
    /// Price offsets from nominal, drawn uniformly.
    pub deviations: Vec<f64>,
}

impl Default for SyntheticParkingConfig {
    fn default() -> Self {
        Self {
            zeta_mean: 0.65,
            zeta_sd: 0.12,
            total_time_min: 6.0,
            total_time_max: 10.0,
            deviations: vec![-0.5, -0.25, 0.0, 0.25, 0.5],
        }
    }
}

/// Synthetic parking records with occupancy `clamp(ζ − A·(price − nominal), 0, 1)`.
pub fn generate_synthetic_parking(
    n: usize,
    seed: u64,
    a: f64,
    nominal_price: f64,
) -> Result<Vec<ParkingRecord>> {
    generate_synthetic_parking_with(
        n,
        seed,
        a,
        nominal_price,
        &SyntheticParkingConfig::default(),
    )
}

pub fn generate_synthetic_parking_with(
    n: usize,
    seed: u64,
    a: f64,
    nominal_price: f64,
    cfg: &SyntheticParkingConfig,
) -> Result<Vec<ParkingRecord>> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if cfg.deviations.is_empty()
        || !(cfg.total_time_min > 0.0 && cfg.total_time_min <= cfg.total_time_max)
    {
        return Err(Error::invalid("invalid synthetic parking configuration"));
    }
    if !(cfg.zeta_sd >= 0.0) || !(0.0..=1.0).contains(&cfg.zeta_mean) {
        return Err(Error::invalid("zeta mean must lie in [0, 1] with sd >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal =
        Normal::new(cfg.zeta_mean, cfg.zeta_sd).map_err(|e| Error::invalid(e.to_string()))?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let zeta = loop {
            let z = normal.sample(&mut rng);
            if (0.0..=1.0).contains(&z) {
                break z;
            }
        };
        let total = if cfg.total_time_min == cfg.total_time_max {
            cfg.total_time_min
        } else {
            rng.random_range(cfg.total_time_min..cfg.total_time_max)
        };
        let dev = cfg.deviations[rng.random_range(0..cfg.deviations.len())];
        let occupancy = (zeta - a * dev).clamp(0.0, 1.0);
        out.push(ParkingRecord::new(
            nominal_price + dev,
            total,
            occupancy * total,
        )?);
    }
    Ok(out)
}

/// Least-squares slope of occupancy against `−(price − nominal)`.
pub fn estimate_a(records: &[ParkingRecord], nominal_price: f64) -> Result<f64> {
    let first = records
        .first()
        .ok_or_else(|| Error::Estimation("no records".into()))?
        .price;
    if records.iter().all(|r| r.price == first) {
        return Err(Error::Estimation(
            "need at least two distinct prices".into(),
        ));
    }
    let n = records.len() as f64;
    let d: Vec<f64> = records.iter().map(|r| -(r.price - nominal_price)).collect();
    let d_mean = d.iter().sum::<f64>() / n;
    let y_mean = records.iter().map(|r| r.occupancy).sum::<f64>() / n;
    let (sxy, sxx) = d
        .iter()
        .zip(records)
        .fold((0.0, 0.0), |(sxy, sxx), (&di, r)| {
            let dc = di - d_mean;
            (sxy + dc * (r.occupancy - y_mean), sxx + dc * dc)
        });
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::compute_constants;

    #[test]
    fn market_defaults() {
        let p = market_problem::<f64>(&MarketParams::default()).unwrap();
        let c = p.constants();
        assert!((c.gamma - 0.4).abs() < 1e-15);
        assert!((c.beta_x - 1.6).abs() < 1e-15);
        assert_eq!(p.g().as_slice(), &[-0.6, -1.0]);
        assert!((c.l_z - 200f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn market_expectations() {
        let p = market_problem::<f64>(&MarketParams::default()).unwrap();
        assert_eq!(p.expected_loss(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert!((p.expected_loss(&[1.0, 1.0], &[1.0, 1.0]).unwrap() + 3.95).abs() < 1e-12);
        let g = p.expected_grad(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((g[0] + 3.25).abs() < 1e-15 && (g[1] + 1.35).abs() < 1e-15);
        assert!((p.constraint_rhs(&[0.0, 0.0]).unwrap()[0] + 5.82).abs() < 1e-12);
    }

    #[test]
    fn paper_rule_sensitivities() {
        let m = MarketParams {
            sensitivity_rule: SensitivityRule::Paper,
            ..Default::default()
        };
        assert!((m.objective_sensitivity() - 0.7 * (1.0 / 4.5 + 1.0 / 5.5)).abs() < 1e-15);
        assert!((m.constraint_sensitivity() - 0.7 * (1.0 / 0.34 + 1.0 / 2.04)).abs() < 1e-12);
    }

    #[test]
    fn one_dim_constants() {
        let p = one_dim_example::<f64>(0.5).unwrap();
        assert_eq!(compute_constants(&p).unwrap().l_xstar, 1.0);
        assert!(one_dim_example::<f64>(0.0).is_err());
    }

    #[test]
    fn pricing_static_minimizer() {
        let params = PricingParams {
            eps: 0.0,
            ..Default::default()
        };
        let p = pricing_problem::<f64>(&params, 5.2, 0.65).unwrap();
        let cfg = crate::inner_solver::SolverConfig::default();
        let f = p.frozen_objective(&[0.0]).unwrap();
        let b = p.constraint_rhs(&[0.0]).unwrap();
        let sol = crate::inner_solver::solve_constrained(&f, p.g(), &b, &cfg).unwrap();
        // unconstrained minimizer 2A(ζ̄ − 0.7)/γ is infeasible; x = (z̄₂ − c₂)/c₁
        assert!((sol.x_star[0] - 0.4).abs() < 1e-8);
    }

    #[test]
    fn zero_noise_data_gives_exact_a() {
        let cfg = SyntheticParkingConfig {
            zeta_sd: 0.0,
            ..Default::default()
        };
        let recs = generate_synthetic_parking_with(200, 1, 0.157, 3.0, &cfg).unwrap();
        assert!((estimate_a(&recs, 3.0).unwrap() - 0.157).abs() < 1e-12);
    }

    #[test]
    fn constant_price_is_degenerate() {
        let recs = vec![ParkingRecord::new(3.0, 8.0, 4.0).unwrap(); 3];
        assert!(matches!(estimate_a(&recs, 3.0), Err(Error::Estimation(_))));
    }

    #[test]
    fn single_synthetic_record() {
        let recs = generate_synthetic_parking(1, 0, 0.157, 3.0).unwrap();
        assert_eq!(recs.len(), 1);
        assert!((0.0..=1.0).contains(&recs[0].occupancy));
    }
}
