//! Decision-dependent distribution maps `x ↦ D(x)`.
//!
//! A map starts from a base distribution (independent uniforms, or a fixed
//! sample table), optionally moves the uniform endpoints affinely with `x`,
//! applies an optional linear readout, and finally translates by `M x`:
//!
//! ```text
//!     y ~ base(x)            endpoints  lower + L x,  upper + U x
//!     w = offset + W y + M x
//! ```
//!
//! Solvers only consume the first two moments, which are exact. Sampling is
//! used for sensitivity estimation and validation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{distance, Matrix, Vector};
use crate::scalar::Scalar;

/// Axis-aligned box of admissible decisions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionBox<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> DecisionBox<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid(
                "decision box bounds must be nonempty and equal length",
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !l.is_finite() || !u.is_finite() || l > u)
        {
            return Err(Error::invalid("decision box needs finite lower <= upper"));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| v >= l && v <= u)
    }

    pub fn check(&self, x: &[T]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "decision {:?} outside box [{:?}, {:?}]",
                x, self.lower, self.upper
            )))
        }
    }

    /// `sup_{x in box} ‖x‖`.
    pub fn max_norm(&self) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| {
                let m = l.abs().max(u.abs());
                m * m
            })
            .sum::<T>()
            .sqrt()
    }

    pub fn clamp(&self, x: &[T]) -> Vector<T> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| v.max(l).min(u))
            .collect()
    }
}

/// Mean and per-coordinate variance of a distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments<T> {
    pub mean: Vector<T>,
    pub variance: Vector<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    AffineMeanUniform,
    AffineMeanEmpirical,
    Constant,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Base<T> {
    /// Independent coordinates `U[lower_j, upper_j]`.
    Uniform { lower: Vec<T>, upper: Vec<T> },
    /// Uniform over the rows of a fixed table.
    Empirical { table: Matrix<T> },
}

impl<T: Scalar> Base<T> {
    fn dim(&self) -> usize {
        match self {
            Base::Uniform { lower, .. } => lower.len(),
            Base::Empirical { table } => table.cols(),
        }
    }
}

/// Affine output map `w = offset + W y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Readout<T> {
    pub offset: Vec<T>,
    pub weights: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionMap<T> {
    base: Base<T>,
    lower_shift: Option<Matrix<T>>,
    upper_shift: Option<Matrix<T>>,
    readout: Option<Readout<T>>,
    mean_shift: Option<Matrix<T>>,
    declared_sensitivity: T,
    decision_box: Option<DecisionBox<T>>,
    decision_dim: Option<usize>,
    family: Family,
}

/// Draws from a map at one decision.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch<T> {
    pub dimension: usize,
    pub rows: usize,
    /// Row-major, `rows x dimension`.
    pub values: Vec<T>,
    pub seed: u64,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn column_mean(&self, j: usize) -> T {
        let sum: T = (0..self.rows)
            .map(|i| self.values[i * self.dimension + j])
            .sum();
        sum / T::of(self.rows as f64)
    }

    /// A one-dimensional batch from raw values.
    pub fn from_values(values: Vec<T>, seed: u64) -> Self {
        Self {
            dimension: 1,
            rows: values.len(),
            values,
            seed,
        }
    }
}

pub struct DistributionMapBuilder<T> {
    base: Base<T>,
    lower_shift: Option<Matrix<T>>,
    upper_shift: Option<Matrix<T>>,
    readout: Option<Readout<T>>,
    mean_shift: Option<Matrix<T>>,
    declared_sensitivity: T,
    decision_box: Option<DecisionBox<T>>,
    decision_dim: Option<usize>,
}

impl<T: Scalar> DistributionMap<T> {
    pub fn uniform(lower: Vec<T>, upper: Vec<T>) -> DistributionMapBuilder<T> {
        DistributionMapBuilder::new(Base::Uniform { lower, upper })
    }

    pub fn empirical(table: Matrix<T>) -> DistributionMapBuilder<T> {
        DistributionMapBuilder::new(Base::Empirical { table })
    }

    /// Point mass at `value` (a one-row table).
    pub fn point(value: Vec<T>) -> DistributionMapBuilder<T> {
        let n = value.len();
        let table =
            Matrix::from_row_major(1, n.max(1), value).unwrap_or_else(|_| Matrix::zeros(0, 0));
        DistributionMapBuilder::new(Base::Empirical { table })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn base(&self) -> &Base<T> {
        &self.base
    }

    pub fn readout(&self) -> Option<&Readout<T>> {
        self.readout.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.readout
            .as_ref()
            .map_or_else(|| self.base.dim(), |r| r.offset.len())
    }

    pub fn decision_dim(&self) -> Option<usize> {
        self.decision_dim
    }

    pub fn declared_sensitivity(&self) -> T {
        self.declared_sensitivity
    }

    pub fn decision_box(&self) -> Option<&DecisionBox<T>> {
        self.decision_box.as_ref()
    }

    fn has_endpoint_shift(&self) -> bool {
        self.lower_shift.is_some() || self.upper_shift.is_some()
    }

    fn check_decision(&self, x: &[T]) -> Result<()> {
        if let Some(n) = self.decision_dim {
            if x.len() != n {
                return Err(Error::invalid(format!(
                    "decision has length {}, map expects {n}",
                    x.len()
                )));
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite decision".into()));
        }
        if self.has_endpoint_shift() {
            if let Some(b) = &self.decision_box {
                b.check(x)?;
            }
        }
        Ok(())
    }

    /// Uniform endpoints at `x`; errors on inversion.
    fn endpoints(&self, x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let Base::Uniform { lower, upper } = &self.base else {
            unreachable!("endpoints of a non-uniform base")
        };
        let shift = |m: &Option<Matrix<T>>, v: &[T]| -> Vec<T> {
            match m {
                Some(m) => (&m.mul_vec(x) + v).into_inner(),
                None => v.to_vec(),
            }
        };
        let a = shift(&self.lower_shift, lower);
        let b = shift(&self.upper_shift, upper);
        if let Some(j) = (0..a.len()).find(|&j| !(a[j] < b[j])) {
            return Err(Error::Domain(format!(
                "uniform endpoints inverted in coordinate {j}: [{}, {}]",
                a[j], b[j]
            )));
        }
        Ok((a, b))
    }

    /// Base mean and covariance at `x`, before readout.
    fn base_moments(&self, x: &[T]) -> Result<(Vec<T>, Matrix<T>)> {
        match &self.base {
            Base::Uniform { .. } => {
                let (a, b) = self.endpoints(x)?;
                let half = T::of(0.5);
                let twelfth = T::of(1.0 / 12.0);
                let mean = a.iter().zip(&b).map(|(&l, &u)| (l + u) * half).collect();
                let var: Vec<T> = a
                    .iter()
                    .zip(&b)
                    .map(|(&l, &u)| (u - l) * (u - l) * twelfth)
                    .collect();
                Ok((mean, Matrix::diag(&var)))
            }
            Base::Empirical { table } => {
                let rows = T::of(table.rows() as f64);
                let k = table.cols();
                let mean: Vec<T> = (0..k)
                    .map(|j| (0..table.rows()).map(|i| table[(i, j)]).sum::<T>() / rows)
                    .collect();
                let mut cov = Matrix::zeros(k, k);
                for i in 0..table.rows() {
                    let r = table.row(i);
                    for p in 0..k {
                        for q in 0..k {
                            cov[(p, q)] += (r[p] - mean[p]) * (r[q] - mean[q]);
                        }
                    }
                }
                Ok((mean, cov.scaled(T::one() / rows)))
            }
        }
    }

    /// Exact mean of `D(x)`.
    pub fn mean(&self, x: &[T]) -> Result<Vector<T>> {
        Ok(self.moments(x)?.mean)
    }

    /// Exact mean and per-coordinate variance of `D(x)`.
    pub fn moments(&self, x: &[T]) -> Result<Moments<T>> {
        self.check_decision(x)?;
        let (m, cov) = self.base_moments(x)?;
        let (mut mean, variance) = match &self.readout {
            None => {
                let var = (0..m.len()).map(|j| cov[(j, j)]).collect();
                (Vector::from(m), var)
            }
            Some(r) => {
                let mean = &r.weights.mul_vec(&m) + &r.offset;
                let var = (0..r.weights.rows())
                    .map(|i| {
                        let w = r.weights.row(i);
                        let cw = cov.mul_vec(w);
                        w.iter()
                            .zip(cw.iter())
                            .map(|(&a, &b)| a * b)
                            .sum::<T>()
                            .max(T::zero())
                    })
                    .collect();
                (mean, var)
            }
        };
        if let Some(ms) = &self.mean_shift {
            mean = &mean + &ms.mul_vec(x);
        }
        Ok(Moments { mean, variance })
    }

    /// `n` i.i.d. draws from `D(x)`, reproducible for a fixed seed.
    pub fn sample(&self, x: &[T], n: usize, seed: u64) -> Result<SampleBatch<T>> {
        if n == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        self.check_decision(x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.dimension();
        let shift = self.mean_shift.as_ref().map(|m| m.mul_vec(x));
        let mut values = Vec::with_capacity(n * dim);
        let mut y = vec![T::zero(); self.base.dim()];
        let endpoints = match &self.base {
            Base::Uniform { .. } => Some(self.endpoints(x)?),
            Base::Empirical { .. } => None,
        };
        for _ in 0..n {
            match (&self.base, &endpoints) {
                (Base::Uniform { .. }, Some((a, b))) => {
                    for (j, yj) in y.iter_mut().enumerate() {
                        let u = T::of(rng.random::<f64>());
                        *yj = a[j] + u * (b[j] - a[j]);
                    }
                }
                (Base::Empirical { table }, _) => {
                    let i = rng.random_range(0..table.rows());
                    y.copy_from_slice(table.row(i));
                }
                _ => unreachable!(),
            }
            let mut w = match &self.readout {
                None => Vector::from(y.clone()),
                Some(r) => &r.weights.mul_vec(&y) + &r.offset,
            };
            if let Some(s) = &shift {
                w = &w + s;
            }
            values.extend_from_slice(&w);
        }
        Ok(SampleBatch {
            dimension: dim,
            rows: n,
            values,
            seed,
        })
    }
}

impl<T: Scalar> DistributionMapBuilder<T> {
    fn new(base: Base<T>) -> Self {
        Self {
            base,
            lower_shift: None,
            upper_shift: None,
            readout: None,
            mean_shift: None,
            declared_sensitivity: T::zero(),
            decision_box: None,
            decision_dim: None,
        }
    }

    /// Per-coordinate coefficients of `x` on the lower endpoints (`k x n`).
    pub fn lower_shift(mut self, m: Matrix<T>) -> Self {
        self.lower_shift = Some(m);
        self
    }

    /// Per-coordinate coefficients of `x` on the upper endpoints (`k x n`).
    pub fn upper_shift(mut self, m: Matrix<T>) -> Self {
        self.upper_shift = Some(m);
        self
    }

    pub fn readout(mut self, offset: Vec<T>, weights: Matrix<T>) -> Self {
        self.readout = Some(Readout { offset, weights });
        self
    }

    /// Additive translation `M x` of the output (`dim x n`).
    pub fn mean_shift(mut self, m: Matrix<T>) -> Self {
        self.mean_shift = Some(m);
        self
    }

    pub fn declared_sensitivity(mut self, eps: T) -> Self {
        self.declared_sensitivity = eps;
        self
    }

    pub fn decision_box(mut self, b: DecisionBox<T>) -> Self {
        self.decision_box = Some(b);
        self
    }

    pub fn decision_dim(mut self, n: usize) -> Self {
        self.decision_dim = Some(n);
        self
    }

    pub fn build(self) -> Result<DistributionMap<T>> {
        let k = match &self.base {
            Base::Uniform { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(Error::invalid(
                        "uniform endpoints must be nonempty and equal length",
                    ));
                }
                if lower.iter().chain(upper).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("uniform endpoints must be finite"));
                }
                lower.len()
            }
            Base::Empirical { table } => {
                if table.rows() == 0 || table.cols() == 0 {
                    return Err(Error::invalid("empirical table is empty"));
                }
                table.cols()
            }
        };
        if !matches!(self.base, Base::Uniform { .. })
            && (self.lower_shift.is_some() || self.upper_shift.is_some())
        {
            return Err(Error::invalid(
                "endpoint shifts apply to the uniform family only",
            ));
        }
        let out_dim = match &self.readout {
            None => k,
            Some(r) => {
                if r.weights.cols() != k || r.weights.rows() != r.offset.len() {
                    return Err(Error::invalid(format!(
                        "readout is {}x{} with offset {}, base dimension {k}",
                        r.weights.rows(),
                        r.weights.cols(),
                        r.offset.len()
                    )));
                }
                r.offset.len()
            }
        };
        let mut n = self.decision_dim;
        let mut take_cols = |m: &Option<Matrix<T>>, rows: usize, what: &str| -> Result<()> {
            if let Some(m) = m {
                if m.rows() != rows {
                    return Err(Error::invalid(format!(
                        "{what} has {} rows, expected {rows}",
                        m.rows()
                    )));
                }
                match n {
                    Some(c) if c != m.cols() => {
                        return Err(Error::invalid(format!(
                            "{what} has {} columns, decision dimension is {c}",
                            m.cols()
                        )))
                    }
                    _ => n = Some(m.cols()),
                }
            }
            Ok(())
        };
        take_cols(&self.lower_shift, k, "lower shift")?;
        take_cols(&self.upper_shift, k, "upper shift")?;
        take_cols(&self.mean_shift, out_dim, "mean shift")?;

        let nonzero = |m: &Option<Matrix<T>>| m.as_ref().is_some_and(|m| !m.is_zero());
        let endpoint_moves = nonzero(&self.lower_shift) || nonzero(&self.upper_shift);
        let family = if !endpoint_moves && !nonzero(&self.mean_shift) {
            Family::Constant
        } else if matches!(self.base, Base::Uniform { .. }) {
            Family::AffineMeanUniform
        } else {
            Family::AffineMeanEmpirical
        };

        let eps = self.declared_sensitivity;
        if !eps.is_finite() || eps < T::zero() {
            return Err(Error::invalid(
                "declared sensitivity must be finite and nonnegative",
            ));
        }
        if family == Family::Constant && !eps.is_zero() {
            return Err(Error::invalid("a constant map has declared sensitivity 0"));
        }
        if let Some(b) = &self.decision_box {
            if let Some(n) = n {
                if b.dim() != n {
                    return Err(Error::invalid("decision box dimension mismatch"));
                }
            }
        }

        let (lower_shift, upper_shift) = if endpoint_moves {
            (self.lower_shift, self.upper_shift)
        } else {
            (None, None)
        };
        let map = DistributionMap {
            base: self.base,
            lower_shift,
            upper_shift,
            readout: self.readout,
            mean_shift: self.mean_shift,
            declared_sensitivity: eps,
            decision_box: self.decision_box,
            decision_dim: n,
            family,
        };
        if endpoint_moves {
            map.validate_endpoints_over_box()?;
        } else if let Base::Uniform { lower, upper } = &map.base {
            if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                return Err(Error::invalid("uniform base needs lower < upper"));
            }
        }
        Ok(map)
    }
}

impl<T: Scalar> DistributionMap<T> {
    /// Width `b_j(x) − a_j(x)` is affine in `x`; its minimum over the box
    /// sits at a vertex chosen coordinatewise.
    fn validate_endpoints_over_box(&self) -> Result<()> {
        let Base::Uniform { lower, upper } = &self.base else {
            return Ok(());
        };
        let Some(bx) = &self.decision_box else {
            return Err(Error::invalid(
                "a map whose endpoints move with x needs a decision box",
            ));
        };
        let n = bx.dim();
        for j in 0..lower.len() {
            let mut width = upper[j] - lower[j];
            for c in 0..n {
                let u = self.upper_shift.as_ref().map_or(T::zero(), |m| m[(j, c)]);
                let l = self.lower_shift.as_ref().map_or(T::zero(), |m| m[(j, c)]);
                let slope = u - l;
                width += (slope * bx.lower[c]).min(slope * bx.upper[c]);
            }
            if !(width > T::zero()) {
                return Err(Error::invalid(format!(
                    "uniform endpoints invert inside the decision box (coordinate {j}, min width {width})"
                )));
            }
        }
        Ok(())
    }
}

/// Exact empirical W₁ between two one-dimensional batches of equal size.
pub fn wasserstein1_sorted<T: Scalar>(a: &SampleBatch<T>, b: &SampleBatch<T>) -> Result<T> {
    if a.dimension != 1 || b.dimension != 1 {
        return Err(Error::invalid(
            "wasserstein1_sorted needs one-dimensional batches",
        ));
    }
    if a.rows != b.rows || a.rows == 0 {
        return Err(Error::invalid(format!(
            "batch sizes differ or are empty: {} vs {}",
            a.rows, b.rows
        )));
    }
    let sorted = |v: &[T]| {
        let mut s = v.to_vec();
        s.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
        s
    };
    let (sa, sb) = (sorted(&a.values), sorted(&b.values));
    let total: T = sa.iter().zip(&sb).map(|(&x, &y)| (x - y).abs()).sum();
    Ok(total / T::of(a.rows as f64))
}

/// `W₁(U[a, b], U[a2, b2])` in closed form.
pub fn wasserstein1_uniform<T: Scalar>(a: T, b: T, a2: T, b2: T) -> Result<T> {
    if !(a < b) || !(a2 < b2) {
        return Err(Error::invalid("degenerate uniform interval"));
    }
    // quantile difference d(q) = c0 + c1 q on [0, 1]
    let c0 = a - a2;
    let c1 = (b - a) - (b2 - a2);
    let half = T::of(0.5);
    if c1.is_zero() {
        return Ok(c0.abs());
    }
    let root = -c0 / c1;
    if root <= T::zero() || root >= T::one() {
        return Ok((c0 + c1 * half).abs());
    }
    Ok(c0.abs() * root * half + (c0 + c1).abs() * (T::one() - root) * half)
}

/// Estimate of `W₁(D(x), D(x2)) / ‖x − x2‖`.
///
/// Exact for pure translations and for uniform maps without a readout (the
/// largest marginal W₁, a lower bound in several dimensions). Other
/// one-dimensional maps use sorted samples with common random numbers.
pub fn estimate_sensitivity<T: Scalar>(
    map: &DistributionMap<T>,
    x: &[T],
    x2: &[T],
    n: usize,
    seed: u64,
) -> Result<T> {
    if x.len() != x2.len() {
        return Err(Error::invalid("decisions differ in length"));
    }
    let dx = distance(x, x2);
    if !(dx > T::zero()) {
        return Err(Error::invalid("estimate_sensitivity needs x != x2"));
    }
    map.check_decision(x)?;
    map.check_decision(x2)?;
    if map.family == Family::Constant {
        return Ok(T::zero());
    }
    if !map.has_endpoint_shift() {
        let m = map
            .mean_shift
            .as_ref()
            .expect("non-constant map without endpoint shift");
        return Ok(m.mul_vec(&crate::numerics::sub(x, x2)).norm() / dx);
    }
    if map.readout.is_none() {
        let (a, b) = map.endpoints(x)?;
        let (a2, b2) = map.endpoints(x2)?;
        let zero = vec![T::zero(); a.len()];
        let (m, m2) = match &map.mean_shift {
            Some(ms) => (ms.mul_vec(x).into_inner(), ms.mul_vec(x2).into_inner()),
            None => (zero.clone(), zero),
        };
        let mut best = T::zero();
        for j in 0..a.len() {
            let w = wasserstein1_uniform(a[j] + m[j], b[j] + m[j], a2[j] + m2[j], b2[j] + m2[j])?;
            best = best.max(w);
        }
        return Ok(best / dx);
    }
    if map.dimension() != 1 {
        return Err(Error::invalid(
            "sensitivity estimation supports one-dimensional or readout-free uniform maps",
        ));
    }
    let sa = map.sample(x, n, seed)?;
    let sb = map.sample(x2, n, seed)?;
    Ok(wasserstein1_sorted(&sa, &sb)? / dx)
}
