//! The random normed module `E = L⁰(𝓔, ℝ^d)` with the pointwise Euclidean
//! norm, its random conjugate `E*`, and the conditional Orlicz spaces built
//! from `E`.
//!
//! On this model every a.s. bounded module homomorphism `E → L⁰` acts as
//! `x ↦ ⟨g(ω), x(ω)⟩` for a covector field `g`, and its random operator norm
//! is `|g(ω)|`.

use std::sync::Arc;

use crate::error::{OrliczError, Result};
use crate::norms::{self, Membership};
use crate::orlicz::RandomOrliczFunction;
use crate::prob::{ext_mul, same_space, FiniteProbSpace, RandomScalar};

fn flatten(space: &FiniteProbSpace, dim: usize, rows: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(OrliczError::InvalidValue("dimension must be >= 1".into()));
    }
    if rows.len() != space.len() {
        return Err(OrliczError::DimensionMismatch {
            expected: space.len(),
            got: rows.len(),
        });
    }
    let mut data = Vec::with_capacity(dim * rows.len());
    for row in rows {
        if row.len() != dim {
            return Err(OrliczError::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(OrliczError::InvalidValue("vector entries must be finite".into()));
        }
        data.extend(row);
    }
    Ok(data)
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// An element `x ∈ E`: one `d`-vector per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    space: Arc<FiniteProbSpace>,
    dim: usize,
    data: Vec<f64>,
}

impl ModuleElement {
    pub fn new(space: Arc<FiniteProbSpace>, dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let data = flatten(&space, dim, vectors)?;
        Ok(Self { space, dim, data })
    }

    /// The null element `θ`.
    pub fn zero(space: Arc<FiniteProbSpace>, dim: usize) -> Self {
        let data = vec![0.0; dim * space.len()];
        Self { space, dim, data }
    }

    /// The one-dimensional element with the given (finite) values.
    pub fn from_scalar(z: &RandomScalar) -> Result<Self> {
        if !z.is_finite() {
            return Err(OrliczError::InvalidValue("vector entries must be finite".into()));
        }
        Ok(Self {
            space: z.space().clone(),
            dim: 1,
            data: z.values().to_vec(),
        })
    }

    /// `e_i` placed at a single outcome: the indicator basis of `E`.
    pub fn basis(space: Arc<FiniteProbSpace>, dim: usize, outcome: usize, coord: usize) -> Self {
        let mut x = Self::zero(space, dim);
        x.data[outcome * dim + coord] = 1.0;
        x
    }

    pub(crate) fn from_flat(space: Arc<FiniteProbSpace>, dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * space.len());
        Self { space, dim, data }
    }

    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, outcome: usize) -> &[f64] {
        &self.data[outcome * self.dim..(outcome + 1) * self.dim]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_space(&self.space, &other.space) {
            return Err(OrliczError::SpaceMismatch);
        }
        if self.dim != other.dim {
            return Err(OrliczError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self::from_flat(self.space.clone(), self.dim, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self::from_flat(self.space.clone(), self.dim, data))
    }

    /// Module action `ζ·x` of a finite scalar random variable.
    pub fn scale(&self, z: &RandomScalar) -> Result<Self> {
        if !same_space(&self.space, z.space()) {
            return Err(OrliczError::SpaceMismatch);
        }
        if !z.is_finite() {
            return Err(OrliczError::InvalidValue("module scalars must be finite".into()));
        }
        let data = self
            .data
            .chunks(self.dim)
            .zip(z.values())
            .flat_map(|(v, &c)| v.iter().map(move |a| ext_mul(c, *a)))
            .collect();
        Ok(Self::from_flat(self.space.clone(), self.dim, data))
    }

    /// `‖x‖`: the pointwise Euclidean length.
    pub fn module_norm(&self) -> RandomScalar {
        let values = self.data.chunks(self.dim).map(euclid).collect();
        RandomScalar::new(self.space.clone(), values).expect("finite norms")
    }

    /// `x_n = Ĩ_{A_n} x` with `A_n = {‖x‖ ≤ n}`.
    pub fn truncate(&self, n: u64) -> Self {
        let level = n as f64;
        let mut data = self.data.clone();
        for v in data.chunks_mut(self.dim) {
            if euclid(v) > level {
                v.iter_mut().for_each(|a| *a = 0.0);
            }
        }
        Self::from_flat(self.space.clone(), self.dim, data)
    }
}

/// `f ∈ E*` given by its pointwise Riesz representer `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFunctional {
    space: Arc<FiniteProbSpace>,
    dim: usize,
    data: Vec<f64>,
}

impl RandomFunctional {
    pub fn new(space: Arc<FiniteProbSpace>, covectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = covectors.first().map_or(0, Vec::len);
        let data = flatten(&space, dim, covectors)?;
        Ok(Self { space, dim, data })
    }

    pub fn zero(space: Arc<FiniteProbSpace>, dim: usize) -> Self {
        let data = vec![0.0; dim * space.len()];
        Self { space, dim, data }
    }

    pub(crate) fn from_flat(space: Arc<FiniteProbSpace>, dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * space.len());
        Self { space, dim, data }
    }

    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn covector(&self, outcome: usize) -> &[f64] {
        &self.data[outcome * self.dim..(outcome + 1) * self.dim]
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.data
    }

    /// `f(x)(ω) = ⟨g(ω), x(ω)⟩`.
    pub fn apply(&self, x: &ModuleElement) -> Result<RandomScalar> {
        if !same_space(&self.space, &x.space) {
            return Err(OrliczError::SpaceMismatch);
        }
        if self.dim != x.dim {
            return Err(OrliczError::DimensionMismatch {
                expected: self.dim,
                got: x.dim,
            });
        }
        let values = self
            .data
            .chunks(self.dim)
            .zip(x.data.chunks(self.dim))
            .map(|(g, v)| g.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        RandomScalar::new(self.space.clone(), values)
    }

    /// `‖f‖* = ∨{|f(x)| : ‖x‖ ≤ 1}`, attained at `x = g/|g|`.
    pub fn random_operator_norm(&self) -> RandomScalar {
        let values = self.data.chunks(self.dim).map(euclid).collect();
        RandomScalar::new(self.space.clone(), values).expect("finite norms")
    }

    /// The unit-norm element aligned with `g` (θ where `g = 0`).
    pub fn aligned_unit(&self) -> ModuleElement {
        let mut data = self.data.clone();
        for v in data.chunks_mut(self.dim) {
            let n = euclid(v);
            if n > 0.0 {
                v.iter_mut().for_each(|a| *a /= n);
            }
        }
        ModuleElement::from_flat(self.space.clone(), self.dim, data)
    }

    pub fn linear_combination(&self, alpha: &RandomScalar, other: &Self, beta: &RandomScalar) -> Result<Self> {
        if self.dim != other.dim {
            return Err(OrliczError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        for s in [&other.space, alpha.space(), beta.space()] {
            if !same_space(&self.space, s) {
                return Err(OrliczError::SpaceMismatch);
            }
        }
        let d = self.dim;
        let data = (0..self.data.len())
            .map(|i| alpha.get(i / d) * self.data[i] + beta.get(i / d) * other.data[i])
            .collect();
        Ok(Self::from_flat(self.space.clone(), d, data))
    }
}

/// Placement of `x` relative to `L_𝓕^Φ(E)` and `H_𝓕^Φ(E)`.
pub fn conditional_space_membership(x: &ModuleElement, phi: &RandomOrliczFunction) -> Membership {
    norms::membership(&x.module_norm(), phi)
}

/// `|||x|||_{ΦL} = |‖x‖|_{ΦL}`.
pub fn lux_norm_e(x: &ModuleElement, phi: &RandomOrliczFunction, tol: f64) -> Result<RandomScalar> {
    norms::cond_luxemburg_norm(&x.module_norm(), phi, tol)
}

/// `|||x|||_{ΦO} = |‖x‖|_{ΦO}`.
pub fn orlicz_norm_e(x: &ModuleElement, phi: &RandomOrliczFunction, tol: f64) -> Result<RandomScalar> {
    norms::cond_orlicz_norm(&x.module_norm(), phi, tol)
}

/// `x_n = Ĩ_{A_n} x` with `A_n = {‖x‖ ≤ n}`.
pub fn truncation_sequence(x: &ModuleElement, n: u64) -> Result<ModuleElement> {
    if n == 0 {
        return Err(OrliczError::InvalidValue("truncation level must be >= 1".into()));
    }
    Ok(x.truncate(n))
}

/// Smallest `n ≥ 1` with `P{‖x - x_n‖ > ε} < λ`.
///
/// `P{‖x - x_n‖ > ε}` only changes when `n` crosses a value of `‖x‖`, so the
/// minimum is found among `1` and the ceilings of the pointwise norms.
pub fn denseness_check(x: &ModuleElement, eps: f64, lambda: f64) -> Result<u64> {
    let unit = |v: f64| v > 0.0 && v < 1.0;
    if !unit(eps) || !unit(lambda) {
        return Err(OrliczError::InvalidValue(format!(
            "eps = {eps} and lambda = {lambda} must lie in (0, 1)"
        )));
    }
    let mut candidates: Vec<u64> = x
        .module_norm()
        .values()
        .iter()
        .map(|&v| v.ceil().max(1.0) as u64)
        .collect();
    candidates.push(1);
    candidates.sort_unstable();
    candidates.dedup();
    for n in candidates {
        let gap = x.sub(&x.truncate(n))?.module_norm();
        if gap.prob_exceeds(eps) < lambda {
            return Ok(n);
        }
    }
    unreachable!("the largest candidate truncates nothing")
}
