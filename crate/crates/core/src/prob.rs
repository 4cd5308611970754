//! Finite probability spaces, partitions standing in for sub-σ-algebras, and
//! outcome-indexed extended-real random variables.
//!
//! Every outcome carries strictly positive mass, so almost-sure statements
//! reduce to pointwise ones and no quotient by null sets is needed.

use std::sync::Arc;

use crate::error::{OrliczError, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A finite outcome set `Ω` with strictly positive probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl FiniteProbSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Arc<Self>> {
        if weights.is_empty() {
            return Err(OrliczError::InvalidSpace("no outcomes".into()));
        }
        if labels.len() != weights.len() {
            return Err(OrliczError::InvalidSpace(format!(
                "{} labels for {} weights",
                labels.len(),
                weights.len()
            )));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0 && w <= 1.0) {
                return Err(OrliczError::InvalidSpace(format!(
                    "weight {i} = {w} is not in (0, 1]"
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(OrliczError::InvalidSpace(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Arc::new(Self { labels, weights }))
    }

    /// Space with labels `w0, w1, ...`.
    pub fn from_weights(weights: Vec<f64>) -> Result<Arc<Self>> {
        let labels = (0..weights.len()).map(|i| format!("w{i}")).collect();
        Self::new(labels, weights)
    }

    pub fn uniform(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(OrliczError::InvalidSpace("no outcomes".into()));
        }
        Self::from_weights(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, outcome: usize) -> f64 {
        self.weights[outcome]
    }
}

pub(crate) fn same_space(a: &Arc<FiniteProbSpace>, b: &Arc<FiniteProbSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A partition of the outcomes into atoms. The discrete partition plays the
/// role of the full σ-algebra, the one-block partition the trivial one.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPartition {
    space: Arc<FiniteProbSpace>,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    block_probs: Vec<f64>,
}

impl AtomPartition {
    pub fn new(space: Arc<FiniteProbSpace>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.len();
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(OrliczError::InvalidPartition(format!("block {b} is empty")));
            }
            for &w in block {
                if w >= n {
                    return Err(OrliczError::InvalidPartition(format!(
                        "outcome index {w} out of range (space has {n} outcomes)"
                    )));
                }
                if block_of[w] != usize::MAX {
                    return Err(OrliczError::InvalidPartition(format!(
                        "outcome {w} appears in more than one block"
                    )));
                }
                block_of[w] = b;
            }
        }
        if let Some(w) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(OrliczError::InvalidPartition(format!(
                "outcome {w} is not covered"
            )));
        }
        // The full block has probability exactly one, so conditioning on it
        // reproduces unconditional quantities bit for bit.
        let block_probs = blocks
            .iter()
            .map(|block| {
                if block.len() == n {
                    1.0
                } else {
                    block.iter().map(|&w| space.weight(w)).sum()
                }
            })
            .collect();
        Ok(Self {
            space,
            blocks,
            block_of,
            block_probs,
        })
    }

    /// One block containing every outcome.
    pub fn trivial(space: Arc<FiniteProbSpace>) -> Self {
        let blocks = vec![(0..space.len()).collect()];
        Self::new(space, blocks).expect("trivial partition is valid")
    }

    /// One block per outcome.
    pub fn discrete(space: Arc<FiniteProbSpace>) -> Self {
        let blocks = (0..space.len()).map(|w| vec![w]).collect();
        Self::new(space, blocks).expect("discrete partition is valid")
    }

    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, outcome: usize) -> usize {
        self.block_of[outcome]
    }

    pub fn block_prob(&self, block: usize) -> f64 {
        self.block_probs[block]
    }

    /// `P(ω | B)` for the outcomes of `block`, in block order.
    pub fn conditional_weights(&self, block: usize) -> Vec<f64> {
        let pb = self.block_probs[block];
        self.blocks[block]
            .iter()
            .map(|&w| self.space.weight(w) / pb)
            .collect()
    }
}

/// An extended real random variable: one value per outcome, each finite or
/// `+∞`. `NaN` and `-∞` are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomScalar {
    space: Arc<FiniteProbSpace>,
    values: Vec<f64>,
}

impl RandomScalar {
    pub fn new(space: Arc<FiniteProbSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(OrliczError::DimensionMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
            return Err(OrliczError::InvalidValue(format!(
                "{v} is not a finite real or +inf"
            )));
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: Arc<FiniteProbSpace>, c: f64) -> Result<Self> {
        let n = space.len();
        Self::new(space, vec![c; n])
    }

    pub fn zeros(space: Arc<FiniteProbSpace>) -> Self {
        let n = space.len();
        Self {
            space,
            values: vec![0.0; n],
        }
    }

    /// The 0/1 indicator `Ĩ_A` of a set of outcomes.
    pub fn indicator(space: Arc<FiniteProbSpace>, set: impl Fn(usize) -> bool) -> Self {
        let values = (0..space.len())
            .map(|w| if set(w) { 1.0 } else { 0.0 })
            .collect();
        Self { space, values }
    }

    /// Blockwise-constant variable taking `per_block[b]` on block `b`.
    pub fn from_blocks(partition: &AtomPartition, per_block: &[f64]) -> Result<Self> {
        if per_block.len() != partition.num_blocks() {
            return Err(OrliczError::DimensionMismatch {
                expected: partition.num_blocks(),
                got: per_block.len(),
            });
        }
        let values = (0..partition.space().len())
            .map(|w| per_block[partition.block_of(w)])
            .collect();
        Self::new(partition.space().clone(), values)
    }

    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.values[outcome]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abs(&self) -> Self {
        self.map_unchecked(f64::abs)
    }

    /// `ξ ≤ η` pointwise.
    pub fn le(&self, other: &Self) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a <= b)
    }

    /// Member of `L̄⁰₊`.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Member of `L⁰₊₊`: finite and strictly positive everywhere.
    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0 && v.is_finite())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise product with the measure-theoretic convention `0·∞ = 0`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| ext_mul(a, b))
            .collect();
        Self::new(self.space.clone(), values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + b)
            .collect();
        Self::new(self.space.clone(), values)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(
            self.space.clone(),
            self.values.iter().map(|&v| ext_mul(c, v)).collect(),
        )
    }

    pub(crate) fn map_unchecked(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(OrliczError::SpaceMismatch)
        }
    }

    pub(crate) fn check_partition(&self, partition: &AtomPartition) -> Result<()> {
        if same_space(&self.space, partition.space()) {
            Ok(())
        } else {
            Err(OrliczError::SpaceMismatch)
        }
    }

    /// `E[ζ]`.
    pub fn expectation(&self) -> Result<f64> {
        weighted_mean(&self.values, self.space.weights())
    }

    /// `E[ζ | 𝓕]`: the weighted block average, constant on each block.
    pub fn cond_expectation(&self, partition: &AtomPartition) -> Result<Self> {
        self.check_partition(partition)?;
        let mut per_block = Vec::with_capacity(partition.num_blocks());
        for (b, block) in partition.blocks().iter().enumerate() {
            let values: Vec<f64> = block.iter().map(|&w| self.values[w]).collect();
            per_block.push(weighted_mean(&values, &partition.conditional_weights(b))?);
        }
        Self::from_blocks(partition, &per_block)
    }

    /// True iff the stored values are constant on every block.
    pub fn is_measurable(&self, partition: &AtomPartition) -> bool {
        if !same_space(&self.space, partition.space()) {
            return false;
        }
        partition.blocks().iter().all(|block| {
            let first = self.values[block[0]];
            block.iter().all(|&w| self.values[w] == first)
        })
    }

    /// `P{ζ > ε}`.
    pub fn prob_exceeds(&self, eps: f64) -> f64 {
        self.values
            .iter()
            .zip(self.space.weights())
            .filter(|(&v, _)| v > eps)
            .map(|(_, &w)| w)
            .sum()
    }
}

/// `∨` of a finite family: the pointwise maximum.
pub fn essential_sup_family(family: &[RandomScalar]) -> Result<RandomScalar> {
    let (first, rest) = family.split_first().ok_or(OrliczError::EmptyFamily)?;
    let mut values = first.values.clone();
    for other in rest {
        first.check_space(other)?;
        for (v, &o) in values.iter_mut().zip(&other.values) {
            *v = v.max(o);
        }
    }
    RandomScalar::new(first.space.clone(), values)
}

pub(crate) fn ext_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// `Σ wᵢ vᵢ` over extended reals. `+∞` is absorbing when every value is
/// nonnegative; with a negative value present the sum is undefined.
pub(crate) fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    let has_inf = values.iter().any(|v| v.is_infinite());
    if has_inf {
        if values.iter().any(|&v| v < 0.0) {
            return Err(OrliczError::UndefinedExpectation);
        }
        return Ok(f64::INFINITY);
    }
    Ok(values.iter().zip(weights).map(|(v, w)| v * w).sum())
}
