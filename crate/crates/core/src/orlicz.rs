//! Orlicz functions, their Young conjugates, and random Orlicz functions
//! modelled as one scalar Orlicz function per atom of a partition.
//!
//! The supported families form a set that is closed under conjugation:
//!
//! | family                      | conjugate                          |
//! |-----------------------------|------------------------------------|
//! | `c·t^p`, `p > 1`            | `(cp)^{1-q}/q · s^q`, `q = p/(p-1)` |
//! | `c·t`                       | indicator of `[0, c]`              |
//! | indicator of `[0, r]`       | `r·s`                              |
//! | `e^t - 1`                   | `s ln s - s + 1` on `s ≥ 1`, else 0 |
//! | piecewise linear            | piecewise linear (kinks ↔ slopes)  |
//!
//! Conjugation swaps stored data rather than recomputing it, so applying it
//! twice returns a value equal to the original.

use serde::{Deserialize, Serialize};

use crate::error::{OrliczError, Result};
use crate::prob::{same_space, AtomPartition, RandomScalar};

/// `φ(t) = c·t^p` together with its conjugate exponent and coefficient.
///
/// Equality compares `(p, c)` only; the conjugate pair is derived data.
#[derive(Debug, Clone)]
pub struct PowerFn {
    p: f64,
    c: f64,
    q: f64,
    c_conj: f64,
}

impl PowerFn {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Hölder conjugate `q = p/(p-1)`; `+∞` for `p = 1`.
    pub fn conjugate_exponent(&self) -> f64 {
        self.q
    }
}

impl PartialEq for PowerFn {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.c == other.c
    }
}

/// Indicator of `[0, r]`: `0` for `t ≤ r`, `+∞` beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorBall {
    radius: f64,
}

impl IndicatorBall {
    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Convex piecewise-linear `φ` starting at the origin, slope `slopes[i]` on
/// `[breakpoints[i], breakpoints[i+1])`, optionally `+∞` beyond `jump_at`.
///
/// Stored in canonical form: consecutive equal slopes are merged, so slopes
/// are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    jump_at: Option<f64>,
    knot_values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, jump_at: Option<f64>) -> Result<Self> {
        let bad = |msg: String| Err(OrliczError::InvalidFunction(msg));
        if breakpoints.is_empty() || breakpoints.len() != slopes.len() {
            return bad(format!(
                "piecewise: need equally many breakpoints and slopes (got {} and {})",
                breakpoints.len(),
                slopes.len()
            ));
        }
        if breakpoints[0] != 0.0 {
            return bad("piecewise: first breakpoint must be 0".into());
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || slopes.iter().any(|s| !s.is_finite()) {
            return bad("piecewise: breakpoints and slopes must be finite".into());
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return bad("piecewise: breakpoints must be strictly increasing".into());
        }
        if slopes[0] < 0.0 || slopes.windows(2).any(|w| w[1] < w[0]) {
            return bad("piecewise: slopes must be nonnegative and nondecreasing".into());
        }
        if let Some(j) = jump_at {
            let last = *breakpoints.last().unwrap();
            if !(j.is_finite() && j > last) {
                return bad(format!(
                    "piecewise: jump_at = {j} must be finite and beyond the last breakpoint {last}"
                ));
            }
        }
        if jump_at.is_none() && slopes.iter().all(|&s| s == 0.0) {
            return bad("piecewise: identically zero function is trivial".into());
        }

        let mut bps = vec![breakpoints[0]];
        let mut sls = vec![slopes[0]];
        for (&b, &s) in breakpoints.iter().zip(&slopes).skip(1) {
            if s != *sls.last().unwrap() {
                bps.push(b);
                sls.push(s);
            }
        }
        let mut knot_values = Vec::with_capacity(bps.len());
        let mut acc = 0.0;
        knot_values.push(acc);
        for i in 1..bps.len() {
            acc += sls[i - 1] * (bps[i] - bps[i - 1]);
            knot_values.push(acc);
        }
        Ok(Self {
            breakpoints: bps,
            slopes: sls,
            jump_at,
            knot_values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn jump_at(&self) -> Option<f64> {
        self.jump_at
    }

    fn segment(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= t).saturating_sub(1)
    }

    fn value(&self, t: f64) -> f64 {
        if matches!(self.jump_at, Some(j) if t > j) {
            return f64::INFINITY;
        }
        if t.is_infinite() {
            return f64::INFINITY;
        }
        let i = self.segment(t);
        self.knot_values[i] + self.slopes[i] * (t - self.breakpoints[i])
    }

    fn conjugate(&self) -> Self {
        // Kinks of φ at b_i become slopes of ψ, slopes of φ become kinks of ψ.
        let n = self.slopes.len();
        let mut bps = Vec::with_capacity(n + 1);
        let mut sls = Vec::with_capacity(n + 1);
        bps.push(0.0);
        sls.push(0.0);
        bps.extend_from_slice(&self.slopes);
        sls.extend_from_slice(&self.breakpoints[1..]);
        let jump_at = match self.jump_at {
            Some(j) => {
                sls.push(j);
                None
            }
            None => bps.pop(),
        };
        if bps.len() > 1 && bps[1] == 0.0 {
            bps.remove(0);
            sls.remove(0);
        }
        let knot_values = {
            let mut kv = vec![0.0];
            for i in 1..bps.len() {
                kv.push(kv[i - 1] + sls[i - 1] * (bps[i] - bps[i - 1]));
            }
            kv
        };
        Self {
            breakpoints: bps,
            slopes: sls,
            jump_at,
            knot_values,
        }
    }

    /// `sup_{t>0} φ(2t)/φ(t)`, or `None` when unbounded.
    fn doubling_constant(&self) -> Option<f64> {
        if self.jump_at.is_some() || self.slopes[0] <= 0.0 {
            return None;
        }
        // φ(2t)/φ(t) is a ratio of affine maps between consecutive points of
        // {b_i} ∪ {b_i/2}, hence monotone there; it tends to 2 at 0 and ∞.
        let mut best: f64 = 2.0;
        for &b in &self.breakpoints[1..] {
            for t in [b, 0.5 * b] {
                best = best.max(self.value(2.0 * t) / self.value(t));
            }
        }
        Some(best)
    }
}

/// A scalar Orlicz function drawn from one of the supported families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::json::PhiJson", into = "crate::json::PhiJson")]
pub enum OrliczFunction {
    Power(PowerFn),
    ExpMinusOne,
    /// `s ln s - s + 1` for `s ≥ 1`, `0` below; the conjugate of `e^t - 1`.
    EntropyConj,
    PiecewiseLinear(PiecewiseLinear),
    IndicatorBall(IndicatorBall),
}

impl OrliczFunction {
    /// `c·t^p` with `p ≥ 1`, `c > 0`, and for `p > 1` a conjugate coefficient
    /// that is a positive finite `f64`.
    pub fn power(p: f64, c: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(OrliczError::InvalidFunction(format!("power: p = {p} must be >= 1")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(OrliczError::InvalidFunction(format!("power: c = {c} must be > 0")));
        }
        let (q, c_conj) = if p == 1.0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            let q = p / (p - 1.0);
            let c_conj = (c * p).powf(1.0 - q) / q;
            if !(q.is_finite() && c_conj.is_finite() && c_conj > 0.0) {
                return Err(OrliczError::InvalidFunction(format!(
                    "power: p = {p}, c = {c} has conjugate coefficient {c_conj}, outside the f64 range"
                )));
            }
            (q, c_conj)
        };
        Ok(Self::Power(PowerFn { p, c, q, c_conj }))
    }

    pub fn identity() -> Self {
        Self::power(1.0, 1.0).expect("valid")
    }

    pub fn indicator_ball(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(OrliczError::InvalidFunction(format!(
                "indicator_ball: r = {radius} must be > 0"
            )));
        }
        Ok(Self::IndicatorBall(IndicatorBall { radius }))
    }

    pub fn piecewise(breakpoints: Vec<f64>, slopes: Vec<f64>, jump_at: Option<f64>) -> Result<Self> {
        PiecewiseLinear::new(breakpoints, slopes, jump_at).map(Self::PiecewiseLinear)
    }

    /// `φ(t)`; errors on negative `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(OrliczError::NegativeArgument(t));
        }
        Ok(self.value(t))
    }

    /// `φ(t)` for `t ≥ 0` (including `+∞`), unchecked.
    pub(crate) fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match self {
            Self::Power(pf) => {
                if pf.p == 1.0 {
                    pf.c * t
                } else {
                    pf.c * t.powf(pf.p)
                }
            }
            Self::ExpMinusOne => t.exp_m1(),
            Self::EntropyConj => {
                if t <= 1.0 {
                    0.0
                } else if t.is_infinite() {
                    f64::INFINITY
                } else {
                    t * t.ln() - t + 1.0
                }
            }
            Self::PiecewiseLinear(pl) => pl.value(t),
            Self::IndicatorBall(b) => {
                if t <= b.radius {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// The point `t*` beyond which `φ = +∞`; `φ(t*)` itself is finite.
    pub fn jump_point(&self) -> Option<f64> {
        match self {
            Self::PiecewiseLinear(pl) => pl.jump_at,
            Self::IndicatorBall(b) => Some(b.radius),
            _ => None,
        }
    }

    /// `lim_{t→∞} φ(t)/t`.
    pub fn asymptotic_slope(&self) -> f64 {
        match self {
            Self::Power(pf) if pf.p == 1.0 => pf.c,
            Self::PiecewiseLinear(pl) if pl.jump_at.is_none() => *pl.slopes.last().unwrap(),
            _ => f64::INFINITY,
        }
    }

    /// Right derivative `φ'(t+)`; `+∞` at and beyond a jump point.
    pub fn right_derivative(&self, t: f64) -> f64 {
        match self {
            Self::Power(pf) => {
                if pf.p == 1.0 {
                    pf.c
                } else {
                    pf.c * pf.p * t.powf(pf.p - 1.0)
                }
            }
            Self::ExpMinusOne => t.exp(),
            Self::EntropyConj => {
                if t < 1.0 {
                    0.0
                } else {
                    t.ln()
                }
            }
            Self::PiecewiseLinear(pl) => match pl.jump_at {
                Some(j) if t >= j => f64::INFINITY,
                _ => pl.slopes[pl.segment(t)],
            },
            Self::IndicatorBall(b) => {
                if t < b.radius {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Closed-form conjugate `ψ(s) = sup_{t≥0} {ts - φ(t)}`.
    pub fn conjugate(&self) -> Self {
        match self {
            Self::Power(pf) if pf.p == 1.0 => Self::IndicatorBall(IndicatorBall { radius: pf.c }),
            Self::Power(pf) => Self::Power(PowerFn {
                p: pf.q,
                c: pf.c_conj,
                q: pf.p,
                c_conj: pf.c,
            }),
            Self::ExpMinusOne => Self::EntropyConj,
            Self::EntropyConj => Self::ExpMinusOne,
            Self::PiecewiseLinear(pl) => Self::PiecewiseLinear(pl.conjugate()),
            Self::IndicatorBall(b) => Self::Power(PowerFn {
                p: 1.0,
                c: b.radius,
                q: f64::INFINITY,
                c_conj: f64::INFINITY,
            }),
        }
    }

    /// Smallest `K` with `φ(2t) ≤ K φ(t)` for all `t`, if finite.
    pub fn doubling_constant(&self) -> Option<f64> {
        match self {
            Self::Power(pf) => Some(2f64.powf(pf.p)),
            Self::PiecewiseLinear(pl) => pl.doubling_constant(),
            Self::ExpMinusOne | Self::EntropyConj | Self::IndicatorBall(_) => None,
        }
    }

    /// Brute-force lower bound on `ψ(s)`; see [`crate::oracle::grid_conjugate`].
    pub fn conjugate_oracle(&self, s: f64, grid: usize, t_max: f64) -> f64 {
        crate::oracle::grid_conjugate(self, s, grid, t_max)
    }
}

/// An 𝓕-measurable family of scalar Orlicz functions acting pointwise:
/// `Φ(t)(ω) = φ_{B(ω)}(t(ω))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomOrliczFunction {
    partition: AtomPartition,
    per_block: Vec<OrliczFunction>,
}

impl RandomOrliczFunction {
    pub fn new(partition: AtomPartition, per_block: Vec<OrliczFunction>) -> Result<Self> {
        if per_block.len() != partition.num_blocks() {
            return Err(OrliczError::DimensionMismatch {
                expected: partition.num_blocks(),
                got: per_block.len(),
            });
        }
        Ok(Self {
            partition,
            per_block,
        })
    }

    /// The same `φ` on every block.
    pub fn uniform(partition: AtomPartition, phi: OrliczFunction) -> Self {
        let per_block = vec![phi; partition.num_blocks()];
        Self {
            partition,
            per_block,
        }
    }

    pub fn partition(&self) -> &AtomPartition {
        &self.partition
    }

    pub fn per_block(&self) -> &[OrliczFunction] {
        &self.per_block
    }

    pub fn block_fn(&self, block: usize) -> &OrliczFunction {
        &self.per_block[block]
    }

    /// The scalar function in force at `outcome`.
    pub fn at(&self, outcome: usize) -> &OrliczFunction {
        &self.per_block[self.partition.block_of(outcome)]
    }

    /// Pointwise `Φ(t)`. `t` need not be 𝓕-measurable, which is what
    /// `E[Φ(d|ζ|) | 𝓕]` requires.
    pub fn eval_random(&self, t: &RandomScalar) -> Result<RandomScalar> {
        t.check_partition(&self.partition)?;
        let values = t
            .values()
            .iter()
            .enumerate()
            .map(|(w, &v)| self.at(w).eval(v))
            .collect::<Result<Vec<_>>>()?;
        RandomScalar::new(t.space().clone(), values)
    }

    pub fn random_conjugate(&self) -> Self {
        Self {
            partition: self.partition.clone(),
            per_block: self.per_block.iter().map(OrliczFunction::conjugate).collect(),
        }
    }

    /// A blockwise-constant `ζ ∈ L⁰₊₊(𝓕)` with `Φ(2t) ≤ ζ Φ(t)`, if one exists.
    pub fn delta2_check(&self) -> Option<RandomScalar> {
        let per_block = self
            .per_block
            .iter()
            .map(OrliczFunction::doubling_constant)
            .collect::<Option<Vec<_>>>()?;
        RandomScalar::from_blocks(&self.partition, &per_block).ok()
    }

    pub(crate) fn check_scalar(&self, z: &RandomScalar) -> Result<()> {
        if same_space(z.space(), self.partition.space()) {
            Ok(())
        } else {
            Err(OrliczError::SpaceMismatch)
        }
    }
}
