//! The map `T f = E[f(·) | 𝓕]` from `L_𝓕^Ψ(E*)` into the random conjugate of
//! `(H_𝓕^Φ(E), |||·|||_{ΦL})`, with checks that it is isometric and onto.
//!
//! A dual functional on the finite model is stored by coefficients `c(ω)`,
//! acting as `[F x](B) = Σ_{ω∈B} ⟨c(ω), x(ω)⟩` on each atom `B`. Such an `F`
//! is automatically `L⁰(𝓕)`-linear and 𝓕-measurable. `T` sends the covector
//! field `g` of `f` to `c(ω) = P(ω | B) g(ω)`, and the inverse multiplies back
//! by `P(B)/P(ω)`.
//!
//! The operator norm `‖F‖` is a supremum over a non-polyhedral unit ball, so
//! it is reported as a certified interval:
//!
//! * lower end: `|F x|` at explicit unit-ball elements `x = ζ·g/|g|` aligned
//!   with the representer and scaled by a nonnegative profile `ζ` (Young
//!   maximizers, Hölder profiles for power functions, point masses), plus
//!   random unit-ball samples;
//! * upper end: for any `k > 0`, `E[|g|ζ | 𝓕] ≤ (1 + E[ψ(k|g|) | 𝓕])/k`
//!   whenever `E[φ(ζ) | 𝓕] ≤ 1` (Fenchel–Young), minimized over a zooming
//!   grid of `k` plus closed-form and boundary choices.

use serde::Serialize;

use crate::error::{OrliczError, Result};
use crate::module::{self, ModuleElement, RandomFunctional};
use crate::norms::{self, Membership, DEFAULT_TOL};
use crate::oracle;
use crate::orlicz::{OrliczFunction, RandomOrliczFunction};
use crate::prob::{AtomPartition, RandomScalar};

/// An element of `(H_𝓕^Φ(E), |||·|||_{ΦL})*` in coefficient form.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    partition: AtomPartition,
    dim: usize,
    coeffs: Vec<f64>,
}

impl DualFunctional {
    pub fn new(partition: AtomPartition, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let f = RandomFunctional::new(partition.space().clone(), coefficients)?;
        Ok(Self {
            partition,
            dim: f.dim(),
            coeffs: f.flat().to_vec(),
        })
    }

    pub fn zero(partition: AtomPartition, dim: usize) -> Self {
        let coeffs = vec![0.0; dim * partition.space().len()];
        Self { partition, dim, coeffs }
    }

    pub fn partition(&self) -> &AtomPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self, outcome: usize) -> &[f64] {
        &self.coeffs[outcome * self.dim..(outcome + 1) * self.dim]
    }

    /// `F(x)`, constant on each atom.
    pub fn apply(&self, x: &ModuleElement) -> Result<RandomScalar> {
        let as_functional = RandomFunctional::from_flat(self.partition.space().clone(), self.dim, self.coeffs.clone());
        let pointwise = as_functional.apply(x)?;
        let per_block: Vec<f64> = self
            .partition
            .blocks()
            .iter()
            .map(|block| block.iter().map(|&w| pointwise.get(w)).sum())
            .collect();
        RandomScalar::from_blocks(&self.partition, &per_block)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

fn check_partition(partition: &AtomPartition, phi: &RandomOrliczFunction) -> Result<()> {
    if partition == phi.partition() {
        Ok(())
    } else {
        Err(OrliczError::InvalidPartition(
            "functional and Orlicz function use different partitions".into(),
        ))
    }
}

fn cond_weight(partition: &AtomPartition, outcome: usize) -> f64 {
    partition.space().weight(outcome) / partition.block_prob(partition.block_of(outcome))
}

/// `[T f](x) = E[f(x) | 𝓕]`.
pub fn t_map(f: &RandomFunctional, phi: &RandomOrliczFunction) -> Result<DualFunctional> {
    phi.check_scalar(&RandomScalar::zeros(f.space().clone()))?;
    let psi = phi.random_conjugate();
    if norms::membership(&f.random_operator_norm(), &psi) == Membership::Outside {
        return Err(OrliczError::MembershipViolation);
    }
    let part = phi.partition().clone();
    let d = f.dim();
    let coeffs = f
        .flat()
        .iter()
        .enumerate()
        .map(|(i, &g)| cond_weight(&part, i / d) * g)
        .collect();
    Ok(DualFunctional {
        partition: part,
        dim: d,
        coeffs,
    })
}

/// The `f` with `T f = F`: `g(ω) = c(ω) P(B)/P(ω)`.
pub fn recover_functional(big_f: &DualFunctional, phi: &RandomOrliczFunction) -> Result<RandomFunctional> {
    check_partition(&big_f.partition, phi)?;
    let part = &big_f.partition;
    let d = big_f.dim;
    let data = big_f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c / cond_weight(part, i / d))
        .collect();
    Ok(RandomFunctional::from_flat(part.space().clone(), d, data))
}

/// Largest discrepancy between `F` and `T(recover(F))` on the indicator
/// basis `{e_i at ω}` of `E`.
pub fn round_trip_residual(big_f: &DualFunctional, phi: &RandomOrliczFunction) -> Result<f64> {
    let back = t_map(&recover_functional(big_f, phi)?, phi)?;
    let space = big_f.partition.space().clone();
    let mut worst: f64 = 0.0;
    for w in 0..space.len() {
        for i in 0..big_f.dim {
            let e = ModuleElement::basis(space.clone(), big_f.dim, w, i);
            let lhs = back.apply(&e)?;
            let rhs = big_f.apply(&e)?;
            for (a, b) in lhs.values().iter().zip(rhs.values()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

/// Certified enclosure of the blockwise operator norm `‖F‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualNormBounds {
    pub lower: RandomScalar,
    pub upper: RandomScalar,
    pub samples: usize,
    pub seed: u64,
}

/// `(1 + E_π[ψ(k a)]) / k`; `k = ∞` means the recession limit.
fn young_bound(psi: &OrliczFunction, a: &[f64], pi: &[f64], k: f64) -> f64 {
    if k.is_infinite() {
        let slope = psi.asymptotic_slope();
        let mean: f64 = a.iter().zip(pi).map(|(x, w)| x * w).sum();
        return if slope.is_infinite() { f64::INFINITY } else { slope * mean };
    }
    let m: f64 = a
        .iter()
        .zip(pi)
        .map(|(&x, &w)| if x == 0.0 { 0.0 } else { w * psi.value(k * x) })
        .sum();
    (1.0 + m) / k
}

/// Best Fenchel–Young upper bound on one atom and the `k` achieving it.
fn block_upper(phi: &OrliczFunction, a: &[f64], pi: &[f64]) -> (f64, f64) {
    let psi = phi.conjugate();
    let amax = a.iter().copied().fold(0.0, f64::max);
    let mut best = (f64::INFINITY, f64::NAN);
    let consider = |k: f64, best: &mut (f64, f64)| {
        if k > 0.0 {
            let v = young_bound(&psi, a, pi, k);
            if v < best.0 {
                *best = (v, k);
            }
        }
    };
    if let OrliczFunction::Power(pf) = &psi {
        if pf.p() > 1.0 {
            // argmin_k (1 + c' k^q A)/k = ((q-1) c' A)^{-1/q}
            let q = pf.p();
            let big_a: f64 = a.iter().zip(pi).map(|(x, w)| w * x.powf(q)).sum();
            consider(((q - 1.0) * pf.c() * big_a).powf(-1.0 / q), &mut best);
        }
    }
    if let Some(t_star) = psi.jump_point() {
        consider(t_star / amax, &mut best);
    }
    consider(f64::INFINITY, &mut best);

    // Zooming log-grid over k.
    let (mut lo, mut hi) = (-10.0_f64, 10.0_f64);
    for _ in 0..6 {
        let steps = 200;
        let mut best_e = f64::NAN;
        let mut best_v = f64::INFINITY;
        for i in 0..=steps {
            let e = lo + (hi - lo) * i as f64 / steps as f64;
            let k = 10f64.powf(e) / amax;
            let v = young_bound(&psi, a, pi, k);
            consider(k, &mut best);
            if v < best_v {
                best_v = v;
                best_e = e;
            }
        }
        if best_e.is_nan() {
            break;
        }
        let h = (hi - lo) / steps as f64;
        lo = best_e - 2.0 * h;
        hi = best_e + 2.0 * h;
    }
    best
}

fn argmax_profile(a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    if let Some((i, _)) = a
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .max_by(|x, y| x.1.total_cmp(y.1))
    {
        out[i] = 1.0;
    }
    out
}

/// Bracket `‖F‖` on every atom of `Φ`'s partition.
pub fn dual_operator_norm(big_f: &DualFunctional, phi: &RandomOrliczFunction, samples: usize, seed: u64) -> Result<DualNormBounds> {
    check_partition(&big_f.partition, phi)?;
    let part = phi.partition();
    let space = part.space().clone();
    let g = recover_functional(big_f, phi)?;
    let norm_g = g.random_operator_norm();
    let aligned = g.aligned_unit();
    let nblocks = part.num_blocks();

    let mut upper = vec![0.0; nblocks];
    let mut k_best = vec![f64::NAN; nblocks];
    let mut profiles: Vec<Vec<f64>> = vec![vec![0.0; space.len()]; 5];
    for (b, block) in part.blocks().iter().enumerate() {
        let a: Vec<f64> = block.iter().map(|&w| norm_g.get(w)).collect();
        if a.iter().all(|&v| v == 0.0) {
            continue;
        }
        let pi = part.conditional_weights(b);
        let phi_b = phi.block_fn(b);
        let (u, k) = block_upper(phi_b, &a, &pi);
        upper[b] = u;
        k_best[b] = k;

        let psi_b = phi_b.conjugate();
        let young: Vec<f64> = if k.is_finite() {
            a.iter().map(|&x| psi_b.right_derivative(k * x)).collect()
        } else {
            vec![f64::INFINITY]
        };
        let young = if young.iter().all(|v| v.is_finite()) { young } else { argmax_profile(&a) };
        let holder: Vec<f64> = match phi_b {
            OrliczFunction::Power(pf) if pf.p() > 1.0 => {
                a.iter().map(|&x| x.powf(pf.conjugate_exponent() - 1.0)).collect()
            }
            _ => argmax_profile(&a),
        };
        let candidates = [young, holder, argmax_profile(&a), a.clone(), vec![1.0; a.len()]];
        for (profile, cand) in profiles.iter_mut().zip(candidates) {
            for (&w, v) in block.iter().zip(cand) {
                profile[w] = v;
            }
        }
    }

    let mut lower = vec![0.0f64; nblocks];
    let absorb = |x: &ModuleElement, lower: &mut Vec<f64>| -> Result<()> {
        let fx = big_f.apply(x)?;
        for (b, block) in part.blocks().iter().enumerate() {
            lower[b] = lower[b].max(fx.get(block[0]).abs());
        }
        Ok(())
    };
    for profile in profiles {
        let zeta = RandomScalar::new(space.clone(), profile)?;
        let x = aligned.scale(&zeta)?;
        let nrm = module::lux_norm_e(&x, phi, DEFAULT_TOL)?;
        let inv = nrm.values().iter().map(|&v| if v > 0.0 && v.is_finite() { 1.0 / v } else { 0.0 }).collect();
        let x = x.scale(&RandomScalar::new(space.clone(), inv)?)?;
        absorb(&x, &mut lower)?;
    }
    for x in oracle::unit_ball_sample(phi, &space, big_f.dim, samples, seed) {
        absorb(&x, &mut lower)?;
    }

    Ok(DualNormBounds {
        lower: RandomScalar::from_blocks(part, &lower)?,
        upper: RandomScalar::from_blocks(part, &upper)?,
        samples,
        seed,
    })
}

/// Per-atom comparison of `‖T f‖` against `|||f|||_{ΨO}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryCheck {
    pub block: usize,
    pub lhs_interval: [f64; 2],
    pub rhs: f64,
    pub pass: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub checks: Vec<IsometryCheck>,
    pub pass: bool,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl IsometryReport {
    /// Largest `(upper - lower) / upper` over atoms with a nonzero norm.
    pub fn max_relative_width(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.lhs_interval[1] > 0.0)
            .map(|c| (c.lhs_interval[1] - c.lhs_interval[0]) / c.lhs_interval[1])
            .fold(0.0, f64::max)
    }
}

/// Passes on an atom when `|||f|||_{ΨO}` lies in the certified interval for
/// `‖T f‖`, widened by `tol·(1 + rhs)`.
pub fn verify_isometry(f: &RandomFunctional, phi: &RandomOrliczFunction, tol: f64, samples: usize, seed: u64) -> Result<IsometryReport> {
    let big_f = t_map(f, phi)?;
    let bounds = dual_operator_norm(&big_f, phi, samples, seed)?;
    let psi = phi.random_conjugate();
    let rhs = norms::cond_orlicz_norm(&f.random_operator_norm(), &psi, DEFAULT_TOL)?;
    let checks: Vec<IsometryCheck> = phi
        .partition()
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, block)| {
            let w = block[0];
            let (lo, hi, r) = (bounds.lower.get(w), bounds.upper.get(w), rhs.get(w));
            let residual = (lo - r).max(r - hi).max(0.0);
            IsometryCheck {
                block: b,
                lhs_interval: [lo, hi],
                rhs: r,
                pass: residual <= tol * (1.0 + r),
                residual,
            }
        })
        .collect();
    Ok(IsometryReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
        tol,
        samples,
        seed,
    })
}

/// Outcome of testing whether `L_𝓕^Φ = H_𝓕^Φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delta2Report {
    /// Per-atom doubling constant, when `Φ` satisfies the Δ₂-condition.
    pub witness: Option<Vec<f64>>,
    /// Number of random `ζ` checked for heart membership.
    pub checked: usize,
    pub collapse_holds: bool,
    /// A `ζ` in the space but outside the heart, if one was constructed.
    pub separator: Option<Vec<f64>>,
    pub pass: bool,
}

/// With a Δ₂ witness, every sampled `ζ` must land in the heart. Without one,
/// try the indicator of an atom whose `φ_B` jumps to `+∞`: it lies in the
/// space but not the heart.
pub fn delta2_collapse_check(phi: &RandomOrliczFunction, count: usize, seed: u64) -> Delta2Report {
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    let part = phi.partition();
    let space = part.space().clone();
    let witness = phi.delta2_check();
    let mut checked = 0;
    let mut collapse_holds = true;
    if witness.is_some() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let values: Vec<f64> = (0..space.len())
                .map(|_| {
                    if i == 0 || rng.random::<f64>() < 0.2 {
                        0.0
                    } else {
                        rng.sample::<f64, _>(StandardNormal) * rng.sample::<f64, _>(StandardNormal).exp()
                    }
                })
                .collect();
            let z = RandomScalar::new(space.clone(), values).expect("finite samples");
            checked += 1;
            if norms::membership(&z, phi) != Membership::InHeart {
                collapse_holds = false;
            }
        }
    }
    let separator = part
        .blocks()
        .iter()
        .enumerate()
        .find(|(b, _)| phi.block_fn(*b).jump_point().is_some())
        .map(|(_, block)| RandomScalar::indicator(space.clone(), |w| block.contains(&w)))
        .filter(|z| norms::membership(z, phi) == Membership::InSpaceOnly);
    if separator.is_some() {
        collapse_holds = false;
    }
    let pass = match (&witness, &separator) {
        (Some(_), None) => collapse_holds,
        (Some(_), Some(_)) => false,
        (None, _) => true,
    };
    Delta2Report {
        witness: witness.map(|w| part.blocks().iter().map(|b| w.get(b[0])).collect()),
        checked,
        collapse_holds,
        separator: separator.map(|z| z.values().to_vec()),
        pass,
    }
}
