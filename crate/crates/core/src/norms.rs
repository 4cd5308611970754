//! Luxemburg and Orlicz norms of scalar random variables, their conditional
//! (atom-wise) versions, and membership in the Orlicz space and heart.
//!
//! # Computation
//!
//! The Luxemburg norm `inf{λ > 0 : E[φ(|ζ|/λ)] ≤ 1}` is found by bisection on
//! the nonincreasing modular `λ ↦ E[φ(|ζ|/λ)]`. The returned value is always
//! the upper end of the final bracket, so the modular at the returned `λ̂` is
//! certified `≤ 1`.
//!
//! The Orlicz norm is defined as a dual supremum, which is not directly
//! computable. It is evaluated through the Amemiya form
//! `inf_{k>0} (1 + E[φ(k|ζ|)]) / k`. Substituting `u = 1/k` turns the
//! objective into `u + u·M(1/u)`, the perspective of the convex modular `M`
//! plus a linear term, which is convex in `u`; golden-section search on `u`
//! therefore converges to the global minimum. The endpoint `u = 0` stands for
//! `k → ∞` and evaluates to the recession value `E[φ'(∞)|ζ|]`.
//!
//! # Conditional norms
//!
//! For a partition 𝓕 every `λ ∈ L⁰₊₊(𝓕)` is constant on atoms and the
//! constraint `E[Φ(|ζ|/λ) | 𝓕] ≤ 1` reads, on each atom `B`, as the scalar
//! constraint under `P(· | B)` with `φ_B`. The constraints for different atoms
//! involve disjoint coordinates of `λ`, so the lattice infimum is attained by
//! taking each atom's scalar infimum. The same decoupling holds for the dual
//! supremum defining the conditional Orlicz norm, because the test functions
//! `η` may be chosen independently on each atom.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{OrliczError, Result};
use crate::json::{ExtReal, ScalarJson};
use crate::orlicz::{OrliczFunction, RandomOrliczFunction};
use crate::prob::RandomScalar;

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;
const MAX_DOUBLINGS: usize = 4000;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bisection,
    Amemiya,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormValue {
    Scalar(f64),
    Random(RandomScalar),
}

impl Serialize for NormValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Scalar(v) => ExtReal(*v).serialize(s),
            NormValue::Random(z) => ScalarJson::from_scalar(z).serialize(s),
        }
    }
}

/// A computed norm together with the solver trace that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub value: NormValue,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

impl NormReport {
    /// The scalar value; for a conditional report, the value on outcome 0.
    pub fn scalar(&self) -> f64 {
        match &self.value {
            NormValue::Scalar(v) => *v,
            NormValue::Random(z) => z.get(0),
        }
    }

    pub fn is_infinite(&self) -> bool {
        match &self.value {
            NormValue::Scalar(v) => v.is_infinite(),
            NormValue::Random(z) => !z.is_finite(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Solve {
    value: f64,
    iterations: usize,
    residual: f64,
}

impl Solve {
    fn exact(value: f64) -> Self {
        Self {
            value,
            iterations: 0,
            residual: 0.0,
        }
    }
}

fn modular(phi: &OrliczFunction, abs_values: &[f64], weights: &[f64], scale: f64) -> f64 {
    let mut acc = 0.0;
    for (&a, &w) in abs_values.iter().zip(weights) {
        if a == 0.0 {
            continue;
        }
        let v = phi.value(a * scale);
        if v.is_infinite() {
            return f64::INFINITY;
        }
        acc += w * v;
    }
    acc
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(OrliczError::InvalidValue(format!("tolerance {tol} must be > 0")))
    }
}

/// Luxemburg gauge of nonnegative `abs_values` under probabilities `weights`.
fn luxemburg_weighted(abs_values: &[f64], weights: &[f64], phi: &OrliczFunction, tol: f64) -> Result<Solve> {
    let amax = abs_values.iter().copied().fold(0.0, f64::max);
    if amax == 0.0 {
        return Ok(Solve::exact(0.0));
    }
    if amax.is_infinite() {
        return Ok(Solve::exact(f64::INFINITY));
    }
    let feasible = |lambda: f64| modular(phi, abs_values, weights, 1.0 / lambda) <= 1.0;

    // Below amax/t* some outcome lands beyond the jump, so the modular is +∞.
    let mut lo = match phi.jump_point() {
        Some(t_star) => {
            let lo = amax / t_star;
            if feasible(lo) {
                return Ok(Solve::exact(lo));
            }
            lo
        }
        None => 0.0,
    };
    let mut hi = amax.max(2.0 * lo);
    let mut doublings = 0;
    while !feasible(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || hi.is_infinite() {
            return Err(OrliczError::NoConvergence {
                iterations: doublings,
                lo,
                hi,
            });
        }
    }
    let mut iterations = 0;
    while hi - lo > tol * hi {
        if iterations >= MAX_ITER {
            return Err(OrliczError::NoConvergence { iterations, lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(Solve {
        value: hi,
        iterations,
        residual: hi - lo,
    })
}

/// Amemiya objective in the variable `u = 1/k`.
fn amemiya_objective(phi: &OrliczFunction, abs_values: &[f64], weights: &[f64], u: f64) -> f64 {
    if u == 0.0 {
        let slope = phi.asymptotic_slope();
        let mean: f64 = abs_values.iter().zip(weights).map(|(a, w)| a * w).sum();
        return if slope.is_infinite() { f64::INFINITY } else { slope * mean };
    }
    let m = modular(phi, abs_values, weights, 1.0 / u);
    u * (1.0 + m)
}

fn orlicz_weighted(abs_values: &[f64], weights: &[f64], phi: &OrliczFunction, tol: f64) -> Result<Solve> {
    let amax = abs_values.iter().copied().fold(0.0, f64::max);
    if amax == 0.0 {
        return Ok(Solve::exact(0.0));
    }
    if amax.is_infinite() {
        return Ok(Solve::exact(f64::INFINITY));
    }
    let g = |u: f64| amemiya_objective(phi, abs_values, weights, u);

    let u_min = phi.jump_point().map_or(0.0, |t_star| amax / t_star);
    // g(u) ≥ u everywhere, and at the Luxemburg norm λ the modular is ≤ 1, so
    // no minimizer lies beyond g(λ) ≤ 2λ.
    let lux = luxemburg_weighted(abs_values, weights, phi, tol)?.value;
    let u_max = g(lux).max(u_min);

    let mut best = g(u_min).min(g(u_max));
    let (mut a, mut b) = (u_min, u_max);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    let mut iterations = 0;
    while b - a > tol * u_max {
        if iterations >= MAX_ITER {
            return Err(OrliczError::NoConvergence {
                iterations,
                lo: a,
                hi: b,
            });
        }
        best = best.min(f1).min(f2);
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2);
        }
        iterations += 1;
    }
    best = best.min(f1).min(f2);
    Ok(Solve {
        value: best,
        iterations,
        residual: b - a,
    })
}

fn abs_values(z: &RandomScalar) -> Vec<f64> {
    z.values().iter().map(|v| v.abs()).collect()
}

fn scalar_report(solve: Solve, method: Method) -> NormReport {
    NormReport {
        value: NormValue::Scalar(solve.value),
        method,
        iterations: solve.iterations,
        residual: solve.residual,
    }
}

/// `|ζ|_{φL} = inf{λ > 0 : E[φ(|ζ|/λ)] ≤ 1}`.
pub fn luxemburg_norm(z: &RandomScalar, phi: &OrliczFunction, tol: f64) -> Result<f64> {
    luxemburg_report(z, phi, tol).map(|r| r.scalar())
}

pub fn luxemburg_report(z: &RandomScalar, phi: &OrliczFunction, tol: f64) -> Result<NormReport> {
    check_tol(tol)?;
    let solve = luxemburg_weighted(&abs_values(z), z.space().weights(), phi, tol)?;
    Ok(scalar_report(solve, Method::Bisection))
}

/// `|ζ|_{φO} = sup{|E[ζη]| : |η|_{ψL} ≤ 1}`, via the Amemiya form.
pub fn orlicz_norm(z: &RandomScalar, phi: &OrliczFunction, tol: f64) -> Result<f64> {
    orlicz_report(z, phi, tol).map(|r| r.scalar())
}

pub fn orlicz_report(z: &RandomScalar, phi: &OrliczFunction, tol: f64) -> Result<NormReport> {
    check_tol(tol)?;
    let solve = orlicz_weighted(&abs_values(z), z.space().weights(), phi, tol)?;
    Ok(scalar_report(solve, Method::Amemiya))
}

type Solver = fn(&[f64], &[f64], &OrliczFunction, f64) -> Result<Solve>;

fn conditional(z: &RandomScalar, phi: &RandomOrliczFunction, tol: f64, solver: Solver, method: Method) -> Result<NormReport> {
    check_tol(tol)?;
    phi.check_scalar(z)?;
    let part = phi.partition();
    let mut per_block = Vec::with_capacity(part.num_blocks());
    let mut iterations = 0;
    let mut residual: f64 = 0.0;
    for (b, block) in part.blocks().iter().enumerate() {
        let vals: Vec<f64> = block.iter().map(|&w| z.get(w).abs()).collect();
        let solve = solver(&vals, &part.conditional_weights(b), phi.block_fn(b), tol)?;
        per_block.push(solve.value);
        iterations = iterations.max(solve.iterations);
        residual = residual.max(solve.residual);
    }
    Ok(NormReport {
        value: NormValue::Random(RandomScalar::from_blocks(part, &per_block)?),
        method,
        iterations,
        residual,
    })
}

/// `|ζ|_{ΦL}`, the 𝓕-measurable conditional Luxemburg norm.
pub fn cond_luxemburg_norm(z: &RandomScalar, phi: &RandomOrliczFunction, tol: f64) -> Result<RandomScalar> {
    match cond_luxemburg_report(z, phi, tol)?.value {
        NormValue::Random(r) => Ok(r),
        NormValue::Scalar(_) => unreachable!(),
    }
}

pub fn cond_luxemburg_report(z: &RandomScalar, phi: &RandomOrliczFunction, tol: f64) -> Result<NormReport> {
    conditional(z, phi, tol, luxemburg_weighted, Method::Bisection)
}

/// `|ζ|_{ΦO}`, the 𝓕-measurable conditional Orlicz norm.
pub fn cond_orlicz_norm(z: &RandomScalar, phi: &RandomOrliczFunction, tol: f64) -> Result<RandomScalar> {
    match cond_orlicz_report(z, phi, tol)?.value {
        NormValue::Random(r) => Ok(r),
        NormValue::Scalar(_) => unreachable!(),
    }
}

pub fn cond_orlicz_report(z: &RandomScalar, phi: &RandomOrliczFunction, tol: f64) -> Result<NormReport> {
    conditional(z, phi, tol, orlicz_weighted, Method::Amemiya)
}

/// Lower bound on `|ζ|_{φO}` from explicit test functions `η`, each rescaled
/// to `|η|_{ψL} = 1`: the Hölder-type profile `sgn(ζ)|ζ|^{p-1}` for power
/// families (`sgn ζ` for `p = 1`) plus `samples` random profiles.
pub fn orlicz_norm_oracle(z: &RandomScalar, phi: &OrliczFunction, samples: usize, seed: u64) -> Result<NormReport> {
    let psi = phi.conjugate();
    let n = z.len();
    let weights = z.space().weights();
    let pairing = |eta: &[f64]| -> Result<f64> {
        let eta_rs = RandomScalar::new(z.space().clone(), eta.to_vec())?;
        let gauge = luxemburg_norm(&eta_rs, &psi, DEFAULT_TOL)?;
        if gauge == 0.0 || gauge.is_infinite() {
            return Ok(0.0);
        }
        let e: f64 = z
            .values()
            .iter()
            .zip(eta)
            .zip(weights)
            .map(|((a, b), w)| a * b * w)
            .sum();
        Ok((e / gauge).abs())
    };
    if z.is_zero() {
        return Ok(scalar_report(Solve::exact(0.0), Method::Oracle));
    }
    if !z.is_finite() {
        return Ok(scalar_report(Solve::exact(f64::INFINITY), Method::Oracle));
    }
    let sgn = |v: f64| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 };
    let mut best: f64 = 0.0;
    if let OrliczFunction::Power(pf) = phi {
        let eta: Vec<f64> = z
            .values()
            .iter()
            .map(|&v| sgn(v) * v.abs().powf(pf.p() - 1.0))
            .collect();
        best = best.max(pairing(&eta)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let eta: Vec<f64> = (0..n).map(|w| sgn(z.get(w)) * rng.random::<f64>()).collect();
        best = best.max(pairing(&eta)?);
    }
    Ok(NormReport {
        value: NormValue::Scalar(best),
        method: Method::Oracle,
        iterations: samples,
        residual: 0.0,
    })
}

/// Where `ζ` sits relative to `L_𝓕^Φ` and its heart `H_𝓕^Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// `E[Φ(d|ζ|) | 𝓕]` is finite for every `d ∈ L⁰₊₊(𝓕)`.
    InHeart,
    /// Finite for some `d` but not all.
    InSpaceOnly,
    /// Finite for no `d`.
    Outside,
}

/// On a finite space a finite `ζ` always has a finite modular for small
/// enough `d`; the modular blows up for large `d` exactly on atoms where `φ_B`
/// jumps to `+∞` and `ζ` is nonzero. Only `+∞` values put `ζ` outside.
pub fn membership(z: &RandomScalar, phi: &RandomOrliczFunction) -> Membership {
    if !z.is_finite() {
        return Membership::Outside;
    }
    let part = phi.partition();
    let jumps_on_support = part.blocks().iter().enumerate().any(|(b, block)| {
        phi.block_fn(b).jump_point().is_some() && block.iter().any(|&w| z.get(w) != 0.0)
    });
    if jumps_on_support {
        Membership::InSpaceOnly
    } else {
        Membership::InHeart
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{AtomPartition, FiniteProbSpace};
    use approx::assert_relative_eq;

    fn two_point() -> RandomScalar {
        RandomScalar::new(FiniteProbSpace::uniform(2).unwrap(), vec![1.0, 3.0]).unwrap()
    }

    fn power(p: f64) -> OrliczFunction {
        OrliczFunction::power(p, 1.0).unwrap()
    }

    #[test]
    fn zero_variable_has_zero_norms() {
        let z = RandomScalar::zeros(FiniteProbSpace::uniform(3).unwrap());
        for phi in [power(2.0), OrliczFunction::indicator_ball(1.0).unwrap()] {
            assert_eq!(luxemburg_norm(&z, &phi, DEFAULT_TOL).unwrap(), 0.0);
            assert_eq!(orlicz_norm(&z, &phi, DEFAULT_TOL).unwrap(), 0.0);
            assert_eq!(orlicz_norm_oracle(&z, &phi, 10, 1).unwrap().scalar(), 0.0);
        }
    }

    #[test]
    fn luxemburg_examples() {
        let z = two_point();
        assert_relative_eq!(luxemburg_norm(&z, &power(2.0), DEFAULT_TOL).unwrap(), 5f64.sqrt(), max_relative = 1e-11);
        assert_relative_eq!(luxemburg_norm(&z, &power(1.0), DEFAULT_TOL).unwrap(), 2.0, max_relative = 1e-11);
        let ball = OrliczFunction::indicator_ball(1.0).unwrap();
        assert_eq!(luxemburg_norm(&z, &ball, DEFAULT_TOL).unwrap(), 3.0);
    }

    #[test]
    fn luxemburg_report_certifies_feasibility() {
        let z = two_point();
        for phi in [power(2.0), power(3.5), OrliczFunction::ExpMinusOne, OrliczFunction::EntropyConj] {
            let r = luxemburg_report(&z, &phi, 1e-10).unwrap();
            let lam = r.scalar();
            assert!(r.residual <= 1e-10 * (1.0 + lam));
            let m = 0.5 * phi.value(1.0 / lam) + 0.5 * phi.value(3.0 / lam);
            assert!(m <= 1.0, "{phi:?}: modular {m}");
        }
    }

    #[test]
    fn orlicz_examples() {
        let z = two_point();
        assert_relative_eq!(orlicz_norm(&z, &power(2.0), DEFAULT_TOL).unwrap(), 2.0 * 5f64.sqrt(), max_relative = 1e-9);
        assert_eq!(orlicz_norm(&z, &power(1.0), DEFAULT_TOL).unwrap(), 2.0);
        let ball = OrliczFunction::indicator_ball(1.0).unwrap();
        assert_relative_eq!(orlicz_norm(&z, &ball, DEFAULT_TOL).unwrap(), 3.0, max_relative = 1e-9);
    }

    #[test]
    fn oracle_examples() {
        let z = two_point();
        let r = orlicz_norm_oracle(&z, &power(1.0), 50, 7).unwrap();
        assert_relative_eq!(r.scalar(), 2.0, max_relative = 1e-10);
        let exact = orlicz_norm(&z, &power(2.0), DEFAULT_TOL).unwrap();
        let r = orlicz_norm_oracle(&z, &power(2.0), 50, 7).unwrap();
        assert!(r.scalar() <= exact * (1.0 + 1e-9));
        assert_relative_eq!(r.scalar(), exact, max_relative = 1e-3);
    }

    #[test]
    fn infinite_values_give_infinite_norms() {
        let z = RandomScalar::new(FiniteProbSpace::uniform(2).unwrap(), vec![1.0, f64::INFINITY]).unwrap();
        assert_eq!(luxemburg_norm(&z, &power(2.0), DEFAULT_TOL).unwrap(), f64::INFINITY);
        assert_eq!(orlicz_norm(&z, &power(2.0), DEFAULT_TOL).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(luxemburg_norm(&two_point(), &power(2.0), 0.0).is_err());
        assert!(orlicz_norm(&two_point(), &power(2.0), f64::NAN).is_err());
    }

    #[test]
    fn conditional_examples() {
        let s = FiniteProbSpace::uniform(4).unwrap();
        let part = AtomPartition::new(s.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let z = RandomScalar::new(s.clone(), vec![1.0, 3.0, 2.0, 6.0]).unwrap();
        let phi = RandomOrliczFunction::uniform(part.clone(), power(2.0));
        let lux = cond_luxemburg_norm(&z, &phi, DEFAULT_TOL).unwrap();
        let expect = [5f64.sqrt(), 5f64.sqrt(), 20f64.sqrt(), 20f64.sqrt()];
        for (a, b) in lux.values().iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-11);
        }
        let orl = cond_orlicz_norm(&z, &phi, DEFAULT_TOL).unwrap();
        for (a, b) in orl.values().iter().zip(expect) {
            assert_relative_eq!(*a, 2.0 * b, max_relative = 1e-9);
        }

        let id = RandomOrliczFunction::uniform(part.clone(), OrliczFunction::identity());
        let lux = cond_luxemburg_norm(&z, &id, DEFAULT_TOL).unwrap();
        let ce = z.abs().cond_expectation(&part).unwrap();
        for (a, b) in lux.values().iter().zip(ce.values()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-11);
        }

        let zero = RandomScalar::zeros(s);
        assert!(cond_orlicz_norm(&zero, &phi, DEFAULT_TOL).unwrap().is_zero());
    }

    #[test]
    fn single_block_matches_unconditional_exactly() {
        let z = RandomScalar::new(FiniteProbSpace::from_weights(vec![0.2, 0.3, 0.5]).unwrap(), vec![1.0, -2.0, 0.5]).unwrap();
        for phi in [power(2.5), OrliczFunction::ExpMinusOne, OrliczFunction::indicator_ball(0.7).unwrap()] {
            let big = RandomOrliczFunction::uniform(AtomPartition::trivial(z.space().clone()), phi.clone());
            let l = luxemburg_norm(&z, &phi, DEFAULT_TOL).unwrap();
            let o = orlicz_norm(&z, &phi, DEFAULT_TOL).unwrap();
            assert!(cond_luxemburg_norm(&z, &big, DEFAULT_TOL).unwrap().values().iter().all(|&v| v == l));
            assert!(cond_orlicz_norm(&z, &big, DEFAULT_TOL).unwrap().values().iter().all(|&v| v == o));
        }
    }

    #[test]
    fn membership_examples() {
        let s = FiniteProbSpace::uniform(2).unwrap();
        let part = AtomPartition::trivial(s.clone());
        let z = RandomScalar::new(s.clone(), vec![1.0, 3.0]).unwrap();
        let pow = RandomOrliczFunction::uniform(part.clone(), power(2.0));
        let ball = RandomOrliczFunction::uniform(part.clone(), OrliczFunction::indicator_ball(1.0).unwrap());
        assert_eq!(membership(&z, &pow), Membership::InHeart);
        assert_eq!(membership(&z, &ball), Membership::InSpaceOnly);
        assert_eq!(membership(&RandomScalar::zeros(s.clone()), &ball), Membership::InHeart);
        let inf = RandomScalar::new(s, vec![1.0, f64::INFINITY]).unwrap();
        assert_eq!(membership(&inf, &pow), Membership::Outside);
    }

    #[test]
    fn report_serializes() {
        let r = luxemburg_report(&two_point(), &power(2.0), 1e-9).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "bisection");
        assert!(v["residual"].as_f64().unwrap() < 1e-8);
    }
}
