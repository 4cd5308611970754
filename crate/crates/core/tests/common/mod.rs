#![allow(dead_code)]

use std::sync::Arc;

use orliczkit::module::{ModuleElement, RandomFunctional};
use orliczkit::{AtomPartition, FiniteProbSpace, OrliczFunction, RandomOrliczFunction, RandomScalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(rng: &mut TestRng, max_n: usize) -> Arc<FiniteProbSpace> {
    let n = rng.random_range(1..=max_n);
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    FiniteProbSpace::from_weights(raw.iter().map(|w| w / total).collect()).unwrap()
}

pub fn partition(rng: &mut TestRng, space: &Arc<FiniteProbSpace>, max_blocks: usize) -> AtomPartition {
    let k = rng.random_range(1..=max_blocks.min(space.len()));
    let mut blocks = vec![Vec::new(); k];
    for w in 0..space.len() {
        blocks[rng.random_range(0..k)].push(w);
    }
    blocks.retain(|b| !b.is_empty());
    AtomPartition::new(space.clone(), blocks).unwrap()
}

/// Heavy-ish tailed value with an occasional exact zero.
pub fn value(rng: &mut TestRng) -> f64 {
    if rng.random::<f64>() < 0.15 {
        return 0.0;
    }
    let g: f64 = rng.sample(StandardNormal);
    let m: f64 = rng.sample(StandardNormal);
    g * m.exp()
}

pub fn scalar(rng: &mut TestRng, space: &Arc<FiniteProbSpace>) -> RandomScalar {
    RandomScalar::new(space.clone(), (0..space.len()).map(|_| value(rng)).collect()).unwrap()
}

pub fn nonneg_scalar(rng: &mut TestRng, space: &Arc<FiniteProbSpace>) -> RandomScalar {
    scalar(rng, space).abs()
}

pub fn nonzero_scalar(rng: &mut TestRng, space: &Arc<FiniteProbSpace>) -> RandomScalar {
    loop {
        let z = scalar(rng, space);
        if !z.is_zero() {
            return z;
        }
    }
}

pub fn vectors(rng: &mut TestRng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.15 {
                vec![0.0; dim]
            } else {
                let m: f64 = rng.sample::<f64, _>(StandardNormal).exp();
                (0..dim).map(|_| m * rng.sample::<f64, _>(StandardNormal)).collect()
            }
        })
        .collect()
}

pub fn element(rng: &mut TestRng, space: &Arc<FiniteProbSpace>, dim: usize) -> ModuleElement {
    ModuleElement::new(space.clone(), dim, vectors(rng, space.len(), dim)).unwrap()
}

pub fn functional(rng: &mut TestRng, space: &Arc<FiniteProbSpace>, dim: usize) -> RandomFunctional {
    RandomFunctional::new(space.clone(), vectors(rng, space.len(), dim)).unwrap()
}

/// A power function with `p` in `[lo, hi)`; `p = 1` exactly when `lo = 1`
/// and a coin lands, since a continuous draw never hits it.
pub fn power(rng: &mut TestRng, lo: f64, hi: f64) -> OrliczFunction {
    loop {
        let p = if lo == 1.0 && rng.random::<f64>() < 0.1 { 1.0 } else { rng.random_range(lo..hi) };
        if let Ok(f) = OrliczFunction::power(p, rng.random_range(0.2..3.0)) {
            return f;
        }
    }
}

/// Any family, including ones with a jump.
pub fn phi(rng: &mut TestRng) -> OrliczFunction {
    match rng.random_range(0..6) {
        0 | 1 => power(rng, 1.0, 5.0),
        2 => OrliczFunction::ExpMinusOne,
        3 => OrliczFunction::EntropyConj,
        4 => {
            let k = rng.random_range(1..=3);
            let mut bps = vec![0.0];
            let mut t = 0.0;
            for _ in 1..k {
                t += rng.random_range(0.2..2.0);
                bps.push(t);
            }
            let mut slopes = Vec::new();
            let mut s = rng.random_range(0.0..1.0);
            for _ in 0..k {
                slopes.push(s);
                s += rng.random_range(0.1..2.0);
            }
            let jump = (rng.random::<f64>() < 0.3).then(|| t + rng.random_range(0.5..3.0));
            OrliczFunction::piecewise(bps, slopes, jump).unwrap()
        }
        _ => OrliczFunction::indicator_ball(rng.random_range(0.2..3.0)).unwrap(),
    }
}

/// Families with finite values everywhere on `[0, ∞)`.
pub fn finite_phi(rng: &mut TestRng) -> OrliczFunction {
    loop {
        let f = phi(rng);
        if f.jump_point().is_none() {
            return f;
        }
    }
}

pub fn random_phi(
    rng: &mut TestRng,
    part: &AtomPartition,
    mut gen: impl FnMut(&mut TestRng) -> OrliczFunction,
) -> RandomOrliczFunction {
    let fns = (0..part.num_blocks()).map(|_| gen(rng)).collect();
    RandomOrliczFunction::new(part.clone(), fns).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
