//! Seeded random instances for the verification suites.

use std::sync::Arc;

use orliczkit::module::RandomFunctional;
use orliczkit::{AtomPartition, FiniteProbSpace, OrliczFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn space(rng: &mut ChaCha8Rng, max_n: usize) -> Arc<FiniteProbSpace> {
    let n = rng.random_range(1..=max_n);
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    FiniteProbSpace::from_weights(raw.iter().map(|w| w / total).collect()).expect("normalized weights")
}

pub fn partition(rng: &mut ChaCha8Rng, space: &Arc<FiniteProbSpace>, max_blocks: usize) -> AtomPartition {
    let k = rng.random_range(1..=max_blocks.min(space.len()));
    let mut blocks = vec![Vec::new(); k];
    for w in 0..space.len() {
        blocks[rng.random_range(0..k)].push(w);
    }
    blocks.retain(|b| !b.is_empty());
    AtomPartition::new(space.clone(), blocks).expect("covering partition")
}

/// Signed log-uniform magnitude in `[e^-2, e^2]`, zero with probability 0.15.
pub fn value(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<f64>() < 0.15 {
        return 0.0;
    }
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    sign * rng.random_range(-2.0f64..2.0).exp()
}

pub fn values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| value(rng)).collect()
}

pub fn vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| values(rng, dim)).collect()
}

pub fn functional(rng: &mut ChaCha8Rng, space: &Arc<FiniteProbSpace>, dim: usize) -> RandomFunctional {
    RandomFunctional::new(space.clone(), vectors(rng, space.len(), dim)).expect("finite covectors")
}

/// `t^p` with `p` uniform in `[p_min, p_max]`, redrawn until the conjugate
/// is representable.
pub fn power(rng: &mut ChaCha8Rng, p_min: f64, p_max: f64) -> OrliczFunction {
    loop {
        let p = if p_min == p_max { p_min } else { rng.random_range(p_min..=p_max) };
        if let Ok(phi) = OrliczFunction::power(p, 1.0) {
            return phi;
        }
    }
}

pub fn any_family(rng: &mut ChaCha8Rng) -> OrliczFunction {
    match rng.random_range(0..5) {
        0 => power(rng, 1.0, 5.0),
        1 => OrliczFunction::ExpMinusOne,
        2 => OrliczFunction::EntropyConj,
        3 => {
            let jump = rng.random::<bool>().then(|| rng.random_range(3.0..5.0));
            OrliczFunction::piecewise(vec![0.0, 1.0, 2.0], vec![0.5, 1.0 + rng.random::<f64>(), 3.0], jump)
                .expect("valid breakpoints")
        }
        _ => OrliczFunction::indicator_ball(rng.random_range(0.5..2.0)).expect("positive radius"),
    }
}

pub fn family_name(phi: &OrliczFunction) -> String {
    match phi {
        OrliczFunction::Power(pf) => format!("power(p={}, c={})", pf.p(), pf.c()),
        OrliczFunction::ExpMinusOne => "exp_minus_one".into(),
        OrliczFunction::EntropyConj => "entropy_conj".into(),
        OrliczFunction::PiecewiseLinear(_) => "piecewise".into(),
        OrliczFunction::IndicatorBall(b) => format!("indicator_ball(r={})", b.radius()),
    }
}
