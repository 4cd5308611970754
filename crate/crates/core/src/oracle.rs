//! Brute-force reference computations used to cross-check the main solvers.
//!
//! Nothing here calls into [`crate::norms`]: the gauge used to normalize test
//! functions is a separate plain bisection, and conjugates are evaluated by
//! grid search. All randomness is drawn from a seeded ChaCha stream.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::module::ModuleElement;
use crate::orlicz::{OrliczFunction, RandomOrliczFunction};
use crate::prob::{FiniteProbSpace, RandomScalar};

/// `max_{t ∈ grid} (st - φ(t))`, clamped below at 0, over a linear grid and a
/// geometric grid on `[0, t_max]` plus the kinks and jump point of `φ`.
///
/// Every grid point is feasible for the supremum, so this never exceeds the
/// true conjugate.
pub fn grid_conjugate(phi: &OrliczFunction, s: f64, resolution: usize, t_max: f64) -> f64 {
    let res = resolution.max(2);
    let mut best: f64 = 0.0;
    let mut probe = |t: f64| {
        if (0.0..=t_max).contains(&t) {
            let v = phi.value(t);
            if v.is_finite() {
                best = best.max(s * t - v);
            }
        }
    };
    let last = (res - 1) as f64;
    for i in 0..res {
        let frac = i as f64 / last;
        probe(t_max * frac);
        probe(t_max * 10f64.powf(-12.0 * (1.0 - frac)));
    }
    let mut special: Vec<f64> = Vec::new();
    if let OrliczFunction::PiecewiseLinear(pl) = phi {
        special.extend_from_slice(pl.breakpoints());
    }
    special.extend(phi.jump_point());
    for t in special {
        for f in [1.0 - 1e-9, 1.0, 1.0 + 1e-9] {
            probe(t * f);
        }
    }
    best
}

/// Luxemburg gauge by plain bracketing and a fixed number of halvings.
fn gauge(values: &[f64], weights: &[f64], phi: &OrliczFunction) -> f64 {
    if values.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let modular = |lambda: f64| -> f64 {
        values
            .iter()
            .zip(weights)
            .map(|(&v, &w)| if v == 0.0 { 0.0 } else { w * phi.value(v / lambda) })
            .sum()
    };
    let mut hi = 1.0;
    let mut guard = 0;
    while modular(hi) > 1.0 && guard < 2000 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = hi;
    guard = 0;
    while modular(lo) <= 1.0 && guard < 2000 {
        lo *= 0.5;
        guard += 1;
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Lower bound on the Orlicz norm `sup{|E[ζη]| : |η|_{ψL} ≤ 1}` by randomized
/// hill climbing over `η`, keeping the best value seen.
///
/// `η` is restricted to `sgn(ζ)·(nonnegative)`, which loses nothing since
/// flipping a sign of `η` against `ζ` only lowers the pairing. The objective
/// is a ratio of a linear function to a gauge, hence quasi-concave, so local
/// ascent does not get trapped.
pub fn dual_sup_norm(z: &RandomScalar, phi: &OrliczFunction, trials: usize, seed: u64) -> f64 {
    let psi = phi.conjugate();
    let weights = z.space().weights();
    let a: Vec<f64> = z.values().iter().map(|v| v.abs()).collect();
    if a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    if a.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    let objective = |eta: &[f64]| -> f64 {
        let g = gauge(eta, weights, &psi);
        if g == 0.0 || !g.is_finite() {
            return 0.0;
        }
        a.iter().zip(eta).zip(weights).map(|((x, e), w)| x * e * w).sum::<f64>() / g
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur: Vec<f64> = a.iter().map(|&v| if v > 0.0 { rng.random::<f64>() } else { 0.0 }).collect();
    let mut cur_val = objective(&cur);
    let mut best = cur_val;
    let mut sigma = 0.3;
    for _ in 1..trials.max(1) {
        let scale = cur.iter().copied().fold(0.0, f64::max).max(1e-300);
        let cand: Vec<f64> = cur
            .iter()
            .zip(&a)
            .map(|(&c, &v)| {
                if v == 0.0 {
                    0.0
                } else {
                    let step: f64 = rng.sample(StandardNormal);
                    (c + sigma * scale * step).max(0.0)
                }
            })
            .collect();
        let val = objective(&cand);
        if val > cur_val {
            cur = cand;
            cur_val = val;
            sigma = (sigma * 1.5).min(1.0);
        } else {
            sigma = (sigma * 0.9).max(1e-12);
        }
        best = best.max(val);
    }
    best
}

/// `count` random elements of `E = L⁰(ℝ^d)` with `|||x|||_{ΦL} ≤ 1`, each
/// scaled so that the conditional gauge is 1 on every atom where `x ≠ θ`.
pub fn unit_ball_sample(
    phi: &RandomOrliczFunction,
    space: &Arc<FiniteProbSpace>,
    dim: usize,
    count: usize,
    seed: u64,
) -> Vec<ModuleElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let part = phi.partition();
    let n = space.len();
    let cond_weights: Vec<Vec<f64>> = (0..part.num_blocks()).map(|b| part.conditional_weights(b)).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut data = vec![0.0; n * dim];
        for v in data.chunks_mut(dim) {
            if rng.random::<f64>() < 0.2 {
                continue;
            }
            let magnitude = rng.sample::<f64, _>(StandardNormal).exp();
            for a in v.iter_mut() {
                *a = magnitude * rng.sample::<f64, _>(StandardNormal);
            }
        }
        let block_norms = |data: &[f64], b: usize| -> Vec<f64> {
            part.blocks()[b]
                .iter()
                .map(|&w| data[w * dim..(w + 1) * dim].iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect()
        };
        for (b, block) in part.blocks().iter().enumerate() {
            let g = gauge(&block_norms(&data, b), &cond_weights[b], phi.block_fn(b));
            if g > 0.0 && g.is_finite() {
                for &w in block {
                    data[w * dim..(w + 1) * dim].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        // Re-check; shave off rounding if a block landed a hair outside.
        let mut ok = true;
        for (b, block) in part.blocks().iter().enumerate() {
            let mut tries = 0;
            while gauge(&block_norms(&data, b), &cond_weights[b], phi.block_fn(b)) > 1.0 + 1e-9 {
                for &w in block {
                    data[w * dim..(w + 1) * dim].iter_mut().for_each(|x| *x *= 1.0 - 1e-9);
                }
                tries += 1;
                if tries > 10 {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(ModuleElement::from_flat(space.clone(), dim, data));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::AtomPartition;
    use approx::assert_relative_eq;

    #[test]
    fn grid_conjugate_examples() {
        for phi in [OrliczFunction::power(2.0, 1.0).unwrap(), OrliczFunction::ExpMinusOne] {
            assert_eq!(grid_conjugate(&phi, 0.0, 100, 10.0), 0.0);
        }
        let sq = OrliczFunction::power(2.0, 1.0).unwrap();
        assert_relative_eq!(grid_conjugate(&sq, 2.0, 100_000, 10.0), 1.0, max_relative = 1e-4);
        let ball = OrliczFunction::indicator_ball(1.0).unwrap();
        assert_eq!(grid_conjugate(&ball, 3.0, 1000, 10.0), 3.0);
    }

    #[test]
    fn dual_sup_power_two() {
        let s = FiniteProbSpace::from_weights(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let z = RandomScalar::new(s, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let phi = OrliczFunction::power(2.0, 1.0).unwrap();
        let l2: f64 = (0.1 * 1.0 + 0.2 * 4.0 + 0.3 * 0.25 + 0.4 * 9.0_f64).sqrt();
        let v = dual_sup_norm(&z, &phi, 10_000, 3);
        assert!(v <= 2.0 * l2 * (1.0 + 1e-9));
        assert_relative_eq!(v, 2.0 * l2, max_relative = 1e-3);
    }

    #[test]
    fn dual_sup_monotone_in_trials() {
        let z = RandomScalar::new(FiniteProbSpace::uniform(3).unwrap(), vec![1.0, 0.0, 2.0]).unwrap();
        let phi = OrliczFunction::ExpMinusOne;
        let mut prev = 0.0;
        for trials in [1, 10, 100, 1000] {
            let v = dual_sup_norm(&z, &phi, trials, 11);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn unit_ball_sample_respects_count_and_bound() {
        let s = FiniteProbSpace::uniform(5).unwrap();
        let part = AtomPartition::new(s.clone(), vec![vec![0, 1], vec![2, 3, 4]]).unwrap();
        let phi = RandomOrliczFunction::new(
            part.clone(),
            vec![OrliczFunction::power(3.0, 1.0).unwrap(), OrliczFunction::indicator_ball(2.0).unwrap()],
        )
        .unwrap();
        let xs = unit_ball_sample(&phi, &s, 2, 37, 5);
        assert_eq!(xs.len(), 37);
        for x in &xs {
            let nrm = crate::module::lux_norm_e(x, &phi, 1e-12).unwrap();
            assert!(nrm.values().iter().all(|&v| v <= 1.0 + 1e-9));
        }
    }
}
