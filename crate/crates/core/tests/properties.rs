//! Randomized invariants. Instances are generated from a proptest-drawn
//! seed so each failing case shrinks to a single reproducible seed.

mod common;

use orliczkit::duality::{dual_operator_norm, t_map, verify_isometry};
use orliczkit::json::PhiJson;
use orliczkit::module::{lux_norm_e, orlicz_norm_e, truncation_sequence};
use orliczkit::norms::{
    cond_luxemburg_norm, cond_orlicz_norm, luxemburg_norm, orlicz_norm, orlicz_norm_oracle, DEFAULT_TOL,
};
use orliczkit::oracle::dual_sup_norm;
use orliczkit::{AtomPartition, OrliczFunction, RandomOrliczFunction, RandomScalar};
use common::close;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x0c11c2),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn conjugate_matches_grid_oracle(seed in any::<u64>(), s in 0.0f64..3.0) {
        let mut r = common::rng(seed);
        let phi = match r.random_range(0..5) {
            0 => OrliczFunction::power(r.random_range(1.5..5.0), r.random_range(0.5..3.0)).unwrap(),
            1 => OrliczFunction::ExpMinusOne,
            2 => OrliczFunction::EntropyConj,
            3 => OrliczFunction::indicator_ball(r.random_range(0.2..3.0)).unwrap(),
            _ => OrliczFunction::piecewise(vec![0.0, 1.0, 2.5], vec![0.5, 1.5, 4.0], Some(6.0)).unwrap(),
        };
        let exact = phi.conjugate().eval(s).unwrap();
        let grid = phi.conjugate_oracle(s, 100_000, 100.0);
        prop_assert!(grid <= exact + 1e-12 * (1.0 + exact));
        prop_assert!(close(grid, exact, 1e-4), "{:?} s={}: grid {} exact {}", phi, s, grid, exact);
    }

    #[test]
    fn biconjugate_evaluates_identically(seed in any::<u64>(), t in 0.0f64..10.0) {
        let mut r = common::rng(seed);
        let phi = common::phi(&mut r);
        let back = phi.conjugate().conjugate();
        prop_assert_eq!(back.eval(t).unwrap().to_bits(), phi.eval(t).unwrap().to_bits());
    }

    #[test]
    fn orlicz_fn_monotone_and_convex(seed in any::<u64>(), a in 0.0f64..6.0, b in 0.0f64..6.0, lam in 0.0f64..1.0) {
        let mut r = common::rng(seed);
        let phi = common::phi(&mut r);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (flo, fhi) = (phi.eval(lo).unwrap(), phi.eval(hi).unwrap());
        prop_assert!(flo <= fhi);
        let mid = phi.eval(lam * lo + (1.0 - lam) * hi).unwrap();
        let chord = lam * flo + (1.0 - lam) * fhi;
        prop_assert!(mid <= chord + 1e-12 * (1.0 + chord.abs()));
    }

    #[test]
    fn delta2_witness_is_valid(seed in any::<u64>(), t in 0.0f64..50.0) {
        let mut r = common::rng(seed);
        let phi = common::phi(&mut r);
        if let Some(k) = phi.doubling_constant() {
            let lhs = phi.eval(2.0 * t).unwrap();
            let rhs = k * phi.eval(t).unwrap();
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs), "{:?}: phi(2t)={} K phi(t)={}", phi, lhs, rhs);
        }
    }

    #[test]
    fn phi_json_round_trip(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let phi = common::phi(&mut r);
        let text = serde_json::to_string(&phi).unwrap();
        let back: OrliczFunction = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &phi);
        let _: PhiJson = serde_json::from_str(&text).unwrap();
    }

    #[test]
    fn cond_expectation_is_f_linear(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 8);
        let part = common::partition(&mut r, &space, 4);
        let z = common::scalar(&mut r, &space);
        let xi: Vec<f64> = (0..part.num_blocks()).map(|_| common::value(&mut r)).collect();
        let xi = RandomScalar::from_blocks(&part, &xi).unwrap();
        let lhs = xi.mul(&z).unwrap().cond_expectation(&part).unwrap();
        let rhs = xi.mul(&z.cond_expectation(&part).unwrap()).unwrap();
        prop_assert!(lhs.is_measurable(&part));
        for w in 0..space.len() {
            prop_assert!(close(lhs.get(w), rhs.get(w), 1e-12), "{} vs {}", lhs.get(w), rhs.get(w));
        }
    }

    #[test]
    fn prob_exceeds_nonincreasing(seed in any::<u64>(), e1 in 0.0f64..5.0, e2 in 0.0f64..5.0) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 8);
        let z = common::scalar(&mut r, &space);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(z.prob_exceeds(hi) <= z.prob_exceeds(lo));
    }

    #[test]
    fn lux_orlicz_sandwich(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 8);
        let phi = common::phi(&mut r);
        let z = common::scalar(&mut r, &space);
        let lux = luxemburg_norm(&z, &phi, DEFAULT_TOL).unwrap();
        let orl = orlicz_norm(&z, &phi, DEFAULT_TOL).unwrap();
        prop_assert!(lux <= orl * (1.0 + 1e-9) + 1e-300, "{:?}: lux {} orl {}", phi, lux, orl);
        prop_assert!(orl <= 2.0 * lux * (1.0 + 1e-9), "{:?}: lux {} orl {}", phi, lux, orl);
        prop_assert_eq!(lux == 0.0, z.is_zero());
    }

    #[test]
    fn holder_type_bound(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 8);
        let part = common::partition(&mut r, &space, 3);
        let phi = common::random_phi(&mut r, &part, common::phi);
        let psi = phi.random_conjugate();
        let z = common::scalar(&mut r, &space);
        let eta = common::scalar(&mut r, &space);
        let lhs = z.mul(&eta).unwrap().cond_expectation(&part).unwrap();
        let a = cond_luxemburg_norm(&z, &phi, DEFAULT_TOL).unwrap();
        let b = cond_orlicz_norm(&eta, &psi, DEFAULT_TOL).unwrap();
        for w in 0..space.len() {
            let bound = a.get(w) * b.get(w);
            prop_assert!(lhs.get(w).abs() <= bound + 1e-9 * (1.0 + bound), "{} > {}", lhs.get(w).abs(), bound);
        }
    }

    #[test]
    fn single_block_matches_unconditional(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 8);
        let phi = common::phi(&mut r);
        let z = common::scalar(&mut r, &space);
        let big = RandomOrliczFunction::uniform(AtomPartition::trivial(space.clone()), phi.clone());
        let lux = luxemburg_norm(&z, &phi, DEFAULT_TOL).unwrap();
        let orl = orlicz_norm(&z, &phi, DEFAULT_TOL).unwrap();
        let clux = cond_luxemburg_norm(&z, &big, DEFAULT_TOL).unwrap();
        let corl = cond_orlicz_norm(&z, &big, DEFAULT_TOL).unwrap();
        for w in 0..space.len() {
            prop_assert_eq!(clux.get(w).to_bits(), lux.to_bits());
            prop_assert_eq!(corl.get(w).to_bits(), orl.to_bits());
        }
    }

    #[test]
    fn module_norm_axioms(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 6);
        let dim = r.random_range(1..=3);
        let part = common::partition(&mut r, &space, 3);
        let phi = common::random_phi(&mut r, &part, common::phi);
        let x = common::element(&mut r, &space, dim);
        let y = common::element(&mut r, &space, dim);
        let c: Vec<f64> = (0..part.num_blocks()).map(|_| r.random_range(-4.0..4.0)).collect();
        let c = RandomScalar::from_blocks(&part, &c).unwrap();
        for norm in [lux_norm_e, orlicz_norm_e] {
            let nx = norm(&x, &phi, DEFAULT_TOL).unwrap();
            let ny = norm(&y, &phi, DEFAULT_TOL).unwrap();
            let nsum = norm(&x.add(&y).unwrap(), &phi, DEFAULT_TOL).unwrap();
            let ncx = norm(&x.scale(&c).unwrap(), &phi, DEFAULT_TOL).unwrap();
            prop_assert!(nx.is_measurable(&part) && nx.is_nonnegative());
            for (b, block) in part.blocks().iter().enumerate() {
                let w = block[0];
                let zero_on_block = block.iter().all(|&v| x.vector(v).iter().all(|&a| a == 0.0));
                prop_assert_eq!(nx.get(w) == 0.0, zero_on_block, "block {}", b);
                let rhs = nx.get(w) + ny.get(w);
                prop_assert!(nsum.get(w) <= rhs + 1e-8 * (1.0 + rhs));
                prop_assert!(close(ncx.get(w), c.get(w).abs() * nx.get(w), 1e-8));
            }
        }
    }

    #[test]
    fn truncations_increase_to_x(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 8);
        let dim = r.random_range(1..=3);
        let x = common::element(&mut r, &space, dim);
        let full = x.module_norm();
        let mut prev = truncation_sequence(&x, 1).unwrap().module_norm();
        prop_assert!(prev.le(&full));
        for n in 2..=(full.max().ceil() as u64 + 1) {
            let cur = truncation_sequence(&x, n).unwrap().module_norm();
            prop_assert!(prev.le(&cur) && cur.le(&full));
            prev = cur;
        }
        prop_assert_eq!(prev, full);
    }

    #[test]
    fn pairing_bounded_by_norms(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 6);
        let dim = r.random_range(1..=3);
        let part = common::partition(&mut r, &space, 3);
        let phi = common::random_phi(&mut r, &part, common::phi);
        let psi = phi.random_conjugate();
        let f = common::functional(&mut r, &space, dim);
        let x = common::element(&mut r, &space, dim);
        let lhs = f.apply(&x).unwrap().cond_expectation(&part).unwrap();
        let nf = cond_orlicz_norm(&f.random_operator_norm(), &psi, DEFAULT_TOL).unwrap();
        let nx = lux_norm_e(&x, &phi, DEFAULT_TOL).unwrap();
        for w in 0..space.len() {
            let bound = nf.get(w) * nx.get(w);
            prop_assert!(lhs.get(w).abs() <= bound + 1e-9 * (1.0 + bound));
        }
    }

    #[test]
    fn t_map_is_f_linear(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 6);
        let dim = r.random_range(1..=3);
        let part = common::partition(&mut r, &space, 3);
        let phi = common::random_phi(&mut r, &part, common::phi);
        let f = common::functional(&mut r, &space, dim);
        let g = common::functional(&mut r, &space, dim);
        let blockwise = |r: &mut common::TestRng| {
            let v: Vec<f64> = (0..part.num_blocks()).map(|_| r.random_range(-3.0..3.0)).collect();
            RandomScalar::from_blocks(&part, &v).unwrap()
        };
        let (alpha, beta) = (blockwise(&mut r), blockwise(&mut r));
        let combo = t_map(&f.linear_combination(&alpha, &g, &beta).unwrap(), &phi).unwrap();
        let (tf, tg) = (t_map(&f, &phi).unwrap(), t_map(&g, &phi).unwrap());
        for w in 0..space.len() {
            for k in 0..dim {
                let expected = alpha.get(w) * tf.coefficients(w)[k] + beta.get(w) * tg.coefficients(w)[k];
                prop_assert!(close(combo.coefficients(w)[k], expected, 1e-12));
            }
        }
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn orlicz_norm_dominates_oracles(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 5);
        let phi = common::phi(&mut r);
        let z = common::scalar(&mut r, &space);
        let main = orlicz_norm(&z, &phi, DEFAULT_TOL).unwrap();
        let witness = orlicz_norm_oracle(&z, &phi, 50, seed).unwrap().scalar();
        let climb = dual_sup_norm(&z, &phi, 300, seed);
        prop_assert!(witness <= main * (1.0 + 1e-8), "{:?}: oracle {} main {}", phi, witness, main);
        prop_assert!(climb <= main * (1.0 + 1e-8), "{:?}: climb {} main {}", phi, climb, main);
        if let OrliczFunction::Power(_) = phi {
            prop_assert!(close(witness, main, 1e-6), "{:?}: oracle {} main {}", phi, witness, main);
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn isometry_for_mixed_families(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::space(&mut r, 5);
        let dim = r.random_range(1..=2);
        let part = common::partition(&mut r, &space, 3);
        let phi = common::random_phi(&mut r, &part, common::phi);
        let f = common::functional(&mut r, &space, dim);
        let report = verify_isometry(&f, &phi, 1e-6, 2000, seed).unwrap();
        prop_assert!(report.pass, "{:?} {:?}", phi, report.checks);
        let bounds = dual_operator_norm(&t_map(&f, &phi).unwrap(), &phi, 200, seed).unwrap();
        for w in 0..space.len() {
            let (lo, hi) = (bounds.lower.get(w), bounds.upper.get(w));
            prop_assert!(lo <= hi * (1.0 + 1e-12), "{:?}: [{}, {}]", phi, lo, hi);
        }
    }
}
