//! Verification suites driven by `orliczkit verify`.

use orliczkit::duality::{delta2_collapse_check, round_trip_residual, verify_isometry, DualFunctional, IsometryCheck};
use orliczkit::json::ExtReal;
use orliczkit::module::{denseness_check, ModuleElement, RandomFunctional};
use orliczkit::norms::{luxemburg_norm, membership, orlicz_norm, Membership, DEFAULT_TOL};
use orliczkit::{OrliczFunction, RandomOrliczFunction, RandomScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gen;
use crate::report::rel_residual;
use crate::CliError;

/// Tolerance for identities that hold up to rounding.
pub const ALGEBRAIC_TOL: f64 = 1e-8;
/// Tolerance for comparisons against sampled suprema.
pub const SAMPLED_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Isometry,
    Surjectivity,
    #[value(alias = "example32")]
    PowerFamily,
    Delta2,
    Denseness,
}

/// The `--config` file. Every field is optional and falls back to a
/// per-suite default.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub instances: Option<usize>,
    pub max_outcomes: Option<usize>,
    pub max_dim: Option<usize>,
    pub max_blocks: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub exponents: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub lambda: Option<f64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

/// Fully resolved settings, echoed into the report.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub instances: usize,
    pub max_outcomes: usize,
    pub max_dim: usize,
    pub max_blocks: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub exponents: Vec<f64>,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Config {
    pub fn resolve(suite: Suite, file: ConfigFile, seed: u64, tol: Option<f64>, samples: Option<usize>) -> Result<Self, CliError> {
        let (instances, max_outcomes, max_dim, max_blocks, default_tol, default_samples) = match suite {
            Suite::Isometry => (50, 6, 3, 3, SAMPLED_TOL, 10_000),
            Suite::Surjectivity => (100, 8, 3, 4, ALGEBRAIC_TOL, 0),
            Suite::PowerFamily => (100, 8, 1, 3, ALGEBRAIC_TOL, 0),
            Suite::Delta2 => (100, 8, 1, 4, ALGEBRAIC_TOL, 100),
            Suite::Denseness => (100, 8, 3, 1, ALGEBRAIC_TOL, 0),
        };
        let cfg = Config {
            instances: file.instances.unwrap_or(instances),
            max_outcomes: file.max_outcomes.unwrap_or(max_outcomes),
            max_dim: file.max_dim.unwrap_or(max_dim),
            max_blocks: file.max_blocks.unwrap_or(max_blocks),
            p_min: file.p_min.unwrap_or(1.2),
            p_max: file.p_max.unwrap_or(4.0),
            exponents: file.exponents.unwrap_or_else(|| vec![1.0, 1.5, 2.0, 3.0]),
            eps: file.eps.unwrap_or(0.5),
            lambda: file.lambda,
            tol: tol.or(file.tol).unwrap_or(default_tol),
            samples: samples.or(file.samples).unwrap_or(default_samples),
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Input(format!("config.{field}: {why}")));
        if self.instances == 0 {
            return bad("instances", "must be at least 1");
        }
        if self.max_outcomes == 0 {
            return bad("max_outcomes", "must be at least 1");
        }
        if self.max_dim == 0 {
            return bad("max_dim", "must be at least 1");
        }
        if self.max_blocks == 0 {
            return bad("max_blocks", "must be at least 1");
        }
        if !(self.p_min.is_finite() && self.p_min >= 1.0) {
            return bad("p_min", "must be a finite number >= 1");
        }
        if !(self.p_max.is_finite() && self.p_max >= self.p_min) {
            return bad("p_max", "must be finite and >= p_min");
        }
        if self.exponents.is_empty() || self.exponents.iter().any(|&p| !(p.is_finite() && p >= 1.0)) {
            return bad("exponents", "must be a nonempty list of finite numbers >= 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps", "must lie in (0, 1)");
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l < 1.0) {
                return bad("lambda", "must lie in (0, 1)");
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol", "must be a finite number > 0");
        }
        Ok(())
    }
}

pub fn property(suite: Suite) -> &'static str {
    match suite {
        Suite::Isometry => {
            "the operator norm of T f equals the conditional Orlicz norm of |f|* under the conjugate function"
        }
        Suite::Surjectivity => "every random-linear functional on the Orlicz module is T of a recovered random functional",
        Suite::PowerFamily => {
            "power family t^p: conjugate p^(1-q) s^q / q, Luxemburg norm = L^p norm, Orlicz norm = p^(1/p) q^(1/q) L^p norm; \
             identity t: conjugate is the unit-ball indicator, whose heart is {0}"
        }
        Suite::Delta2 => "under a doubling condition the Orlicz space equals its heart; a block jumping to +inf separates them",
        Suite::Denseness => "truncations x 1{|x| <= n} converge to x in probability",
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport<T: Serialize> {
    pub suite: &'static str,
    pub config: Config,
    pub pass: bool,
    pub failures: usize,
    pub instances: Vec<T>,
}

fn finish<T: Serialize>(suite: &'static str, config: Config, instances: Vec<T>, pass_of: impl Fn(&T) -> bool) -> SuiteReport<T> {
    let failures = instances.iter().filter(|i| !pass_of(i)).count();
    SuiteReport {
        suite,
        config,
        pass: failures == 0,
        failures,
        instances,
    }
}

fn compute<T>(r: orliczkit::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Compute(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct IsometryInstance {
    pub instance: usize,
    pub outcomes: usize,
    pub dim: usize,
    pub families: Vec<String>,
    pub max_relative_width: f64,
    pub checks: Vec<IsometryCheck>,
    pub pass: bool,
}

pub fn isometry(cfg: Config) -> Result<SuiteReport<IsometryInstance>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.instances);
    for instance in 0..cfg.instances {
        let space = gen::space(&mut rng, cfg.max_outcomes);
        let dim = rng.random_range(1..=cfg.max_dim);
        let part = gen::partition(&mut rng, &space, cfg.max_blocks);
        let fns: Vec<OrliczFunction> = (0..part.num_blocks()).map(|_| gen::power(&mut rng, cfg.p_min, cfg.p_max)).collect();
        let phi = compute(RandomOrliczFunction::new(part, fns))?;
        let f = gen::functional(&mut rng, &space, dim);
        out.push(isometry_instance(instance, &f, &phi, &cfg, rng.random())?);
    }
    Ok(finish("isometry", cfg, out, |i| i.pass))
}

/// The isometry suite on one given `(f, Φ)`.
pub fn isometry_given(cfg: Config, f: &RandomFunctional, phi: &RandomOrliczFunction) -> Result<SuiteReport<IsometryInstance>, CliError> {
    let one = isometry_instance(0, f, phi, &cfg, cfg.seed)?;
    Ok(finish("isometry", cfg, vec![one], |i| i.pass))
}

fn isometry_instance(instance: usize, f: &RandomFunctional, phi: &RandomOrliczFunction, cfg: &Config, seed: u64) -> Result<IsometryInstance, CliError> {
    let report = compute(verify_isometry(f, phi, cfg.tol, cfg.samples, seed))?;
    Ok(IsometryInstance {
        instance,
        outcomes: f.space().len(),
        dim: f.dim(),
        families: phi.per_block().iter().map(gen::family_name).collect(),
        max_relative_width: report.max_relative_width(),
        pass: report.pass,
        checks: report.checks,
    })
}

#[derive(Debug, Serialize)]
pub struct SurjectivityInstance {
    pub instance: usize,
    pub outcomes: usize,
    pub dim: usize,
    pub families: Vec<String>,
    pub residual: f64,
    pub pass: bool,
}

pub fn surjectivity(cfg: Config) -> Result<SuiteReport<SurjectivityInstance>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.instances);
    for instance in 0..cfg.instances {
        let space = gen::space(&mut rng, cfg.max_outcomes);
        let dim = rng.random_range(1..=cfg.max_dim);
        let part = gen::partition(&mut rng, &space, cfg.max_blocks);
        let fns: Vec<OrliczFunction> = (0..part.num_blocks()).map(|_| gen::any_family(&mut rng)).collect();
        let families = fns.iter().map(gen::family_name).collect();
        let phi = compute(RandomOrliczFunction::new(part.clone(), fns))?;
        let big_f = compute(DualFunctional::new(part, gen::vectors(&mut rng, space.len(), dim)))?;
        let residual = compute(round_trip_residual(&big_f, &phi))?;
        out.push(SurjectivityInstance {
            instance,
            outcomes: space.len(),
            dim,
            families,
            residual,
            pass: residual <= cfg.tol,
        });
    }
    Ok(finish("surjectivity", cfg, out, |i| i.pass))
}

#[derive(Debug, Serialize)]
pub struct PowerFamilyInstance {
    pub p: f64,
    pub instance: usize,
    pub outcomes: usize,
    pub conjugate_exact: bool,
    pub luxemburg: ExtReal,
    pub luxemburg_expected: f64,
    pub luxemburg_residual: ExtReal,
    pub orlicz: ExtReal,
    pub orlicz_expected: f64,
    pub orlicz_residual: ExtReal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugate_membership: Option<Membership>,
    pub pass: bool,
}

pub fn power_family(cfg: Config) -> Result<SuiteReport<PowerFamilyInstance>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for &p in &cfg.exponents {
        let phi = OrliczFunction::power(p, 1.0)
            .map_err(|e| CliError::Input(format!("config.exponents: {e}")))?;
        let (expected_conj, factor) = if p == 1.0 {
            (OrliczFunction::identity().conjugate(), 1.0)
        } else {
            let q = p / (p - 1.0);
            let conj = OrliczFunction::power(q, p.powf(1.0 - q) / q)
                .map_err(|e| CliError::Input(format!("config.exponents: {e}")))?;
            (conj, p.powf(1.0 / p) * q.powf(1.0 / q))
        };
        let conjugate_exact = phi.conjugate() == expected_conj
            && (p != 1.0 || expected_conj == compute(OrliczFunction::indicator_ball(1.0))?);
        for instance in 0..cfg.instances {
            let space = gen::space(&mut rng, cfg.max_outcomes);
            let z = compute(RandomScalar::new(space.clone(), gen::values(&mut rng, space.len())))?;
            let lp = z
                .values()
                .iter()
                .zip(space.weights())
                .map(|(v, w)| w * v.abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p);
            let lux = compute(luxemburg_norm(&z, &phi, DEFAULT_TOL))?;
            let orl = compute(orlicz_norm(&z, &phi, DEFAULT_TOL))?;
            let (lux_res, orl_res) = (rel_residual(lux, lp), rel_residual(orl, factor * lp));
            let conjugate_membership = (p == 1.0).then(|| {
                let part = gen::partition(&mut rng, &space, cfg.max_blocks);
                membership(&z, &RandomOrliczFunction::uniform(part, phi.conjugate()))
            });
            let membership_ok = match conjugate_membership {
                None => true,
                Some(m) => m == if z.is_zero() { Membership::InHeart } else { Membership::InSpaceOnly },
            };
            out.push(PowerFamilyInstance {
                p,
                instance,
                outcomes: space.len(),
                conjugate_exact,
                luxemburg: ExtReal(lux),
                luxemburg_expected: lp,
                luxemburg_residual: ExtReal(lux_res),
                orlicz: ExtReal(orl),
                orlicz_expected: factor * lp,
                orlicz_residual: ExtReal(orl_res),
                conjugate_membership,
                pass: conjugate_exact && lux_res <= cfg.tol && orl_res <= cfg.tol && membership_ok,
            });
        }
    }
    Ok(finish("power-family", cfg, out, |i| i.pass))
}

#[derive(Debug, Serialize)]
pub struct Delta2Instance {
    pub instance: usize,
    pub outcomes: usize,
    pub families: Vec<String>,
    pub expect_separator: bool,
    pub witness: Option<Vec<f64>>,
    pub checked: usize,
    pub collapse_holds: bool,
    pub separator: Option<Vec<f64>>,
    pub pass: bool,
}

pub fn delta2(cfg: Config) -> Result<SuiteReport<Delta2Instance>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.instances);
    for instance in 0..cfg.instances {
        let space = gen::space(&mut rng, cfg.max_outcomes);
        let part = gen::partition(&mut rng, &space, cfg.max_blocks);
        let mut fns: Vec<OrliczFunction> = (0..part.num_blocks()).map(|_| gen::power(&mut rng, 1.0, 5.0)).collect();
        let expect_separator = instance % 2 == 1;
        if expect_separator {
            let b = rng.random_range(0..fns.len());
            fns[b] = compute(OrliczFunction::indicator_ball(rng.random_range(0.5..2.0)))?;
        }
        let families = fns.iter().map(gen::family_name).collect();
        let phi = compute(RandomOrliczFunction::new(part, fns))?;
        let rep = delta2_collapse_check(&phi, cfg.samples, rng.random());
        let separator_valid = match &rep.separator {
            None => !expect_separator,
            Some(v) => {
                let z = compute(RandomScalar::new(space.clone(), v.clone()))?;
                expect_separator && membership(&z, &phi) == Membership::InSpaceOnly
            }
        };
        out.push(Delta2Instance {
            instance,
            outcomes: space.len(),
            families,
            expect_separator,
            pass: rep.pass && separator_valid && rep.collapse_holds != expect_separator,
            witness: rep.witness,
            checked: rep.checked,
            collapse_holds: rep.collapse_holds,
            separator: rep.separator,
        });
    }
    Ok(finish("delta2", cfg, out, |i| i.pass))
}

#[derive(Debug, Serialize)]
pub struct DenseInstance {
    pub instance: usize,
    pub outcomes: usize,
    pub dim: usize,
    pub max_norm: f64,
    pub lambda: f64,
    pub minimal_n: u64,
    pub expected_n: u64,
    /// `P{‖x - x_n‖ > ε}` for `n = 1, 2, ...`, through the first zero.
    pub tail: Vec<f64>,
    pub monotone: bool,
    pub pass: bool,
}

pub fn denseness(cfg: Config) -> Result<SuiteReport<DenseInstance>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.instances);
    for instance in 0..cfg.instances {
        let space = gen::space(&mut rng, cfg.max_outcomes);
        let dim = rng.random_range(1..=cfg.max_dim);
        let mut vecs = gen::vectors(&mut rng, space.len(), dim);
        let spike = rng.random_range(0..space.len());
        vecs[spike] = (0..dim).map(|_| rng.random_range(-20.0..20.0)).collect();
        let x = compute(ModuleElement::new(space.clone(), dim, vecs))?;
        out.push(dense_instance(instance, &x, &cfg)?);
    }
    Ok(finish("denseness", cfg, out, |i| i.pass))
}

/// The denseness suite on one given `x`.
pub fn denseness_given(cfg: Config, x: &ModuleElement) -> Result<SuiteReport<DenseInstance>, CliError> {
    let one = dense_instance(0, x, &cfg)?;
    Ok(finish("denseness", cfg, vec![one], |i| i.pass))
}

fn dense_instance(instance: usize, x: &ModuleElement, cfg: &Config) -> Result<DenseInstance, CliError> {
    let space = x.space();
    let min_w = space.weights().iter().copied().fold(f64::INFINITY, f64::min);
    let lambda = cfg.lambda.unwrap_or(0.5 * min_w);
    let max_norm = x.module_norm().max();
    let last = (max_norm.ceil() as u64).max(1);
    let mut tail = Vec::new();
    for n in 1..=last {
        tail.push(compute(x.sub(&x.truncate(n)))?.module_norm().prob_exceeds(cfg.eps));
    }
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let expected_n = tail.iter().position(|&t| t < lambda).map_or(last, |i| i as u64 + 1);
    let minimal_n = compute(denseness_check(x, cfg.eps, lambda))?;
    Ok(DenseInstance {
        instance,
        outcomes: space.len(),
        dim: x.dim(),
        max_norm,
        lambda,
        minimal_n,
        expected_n,
        monotone,
        pass: monotone && minimal_n == expected_n && tail.last() == Some(&0.0),
        tail,
    })
}
