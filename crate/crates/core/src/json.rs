//! JSON wire formats for spaces, partitions, random variables, Orlicz
//! functions, module elements and functionals. Indices are zero-based and
//! `+∞` is written as the string `"inf"`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{OrliczError, Result};
use crate::module::{ModuleElement, RandomFunctional};
use crate::orlicz::{OrliczFunction, RandomOrliczFunction};
use crate::prob::{AtomPartition, FiniteProbSpace, RandomScalar};

/// A number that may be `+∞`, serialized as `"inf"` in that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal(v)),
            Raw::Str(s) if s == "inf" || s == "+inf" => Ok(ExtReal(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub outcomes: Vec<String>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionJson {
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarJson {
    pub values: Vec<ExtReal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiJson {
    Power {
        p: f64,
        c: f64,
    },
    ExpMinusOne,
    EntropyConj,
    Piecewise {
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jump_at: Option<f64>,
    },
    IndicatorBall {
        r: f64,
    },
}

impl TryFrom<PhiJson> for OrliczFunction {
    type Error = OrliczError;

    fn try_from(j: PhiJson) -> Result<Self> {
        match j {
            PhiJson::Power { p, c } => OrliczFunction::power(p, c),
            PhiJson::ExpMinusOne => Ok(OrliczFunction::ExpMinusOne),
            PhiJson::EntropyConj => Ok(OrliczFunction::EntropyConj),
            PhiJson::Piecewise {
                breakpoints,
                slopes,
                jump_at,
            } => OrliczFunction::piecewise(breakpoints, slopes, jump_at),
            PhiJson::IndicatorBall { r } => OrliczFunction::indicator_ball(r),
        }
    }
}

impl From<OrliczFunction> for PhiJson {
    fn from(phi: OrliczFunction) -> Self {
        match phi {
            OrliczFunction::Power(pf) => PhiJson::Power {
                p: pf.p(),
                c: pf.c(),
            },
            OrliczFunction::ExpMinusOne => PhiJson::ExpMinusOne,
            OrliczFunction::EntropyConj => PhiJson::EntropyConj,
            OrliczFunction::PiecewiseLinear(pl) => PhiJson::Piecewise {
                breakpoints: pl.breakpoints().to_vec(),
                slopes: pl.slopes().to_vec(),
                jump_at: pl.jump_at(),
            },
            OrliczFunction::IndicatorBall(b) => PhiJson::IndicatorBall { r: b.radius() },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPhiJson {
    pub partition: PartitionJson,
    pub per_block: Vec<OrliczFunction>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalJson {
    pub covectors: Vec<Vec<f64>>,
}

impl SpaceJson {
    pub fn build(self) -> Result<Arc<FiniteProbSpace>> {
        FiniteProbSpace::new(self.outcomes, self.weights)
    }

    pub fn from_space(space: &FiniteProbSpace) -> Self {
        Self {
            outcomes: space.labels().to_vec(),
            weights: space.weights().to_vec(),
        }
    }
}

impl PartitionJson {
    pub fn build(self, space: Arc<FiniteProbSpace>) -> Result<AtomPartition> {
        AtomPartition::new(space, self.blocks)
    }

    pub fn from_partition(p: &AtomPartition) -> Self {
        Self {
            blocks: p.blocks().to_vec(),
        }
    }
}

impl ScalarJson {
    pub fn build(self, space: Arc<FiniteProbSpace>) -> Result<RandomScalar> {
        RandomScalar::new(space, self.values.into_iter().map(|v| v.0).collect())
    }

    pub fn from_scalar(z: &RandomScalar) -> Self {
        Self {
            values: z.values().iter().map(|&v| ExtReal(v)).collect(),
        }
    }
}

impl RandomPhiJson {
    pub fn build(self, space: Arc<FiniteProbSpace>) -> Result<RandomOrliczFunction> {
        RandomOrliczFunction::new(self.partition.build(space)?, self.per_block)
    }

    pub fn from_random(phi: &RandomOrliczFunction) -> Self {
        Self {
            partition: PartitionJson::from_partition(phi.partition()),
            per_block: phi.per_block().to_vec(),
        }
    }
}

impl ElementJson {
    pub fn build(self, space: Arc<FiniteProbSpace>) -> Result<ModuleElement> {
        ModuleElement::new(space, self.dim, self.vectors)
    }

    pub fn from_element(x: &ModuleElement) -> Self {
        Self {
            dim: x.dim(),
            vectors: (0..x.space().len()).map(|w| x.vector(w).to_vec()).collect(),
        }
    }
}

impl FunctionalJson {
    pub fn build(self, space: Arc<FiniteProbSpace>) -> Result<RandomFunctional> {
        RandomFunctional::new(space, self.covectors)
    }

    pub fn from_functional(f: &RandomFunctional) -> Self {
        Self {
            covectors: (0..f.space().len()).map(|w| f.covector(w).to_vec()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_wire_format() {
        let phi: OrliczFunction = serde_json::from_str(r#"{"family":"power","p":2,"c":1}"#).unwrap();
        assert_eq!(phi, OrliczFunction::power(2.0, 1.0).unwrap());
        let out = serde_json::to_string(&phi.conjugate()).unwrap();
        assert_eq!(out, r#"{"family":"power","p":2.0,"c":0.25}"#);

        let pl: OrliczFunction = serde_json::from_str(
            r#"{"family":"piecewise","breakpoints":[0,1],"slopes":[1,2],"jump_at":3}"#,
        )
        .unwrap();
        assert_eq!(pl.jump_point(), Some(3.0));
        let ball: OrliczFunction =
            serde_json::from_str(r#"{"family":"indicator_ball","r":1}"#).unwrap();
        assert_eq!(ball, OrliczFunction::identity().conjugate());
        let e: OrliczFunction = serde_json::from_str(r#"{"family":"exp_minus_one"}"#).unwrap();
        assert_eq!(e, OrliczFunction::ExpMinusOne);
    }

    #[test]
    fn phi_rejects_invalid_parameters() {
        assert!(serde_json::from_str::<OrliczFunction>(r#"{"family":"power","p":0.5,"c":1}"#).is_err());
        assert!(serde_json::from_str::<OrliczFunction>(r#"{"family":"cosh"}"#).is_err());
        assert!(serde_json::from_str::<OrliczFunction>(r#"{"family":"power","p":2}"#).is_err());
    }

    #[test]
    fn scalar_accepts_inf() {
        let j: ScalarJson = serde_json::from_str(r#"{"values":[1.5,"inf"]}"#).unwrap();
        let z = j.build(FiniteProbSpace::uniform(2).unwrap()).unwrap();
        assert_eq!(z.values(), &[1.5, f64::INFINITY]);
        let back = serde_json::to_string(&ScalarJson::from_scalar(&z)).unwrap();
        assert_eq!(back, r#"{"values":[1.5,"inf"]}"#);
        assert!(serde_json::from_str::<ScalarJson>(r#"{"values":["-inf"]}"#).is_err());
    }

    #[test]
    fn random_phi_round_trip() {
        let text = r#"{"partition":{"blocks":[[0],[1,2]]},"per_block":[{"family":"power","p":3,"c":1},{"family":"exp_minus_one"}]}"#;
        let j: RandomPhiJson = serde_json::from_str(text).unwrap();
        let phi = j.build(FiniteProbSpace::uniform(3).unwrap()).unwrap();
        assert_eq!(phi.partition().num_blocks(), 2);
        let again = serde_json::to_string(&RandomPhiJson::from_random(&phi)).unwrap();
        let phi2 = serde_json::from_str::<RandomPhiJson>(&again)
            .unwrap()
            .build(FiniteProbSpace::uniform(3).unwrap())
            .unwrap();
        assert_eq!(phi, phi2);
    }
}
