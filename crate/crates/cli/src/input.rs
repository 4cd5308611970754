//! Loading JSON inputs. Every failure names the flag and the JSON path.

use std::path::Path;
use std::sync::Arc;

use orliczkit::json::{ElementJson, FunctionalJson, PartitionJson, RandomPhiJson, ScalarJson, SpaceJson};
use orliczkit::module::{ModuleElement, RandomFunctional};
use orliczkit::{AtomPartition, FiniteProbSpace, OrliczFunction, RandomOrliczFunction, RandomScalar};
use serde::de::DeserializeOwned;

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(flag: &str, path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{flag}: cannot read {}: {e}", path.display())))?;
    parse_json(flag, &text)
}

pub fn parse_json<T: DeserializeOwned>(flag: &str, text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." || path == "?" { String::new() } else { format!(" at `{path}`") };
        CliError::Input(format!("{flag}: invalid JSON{at}: {}", e.inner()))
    })
}

fn core<T>(flag: &str, r: orliczkit::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("{flag}: {e}")))
}

pub fn space(path: &Path) -> Result<Arc<FiniteProbSpace>, CliError> {
    let j: SpaceJson = read_json("--space", path)?;
    core("--space", j.build())
}

pub fn partition(path: &Path, space: &Arc<FiniteProbSpace>) -> Result<AtomPartition, CliError> {
    let j: PartitionJson = read_json("--partition", path)?;
    core("--partition", j.build(space.clone()))
}

pub fn scalar(path: &Path, space: &Arc<FiniteProbSpace>) -> Result<RandomScalar, CliError> {
    let j: ScalarJson = read_json("--zeta", path)?;
    core("--zeta", j.build(space.clone()))
}

pub fn element(path: &Path, space: &Arc<FiniteProbSpace>) -> Result<ModuleElement, CliError> {
    let j: ElementJson = read_json("--element", path)?;
    core("--element", j.build(space.clone()))
}

pub fn functional(path: &Path, space: &Arc<FiniteProbSpace>) -> Result<RandomFunctional, CliError> {
    let j: FunctionalJson = read_json("--functional", path)?;
    core("--functional", j.build(space.clone()))
}

/// A `--phi` file holds either one family (`{"family": ...}`) or a
/// blockwise family (`{"partition": ..., "per_block": [...]}`).
pub enum PhiInput {
    Single(OrliczFunction),
    Blockwise(RandomPhiJson),
}

pub fn phi(path: &Path) -> Result<PhiInput, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("--phi: cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = parse_json("--phi", &text)?;
    match &value {
        serde_json::Value::Object(m) if m.contains_key("family") => parse_json("--phi", &text).map(PhiInput::Single),
        serde_json::Value::Object(m) if m.contains_key("per_block") || m.contains_key("partition") => {
            parse_json("--phi", &text).map(PhiInput::Blockwise)
        }
        _ => Err(CliError::Input(
            "--phi: expected an object with a `family` field or with `partition` and `per_block` fields".into(),
        )),
    }
}

pub fn blockwise(j: RandomPhiJson, space: &Arc<FiniteProbSpace>) -> Result<RandomOrliczFunction, CliError> {
    core("--phi", j.build(space.clone()))
}
