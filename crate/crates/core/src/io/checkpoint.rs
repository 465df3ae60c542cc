//! JSON checkpoints with base64 little-endian `f64` weight blobs.
//!
//! ```text
//! { "format_version": 1, "kind": "cot_encoder",
//!   "metadata": { "dim": 2, "n_freq": 4, ... },
//!   "networks": { "body": { "layer_dims": [...], "activation": "relu",
//!                           "weights": ["<b64>", ...], "biases": ["<b64>", ...] } } }
//! ```

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde_json::{json, Map, Value};

use crate::bridge::{NoiseLaw, Schedule, TimeGrid};
use crate::error::{Error, Result};
use crate::flow::CotEncoder;
use crate::neural_ot::NeuralOtModel;
use crate::nn::{Activation, MlpParams};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Checkpoint {
    NeuralOt { model: NeuralOtModel, seed: u64 },
    CotEncoder { encoder: CotEncoder, seed: u64 },
}

impl Checkpoint {
    pub fn kind(&self) -> &'static str {
        match self {
            Checkpoint::NeuralOt { .. } => "neural_ot",
            Checkpoint::CotEncoder { .. } => "cot_encoder",
        }
    }

    pub fn to_json(&self) -> String {
        let (metadata, networks) = match self {
            Checkpoint::NeuralOt { model, seed } => (
                json!({ "dim": model.dim(), "cost": "half_sq_l2", "seed": seed }),
                json!({
                    "map": network_json(model.map_params()),
                    "potential": network_json(model.potential_params()),
                }),
            ),
            Checkpoint::CotEncoder { encoder, seed } => (
                json!({
                    "dim": encoder.dim(),
                    "n_freq": encoder.n_freq(),
                    "sigma": encoder.sigma(),
                    "n_steps": encoder.grid().len(),
                    "schedule": encoder.grid().schedule(),
                    "noise_law": encoder.noise_law(),
                    "orientation": encoder.orientation(),
                    "seed": seed,
                }),
                json!({ "body": network_json(encoder.body()) }),
            ),
        };
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "kind": self.kind(),
            "metadata": metadata,
            "networks": networks,
        });
        serde_json::to_string_pretty(&doc).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let version = field(&doc, "format_version")?
            .as_u64()
            .ok_or_else(|| Error::Parse("format_version must be an integer".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let kind = str_field(&doc, "kind")?;
        let meta = field(&doc, "metadata")?;
        let nets = field(&doc, "networks")?;
        let seed = u64_field(meta, "metadata.seed", "seed")?;
        match kind {
            "neural_ot" => {
                let model = NeuralOtModel::new(
                    parse_network(field(nets, "map")?, "map")?,
                    parse_network(field(nets, "potential")?, "potential")?,
                )?;
                crate::error::check_dim(u64_field(meta, "metadata.dim", "dim")? as usize, model.dim())?;
                Ok(Checkpoint::NeuralOt { model, seed })
            }
            "cot_encoder" => {
                let body = parse_network(field(nets, "body")?, "body")?;
                let n_freq = u64_field(meta, "metadata.n_freq", "n_freq")? as usize;
                let n_steps = u64_field(meta, "metadata.n_steps", "n_steps")? as usize;
                let sigma = field(meta, "sigma")?
                    .as_f64()
                    .ok_or_else(|| Error::Parse("sigma must be a number".into()))?;
                let schedule: Schedule = typed(field(meta, "schedule")?, "schedule")?;
                let noise_law: NoiseLaw = typed(field(meta, "noise_law")?, "noise_law")?;
                let _: crate::flow::Orientation = typed(field(meta, "orientation")?, "orientation")?;
                let encoder = CotEncoder::new(body, n_freq, TimeGrid::new(n_steps, schedule)?, sigma, noise_law)?;
                crate::error::check_dim(u64_field(meta, "metadata.dim", "dim")? as usize, encoder.dim())?;
                Ok(Checkpoint::CotEncoder { encoder, seed })
            }
            other => Err(Error::Parse(format!("unknown checkpoint kind '{other}'"))),
        }
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::MissingField(name.to_string()))
}

fn str_field<'a>(v: &'a Value, name: &str) -> Result<&'a str> {
    field(v, name)?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("{name} must be a string")))
}

fn u64_field(v: &Value, label: &str, name: &str) -> Result<u64> {
    field(v, name)?
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("{label} must be a non-negative integer")))
}

fn typed<T: serde::de::DeserializeOwned>(v: &Value, name: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{name}: {e}")))
}

pub fn encode_blob(values: &[f64]) -> String {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

pub fn decode_blob(name: &str, text: &str, expected_len: usize) -> Result<Vec<f64>> {
    let corrupt = |reason: String| Error::CorruptBlob {
        name: name.to_string(),
        reason,
    };
    let bytes = STANDARD.decode(text).map_err(|e| corrupt(e.to_string()))?;
    if bytes.len() != expected_len * 8 {
        return Err(corrupt(format!(
            "{} bytes, expected {}",
            bytes.len(),
            expected_len * 8
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn network_json(p: &MlpParams) -> Value {
    let mut m = Map::new();
    m.insert("layer_dims".into(), json!(p.layer_dims()));
    m.insert("activation".into(), json!(p.activation()));
    m.insert(
        "weights".into(),
        json!(p.weights().iter().map(|w| encode_blob(w)).collect::<Vec<_>>()),
    );
    m.insert(
        "biases".into(),
        json!(p.biases().iter().map(|b| encode_blob(b)).collect::<Vec<_>>()),
    );
    Value::Object(m)
}

fn parse_network(v: &Value, name: &str) -> Result<MlpParams> {
    let dims: Vec<usize> = typed(field(v, "layer_dims")?, "layer_dims")?;
    let activation: Activation = typed(field(v, "activation")?, "activation")?;
    if dims.len() < 2 {
        return Err(Error::Parse(format!("{name}: need at least two layer sizes")));
    }
    let blobs = |key: &str| -> Result<Vec<&str>> {
        let arr = field(v, key)?
            .as_array()
            .ok_or_else(|| Error::Parse(format!("{name}.{key} must be an array")))?;
        if arr.len() != dims.len() - 1 {
            return Err(Error::CorruptBlob {
                name: format!("{name}.{key}"),
                reason: format!("{} blocks, expected {}", arr.len(), dims.len() - 1),
            });
        }
        arr.iter()
            .map(|b| b.as_str().ok_or_else(|| Error::Parse(format!("{name}.{key} entries must be strings"))))
            .collect()
    };
    let (w_text, b_text) = (blobs("weights")?, blobs("biases")?);
    let mut weights = Vec::with_capacity(w_text.len());
    let mut biases = Vec::with_capacity(b_text.len());
    for l in 0..dims.len() - 1 {
        weights.push(decode_blob(&format!("{name}.weights[{l}]"), w_text[l], dims[l] * dims[l + 1])?);
        biases.push(decode_blob(&format!("{name}.biases[{l}]"), b_text[l], dims[l + 1])?);
    }
    MlpParams::from_parts(dims, weights, biases, activation)
}

pub fn save_checkpoint(path: impl AsRef<Path>, ckpt: &Checkpoint) -> Result<()> {
    fs::write(path, ckpt.to_json())?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    Checkpoint::from_json(&fs::read_to_string(path)?)
}

pub fn load_neural_ot(path: impl AsRef<Path>) -> Result<NeuralOtModel> {
    match load_checkpoint(path)? {
        Checkpoint::NeuralOt { model, .. } => Ok(model),
        other => Err(Error::KindMismatch {
            expected: "neural_ot".into(),
            found: other.kind().into(),
        }),
    }
}

pub fn load_cot_encoder(path: impl AsRef<Path>) -> Result<CotEncoder> {
    match load_checkpoint(path)? {
        Checkpoint::CotEncoder { encoder, .. } => Ok(encoder),
        other => Err(Error::KindMismatch {
            expected: "cot_encoder".into(),
            found: other.kind().into(),
        }),
    }
}
