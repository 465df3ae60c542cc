//! TOML training configs. Every field is required and unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::CotTrainConfig;
use crate::neural_ot::NotTrainConfig;

pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
}

pub fn render_config<T: Serialize>(config: &T) -> String {
    toml::to_string(config).expect("config serializes")
}

pub fn load_not_config(path: impl AsRef<Path>) -> Result<NotTrainConfig> {
    let cfg: NotTrainConfig = parse_config(&fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_cot_config(path: impl AsRef<Path>) -> Result<CotTrainConfig> {
    let cfg: CotTrainConfig = parse_config(&fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}
