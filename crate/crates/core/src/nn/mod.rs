//! Minimal numerical engine: MLPs with analytic gradients, Adam, time features.

mod adam;
mod embed;
mod mlp;

pub use adam::{AdamConfig, AdamState, Direction};
pub use embed::{embed_dim, time_embed};
pub use mlp::{Activation, MlpParams, Tape};
