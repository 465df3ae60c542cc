//! Datasets, persistence formats and plot output.

pub mod checkpoint;
pub mod config;
pub mod datasets;
pub mod samples;
pub mod svg;

pub use checkpoint::{
    load_checkpoint, load_cot_encoder, load_neural_ot, save_checkpoint, Checkpoint, FORMAT_VERSION,
};
pub use config::{load_cot_config, load_not_config, parse_config, render_config};
pub use datasets::{gen_dataset, DatasetSpec, Distribution, GLYPH_DIM, GLYPH_SIDE};
pub use samples::{read_samples, read_samples_from, write_samples, write_samples_to};
pub use svg::scatter_svg;
