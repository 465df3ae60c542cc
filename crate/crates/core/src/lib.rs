//! Contrastive optimal-transport flows: neural OT, trajectory pairing, an
//! origin encoder trained by consistency, samplers, editors and evaluation.

// `!(x >= 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod bridge;
pub mod cli;
pub mod error;
pub mod exec;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod neural_ot;
pub mod nn;
pub mod oracles;
pub mod pipeline;
pub mod rng;
pub mod sampler;

pub use batch::{Point, SampleBatch, SampleSource};
pub use error::{Error, Result};
pub use exec::Exec;
pub use rng::Rng;
