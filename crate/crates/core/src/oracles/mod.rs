//! Ground-truth machinery: entropic and exact discrete OT, and sample metrics.

mod dynamic;
mod exact;
mod metrics;
mod plan;
mod sinkhorn;

pub use dynamic::{dynamic_extension_check, DynamicCheck};
pub use exact::{exact_ot_small, ExactPlan, MAX_EXACT_SIZE};
pub use metrics::{
    energy_distance, energy_distance_with, metric_report, sliced_w2, sliced_w2_with, w2_1d,
    MetricReport,
};
pub use plan::CouplingPlan;
pub use sinkhorn::{sinkhorn, SinkhornResult};
