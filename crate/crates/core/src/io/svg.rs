//! Scatter plots of 2-D batches as standalone SVG.

use std::fmt::Write;

use crate::batch::SampleBatch;
use crate::error::{check_dim, Result};

const SIZE: f64 = 480.0;
const PAD: f64 = 16.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Overlay up to four 2-D batches on shared axes.
pub fn scatter_svg(layers: &[&SampleBatch]) -> Result<String> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for b in layers {
        check_dim(2, b.dim())?;
        for p in b.rows() {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let scale = (SIZE - 2.0 * PAD) / span;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, b) in layers.iter().enumerate() {
        writeln!(s, r#"<g fill="{}" fill-opacity="0.5">"#, COLORS[i % COLORS.len()]).unwrap();
        for p in b.rows() {
            let x = PAD + (p[0] - lo[0]) * scale;
            let y = SIZE - PAD - (p[1] - lo[1]) * scale;
            writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5"/>"#).unwrap();
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
