//! Two-sample distances used in place of image-feature scores.

use serde::Serialize;

use crate::batch::{dist, SampleBatch};
use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::rng::Rng;

fn non_empty(a: &SampleBatch, b: &SampleBatch) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dim(a.dim(), b.dim())
}

/// V-statistic energy distance `2E‖a−b‖ − E‖a−a'‖ − E‖b−b'‖`.
pub fn energy_distance(a: &SampleBatch, b: &SampleBatch) -> Result<f64> {
    energy_distance_with(a, b, Exec::default())
}

pub fn energy_distance_with(a: &SampleBatch, b: &SampleBatch, exec: Exec) -> Result<f64> {
    non_empty(a, b)?;
    let (ab, aa, bb) = if a.dim() == 1 {
        let sa = sorted(a.as_slice());
        let sb = sorted(b.as_slice());
        (
            mean_abs_cross(&sa, &sb),
            mean_abs_cross(&sa, &sa),
            mean_abs_cross(&sb, &sb),
        )
    } else {
        (
            mean_pair_dist(a, b, exec),
            mean_pair_dist(a, a, exec),
            mean_pair_dist(b, b, exec),
        )
    };
    // Rounding can push identical inputs a hair below zero.
    Ok((2.0 * ab - aa - bb).max(0.0))
}

fn mean_pair_dist(a: &SampleBatch, b: &SampleBatch, exec: Exec) -> f64 {
    let partial = exec.map_chunks(a.len(), 64, |r| {
        r.map(|i| {
            let x = a.row(i);
            b.rows().map(|y| dist(x, y)).sum::<f64>()
        })
        .sum::<f64>()
    });
    partial.iter().sum::<f64>() / (a.len() as f64 * b.len() as f64)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Mean of `|a_i − b_j|` over all pairs, both inputs sorted.
fn mean_abs_cross(a: &[f64], b: &[f64]) -> f64 {
    let mut prefix = Vec::with_capacity(b.len() + 1);
    prefix.push(0.0);
    for v in b {
        prefix.push(prefix.last().unwrap() + v);
    }
    let total = prefix[b.len()];
    let m = b.len() as f64;
    let mut k = 0;
    let mut acc = 0.0;
    for &x in a {
        while k < b.len() && b[k] <= x {
            k += 1;
        }
        let below = k as f64;
        acc += x * below - prefix[k] + (total - prefix[k]) - x * (m - below);
    }
    acc / (a.len() as f64 * m)
}

fn sorted_w2_sq(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Exact 1-D quadratic Wasserstein distance between equal-size samples.
pub fn w2_1d(a: &SampleBatch, b: &SampleBatch) -> Result<f64> {
    non_empty(a, b)?;
    check_dim(1, a.dim())?;
    if a.len() != b.len() {
        return Err(Error::invalid(format!("sample sizes differ: {} vs {}", a.len(), b.len())));
    }
    Ok(sorted_w2_sq(&mut a.as_slice().to_vec(), &mut b.as_slice().to_vec()).sqrt())
}

/// Root of the average squared 1-D W2 over random unit projections.
pub fn sliced_w2(a: &SampleBatch, b: &SampleBatch, n_proj: usize, rng: &mut Rng) -> Result<f64> {
    sliced_w2_with(a, b, n_proj, rng, Exec::default())
}

pub fn sliced_w2_with(
    a: &SampleBatch,
    b: &SampleBatch,
    n_proj: usize,
    rng: &mut Rng,
    exec: Exec,
) -> Result<f64> {
    non_empty(a, b)?;
    if a.len() != b.len() {
        return Err(Error::invalid(format!("sample sizes differ: {} vs {}", a.len(), b.len())));
    }
    if n_proj == 0 {
        return Err(Error::invalid("need at least one projection"));
    }
    let d = a.dim();
    let directions: Vec<Vec<f64>> = (0..n_proj)
        .map(|_| loop {
            let v = rng.normal_vec(d);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect();
    let project = |batch: &SampleBatch, dir: &[f64]| -> Vec<f64> {
        batch
            .rows()
            .map(|r| r.iter().zip(dir).map(|(x, u)| x * u).sum())
            .collect()
    };
    let per_slice = exec.map(n_proj, |k| {
        sorted_w2_sq(&mut project(a, &directions[k]), &mut project(b, &directions[k]))
    });
    Ok((per_slice.iter().sum::<f64>() / n_proj as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub energy_distance: f64,
    pub sliced_w2: f64,
    pub w2_1d: Option<f64>,
    pub n_projections: usize,
}

pub fn metric_report(
    generated: &SampleBatch,
    reference: &SampleBatch,
    n_proj: usize,
    rng: &mut Rng,
    exec: Exec,
) -> Result<MetricReport> {
    let energy = energy_distance_with(generated, reference, exec)?;
    let sliced = sliced_w2_with(generated, reference, n_proj, rng, exec)?;
    let w2 = if generated.dim() == 1 {
        Some(w2_1d(generated, reference)?)
    } else {
        None
    };
    Ok(MetricReport {
        energy_distance: energy,
        sliced_w2: sliced,
        w2_1d: w2,
        n_projections: n_proj,
    })
}
