//! Augmentation trajectories between a source point and its transported
//! image, time-step sampling for training pairs, and Brownian-bridge oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::batch::SampleBatch;
use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::oracles::CouplingPlan;
use crate::rng::Rng;

/// How the interpolation noise scales with `t` and `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLaw {
    /// Noise sample multiplied by `t(1−t)σ²`.
    #[default]
    Scaled,
    /// Brownian-bridge standard deviation `σ√(t(1−t))`.
    Bridge,
}

impl NoiseLaw {
    pub fn coefficient(self, t: f64, sigma: f64) -> f64 {
        match self {
            NoiseLaw::Scaled => t * (1.0 - t) * sigma * sigma,
            NoiseLaw::Bridge => (t * (1.0 - t)).sqrt() * sigma,
        }
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::invalid(format!("time {t} outside [0, 1]")))
    }
}

/// `t·end + (1−t)·start + coeff·z`, exact at both endpoints.
pub(crate) fn interpolate(start: &[f64], end: &[f64], t: f64, coeff: f64, z: &[f64]) -> Vec<f64> {
    if t == 0.0 {
        return start.to_vec();
    }
    if t == 1.0 {
        return end.to_vec();
    }
    start
        .iter()
        .zip(end)
        .zip(z)
        .map(|((s, e), zi)| t * e + (1.0 - t) * s + coeff * zi)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentationPoint {
    pub value: Vec<f64>,
    pub t: f64,
    pub source: Vec<f64>,
    pub mapped: Vec<f64>,
}

/// Draw a point of the augmentation area between `x` and `tx` at time `t`.
pub fn augment_point(
    x: &[f64],
    tx: &[f64],
    t: f64,
    sigma: f64,
    rng: &mut Rng,
    law: NoiseLaw,
) -> Result<AugmentationPoint> {
    check_dim(x.len(), tx.len())?;
    check_time(t)?;
    if !(sigma >= 0.0) {
        return Err(Error::invalid(format!("noise scale {sigma} must be non-negative")));
    }
    let z = rng.normal_vec(x.len());
    Ok(AugmentationPoint {
        value: interpolate(x, tx, t, law.coefficient(t, sigma), &z),
        t,
        source: x.to_vec(),
        mapped: tx.to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Schedule {
    Uniform,
    Mode { s: f64 },
}

/// `N` equispaced times `n/(N−1)` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    n: usize,
    schedule: Schedule,
}

impl TimeGrid {
    pub fn new(n: usize, schedule: Schedule) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("time grid needs N ≥ 2, got {n}")));
        }
        Ok(TimeGrid { n, schedule })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 / (self.n - 1) as f64
    }

    fn draw_index(&self, rng: &mut Rng) -> usize {
        match self.schedule {
            Schedule::Uniform => rng.below(self.n),
            Schedule::Mode { s } => {
                let t = mode_time_density(rng.uniform(), s);
                (t * (self.n - 1) as f64).round() as usize
            }
        }
    }
}

/// Map a uniform draw `u` to a time concentrated mid-interval for `s > 0`.
pub fn mode_time_density(u: f64, s: f64) -> f64 {
    let c = (PI * u / 2.0).cos();
    (1.0 - u - s * (c * c - 1.0 + u)).clamp(0.0, 1.0)
}

/// Two distinct grid indices `n1 < n2`.
pub fn sample_timestep_pair(grid: &TimeGrid, rng: &mut Rng) -> (usize, usize) {
    loop {
        let a = grid.draw_index(rng);
        let b = grid.draw_index(rng);
        if a != b {
            return (a.min(b), a.max(b));
        }
    }
}

/// Neighbouring indices `(n, n+1)` with `n` uniform.
pub fn sample_adjacent_pair(grid: &TimeGrid, rng: &mut Rng) -> (usize, usize) {
    let a = rng.below(grid.len() - 1);
    (a, a + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    #[default]
    CotPairs,
    AdjacentPairs,
}

/// Two points on one trajectory, ordered by time.
#[derive(Clone, Debug, PartialEq)]
pub struct CotPair {
    first: AugmentationPoint,
    second: AugmentationPoint,
}

impl CotPair {
    pub fn new(first: AugmentationPoint, second: AugmentationPoint) -> Result<Self> {
        if !(first.t < second.t) {
            return Err(Error::invalid(format!(
                "pair times must satisfy t1 < t2 (got {} and {})",
                first.t, second.t
            )));
        }
        if first.source != second.source || first.mapped != second.mapped {
            return Err(Error::invalid("pair members must share their endpoints"));
        }
        Ok(CotPair { first, second })
    }

    pub fn first(&self) -> &AugmentationPoint {
        &self.first
    }

    pub fn second(&self) -> &AugmentationPoint {
        &self.second
    }
}

/// Draw a training pair with independent noise for each member.
pub fn sample_cot_pair(
    x: &[f64],
    tx: &[f64],
    grid: &TimeGrid,
    sigma: f64,
    rng: &mut Rng,
    mode: PairMode,
    law: NoiseLaw,
) -> Result<CotPair> {
    let (n1, n2) = match mode {
        PairMode::CotPairs => sample_timestep_pair(grid, rng),
        PairMode::AdjacentPairs => sample_adjacent_pair(grid, rng),
    };
    let first = augment_point(x, tx, grid.time(n1), sigma, rng, law)?;
    let second = augment_point(x, tx, grid.time(n2), sigma, rng, law)?;
    CotPair::new(first, second)
}

/// Mean and per-coordinate variance of the Brownian bridge pinned at
/// `x0` (time 0) and `xt` (time `horizon`) with volatility `sigma`.
pub fn bridge_marginal(
    x0: &[f64],
    xt: &[f64],
    t: f64,
    sigma: f64,
    horizon: f64,
) -> Result<(Vec<f64>, f64)> {
    check_dim(x0.len(), xt.len())?;
    if !(horizon > 0.0) || !(0.0..=horizon).contains(&t) {
        return Err(Error::invalid(format!("time {t} outside [0, {horizon}]")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::invalid("volatility must be non-negative"));
    }
    let mean = x0
        .iter()
        .zip(xt)
        .map(|(a, b)| (t * b + (horizon - t) * a) / horizon)
        .collect();
    Ok((mean, t * (horizon - t) * sigma / horizon))
}

/// Time-`t` marginal of the dynamic extension of a discrete coupling:
/// draw `(x, y)` from the plan, then a bridge point with standard deviation
/// `σ√(t(1−t))` between them.
#[allow(clippy::too_many_arguments)]
pub fn sample_bridge_mixture(
    plan: &CouplingPlan,
    atoms_x: &SampleBatch,
    atoms_y: &SampleBatch,
    t: f64,
    sigma: f64,
    n: usize,
    rng: &mut Rng,
    exec: Exec,
) -> Result<SampleBatch> {
    check_time(t)?;
    check_dim(atoms_x.dim(), atoms_y.dim())?;
    check_dim(plan.rows(), atoms_x.len())?;
    check_dim(plan.cols(), atoms_y.len())?;
    plan.validate(1e-8)?;
    let m = plan.cols();
    let mut cdf = Vec::with_capacity(plan.matrix().len());
    let mut acc = 0.0;
    for v in plan.matrix() {
        acc += v;
        cdf.push(acc);
    }
    let d = atoms_x.dim();
    let coeff = NoiseLaw::Bridge.coefficient(t, sigma);
    let base = rng.fork();
    let rows = exec.map_chunks(n, 1024, |r| {
        let mut rng = base.substream(r.start as u64);
        let mut out = Vec::with_capacity(r.len() * d);
        for _ in r {
            let u = rng.uniform() * acc;
            let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            let (i, j) = (k / m, k % m);
            let z = rng.normal_vec(d);
            out.extend(interpolate(atoms_x.row(i), atoms_y.row(j), t, coeff, &z));
        }
        out
    });
    SampleBatch::new(d, rows.concat())
}
