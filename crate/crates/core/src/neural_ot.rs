//! Neural optimal transport by stochastic gradient ascent-descent.
//!
//! A map network `T` and a scalar potential `ψ` play the max-min game
//!
//! ```text
//! sup_ψ inf_T  E_x[ c(x, T(x)) − ψ(T(x)) ] + E_y[ ψ(y) ]
//! ```
//!
//! with `c(x, y) = ½‖x − y‖²`. The potential ascends on
//! `−mean ψ(T(x)) + mean ψ(y)` with `T(x)` held fixed; the map descends on
//! `mean [c(x, T(x)) − ψ(T(x))]` with `ψ` held fixed.

use serde::{Deserialize, Serialize};

use crate::batch::{SampleBatch, SampleSource};
use crate::error::{check_dim, Error, Result};
use crate::exec::{Exec, CHUNK};
use crate::linalg::{spd_inv_sqrt, spd_sqrt, Matrix};
use crate::nn::{Activation, AdamConfig, AdamState, Direction, MlpParams};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Cost {
    #[default]
    HalfSqL2,
}

/// `½‖x − y‖²`.
pub fn transport_cost(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    Ok(0.5 * crate::batch::sq_dist(x, y))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeuralOtModel {
    map_params: MlpParams,
    potential_params: MlpParams,
    dim: usize,
    cost: Cost,
}

impl NeuralOtModel {
    pub fn new(map_params: MlpParams, potential_params: MlpParams) -> Result<Self> {
        let dim = map_params.input_dim();
        check_dim(dim, map_params.output_dim())?;
        check_dim(dim, potential_params.input_dim())?;
        check_dim(1, potential_params.output_dim())?;
        Ok(NeuralOtModel {
            map_params,
            potential_params,
            dim,
            cost: Cost::HalfSqL2,
        })
    }

    pub fn init(dim: usize, config: &NotTrainConfig, rng: &mut Rng) -> Result<Self> {
        let map = MlpParams::init(&with_io(dim, &config.map_hidden, dim), config.activation, rng)?;
        let potential =
            MlpParams::init(&with_io(dim, &config.potential_hidden, 1), config.activation, rng)?;
        Self::new(map, potential)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn map_params(&self) -> &MlpParams {
        &self.map_params
    }

    pub fn potential_params(&self) -> &MlpParams {
        &self.potential_params
    }

    pub fn map_params_mut(&mut self) -> &mut MlpParams {
        &mut self.map_params
    }

    pub fn potential_params_mut(&mut self) -> &mut MlpParams {
        &mut self.potential_params
    }

    pub fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.map_params.forward(x)
    }

    pub fn potential(&self, y: &[f64]) -> Result<f64> {
        Ok(self.potential_params.forward(y)?[0])
    }

    /// Push a batch through the map.
    pub fn map_batch(&self, batch: &SampleBatch, exec: Exec) -> Result<SampleBatch> {
        check_dim(self.dim, batch.dim())?;
        let d = self.dim;
        let parts = exec.map_chunks(batch.len(), CHUNK, |r| {
            self.map_params
                .forward_batch(&batch.as_slice()[r.start * d..r.end * d], r.len())
        });
        let mut out = Vec::with_capacity(batch.len() * d);
        for p in parts {
            out.extend(p?);
        }
        SampleBatch::new(d, out)
    }
}

pub(crate) fn with_io(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(input);
    dims.extend_from_slice(hidden);
    dims.push(output);
    dims
}

fn sum_ordered(parts: Vec<Result<(f64, MlpParams)>>, zero: MlpParams) -> Result<(f64, MlpParams)> {
    let mut value = 0.0;
    let mut grads = zero;
    for p in parts {
        let (v, g) = p?;
        value += v;
        grads.add_assign(&g);
    }
    Ok((value, grads))
}

/// Value and ω-gradient of `−mean ψ(T(x)) + mean ψ(y)`, with `T(x)` constant.
pub fn potential_objective_grad(
    model: &NeuralOtModel,
    source: &SampleBatch,
    target: &SampleBatch,
    exec: Exec,
) -> Result<(f64, MlpParams)> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dim(model.dim, target.dim())?;
    let mapped = model.map_batch(source, exec)?;
    let psi = &model.potential_params;
    let d = model.dim;
    let side = |batch: &SampleBatch, weight: f64| {
        exec.map_chunks(batch.len(), CHUNK, move |r| {
            let tape = psi.forward_tape(&batch.as_slice()[r.start * d..r.end * d], r.len())?;
            let value: f64 = tape.output().iter().map(|v| weight * v).sum();
            let mut g = psi.zeros_like();
            psi.backward_tape(&tape, &vec![weight; r.len()], Some(&mut g))?;
            Ok((value, g))
        })
    };
    let mut parts = side(&mapped, -1.0 / source.len() as f64);
    parts.extend(side(target, 1.0 / target.len() as f64));
    sum_ordered(parts, psi.zeros_like())
}

/// Value and φ-gradient of `mean [c(x, T(x)) − ψ(T(x))]`, with ψ constant.
pub fn map_objective_grad(
    model: &NeuralOtModel,
    source: &SampleBatch,
    exec: Exec,
) -> Result<(f64, MlpParams)> {
    if source.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dim(model.dim, source.dim())?;
    let (map, psi) = (&model.map_params, &model.potential_params);
    let d = model.dim;
    let inv_n = 1.0 / source.len() as f64;
    let parts = exec.map_chunks(source.len(), CHUNK, |r| {
        let x = &source.as_slice()[r.start * d..r.end * d];
        let tape_map = map.forward_tape(x, r.len())?;
        let tx = tape_map.output();
        let tape_psi = psi.forward_tape(tx, r.len())?;
        let psi_grad_in = psi.backward_tape(&tape_psi, &vec![1.0; r.len()], None)?;
        let mut value = 0.0;
        for (i, psi_val) in tape_psi.output().iter().enumerate() {
            let c = 0.5 * crate::batch::sq_dist(&x[i * d..(i + 1) * d], &tx[i * d..(i + 1) * d]);
            value += inv_n * (c - psi_val);
        }
        let upstream: Vec<f64> = tx
            .iter()
            .zip(x)
            .zip(&psi_grad_in)
            .map(|((t, x), gp)| inv_n * ((t - x) - gp))
            .collect();
        let mut g = map.zeros_like();
        map.backward_tape(&tape_map, &upstream, Some(&mut g))?;
        Ok((value, g))
    });
    sum_ordered(parts, map.zeros_like())
}

/// One ascent step on the potential. Returns the objective before the step.
pub fn psi_ascent_step(
    model: &mut NeuralOtModel,
    source: &SampleBatch,
    target: &SampleBatch,
    opt: &mut AdamState,
    exec: Exec,
) -> Result<f64> {
    let (value, grads) = potential_objective_grad(model, source, target, exec)?;
    opt.step(&mut model.potential_params, &grads, Direction::Ascent)?;
    Ok(value)
}

/// One descent step on the map. Returns the objective before the step.
pub fn map_descent_step(
    model: &mut NeuralOtModel,
    source: &SampleBatch,
    opt: &mut AdamState,
    exec: Exec,
) -> Result<f64> {
    let (value, grads) = map_objective_grad(model, source, exec)?;
    opt.step(&mut model.map_params, &grads, Direction::Descent)?;
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotTrainConfig {
    pub map_hidden: Vec<usize>,
    pub potential_hidden: Vec<usize>,
    pub activation: Activation,
    pub lr_map: f64,
    pub lr_potential: f64,
    pub batch_size: usize,
    /// Outer (potential) iterations.
    pub n_outer: usize,
    /// Map steps per potential step.
    pub k_map: usize,
    pub log_every: usize,
    pub seed: u64,
}

impl Default for NotTrainConfig {
    fn default() -> Self {
        NotTrainConfig {
            map_hidden: vec![64, 64, 64],
            potential_hidden: vec![64, 64, 64],
            activation: Activation::Relu,
            lr_map: 1e-3,
            lr_potential: 1e-3,
            batch_size: 128,
            n_outer: 2000,
            k_map: 10,
            log_every: 100,
            seed: 7,
        }
    }
}

impl NotTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.k_map == 0 || self.log_every == 0 {
            return Err(Error::Config(
                "batch_size, k_map and log_every must be positive".into(),
            ));
        }
        if self.map_hidden.contains(&0) || self.potential_hidden.contains(&0) {
            return Err(Error::Config("hidden widths must be positive".into()));
        }
        AdamConfig::with_lr(self.lr_map).validate()?;
        AdamConfig::with_lr(self.lr_potential).validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NotLogEntry {
    pub iteration: usize,
    pub potential_objective: f64,
    pub map_objective: f64,
}

/// Alternate one potential ascent step with `k_map` map descent steps.
pub fn train_neural_ot(
    config: &NotTrainConfig,
    source: &dyn SampleSource,
    target: &dyn SampleSource,
    rng: &mut Rng,
    exec: Exec,
) -> Result<(NeuralOtModel, Vec<NotLogEntry>)> {
    config.validate()?;
    check_dim(source.dim(), target.dim())?;
    let mut model = NeuralOtModel::init(source.dim(), config, rng)?;
    let mut psi_opt = AdamState::new(&model.potential_params, AdamConfig::with_lr(config.lr_potential));
    let mut map_opt = AdamState::new(&model.map_params, AdamConfig::with_lr(config.lr_map));
    let mut log = Vec::new();
    for it in 0..config.n_outer {
        let x = source.draw(config.batch_size, rng)?;
        let y = target.draw(config.batch_size, rng)?;
        let psi_val = psi_ascent_step(&mut model, &x, &y, &mut psi_opt, exec)?;
        if !psi_val.is_finite() {
            return Err(Error::NonFinite {
                what: "potential objective",
                iteration: it,
                value: psi_val,
            });
        }
        let mut map_val = 0.0;
        for _ in 0..config.k_map {
            let x = source.draw(config.batch_size, rng)?;
            map_val = map_descent_step(&mut model, &x, &mut map_opt, exec)?;
            if !map_val.is_finite() {
                return Err(Error::NonFinite {
                    what: "map objective",
                    iteration: it,
                    value: map_val,
                });
            }
        }
        if it % config.log_every == 0 || it + 1 == config.n_outer {
            log.push(NotLogEntry {
                iteration: it,
                potential_objective: psi_val,
                map_objective: map_val,
            });
        }
    }
    Ok((model, log))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub cov: Matrix,
}

impl GaussianSpec {
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        check_dim(mean.len(), cov.rows())?;
        check_dim(mean.len(), cov.cols())?;
        // Validates symmetry and positive-definiteness.
        spd_sqrt(&cov)?;
        Ok(GaussianSpec { mean, cov })
    }

    pub fn standard(dim: usize) -> Self {
        GaussianSpec {
            mean: vec![0.0; dim],
            cov: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// `x ↦ A x + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: Matrix,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.linear
            .matvec(x)
            .into_iter()
            .zip(&self.shift)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// Closed-form quadratic-cost OT map between two Gaussians.
pub fn gaussian_ot_map(a: &GaussianSpec, b: &GaussianSpec) -> Result<AffineMap> {
    check_dim(a.dim(), b.dim())?;
    let sa = spd_sqrt(&a.cov)?;
    let sa_inv = spd_inv_sqrt(&a.cov)?;
    spd_sqrt(&b.cov)?;
    let middle = spd_sqrt(&sa.matmul(&b.cov).matmul(&sa))?;
    let mut linear = sa_inv.matmul(&middle).matmul(&sa_inv);
    let n = linear.rows();
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (linear[(i, j)] + linear[(j, i)]);
            linear[(i, j)] = m;
            linear[(j, i)] = m;
        }
    }
    let am = linear.matvec(&a.mean);
    let shift = b.mean.iter().zip(&am).map(|(mb, x)| mb - x).collect();
    Ok(AffineMap { linear, shift })
}
