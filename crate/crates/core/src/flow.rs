//! The origin encoder and its contrastive consistency training.
//!
//! `E(x, t) = t·x + (1−t)·F([x, emb(t)])`, so `E(x, 1) = x` exactly. The
//! transported end of each trajectory sits at `t = 1`; training pulls the
//! encoding of the earlier pair member (`t1`) towards a stop-gradient copy of
//! the later one (`t2`), which is anchored by the boundary.

use serde::{Deserialize, Serialize};

use crate::batch::{SampleBatch, SampleSource};
use crate::bridge::{
    check_time, interpolate, sample_adjacent_pair, sample_timestep_pair, CotPair, NoiseLaw,
    PairMode, Schedule, TimeGrid,
};
use crate::error::{check_dim, Error, Result};
use crate::exec::{Exec, CHUNK};
use crate::neural_ot::{with_io, NeuralOtModel};
use crate::nn::{embed_dim, time_embed, Activation, AdamConfig, AdamState, Direction, MlpParams};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Source at `t = 0`, transported target at `t = 1`.
    #[default]
    TargetAtOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OtDirection {
    /// Trajectories run from `x` to `T(x)`.
    #[default]
    Forward,
    /// Trajectories run from `T'(y)` to `y`, with `T'` trained target → source.
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    #[default]
    SquaredL2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CotEncoder {
    body: MlpParams,
    n_freq: usize,
    grid: TimeGrid,
    sigma: f64,
    noise_law: NoiseLaw,
    orientation: Orientation,
}

impl CotEncoder {
    pub fn new(
        body: MlpParams,
        n_freq: usize,
        grid: TimeGrid,
        sigma: f64,
        noise_law: NoiseLaw,
    ) -> Result<Self> {
        let d = body.output_dim();
        check_dim(d + embed_dim(n_freq), body.input_dim())?;
        if !(sigma >= 0.0) {
            return Err(Error::invalid("noise scale must be non-negative"));
        }
        Ok(CotEncoder {
            body,
            n_freq,
            grid,
            sigma,
            noise_law,
            orientation: Orientation::TargetAtOne,
        })
    }

    pub fn init(dim: usize, config: &CotTrainConfig, rng: &mut Rng) -> Result<Self> {
        let dims = with_io(dim + embed_dim(config.n_freq), &config.hidden, dim);
        let body = MlpParams::init(&dims, config.activation, rng)?;
        Self::new(body, config.n_freq, config.grid()?, config.sigma, config.noise_law)
    }

    pub fn dim(&self) -> usize {
        self.body.output_dim()
    }

    pub fn body(&self) -> &MlpParams {
        &self.body
    }

    pub fn body_mut(&mut self) -> &mut MlpParams {
        &mut self.body
    }

    pub fn n_freq(&self) -> usize {
        self.n_freq
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn noise_law(&self) -> NoiseLaw {
        self.noise_law
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Noise multiplier applied to a standard normal draw at time `t`.
    pub fn noise_coefficient(&self, t: f64) -> f64 {
        self.noise_law.coefficient(t, self.sigma)
    }

    fn body_inputs(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let width = d + embed_dim(self.n_freq);
        let mut input = Vec::with_capacity(ts.len() * width);
        for (x, &t) in xs.chunks_exact(d).zip(ts) {
            input.extend_from_slice(x);
            input.extend(time_embed(t, self.n_freq)?);
        }
        Ok(input)
    }

    /// `E(x, t)` for one point.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_time(t)?;
        if t == 1.0 {
            return Ok(x.to_vec());
        }
        let f = self.body.forward(&self.body_inputs(x, &[t])?)?;
        Ok(combine(x, &f, t))
    }

    /// `E` over `ts.len()` row-major points.
    pub fn eval_batch(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        check_dim(ts.len() * d, xs.len())?;
        for &t in ts {
            check_time(t)?;
        }
        let f = self.body.forward_batch(&self.body_inputs(xs, ts)?, ts.len())?;
        let mut out = Vec::with_capacity(xs.len());
        for ((x, fr), &t) in xs.chunks_exact(d).zip(f.chunks_exact(d)).zip(ts) {
            if t == 1.0 {
                out.extend_from_slice(x);
            } else {
                out.extend(combine(x, fr, t));
            }
        }
        Ok(out)
    }

    /// Loss `Σ_rows ‖E(x_r, t_r) − target_r‖² · scale` and its gradient, with
    /// `target` treated as a constant.
    fn regression_grad(
        &self,
        xs: &[f64],
        ts: &[f64],
        targets: &[f64],
        scale: f64,
    ) -> Result<(f64, MlpParams)> {
        let d = self.dim();
        let n = ts.len();
        let tape = self.body.forward_tape(&self.body_inputs(xs, ts)?, n)?;
        let f = tape.output();
        let mut loss = 0.0;
        let mut upstream = vec![0.0; n * d];
        for (r, &t) in ts.iter().enumerate() {
            for k in 0..d {
                let i = r * d + k;
                let e = if t == 1.0 { xs[i] } else { t * xs[i] + (1.0 - t) * f[i] };
                let diff = e - targets[i];
                loss += scale * diff * diff;
                upstream[i] = scale * 2.0 * diff * (1.0 - t);
            }
        }
        let mut grads = self.body.zeros_like();
        self.body.backward_tape(&tape, &upstream, Some(&mut grads))?;
        Ok((loss, grads))
    }
}

#[inline]
fn combine(x: &[f64], f: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(f).map(|(xv, fv)| t * xv + (1.0 - t) * fv).collect()
}

pub fn encoder_eval(enc: &CotEncoder, x: &[f64], t: f64) -> Result<Vec<f64>> {
    enc.eval(x, t)
}

/// `‖E(x_{t1}, t1) − target‖²` and its gradient, `target` held fixed.
pub fn student_loss(
    enc: &CotEncoder,
    x: &[f64],
    t: f64,
    target: &[f64],
) -> Result<(f64, MlpParams)> {
    check_dim(enc.dim(), x.len())?;
    check_dim(enc.dim(), target.len())?;
    check_time(t)?;
    enc.regression_grad(x, &[t], target, 1.0)
}

/// Contrastive consistency loss for one pair; gradient flows only through
/// the earlier (`t1`) branch.
pub fn cot_loss(enc: &CotEncoder, pair: &CotPair) -> Result<(f64, MlpParams)> {
    let teacher = enc.eval(&pair.second().value, pair.second().t)?;
    student_loss(enc, &pair.first().value, pair.first().t, &teacher)
}

/// A minibatch of pairs, stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct PairBatch {
    pub dim: usize,
    pub first: Vec<f64>,
    pub t1: Vec<f64>,
    pub second: Vec<f64>,
    pub t2: Vec<f64>,
}

impl PairBatch {
    pub fn len(&self) -> usize {
        self.t1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t1.is_empty()
    }
}

/// Mean pair loss and its student-branch gradient.
pub fn cot_batch_loss(enc: &CotEncoder, batch: &PairBatch, exec: Exec) -> Result<(f64, MlpParams)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let d = enc.dim();
    check_dim(d, batch.dim)?;
    let scale = 1.0 / batch.len() as f64;
    let parts = exec.map_chunks(batch.len(), CHUNK, |r| {
        let rows = r.start * d..r.end * d;
        let teacher = enc.eval_batch(&batch.second[rows.clone()], &batch.t2[r.clone()])?;
        enc.regression_grad(&batch.first[rows], &batch.t1[r], &teacher, scale)
    });
    let mut loss = 0.0;
    let mut grads = enc.body.zeros_like();
    for p in parts {
        let (l, g) = p?;
        loss += l;
        grads.add_assign(&g);
    }
    Ok((loss, grads))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CotTrainConfig {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub n_freq: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub n_iters: usize,
    pub sigma: f64,
    /// Number of grid times `N`.
    pub n_steps: usize,
    pub schedule: Schedule,
    pub noise_law: NoiseLaw,
    pub distance: Distance,
    pub pair_mode: PairMode,
    pub ot_direction: OtDirection,
    pub seed: u64,
}

impl Default for CotTrainConfig {
    fn default() -> Self {
        CotTrainConfig {
            hidden: vec![128, 128, 128],
            activation: Activation::Relu,
            n_freq: 4,
            lr: 1e-3,
            batch_size: 128,
            n_iters: 20_000,
            sigma: 1.0,
            n_steps: 40,
            schedule: Schedule::Uniform,
            noise_law: NoiseLaw::Scaled,
            distance: Distance::SquaredL2,
            pair_mode: PairMode::CotPairs,
            ot_direction: OtDirection::Forward,
            seed: 7,
        }
    }
}

impl CotTrainConfig {
    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.n_steps, self.schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.n_freq == 0 || self.hidden.contains(&0) {
            return Err(Error::Config(
                "batch_size, n_freq and hidden widths must be positive".into(),
            ));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Config("sigma must be non-negative".into()));
        }
        if self.n_steps < 2 {
            return Err(Error::Config("n_steps must be at least 2".into()));
        }
        if let Schedule::Mode { s } = self.schedule {
            if !s.is_finite() {
                return Err(Error::Config("mode schedule parameter must be finite".into()));
            }
        }
        AdamConfig::with_lr(self.lr).validate()
    }
}

/// Trajectory endpoints `(start, end)` for a batch drawn from the OT map's domain.
pub fn trajectory_endpoints(
    data: &SampleBatch,
    ot: &NeuralOtModel,
    direction: OtDirection,
    exec: Exec,
) -> Result<(SampleBatch, SampleBatch)> {
    let mapped = ot.map_batch(data, exec)?;
    Ok(match direction {
        OtDirection::Forward => (data.clone(), mapped),
        OtDirection::Reverse => (mapped, data.clone()),
    })
}

/// Draw a pair for every row of `(start, end)` with independent noise per member.
pub fn sample_pair_batch(
    start: &SampleBatch,
    end: &SampleBatch,
    grid: &TimeGrid,
    sigma: f64,
    mode: PairMode,
    law: NoiseLaw,
    rng: &mut Rng,
) -> Result<PairBatch> {
    check_dim(start.dim(), end.dim())?;
    check_dim(start.len(), end.len())?;
    let d = start.dim();
    let n = start.len();
    let mut batch = PairBatch {
        dim: d,
        first: Vec::with_capacity(n * d),
        t1: Vec::with_capacity(n),
        second: Vec::with_capacity(n * d),
        t2: Vec::with_capacity(n),
    };
    let mut z = vec![0.0; d];
    for r in 0..n {
        let (n1, n2) = match mode {
            PairMode::CotPairs => sample_timestep_pair(grid, rng),
            PairMode::AdjacentPairs => sample_adjacent_pair(grid, rng),
        };
        let (t1, t2) = (grid.time(n1), grid.time(n2));
        rng.fill_normal(&mut z);
        batch
            .first
            .extend(interpolate(start.row(r), end.row(r), t1, law.coefficient(t1, sigma), &z));
        batch.t1.push(t1);
        rng.fill_normal(&mut z);
        batch
            .second
            .extend(interpolate(start.row(r), end.row(r), t2, law.coefficient(t2, sigma), &z));
        batch.t2.push(t2);
    }
    Ok(batch)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CotTrainLog {
    pub losses: Vec<f64>,
}

impl CotTrainLog {
    /// Mean of the `window` losses ending at iteration `end` (exclusive).
    pub fn moving_average(&self, end: usize, window: usize) -> Option<f64> {
        if end > self.losses.len() || window == 0 || end < window {
            return None;
        }
        Some(self.losses[end - window..end].iter().sum::<f64>() / window as f64)
    }
}

/// Train an encoder on pairs drawn along `start → end` trajectories.
///
/// `data` is the OT map's input distribution: the source for
/// [`OtDirection::Forward`], the target for [`OtDirection::Reverse`].
pub fn train_cot(
    config: &CotTrainConfig,
    data: &dyn SampleSource,
    ot: &NeuralOtModel,
    rng: &mut Rng,
    exec: Exec,
) -> Result<(CotEncoder, CotTrainLog)> {
    config.validate()?;
    check_dim(ot.dim(), data.dim())?;
    let mut enc = CotEncoder::init(data.dim(), config, rng)?;
    let mut opt = AdamState::new(&enc.body, AdamConfig::with_lr(config.lr));
    let grid = config.grid()?;
    let mut log = CotTrainLog::default();
    for it in 0..config.n_iters {
        let batch = data.draw(config.batch_size, rng)?;
        let (start, end) = trajectory_endpoints(&batch, ot, config.ot_direction, exec)?;
        let pairs = sample_pair_batch(
            &start,
            &end,
            &grid,
            config.sigma,
            config.pair_mode,
            config.noise_law,
            rng,
        )?;
        let (loss, grads) = cot_batch_loss(&enc, &pairs, exec)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                what: "contrastive loss",
                iteration: it,
                value: loss,
            });
        }
        log.losses.push(loss);
        opt.step(&mut enc.body, &grads, Direction::Descent)?;
    }
    Ok((enc, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::AugmentationPoint;
    use crate::neural_ot::NotTrainConfig;

    fn small_encoder(d: usize, seed: u64) -> CotEncoder {
        let mut rng = Rng::new(seed);
        let body = MlpParams::init(&[d + embed_dim(2), 6, d], Activation::Tanh, &mut rng).unwrap();
        CotEncoder::new(body, 2, TimeGrid::new(5, Schedule::Uniform).unwrap(), 1.0, NoiseLaw::Scaled)
            .unwrap()
    }

    fn pair(x1: Vec<f64>, t1: f64, x2: Vec<f64>, t2: f64) -> CotPair {
        let src = vec![0.0; x1.len()];
        let point = |value, t| AugmentationPoint {
            value,
            t,
            source: src.clone(),
            mapped: src.clone(),
        };
        CotPair::new(point(x1, t1), point(x2, t2)).unwrap()
    }

    #[test]
    fn boundary_and_schedule_arithmetic() {
        let enc = small_encoder(3, 1);
        let x = [0.3, -7.0, 1e6];
        assert_eq!(enc.eval(&x, 1.0).unwrap(), x.to_vec());
        let zero = CotEncoder::new(
            MlpParams::zeros(&[3 + embed_dim(2), 4, 3], Activation::Relu).unwrap(),
            2,
            TimeGrid::new(5, Schedule::Uniform).unwrap(),
            1.0,
            NoiseLaw::Scaled,
        )
        .unwrap();
        assert_eq!(zero.eval(&x, 0.0).unwrap(), vec![0.0; 3]);

        let one_d = small_encoder(1, 2);
        let f = one_d.body.forward(&one_d.body_inputs(&[0.8], &[0.5]).unwrap()).unwrap();
        assert_eq!(one_d.eval(&[0.8], 0.5).unwrap()[0], 0.5 * 0.8 + 0.5 * f[0]);
        assert!(enc.eval(&x, 1.1).is_err());
        assert!(enc.eval(&x[..2], 0.5).is_err());
    }

    #[test]
    fn body_input_width_checked() {
        let body = MlpParams::zeros(&[4, 3, 2], Activation::Relu).unwrap();
        let grid = TimeGrid::new(5, Schedule::Uniform).unwrap();
        assert!(CotEncoder::new(body, 2, grid, 1.0, NoiseLaw::Scaled).is_err());
    }

    #[test]
    fn batch_eval_matches_pointwise() {
        let enc = small_encoder(2, 3);
        let xs = [0.1, 0.2, -1.0, 3.0, 0.5, 0.5];
        let ts = [0.0, 0.37, 1.0];
        let out = enc.eval_batch(&xs, &ts).unwrap();
        for r in 0..3 {
            assert_eq!(&out[2 * r..2 * r + 2], enc.eval(&xs[2 * r..2 * r + 2], ts[r]).unwrap().as_slice());
        }
    }

    #[test]
    fn equal_branches_give_zero_loss() {
        let enc = small_encoder(2, 4);
        let x = vec![0.4, 0.4];
        // The t = 1 teacher returns its input, which equals the student output.
        let p = pair(x.clone(), 0.5, enc.eval(&x, 0.5).unwrap(), 1.0);
        let (loss, grads) = cot_loss(&enc, &p).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.blocks().all(|b| b.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn boundary_teacher_is_regression() {
        let enc = small_encoder(2, 5);
        let p = pair(vec![0.1, -0.3], 0.25, vec![2.0, 1.0], 1.0);
        let (loss, _) = cot_loss(&enc, &p).unwrap();
        let e = enc.eval(&[0.1, -0.3], 0.25).unwrap();
        let want = (e[0] - 2.0).powi(2) + (e[1] - 1.0).powi(2);
        assert!((loss - want).abs() < 1e-14);
    }

    #[test]
    fn gradient_flows_only_through_student() {
        let enc = small_encoder(2, 6);
        let p = pair(vec![0.1, -0.3], 0.25, vec![0.7, 0.2], 0.75);
        let teacher = enc.eval(&p.second().value, 0.75).unwrap();
        let (_, g) = cot_loss(&enc, &p).unwrap();
        let (_, frozen) = student_loss(&enc, &p.first().value, 0.25, &teacher).unwrap();
        assert_eq!(g, frozen);
        let shifted: Vec<f64> = teacher.iter().map(|v| v + 1.0).collect();
        let (l1, _) = student_loss(&enc, &p.first().value, 0.25, &teacher).unwrap();
        let (l2, _) = student_loss(&enc, &p.first().value, 0.25, &shifted).unwrap();
        assert_ne!(l1, l2);
    }

    #[test]
    fn student_gradient_matches_finite_differences() {
        let enc = small_encoder(2, 7);
        let x = [0.3, -0.8];
        let target = [1.0, 0.5];
        let (_, g) = student_loss(&enc, &x, 0.4, &target).unwrap();
        let h = 1e-6;
        let analytic: Vec<f64> = g.blocks().flat_map(|b| b.to_vec()).collect();
        let mut k = 0;
        let n_blocks = enc.body.blocks().count();
        for b in 0..n_blocks {
            let len = enc.body.blocks().nth(b).unwrap().len();
            for i in 0..len {
                let mut plus = enc.clone();
                plus.body.blocks_mut().nth(b).unwrap()[i] += h;
                let mut minus = enc.clone();
                minus.body.blocks_mut().nth(b).unwrap()[i] -= h;
                let fd = (student_loss(&plus, &x, 0.4, &target).unwrap().0
                    - student_loss(&minus, &x, 0.4, &target).unwrap().0)
                    / (2.0 * h);
                let a = analytic[k];
                assert!((a - fd).abs() <= 1e-4 * a.abs().max(fd.abs()).max(1e-3), "{a} vs {fd}");
                k += 1;
            }
        }
    }

    #[test]
    fn batch_loss_is_mean_of_pair_losses() {
        let enc = small_encoder(2, 8);
        let mut rng = Rng::new(1);
        let start = SampleBatch::new(2, rng.normal_vec(2 * 70)).unwrap();
        let end = SampleBatch::new(2, rng.normal_vec(2 * 70)).unwrap();
        let grid = TimeGrid::new(6, Schedule::Uniform).unwrap();
        let pb = sample_pair_batch(&start, &end, &grid, 1.0, PairMode::CotPairs, NoiseLaw::Scaled, &mut rng)
            .unwrap();
        let (loss, _) = cot_batch_loss(&enc, &pb, Exec::Parallel).unwrap();
        let (seq, _) = cot_batch_loss(&enc, &pb, Exec::Sequential).unwrap();
        assert_eq!(loss, seq);
        let mut total = 0.0;
        for r in 0..pb.len() {
            let p = pair(pb.first[2 * r..2 * r + 2].to_vec(), pb.t1[r], pb.second[2 * r..2 * r + 2].to_vec(), pb.t2[r]);
            total += cot_loss(&enc, &p).unwrap().0;
        }
        assert!((loss - total / 70.0).abs() < 1e-12);
        assert!(pb.t1.iter().zip(&pb.t2).all(|(a, b)| a < b));
    }

    fn tiny_config() -> CotTrainConfig {
        CotTrainConfig {
            hidden: vec![8],
            n_iters: 3,
            batch_size: 16,
            n_steps: 5,
            ..CotTrainConfig::default()
        }
    }

    fn tiny_ot(rng: &mut Rng) -> NeuralOtModel {
        let cfg = NotTrainConfig {
            map_hidden: vec![4],
            potential_hidden: vec![4],
            ..NotTrainConfig::default()
        };
        NeuralOtModel::init(2, &cfg, rng).unwrap()
    }

    #[test]
    fn zero_iterations_returns_initialization() {
        let mut rng = Rng::new(3);
        let ot = tiny_ot(&mut rng);
        let data = SampleBatch::new(2, rng.normal_vec(64)).unwrap();
        let cfg = CotTrainConfig { n_iters: 0, ..tiny_config() };
        let (enc, log) = train_cot(&cfg, &data, &ot, &mut Rng::new(9), Exec::Sequential).unwrap();
        let fresh = CotEncoder::init(2, &cfg, &mut Rng::new(9)).unwrap();
        assert_eq!(enc, fresh);
        assert!(log.losses.is_empty());
    }

    #[test]
    fn zero_learning_rate_keeps_parameters() {
        let mut rng = Rng::new(4);
        let ot = tiny_ot(&mut rng);
        let data = SampleBatch::new(2, rng.normal_vec(64)).unwrap();
        let cfg = CotTrainConfig { lr: 0.0, ..tiny_config() };
        let (enc, log) = train_cot(&cfg, &data, &ot, &mut Rng::new(9), Exec::Sequential).unwrap();
        let fresh = CotEncoder::init(2, &cfg, &mut Rng::new(9)).unwrap();
        assert_eq!(enc.body(), fresh.body());
        assert_eq!(log.losses.len(), 3);
    }

    #[test]
    fn training_is_deterministic_across_exec_modes() {
        let mut rng = Rng::new(5);
        let ot = tiny_ot(&mut rng);
        let data = SampleBatch::new(2, rng.normal_vec(128)).unwrap();
        let cfg = CotTrainConfig { batch_size: 40, ..tiny_config() };
        let a = train_cot(&cfg, &data, &ot, &mut Rng::new(1), Exec::Sequential).unwrap();
        let b = train_cot(&cfg, &data, &ot, &mut Rng::new(1), Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(CotTrainConfig::default().validate().is_ok());
        assert!(CotTrainConfig { n_steps: 1, ..CotTrainConfig::default() }.validate().is_err());
        assert!(CotTrainConfig { sigma: -1.0, ..CotTrainConfig::default() }.validate().is_err());
        assert!(CotTrainConfig { batch_size: 0, ..CotTrainConfig::default() }.validate().is_err());
    }

    #[test]
    fn moving_average_windows() {
        let log = CotTrainLog { losses: vec![1.0, 2.0, 3.0, 4.0] };
        assert_eq!(log.moving_average(4, 2), Some(3.5));
        assert_eq!(log.moving_average(5, 2), None);
        assert_eq!(log.moving_average(1, 2), None);
    }
}
