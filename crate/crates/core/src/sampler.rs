//! One-step and iterative samplers, and the three guided editing operations.

use crate::batch::SampleBatch;
use crate::bridge::{check_time, interpolate};
use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::flow::CotEncoder;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    SelfAugmentation,
    Ancestral,
}

/// Refinement times, each strictly inside `(0, 1)`.
///
/// Self-augmentation times need not be monotone. Ancestral times are read in
/// the interpolation convention where the source carries weight `t` (with an
/// implicit `t_0 = 1`) and must strictly decrease.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSchedule {
    steps: Vec<f64>,
    kind: ScheduleKind,
}

impl SampleSchedule {
    pub fn new(steps: Vec<f64>, kind: ScheduleKind) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invalid("sampling schedule is empty"));
        }
        if let Some(t) = steps.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::invalid(format!("schedule time {t} not inside (0, 1)")));
        }
        if kind == ScheduleKind::Ancestral && steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("ancestral schedule must strictly decrease"));
        }
        Ok(SampleSchedule { steps, kind })
    }

    /// `k / (K + 1)` for `k = 1..=K`.
    pub fn uniform_increasing(k: usize) -> Result<Self> {
        let steps = (1..=k).map(|i| i as f64 / (k + 1) as f64).collect();
        Self::new(steps, ScheduleKind::SelfAugmentation)
    }

    /// `1 − k / (K + 1)` for `k = 1..=K`.
    pub fn uniform_decreasing(k: usize) -> Result<Self> {
        let steps = (1..=k).map(|i| 1.0 - i as f64 / (k + 1) as f64).collect();
        Self::new(steps, ScheduleKind::Ancestral)
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sampler {
    OneStep,
    SelfAugmentation(SampleSchedule),
    Ancestral(SampleSchedule),
}

impl Sampler {
    pub fn self_augmentation(schedule: SampleSchedule) -> Result<Self> {
        match schedule.kind {
            ScheduleKind::SelfAugmentation => Ok(Sampler::SelfAugmentation(schedule)),
            ScheduleKind::Ancestral => Err(Error::invalid("expected a self-augmentation schedule")),
        }
    }

    pub fn ancestral(schedule: SampleSchedule) -> Result<Self> {
        match schedule.kind {
            ScheduleKind::Ancestral => Ok(Sampler::Ancestral(schedule)),
            ScheduleKind::SelfAugmentation => Err(Error::invalid("expected an ancestral schedule")),
        }
    }

    /// Network evaluations per sample: the initial one-step estimate plus one per step.
    pub fn nfe(&self) -> usize {
        match self {
            Sampler::OneStep => 1,
            Sampler::SelfAugmentation(s) | Sampler::Ancestral(s) => s.steps.len() + 1,
        }
    }
}

/// `E(x, 0)`: translate a source point in one evaluation.
pub fn sample_one_step(enc: &CotEncoder, x: &[f64]) -> Result<Vec<f64>> {
    enc.eval(x, 0.0)
}

/// Every intermediate estimate `ỹ^(1), …, ỹ^(K+1)` of the self-augmentation sampler.
pub fn sample_multi_step_trace(
    enc: &CotEncoder,
    x: &[f64],
    schedule: &SampleSchedule,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    if schedule.kind != ScheduleKind::SelfAugmentation {
        return Err(Error::invalid("expected a self-augmentation schedule"));
    }
    let mut trace = vec![sample_one_step(enc, x)?];
    let mut z = vec![0.0; x.len()];
    for &t in &schedule.steps {
        rng.fill_normal(&mut z);
        let y = trace.last().expect("non-empty trace");
        let mixed = interpolate(x, y, t, enc.noise_coefficient(t), &z);
        trace.push(enc.eval(&mixed, t)?);
    }
    Ok(trace)
}

/// Re-mix the current estimate with the source and re-encode, once per step.
pub fn sample_multi_step(
    enc: &CotEncoder,
    x: &[f64],
    schedule: &SampleSchedule,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    Ok(sample_multi_step_trace(enc, x, schedule, rng)?
        .pop()
        .expect("non-empty trace"))
}

/// `(t/t_prev)·prev + (1 − t/t_prev)·y + coeff·z`.
pub(crate) fn ancestral_mix(
    prev: &[f64],
    y: &[f64],
    t_prev: f64,
    t: f64,
    coeff: f64,
    z: &[f64],
) -> Vec<f64> {
    let ratio = t / t_prev;
    prev.iter()
        .zip(y)
        .zip(z)
        .map(|((p, yv), zv)| ratio * p + (1.0 - ratio) * yv + coeff * zv)
        .collect()
}

/// Ancestral-style sampler: each step re-mixes the previous augmented state
/// rather than the source.
pub fn sample_ancestral(
    enc: &CotEncoder,
    x: &[f64],
    schedule: &SampleSchedule,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    if schedule.kind != ScheduleKind::Ancestral {
        return Err(Error::invalid("expected an ancestral schedule"));
    }
    let mut y = sample_one_step(enc, x)?;
    let mut state = x.to_vec();
    let mut t_prev = 1.0;
    let mut z = vec![0.0; x.len()];
    for &t in &schedule.steps {
        rng.fill_normal(&mut z);
        state = ancestral_mix(&state, &y, t_prev, t, enc.noise_coefficient(t), &z);
        // Source weight t corresponds to encoder time 1 − t.
        y = enc.eval(&state, 1.0 - t)?;
        t_prev = t;
    }
    Ok(y)
}

/// Apply `sampler` to every row; row `i` uses substream `i` of a fork of `rng`.
pub fn sample_batch(
    enc: &CotEncoder,
    xs: &SampleBatch,
    sampler: &Sampler,
    rng: &mut Rng,
    exec: Exec,
) -> Result<SampleBatch> {
    check_dim(enc.dim(), xs.dim())?;
    let base = rng.fork();
    let rows = exec.map(xs.len(), |i| {
        let x = xs.row(i);
        let mut r = base.substream(i as u64);
        match sampler {
            Sampler::OneStep => sample_one_step(enc, x),
            Sampler::SelfAugmentation(s) => sample_multi_step(enc, x, s, &mut r),
            Sampler::Ancestral(s) => sample_ancestral(enc, x, s, &mut r),
        }
    });
    let mut data = Vec::with_capacity(xs.len() * xs.dim());
    for r in rows {
        data.extend(r?);
    }
    SampleBatch::new(xs.dim(), data)
}

/// Target-side point with some coordinates overwritten.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedGuidance {
    base: Vec<f64>,
    mask: Vec<bool>,
    patch: Vec<f64>,
}

impl MaskedGuidance {
    pub fn new(base: Vec<f64>, mask: Vec<bool>, patch: Vec<f64>) -> Result<Self> {
        check_dim(base.len(), mask.len())?;
        check_dim(base.len(), patch.len())?;
        Ok(MaskedGuidance { base, mask, patch })
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn patch(&self) -> &[f64] {
        &self.patch
    }
}

/// Masked overwrite: `patch[i]` where `mask[i]`, else `base[i]`.
pub fn compose_guidance(g: &MaskedGuidance) -> Vec<f64> {
    g.base
        .iter()
        .zip(&g.mask)
        .zip(&g.patch)
        .map(|((b, m), p)| if *m { *p } else { *b })
        .collect()
}

fn add_noise(v: &[f64], coeff: f64, z: &[f64]) -> Vec<f64> {
    if coeff == 0.0 {
        return v.to_vec();
    }
    v.iter().zip(z).map(|(a, b)| a + coeff * b).collect()
}

/// Re-encode a guided target-side point at time `t_g`.
pub fn edit_compose(enc: &CotEncoder, g: &MaskedGuidance, t_g: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    check_time(t_g)?;
    check_dim(enc.dim(), g.base.len())?;
    let z = rng.normal_vec(enc.dim());
    let guided = compose_guidance(g);
    enc.eval(&add_noise(&guided, enc.noise_coefficient(t_g), &z), t_g)
}

/// Fuse a shape input (weight `t_c`) with a texture input and re-encode.
pub fn edit_couple(
    enc: &CotEncoder,
    shape: &[f64],
    texture: &[f64],
    t_c: f64,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    check_time(t_c)?;
    check_dim(enc.dim(), shape.len())?;
    check_dim(enc.dim(), texture.len())?;
    let z = rng.normal_vec(enc.dim());
    let mixed = interpolate(texture, shape, t_c, enc.noise_coefficient(t_c), &z);
    enc.eval(&mixed, t_c)
}

/// Fuse one fixed anchor with each driver in turn.
pub fn edit_augment(
    enc: &CotEncoder,
    anchor: &[f64],
    drivers: &SampleBatch,
    t_a: f64,
    rng: &mut Rng,
) -> Result<SampleBatch> {
    check_time(t_a)?;
    check_dim(enc.dim(), anchor.len())?;
    check_dim(enc.dim(), drivers.dim())?;
    let base = rng.fork();
    let coeff = enc.noise_coefficient(t_a);
    let mut out = Vec::with_capacity(drivers.len() * drivers.dim());
    for (i, driver) in drivers.rows().enumerate() {
        let z = base.substream(i as u64).normal_vec(enc.dim());
        out.extend(enc.eval(&interpolate(driver, anchor, t_a, coeff, &z), t_a)?);
    }
    SampleBatch::new(drivers.dim(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{NoiseLaw, Schedule, TimeGrid};
    use crate::nn::{Activation, MlpParams};

    fn encoder(d: usize, sigma: f64, seed: u64) -> CotEncoder {
        let mut rng = Rng::new(seed);
        let body = MlpParams::init(&[d + 5, 8, d], Activation::Tanh, &mut rng).unwrap();
        let grid = TimeGrid::new(10, Schedule::Uniform).unwrap();
        CotEncoder::new(body, 2, grid, sigma, NoiseLaw::Scaled).unwrap()
    }

    fn zero_encoder(d: usize) -> CotEncoder {
        let body = MlpParams::zeros(&[d + 5, 4, d], Activation::Relu).unwrap();
        let grid = TimeGrid::new(10, Schedule::Uniform).unwrap();
        CotEncoder::new(body, 2, grid, 1.0, NoiseLaw::Scaled).unwrap()
    }

    #[test]
    fn one_step_of_zero_body_is_zero() {
        let enc = zero_encoder(3);
        assert_eq!(sample_one_step(&enc, &[1.0, -2.0, 5.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn schedule_validation() {
        assert!(SampleSchedule::new(vec![], ScheduleKind::SelfAugmentation).is_err());
        assert!(SampleSchedule::new(vec![0.5, 1.0], ScheduleKind::SelfAugmentation).is_err());
        assert!(SampleSchedule::new(vec![0.3, 0.7], ScheduleKind::SelfAugmentation).is_ok());
        assert!(SampleSchedule::new(vec![0.7, 0.2, 0.6], ScheduleKind::SelfAugmentation).is_ok());
        assert!(SampleSchedule::new(vec![0.3, 0.7], ScheduleKind::Ancestral).is_err());
        assert!(SampleSchedule::new(vec![0.5, 0.5], ScheduleKind::Ancestral).is_err());
        let s = SampleSchedule::uniform_increasing(40).unwrap();
        assert_eq!(s.steps().len(), 40);
        assert_eq!(s.steps()[0], 1.0 / 41.0);
        let a = SampleSchedule::uniform_decreasing(4).unwrap();
        assert_eq!(a.steps(), &[0.8, 0.6, 0.4, 0.19999999999999996]);
    }

    #[test]
    fn single_noise_free_step_formula() {
        let enc = encoder(2, 0.0, 3);
        let x = [0.4, -1.1];
        let s = SampleSchedule::new(vec![0.5], ScheduleKind::SelfAugmentation).unwrap();
        let y1 = sample_one_step(&enc, &x).unwrap();
        let mixed: Vec<f64> = x.iter().zip(&y1).map(|(a, b)| 0.5 * b + 0.5 * a).collect();
        let expected = enc.eval(&mixed, 0.5).unwrap();
        assert_eq!(sample_multi_step(&enc, &x, &s, &mut Rng::new(1)).unwrap(), expected);
    }

    #[test]
    fn near_one_step_is_near_identity_on_estimate() {
        let enc = encoder(2, 0.0, 4);
        let x = [0.4, -1.1];
        let s = SampleSchedule::new(vec![1.0 - 1e-9], ScheduleKind::SelfAugmentation).unwrap();
        let y1 = sample_one_step(&enc, &x).unwrap();
        let y2 = sample_multi_step(&enc, &x, &s, &mut Rng::new(1)).unwrap();
        for (a, b) in y1.iter().zip(&y2) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn ancestral_mixing_rules() {
        // Ratio 1 leaves the state untouched.
        let prev = [0.3, 2.0];
        assert_eq!(ancestral_mix(&prev, &[9.0, 9.0], 0.5, 0.5, 0.0, &[1.0, 1.0]), prev.to_vec());
        // One step from t_0 = 1 to 0.5 with σ = 0.
        let enc = encoder(2, 0.0, 5);
        let x = [1.0, -0.5];
        let y1 = sample_one_step(&enc, &x).unwrap();
        let s = SampleSchedule::new(vec![0.5], ScheduleKind::Ancestral).unwrap();
        let state: Vec<f64> = x.iter().zip(&y1).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
        let expected = enc.eval(&state, 0.5).unwrap();
        assert_eq!(sample_ancestral(&enc, &x, &s, &mut Rng::new(2)).unwrap(), expected);
        assert!(sample_ancestral(&enc, &x, &SampleSchedule::uniform_increasing(2).unwrap(), &mut Rng::new(2)).is_err());
    }

    #[test]
    fn guidance_composition() {
        let all_false = MaskedGuidance::new(vec![1.0, 2.0], vec![false; 2], vec![9.0, 9.0]).unwrap();
        assert_eq!(compose_guidance(&all_false), vec![1.0, 2.0]);
        let all_true = MaskedGuidance::new(vec![1.0, 2.0], vec![true; 2], vec![9.0, 8.0]).unwrap();
        assert_eq!(compose_guidance(&all_true), vec![9.0, 8.0]);
        let half = MaskedGuidance::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![true, true, false, false],
            vec![9.0, 9.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(compose_guidance(&half), vec![9.0, 9.0, 3.0, 4.0]);
        assert!(MaskedGuidance::new(vec![1.0], vec![true, false], vec![0.0]).is_err());
    }

    #[test]
    fn editors_at_boundaries() {
        let enc = encoder(3, 1.0, 6);
        let mut rng = Rng::new(10);
        let g = MaskedGuidance::new(vec![0.1, 0.2, 0.3], vec![true, false, false], vec![5.0, 0.0, 0.0]).unwrap();
        assert_eq!(edit_compose(&enc, &g, 1.0, &mut rng).unwrap(), compose_guidance(&g));
        assert_eq!(
            edit_compose(&enc, &g, 0.0, &mut rng).unwrap(),
            enc.eval(&compose_guidance(&g), 0.0).unwrap()
        );
        let shape = [1.0, 2.0, 3.0];
        let texture = [-1.0, 0.5, 0.0];
        assert_eq!(edit_couple(&enc, &shape, &texture, 1.0, &mut rng).unwrap(), shape.to_vec());
        assert_eq!(
            edit_couple(&enc, &shape, &texture, 0.0, &mut rng).unwrap(),
            enc.eval(&texture, 0.0).unwrap()
        );
        let quiet = encoder(3, 0.0, 6);
        let mid: Vec<f64> = shape.iter().zip(&texture).map(|(s, t)| 0.5 * s + 0.5 * t).collect();
        let got = edit_couple(&quiet, &shape, &texture, 0.5, &mut rng).unwrap();
        let want = quiet.eval(&mid, 0.5).unwrap();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
        let drivers = SampleBatch::new(3, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let out = edit_augment(&enc, &shape, &drivers, 1.0, &mut rng).unwrap();
        assert!(out.rows().all(|r| r == shape));
        let out = edit_augment(&enc, &shape, &drivers, 0.0, &mut rng).unwrap();
        for (o, d) in out.rows().zip(drivers.rows()) {
            assert_eq!(o, enc.eval(d, 0.0).unwrap().as_slice());
        }
        assert!(edit_couple(&enc, &shape, &[1.0], 0.5, &mut rng).is_err());
        assert!(edit_compose(&enc, &g, 1.5, &mut rng).is_err());
    }

    #[test]
    fn batch_matches_pointwise_substreams() {
        let enc = encoder(2, 1.0, 8);
        let mut rng = Rng::new(3);
        let xs = SampleBatch::new(2, rng.normal_vec(2 * 17)).unwrap();
        let sched = SampleSchedule::uniform_increasing(5).unwrap();
        for sampler in [
            Sampler::OneStep,
            Sampler::SelfAugmentation(sched.clone()),
            Sampler::Ancestral(SampleSchedule::uniform_decreasing(5).unwrap()),
        ] {
            let mut r1 = Rng::new(99);
            let out = sample_batch(&enc, &xs, &sampler, &mut r1, Exec::Parallel).unwrap();
            let seq = sample_batch(&enc, &xs, &sampler, &mut Rng::new(99), Exec::Sequential).unwrap();
            assert_eq!(out, seq);
            let base = Rng::new(99).fork();
            for i in 0..xs.len() {
                let mut ri = base.substream(i as u64);
                let single = match &sampler {
                    Sampler::OneStep => sample_one_step(&enc, xs.row(i)).unwrap(),
                    Sampler::SelfAugmentation(s) => sample_multi_step(&enc, xs.row(i), s, &mut ri).unwrap(),
                    Sampler::Ancestral(s) => sample_ancestral(&enc, xs.row(i), s, &mut ri).unwrap(),
                };
                assert_eq!(out.row(i), single.as_slice());
            }
        }
    }
}
