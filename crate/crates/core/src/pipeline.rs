//! Translation tasks and the five-variant ablation study.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::batch::{SampleBatch, SampleSource};
use crate::bridge::PairMode;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::flow::{train_cot, CotEncoder, CotTrainConfig, CotTrainLog, OtDirection};
use crate::io::Distribution;
use crate::neural_ot::{train_neural_ot, NotTrainConfig};
use crate::oracles::{energy_distance_with, sliced_w2_with};
use crate::rng::Rng;
use crate::sampler::{sample_batch, SampleSchedule, Sampler};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    GaussianToEightGaussians,
    EightGaussiansToMoons,
    CheckerboardToSpiral,
    GlyphOutlineToFilled,
}

impl Task {
    pub const ALL: [Task; 4] = [
        Task::GaussianToEightGaussians,
        Task::EightGaussiansToMoons,
        Task::CheckerboardToSpiral,
        Task::GlyphOutlineToFilled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::GaussianToEightGaussians => "gaussian_to_eight_gaussians",
            Task::EightGaussiansToMoons => "eight_gaussians_to_moons",
            Task::CheckerboardToSpiral => "checkerboard_to_spiral",
            Task::GlyphOutlineToFilled => "glyph_outline_to_filled",
        }
    }

    pub fn distributions(self) -> (Distribution, Distribution) {
        let (a, b) = match self {
            Task::GaussianToEightGaussians => ("gaussian", "eight_gaussians"),
            Task::EightGaussiansToMoons => ("eight_gaussians", "moons"),
            Task::CheckerboardToSpiral => ("checkerboard", "spiral"),
            Task::GlyphOutlineToFilled => ("glyph_outline", "glyph_filled"),
        };
        (a.parse().expect("known family"), b.parse().expect("known family"))
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown task '{s}'")))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationConfig {
    pub not: NotTrainConfig,
    pub cot: CotTrainConfig,
    /// Held-out samples per side for evaluation.
    pub n_eval: usize,
    pub n_proj: usize,
    /// Refinement steps for the multi-step variants.
    pub steps: usize,
    pub seed: u64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            not: NotTrainConfig::default(),
            cot: CotTrainConfig::default(),
            n_eval: 4096,
            n_proj: 64,
            steps: 40,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub variant: String,
    pub nfe: usize,
    pub energy_distance: f64,
    pub sliced_w2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationReport {
    /// Rows in the order adjacent_pairs, reverse_ot, ancestral-K, self-aug-K, one-step.
    pub rows: Vec<AblationRow>,
    /// Energy distance between the held-out source and target sets.
    pub baseline_energy: f64,
    /// The default-variant encoder and its loss trace.
    pub encoder: CotEncoder,
    pub log: CotTrainLog,
    pub eval_source: SampleBatch,
    pub eval_target: SampleBatch,
}

impl AblationReport {
    pub fn row(&self, variant: &str) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.variant == variant)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("variant,nfe,energy_distance,sliced_w2\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:.16e},{:.16e}\n",
                r.variant, r.nfe, r.energy_distance, r.sliced_w2
            ));
        }
        s
    }
}

/// Train the forward and reverse OT maps and three encoders, then score the
/// five variants on held-out data. Model ablations sample in one step.
pub fn run_ablation(task: Task, config: &AblationConfig, exec: Exec) -> Result<AblationReport> {
    if config.n_eval == 0 || config.n_proj == 0 || config.steps == 0 {
        return Err(Error::invalid("n_eval, n_proj and steps must be positive"));
    }
    let (source, target) = task.distributions();
    let root = Rng::new(config.seed);
    let (forward, _) = train_neural_ot(&config.not, &source, &target, &mut root.substream(0), exec)?;
    let (reverse, _) = train_neural_ot(&config.not, &target, &source, &mut root.substream(1), exec)?;

    let (encoder, log) = train_cot(&config.cot, &source, &forward, &mut root.substream(2), exec)?;
    let adjacent_cfg = CotTrainConfig {
        pair_mode: PairMode::AdjacentPairs,
        ..config.cot.clone()
    };
    let (adjacent, _) = train_cot(&adjacent_cfg, &source, &forward, &mut root.substream(3), exec)?;
    let reverse_cfg = CotTrainConfig {
        ot_direction: OtDirection::Reverse,
        ..config.cot.clone()
    };
    let (reversed, _) = train_cot(&reverse_cfg, &target, &reverse, &mut root.substream(4), exec)?;

    let eval_source = source.draw(config.n_eval, &mut root.substream(5))?;
    let eval_target = target.draw(config.n_eval, &mut root.substream(6))?;
    let k = config.steps;
    let variants = [
        ("adjacent_pairs".to_string(), &adjacent, Sampler::OneStep),
        ("reverse_ot".to_string(), &reversed, Sampler::OneStep),
        (
            format!("ancestral-{k}"),
            &encoder,
            Sampler::Ancestral(SampleSchedule::uniform_decreasing(k)?),
        ),
        (
            format!("self-aug-{k}"),
            &encoder,
            Sampler::SelfAugmentation(SampleSchedule::uniform_increasing(k)?),
        ),
        ("one-step".to_string(), &encoder, Sampler::OneStep),
    ];
    let mut rows = Vec::with_capacity(variants.len());
    for (i, (variant, enc, sampler)) in variants.into_iter().enumerate() {
        let generated = sample_batch(enc, &eval_source, &sampler, &mut root.substream(10 + i as u64), exec)?;
        rows.push(AblationRow {
            variant,
            nfe: sampler.nfe(),
            energy_distance: energy_distance_with(&generated, &eval_target, exec)?,
            sliced_w2: sliced_w2_with(&generated, &eval_target, config.n_proj, &mut root.substream(8), exec)?,
        });
    }
    Ok(AblationReport {
        rows,
        baseline_energy: energy_distance_with(&eval_source, &eval_target, exec)?,
        encoder,
        log,
        eval_source,
        eval_target,
    })
}
