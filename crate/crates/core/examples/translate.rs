//! Translate eight Gaussians onto two moons with a small budget and report
//! one-step and multi-step sample quality.

use cot_flow::flow::{train_cot, CotTrainConfig};
use cot_flow::io::Distribution;
use cot_flow::neural_ot::{train_neural_ot, NotTrainConfig};
use cot_flow::oracles::metric_report;
use cot_flow::sampler::{sample_batch, SampleSchedule, Sampler};
use cot_flow::{Exec, Rng, SampleSource};

fn main() -> cot_flow::Result<()> {
    let source: Distribution = "eight_gaussians".parse()?;
    let target: Distribution = "moons".parse()?;
    let exec = Exec::default();

    let not_config = NotTrainConfig { n_outer: 300, ..NotTrainConfig::default() };
    let (ot, _) = train_neural_ot(&not_config, &source, &target, &mut Rng::new(1), exec)?;

    let cot_config = CotTrainConfig { n_iters: 2000, ..CotTrainConfig::default() };
    let (encoder, log) = train_cot(&cot_config, &source, &ot, &mut Rng::new(2), exec)?;
    println!("final loss (avg of last 100): {:.4}", log.moving_average(log.losses.len(), 100).unwrap_or(f64::NAN));

    let xs = source.draw(2000, &mut Rng::new(3))?;
    let reference = target.draw(2000, &mut Rng::new(4))?;
    for sampler in [Sampler::OneStep, Sampler::SelfAugmentation(SampleSchedule::uniform_increasing(8)?)] {
        let ys = sample_batch(&encoder, &xs, &sampler, &mut Rng::new(5), exec)?;
        let m = metric_report(&ys, &reference, 64, &mut Rng::new(6), exec)?;
        println!("nfe {:>2}: energy {:.4}, sliced W2 {:.4}", sampler.nfe(), m.energy_distance, m.sliced_w2);
    }
    Ok(())
}
