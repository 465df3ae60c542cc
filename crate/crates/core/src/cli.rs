//! Command-line surface. Every failure prints one line
//! `error[<code>]: <message>` to stderr and maps to a fixed exit code.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::batch::SampleBatch;
use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::flow::{train_cot, CotTrainConfig, OtDirection};
use crate::io::{
    gen_dataset, load_cot_config, load_cot_encoder, load_neural_ot, load_not_config, read_samples,
    render_config, save_checkpoint, scatter_svg, write_samples, Checkpoint, DatasetSpec,
};
use crate::neural_ot::{train_neural_ot, NotTrainConfig};
use crate::oracles::metric_report;
use crate::pipeline::{run_ablation, AblationConfig, Task};
use crate::rng::Rng;
use crate::sampler::{
    edit_augment, edit_compose, edit_couple, sample_batch, MaskedGuidance, SampleSchedule, Sampler,
};

#[derive(Parser, Debug)]
#[command(name = "cotflow", version, about = "Contrastive optimal-transport flows for unpaired translation")]
struct Cli {
    /// Run on one thread (results are identical either way).
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw samples from a toy distribution.
    GenData {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Optional scatter plot (2-D only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Write a config file filled with default values.
    InitConfig {
        #[arg(long, value_enum)]
        kind: ConfigKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a neural OT map from source to target samples.
    TrainNot {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the origin encoder along trajectories of a fitted OT map.
    TrainCot {
        /// Source samples.
        #[arg(long)]
        source: PathBuf,
        /// Target samples; required when the config sets `ot_direction = "reverse"`.
        #[arg(long)]
        target: Option<PathBuf>,
        /// OT checkpoint. For the reverse direction it must map target to source.
        #[arg(long = "not")]
        not_model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Translate source samples with a trained encoder.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// 1 for one-step sampling, otherwise the number of refinement steps.
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SamplerArg::SelfAug)]
        sampler: SamplerArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Guided editing operations.
    #[command(subcommand)]
    Edit(EditCommand),
    /// Compare generated and reference samples.
    Eval {
        #[arg(long)]
        gen: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value_t = 64)]
        n_proj: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and score the five ablation variants on a built-in task.
    Ablate {
        #[arg(long)]
        task: String,
        #[arg(long)]
        not_config: Option<PathBuf>,
        #[arg(long)]
        cot_config: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        n_eval: usize,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum EditCommand {
    /// Re-encode target-side points with masked coordinates overwritten.
    Compose {
        #[command(flatten)]
        common: EditCommon,
        /// Base points, one per row.
        #[arg(long)]
        guidance: PathBuf,
        /// Replacement values, same shape as the guidance.
        #[arg(long)]
        patch: PathBuf,
        /// 0/1 mask: one row shared by all points, or one row per point.
        #[arg(long)]
        mask: PathBuf,
    },
    /// Fuse shape and texture inputs row by row.
    Couple {
        #[command(flatten)]
        common: EditCommon,
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        texture: PathBuf,
    },
    /// Fuse one anchor with every driver.
    Augment {
        #[command(flatten)]
        common: EditCommon,
        /// A single-row file.
        #[arg(long)]
        anchor: PathBuf,
        #[arg(long)]
        drivers: PathBuf,
    },
}

#[derive(Args, Debug)]
struct EditCommon {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConfigKind {
    Not,
    Cot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    SelfAug,
    Ancestral,
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return 2;
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match execute(cli.command, exec) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn execute(command: Command, exec: Exec) -> Result<()> {
    match command {
        Command::GenData { dist, n, seed, out, svg } => {
            let batch = gen_dataset(&DatasetSpec { dist: dist.parse()?, n, seed })?;
            write_samples(&out, &batch)?;
            maybe_svg(svg.as_deref(), &[&batch])
        }
        Command::InitConfig { kind, out } => {
            let text = match kind {
                ConfigKind::Not => render_config(&NotTrainConfig::default()),
                ConfigKind::Cot => render_config(&CotTrainConfig::default()),
            };
            fs::write(out, text)?;
            Ok(())
        }
        Command::TrainNot { source, target, config, out } => {
            let cfg = load_not_config(&config)?;
            let (src, tgt) = (read_samples(&source)?, read_samples(&target)?);
            let (model, _) = train_neural_ot(&cfg, &src, &tgt, &mut Rng::new(cfg.seed), exec)?;
            save_checkpoint(&out, &Checkpoint::NeuralOt { model, seed: cfg.seed })
        }
        Command::TrainCot { source, target, not_model, config, out } => {
            let cfg = load_cot_config(&config)?;
            let ot = load_neural_ot(&not_model)?;
            let data = match (cfg.ot_direction, target) {
                (OtDirection::Forward, _) => read_samples(&source)?,
                (OtDirection::Reverse, Some(t)) => {
                    let tgt = read_samples(&t)?;
                    check_dim(read_samples(&source)?.dim(), tgt.dim())?;
                    tgt
                }
                (OtDirection::Reverse, None) => {
                    return Err(Error::invalid("reverse direction needs --target"))
                }
            };
            let (encoder, _) = train_cot(&cfg, &data, &ot, &mut Rng::new(cfg.seed), exec)?;
            save_checkpoint(&out, &Checkpoint::CotEncoder { encoder, seed: cfg.seed })
        }
        Command::Sample { model, input, steps, sampler, seed, out, svg } => {
            let enc = load_cot_encoder(&model)?;
            let xs = read_samples(&input)?;
            check_dim(enc.dim(), xs.dim())?;
            let sampler = match (steps, sampler) {
                (0, _) => return Err(Error::invalid("--steps must be at least 1")),
                (1, SamplerArg::SelfAug) => Sampler::OneStep,
                (k, SamplerArg::SelfAug) => Sampler::SelfAugmentation(SampleSchedule::uniform_increasing(k)?),
                (k, SamplerArg::Ancestral) => Sampler::Ancestral(SampleSchedule::uniform_decreasing(k)?),
            };
            let ys = sample_batch(&enc, &xs, &sampler, &mut Rng::new(seed), exec)?;
            write_samples(&out, &ys)?;
            maybe_svg(svg.as_deref(), &[&xs, &ys])
        }
        Command::Edit(cmd) => run_edit(cmd),
        Command::Eval { gen, reference, n_proj, seed, out } => {
            let (a, b) = (read_samples(&gen)?, read_samples(&reference)?);
            let r = metric_report(&a, &b, n_proj, &mut Rng::new(seed), exec)?;
            let w2 = r.w2_1d.map(|v| format!("{v:.16e}")).unwrap_or_default();
            fs::write(
                out,
                format!(
                    "energy_distance,sliced_w2,w2_1d,n_projections\n{:.16e},{:.16e},{w2},{}\n",
                    r.energy_distance, r.sliced_w2, r.n_projections
                ),
            )?;
            Ok(())
        }
        Command::Ablate { task, not_config, cot_config, n_eval, steps, seed, out } => {
            let task: Task = task.parse()?;
            let config = AblationConfig {
                not: not_config.map(load_not_config).transpose()?.unwrap_or_default(),
                cot: cot_config.map(load_cot_config).transpose()?.unwrap_or_default(),
                n_eval,
                steps,
                seed,
                ..AblationConfig::default()
            };
            let report = run_ablation(task, &config, exec)?;
            fs::write(out, report.to_csv())?;
            Ok(())
        }
    }
}

fn run_edit(cmd: EditCommand) -> Result<()> {
    let (common, result) = match cmd {
        EditCommand::Compose { common, guidance, patch, mask } => {
            let enc = load_cot_encoder(&common.model)?;
            let (base, patch, mask) = (read_samples(&guidance)?, read_samples(&patch)?, read_samples(&mask)?);
            check_dim(base.dim(), patch.dim())?;
            check_dim(base.dim(), mask.dim())?;
            check_dim(base.len(), patch.len())?;
            if mask.len() != 1 && mask.len() != base.len() {
                return Err(Error::invalid("mask needs one row or one row per guidance point"));
            }
            let root = Rng::new(common.seed);
            let mut out = SampleBatch::empty(base.dim());
            for i in 0..base.len() {
                let m = mask.row(if mask.len() == 1 { 0 } else { i });
                let bits = m
                    .iter()
                    .map(|v| match *v {
                        0.0 => Ok(false),
                        1.0 => Ok(true),
                        other => Err(Error::Parse(format!("mask value {other} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<bool>>>()?;
                let g = MaskedGuidance::new(base.row(i).to_vec(), bits, patch.row(i).to_vec())?;
                out.push(&edit_compose(&enc, &g, common.t, &mut root.substream(i as u64))?)?;
            }
            (common, out)
        }
        EditCommand::Couple { common, shape, texture } => {
            let enc = load_cot_encoder(&common.model)?;
            let (shape, texture) = (read_samples(&shape)?, read_samples(&texture)?);
            check_dim(shape.len(), texture.len())?;
            let root = Rng::new(common.seed);
            let mut out = SampleBatch::empty(shape.dim());
            for i in 0..shape.len() {
                let y = edit_couple(&enc, shape.row(i), texture.row(i), common.t, &mut root.substream(i as u64))?;
                out.push(&y)?;
            }
            (common, out)
        }
        EditCommand::Augment { common, anchor, drivers } => {
            let enc = load_cot_encoder(&common.model)?;
            let anchor = read_samples(&anchor)?;
            if anchor.len() != 1 {
                return Err(Error::invalid("anchor file must hold exactly one row"));
            }
            let drivers = read_samples(&drivers)?;
            let out = edit_augment(&enc, anchor.row(0), &drivers, common.t, &mut Rng::new(common.seed))?;
            (common, out)
        }
    };
    write_samples(&common.out, &result)
}

fn maybe_svg(path: Option<&Path>, layers: &[&SampleBatch]) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, scatter_svg(layers)?)?;
    }
    Ok(())
}
