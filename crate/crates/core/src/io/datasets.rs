//! Toy distributions and procedural 16×16 glyphs.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::batch::{SampleBatch, SampleSource};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, Matrix};
use crate::neural_ot::GaussianSpec;
use crate::rng::Rng;

/// Side length of glyph images.
pub const GLYPH_SIDE: usize = 16;
pub const GLYPH_DIM: usize = GLYPH_SIDE * GLYPH_SIDE;

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Gaussian { mean: Vec<f64>, chol: Matrix },
    /// Eight modes evenly spaced on a circle.
    EightGaussians { radius: f64, std: f64 },
    Moons { noise: f64 },
    Checkerboard,
    Spiral { noise: f64 },
    GlyphOutline,
    GlyphFilled,
}

impl Distribution {
    pub fn gaussian(spec: &GaussianSpec) -> Result<Self> {
        Ok(Distribution::Gaussian {
            mean: spec.mean.clone(),
            chol: cholesky(&spec.cov)?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Gaussian { .. } => "gaussian",
            Distribution::EightGaussians { .. } => "eight_gaussians",
            Distribution::Moons { .. } => "moons",
            Distribution::Checkerboard => "checkerboard",
            Distribution::Spiral { .. } => "spiral",
            Distribution::GlyphOutline => "glyph_outline",
            Distribution::GlyphFilled => "glyph_filled",
        }
    }

    fn draw_point(&self, rng: &mut Rng, out: &mut Vec<f64>) {
        match self {
            Distribution::Gaussian { mean, chol } => {
                let z = rng.normal_vec(mean.len());
                out.extend(chol.matvec(&z).iter().zip(mean).map(|(a, m)| a + m));
            }
            Distribution::EightGaussians { radius, std } => {
                let k = rng.below(8) as f64;
                let angle = k * PI / 4.0;
                out.push(radius * angle.cos() + std * rng.normal());
                out.push(radius * angle.sin() + std * rng.normal());
            }
            Distribution::Moons { noise } => {
                let theta = rng.uniform() * PI;
                let (x, y) = if rng.below(2) == 0 {
                    (theta.cos(), theta.sin())
                } else {
                    (1.0 - theta.cos(), 0.5 - theta.sin())
                };
                out.push(x - 0.5 + noise * rng.normal());
                out.push(y - 0.25 + noise * rng.normal());
            }
            Distribution::Checkerboard => {
                let x = rng.uniform_range(-2.0, 2.0);
                let y = rng.uniform() - 2.0 * rng.below(2) as f64 + x.floor().rem_euclid(2.0);
                out.push(2.0 * x);
                out.push(2.0 * y);
            }
            Distribution::Spiral { noise } => {
                let r = rng.uniform().sqrt() * 3.0 * PI;
                let sign = if rng.below(2) == 0 { 1.0 } else { -1.0 };
                let x = -r.cos() * r + 0.5 * rng.uniform();
                let y = r.sin() * r + 0.5 * rng.uniform();
                out.push(sign * x / 3.0 + noise * rng.normal());
                out.push(sign * y / 3.0 + noise * rng.normal());
            }
            Distribution::GlyphOutline => out.extend(glyph(rng, false)),
            Distribution::GlyphFilled => out.extend(glyph(rng, true)),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Family name with default parameters; `gaussian` is the 2-D standard normal.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => Distribution::gaussian(&GaussianSpec::standard(2))?,
            "eight_gaussians" => Distribution::EightGaussians { radius: 4.0, std: 0.2 },
            "moons" => Distribution::Moons { noise: 0.1 },
            "checkerboard" => Distribution::Checkerboard,
            "spiral" => Distribution::Spiral { noise: 0.1 },
            "glyph_outline" => Distribution::GlyphOutline,
            "glyph_filled" => Distribution::GlyphFilled,
            other => return Err(Error::invalid(format!("unknown distribution '{other}'"))),
        })
    }
}

impl SampleSource for Distribution {
    fn dim(&self) -> usize {
        match self {
            Distribution::Gaussian { mean, .. } => mean.len(),
            Distribution::GlyphOutline | Distribution::GlyphFilled => GLYPH_DIM,
            _ => 2,
        }
    }

    fn draw(&self, n: usize, rng: &mut Rng) -> Result<SampleBatch> {
        let mut data = Vec::with_capacity(n * self.dim());
        for _ in 0..n {
            self.draw_point(rng, &mut data);
        }
        SampleBatch::new(self.dim(), data)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub dist: Distribution,
    pub n: usize,
    pub seed: u64,
}

pub fn gen_dataset(spec: &DatasetSpec) -> Result<SampleBatch> {
    if spec.n == 0 {
        return Err(Error::invalid("dataset size must be positive"));
    }
    spec.dist.draw(spec.n, &mut Rng::new(spec.seed))
}

/// A random ellipse or rectangle, either as a one-pixel outline or filled with
/// a striped texture.
fn glyph(rng: &mut Rng, filled: bool) -> Vec<f64> {
    let cx = rng.uniform_range(6.0, 9.0);
    let cy = rng.uniform_range(6.0, 9.0);
    let rx = rng.uniform_range(3.0, 6.0);
    let ry = rng.uniform_range(3.0, 6.0);
    let ellipse = rng.below(2) == 0;
    let freq = rng.uniform_range(0.6, 1.4);
    let phase = rng.uniform_range(0.0, 2.0 * PI);
    let inside = |i: isize, j: isize| -> bool {
        if i < 0 || j < 0 || i >= GLYPH_SIDE as isize || j >= GLYPH_SIDE as isize {
            return false;
        }
        let (dx, dy) = ((j as f64 - cx) / rx, (i as f64 - cy) / ry);
        if ellipse {
            dx * dx + dy * dy <= 1.0
        } else {
            dx.abs() <= 1.0 && dy.abs() <= 1.0
        }
    };
    let mut img = vec![0.0; GLYPH_DIM];
    for i in 0..GLYPH_SIDE as isize {
        for j in 0..GLYPH_SIDE as isize {
            if !inside(i, j) {
                continue;
            }
            let v = if filled {
                0.6 + 0.4 * (freq * (i + j) as f64 + phase).sin()
            } else {
                let edge = !(inside(i - 1, j) && inside(i + 1, j) && inside(i, j - 1) && inside(i, j + 1));
                if edge { 1.0 } else { 0.0 }
            };
            img[i as usize * GLYPH_SIDE + j as usize] = v;
        }
    }
    img
}
