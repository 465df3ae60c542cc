use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;

/// A single sample in R^d.
pub type Point = Vec<f64>;

/// Row-major collection of equal-length samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    dim: usize,
    data: Vec<f64>,
}

impl SampleBatch {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("sample dimension must be positive"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Parse(format!(
                "buffer of length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        Ok(SampleBatch { dim, data })
    }

    pub fn empty(dim: usize) -> Self {
        SampleBatch {
            dim: dim.max(1),
            data: Vec::new(),
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyBatch)?;
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(dim * rows.len());
        for r in rows {
            check_dim(dim, r.as_ref().len())?;
            data.extend_from_slice(r.as_ref());
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        check_dim(self.dim, row.len())?;
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Rows `idx[0], idx[1], ...` gathered into a new batch.
    pub fn select(&self, idx: &[usize]) -> SampleBatch {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        SampleBatch {
            dim: self.dim,
            data,
        }
    }

    /// Per-coordinate sample mean.
    pub fn mean(&self) -> Point {
        let mut m = vec![0.0; self.dim];
        for r in self.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b;
            }
        }
        let n = self.len().max(1) as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Per-coordinate unbiased sample variance.
    pub fn variance(&self) -> Point {
        let m = self.mean();
        let mut v = vec![0.0; self.dim];
        for r in self.rows() {
            for ((acc, x), mu) in v.iter_mut().zip(r).zip(&m) {
                *acc += (x - mu) * (x - mu);
            }
        }
        let n = (self.len().max(2) - 1) as f64;
        v.iter_mut().for_each(|x| *x /= n);
        v
    }
}

/// Anything that can produce fresh minibatches.
pub trait SampleSource: Sync {
    fn dim(&self) -> usize;
    fn draw(&self, n: usize, rng: &mut Rng) -> Result<SampleBatch>;
}

/// An empirical pool resamples its rows uniformly with replacement.
impl SampleSource for SampleBatch {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draw(&self, n: usize, rng: &mut Rng) -> Result<SampleBatch> {
        if self.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let idx: Vec<usize> = (0..n).map(|_| rng.below(self.len())).collect();
        Ok(self.select(&idx))
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}
