//! Fully connected networks with hand-written reverse-mode gradients.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::invalid(format!("unknown activation `{other}`"))),
        }
    }
}

/// Weights and biases of a feed-forward network.
///
/// `weights[i]` is a row-major `layer_dims[i+1] × layer_dims[i]` matrix.
/// Hidden layers share one activation; the output layer is linear. The same
/// type doubles as the gradient container for its own parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams {
    layer_dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    activation: Activation,
}

fn validate_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 {
        return Err(Error::invalid("a network needs at least input and output widths"));
    }
    if layer_dims.contains(&0) {
        return Err(Error::invalid("layer widths must be positive"));
    }
    Ok(())
}

impl MlpParams {
    /// Glorot-uniform weights, zero biases.
    pub fn init(layer_dims: &[usize], activation: Activation, rng: &mut Rng) -> Result<Self> {
        let mut p = Self::zeros(layer_dims, activation)?;
        for (l, w) in p.weights.iter_mut().enumerate() {
            let fan_in = layer_dims[l] as f64;
            let fan_out = layer_dims[l + 1] as f64;
            let bound = (6.0 / (fan_in + fan_out)).sqrt();
            for v in w.iter_mut() {
                *v = rng.uniform_range(-bound, bound);
            }
        }
        Ok(p)
    }

    pub fn zeros(layer_dims: &[usize], activation: Activation) -> Result<Self> {
        validate_dims(layer_dims)?;
        let weights = layer_dims
            .windows(2)
            .map(|w| vec![0.0; w[0] * w[1]])
            .collect();
        let biases = layer_dims[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(MlpParams {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            activation,
        })
    }

    pub fn from_parts(
        layer_dims: Vec<usize>,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
        activation: Activation,
    ) -> Result<Self> {
        validate_dims(&layer_dims)?;
        let layers = layer_dims.len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(Error::invalid(format!(
                "expected {layers} weight and bias blocks, got {} and {}",
                weights.len(),
                biases.len()
            )));
        }
        for l in 0..layers {
            check_dim(layer_dims[l] * layer_dims[l + 1], weights[l].len())?;
            check_dim(layer_dims[l + 1], biases[l].len())?;
        }
        let p = MlpParams {
            layer_dims,
            weights,
            biases,
            activation,
        };
        if !p.is_finite() {
            return Err(Error::invalid("network parameters must be finite"));
        }
        Ok(p)
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.layer_dims, self.activation).expect("dims already validated")
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().expect("non-empty dims")
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.biases
    }

    pub fn num_params(&self) -> usize {
        self.blocks().map(<[f64]>::len).sum()
    }

    /// All parameter blocks in a fixed order: w0, b0, w1, b1, ...
    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
    }

    pub fn blocks_mut(&mut self) -> impl Iterator<Item = &mut Vec<f64>> + '_ {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| [w, b])
    }

    pub fn same_shape(&self, other: &MlpParams) -> bool {
        self.layer_dims == other.layer_dims
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// `self += other`, elementwise.
    pub fn add_assign(&mut self, other: &MlpParams) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.blocks_mut().zip(other.blocks()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for b in self.blocks_mut() {
            b.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// Single-point forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), input.len())?;
        let last = self.num_layers() - 1;
        let mut cur = input.to_vec();
        for l in 0..=last {
            let (k, m) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let w = &self.weights[l];
            let mut next = Vec::with_capacity(m);
            for j in 0..m {
                // Accumulation order matches the batched kernel below.
                let mut acc = self.biases[l][j];
                for (wk, xk) in w[j * k..(j + 1) * k].iter().zip(&cur) {
                    acc += xk * wk;
                }
                next.push(if l < last { self.activation.apply(acc) } else { acc });
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Forward pass over `n` row-major inputs, keeping every layer's output.
    pub fn forward_tape(&self, inputs: &[f64], n: usize) -> Result<Tape> {
        check_dim(n * self.input_dim(), inputs.len())?;
        let last = self.num_layers() - 1;
        let mut acts = Vec::with_capacity(self.num_layers() + 1);
        acts.push(inputs.to_vec());
        for l in 0..=last {
            let (k, m) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let wt = transpose(&self.weights[l], m, k);
            let input = &acts[l];
            let mut out = vec![0.0; n * m];
            for r in 0..n {
                let row = &mut out[r * m..(r + 1) * m];
                row.copy_from_slice(&self.biases[l]);
                for kk in 0..k {
                    let a = input[r * k + kk];
                    for (o, w) in row.iter_mut().zip(&wt[kk * m..(kk + 1) * m]) {
                        *o += a * w;
                    }
                }
                if l < last {
                    row.iter_mut().for_each(|v| *v = self.activation.apply(*v));
                }
            }
            acts.push(out);
        }
        Ok(Tape { n, acts })
    }

    /// Batched forward pass returning only the outputs.
    pub fn forward_batch(&self, inputs: &[f64], n: usize) -> Result<Vec<f64>> {
        let mut tape = self.forward_tape(inputs, n)?;
        Ok(tape.acts.pop().expect("tape has outputs"))
    }

    /// Reverse pass for `⟨upstream, f(inputs)⟩`.
    ///
    /// Parameter gradients are accumulated into `grads` when given; the
    /// returned vector holds the input gradients (`n × input_dim`).
    pub fn backward_tape(
        &self,
        tape: &Tape,
        upstream: &[f64],
        mut grads: Option<&mut MlpParams>,
    ) -> Result<Vec<f64>> {
        let n = tape.n;
        check_dim(n * self.output_dim(), upstream.len())?;
        if let Some(g) = grads.as_deref() {
            if !self.same_shape(g) {
                return Err(Error::invalid("gradient buffer shape does not match network"));
            }
        }
        let mut delta = upstream.to_vec();
        for l in (0..self.num_layers()).rev() {
            let (k, m) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let input = &tape.acts[l];
            let w = &self.weights[l];
            if let Some(g) = grads.as_deref_mut() {
                let (gw, gb) = (&mut g.weights[l], &mut g.biases[l]);
                for r in 0..n {
                    let x = &input[r * k..(r + 1) * k];
                    for j in 0..m {
                        let d = delta[r * m + j];
                        if d == 0.0 {
                            continue;
                        }
                        gb[j] += d;
                        for (gwv, xv) in gw[j * k..(j + 1) * k].iter_mut().zip(x) {
                            *gwv += d * xv;
                        }
                    }
                }
            }
            let mut prev = vec![0.0; n * k];
            for r in 0..n {
                let row = &mut prev[r * k..(r + 1) * k];
                for j in 0..m {
                    let d = delta[r * m + j];
                    if d == 0.0 {
                        continue;
                    }
                    for (p, wv) in row.iter_mut().zip(&w[j * k..(j + 1) * k]) {
                        *p += d * wv;
                    }
                }
            }
            if l > 0 {
                for (p, y) in prev.iter_mut().zip(input) {
                    *p *= self.activation.derivative_from_output(*y);
                }
            }
            delta = prev;
        }
        Ok(delta)
    }

    /// Gradients of `⟨upstream, f(input)⟩` w.r.t. every parameter and the input.
    pub fn backward(&self, input: &[f64], upstream: &[f64]) -> Result<(MlpParams, Vec<f64>)> {
        check_dim(self.output_dim(), upstream.len())?;
        let tape = self.forward_tape(input, 1)?;
        let mut grads = self.zeros_like();
        let dinput = self.backward_tape(&tape, upstream, Some(&mut grads))?;
        Ok((grads, dinput))
    }
}

fn transpose(w: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; w.len()];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = w[i * cols + j];
        }
    }
    t
}

/// Layer outputs recorded by [`MlpParams::forward_tape`].
#[derive(Clone, Debug)]
pub struct Tape {
    n: usize,
    acts: Vec<Vec<f64>>,
}

impl Tape {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("tape has outputs")
    }
}
