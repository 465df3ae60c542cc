//! Entropic optimal transport by log-domain Sinkhorn scaling.
//!
//! Solves `min_π ⟨C, π⟩ + λ Σ π log π` over couplings of `a` and `b`. With
//! dual potentials `f`, `g` the plan is `π_ij = exp((f_i + g_j − C_ij)/λ)`;
//! each half-step is an exact block maximization of the concave dual
//! `⟨a, f⟩ + ⟨b, g⟩ − λ Σ π_ij`, so the logged dual trace never decreases.

use super::CouplingPlan;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;

const ANNEAL_FACTOR: f64 = 0.5;
const ANNEAL_ITERS: usize = 20;

#[derive(Clone, Debug)]
pub struct SinkhornResult {
    pub plan: CouplingPlan,
    pub iterations: usize,
    pub violation: f64,
    /// Dual objective after each full iteration at the target regularization.
    pub dual_trace: Vec<f64>,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn check_weights(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() || w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("{what} weights must be positive")));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("{what} weights sum to {s}, not 1")));
    }
    Ok(())
}

pub fn sinkhorn(
    cost: &Matrix,
    row_w: &[f64],
    col_w: &[f64],
    lambda: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SinkhornResult> {
    check_dim(cost.rows(), row_w.len())?;
    check_dim(cost.cols(), col_w.len())?;
    check_weights(row_w, "row")?;
    check_weights(col_w, "column")?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("regularization {lambda} must be positive")));
    }
    if !cost.is_finite() {
        return Err(Error::invalid("cost matrix has non-finite entries"));
    }
    let (n, m) = (cost.rows(), cost.cols());
    let c = cost.as_slice();
    let log_a: Vec<f64> = row_w.iter().map(|v| v.ln()).collect();
    let log_b: Vec<f64> = col_w.iter().map(|v| v.ln()).collect();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];

    let half_steps = |f: &mut [f64], g: &mut [f64], lambda: f64| {
        for i in 0..n {
            let row = &c[i * m..(i + 1) * m];
            let lse = log_sum_exp((0..m).map(|j| (g[j] - row[j]) / lambda));
            f[i] = lambda * (log_a[i] - lse);
        }
        for j in 0..m {
            let lse = log_sum_exp((0..n).map(|i| (f[i] - c[i * m + j]) / lambda));
            g[j] = lambda * (log_b[j] - lse);
        }
    };

    // Anneal from a coarse regularization down to `lambda`, warm-starting the
    // potentials; small-λ problems otherwise converge very slowly.
    let c_max = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut stage = c_max.max(lambda);
    while stage > lambda {
        for _ in 0..ANNEAL_ITERS {
            half_steps(&mut f, &mut g, stage);
        }
        stage = (stage * ANNEAL_FACTOR).max(lambda);
        if stage == lambda {
            break;
        }
    }

    let mut trace = Vec::new();
    for iter in 1..=max_iters {
        half_steps(&mut f, &mut g, lambda);
        let pi: Vec<f64> = (0..n)
            .flat_map(|i| {
                let (f, g) = (&f, &g);
                (0..m).map(move |j| ((f[i] + g[j] - c[i * m + j]) / lambda).exp())
            })
            .collect();
        let dual = f.iter().zip(row_w).map(|(x, w)| x * w).sum::<f64>()
            + g.iter().zip(col_w).map(|(x, w)| x * w).sum::<f64>()
            - lambda * pi.iter().sum::<f64>();
        trace.push(dual);
        let plan = CouplingPlan::with_marginals(pi, row_w.to_vec(), col_w.to_vec())?;
        let violation = plan.marginal_violation();
        if violation < tol {
            return Ok(SinkhornResult {
                plan,
                iterations: iter,
                violation,
                dual_trace: trace,
            });
        }
        if iter == max_iters {
            return Err(Error::NoConvergence {
                iters: max_iters,
                violation,
            });
        }
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        violation: f64::INFINITY,
    })
}
