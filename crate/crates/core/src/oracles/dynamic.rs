//! Small-instance check that noisy interpolation along an exact OT map matches
//! the dynamic extension of the entropic plan with `λ = 2σ²`.

use serde::Serialize;

use super::{energy_distance_with, exact_ot_small, sinkhorn};
use crate::batch::SampleBatch;
use crate::bridge::{augment_point, sample_bridge_mixture, NoiseLaw};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::Matrix;
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DynamicCheck {
    pub t: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub energy_distance: f64,
}

/// Compare, at each time in `times`, `n` samples of
/// (a) bridge-law augmentation along the exact assignment between `mu` and `nu`
/// against (b) the bridge mixture over the Sinkhorn plan with `λ = 2σ²`.
///
/// Atoms are 1-D with uniform weights; the cost is `|x − y|²`.
pub fn dynamic_extension_check(
    mu: &[f64],
    nu: &[f64],
    sigma: f64,
    times: &[f64],
    n: usize,
    rng: &mut Rng,
    exec: Exec,
) -> Result<Vec<DynamicCheck>> {
    if mu.len() != nu.len() || mu.is_empty() {
        return Err(Error::invalid("need equally many source and target atoms"));
    }
    let k = mu.len();
    let cost = Matrix::from_rows(
        &mu.iter()
            .map(|x| nu.iter().map(|y| (x - y) * (x - y)).collect())
            .collect::<Vec<_>>(),
    )?;
    let exact = exact_ot_small(&cost)?;
    let lambda = 2.0 * sigma * sigma;
    let w = vec![1.0 / k as f64; k];
    // At small λ the iteration stalls near 1e-8 marginal error in f64, so take
    // a 1e-6 solution and round it onto the marginals.
    let plan = sinkhorn(&cost, &w, &w, lambda, 1_000_000, 1e-6)?.plan.round_to_marginals();
    let atoms_x = SampleBatch::new(1, mu.to_vec())?;
    let atoms_y = SampleBatch::new(1, nu.to_vec())?;

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let base = rng.fork();
        let chunks = exec.map_chunks(n, 1024, |r| -> Result<Vec<f64>> {
            let mut rng = base.substream(r.start as u64);
            let mut v = Vec::with_capacity(r.len());
            for _ in r {
                let i = rng.below(k);
                let p = augment_point(
                    &[mu[i]],
                    &[nu[exact.permutation[i]]],
                    t,
                    sigma,
                    &mut rng,
                    NoiseLaw::Bridge,
                )?;
                v.push(p.value[0]);
            }
            Ok(v)
        });
        let mut map_cloud = Vec::with_capacity(n);
        for c in chunks {
            map_cloud.extend(c?);
        }
        let map_cloud = SampleBatch::new(1, map_cloud)?;
        let plan_cloud = sample_bridge_mixture(&plan, &atoms_x, &atoms_y, t, sigma, n, rng, exec)?;
        out.push(DynamicCheck {
            t,
            sigma,
            lambda,
            energy_distance: energy_distance_with(&map_cloud, &plan_cloud, exec)?,
        });
    }
    Ok(out)
}
