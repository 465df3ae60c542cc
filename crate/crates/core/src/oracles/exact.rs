//! Brute-force assignment for tiny uniform-marginal OT instances.

use super::CouplingPlan;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAX_EXACT_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub struct ExactPlan {
    pub plan: CouplingPlan,
    /// `permutation[i]` is the column matched to row `i`.
    pub permutation: Vec<usize>,
    /// Mean cost of the matching, `⟨cost, π⟩`.
    pub cost: f64,
}

/// Next permutation in lexicographic order; false once exhausted.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&v| v > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Optimal permutation coupling by enumeration of all `n!` matchings.
///
/// Ties resolve to the lexicographically smallest permutation.
pub fn exact_ot_small(cost: &Matrix) -> Result<ExactPlan> {
    let n = cost.rows();
    if n != cost.cols() {
        return Err(Error::invalid("exact OT needs a square cost matrix"));
    }
    if n == 0 || n > MAX_EXACT_SIZE {
        return Err(Error::invalid(format!(
            "exact OT supports 1..={MAX_EXACT_SIZE} atoms, got {n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        let total: f64 = perm.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
        if total < best_cost {
            best_cost = total;
            best.clone_from(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let w = 1.0 / n as f64;
    let mut matrix = vec![0.0; n * n];
    for (i, &j) in best.iter().enumerate() {
        matrix[i * n + j] = w;
    }
    Ok(ExactPlan {
        plan: CouplingPlan::with_marginals(matrix, vec![w; n], vec![w; n])?,
        permutation: best,
        cost: best_cost * w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_permutations() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn trivial_sizes() {
        let r = exact_ot_small(&Matrix::diag(&[5.0])).unwrap();
        assert_eq!(r.plan.matrix(), &[1.0]);
        let c = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = exact_ot_small(&c).unwrap();
        assert_eq!(r.permutation, vec![0, 1]);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn ties_pick_lexicographically_smallest() {
        let c = Matrix::from_rows(&[vec![1.0; 3], vec![1.0; 3], vec![1.0; 3]]).unwrap();
        assert_eq!(exact_ot_small(&c).unwrap().permutation, vec![0, 1, 2]);
    }

    #[test]
    fn anti_diagonal_optimum() {
        let c = Matrix::from_rows(&[vec![5.0, 5.0, 0.0], vec![5.0, 0.0, 5.0], vec![0.0, 5.0, 5.0]])
            .unwrap();
        assert_eq!(exact_ot_small(&c).unwrap().permutation, vec![2, 1, 0]);
    }

    #[test]
    fn too_large_rejected() {
        assert!(exact_ot_small(&Matrix::identity(9)).is_err());
        assert!(exact_ot_small(&Matrix::zeros(2, 3)).is_err());
    }
}
