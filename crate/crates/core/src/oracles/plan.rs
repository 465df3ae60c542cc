use crate::error::{check_dim, Error, Result};

/// A discrete coupling: nonnegative `rows × cols` matrix with prescribed marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingPlan {
    matrix: Vec<f64>,
    rows: usize,
    cols: usize,
    row_marginal: Vec<f64>,
    col_marginal: Vec<f64>,
}

impl CouplingPlan {
    /// Build a plan whose prescribed marginals are the matrix's own sums.
    pub fn new(matrix: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        let plan = Self::from_matrix_unchecked(matrix, rows, cols);
        plan.validate(1e-8)?;
        Ok(plan)
    }

    pub fn with_marginals(
        matrix: Vec<f64>,
        row_marginal: Vec<f64>,
        col_marginal: Vec<f64>,
    ) -> Result<Self> {
        let (rows, cols) = (row_marginal.len(), col_marginal.len());
        check_dim(rows * cols, matrix.len())?;
        Ok(CouplingPlan {
            matrix,
            rows,
            cols,
            row_marginal,
            col_marginal,
        })
    }

    pub(crate) fn from_matrix_unchecked(matrix: Vec<f64>, rows: usize, cols: usize) -> Self {
        assert_eq!(matrix.len(), rows * cols);
        let mut plan = CouplingPlan {
            matrix,
            rows,
            cols,
            row_marginal: Vec::new(),
            col_marginal: Vec::new(),
        };
        plan.row_marginal = plan.row_sums();
        plan.col_marginal = plan.col_sums();
        plan
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols + j]
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for r in self.matrix.chunks(self.cols) {
            for (acc, v) in s.iter_mut().zip(r) {
                *acc += v;
            }
        }
        s
    }

    /// Largest absolute deviation of the actual sums from the prescribed marginals.
    pub fn marginal_violation(&self) -> f64 {
        let (rs, cs) = (self.row_sums(), self.col_sums());
        let rows = rs.iter().zip(&self.row_marginal).map(|(a, b)| (a - b).abs());
        let cols = cs.iter().zip(&self.col_marginal).map(|(a, b)| (a - b).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    pub fn total_mass(&self) -> f64 {
        self.matrix.iter().sum()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if let Some(v) = self.matrix.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::invalid(format!("coupling has invalid entry {v}")));
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > tol {
            return Err(Error::invalid(format!("coupling mass {mass} is not 1")));
        }
        let viol = self.marginal_violation();
        if viol > tol {
            return Err(Error::invalid(format!("coupling marginal violation {viol:e}")));
        }
        Ok(())
    }

    /// `⟨cost, π⟩`.
    pub fn transport_cost(&self, cost: &[f64]) -> f64 {
        self.matrix.iter().zip(cost).map(|(p, c)| p * c).sum()
    }

    /// Total-variation distance `½ Σ |π − π'|`.
    pub fn tv_distance(&self, other: &CouplingPlan) -> f64 {
        0.5 * self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Project onto the prescribed marginals: shrink overfull rows, then
    /// overfull columns, then spread the remaining deficit as a rank-one term.
    /// The L1 change is at most twice the total marginal error.
    pub fn round_to_marginals(&self) -> CouplingPlan {
        let mut m = self.matrix.clone();
        for (i, row) in m.chunks_mut(self.cols).enumerate() {
            let s: f64 = row.iter().sum();
            if s > self.row_marginal[i] {
                let k = self.row_marginal[i] / s;
                row.iter_mut().for_each(|v| *v *= k);
            }
        }
        let mut tmp = self.clone();
        tmp.matrix = m;
        let cs = tmp.col_sums();
        for row in tmp.matrix.chunks_mut(self.cols) {
            for (j, v) in row.iter_mut().enumerate() {
                if cs[j] > self.col_marginal[j] {
                    *v *= self.col_marginal[j] / cs[j];
                }
            }
        }
        let er: Vec<f64> = tmp.row_sums().iter().zip(&self.row_marginal).map(|(s, a)| (a - s).max(0.0)).collect();
        let ec: Vec<f64> = tmp.col_sums().iter().zip(&self.col_marginal).map(|(s, b)| (b - s).max(0.0)).collect();
        let norm: f64 = er.iter().sum();
        if norm > 0.0 {
            for (row, ei) in tmp.matrix.chunks_mut(self.cols).zip(&er) {
                for (v, ej) in row.iter_mut().zip(&ec) {
                    *v += ei * ej / norm;
                }
            }
        }
        tmp
    }

    /// Independent coupling of the prescribed marginals.
    pub fn product(row: &[f64], col: &[f64]) -> CouplingPlan {
        let matrix = row.iter().flat_map(|a| col.iter().map(move |b| a * b)).collect();
        CouplingPlan {
            matrix,
            rows: row.len(),
            cols: col.len(),
            row_marginal: row.to_vec(),
            col_marginal: col.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_restores_marginals() {
        let a = vec![0.5, 0.3, 0.2];
        let b = vec![0.2, 0.3, 0.5];
        let mut m: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        m[0] += 1e-4;
        m[4] -= 3e-5;
        m[8] += 2e-5;
        let plan = CouplingPlan::with_marginals(m, a.clone(), b.clone()).unwrap();
        assert!(plan.marginal_violation() > 1e-5);
        let r = plan.round_to_marginals();
        assert!(r.marginal_violation() < 1e-15);
        assert!(r.matrix().iter().all(|v| *v >= 0.0));
        assert!(r.tv_distance(&plan) < 2e-4);
        let exact = CouplingPlan::product(&a, &b);
        assert!(exact.round_to_marginals().tv_distance(&exact) < 1e-16);
    }
}
