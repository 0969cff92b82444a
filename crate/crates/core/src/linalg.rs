//! Small dense linear algebra used by the simplex kernel.

/// LU factorization with partial pivoting of a square row-major matrix.
#[derive(Debug, Clone)]
pub struct LuFactor {
    dim: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    /// Factor `matrix` (row-major, `dim`×`dim`). Returns the offending pivot
    /// magnitude if any pivot falls below `pivot_eps`.
    pub fn new(matrix: &[f64], dim: usize, pivot_eps: f64) -> Result<Self, f64> {
        assert_eq!(matrix.len(), dim * dim, "matrix is not {dim}x{dim}");
        let mut lu = matrix.to_vec();
        let mut perm: Vec<usize> = (0..dim).collect();

        for k in 0..dim {
            let (p, max) = (k..dim)
                .map(|i| (i, lu[i * dim + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if max < pivot_eps {
                return Err(max);
            }
            if p != k {
                for j in 0..dim {
                    lu.swap(k * dim + j, p * dim + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * dim + k];
            for i in k + 1..dim {
                let factor = lu[i * dim + k] / pivot;
                lu[i * dim + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..dim {
                        lu[i * dim + j] -= factor * lu[k * dim + j];
                    }
                }
            }
        }
        Ok(Self { dim, lu, perm })
    }

    /// Solve `M x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solve `Mᵀ y = rhs`.
    pub fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        // Uᵀ z = rhs
        let mut z = rhs.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[i * n + i];
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] -= s;
        }
        // y = Pᵀ w
        let mut y = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            y[p] = z[k];
        }
        y
    }
}

/// Numerical row rank of a row-major `rows`×`cols` matrix.
pub fn row_rank(matrix: &[f64], rows: usize, cols: usize) -> usize {
    let mut work = matrix.to_vec();
    let scale = work.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1.0);
    let tol = 1e-10 * scale;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (p, max) = (rank..rows)
            .map(|i| (i, work[i * cols + col].abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if max <= tol {
            continue;
        }
        for j in 0..cols {
            work.swap(rank * cols + j, p * cols + j);
        }
        let pivot = work[rank * cols + col];
        for i in rank + 1..rows {
            let factor = work[i * cols + col] / pivot;
            if factor != 0.0 {
                for j in col..cols {
                    work[i * cols + j] -= factor * work[rank * cols + j];
                }
            }
        }
        rank += 1;
    }
    rank
}
