//! Dense equality-form LP kernel.
//!
//! Problems are `min cᵀx s.t. Ax = b, x ≥ 0`. The solver is a two-phase
//! tableau simplex using Bland's smallest-index rule for both the entering
//! and the leaving variable, so the optimal basis it reports is a
//! deterministic function of the input bits. Each reported basis is
//! re-factored from the original data before the solution and reduced costs
//! are returned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{row_rank, LuFactor};

/// Primal feasibility tolerance (absolute).
pub const TOL_FEAS: f64 = 1e-9;
/// Reduced-cost optimality tolerance (absolute).
pub const TOL_OPT: f64 = 1e-9;
/// Objective comparison tolerance (relative).
pub const TOL_OBJ: f64 = 1e-9;
/// Smallest pivot magnitude accepted by any factorization or simplex pivot.
pub const PIVOT_EPS: f64 = 1e-11;

const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("more constraints ({m}) than variables ({n})")]
    TooManyRows { m: usize, n: usize },
    #[error("constraint matrix has row rank {rank} < {m}")]
    RankDeficient { rank: usize, m: usize },
    #[error("numerical failure: pivot magnitude {pivot:e} below threshold")]
    NumericalFailure { pivot: f64 },
    #[error("basis matrix is singular (pivot {pivot:e})")]
    SingularBasis { pivot: f64 },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
}

/// `min cᵀx s.t. Ax = b, x ≥ 0` with a dense row-major `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFormLp {
    n: usize,
    m: usize,
    c: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl StandardFormLp {
    /// Build from a cost vector, constraint rows and RHS. Checks shape,
    /// finiteness and `m ≤ n`; row rank is checked by [`solve`].
    pub fn new(c: Vec<f64>, rows: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self, LpError> {
        let n = c.len();
        let m = rows.len();
        if b.len() != m {
            return Err(LpError::Dimension(format!(
                "{m} constraint rows but RHS of length {}",
                b.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(LpError::Dimension(format!(
                "row {i} has {} entries, expected {n}",
                rows[i].len()
            )));
        }
        Self::from_dense(c, rows.concat(), b)
    }

    /// Build from a flat row-major matrix of `b.len()` rows.
    pub fn from_dense(c: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self, LpError> {
        let n = c.len();
        let m = b.len();
        if a.len() != m * n {
            return Err(LpError::Dimension(format!(
                "matrix has {} entries, expected {m}x{n}",
                a.len()
            )));
        }
        if m > n {
            return Err(LpError::TooManyRows { m, n });
        }
        if !c.iter().all(|v| v.is_finite()) {
            return Err(LpError::NonFinite("c"));
        }
        if !a.iter().all(|v| v.is_finite()) {
            return Err(LpError::NonFinite("A"));
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(LpError::NonFinite("b"));
        }
        Ok(Self { n, m, c, a, b })
    }

    /// Same `c` and `A` with a different right-hand side.
    pub fn with_rhs(&self, b: Vec<f64>) -> Result<Self, LpError> {
        Self::from_dense(self.c.clone(), self.a.clone(), b)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn costs(&self) -> &[f64] {
        &self.c
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.a[row * self.n + col]
    }

    /// `c·x`
    pub fn objective_of(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn basis_matrix(&self, basis: &BasisSignature) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m * self.m);
        for i in 0..self.m {
            out.extend(basis.indices().iter().map(|&j| self.entry(i, j)));
        }
        out
    }
}

/// Canonical identifier of a basis: strictly increasing column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BasisSignature(Vec<usize>);

impl BasisSignature {
    /// Sorts the given indices; rejects duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self, LpError> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(LpError::InvalidBasis(format!(
                "duplicate column index in {indices:?}"
            )));
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, col: usize) -> bool {
        self.0.binary_search(&col).is_ok()
    }

    fn check_for(&self, lp: &StandardFormLp) -> Result<(), LpError> {
        if self.0.len() != lp.m {
            return Err(LpError::InvalidBasis(format!(
                "{} indices for {} constraints",
                self.0.len(),
                lp.m
            )));
        }
        if let Some(&j) = self.0.iter().find(|&&j| j >= lp.n) {
            return Err(LpError::InvalidBasis(format!(
                "column {j} out of range for {} variables",
                lp.n
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for BasisSignature {
    type Error = LpError;

    fn try_from(v: Vec<usize>) -> Result<Self, LpError> {
        let sorted = Self::new(v.clone())?;
        if sorted.0 != v {
            return Err(LpError::InvalidBasis(format!(
                "indices {v:?} are not strictly increasing"
            )));
        }
        Ok(sorted)
    }
}

impl From<BasisSignature> for Vec<usize> {
    fn from(b: BasisSignature) -> Self {
        b.0
    }
}

impl std::fmt::Display for BasisSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A fixed basis evaluated by [`solve_with_basis`] yields a negative
    /// basic variable.
    BasisInfeasible,
    /// A fixed basis is primal feasible but has a negative reduced cost.
    BasisSuboptimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `c·x`; `+∞` when infeasible and `−∞` when unbounded.
    pub objective: f64,
    pub x: Vec<f64>,
    /// Set for `Optimal` and for the fixed-basis diagnostic statuses.
    pub basis: Option<BasisSignature>,
    pub reduced_costs: Option<Vec<f64>>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `c − Aᵀ B⁻ᵀ c_B` for the given basis.
pub fn reduced_costs(lp: &StandardFormLp, basis: &BasisSignature) -> Result<Vec<f64>, LpError> {
    basis.check_for(lp)?;
    let lu = factor(lp, basis)?;
    Ok(reduced_costs_with(lp, basis, &lu))
}

fn factor(lp: &StandardFormLp, basis: &BasisSignature) -> Result<LuFactor, LpError> {
    LuFactor::new(&lp.basis_matrix(basis), lp.m, PIVOT_EPS)
        .map_err(|pivot| LpError::SingularBasis { pivot })
}

fn reduced_costs_with(lp: &StandardFormLp, basis: &BasisSignature, lu: &LuFactor) -> Vec<f64> {
    let c_b: Vec<f64> = basis.indices().iter().map(|&j| lp.c[j]).collect();
    let y = lu.solve_transpose(&c_b);
    let mut d: Vec<f64> = (0..lp.n)
        .map(|j| lp.c[j] - (0..lp.m).map(|i| lp.entry(i, j) * y[i]).sum::<f64>())
        .collect();
    for &j in basis.indices() {
        // exact by construction; rounding residue is dropped
        if d[j].abs() <= TOL_OPT {
            d[j] = 0.0;
        }
    }
    d
}

/// Evaluate a fixed basis on the problem's RHS: `x_B = B⁻¹b`, `x_N = 0`.
pub fn solve_with_basis(lp: &StandardFormLp, basis: &BasisSignature) -> Result<LpSolution, LpError> {
    basis.check_for(lp)?;
    let lu = factor(lp, basis)?;
    let x_b = lu.solve(&lp.b);
    let mut x = vec![0.0; lp.n];
    for (&j, &v) in basis.indices().iter().zip(&x_b) {
        x[j] = v;
    }
    let d = reduced_costs_with(lp, basis, &lu);
    let status = if x_b.iter().any(|&v| v < -TOL_FEAS) {
        LpStatus::BasisInfeasible
    } else if d.iter().any(|&v| v < -TOL_OPT) {
        LpStatus::BasisSuboptimal
    } else {
        LpStatus::Optimal
    };
    let c_b: Vec<f64> = basis.indices().iter().map(|&j| lp.c[j]).collect();
    let objective = c_b.iter().zip(&x_b).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status,
        objective,
        x,
        basis: Some(basis.clone()),
        reduced_costs: Some(d),
    })
}

/// Solve with the two-phase Bland's-rule simplex.
pub fn solve(lp: &StandardFormLp) -> Result<LpSolution, LpError> {
    let rank = row_rank(&lp.a, lp.m, lp.n);
    if rank < lp.m {
        return Err(LpError::RankDeficient { rank, m: lp.m });
    }
    if lp.m == 0 {
        // no constraints: bounded iff every cost is nonnegative
        return Ok(if lp.c.iter().any(|&c| c < 0.0) {
            unbounded(lp.n)
        } else {
            LpSolution {
                status: LpStatus::Optimal,
                objective: 0.0,
                x: vec![0.0; lp.n],
                basis: Some(BasisSignature(Vec::new())),
                reduced_costs: Some(lp.c.clone()),
            }
        });
    }

    let mut tab = Tableau::phase_one(lp);
    tab.run(lp.n + lp.m)?;
    let infeasibility = -tab.obj[tab.width - 1];
    let scale = 1.0 + lp.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if infeasibility > TOL_FEAS * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            x: tab.primal(lp.n),
            basis: None,
            reduced_costs: None,
        });
    }
    tab.drive_out_artificials(lp.n)?;
    tab.set_costs(&lp.c);
    if tab.run(lp.n)? == Outcome::Unbounded {
        let mut sol = unbounded(lp.n);
        sol.x = tab.primal(lp.n);
        return Ok(sol);
    }

    let basis = BasisSignature::new(tab.basis.clone())?;
    let sol = solve_with_basis(lp, &basis)?;
    if sol.status != LpStatus::Optimal {
        let worst = sol.x.iter().fold(0.0_f64, |a, v| a.min(*v));
        return Err(LpError::NumericalFailure { pivot: worst });
    }
    Ok(sol)
}

fn unbounded(n: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Unbounded,
        objective: f64::NEG_INFINITY,
        x: vec![0.0; n],
        basis: None,
        reduced_costs: None,
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

/// `[A | I | b]` with one artificial per row; `obj` holds reduced costs and
/// the negated objective in its last slot.
struct Tableau {
    rows: usize,
    width: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn phase_one(lp: &StandardFormLp) -> Self {
        let (m, n) = (lp.m, lp.n);
        let width = n + m + 1;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i * width + j] = sign * lp.entry(i, j);
            }
            t[i * width + n + i] = 1.0;
            t[i * width + width - 1] = sign * lp.b[i];
        }
        let mut tab = Self {
            rows: m,
            width,
            t,
            obj: vec![0.0; width],
            basis: (n..n + m).collect(),
        };
        let mut costs = vec![0.0; n + m];
        costs[n..].fill(1.0);
        tab.set_costs(&costs);
        tab
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    /// Recompute the objective row for `costs` (missing trailing entries are 0).
    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.width;
        self.obj.fill(0.0);
        self.obj[..costs.len()].copy_from_slice(costs);
        for i in 0..self.rows {
            let cb = costs.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.obj[j] -= cb * self.t[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), LpError> {
        let w = self.width;
        let p = self.at(row, col);
        if p.abs() < PIVOT_EPS {
            return Err(LpError::NumericalFailure { pivot: p.abs() });
        }
        for j in 0..w {
            self.t[row * w + j] /= p;
        }
        self.t[row * w + col] = 1.0;
        let pivot_row: Vec<f64> = self.t[row * w..(row + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.t[i * w + col];
            if f != 0.0 {
                for (t, &pv) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *t -= f * pv;
                }
                self.t[i * w + col] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (o, &pv) in self.obj.iter_mut().zip(&pivot_row) {
                *o -= f * pv;
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Bland's rule over columns `0..eligible`.
    fn run(&mut self, eligible: usize) -> Result<Outcome, LpError> {
        let rhs = self.width - 1;
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..eligible)
                .find(|&j| self.obj[j] < -TOL_OPT && !self.basis.contains(&j))
            else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, col);
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.at(i, rhs).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if (tie && self.basis[i] < self.basis[r]) || (!tie && ratio < best) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(Outcome::Unbounded),
                Some((row, _)) => self.pivot(row, col)?,
            }
        }
        Err(LpError::NumericalFailure { pivot: 0.0 })
    }

    /// Pivot any artificial still basic (at zero level) onto the smallest
    /// usable original column.
    fn drive_out_artificials(&mut self, n: usize) -> Result<(), LpError> {
        for row in 0..self.rows {
            if self.basis[row] < n {
                continue;
            }
            let col = (0..n)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.at(row, j).abs() > PIVOT_EPS)
                .ok_or(LpError::NumericalFailure { pivot: 0.0 })?;
            self.pivot(row, col)?;
        }
        Ok(())
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < n {
                x[j] = self.at(i, self.width - 1);
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> StandardFormLp {
        StandardFormLp::new(vec![-1.0, 0.0], vec![vec![1.0, 1.0]], vec![1.0]).unwrap()
    }

    #[test]
    fn single_constraint_vertex() {
        let sol = solve(&simple()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, -1.0);
        assert_eq!(sol.x, vec![1.0, 0.0]);
        assert_eq!(sol.basis.unwrap().indices(), &[0]);
    }

    #[test]
    fn unbounded_ray() {
        let lp = StandardFormLp::new(vec![-1.0, 0.0], vec![vec![1.0, -1.0]], vec![1.0]).unwrap();
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_sign() {
        let lp = StandardFormLp::new(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![-1.0]).unwrap();
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn fixed_basis_diagnostics() {
        let lp = simple();
        let opt = solve_with_basis(&lp, &BasisSignature::new(vec![0]).unwrap()).unwrap();
        assert_eq!(opt.status, LpStatus::Optimal);
        assert_eq!(opt.x, vec![1.0, 0.0]);
        assert_eq!(opt.objective, -1.0);

        let sub = solve_with_basis(&lp, &BasisSignature::new(vec![1]).unwrap()).unwrap();
        assert_eq!(sub.status, LpStatus::BasisSuboptimal);

        let neg = lp.with_rhs(vec![-1.0]).unwrap();
        let inf = solve_with_basis(&neg, &BasisSignature::new(vec![0]).unwrap()).unwrap();
        assert_eq!(inf.status, LpStatus::BasisInfeasible);
    }

    #[test]
    fn hand_computed_reduced_costs() {
        let lp = simple();
        let d0 = reduced_costs(&lp, &BasisSignature::new(vec![0]).unwrap()).unwrap();
        assert_eq!(d0, vec![0.0, 1.0]);
        let d1 = reduced_costs(&lp, &BasisSignature::new(vec![1]).unwrap()).unwrap();
        assert_eq!(d1, vec![-1.0, 0.0]);
    }

    #[test]
    fn rank_deficient_rows_rejected() {
        let lp = StandardFormLp::new(
            vec![1.0, 1.0, 1.0],
            vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]],
            vec![1.0, 2.0],
        )
        .unwrap();
        assert!(matches!(solve(&lp), Err(LpError::RankDeficient { rank: 1, m: 2 })));
    }

    #[test]
    fn singular_basis_rejected() {
        let lp = StandardFormLp::new(
            vec![1.0, 1.0, 1.0],
            vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 1.0]],
            vec![1.0, 2.0],
        )
        .unwrap();
        let basis = BasisSignature::new(vec![0, 1]).unwrap();
        assert!(matches!(
            solve_with_basis(&lp, &basis),
            Err(LpError::SingularBasis { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            StandardFormLp::new(vec![1.0], vec![vec![1.0], vec![1.0]], vec![1.0, 1.0]),
            Err(LpError::TooManyRows { m: 2, n: 1 })
        ));
        assert!(matches!(
            StandardFormLp::new(vec![f64::NAN, 1.0], vec![vec![1.0, 1.0]], vec![1.0]),
            Err(LpError::NonFinite("c"))
        ));
        assert!(BasisSignature::new(vec![1, 1]).is_err());
        assert!(BasisSignature::try_from(vec![2, 1]).is_err());
        let lp = simple();
        assert!(solve_with_basis(&lp, &BasisSignature::new(vec![5]).unwrap()).is_err());
    }

    #[test]
    fn degenerate_artificial_driven_out() {
        // second row forces x2 = 0 -> phase one ends with a zero-level artificial
        let lp = StandardFormLp::new(
            vec![1.0, 2.0, 0.0],
            vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 0.0]],
            vec![2.0, 0.0],
        )
        .unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.basis.as_ref().unwrap().indices().iter().all(|&j| j < 3));
        assert!(sol.objective.abs() < 1e-12);
    }
}
