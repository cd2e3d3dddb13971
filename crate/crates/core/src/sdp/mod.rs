//! Small dense semidefinite programs over real variables with Hermitian
//! linear matrix inequalities.
//!
//! A problem optimizes `objective · y` subject to scalar linear constraints
//! and blocks `F_0 + Σ_i y_i F_i ⪰ 0` with Hermitian `F`. The solver in
//! [`solve`] eliminates equality constraints, maps each Hermitian block onto
//! the real symmetric embedding `[[Re, -Im], [Im, Re]]` (blocks whose data is
//! entirely real are kept at their own size), and runs an infeasible
//! primal-dual path-following method.

mod assemble;
mod solver;
mod text;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use assemble::{assemble_dual_problem, assemble_sdr_problem, sdr_param_count, sdr_unpack, SdrLayout};
pub use solver::solve;
pub use text::{dump_problem, load_problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `Σ a_i y_i <= rhs`
    Le,
    /// `Σ a_i y_i >= rhs`
    Ge,
    /// `Σ a_i y_i = rhs`
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarConstraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl ScalarConstraint {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Self { coeffs, relation, rhs }
    }

    fn lhs(&self, y: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a * y[i]).sum()
    }

    /// Amount by which `y` violates the constraint (zero when satisfied).
    pub fn violation(&self, y: &[f64]) -> f64 {
        let d = self.lhs(y) - self.rhs;
        match self.relation {
            Relation::Le => d.max(0.0),
            Relation::Ge => (-d).max(0.0),
            Relation::Eq => d.abs(),
        }
    }
}

/// Hermitian matrix stored as its upper triangle (`row <= col`). Diagonal
/// entries keep only their real part, so every instance is Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// Adds `v` at `(row, col)` and `conj(v)` at `(col, row)`.
    pub fn add(&mut self, row: usize, col: usize, v: Complex64) {
        assert!(row < self.dim && col < self.dim, "entry ({row}, {col}) outside {0}x{0}", self.dim);
        if v == Complex64::new(0.0, 0.0) {
            return;
        }
        let (r, c, v) = if row <= col { (row, col, v) } else { (col, row, v.conj()) };
        let v = if r == c { Complex64::new(v.re, 0.0) } else { v };
        match self.entries.iter_mut().find(|e| e.0 == r && e.1 == c) {
            Some(e) => e.2 += v,
            None => self.entries.push((r, c, v)),
        }
    }

    pub fn diagonal_unit(dim: usize, index: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.add(index, index, Complex64::new(1.0, 0.0));
        m
    }

    /// `scale * g g^H`.
    pub fn rank_one(g: &[Complex64], scale: f64) -> Self {
        let mut m = Self::zeros(g.len());
        for r in 0..g.len() {
            for c in r..g.len() {
                m.add(r, c, g[r] * g[c].conj() * scale);
            }
        }
        m
    }

    /// Upper triangle of `dense`; the strictly lower part is ignored.
    pub fn from_dense_upper(dense: &DMatrix<Complex64>) -> Self {
        let mut m = Self::zeros(dense.nrows());
        for c in 0..dense.ncols() {
            for r in 0..=c {
                m.add(r, c, dense[(r, c)]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.2.im == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
            if r != c {
                m[(c, r)] += v.conj();
            }
        }
        m
    }
}

/// `constant + Σ_i y_i F_i ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiBlock {
    pub dim: usize,
    pub constant: SparseHermitian,
    pub terms: Vec<(usize, SparseHermitian)>,
}

impl LmiBlock {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            constant: SparseHermitian::zeros(dim),
            terms: Vec::new(),
        }
    }

    pub fn add_term(&mut self, var: usize, matrix: SparseHermitian) {
        assert_eq!(matrix.dim(), self.dim, "LMI term dimension");
        self.terms.push((var, matrix));
    }

    pub fn evaluate(&self, y: &[f64]) -> DMatrix<Complex64> {
        let mut m = self.constant.to_dense();
        for (var, f) in &self.terms {
            for &(r, c, v) in f.entries() {
                m[(r, c)] += v * y[*var];
                if r != c {
                    m[(c, r)] += v.conj() * y[*var];
                }
            }
        }
        m
    }

    /// Largest entry of `|A - A^H|` for the constant and every term, relative
    /// to the largest entry magnitude.
    pub fn hermitian_residual(&self) -> f64 {
        std::iter::once(&self.constant)
            .chain(self.terms.iter().map(|(_, f)| f))
            .map(|f| {
                let d = f.to_dense();
                let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let asym = (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if scale > 0.0 {
                    asym / scale
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub var_names: Vec<String>,
    pub sense: Sense,
    /// Dense objective coefficients, one per variable.
    pub objective: Vec<f64>,
    pub scalar_constraints: Vec<ScalarConstraint>,
    pub lmi_blocks: Vec<LmiBlock>,
}

impl SdpProblem {
    pub fn new(var_names: Vec<String>, sense: Sense) -> Self {
        let n = var_names.len();
        Self {
            var_names,
            sense,
            objective: vec![0.0; n],
            scalar_constraints: Vec::new(),
            lmi_blocks: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_vars();
        if self.objective.len() != m {
            return Err(Error::DimensionMismatch(format!("{} objective coefficients for {m} variables", self.objective.len())));
        }
        let in_range = |i: usize| -> Result<()> {
            if i < m {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!("variable index {i} out of {m}")))
            }
        };
        for c in &self.scalar_constraints {
            for &(i, a) in &c.coeffs {
                in_range(i)?;
                if !a.is_finite() {
                    return Err(Error::Domain("non-finite constraint coefficient".into()));
                }
            }
        }
        for (b, block) in self.lmi_blocks.iter().enumerate() {
            if block.dim == 0 || block.constant.dim() != block.dim {
                return Err(Error::DimensionMismatch(format!("LMI block {b} has inconsistent dimensions")));
            }
            for (i, f) in &block.terms {
                in_range(*i)?;
                if f.dim() != block.dim {
                    return Err(Error::DimensionMismatch(format!("LMI block {b} term has dimension {}", f.dim())));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    /// Worst constraint violation at `y`: the largest scalar violation or the
    /// most negative eigenvalue of any LMI block.
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        let scalar = self.scalar_constraints.iter().map(|c| c.violation(y)).fold(0.0, f64::max);
        let lmi = self
            .lmi_blocks
            .iter()
            .map(|b| {
                let eig = nalgebra::SymmetricEigen::new(b.evaluate(y));
                (-eig.eigenvalues.min()).max(0.0)
            })
            .fold(0.0, f64::max);
        scalar.max(lmi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub status: SdpStatus,
    /// Relative infeasibility of `values` in the problem's own constraints.
    pub primal_residual: f64,
    /// Relative residual of the multiplier (dual) equations.
    pub dual_residual: f64,
    /// Relative primal-dual objective gap.
    pub gap: f64,
    pub iterations: usize,
    /// Why the solver stopped, when it did not reach `Optimal`.
    pub message: Option<String>,
}

impl SdpSolution {
    pub fn max_residual(&self) -> f64 {
        self.primal_residual.max(self.dual_residual).max(self.gap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sparse_hermitian_is_hermitian() {
        let mut m = SparseHermitian::zeros(3);
        m.add(0, 1, c(1.0, 2.0));
        m.add(2, 0, c(-1.0, 0.5));
        m.add(1, 1, c(3.0, 7.0));
        let d = m.to_dense();
        assert_eq!(d[(1, 0)], c(1.0, -2.0));
        assert_eq!(d[(0, 2)], c(-1.0, -0.5));
        assert_eq!(d[(1, 1)], c(3.0, 0.0));
        assert_eq!(d, d.adjoint());
    }

    #[test]
    fn rank_one_matches_outer_product() {
        let g = [c(1.0, 1.0), c(0.0, -2.0)];
        let d = SparseHermitian::rank_one(&g, 0.5).to_dense();
        for r in 0..2 {
            for col in 0..2 {
                let expect = g[r] * g[col].conj() * 0.5;
                assert!((d[(r, col)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn violation_of_lmi() {
        let mut p = SdpProblem::new(vec!["x".into()], Sense::Minimize);
        let mut b = LmiBlock::new(2);
        b.constant.add(0, 1, c(1.0, 0.0));
        b.add_term(0, SparseHermitian::from_dense_upper(&DMatrix::identity(2, 2)));
        p.lmi_blocks.push(b);
        assert!(p.max_violation(&[1.0]) < 1e-15);
        assert!((p.max_violation(&[0.5]) - 0.5).abs() < 1e-12);
        p.validate().unwrap();
    }
}
