use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vectorspace::{Space, SpaceVector};

/// Linear operator that is symmetric positive definite for the weighted
/// pairing, i.e. `W A` is an SPD matrix.
///
/// Matrix-vector products use the stored nonzero pattern; the dense copy is
/// kept for factorization.
#[derive(Clone, Debug)]
pub struct SpdOperator {
    space: Space,
    rows: Vec<Vec<(usize, f64)>>,
    // Cholesky factor of S = W^{1/2} A W^{-1/2}
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    lambda_min: f64,
    lambda_max: f64,
}

impl SpdOperator {
    pub fn new(space: &Space, matrix: DMatrix<f64>) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Structural(format!(
                "operator is {}x{}, space has dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|a| !a.is_finite()) {
            return Err(Error::RejectedInput("operator has non-finite entries".into()));
        }
        let sw: Vec<f64> = space.weights().iter().map(|w| w.sqrt()).collect();
        let sym = DMatrix::from_fn(n, n, |i, j| sw[i] * matrix[(i, j)] / sw[j]);
        let scale = sym.amax().max(f64::MIN_POSITIVE);
        let asym = (&sym - sym.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Parameter(format!(
                "operator is not symmetric for the weighted pairing (asymmetry {asym:e})"
            )));
        }
        let sym = (&sym + sym.transpose()) * 0.5;
        let chol = nalgebra::Cholesky::new(sym.clone()).ok_or_else(|| {
            Error::Parameter("operator is not positive definite (Cholesky failed)".into())
        })?;
        let eig = nalgebra::SymmetricEigen::new(sym);
        let lambda_min = eig.eigenvalues.min();
        let lambda_max = eig.eigenvalues.max();
        if !(lambda_min > 0.0) {
            return Err(Error::Parameter(format!(
                "operator is not positive definite (smallest eigenvalue {lambda_min:e})"
            )));
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| matrix[(i, j)] != 0.0)
                    .map(|j| (j, matrix[(i, j)]))
                    .collect()
            })
            .collect();
        Ok(Self { space: space.clone(), rows, chol, lambda_min, lambda_max })
    }

    pub fn identity(space: &Space) -> Self {
        Self::new(space, DMatrix::identity(space.dim(), space.dim()))
            .expect("identity is SPD for any weights")
    }

    /// `tridiag(-1, 2, -1) / h²` with `h = 1/(n+1)`.
    pub fn dirichlet_laplacian(space: &Space) -> Result<Self> {
        let n = space.dim();
        let h = 1.0 / (n as f64 + 1.0);
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0 / (h * h)
            } else if i.abs_diff(j) == 1 {
                -1.0 / (h * h)
            } else {
                0.0
            }
        });
        Self::new(space, m)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn apply(&self, x: &SpaceVector) -> SpaceVector {
        let xs = x.coeffs();
        let out = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(j, a)| a * xs[*j]).sum())
            .collect();
        self.space.vector(out).unwrap_or_else(|_| self.space.zeros())
    }

    /// Solve `A u = b`.
    pub fn solve(&self, b: &SpaceVector) -> Result<SpaceVector> {
        if !b.space().same_as(&self.space) {
            return Err(Error::Structural("right-hand side lives in another space".into()));
        }
        let w = self.space.weights();
        let rhs = DVector::from_iterator(b.dim(), b.coeffs().iter().zip(w).map(|(b, w)| w.sqrt() * b));
        let y = self.chol.solve(&rhs);
        self.space
            .vector(y.iter().zip(w).map(|(y, w)| y / w.sqrt()).collect())
    }
}
