use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{permute_index, validate_permutation};
use super::{check_qubits, ElementSource, PureState, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// A dense n-qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validates `matrix` against the default tolerances.
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerances(n, matrix, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(n: usize, matrix: DMatrix<Complex64>, tol: &Tolerances) -> Result<Self> {
        check_qubits(n, MAX_DENSE_QUBITS, "density operator")?;
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::NonPhysical(format!(
                "matrix is {}x{}, expected {dim}x{dim} for {n} qubits",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if !(defect <= tol.hermiticity) {
            return Err(Error::NonPhysical(format!(
                "Hermiticity defect {defect:e} exceeds {:e}",
                tol.hermiticity
            )));
        }
        let trace = matrix.trace();
        if !((trace.re - 1.0).abs() <= tol.trace && trace.im.abs() <= tol.trace) {
            return Err(Error::NonPhysical(format!("trace {trace} differs from 1")));
        }
        let rho = DensityOperator { n, matrix };
        let min = rho.min_eigenvalue();
        if !(min >= tol.min_eigenvalue) {
            return Err(Error::NonPhysical(format!(
                "smallest eigenvalue {min:e} is below {:e}",
                tol.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &PureState) -> Result<Self> {
        Self::from_mixture(&[(1.0, state)])
    }

    /// `sum_i w_i |psi_i><psi_i|`. Positivity holds by construction, so no eigensolve is run.
    pub fn from_mixture(components: &[(f64, &PureState)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::domain("empty mixture"));
        };
        let n = first.qubits();
        check_qubits(n, MAX_DENSE_QUBITS, "density operator")?;
        if components.iter().any(|(w, s)| s.qubits() != n || !(*w >= 0.0)) {
            return Err(Error::domain("mixture components need equal sizes and nonnegative weights"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > Tolerances::DEFAULT.trace {
            return Err(Error::domain(format!("mixture weights sum to {total}")));
        }
        let dim = 1usize << n;
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, state) in components {
            let amps = state.amplitudes();
            for c in 0..dim {
                let ac = amps[c].conj() * *w;
                if ac == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut column = matrix.column_mut(c);
                for (r, a) in amps.iter().enumerate() {
                    column[r] += a * ac;
                }
            }
        }
        Ok(DensityOperator { n, matrix })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n, MAX_DENSE_QUBITS, "density operator")?;
        let dim = 1usize << n;
        let mut matrix = DMatrix::<Complex64>::identity(dim, dim);
        matrix /= Complex64::new(dim as f64, 0.0);
        Ok(DensityOperator { n, matrix })
    }

    /// Materializes any element source, then validates it.
    pub fn from_source<S: ElementSource + ?Sized>(source: &S) -> Result<Self> {
        let n = source.qubits();
        check_qubits(n, MAX_DENSE_QUBITS, "density operator")?;
        let dim = 1usize << n;
        let matrix = DMatrix::from_fn(dim, dim, |r, c| source.entry(r as u64, c as u64));
        Self::new(n, matrix)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Relabels qubits so that new qubit `i + 1` is old qubit `perm[i]` (both 1-based).
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        validate_permutation(self.n, perm)?;
        let dim = 1usize << self.n;
        let map: Vec<usize> = (0..dim)
            .map(|i| permute_index(self.n, i as u64, perm) as usize)
            .collect();
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for c in 0..dim {
            for r in 0..dim {
                matrix[(map[r], map[c])] = self.matrix[(r, c)];
            }
        }
        Ok(DensityOperator { n: self.n, matrix })
    }
}

impl ElementSource for DensityOperator {
    fn qubits(&self) -> usize {
        self.n
    }

    fn entry(&self, row: u64, col: u64) -> Complex64 {
        self.matrix[(row as usize, col as usize)]
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub(crate) fn hermiticity_defect(matrix: &DMatrix<Complex64>) -> f64 {
    let dim = matrix.nrows();
    let mut worst: f64 = 0.0;
    for c in 0..dim {
        for r in 0..=c {
            worst = worst.max((matrix[(r, c)] - matrix[(c, r)].conj()).norm());
        }
    }
    worst
}
