//! Excitation-set combinatorics, Dicke states and the density-operator
//! representations every criterion consumes.

mod bipartition;
mod density;
mod excitation;
mod family;
mod state;

pub use bipartition::Bipartition;
pub use density::DensityOperator;
pub use excitation::{enumerate_excitation_sets, qubit_bit, ExcitationSet};
pub use family::{mix_with_white_noise, DickeTerm, StateFamily};
pub use state::{dicke_state, PureState};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count for which a dense `2^n x 2^n` matrix is built.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest qubit count for which a state vector is built.
pub const MAX_STATE_QUBITS: usize = 24;

/// Largest qubit count representable by a 64-bit basis index.
pub const MAX_INDEX_QUBITS: usize = 63;

/// Anything that can answer `<row|rho|col>` queries for an n-qubit state.
///
/// Dense matrices, pure states and closed-form families all implement this,
/// so the criterion never needs to know how a state is stored.
pub trait ElementSource: Sync {
    fn qubits(&self) -> usize;

    /// `<row|rho|col>` without bounds checks; both indices must be below `2^n`.
    fn entry(&self, row: u64, col: u64) -> Complex64;

    /// Population of a computational basis state.
    fn diagonal(&self, index: u64) -> f64 {
        self.entry(index, index).re
    }

    /// Checked variant of [`ElementSource::entry`].
    fn element(&self, row: u64, col: u64) -> Result<Complex64> {
        let dim = 1u64 << self.qubits();
        if row >= dim || col >= dim {
            return Err(Error::domain(format!(
                "basis index ({row}, {col}) out of range for {} qubits",
                self.qubits()
            )));
        }
        Ok(self.entry(row, col))
    }
}

impl<S: ElementSource + ?Sized> ElementSource for &S {
    fn qubits(&self) -> usize {
        (**self).qubits()
    }
    fn entry(&self, row: u64, col: u64) -> Complex64 {
        (**self).entry(row, col)
    }
    fn diagonal(&self, index: u64) -> f64 {
        (**self).diagonal(index)
    }
}

/// Binomial coefficient as a float. Exact whenever the value fits in a `u128`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return binomial_float(n, k),
        }
    }
    acc as f64
}

fn binomial_float(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn check_qubits(n: usize, limit: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(format!("{what}: need at least one qubit")));
    }
    if n > limit {
        return Err(Error::Resource(format!(
            "{what}: {n} qubits exceeds the limit of {limit}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(20, 2), 190.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(7, 0), 1.0);
    }

    #[test]
    fn binomial_large_values_stay_finite() {
        assert_eq!(binomial(100, 33), 294_692_427_022_540_894_366_527_900.0);
        assert!(binomial(400, 200).is_finite());
    }
}
