use num_complex::Complex64;

use super::{
    binomial, check_qubits, enumerate_excitation_sets, qubit_bit, Bipartition, ElementSource,
    MAX_STATE_QUBITS,
};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// A normalized n-qubit state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(n, MAX_STATE_QUBITS, "pure state")?;
        if amplitudes.len() != 1 << n {
            return Err(Error::domain(format!(
                "{} amplitudes given for {n} qubits (expected {})",
                amplitudes.len(),
                1usize << n
            )));
        }
        let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if (norm - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::domain(format!("state norm {norm} differs from 1")));
        }
        Ok(PureState { n, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(n, amplitudes)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: u64) -> Result<Self> {
        check_qubits(n, MAX_STATE_QUBITS, "pure state")?;
        if index >> n != 0 {
            return Err(Error::domain(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(PureState { n, amplitudes })
    }

    /// `|phi_A> (x) |phi_B>` with each factor's qubits placed back at their global positions.
    ///
    /// Within a factor, the lowest-numbered qubit of that side is the most significant bit.
    pub fn product(bipartition: &Bipartition, factor_a: &PureState, factor_b: &PureState) -> Result<Self> {
        let qa = bipartition.qubits_a();
        let qb = bipartition.qubits_b();
        if factor_a.n != qa.len() || factor_b.n != qb.len() {
            return Err(Error::domain(format!(
                "factor sizes ({}, {}) do not match bipartition {bipartition}",
                factor_a.n, factor_b.n
            )));
        }
        let n = bipartition.qubits();
        check_qubits(n, MAX_STATE_QUBITS, "product state")?;
        let scatter = |local: usize, qubits: &[usize]| -> u64 {
            let k = qubits.len();
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | qubit_bit(n, q))
        };
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (ia, &a) in factor_a.amplitudes.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ga = scatter(ia, &qa);
            for (ib, &b) in factor_b.amplitudes.iter().enumerate() {
                amplitudes[(ga | scatter(ib, &qb)) as usize] = a * b;
            }
        }
        Ok(PureState { n, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amplitudes[index as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// Applies the local phase `exp(i theta)` to the excited level of qubit `q`.
    pub fn with_local_phase(&self, q: usize, theta: f64) -> Result<Self> {
        if q == 0 || q > self.n {
            return Err(Error::domain(format!("qubit {q} outside 1..={}", self.n)));
        }
        let bit = qubit_bit(self.n, q);
        let phase = Complex64::from_polar(1.0, theta);
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| if i as u64 & bit != 0 { a * phase } else { a })
            .collect();
        Ok(PureState { n: self.n, amplitudes })
    }

    /// Relabels qubits so that new qubit `i + 1` is old qubit `perm[i]` (both 1-based).
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        validate_permutation(self.n, perm)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (old, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[permute_index(self.n, old as u64, perm) as usize] = a;
        }
        Ok(PureState { n: self.n, amplitudes })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl ElementSource for PureState {
    fn qubits(&self) -> usize {
        self.n
    }

    fn entry(&self, row: u64, col: u64) -> Complex64 {
        self.amplitudes[row as usize] * self.amplitudes[col as usize].conj()
    }
}

/// `|D_m^n>`: uniform superposition of every basis state with `m` excited qubits.
pub fn dicke_state(n: usize, m: usize) -> Result<PureState> {
    check_qubits(n, MAX_STATE_QUBITS, "Dicke state")?;
    if m == 0 || m >= n {
        return Err(Error::domain(format!("Dicke state needs 1 <= m <= n-1, got n={n} m={m}")));
    }
    let amp = Complex64::new(binomial(n, m).sqrt().recip(), 0.0);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    for set in enumerate_excitation_sets(n, m)? {
        amplitudes[set.index() as usize] = amp;
    }
    Ok(PureState { n, amplitudes })
}

pub(crate) fn validate_permutation(n: usize, perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; n + 1];
    if perm.len() != n
        || perm
            .iter()
            .any(|&q| q == 0 || q > n || std::mem::replace(&mut seen[q], true))
    {
        return Err(Error::domain(format!("{perm:?} is not a permutation of 1..={n}")));
    }
    Ok(())
}

/// Index of basis state `old` after the relabeling described in [`PureState::permute_qubits`].
pub(crate) fn permute_index(n: usize, old: u64, perm: &[usize]) -> u64 {
    perm.iter().enumerate().fold(0, |acc, (i, &src)| {
        if old & qubit_bit(n, src) != 0 {
            acc | qubit_bit(n, i + 1)
        } else {
            acc
        }
    })
}
