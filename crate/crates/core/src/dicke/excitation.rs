use std::fmt;

use serde::{Deserialize, Serialize};

use super::MAX_INDEX_QUBITS;
use crate::error::{Error, Result};

/// Bit of qubit `q` (1-based) in an n-qubit mask. Qubit 1 is the most significant bit.
#[inline]
pub fn qubit_bit(n: usize, q: usize) -> u64 {
    debug_assert!(q >= 1 && q <= n);
    1u64 << (n - q)
}

/// The set of excited qubits of one Dicke basis term, stored as an n-bit mask.
///
/// An excitation set doubles as a computational-basis index: qubit `q` is
/// excited exactly when its bit is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExcitationSet {
    n: usize,
    mask: u64,
}

impl ExcitationSet {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_INDEX_QUBITS {
            return Err(Error::domain(format!("qubit count {n} outside 1..={MAX_INDEX_QUBITS}")));
        }
        if mask >> n != 0 {
            return Err(Error::domain(format!("mask {mask:#b} does not fit in {n} qubits")));
        }
        Ok(ExcitationSet { n, mask })
    }

    /// Builds a set from 1-based qubit indices.
    pub fn from_qubits(n: usize, qubits: &[usize]) -> Result<Self> {
        let mut mask = 0;
        for &q in qubits {
            if q == 0 || q > n {
                return Err(Error::domain(format!("qubit {q} outside 1..={n}")));
            }
            mask |= qubit_bit(n, q);
        }
        Self::new(n, mask)
    }

    /// Parses a bit string such as `0101` (qubit 1 first).
    pub fn parse(bits: &str) -> Result<Self> {
        let n = bits.len();
        let mut mask = 0u64;
        for c in bits.chars() {
            mask = (mask << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::Parse(format!("invalid bit string {bits:?}"))),
                };
        }
        Self::new(n, mask)
    }

    pub(crate) fn from_raw(n: usize, mask: u64) -> Self {
        debug_assert!(mask >> n == 0);
        ExcitationSet { n, mask }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Basis index `|d_alpha>` of this set.
    pub fn index(&self) -> u64 {
        self.mask
    }

    pub fn excitations(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, q: usize) -> bool {
        q >= 1 && q <= self.n && self.mask & qubit_bit(self.n, q) != 0
    }

    /// Excited qubits in ascending order (1-based).
    pub fn excited_qubits(&self) -> Vec<usize> {
        (1..=self.n).filter(|&q| self.contains(q)).collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        ExcitationSet::from_raw(self.n, self.mask & other.mask)
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        ExcitationSet::from_raw(self.n, self.mask | other.mask)
    }
}

impl fmt::Display for ExcitationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 1..=self.n {
            f.write_str(if self.contains(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All n-qubit excitation sets with exactly `m` excited qubits, in ascending mask order.
pub fn enumerate_excitation_sets(n: usize, m: usize) -> Result<Vec<ExcitationSet>> {
    if n == 0 || n > MAX_INDEX_QUBITS {
        return Err(Error::domain(format!("qubit count {n} outside 1..={MAX_INDEX_QUBITS}")));
    }
    if m > n {
        return Err(Error::domain(format!("{m} excitations do not fit in {n} qubits")));
    }
    if m == 0 {
        return Ok(vec![ExcitationSet::from_raw(n, 0)]);
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut mask = (1u64 << m) - 1;
    // Gosper's hack: next larger integer with the same popcount.
    while mask < limit {
        out.push(ExcitationSet::from_raw(n, mask));
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    Ok(out)
}
