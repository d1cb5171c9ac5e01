use std::fmt;

use serde::{Deserialize, Serialize};

use super::{qubit_bit, MAX_INDEX_QUBITS};
use crate::error::{Error, Result};

/// A split `A|B` of the n qubits into two nonempty groups.
///
/// The canonical form keeps qubit 1 in `A`, so `A|B` and `B|A` compare equal
/// after [`Bipartition::canonical`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    side_a: u64,
}

impl Bipartition {
    pub fn new(n: usize, side_a: u64) -> Result<Self> {
        if !(2..=MAX_INDEX_QUBITS).contains(&n) {
            return Err(Error::domain(format!("a bipartition needs 2..={MAX_INDEX_QUBITS} qubits, got {n}")));
        }
        let full = full_mask(n);
        if side_a & !full != 0 {
            return Err(Error::domain(format!("side mask {side_a:#b} exceeds {n} qubits")));
        }
        if side_a == 0 || side_a == full {
            return Err(Error::domain("both sides of a bipartition must be nonempty"));
        }
        Ok(Bipartition { n, side_a })
    }

    /// Builds a bipartition from the 1-based qubits of side `A`.
    pub fn from_side_a(n: usize, qubits: &[usize]) -> Result<Self> {
        let mut mask = 0;
        for &q in qubits {
            if q == 0 || q > n {
                return Err(Error::domain(format!("qubit {q} outside 1..={n}")));
            }
            mask |= qubit_bit(n, q);
        }
        Self::new(n, mask)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn side_a(&self) -> u64 {
        self.side_a
    }

    pub fn side_b(&self) -> u64 {
        full_mask(self.n) & !self.side_a
    }

    pub fn canonical(self) -> Self {
        if self.side_a & qubit_bit(self.n, 1) != 0 {
            self
        } else {
            Bipartition { n: self.n, side_a: self.side_b() }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.side_a & qubit_bit(self.n, 1) != 0
    }

    pub fn in_a(&self, q: usize) -> bool {
        self.side_a & qubit_bit(self.n, q) != 0
    }

    /// True when qubits `x` and `y` lie on the same side.
    pub fn same_side(&self, x: usize, y: usize) -> bool {
        self.in_a(x) == self.in_a(y)
    }

    pub fn qubits_a(&self) -> Vec<usize> {
        (1..=self.n).filter(|&q| self.in_a(q)).collect()
    }

    pub fn qubits_b(&self) -> Vec<usize> {
        (1..=self.n).filter(|&q| !self.in_a(q)).collect()
    }

    /// All `2^(n-1) - 1` canonical bipartitions of n qubits.
    pub fn all_canonical(n: usize) -> Result<Vec<Bipartition>> {
        if !(2..=32).contains(&n) {
            return Err(Error::domain(format!("cannot enumerate bipartitions of {n} qubits")));
        }
        let top = qubit_bit(n, 1);
        Ok((0..top - 1)
            .map(|rest| Bipartition { n, side_a: top | rest })
            .collect())
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |qs: Vec<usize>| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(self.qubits_a()), join(self.qubits_b()))
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
