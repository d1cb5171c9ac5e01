//! Fidelity-witness baseline: detect when `<D_m^n|rho|D_m^n>` exceeds the largest
//! overlap any biseparable state can reach.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::Verdict;
use crate::dicke::{
    binomial, check_qubits, dicke_state, enumerate_excitation_sets, qubit_bit, Bipartition,
    ElementSource, PureState, MAX_DENSE_QUBITS,
};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub n: usize,
    pub m: usize,
    /// Largest squared overlap of a biseparable state with `|D_m^n>`.
    pub overlap_bound: f64,
}

impl WitnessSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Ok(WitnessSpec { n, m, overlap_bound: max_bisep_overlap(n, m)? })
    }
}

/// Maximum over bipartitions of the largest squared Schmidt coefficient of `|D_m^n>`.
pub fn max_bisep_overlap(n: usize, m: usize) -> Result<f64> {
    check_qubits(n, MAX_DENSE_QUBITS, "fidelity witness")?;
    let state = dicke_state(n, m)?;
    let cuts = Bipartition::all_canonical(n)?;
    let best = cuts
        .par_iter()
        .map(|cut| largest_schmidt_weight(&state, cut))
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Largest squared singular value of the amplitudes reshaped as an `A x B` matrix.
pub fn largest_schmidt_weight(state: &PureState, cut: &Bipartition) -> f64 {
    let n = state.qubits();
    let qa = cut.qubits_a();
    let qb = cut.qubits_b();
    let mut reshaped = DMatrix::<Complex64>::zeros(1 << qa.len(), 1 << qb.len());
    for (i, &amp) in state.amplitudes().iter().enumerate() {
        reshaped[(gather(n, i as u64, &qa), gather(n, i as u64, &qb))] = amp;
    }
    let top = reshaped.singular_values().iter().copied().fold(0.0, f64::max);
    top * top
}

/// Local index of the listed qubits inside a global basis index (first listed is most significant).
fn gather(n: usize, global: u64, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | usize::from(global & qubit_bit(n, q) != 0))
}

/// `<D_m^n|rho|D_m^n>`.
pub fn dicke_fidelity<S: ElementSource + ?Sized>(source: &S, m: usize) -> Result<f64> {
    let n = source.qubits();
    let sets = enumerate_excitation_sets(n, m)?;
    let mut total = 0.0;
    for r in &sets {
        for c in &sets {
            total += source.entry(r.index(), c.index()).re;
        }
    }
    Ok(total / binomial(n, m))
}

pub fn fidelity_witness_verdict<S: ElementSource + ?Sized>(
    source: &S,
    spec: &WitnessSpec,
) -> Result<Verdict> {
    fidelity_witness_verdict_with(source, spec, &Tolerances::DEFAULT)
}

pub fn fidelity_witness_verdict_with<S: ElementSource + ?Sized>(
    source: &S,
    spec: &WitnessSpec,
    tol: &Tolerances,
) -> Result<Verdict> {
    if source.qubits() != spec.n {
        return Err(Error::domain("witness and state have different qubit counts"));
    }
    let fidelity = dicke_fidelity(source, spec.m)?;
    Ok(if fidelity > spec.overlap_bound + tol.detection {
        Verdict::Detected
    } else {
        Verdict::NotDetected
    })
}
