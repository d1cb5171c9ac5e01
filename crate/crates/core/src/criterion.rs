//! The Dicke-state criterion `I_m^n`.
//!
//! ```text
//! I = sum_{(a,b) in gamma} ( |<a|rho|b>| - sqrt(<a|b>_union * <a|b>_intersection) )
//!     - N_D * sum_a <a|rho|a>
//! ```
//!
//! `gamma` holds the ordered pairs of m-excitation sets that overlap in `m - 1`
//! qubits and `N_D = m (n - m - 1)`. A value above the detection tolerance
//! certifies genuine multipartite entanglement when `1 < m < n/2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicke::{
    check_qubits, enumerate_excitation_sets, qubit_bit, DensityOperator, ElementSource,
    ExcitationSet, MAX_INDEX_QUBITS,
};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest qubit count accepted by the two-copy evaluation (dimension `4^n`).
pub const MAX_TWO_COPY_QUBITS: usize = 5;

// Below this many pairs the per-pair terms are computed on the calling thread.
const PARALLEL_PAIRS: usize = 4096;

/// One ordered element `(alpha, beta)` of the pair set: the sets share `m - 1`
/// excitations, `x` is excited only in `alpha` and `y` only in `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaPair {
    pub alpha: ExcitationSet,
    pub beta: ExcitationSet,
    pub x: usize,
    pub y: usize,
}

impl GammaPair {
    pub fn union(&self) -> ExcitationSet {
        self.alpha.union(&self.beta)
    }

    pub fn intersection(&self) -> ExcitationSet {
        self.alpha.intersection(&self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Detected,
    NotDetected,
}

/// How the off-diagonal term `O` enters the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffDiagonalMode {
    /// `|<a|rho|b>|`
    Absolute,
    /// `Re <a|rho|b>`, the form that is linear in Pauli expectation values.
    RealPart,
}

/// Whether `(n, m)` lies in the range `1 < m < n/2` where the biseparable bound is proven.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Guaranteed,
    OutsideStatedRange,
}

impl Regime {
    pub fn of(n: usize, m: usize) -> Self {
        if m > 1 && 2 * m < n {
            Regime::Guaranteed
        } else {
            Regime::OutsideStatedRange
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub n: usize,
    pub m: usize,
    pub value: f64,
    pub o_sum: f64,
    pub p_sum: f64,
    pub d_sum: f64,
    pub n_d: usize,
    pub verdict: Verdict,
    pub mode: OffDiagonalMode,
    pub regime: Regime,
}

impl CriterionReport {
    pub fn detected(&self) -> bool {
        self.verdict == Verdict::Detected
    }
}

fn check_range(n: usize, m: usize) -> Result<()> {
    if !(2..=MAX_INDEX_QUBITS).contains(&n) || m == 0 || m >= n {
        return Err(Error::domain(format!("criterion needs 1 <= m <= n-1, got n={n} m={m}")));
    }
    Ok(())
}

/// Every ordered pair of m-excitation sets overlapping in `m - 1` qubits,
/// sorted by `(alpha, beta)` mask.
pub fn gamma_pairs(n: usize, m: usize) -> Result<Vec<GammaPair>> {
    check_range(n, m)?;
    let mut pairs = Vec::new();
    for alpha in enumerate_excitation_sets(n, m)? {
        let start = pairs.len();
        for x in alpha.excited_qubits() {
            for y in (1..=n).filter(|&q| !alpha.contains(q)) {
                let mask = alpha.mask() ^ qubit_bit(n, x) ^ qubit_bit(n, y);
                let beta = ExcitationSet::new(n, mask)?;
                pairs.push(GammaPair { alpha, beta, x, y });
            }
        }
        pairs[start..].sort_unstable_by_key(|p| p.beta.mask());
    }
    Ok(pairs)
}

/// Diagonal budget `N_D = m (n - m - 1)`.
pub fn n_d(n: usize, m: usize) -> Result<usize> {
    check_range(n, m)?;
    Ok(m * (n - m - 1))
}

fn population<S: ElementSource + ?Sized>(source: &S, index: u64, tol: &Tolerances) -> Result<f64> {
    let d = source.diagonal(index);
    if d.is_nan() || d < -tol.negative_population {
        return Err(Error::NumericalValidity(format!(
            "population of basis state {index} is {d:e}"
        )));
    }
    Ok(d.max(0.0))
}

/// `P = sqrt(<union|rho|union> <intersection|rho|intersection>)`.
pub fn p_term<S: ElementSource + ?Sized>(source: &S, pair: &GammaPair) -> Result<f64> {
    p_term_with(source, pair, &Tolerances::DEFAULT)
}

fn p_term_with<S: ElementSource + ?Sized>(
    source: &S,
    pair: &GammaPair,
    tol: &Tolerances,
) -> Result<f64> {
    if source.qubits() != pair.alpha.qubits() {
        return Err(Error::domain("pair and state have different qubit counts"));
    }
    let upper = population(source, pair.union().index(), tol)?;
    let lower = population(source, pair.intersection().index(), tol)?;
    Ok((upper * lower).sqrt())
}

/// Evaluates `P` on two copies of `rho`:
/// `sqrt(<a| (x) <b| Pi rho (x) rho Pi |a> (x) |b>)`, where `Pi` exchanges the
/// qubits of `alpha` between the copies.
pub fn p_term_two_copy_oracle(rho: &DensityOperator, pair: &GammaPair) -> Result<f64> {
    let n = rho.qubits();
    if n > MAX_TWO_COPY_QUBITS {
        return Err(Error::Resource(format!(
            "two-copy evaluation limited to {MAX_TWO_COPY_QUBITS} qubits, got {n}"
        )));
    }
    if pair.alpha.qubits() != n {
        return Err(Error::domain("pair and state have different qubit counts"));
    }
    let dim = 1usize << n;
    let doubled = rho.matrix().kronecker(rho.matrix());
    let swap = swap_operator(n, pair.alpha.mask());
    let mut ket = DVector::<Complex64>::zeros(dim * dim);
    ket[pair.alpha.index() as usize * dim + pair.beta.index() as usize] = Complex64::new(1.0, 0.0);
    let swapped = &swap * ket;
    let value = swapped.dotc(&(&doubled * &swapped));
    if value.re < -Tolerances::DEFAULT.negative_population {
        return Err(Error::NumericalValidity(format!("two-copy expectation {value} is negative")));
    }
    Ok(value.re.max(0.0).sqrt())
}

/// Permutation matrix on the two-copy space exchanging the qubits in `mask`.
/// Copy one occupies the high `n` bits of the doubled index.
fn swap_operator(n: usize, mask: u64) -> DMatrix<Complex64> {
    let dim = 1usize << (2 * n);
    let mut op = DMatrix::<Complex64>::zeros(dim, dim);
    let m = mask as usize;
    for i in 0..dim {
        let (hi, lo) = (i >> n, i & ((1 << n) - 1));
        let hi2 = (hi & !m) | (lo & m);
        let lo2 = (lo & !m) | (hi & m);
        op[((hi2 << n) | lo2, i)] = Complex64::new(1.0, 0.0);
    }
    op
}

/// Precomputed pair list for repeated evaluation at fixed `(n, m)`.
#[derive(Clone, Debug)]
pub struct Criterion {
    n: usize,
    m: usize,
    n_d: usize,
    pairs: Vec<GammaPair>,
    diagonals: Vec<ExcitationSet>,
}

impl Criterion {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        check_range(n, m)?;
        check_qubits(n, MAX_INDEX_QUBITS, "criterion")?;
        Ok(Criterion {
            n,
            m,
            n_d: n_d(n, m)?,
            pairs: gamma_pairs(n, m)?,
            diagonals: enumerate_excitation_sets(n, m)?,
        })
    }

    pub fn pairs(&self) -> &[GammaPair] {
        &self.pairs
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn excitations(&self) -> usize {
        self.m
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn evaluate<S: ElementSource + ?Sized>(
        &self,
        source: &S,
        mode: OffDiagonalMode,
        tol: &Tolerances,
    ) -> Result<CriterionReport> {
        if source.qubits() != self.n {
            return Err(Error::domain(format!(
                "state has {} qubits, criterion expects {}",
                source.qubits(),
                self.n
            )));
        }
        let term = |pair: &GammaPair| -> Result<(f64, f64)> {
            let o = source.entry(pair.alpha.index(), pair.beta.index());
            let o = match mode {
                OffDiagonalMode::Absolute => o.norm(),
                OffDiagonalMode::RealPart => o.re,
            };
            Ok((o, p_term_with(source, pair, tol)?))
        };
        // Terms are collected in pair order and reduced sequentially so the
        // result does not depend on the thread count.
        let terms: Vec<(f64, f64)> = if self.pairs.len() >= PARALLEL_PAIRS {
            self.pairs.par_iter().map(term).collect::<Result<_>>()?
        } else {
            self.pairs.iter().map(term).collect::<Result<_>>()?
        };
        let (mut o_sum, mut p_sum) = (0.0, 0.0);
        for (o, p) in terms {
            o_sum += o;
            p_sum += p;
        }
        let mut d_sum = 0.0;
        for set in &self.diagonals {
            d_sum += population(source, set.index(), tol)?;
        }
        Ok(self.report(o_sum, p_sum, d_sum, mode, tol))
    }

    /// Assembles a report from precomputed term sums.
    pub fn report(
        &self,
        o_sum: f64,
        p_sum: f64,
        d_sum: f64,
        mode: OffDiagonalMode,
        tol: &Tolerances,
    ) -> CriterionReport {
        let value = o_sum - p_sum - self.n_d as f64 * d_sum;
        CriterionReport {
            n: self.n,
            m: self.m,
            value,
            o_sum,
            p_sum,
            d_sum,
            n_d: self.n_d,
            verdict: if value > tol.detection { Verdict::Detected } else { Verdict::NotDetected },
            mode,
            regime: Regime::of(self.n, self.m),
        }
    }
}

fn warn_outside_range(n: usize, m: usize) {
    if Regime::of(n, m) == Regime::OutsideStatedRange {
        log::warn!("m={m}, n={n} lies outside 1 < m < n/2; a positive value is not a certified detection");
    }
}

/// Evaluates the criterion with `|O|` off-diagonal terms.
pub fn evaluate_criterion<S: ElementSource + ?Sized>(
    source: &S,
    n: usize,
    m: usize,
) -> Result<CriterionReport> {
    evaluate_with(source, n, m, OffDiagonalMode::Absolute, &Tolerances::DEFAULT)
}

/// Evaluates the criterion with `Re O` in place of `|O|`.
pub fn real_part_mode<S: ElementSource + ?Sized>(
    source: &S,
    n: usize,
    m: usize,
) -> Result<CriterionReport> {
    evaluate_with(source, n, m, OffDiagonalMode::RealPart, &Tolerances::DEFAULT)
}

pub fn evaluate_with<S: ElementSource + ?Sized>(
    source: &S,
    n: usize,
    m: usize,
    mode: OffDiagonalMode,
    tol: &Tolerances,
) -> Result<CriterionReport> {
    if source.qubits() != n {
        return Err(Error::domain(format!(
            "state has {} qubits but n = {n}",
            source.qubits()
        )));
    }
    let criterion = Criterion::new(n, m)?;
    warn_outside_range(n, m);
    criterion.evaluate(source, mode, tol)
}
