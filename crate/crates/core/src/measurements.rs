//! Pauli-expectation form of the criterion.
//!
//! Every density-matrix element is a linear combination of n-fold Pauli
//! expectation values: per qubit, `|0><0| = (I+Z)/2`, `|1><1| = (I-Z)/2`,
//! `|0><1| = (X+iY)/2` and `|1><0| = (X-iY)/2`. The off-diagonal part of the
//! criterion is linear in those expectations (real-part mode), so it is
//! expanded once as a sum; the `P` and `D` terms need individual populations.
//!
//! A measurement setting here is one distinct non-identity Pauli string.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{Criterion, CriterionReport, OffDiagonalMode};
use crate::dicke::{enumerate_excitation_sets, ElementSource, MAX_INDEX_QUBITS};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest qubit count accepted by the expansion routines (`2^n` terms per element).
pub const MAX_EXPANSION_QUBITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli word in symplectic form: bit `n - q` of `x`/`z` belongs to qubit `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n == 0 || n > MAX_INDEX_QUBITS || x >> n != 0 || z >> n != 0 {
            return Err(Error::domain(format!("invalid Pauli string masks for {n} qubits")));
        }
        Ok(PauliString { n, x, z })
    }

    pub fn identity(n: usize) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Letter on qubit `q` (1-based, qubit 1 first).
    pub fn letter(&self, q: usize) -> Pauli {
        let bit = 1u64 << (self.n - q);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (1..=self.n).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Base-4 digits `I < X < Y < Z`, qubit 1 most significant.
    fn sort_key(&self) -> u128 {
        (1..=self.n).fold(0u128, |acc, q| (acc << 2) | self.letter(q) as u128)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters().into_iter().try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_INDEX_QUBITS {
            return Err(Error::Parse(format!("invalid Pauli string {s:?}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for c in s.chars() {
            let (bx, bz) = match c {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                _ => return Err(Error::Parse(format!("invalid Pauli letter {c:?} in {s:?}"))),
            };
            x = (x << 1) | bx;
            z = (z << 1) | bz;
        }
        Ok(PauliString { n, x, z })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `sum_k coefficient_k * <operator_k>`, sorted by operator.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliExpansion {
    pub terms: Vec<(Complex64, PauliString)>,
}

impl PauliExpansion {
    /// Evaluates the expansion against expectation values; `<I...I>` is taken as one.
    pub fn evaluate(&self, table: &ExpectationTable) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (c, op) in &self.terms {
            total += c * table.lookup(op)?;
        }
        Ok(total)
    }
}

fn check_expansion_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_EXPANSION_QUBITS {
        return Err(Error::Resource(format!(
            "Pauli expansion supports 1..={MAX_EXPANSION_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

/// Expansion of the operator `|ket><bra|`.
pub fn expand_outer(ket: u64, bra: u64, n: usize) -> Result<PauliExpansion> {
    check_expansion_size(n)?;
    if ket >> n != 0 || bra >> n != 0 {
        return Err(Error::domain(format!("basis index out of range for {n} qubits")));
    }
    let mut terms: Vec<_> = outer_terms(ket, bra, n).collect();
    terms.sort_by_key(|a| a.1);
    Ok(PauliExpansion { terms })
}

/// Expansion of `<row|rho|col> = Tr(rho |col><row|)`.
pub fn expand_element(row: u64, col: u64, n: usize) -> Result<PauliExpansion> {
    expand_outer(col, row, n)
}

fn outer_terms(ket: u64, bra: u64, n: usize) -> impl Iterator<Item = (Complex64, PauliString)> {
    let flip = ket ^ bra;
    let scale = 0.5f64.powi(n as i32);
    // Each qubit contributes I/Z (equal bits) or X/Y (different bits); `choice`
    // selects the second letter. Z picks up (-1)^ket, Y picks up i (-1)^ket.
    (0..1u64 << n).map(move |choice| {
        let sign = if (choice & ket).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let phase = match (choice & flip).count_ones() % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (phase * scale, PauliString { n, x: flip, z: choice })
    })
}

/// The operators and coefficients needed to evaluate the criterion from expectation values.
#[derive(Clone, Debug)]
pub struct MeasurementPlan {
    criterion: Criterion,
    /// Real coefficients of `sum_gamma Re <alpha|rho|beta>`.
    off_diagonal: Vec<(f64, PauliString)>,
    /// Basis states whose populations enter `P` or `D`.
    populations: Vec<u64>,
    operators: Vec<PauliString>,
}

impl MeasurementPlan {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        check_expansion_size(n)?;
        let criterion = Criterion::new(n, m)?;

        let mut sum: HashMap<PauliString, f64> = HashMap::new();
        for pair in criterion.pairs() {
            for (c, op) in outer_terms(pair.beta.index(), pair.alpha.index(), n) {
                *sum.entry(op).or_insert(0.0) += c.re;
            }
        }
        // Coefficients are sums of +-2^-n, so cancellations are exact.
        let mut off_diagonal: Vec<(f64, PauliString)> =
            sum.into_iter().filter(|(_, c)| *c != 0.0).map(|(op, c)| (c, op)).collect();
        off_diagonal.sort_by_key(|a| a.1);

        let populations: BTreeSet<u64> = [m - 1, m, m + 1]
            .into_iter()
            .map(|k| enumerate_excitation_sets(n, k))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .map(|s| s.index())
            .collect();

        let mut operators: BTreeSet<PauliString> = off_diagonal.iter().map(|(_, op)| *op).collect();
        for &k in &populations {
            operators.extend(outer_terms(k, k, n).map(|(_, op)| op));
        }
        operators.remove(&PauliString::identity(n));

        Ok(MeasurementPlan {
            criterion,
            off_diagonal,
            populations: populations.into_iter().collect(),
            operators: operators.into_iter().collect(),
        })
    }

    pub fn operators(&self) -> &[PauliString] {
        &self.operators
    }

    pub fn off_diagonal_terms(&self) -> &[(f64, PauliString)] {
        &self.off_diagonal
    }

    pub fn populations(&self) -> &[u64] {
        &self.populations
    }

    pub fn evaluate(&self, table: &ExpectationTable, tol: &Tolerances) -> Result<CriterionReport> {
        let n = self.criterion.qubits();
        if table.qubits() != n {
            return Err(Error::domain(format!(
                "table covers {} qubits, criterion expects {n}",
                table.qubits()
            )));
        }
        if let Some(missing) = self.operators.iter().find(|op| !table.contains(op)) {
            return Err(Error::IncompleteTable { operator: missing.to_string() });
        }

        let mut o_sum = 0.0;
        for (c, op) in &self.off_diagonal {
            o_sum += c * table.lookup(op)?;
        }

        let mut population = HashMap::with_capacity(self.populations.len());
        for &k in &self.populations {
            let value = expand_element(k, k, n)?.evaluate(table)?.re;
            if value < -tol.negative_population {
                return Err(Error::NumericalValidity(format!(
                    "expectations imply population {value:e} for basis state {k}"
                )));
            }
            population.insert(k, value.max(0.0));
        }

        let mut p_sum = 0.0;
        for pair in self.criterion.pairs() {
            p_sum += (population[&pair.union().index()] * population[&pair.intersection().index()]).sqrt();
        }
        let d_sum: f64 = enumerate_excitation_sets(n, self.criterion.excitations())?
            .iter()
            .map(|s| population[&s.index()])
            .sum();
        Ok(self.criterion.report(o_sum, p_sum, d_sum, OffDiagonalMode::RealPart, tol))
    }
}

/// Sorted list of the non-identity Pauli strings the criterion needs.
pub fn required_operators(n: usize, m: usize) -> Result<Vec<PauliString>> {
    Ok(MeasurementPlan::new(n, m)?.operators)
}

/// Number of non-identity Pauli strings needed for full tomography, `4^n - 1`.
pub fn tomography_count(n: usize) -> Result<u128> {
    if n == 0 || n > MAX_INDEX_QUBITS {
        return Err(Error::domain(format!("invalid qubit count {n}")));
    }
    Ok((1u128 << (2 * n)) - 1)
}

/// Distinct density-matrix elements the criterion reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementCount {
    /// Unordered off-diagonal pairs `{alpha, beta}`.
    pub off_diagonal: usize,
    /// Populations with `m - 1`, `m` or `m + 1` excitations.
    pub diagonal: usize,
}

impl ElementCount {
    pub fn total(&self) -> usize {
        self.off_diagonal + self.diagonal
    }
}

pub fn required_elements(n: usize, m: usize) -> Result<ElementCount> {
    let criterion = Criterion::new(n, m)?;
    let binom = |k: usize| crate::dicke::binomial(n, k) as usize;
    Ok(ElementCount {
        off_diagonal: criterion.pairs().len() / 2,
        diagonal: binom(m - 1) + binom(m) + binom(m + 1),
    })
}

/// Measured (or simulated) expectation values keyed by Pauli string.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExpectationTable {
    n: usize,
    values: BTreeMap<PauliString, f64>,
}

impl ExpectationTable {
    pub fn new(n: usize) -> Self {
        ExpectationTable { n, values: BTreeMap::new() }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn insert(&mut self, op: PauliString, value: f64) -> Result<()> {
        if op.qubits() != self.n {
            return Err(Error::domain(format!("operator {op} does not act on {} qubits", self.n)));
        }
        if !(value.abs() <= 1.0 + 1e-9) {
            return Err(Error::domain(format!("expectation {value} of {op} outside [-1, 1]")));
        }
        self.values.insert(op, value);
        Ok(())
    }

    pub fn remove(&mut self, op: &PauliString) -> Option<f64> {
        self.values.remove(op)
    }

    pub fn get(&self, op: &PauliString) -> Option<f64> {
        if op.is_identity() && op.qubits() == self.n {
            return Some(1.0);
        }
        self.values.get(op).copied()
    }

    pub fn contains(&self, op: &PauliString) -> bool {
        self.get(op).is_some()
    }

    fn lookup(&self, op: &PauliString) -> Result<f64> {
        self.get(op).ok_or_else(|| Error::IncompleteTable { operator: op.to_string() })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &f64)> {
        self.values.iter()
    }

    /// CSV with header `operator,value`; values use the shortest exact decimal form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["operator", "value"])?;
        for (op, v) in &self.values {
            w.write_record([op.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["operator", "value"] {
            return Err(Error::Parse(format!("expected header operator,value, got {headers:?}")));
        }
        let mut table: Option<ExpectationTable> = None;
        for record in reader.records() {
            let record = record?;
            let op: PauliString = record[0].trim().parse()?;
            let value: f64 = record[1]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad value {:?} for {op}: {e}", &record[1])))?;
            let t = table.get_or_insert_with(|| ExpectationTable::new(op.qubits()));
            t.insert(op, value)?;
        }
        table.ok_or_else(|| Error::Parse("expectation table has no rows".into()))
    }
}

/// `Tr(rho P)` from matrix elements: `P|c> = phase(c) |c xor x>`.
pub fn pauli_expectation<S: ElementSource + ?Sized>(source: &S, op: &PauliString) -> Result<f64> {
    let n = source.qubits();
    if op.qubits() != n {
        return Err(Error::domain(format!("operator {op} does not act on {n} qubits")));
    }
    check_expansion_size(n)?;
    let y_phase = match (op.x & op.z).count_ones() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let mut total = Complex64::new(0.0, 0.0);
    for c in 0..1u64 << n {
        let e = source.entry(c, c ^ op.x);
        total += if (c & op.z).count_ones().is_multiple_of(2) { e } else { -e };
    }
    Ok((total * y_phase).re)
}

/// Exact expectations of every operator the criterion needs.
pub fn expectation_table_from_state<S: ElementSource + ?Sized>(
    source: &S,
    n: usize,
    m: usize,
) -> Result<ExpectationTable> {
    if source.qubits() != n {
        return Err(Error::domain(format!("state has {} qubits but n = {n}", source.qubits())));
    }
    let ops = required_operators(n, m)?;
    let values = ops
        .par_iter()
        .map(|op| pauli_expectation(source, op))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ExpectationTable::new(n);
    for (op, v) in ops.into_iter().zip(values) {
        table.insert(op, v.clamp(-1.0, 1.0))?;
    }
    Ok(table)
}

/// Criterion value (real-part mode) computed only from expectation values.
pub fn evaluate_from_expectations(
    table: &ExpectationTable,
    n: usize,
    m: usize,
) -> Result<CriterionReport> {
    MeasurementPlan::new(n, m)?.evaluate(table, &Tolerances::DEFAULT)
}
