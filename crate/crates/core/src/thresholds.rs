//! White-noise thresholds, the two-parameter detection map of the D_2/D_3
//! mixture, and threshold scaling curves.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{Criterion, OffDiagonalMode, Verdict};
use crate::dicke::{binomial, StateFamily};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use crate::witness::{fidelity_witness_verdict_with, WitnessSpec};

/// Largest qubit count accepted by the closed-form threshold.
pub const MAX_ANALYTIC_QUBITS: usize = 1000;

// Points of the coarse monotonicity scan run before bisection.
const SCAN_POINTS: usize = 21;

fn check_range(n: usize, m: usize) -> Result<()> {
    if !(2..=MAX_ANALYTIC_QUBITS).contains(&n) || m == 0 || m >= n {
        return Err(Error::domain(format!("threshold needs 1 <= m <= n-1, got n={n} m={m}")));
    }
    Ok(())
}

/// Noise weight below which `|D_m^n>` mixed with white noise is detected:
/// `2^n / (2^n + (2n - 2m - 1) C(n, m))`.
pub fn analytic_threshold(n: usize, m: usize) -> Result<f64> {
    check_range(n, m)?;
    let states = 2f64.powi(n as i32);
    Ok(states / (states + (2 * n - 2 * m - 1) as f64 * binomial(n, m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum ThresholdOutcome {
    /// The criterion changes sign at this mixing weight.
    Crossing(f64),
    DetectedEverywhere,
    DetectedNowhere,
}

impl ThresholdOutcome {
    pub fn crossing(&self) -> Option<f64> {
        match self {
            ThresholdOutcome::Crossing(p) => Some(*p),
            _ => None,
        }
    }
}

/// Bisects `I(family(p)) = 0` on `[0, 1]`.
///
/// The criterion must be nonincreasing in `p`; a coarse scan checks this first.
pub fn numeric_threshold<F>(family: F, n: usize, m: usize) -> Result<ThresholdOutcome>
where
    F: Fn(f64) -> Result<StateFamily>,
{
    numeric_threshold_with(family, n, m, &Tolerances::DEFAULT)
}

pub fn numeric_threshold_with<F>(family: F, n: usize, m: usize, tol: &Tolerances) -> Result<ThresholdOutcome>
where
    F: Fn(f64) -> Result<StateFamily>,
{
    let criterion = Criterion::new(n, m)?;
    let value = |p: f64| -> Result<f64> {
        Ok(criterion.evaluate(&family(p)?, OffDiagonalMode::Absolute, tol)?.value)
    };

    let scan = (0..SCAN_POINTS)
        .map(|i| value(i as f64 / (SCAN_POINTS - 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = scan.windows(2).position(|w| w[1] > w[0] + 1e-12) {
        return Err(Error::domain(format!(
            "criterion increases with the mixing weight near p = {}",
            i as f64 / (SCAN_POINTS - 1) as f64
        )));
    }

    let detected = |v: f64| v > tol.detection;
    let (start, end) = (scan[0], scan[SCAN_POINTS - 1]);
    if !detected(start) {
        return Ok(ThresholdOutcome::DetectedNowhere);
    }
    if detected(end) {
        return Ok(ThresholdOutcome::DetectedEverywhere);
    }
    // Root of I = 0 rather than of I = tolerance: thresholds are properties of the state family.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol.bisection {
        let mid = 0.5 * (lo + hi);
        if value(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdOutcome::Crossing(0.5 * (lo + hi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub n: usize,
    pub m: usize,
    pub analytic_p: f64,
    pub numeric_p: f64,
    pub agreement: f64,
}

/// Analytic and bisected thresholds for `|D_m^n>` under white noise.
pub fn white_noise_threshold(n: usize, m: usize, tol: &Tolerances) -> Result<ThresholdResult> {
    let analytic_p = analytic_threshold(n, m)?;
    let outcome = numeric_threshold_with(|p| StateFamily::dicke_with_noise(n, m, p), n, m, tol)?;
    let numeric_p = outcome.crossing().ok_or_else(|| {
        Error::NumericalValidity(format!("no threshold crossing for n={n} m={m}: {outcome:?}"))
    })?;
    Ok(ThresholdResult { n, m, analytic_p, numeric_p, agreement: (analytic_p - numeric_p).abs() })
}

/// Resolution of a `(p, q)` grid over the unit square, plus the qubit count of the family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub qubits: usize,
    pub p_points: usize,
    pub q_points: usize,
}

impl GridSpec {
    pub fn square(points: usize) -> Self {
        GridSpec { qubits: 6, p_points: points, q_points: points }
    }

    pub fn p_at(&self, i: usize) -> f64 {
        i as f64 / (self.p_points - 1) as f64
    }

    pub fn q_at(&self, j: usize) -> f64 {
        j as f64 / (self.q_points - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.p_points < 2 || self.q_points < 2 {
            return Err(Error::domain("grid needs at least two points per axis"));
        }
        if self.qubits < 4 || self.qubits > 20 {
            return Err(Error::domain(format!("region scan needs 4..=20 qubits, got {}", self.qubits)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFlags {
    /// Detected by the criterion for two excitations.
    pub i_d2: bool,
    /// Detected by the criterion for three excitations.
    pub i_d3: bool,
    /// Detected by the fidelity witness of `|D_3^n>`.
    pub f_d3: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub p: f64,
    pub q: f64,
    /// `None` when `p + q > 1`.
    pub flags: Option<CellFlags>,
}

/// Verdicts on `p D_2 + q D_3 + (1 - p - q) 1/2^n`, row-major in `p` then `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub spec: GridSpec,
    pub witness_bound: f64,
    pub cells: Vec<Cell>,
}

impl RegionGrid {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * self.spec.q_points + j]
    }

    /// First `p` on the `q = 0` edge where the two-excitation criterion detects.
    pub fn i_d2_onset_on_p_axis(&self) -> Option<f64> {
        (0..self.spec.p_points)
            .map(|i| self.cell(i, 0))
            .find(|c| c.flags.is_some_and(|f| f.i_d2))
            .map(|c| c.p)
    }

    /// First `q` on the `p = 0` edge where the three-excitation criterion detects.
    pub fn i_d3_onset_on_q_axis(&self) -> Option<f64> {
        (0..self.spec.q_points)
            .map(|j| self.cell(0, j))
            .find(|c| c.flags.is_some_and(|f| f.i_d3))
            .map(|c| c.q)
    }

    /// Cells detected by the fidelity witness but not by the three-excitation criterion.
    pub fn witness_only_cells(&self) -> Vec<Cell> {
        self.cells
            .iter()
            .filter(|c| c.flags.is_some_and(|f| f.f_d3 && !f.i_d3))
            .copied()
            .collect()
    }

    /// CSV with header `p,q,i_d2,i_d3,f_d3`; out-of-domain cells are omitted.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "q", "i_d2", "i_d3", "f_d3"])?;
        let flag = |b: bool| if b { "1" } else { "0" };
        for c in &self.cells {
            if let Some(f) = c.flags {
                w.write_record([
                    format_sig12(c.p).as_str(),
                    format_sig12(c.q).as_str(),
                    flag(f.i_d2),
                    flag(f.i_d3),
                    flag(f.f_d3),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn region_scan(spec: &GridSpec) -> Result<RegionGrid> {
    region_scan_with(spec, &Tolerances::DEFAULT)
}

pub fn region_scan_with(spec: &GridSpec, tol: &Tolerances) -> Result<RegionGrid> {
    spec.validate()?;
    let n = spec.qubits;
    let d2 = Criterion::new(n, 2)?;
    let d3 = Criterion::new(n, 3)?;
    let witness = WitnessSpec::new(n, 3)?;
    let cells = (0..spec.p_points * spec.q_points)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / spec.q_points, k % spec.q_points);
            let (p, q) = (spec.p_at(i), spec.q_at(j));
            if p + q > 1.0 + 1e-12 {
                return Ok(Cell { p, q, flags: None });
            }
            let family = StateFamily::two_three_mixture(n, p, q)?;
            let detected = |c: &Criterion| -> Result<bool> {
                Ok(c.evaluate(&family, OffDiagonalMode::Absolute, tol)?.verdict == Verdict::Detected)
            };
            let flags = CellFlags {
                i_d2: detected(&d2)?,
                i_d3: detected(&d3)?,
                f_d3: fidelity_witness_verdict_with(&family, &witness, tol)? == Verdict::Detected,
            };
            Ok(Cell { p, q, flags: Some(flags) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid { spec: *spec, witness_bound: witness.overlap_bound, cells })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub m: usize,
    pub n: usize,
    pub threshold: f64,
}

/// Analytic thresholds for every `m` in `m_list` and `n = m+1 ..= n_max`.
pub fn scaling_curve(m_list: &[usize], n_max: usize) -> Result<Vec<ScalingRow>> {
    if n_max > MAX_ANALYTIC_QUBITS {
        return Err(Error::domain(format!("n_max {n_max} exceeds {MAX_ANALYTIC_QUBITS}")));
    }
    let mut rows = Vec::new();
    for &m in m_list {
        if m == 0 {
            return Err(Error::domain("scaling curves need m >= 1"));
        }
        for n in m + 1..=n_max {
            rows.push(ScalingRow { m, n, threshold: analytic_threshold(n, m)? });
        }
    }
    Ok(rows)
}

/// CSV with header `m,n,threshold`.
pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "n", "threshold"])?;
    for r in rows {
        w.write_record([r.m.to_string(), r.n.to_string(), format_sig12(r.threshold)])?;
    }
    w.flush()?;
    Ok(())
}

/// Formats like C's `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
