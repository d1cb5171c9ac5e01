//! Randomized check that biseparable states never trigger the criterion.
//!
//! Samples are convex mixtures of pure states, each a product across its own
//! bipartition. Components may use different bipartitions.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{Criterion, GammaPair, OffDiagonalMode, Regime};
use crate::dicke::{qubit_bit, Bipartition, DensityOperator, ElementSource, PureState, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use crate::witness::largest_schmidt_weight;

/// Allowed gap between a sample and its reassembled decomposition.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-10;

/// One `weight * |phi_A><phi_A| (x) |phi_B><phi_B|` term.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub bipartition: Bipartition,
    pub factor_a: PureState,
    pub factor_b: PureState,
}

impl Component {
    pub fn product_state(&self) -> Result<PureState> {
        PureState::product(&self.bipartition, &self.factor_a, &self.factor_b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiseparableSample {
    pub state: DensityOperator,
    pub components: Vec<Component>,
}

impl BiseparableSample {
    /// Builds the state from its decomposition.
    pub fn from_components(components: Vec<Component>) -> Result<Self> {
        let products = components
            .iter()
            .map(Component::product_state)
            .collect::<Result<Vec<_>>>()?;
        let weighted: Vec<(f64, &PureState)> =
            components.iter().map(|c| c.weight).zip(products.iter()).collect();
        let state = DensityOperator::from_mixture(&weighted)?;
        Ok(BiseparableSample { state, components })
    }

    /// Pairs a state with a claimed decomposition, rejecting the pair unless they agree.
    pub fn new(state: DensityOperator, components: Vec<Component>) -> Result<Self> {
        let sample = BiseparableSample { state, components };
        sample.verify_decomposition()?;
        Ok(sample)
    }

    /// Checks that the components reassemble to `state` within [`DECOMPOSITION_TOLERANCE`].
    pub fn verify_decomposition(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::NotBiseparable("empty decomposition".into()));
        }
        let rebuilt = Self::from_components(self.components.clone())?;
        if rebuilt.state.qubits() != self.state.qubits() {
            return Err(Error::NotBiseparable("decomposition has the wrong qubit count".into()));
        }
        let gap = (rebuilt.state.matrix() - self.state.matrix()).camax();
        if gap > DECOMPOSITION_TOLERANCE {
            return Err(Error::NotBiseparable(format!(
                "state differs from its product decomposition by {gap:e}"
            )));
        }
        Ok(())
    }

    /// Splits a pure state across `bipartition`, failing when it is entangled there.
    pub fn from_pure_claim(state: &PureState, bipartition: &Bipartition) -> Result<Self> {
        let (factor_a, factor_b) = split_product(state, bipartition)?;
        let component = Component { weight: 1.0, bipartition: *bipartition, factor_a, factor_b };
        let sample = BiseparableSample {
            state: DensityOperator::from_pure(state)?,
            components: vec![component],
        };
        sample.verify_decomposition()?;
        Ok(sample)
    }
}

/// Factors of a product state, found from the row and column with the largest amplitude.
fn split_product(state: &PureState, cut: &Bipartition) -> Result<(PureState, PureState)> {
    let weight = largest_schmidt_weight(state, cut);
    if (1.0 - weight).abs() > DECOMPOSITION_TOLERANCE {
        return Err(Error::NotBiseparable(format!(
            "state is entangled across {cut} (largest Schmidt weight {weight})"
        )));
    }
    let n = state.qubits();
    let qa = cut.qubits_a();
    let qb = cut.qubits_b();
    let scatter = |local: usize, qubits: &[usize]| -> u64 {
        let k = qubits.len();
        qubits
            .iter()
            .enumerate()
            .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
            .fold(0, |acc, (_, &q)| acc | qubit_bit(n, q))
    };
    let (peak, _) = state
        .amplitudes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("nonempty state");
    let peak = peak as u64;
    let side_a_bits = cut.side_a();
    // psi = a (x) b with a_i = psi[i, j*] and b_j = psi[i*, j] / psi[i*, j*]
    let pivot = state.amplitude(peak);
    let a: Vec<Complex64> = (0..1usize << qa.len())
        .map(|i| state.amplitude(scatter(i, &qa) | (peak & !side_a_bits)))
        .collect();
    let b: Vec<Complex64> = (0..1usize << qb.len())
        .map(|j| state.amplitude(scatter(j, &qb) | (peak & side_a_bits)) / pivot)
        .collect();
    Ok((PureState::normalized(qa.len(), a)?, PureState::normalized(qb.len(), b)?))
}

/// Haar-random k-qubit state from a normalized complex Gaussian vector.
pub fn haar_state<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<PureState> {
    let amps = (0..1usize << k)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(k, amps)
}

/// A Dicke state on `k` qubits with a random excitation number and random local phases.
///
/// Products of such factors sit on the biseparable bound (for example
/// `|0> (x) |D_m^(n-1)>` gives a criterion value of exactly zero), so they
/// probe it far harder than Haar-random factors.
pub fn phased_dicke_factor<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<PureState> {
    let excitations = rng.random_range(0..=k);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << k];
    let phases: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    for (i, a) in amps.iter_mut().enumerate() {
        if i.count_ones() as usize == excitations {
            let theta: f64 = (0..k).filter(|j| i >> j & 1 == 1).map(|j| phases[j]).sum();
            *a = Complex64::from_polar(1.0, theta);
        }
    }
    PureState::normalized(k, amps)
}

/// How component factors are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorPolicy {
    Haar,
    /// Each factor is Haar-random or a phased Dicke state with equal probability.
    Mixed,
}

fn random_factor<R: Rng + ?Sized>(k: usize, policy: FactorPolicy, rng: &mut R) -> Result<PureState> {
    match policy {
        FactorPolicy::Mixed if rng.random_bool(0.5) => phased_dicke_factor(k, rng),
        _ => haar_state(k, rng),
    }
}

fn random_bipartition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Bipartition> {
    // canonical cuts: qubit 1 plus any proper subset of the others
    let rest = rng.random_range(0..(1u64 << (n - 1)) - 1);
    Bipartition::new(n, qubit_bit(n, 1) | rest)
}

/// Haar-random product state across `bipartition`.
pub fn random_product_state(bipartition: &Bipartition, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = haar_state(bipartition.qubits_a().len(), &mut rng)?;
    let b = haar_state(bipartition.qubits_b().len(), &mut rng)?;
    PureState::product(bipartition, &a, &b)
}

fn sample_mixture<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    policy: FactorPolicy,
    rng: &mut R,
) -> Result<BiseparableSample> {
    if k == 0 {
        return Err(Error::domain("a mixture needs at least one component"));
    }
    if !(2..=MAX_DENSE_QUBITS).contains(&n) {
        return Err(Error::domain(format!("biseparable samples need 2..={MAX_DENSE_QUBITS} qubits")));
    }
    // Dirichlet(1, ..., 1) weights from normalized exponentials
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let mut components = Vec::with_capacity(k);
    for w in raw {
        let bipartition = random_bipartition(n, rng)?;
        let factor_a = random_factor(bipartition.qubits_a().len(), policy, rng)?;
        let factor_b = random_factor(bipartition.qubits_b().len(), policy, rng)?;
        components.push(Component { weight: w / total, bipartition, factor_a, factor_b });
    }
    BiseparableSample::from_components(components)
}

/// Mixture of `k` Haar-random product states, each across an independently drawn bipartition.
pub fn random_biseparable_mixture(n: usize, k: usize, seed: u64) -> Result<BiseparableSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_mixture(n, k, FactorPolicy::Haar, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub factors: FactorPolicy,
    /// Component counts are drawn uniformly from `1..=max_components`.
    pub max_components: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            factors: FactorPolicy::Mixed,
            max_components: 10,
            tolerances: Tolerances::DEFAULT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisepReport {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub regime: Regime,
    pub max_value: f64,
    pub violations: usize,
    /// First violating sample, if any.
    pub counterexample: Option<Counterexample>,
}

/// Replays sample `index` of a seeded run.
pub fn harness_sample(n: usize, seed: u64, index: u64, options: &VerifyOptions) -> Result<BiseparableSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let k = rng.random_range(1..=options.max_components.max(1));
    sample_mixture(n, k, options.factors, &mut rng)
}

/// Evaluates the criterion on `samples` seeded biseparable mixtures.
///
/// In the range `1 < m < n/2` any value above the detection tolerance is a hard
/// failure carrying a serialized counterexample; elsewhere violations are only counted.
pub fn verify_no_detection(samples: usize, n: usize, m: usize, seed: u64) -> Result<BisepReport> {
    verify_with(samples, n, m, seed, &VerifyOptions::default())
}

pub fn verify_with(
    samples: usize,
    n: usize,
    m: usize,
    seed: u64,
    options: &VerifyOptions,
) -> Result<BisepReport> {
    let report = survey(samples, n, m, seed, options)?;
    if report.regime == Regime::Guaranteed {
        if let Some(cx) = &report.counterexample {
            return Err(Error::BoundViolation { value: cx.value, counterexample: Box::new(cx.clone()) });
        }
    }
    Ok(report)
}

/// Like [`verify_with`] but never fails on violations; the caller inspects the report.
pub fn survey(
    samples: usize,
    n: usize,
    m: usize,
    seed: u64,
    options: &VerifyOptions,
) -> Result<BisepReport> {
    let criterion = Criterion::new(n, m)?;
    let tol = options.tolerances;
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let sample = harness_sample(n, seed, i, options)?;
            Ok(criterion.evaluate(&sample.state, OffDiagonalMode::Absolute, &tol)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;

    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violations = values.iter().filter(|&&v| v > tol.detection).count();
    let counterexample = match values.iter().position(|&v| v > tol.detection) {
        Some(i) => {
            let sample = harness_sample(n, seed, i as u64, options)?;
            Some(Counterexample::from_sample(&sample, m, values[i], Some((seed, i as u64))))
        }
        None => None,
    };
    Ok(BisepReport {
        n,
        m,
        samples,
        seed,
        regime: Regime::of(n, m),
        max_value,
        violations,
        counterexample,
    })
}

/// A violating sample in a replayable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: usize,
    pub m: usize,
    pub value: f64,
    /// `(seed, sample index)` when produced by the harness.
    pub origin: Option<(u64, u64)>,
    pub components: Vec<SerializedComponent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerializedComponent {
    pub weight: f64,
    /// 1-based qubits of side A.
    pub side_a: Vec<usize>,
    /// Factor amplitudes as `[re, im]` pairs.
    pub factor_a: Vec<[f64; 2]>,
    pub factor_b: Vec<[f64; 2]>,
}

impl Counterexample {
    pub fn from_sample(sample: &BiseparableSample, m: usize, value: f64, origin: Option<(u64, u64)>) -> Self {
        let amps = |s: &PureState| s.amplitudes().iter().map(|a| [a.re, a.im]).collect();
        Counterexample {
            n: sample.state.qubits(),
            m,
            value,
            origin,
            components: sample
                .components
                .iter()
                .map(|c| SerializedComponent {
                    weight: c.weight,
                    side_a: c.bipartition.qubits_a(),
                    factor_a: amps(&c.factor_a),
                    factor_b: amps(&c.factor_b),
                })
                .collect(),
        }
    }

    /// Rebuilds the sample the counterexample describes.
    pub fn replay(&self) -> Result<BiseparableSample> {
        let vec = |v: &[[f64; 2]]| -> Result<PureState> {
            let k = v.len().trailing_zeros() as usize;
            if v.len() != 1 << k {
                return Err(Error::Parse("factor length is not a power of two".into()));
            }
            PureState::new(k, v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        };
        let components = self
            .components
            .iter()
            .map(|c| {
                Ok(Component {
                    weight: c.weight,
                    bipartition: Bipartition::from_side_a(self.n, &c.side_a)?,
                    factor_a: vec(&c.factor_a)?,
                    factor_b: vec(&c.factor_b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BiseparableSample::from_components(components)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub alpha: String,
    pub beta: String,
    pub same_side: bool,
    pub off_diagonal: f64,
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub cross_pairs: usize,
    pub same_side_pairs: usize,
    /// Smallest `bound - |O|` seen over cross pairs.
    pub min_cross_slack: f64,
    /// Smallest `bound - |O|` seen over same-side pairs.
    pub min_same_side_slack: f64,
}

/// Pairwise bounds for one bipartition: `|O| <= P` when `x` and `y` are split
/// by the cut, `|O| <= (D_alpha + D_beta) / 2` when they are on the same side.
///
/// Runs on any state; only product states across the cut are guaranteed to pass.
pub fn offdiag_lemma_violations<S: ElementSource + ?Sized>(
    source: &S,
    bipartition: &Bipartition,
    m: usize,
    slack: f64,
) -> Result<(LemmaReport, Vec<LemmaViolation>)> {
    let n = source.qubits();
    if bipartition.qubits() != n {
        return Err(Error::domain("bipartition and state have different qubit counts"));
    }
    let criterion = Criterion::new(n, m)?;
    let mut report = LemmaReport {
        cross_pairs: 0,
        same_side_pairs: 0,
        min_cross_slack: f64::INFINITY,
        min_same_side_slack: f64::INFINITY,
    };
    let mut violations = Vec::new();
    for pair in criterion.pairs() {
        let GammaPair { alpha, beta, x, y } = *pair;
        let o = source.entry(alpha.index(), beta.index()).norm();
        let same_side = bipartition.same_side(x, y);
        let bound = if same_side {
            report.same_side_pairs += 1;
            0.5 * (source.diagonal(alpha.index()) + source.diagonal(beta.index()))
        } else {
            report.cross_pairs += 1;
            (source.diagonal(pair.union().index()).max(0.0)
                * source.diagonal(pair.intersection().index()).max(0.0))
            .sqrt()
        };
        let gap = bound - o;
        if same_side {
            report.min_same_side_slack = report.min_same_side_slack.min(gap);
        } else {
            report.min_cross_slack = report.min_cross_slack.min(gap);
        }
        if o > bound + slack {
            violations.push(LemmaViolation {
                alpha: alpha.to_string(),
                beta: beta.to_string(),
                same_side,
                off_diagonal: o,
                bound,
            });
        }
    }
    Ok((report, violations))
}

/// Checks the pairwise bounds on a pure product state; any violation is a hard failure.
pub fn check_offdiag_lemma(
    state: &PureState,
    bipartition: &Bipartition,
    n: usize,
    m: usize,
) -> Result<LemmaReport> {
    if state.qubits() != n {
        return Err(Error::domain(format!("state has {} qubits but n = {n}", state.qubits())));
    }
    split_product(state, bipartition)?;
    let (report, violations) = offdiag_lemma_violations(state, bipartition, m, 1e-10)?;
    if let Some(v) = violations.first() {
        return Err(Error::LemmaViolation(format!(
            "pair ({}, {}) on {bipartition}: |O| = {:e} exceeds {:e}",
            v.alpha, v.beta, v.off_diagonal, v.bound
        )));
    }
    Ok(report)
}
