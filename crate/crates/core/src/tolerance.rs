use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of a pure state's norm from one.
    pub normalization: f64,
    /// Allowed entrywise deviation from Hermiticity.
    pub hermiticity: f64,
    /// Allowed deviation of the trace from one.
    pub trace: f64,
    /// Smallest eigenvalue accepted for a density operator.
    pub min_eigenvalue: f64,
    /// Allowed deviation of family weights from summing to one.
    pub family_weights: f64,
    /// A diagonal element below `-negative_population` is an error; above it is clamped.
    pub negative_population: f64,
    /// The criterion signals detection only above this value.
    pub detection: f64,
    /// Absolute bracket width at which threshold bisection stops.
    pub bisection: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-10,
        hermiticity: 1e-10,
        trace: 1e-10,
        min_eigenvalue: -1e-8,
        family_weights: 1e-12,
        negative_population: 1e-10,
        detection: 1e-9,
        bisection: 1e-10,
    };

    pub fn with_detection(self, detection: f64) -> Self {
        Tolerances { detection, ..self }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
