use num_complex::Complex64;

use super::{binomial, check_qubits, DensityOperator, ElementSource, PureState, MAX_INDEX_QUBITS};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// One `weight * |D_m^n><D_m^n|` component of a [`StateFamily`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DickeTerm {
    pub excitations: usize,
    pub weight: f64,
}

/// A convex mixture of Dicke projectors, arbitrary pure projectors and white noise.
///
/// Matrix elements are answered in closed form, so Dicke-plus-noise families
/// can be evaluated far beyond the dense-matrix limit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFamily {
    n: usize,
    dicke_terms: Vec<DickeTerm>,
    pure_terms: Vec<(PureState, f64)>,
    noise_weight: f64,
    // cached 1 / C(n, m) per Dicke term
    dicke_norms: Vec<f64>,
}

impl StateFamily {
    pub fn new(n: usize, dicke_terms: Vec<DickeTerm>, noise_weight: f64) -> Result<Self> {
        Self::with_pure_terms(n, dicke_terms, Vec::new(), noise_weight)
    }

    pub fn with_pure_terms(
        n: usize,
        dicke_terms: Vec<DickeTerm>,
        pure_terms: Vec<(PureState, f64)>,
        noise_weight: f64,
    ) -> Result<Self> {
        check_qubits(n, MAX_INDEX_QUBITS, "state family")?;
        let tol = Tolerances::DEFAULT.family_weights;
        let clamp = |w: f64, what: &str| -> Result<f64> {
            if w.is_nan() || w < -tol {
                Err(Error::domain(format!("{what} weight {w} is negative")))
            } else {
                Ok(w.max(0.0))
            }
        };
        let noise_weight = clamp(noise_weight, "noise")?;
        let mut total = noise_weight;
        let mut terms = Vec::with_capacity(dicke_terms.len());
        for t in dicke_terms {
            if t.excitations > n {
                return Err(Error::domain(format!("{} excitations exceed {n} qubits", t.excitations)));
            }
            let weight = clamp(t.weight, "Dicke")?;
            total += weight;
            terms.push(DickeTerm { excitations: t.excitations, weight });
        }
        let mut pures = Vec::with_capacity(pure_terms.len());
        for (state, w) in pure_terms {
            if state.qubits() != n {
                return Err(Error::domain("pure component has the wrong qubit count"));
            }
            let w = clamp(w, "pure")?;
            total += w;
            pures.push((state, w));
        }
        if (total - 1.0).abs() > tol {
            return Err(Error::domain(format!("family weights sum to {total}, not 1")));
        }
        let dicke_norms = terms.iter().map(|t| binomial(n, t.excitations).recip()).collect();
        Ok(StateFamily { n, dicke_terms: terms, pure_terms: pures, noise_weight, dicke_norms })
    }

    /// `(1 - p) |D_m^n><D_m^n| + p * 1 / 2^n`.
    pub fn dicke_with_noise(n: usize, m: usize, p: f64) -> Result<Self> {
        check_noise(p)?;
        if m == 0 || m >= n {
            return Err(Error::domain(format!("Dicke state needs 1 <= m <= n-1, got n={n} m={m}")));
        }
        Self::new(n, vec![DickeTerm { excitations: m, weight: 1.0 - p }], p)
    }

    /// `p |D_2^n><D_2^n| + q |D_3^n><D_3^n| + (1 - p - q) * 1 / 2^n`.
    pub fn two_three_mixture(n: usize, p: f64, q: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::domain("the D_2/D_3 mixture needs at least four qubits"));
        }
        Self::new(
            n,
            vec![
                DickeTerm { excitations: 2, weight: p },
                DickeTerm { excitations: 3, weight: q },
            ],
            1.0 - p - q,
        )
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::new(n, Vec::new(), 1.0)
    }

    pub fn dicke_terms(&self) -> &[DickeTerm] {
        &self.dicke_terms
    }

    pub fn noise_weight(&self) -> f64 {
        self.noise_weight
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        DensityOperator::from_source(self)
    }
}

impl ElementSource for StateFamily {
    fn qubits(&self) -> usize {
        self.n
    }

    fn entry(&self, row: u64, col: u64) -> Complex64 {
        let mut value = 0.0;
        let (pr, pc) = (row.count_ones() as usize, col.count_ones() as usize);
        if pr == pc {
            for (t, norm) in self.dicke_terms.iter().zip(&self.dicke_norms) {
                if t.excitations == pr {
                    value += t.weight * norm;
                }
            }
        }
        if row == col {
            value += self.noise_weight * 0.5f64.powi(self.n as i32);
        }
        let mut out = Complex64::new(value, 0.0);
        for (state, w) in &self.pure_terms {
            out += state.entry(row, col) * *w;
        }
        out
    }
}

/// `(1 - p)|psi><psi| + p * 1 / 2^n`.
pub fn mix_with_white_noise(state: &PureState, p: f64) -> Result<StateFamily> {
    check_noise(p)?;
    StateFamily::with_pure_terms(state.qubits(), Vec::new(), vec![(state.clone(), 1.0 - p)], p)
}

fn check_noise(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("noise weight {p} outside [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::dicke_state;

    fn dense_oracle(n: usize, terms: &[(usize, f64)], noise: f64) -> nalgebra::DMatrix<Complex64> {
        // Materialize from state vectors, independent of the closed form.
        let dim = 1usize << n;
        let mut m = nalgebra::DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(noise / dim as f64, 0.0);
        for &(k, w) in terms {
            let d = dicke_state(n, k).unwrap();
            let v = nalgebra::DVector::from_column_slice(d.amplitudes());
            m += v.clone() * v.adjoint() * Complex64::new(w, 0.0);
        }
        m
    }

    #[test]
    fn closed_form_matches_materialized_matrix() {
        for n in 2..=6 {
            for m1 in 1..n {
                let m2 = n - m1;
                let fam = StateFamily::new(
                    n,
                    vec![
                        DickeTerm { excitations: m1, weight: 0.3 },
                        DickeTerm { excitations: m2, weight: 0.25 },
                    ],
                    0.45,
                )
                .unwrap();
                let oracle = dense_oracle(n, &[(m1, 0.3), (m2, 0.25)], 0.45);
                let dim = 1u64 << n;
                for r in 0..dim {
                    for c in 0..dim {
                        let diff = (fam.entry(r, c) - oracle[(r as usize, c as usize)]).norm();
                        assert!(diff < 1e-12, "n={n} ({r},{c}) diff {diff}");
                    }
                }
            }
        }
    }

    #[test]
    fn white_noise_endpoints() {
        let d = dicke_state(4, 2).unwrap();
        let pure = mix_with_white_noise(&d, 0.0).unwrap();
        assert!((pure.entry(0b0011, 0b0101).re - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(pure.entry(0, 0).re, 0.0);
        let mixed = mix_with_white_noise(&d, 1.0).unwrap();
        for i in 0..16 {
            assert_eq!(mixed.entry(i, i).re, 1.0 / 16.0);
        }
        assert!(mix_with_white_noise(&d, 1.5).is_err());
        assert!(mix_with_white_noise(&d, -0.1).is_err());
    }

    #[test]
    fn noisy_family_materializes_to_a_valid_density_operator() {
        let d = dicke_state(4, 2).unwrap();
        let fam = mix_with_white_noise(&d, 8.0 / 17.0).unwrap();
        let rho = fam.to_density().unwrap();
        assert!(rho.min_eigenvalue() >= -1e-12);
        let closed = StateFamily::dicke_with_noise(4, 2, 8.0 / 17.0).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                assert!((closed.entry(r, c) - rho.entry(r, c)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(StateFamily::new(3, vec![DickeTerm { excitations: 1, weight: 0.5 }], 0.4).is_err());
        assert!(StateFamily::two_three_mixture(6, 0.7, 0.5).is_err());
        // p + q = 1 leaves a vanishing noise weight
        assert!(StateFamily::two_three_mixture(6, 0.3, 0.7).is_ok());
    }
}
