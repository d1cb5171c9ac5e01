#![allow(dead_code)]

use dicke_witness::{DensityOperator, PureState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Full-rank random density matrix G G† / tr.
pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
    let dim = 1usize << n;
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace();
    rho /= tr;
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityOperator::new(n, rho).unwrap()
}

pub fn random_pure(n: usize, rng: &mut ChaCha8Rng) -> PureState {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::normalized(n, amps).unwrap()
}
