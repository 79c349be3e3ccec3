#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinbath_core::linalg::CMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rng: &mut impl Rng, dim: usize) -> CMatrix {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Full-rank random density matrix `G G† / Tr`.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let g = random_complex_matrix(rng, dim);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// `exp(−i θ n·σ/2)`.
pub fn random_su2(rng: &mut impl Rng) -> CMatrix {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let n = nalgebra::Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0f64),
    )
    .normalize();
    let (s, c) = (theta / 2.0).sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let mut u = CMatrix::identity(2, 2) * Complex64::new(c, 0.0);
    for k in 0..3 {
        u -= spinbath_core::linalg::pauli(k + 1) * (i * s * n[k]);
    }
    u
}
