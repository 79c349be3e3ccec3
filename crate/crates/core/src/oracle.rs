//! Brute-force reference evolution on the full `a ⊗ A ⊗ bath` Hilbert space.
//!
//! Nothing here uses the total-spin sector structure: the Hamiltonian
//! `Σ_k (K_a S_a + K_A S_A)·I_k` is assembled spin by spin on the `2^(N+2)`
//! product basis, the bath state is built from projectors on the `2^N` bath
//! space, and the reduced state is obtained in Kraus form
//! `Σ_{φ,e} w_φ A_{φe} ρ A_{φe}†` with `A_{φe} = ⟨e| U |φ⟩`. Memory grows as
//! `4^(N+2)`, hence the size limit.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::evolution::CouplingConfig;
use crate::linalg::{symmetric_eigen, CMatrix};
use crate::spin::{BathSpec, SectorState};
use crate::{Error, Result};

pub const MAX_ORACLE_SPINS: u32 = 10;

/// Total bath spin squared restricted to product states with `flipped` spins
/// down, together with the list of those states.
fn bath_spin_squared_block(spins: u32, flipped: u32) -> (Vec<usize>, DMatrix<f64>) {
    let states: Vec<usize> = (0..1usize << spins).filter(|s| s.count_ones() == flipped).collect();
    let index = |s: usize| states.binary_search(&s).expect("flip-flop preserves the block");
    let dim = states.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (col, &s) in states.iter().enumerate() {
        m[(col, col)] += 0.75 * f64::from(spins);
        for k in 0..spins {
            for l in 0..spins {
                if k == l {
                    continue;
                }
                let (bk, bl) = ((s >> k) & 1, (s >> l) & 1);
                if bk == bl {
                    m[(col, col)] += 0.25;
                } else {
                    m[(col, col)] -= 0.25;
                    m[(index(s ^ (1 << k) ^ (1 << l)), col)] += 0.5;
                }
            }
        }
    }
    (states, m)
}

/// Orthonormal eigenvectors of the bath state with their eigenvalues.
fn bath_ensemble(bath: &BathSpec) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = bath.spins;
    let dim = 1usize << n;
    let mut ensemble = Vec::new();
    for flipped in 0..=n {
        let twice_m = i64::from(n) - 2 * i64::from(flipped);
        let (states, block) = bath_spin_squared_block(n, flipped);
        let (values, vectors) = symmetric_eigen(block);
        for sector in &bath.sectors {
            if sector.weight == 0.0 {
                continue;
            }
            let twice_i = i64::from(sector.spin.twice());
            let per_state = match sector.internal_state {
                SectorState::Unpolarized if twice_m.abs() <= twice_i => {
                    sector.weight / (sector.multiplicity as f64 * sector.spin.dim() as f64)
                }
                SectorState::MaxPolarizedZ if twice_m == twice_i => sector.weight / sector.multiplicity as f64,
                _ => continue,
            };
            let casimir = sector.spin.casimir();
            for (k, value) in values.iter().enumerate() {
                if (value - casimir).abs() < 1e-8 {
                    let mut full = alloc::vec![0.0; dim];
                    for (row, &s) in states.iter().enumerate() {
                        full[s] = vectors[(row, k)];
                    }
                    ensemble.push((per_state, full));
                }
            }
        }
    }
    Ok(ensemble)
}

/// Precomputed full-space evolution for one bath and one pair of couplings.
pub struct FullSpaceOracle {
    spins: u32,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    weights: Vec<f64>,
    /// `Vᵀ (|u⟩ ⊗ |φ⟩)` for every ensemble member, columns `4φ + u`.
    projected: DMatrix<f64>,
}

impl FullSpaceOracle {
    pub fn new(bath: &BathSpec, couplings: CouplingConfig) -> Result<Self> {
        let n = bath.spins;
        if n > MAX_ORACLE_SPINS {
            return Err(Error::SizeLimit {
                requested: n,
                max: MAX_ORACLE_SPINS,
            });
        }
        bath.check_normalized()?;
        let bath_dim = 1usize << n;
        let dim = 4 * bath_dim;

        // Bit layout: a is the top bit, then A, then bath spin k at bit k.
        let qubit_masks = [(bath_dim << 1, couplings.k_input), (bath_dim, couplings.k_pair)];
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for s in 0..dim {
            for &(qmask, k) in &qubit_masks {
                let q_down = s & qmask != 0;
                for site in 0..n {
                    let bmask = 1usize << site;
                    if q_down == (s & bmask != 0) {
                        h[(s, s)] += 0.25 * k;
                    } else {
                        h[(s, s)] -= 0.25 * k;
                        h[(s ^ qmask ^ bmask, s)] += 0.5 * k;
                    }
                }
            }
        }
        let (energies, vectors) = symmetric_eigen(h);

        let ensemble = bath_ensemble(bath)?;
        let mut inputs = DMatrix::<f64>::zeros(dim, 4 * ensemble.len());
        for (p, (_, phi)) in ensemble.iter().enumerate() {
            for u in 0..4 {
                for (e, amp) in phi.iter().enumerate() {
                    inputs[(u * bath_dim + e, 4 * p + u)] = *amp;
                }
            }
        }
        let projected = vectors.transpose() * inputs;
        let weights = ensemble.into_iter().map(|(w, _)| w).collect();
        Ok(Self {
            spins: n,
            energies,
            vectors,
            weights,
            projected,
        })
    }

    /// Reduced `a ⊗ A ⊗ B` state at engine time `t`; `B` is a spectator.
    pub fn evolve(&self, rho: &CMatrix, t: f64) -> CMatrix {
        assert_eq!(rho.shape(), (8, 8));
        let bath_dim = 1usize << self.spins;
        let phased = DMatrix::from_fn(self.projected.nrows(), self.projected.ncols(), |r, c| {
            let (s, co) = libm::sincos(-self.energies[r] * t);
            Complex64::new(co, s) * self.projected[(r, c)]
        });
        let evolved = self.vectors.map(|x| Complex64::new(x, 0.0)) * phased;

        let mut out = CMatrix::zeros(8, 8);
        for (p, &w) in self.weights.iter().enumerate() {
            for e in 0..bath_dim {
                let kraus = CMatrix::from_fn(4, 4, |s, u| evolved[(s * bath_dim + e, 4 * p + u)]);
                let lifted = kraus.kronecker(&crate::linalg::identity(2));
                out += (&lifted * rho * lifted.adjoint()) * Complex64::new(w, 0.0);
            }
        }
        out
    }
}

/// One-shot full-space evolution of `ρ_aAB` at engine time `t`.
pub fn full_space_evolve(bath: &BathSpec, couplings: CouplingConfig, rho: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(FullSpaceOracle::new(bath, couplings)?.evolve(rho, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::state::{initial_joint_state, BellLabel};

    #[test]
    fn size_limit() {
        let bath = BathSpec::unpolarized(11).unwrap();
        assert!(matches!(
            FullSpaceOracle::new(&bath, CouplingConfig::new(1.0, 1.0)),
            Err(Error::SizeLimit { requested: 11, max: 10 })
        ));
    }

    #[test]
    fn ensemble_reproduces_bath_state() {
        for bath in [BathSpec::unpolarized(4).unwrap(), BathSpec::polarized(5).unwrap()] {
            let ens = bath_ensemble(&bath).unwrap();
            let total: f64 = ens.iter().map(|(w, _)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        // The unpolarized ensemble is the maximally mixed bath.
        let ens = bath_ensemble(&BathSpec::unpolarized(3).unwrap()).unwrap();
        let mut rho = DMatrix::<f64>::zeros(8, 8);
        for (w, v) in &ens {
            let v = nalgebra::DVector::from_column_slice(v);
            rho += &v * v.transpose() * *w;
        }
        assert!((rho - DMatrix::<f64>::identity(8, 8) / 8.0).abs().max() < 1e-12);
    }

    #[test]
    fn zero_time_and_zero_coupling_return_input() {
        let rho = initial_joint_state([0.1, 0.7, -0.2], BellLabel::T0).unwrap();
        let bath = BathSpec::unpolarized(3).unwrap();
        let oracle = FullSpaceOracle::new(&bath, CouplingConfig::new(1.0, -0.5)).unwrap();
        assert!(max_abs_diff(&oracle.evolve(&rho, 0.0), &rho) < 1e-12);
        let free = FullSpaceOracle::new(&bath, CouplingConfig::zero()).unwrap();
        for t in [0.4, 2.5] {
            assert!(max_abs_diff(&free.evolve(&rho, t), &rho) < 1e-12);
        }
    }

    #[test]
    fn matches_sector_engine_for_two_spins() {
        let bath = BathSpec::unpolarized(2).unwrap();
        let c = CouplingConfig::new(1.0, 1.0);
        let rho = initial_joint_state([0.0, 0.6, 0.8], BellLabel::S0).unwrap();
        let expected = crate::evolution::two_qubit_channel(&bath, c, 0.5)
            .unwrap()
            .apply_to_joint(&rho);
        let got = full_space_evolve(&bath, c, &rho, 0.5).unwrap();
        assert!(max_abs_diff(&expected, &got) < 1e-12);
    }
}
