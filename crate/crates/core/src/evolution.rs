//! Exact evolution of Alice's two qubits coupled to a common spin bath,
//! exposed as a time-dependent two-qubit channel.
//!
//! For `H = (K_a S_a + K_A S_A)·I` the bath enters only through its total spin
//! `I`, so the joint evolution is block diagonal over bath sectors. Each sector
//! is diagonalized once; grouping eigenvectors into degenerate clusters
//! `E_e` gives
//!
//! ```text
//! R_ij(t) = Σ_{e,e'} exp(-i (E_e - E_e') t) S^{ee'}_ij
//! ```
//!
//! for the Pauli transfer matrix of the reduced dynamics, with the `S` blocks
//! precomputed. Evaluating a channel on a time grid is then a handful of
//! 16×16 accumulations per sector.

use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64;

use crate::linalg::{self, pauli_pair_monomial, symmetric_eigen, CMatrix};
use crate::spin::{spin_operators, BathSpec, PolarizationModel, SectorSpec, SectorState, SpinQuantumNumber};
use crate::state::qubit_density;
use crate::{Error, Result};

/// Real 16×16 Pauli transfer matrix on two qubits, indexed `4μ + ν` for
/// `σ_μ ⊗ σ_ν` (0 = identity, then X, Y, Z).
pub type TransferMatrix = SMatrix<f64, 16, 16>;
type ComplexBlock = SMatrix<Complex64, 16, 16>;

/// Relative gap below which two eigenvalues are treated as one level.
const DEGENERACY_TOL: f64 = 1e-10;

/// Residual above which [`extract_fg`] reports a non-isotropic channel.
pub const ISOTROPY_TOL: f64 = 1e-6;

/// Heisenberg couplings of the two qubits at the sending station. Bob's
/// qubit is not coupled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingConfig {
    /// `K_a`, coupling of the qubit carrying the unknown state.
    pub k_input: f64,
    /// `K_A`, coupling of Alice's half of the shared pair.
    pub k_pair: f64,
}

impl CouplingConfig {
    pub const fn new(k_input: f64, k_pair: f64) -> Self {
        Self { k_input, k_pair }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    /// Couplings with overall scale `K` and inhomogeneity `Δ ∈ [-1, 1]`.
    ///
    /// Writing `K_a = K cos θ`, `K_A = K sin θ` gives `Δ = sin 2θ`; the root
    /// with `θ ∈ [-π/4, π/4]` is used, so `Δ = 1` is `K_a = K_A > 0` and
    /// `Δ = -1` is `K_a = -K_A > 0`.
    pub fn from_inhomogeneity(delta: f64, magnitude: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&delta) {
            return Err(Error::InvalidInhomogeneity(delta));
        }
        let theta = libm::asin(delta) / 2.0;
        Ok(Self::new(magnitude * libm::cos(theta), magnitude * libm::sin(theta)))
    }

    /// `K = sqrt(K_a² + K_A²)`.
    pub fn magnitude(&self) -> f64 {
        libm::hypot(self.k_input, self.k_pair)
    }

    /// `Δ = 2 K_a K_A / (K_a² + K_A²)`, taken as 0 for vanishing couplings.
    pub fn inhomogeneity(&self) -> f64 {
        let k2 = self.k_input * self.k_input + self.k_pair * self.k_pair;
        if k2 == 0.0 {
            0.0
        } else {
            2.0 * self.k_input * self.k_pair / k2
        }
    }

    /// Converts a dimensionless `Kt` into engine time; with no coupling the
    /// two coincide.
    pub fn time_from_kt(&self, kt: f64) -> f64 {
        let k = self.magnitude();
        if k == 0.0 {
            kt
        } else {
            kt / k
        }
    }
}

/// `H = K_a S_a·I + K_A S_A·I` on `qubit a ⊗ qubit A ⊗ (spin-I multiplet)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorHamiltonian {
    pub spin: SpinQuantumNumber,
    pub matrix: CMatrix,
}

impl SectorHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_sector_hamiltonian(spin: SpinQuantumNumber, couplings: CouplingConfig) -> SectorHamiltonian {
    let bath = spin_operators(spin);
    let qubit = spin_operators(SpinQuantumNumber::HALF);
    let one = linalg::identity(2);
    let dim = 4 * spin.dim();
    let mut matrix = CMatrix::zeros(dim, dim);
    for (s, i) in qubit.components().into_iter().zip(bath.components()) {
        let on_input = s.kronecker(&one).kronecker(i);
        let on_pair = one.kronecker(s).kronecker(i);
        matrix += on_input * Complex64::new(couplings.k_input, 0.0) + on_pair * Complex64::new(couplings.k_pair, 0.0);
    }
    SectorHamiltonian { spin, matrix }
}

/// Diagonal of a sector's initial bath state in the `|I, m⟩` basis.
fn bath_diagonal(spin: SpinQuantumNumber, state: SectorState) -> Vec<f64> {
    let dim = spin.dim();
    match state {
        SectorState::Unpolarized => alloc::vec![1.0 / dim as f64; dim],
        SectorState::MaxPolarizedZ => {
            let mut d = alloc::vec![0.0; dim];
            d[0] = 1.0;
            d
        }
    }
}

/// `Vᵀ (P ⊗ D) V` for the two-qubit Pauli string `index`, with `D` a diagonal
/// bath factor. Returned as `phase * real`, the phase being 1 or `i`.
fn conjugate_pauli(vectors: &DMatrix<f64>, index: usize, bath: &[f64]) -> (Complex64, DMatrix<f64>) {
    let dim = vectors.nrows();
    let bdim = bath.len();
    let monomial = pauli_pair_monomial(index);
    let phase = if monomial.iter().any(|(_, v)| v.im != 0.0) {
        linalg::I
    } else {
        linalg::ONE
    };
    let mut moved = DMatrix::<f64>::zeros(dim, dim);
    for (row, &(col, value)) in monomial.iter().enumerate() {
        let sign = (value / phase).re;
        for (m, &b) in bath.iter().enumerate().take(bdim) {
            let factor = sign * b;
            if factor == 0.0 {
                continue;
            }
            let (dst, src) = (row * bdim + m, col * bdim + m);
            for k in 0..dim {
                moved[(dst, k)] = factor * vectors[(src, k)];
            }
        }
    }
    (phase, vectors.transpose() * moved)
}

/// Groups ascending eigenvalues into degenerate levels.
fn cluster_levels(energies: &[f64]) -> Vec<Range<usize>> {
    let scale = energies.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    let mut levels = Vec::new();
    let mut start = 0;
    for k in 1..=energies.len() {
        if k == energies.len() || energies[k] - energies[k - 1] > DEGENERACY_TOL * scale {
            levels.push(start..k);
            start = k;
        }
    }
    levels
}

struct PhaseTerm {
    frequency: f64,
    block: ComplexBlock,
}

/// Precomputed evolution of one bath sector.
pub struct SectorPropagator {
    spin: SpinQuantumNumber,
    weight: f64,
    levels: Vec<f64>,
    terms: Vec<PhaseTerm>,
}

impl SectorPropagator {
    pub fn new(sector: &SectorSpec, couplings: CouplingConfig) -> Self {
        let ham = build_sector_hamiltonian(sector.spin, couplings);
        let dim = ham.dim();
        // S·I is real in the standard basis (the y-y products are real).
        let real = DMatrix::from_fn(dim, dim, |r, c| ham.matrix[(r, c)].re);
        let (energies, vectors) = symmetric_eigen(real);
        let clusters = cluster_levels(&energies);
        let levels: Vec<f64> = clusters
            .iter()
            .map(|c| energies[c.clone()].iter().sum::<f64>() / c.len() as f64)
            .collect();

        let identity_bath = alloc::vec![1.0; sector.spin.dim()];
        let state_bath = bath_diagonal(sector.spin, sector.internal_state);
        let outputs: Vec<_> = (0..16).map(|i| conjugate_pauli(&vectors, i, &identity_bath)).collect();
        let inputs: Vec<_> = (0..16).map(|j| conjugate_pauli(&vectors, j, &state_bath)).collect();

        let mut terms = Vec::with_capacity(clusters.len() * clusters.len());
        for (e, ce) in clusters.iter().enumerate() {
            for (f, cf) in clusters.iter().enumerate() {
                // S^{ef}_ij = ¼ Σ_{a∈f, b∈e} X^i_ab W^j_ba
                let mut block = ComplexBlock::zeros();
                for (i, (pi, x)) in outputs.iter().enumerate() {
                    for (j, (pj, w)) in inputs.iter().enumerate() {
                        let mut acc = 0.0;
                        for a in cf.clone() {
                            for b in ce.clone() {
                                acc += x[(a, b)] * w[(b, a)];
                            }
                        }
                        block[(i, j)] = pi * pj * (0.25 * acc);
                    }
                }
                terms.push(PhaseTerm {
                    frequency: levels[e] - levels[f],
                    block,
                });
            }
        }
        Self {
            spin: sector.spin,
            weight: sector.weight,
            levels,
            terms,
        }
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Distinct energy levels of the sector Hamiltonian, ascending.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Unweighted transfer matrix of this sector at time `t`.
    pub fn transfer(&self, t: f64) -> TransferMatrix {
        let mut acc = ComplexBlock::zeros();
        for term in &self.terms {
            let (s, c) = libm::sincos(-term.frequency * t);
            acc += term.block * Complex64::new(c, s);
        }
        acc.map(|z| z.re)
    }
}

/// Sector propagators of a whole bath, ready to be evaluated at any time.
pub struct BathPropagator {
    couplings: CouplingConfig,
    model: PolarizationModel,
    spins: u32,
    sectors: Vec<SectorPropagator>,
}

impl BathPropagator {
    pub fn new(bath: &BathSpec, couplings: CouplingConfig) -> Result<Self> {
        bath.check_normalized()?;
        let sectors = Self::active_sectors(bath)
            .map(|s| SectorPropagator::new(s, couplings))
            .collect();
        Self::from_sectors(bath, couplings, sectors)
    }

    /// Sectors that carry weight and therefore need a propagator.
    pub fn active_sectors(bath: &BathSpec) -> impl Iterator<Item = &SectorSpec> {
        bath.sectors.iter().filter(|s| s.weight != 0.0)
    }

    /// Assembles sector propagators built elsewhere (e.g. concurrently).
    /// They are summed in ascending total spin whatever order they arrive in.
    pub fn from_sectors(
        bath: &BathSpec,
        couplings: CouplingConfig,
        mut sectors: Vec<SectorPropagator>,
    ) -> Result<Self> {
        bath.check_normalized()?;
        sectors.sort_by_key(|s| s.spin);
        let expected: Vec<_> = Self::active_sectors(bath).map(|s| s.spin).collect();
        let found: Vec<_> = sectors.iter().map(|s| s.spin).collect();
        if expected != found {
            let sum = sectors.iter().map(|s| s.weight).sum();
            return Err(Error::UnnormalizedBath { sum });
        }
        Ok(Self {
            couplings,
            model: bath.model,
            spins: bath.spins,
            sectors,
        })
    }

    pub fn couplings(&self) -> CouplingConfig {
        self.couplings
    }

    pub fn model(&self) -> PolarizationModel {
        self.model
    }

    pub fn spins(&self) -> u32 {
        self.spins
    }

    pub fn sectors(&self) -> &[SectorPropagator] {
        &self.sectors
    }

    /// Channel at engine time `t` (units of inverse coupling).
    pub fn channel(&self, t: f64) -> TwoQubitChannel {
        let transfer = self
            .sectors
            .iter()
            .fold(TransferMatrix::zeros(), |acc, s| acc + s.transfer(t) * s.weight);
        TwoQubitChannel { t, transfer }
    }

    /// Channel at dimensionless time `Kt`.
    pub fn channel_at_kt(&self, kt: f64) -> TwoQubitChannel {
        self.channel(self.couplings.time_from_kt(kt))
    }
}

/// Reduced two-qubit dynamics of `(a, A)` at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitChannel {
    pub t: f64,
    /// `R_ij = ¼ Tr[P_i Λ(P_j)]`.
    pub transfer: TransferMatrix,
}

impl TwoQubitChannel {
    pub fn identity(t: f64) -> Self {
        Self {
            t,
            transfer: TransferMatrix::identity(),
        }
    }

    /// `Λ(X)` for any 4×4 operator.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!(x.shape(), (4, 4));
        let mut coeffs = [linalg::ZERO; 16];
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c = pauli_pair_monomial(j)
                .iter()
                .enumerate()
                .map(|(r, &(col, v))| v * x[(col, r)])
                .sum::<Complex64>()
                * 0.5;
        }
        let mut out = CMatrix::zeros(4, 4);
        for (i, row) in self.transfer.row_iter().enumerate() {
            let c: Complex64 = row.iter().zip(&coeffs).map(|(r, y)| y * *r).sum::<Complex64>() * 0.5;
            if c == linalg::ZERO {
                continue;
            }
            for (r, &(col, v)) in pauli_pair_monomial(i).iter().enumerate() {
                out[(r, col)] += v * c;
            }
        }
        out
    }

    /// `(Λ ⊗ id_B)(ρ)` for an operator on `a ⊗ A ⊗ B`.
    pub fn apply_to_joint(&self, rho: &CMatrix) -> CMatrix {
        assert_eq!(rho.shape(), (8, 8));
        let mut out = CMatrix::zeros(8, 8);
        for beta in 0..4 {
            // X_β = Tr_B[ρ (1 ⊗ σ_β)], so ρ = Σ_β X_β ⊗ σ_β / 2.
            let sigma = linalg::pauli(beta);
            let x = CMatrix::from_fn(4, 4, |s, t| {
                let mut acc = linalg::ZERO;
                for b in 0..2 {
                    for bp in 0..2 {
                        acc += rho[(2 * s + b, 2 * t + bp)] * sigma[(bp, b)];
                    }
                }
                acc
            });
            out += self.apply(&x).kronecker(&(sigma * Complex64::new(0.5, 0.0)));
        }
        out
    }

    /// Choi matrix `Σ_kl |k⟩⟨l| ⊗ Λ(|k⟩⟨l|)`.
    pub fn choi(&self) -> CMatrix {
        let mut out = CMatrix::zeros(16, 16);
        for k in 0..4 {
            for l in 0..4 {
                let mut unit = CMatrix::zeros(4, 4);
                unit[(k, l)] = linalg::ONE;
                let image = self.apply(&unit);
                for r in 0..4 {
                    for c in 0..4 {
                        out[(4 * k + r, 4 * l + c)] = image[(r, c)];
                    }
                }
            }
        }
        out
    }

    /// Smallest Choi eigenvalue; complete positivity means it is `>= 0`.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.choi())[0]
    }

    /// Deviation of the first row from `(1, 0, …, 0)`.
    pub fn trace_preservation_residual(&self) -> f64 {
        (0..16)
            .map(|j| (self.transfer[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }
}

/// Channel of a bath at a single engine time.
pub fn two_qubit_channel(bath: &BathSpec, couplings: CouplingConfig, t: f64) -> Result<TwoQubitChannel> {
    Ok(BathPropagator::new(bath, couplings)?.channel(t))
}

/// `(Λ_t ⊗ id_B)[ρ_aAB]`; Bob's qubit is a spectator.
pub fn apply_channel_to_joint(channel: &TwoQubitChannel, rho: &CMatrix) -> CMatrix {
    channel.apply_to_joint(rho)
}

/// Coefficients of the isotropic correlation action
/// `D_kk(t) = f D_kk(0) + g Tr D(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FgCoefficients {
    pub f: f64,
    pub g: f64,
    /// Largest deviation of the diagonal correlation block from the `(f, g)`
    /// form. Near zero for unpolarized baths.
    pub residual: f64,
}

impl FgCoefficients {
    pub fn is_isotropic(&self) -> bool {
        self.residual <= ISOTROPY_TOL
    }

    pub fn ensure_isotropic(self) -> Result<Self> {
        if self.is_isotropic() {
            Ok(self)
        } else {
            Err(Error::ModelMismatch {
                residual: self.residual,
            })
        }
    }
}

/// Reads `f` and `g` off the action on `D(0) = diag(1, 0, 0)`:
/// `f = D_xx(t) - D_yy(t)`, `g = D_yy(t)`.
pub fn extract_fg(channel: &TwoQubitChannel) -> FgCoefficients {
    const DIAG: [usize; 3] = [5, 10, 15];
    let r = &channel.transfer;
    let g = r[(10, 5)];
    let f = r[(5, 5)] - g;
    let mut residual = 0.0f64;
    for (k, &row) in DIAG.iter().enumerate() {
        for (l, &col) in DIAG.iter().enumerate() {
            let model = if k == l { f + g } else { g };
            residual = residual.max((r[(row, col)] - model).abs());
        }
    }
    FgCoefficients { f, g, residual }
}

/// Reduced state of `(a, A)` for a product input `ρ_a ⊗ ρ_A`; handy for
/// spot checks.
pub fn evolve_product(channel: &TwoQubitChannel, a: &nalgebra::Vector3<f64>, b: &nalgebra::Vector3<f64>) -> CMatrix {
    channel.apply(&qubit_density(a).kronecker(&qubit_density(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_residual, max_abs, max_abs_diff};
    use crate::state::{BellLabel, MeasurementBasis};

    fn sector(twice: u32, state: SectorState) -> SectorSpec {
        SectorSpec {
            spin: SpinQuantumNumber::from_twice(twice),
            multiplicity: 1,
            weight: 1.0,
            internal_state: state,
        }
    }

    #[test]
    fn zero_spin_sector_is_zero() {
        let h = build_sector_hamiltonian(SpinQuantumNumber::ZERO, CouplingConfig::new(0.7, -1.3));
        assert_eq!(h.dim(), 4);
        assert_eq!(max_abs(&h.matrix), 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_real() {
        for twice in 0..8 {
            let h = build_sector_hamiltonian(SpinQuantumNumber::from_twice(twice), CouplingConfig::new(0.3, -1.1));
            assert!(hermiticity_residual(&h.matrix) < 1e-12);
            assert!(h.matrix.iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn singlet_is_dark_for_equal_couplings() {
        let k = 0.8;
        for twice in 0..6 {
            let spin = SpinQuantumNumber::from_twice(twice);
            let h = build_sector_hamiltonian(spin, CouplingConfig::new(k, k));
            let singlet = MeasurementBasis::BELL.ket(BellLabel::S0);
            for m in 0..spin.dim() {
                let mut bath = alloc::vec![0.0; spin.dim()];
                bath[m] = 1.0;
                let psi = CMatrix::from_fn(h.dim(), 1, |r, _| {
                    Complex64::new(singlet[r / spin.dim()] * bath[r % spin.dim()], 0.0)
                });
                assert!(max_abs(&(&h.matrix * psi)) < 1e-14);
            }
        }
    }

    #[test]
    fn equal_couplings_conserve_pair_spin() {
        let spin = SpinQuantumNumber::integer(2);
        let h = build_sector_hamiltonian(spin, CouplingConfig::new(1.0, 1.0));
        let s = spin_operators(SpinQuantumNumber::HALF);
        let one = linalg::identity(2);
        let bath_one = linalg::identity(spin.dim());
        let mut total_sq = CMatrix::zeros(h.dim(), h.dim());
        for op in s.components() {
            let sum = (op.kronecker(&one) + one.kronecker(op)).kronecker(&bath_one);
            total_sq += &sum * &sum;
        }
        let comm = &h.matrix * &total_sq - &total_sq * &h.matrix;
        assert!(max_abs(&comm) < 1e-12);
    }

    #[test]
    fn levels_of_a_sector() {
        // Stretched state |↑↑, I⟩ has energy (K_a + K_A) I / 2.
        let p = SectorPropagator::new(&sector(6, SectorState::Unpolarized), CouplingConfig::new(0.5, 0.25));
        let top = (0.5 + 0.25) * 3.0 / 2.0;
        assert!(p.levels().iter().any(|e| (e - top).abs() < 1e-12));
        assert!(p.levels().len() <= 4);
    }

    #[test]
    fn channel_at_zero_time_is_identity() {
        let bath = BathSpec::unpolarized(6).unwrap();
        let ch = two_qubit_channel(&bath, CouplingConfig::new(0.9, -0.4), 0.0).unwrap();
        assert!((ch.transfer - TransferMatrix::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn zero_coupling_is_identity_at_all_times() {
        let bath = BathSpec::polarized(8).unwrap();
        let prop = BathPropagator::new(&bath, CouplingConfig::zero()).unwrap();
        for t in [0.0, 0.5, 3.0, 17.0] {
            assert!((prop.channel(t).transfer - TransferMatrix::identity()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn trace_preserving_and_unital() {
        let bath = BathSpec::unpolarized(7).unwrap();
        let prop = BathPropagator::new(&bath, CouplingConfig::new(0.6, 1.2)).unwrap();
        for t in [0.3, 1.7] {
            let ch = prop.channel(t);
            assert!(ch.trace_preservation_residual() < 1e-12);
            let mixed = linalg::identity(4) * Complex64::new(0.25, 0.0);
            assert!(max_abs_diff(&ch.apply(&mixed), &mixed) < 1e-12);
            assert!(ch.min_choi_eigenvalue() > -1e-8);
        }
    }

    #[test]
    fn polarized_channel_is_trace_preserving_and_cp() {
        let bath = BathSpec::polarized(10).unwrap();
        let prop = BathPropagator::new(&bath, CouplingConfig::new(0.6, -1.2)).unwrap();
        let ch = prop.channel(1.1);
        assert!(ch.trace_preservation_residual() < 1e-12);
        assert!(ch.min_choi_eigenvalue() > -1e-8);
    }

    #[test]
    fn identity_channel_returns_input() {
        let rho = crate::state::initial_joint_state([0.2, 0.5, -0.7], BellLabel::TPlus).unwrap();
        let out = apply_channel_to_joint(&TwoQubitChannel::identity(0.0), &rho);
        assert!(max_abs_diff(&out, &rho) < 1e-15);
    }

    #[test]
    fn bob_marginal_is_untouched() {
        let bath = BathSpec::unpolarized(5).unwrap();
        let ch = two_qubit_channel(&bath, CouplingConfig::new(1.0, -0.3), 2.0).unwrap();
        let rho = crate::state::initial_joint_state([0.6, 0.0, 0.8], BellLabel::T0).unwrap();
        let out = ch.apply_to_joint(&rho);
        let bob_in = linalg::partial_trace(&rho, &[2, 2, 2], &[false, false, true]);
        let bob_out = linalg::partial_trace(&out, &[2, 2, 2], &[false, false, true]);
        assert!(max_abs_diff(&bob_in, &bob_out) < 1e-13);
        assert!((out.trace().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn fg_at_zero_time() {
        let fg = extract_fg(&TwoQubitChannel::identity(0.0));
        assert_eq!((fg.f, fg.g), (1.0, 0.0));
        assert_eq!(fg.residual, 0.0);
    }

    #[test]
    fn fg_identity_for_equal_couplings() {
        let bath = BathSpec::unpolarized(12).unwrap();
        let prop = BathPropagator::new(&bath, CouplingConfig::new(0.7, 0.7)).unwrap();
        for k in 0..10 {
            let fg = extract_fg(&prop.channel(0.37 * k as f64)).ensure_isotropic().unwrap();
            assert!((fg.f + 3.0 * fg.g - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn polarized_bath_is_flagged() {
        let bath = BathSpec::polarized(10).unwrap();
        let ch = two_qubit_channel(&bath, CouplingConfig::new(1.0, 0.4), 1.5).unwrap();
        let fg = extract_fg(&ch);
        assert!(!fg.is_isotropic());
        assert!(matches!(fg.ensure_isotropic(), Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn unnormalized_bath_is_a_configuration_error() {
        let mut bath = BathSpec::unpolarized(4).unwrap();
        bath.sectors[1].weight *= 2.0;
        assert!(matches!(
            two_qubit_channel(&bath, CouplingConfig::new(1.0, 1.0), 0.1),
            Err(Error::UnnormalizedBath { .. })
        ));
    }

    #[test]
    fn sector_order_does_not_matter() {
        let bath = BathSpec::unpolarized(9).unwrap();
        let c = CouplingConfig::new(0.4, -0.9);
        let forward = BathPropagator::new(&bath, c).unwrap();
        let reversed: Vec<_> = bath.sectors.iter().rev().map(|s| SectorPropagator::new(s, c)).collect();
        let reversed = BathPropagator::from_sectors(&bath, c, reversed).unwrap();
        for t in [0.2, 1.4] {
            assert_eq!(forward.channel(t).transfer, reversed.channel(t).transfer);
        }
        // Genuinely reordered summation stays within rounding.
        let ch = forward.channel(0.9);
        let manual = forward
            .sectors()
            .iter()
            .rev()
            .fold(TransferMatrix::zeros(), |acc, s| acc + s.transfer(0.9) * s.weight());
        assert!((ch.transfer - manual).abs().max() < 1e-13);
    }

    #[test]
    fn mismatched_sector_list_is_rejected() {
        let bath = BathSpec::unpolarized(4).unwrap();
        let c = CouplingConfig::new(1.0, 1.0);
        let partial = alloc::vec![SectorPropagator::new(&bath.sectors[0], c)];
        assert!(BathPropagator::from_sectors(&bath, c, partial).is_err());
    }

    #[test]
    fn coupling_parameterization() {
        for delta in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let c = CouplingConfig::from_inhomogeneity(delta, 2.0).unwrap();
            assert!((c.magnitude() - 2.0).abs() < 1e-14);
            assert!((c.inhomogeneity() - delta).abs() < 1e-14);
        }
        assert!(CouplingConfig::from_inhomogeneity(1.5, 1.0).is_err());
        assert_eq!(CouplingConfig::zero().inhomogeneity(), 0.0);
    }
}
