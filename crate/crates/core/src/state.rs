//! Polarization/correlation representation of qubit states.
//!
//! Bloch vectors and correlation entries are Pauli expectation values
//! (`P_k = Tr ρ σ_k`, `C_mn = Tr ρ σ_m ⊗ σ_n`), so that the Bell correlation
//! vectors are exactly `±1`. The two-qubit computational basis is ordered
//! `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` with `↑` along `+z`.

use core::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::linalg::{self, pauli, pauli_pair, CMatrix};
use crate::{Error, Result};

const PURITY_TOL: f64 = 1e-12;

/// Polarization of a single qubit; `|P| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector(Vector3<f64>);

impl BlochVector {
    pub const ZERO: Self = Self(Vector3::new(0.0, 0.0, 0.0));
    pub const X: Self = Self(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: Self = Self(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: Self = Self(Vector3::new(0.0, 0.0, 1.0));

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::try_from_vector(Vector3::new(x, y, z))
    }

    pub fn try_from_vector(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm <= 1.0 + PURITY_TOL) {
            return Err(Error::UnphysicalState { norm });
        }
        Ok(Self(v))
    }

    /// Pure state on the sphere at polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let s = libm::sin(theta);
        Self(Vector3::new(s * libm::cos(phi), s * libm::sin(phi), libm::cos(theta)))
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= PURITY_TOL
    }

    /// `(1 + P·σ) / 2`.
    pub fn density(&self) -> CMatrix {
        qubit_density(&self.0)
    }
}

/// `(1 + v·σ) / 2` for any real vector.
pub fn qubit_density(v: &Vector3<f64>) -> CMatrix {
    let mut rho = linalg::identity(2);
    for k in 0..3 {
        rho += pauli(k + 1) * Complex64::new(v[k], 0.0);
    }
    rho * Complex64::new(0.5, 0.0)
}

/// Pauli expectation values `Tr(ρ σ_k)` of a single-qubit operator.
pub fn qubit_bloch(rho: &CMatrix) -> Vector3<f64> {
    Vector3::from_fn(|k, _| (rho * pauli(k + 1)).trace().re)
}

/// The four Bell states.
///
/// `S0 = (↑↓ - ↓↑)/√2`, `T0 = (↑↓ + ↓↑)/√2`, `TPlus = (↑↑ + ↓↓)/√2` and
/// `TMinus = (↑↑ - ↓↓)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    S0,
    T0,
    TPlus,
    TMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::S0, BellLabel::T0, BellLabel::TPlus, BellLabel::TMinus];

    /// Diagonal of the Pauli correlation matrix.
    pub const fn correlation_vector(self) -> [f64; 3] {
        match self {
            BellLabel::S0 => [-1.0, -1.0, -1.0],
            BellLabel::T0 => [1.0, 1.0, -1.0],
            BellLabel::TPlus => [1.0, -1.0, 1.0],
            BellLabel::TMinus => [-1.0, 1.0, 1.0],
        }
    }

    /// Trace of the correlation vector: `-3` for the singlet, `1` otherwise.
    pub fn correlation_trace(self) -> f64 {
        self.correlation_vector().iter().sum()
    }

    pub fn is_singlet(self) -> bool {
        self == BellLabel::S0
    }

    pub const fn name(self) -> &'static str {
        match self {
            BellLabel::S0 => "s0",
            BellLabel::T0 => "t0",
            BellLabel::TPlus => "tplus",
            BellLabel::TMinus => "tminus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let lower = name.trim();
        Self::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(lower))
            .or(match lower {
                "S0" | "singlet" => Some(BellLabel::S0),
                "T+" | "t+" => Some(BellLabel::TPlus),
                "T-" | "t-" => Some(BellLabel::TMinus),
                _ => None,
            })
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Correlation vector of a Bell state.
pub fn bell_correlation_vector(label: BellLabel) -> [f64; 3] {
    label.correlation_vector()
}

/// The one-parameter family of measurement bases deforming the Bell basis:
///
/// ```text
/// S0(r) ∝ |↑↓⟩ - r|↓↑⟩    T0(r) ∝ r|↑↓⟩ + |↓↑⟩
/// T+(r) ∝ r|↑↑⟩ + |↓↓⟩    T-(r) ∝ |↑↑⟩ - r|↓↓⟩
/// ```
///
/// `r = 1` is the Bell basis and `r = 0` the product basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBasis {
    r: f64,
}

impl MeasurementBasis {
    pub const BELL: Self = Self { r: 1.0 };

    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidBasisParameter(r));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn ket(&self, label: BellLabel) -> [f64; 4] {
        let r = self.r;
        let n = 1.0 / libm::sqrt(1.0 + r * r);
        match label {
            BellLabel::S0 => [0.0, n, -r * n, 0.0],
            BellLabel::T0 => [0.0, r * n, n, 0.0],
            BellLabel::TPlus => [r * n, 0.0, 0.0, n],
            BellLabel::TMinus => [n, 0.0, 0.0, -r * n],
        }
    }

    /// Rank-one projector onto `ket(label)`.
    pub fn projector(&self, label: BellLabel) -> CMatrix {
        let k = self.ket(label);
        CMatrix::from_fn(4, 4, |i, j| Complex64::new(k[i] * k[j], 0.0))
    }
}

/// Density matrix of the named member of the `r`-deformed basis.
pub fn basis_state_density(label: BellLabel, r: f64) -> Result<CMatrix> {
    Ok(MeasurementBasis::new(r)?.projector(label))
}

/// A two-qubit operator written as
/// `(1 + a·σ ⊗ 1 + 1 ⊗ b·σ + Σ C_mn σ_m ⊗ σ_n) / 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    pub bloch_a: Vector3<f64>,
    pub bloch_b: Vector3<f64>,
    pub corr: Matrix3<f64>,
}

impl TwoQubitState {
    pub fn maximally_mixed() -> Self {
        Self {
            bloch_a: Vector3::zeros(),
            bloch_b: Vector3::zeros(),
            corr: Matrix3::zeros(),
        }
    }

    pub fn bell(label: BellLabel) -> Self {
        let d = label.correlation_vector();
        Self {
            bloch_a: Vector3::zeros(),
            bloch_b: Vector3::zeros(),
            corr: Matrix3::from_diagonal(&Vector3::from(d)),
        }
    }

    /// Pauli decomposition of a trace-one two-qubit density matrix.
    pub fn from_density(rho: &CMatrix) -> Result<Self> {
        if rho.shape() != (4, 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                rows: rho.nrows(),
                cols: rho.ncols(),
            });
        }
        let trace = rho.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::NonUnitTrace { trace: trace.re });
        }
        let expect = |index: usize| (rho * pauli_pair(index)).trace().re;
        Ok(Self {
            bloch_a: Vector3::from_fn(|k, _| expect(4 * (k + 1))),
            bloch_b: Vector3::from_fn(|k, _| expect(k + 1)),
            corr: Matrix3::from_fn(|m, n| expect(4 * (m + 1) + n + 1)),
        })
    }

    pub fn density(&self) -> CMatrix {
        let mut rho = linalg::identity(4);
        for k in 0..3 {
            rho += pauli_pair(4 * (k + 1)) * Complex64::new(self.bloch_a[k], 0.0);
            rho += pauli_pair(k + 1) * Complex64::new(self.bloch_b[k], 0.0);
            for n in 0..3 {
                rho += pauli_pair(4 * (k + 1) + n + 1) * Complex64::new(self.corr[(k, n)], 0.0);
            }
        }
        rho * Complex64::new(0.25, 0.0)
    }

    /// Smallest eigenvalue of the reconstructed density matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.density())[0]
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= -1e-10
    }
}

/// Pauli decomposition of a two-qubit density matrix.
pub fn correlation_decomposition(rho: &CMatrix) -> Result<TwoQubitState> {
    TwoQubitState::from_density(rho)
}

/// `ρ_a ⊗ ρ_AB` on qubits `a ⊗ A ⊗ B`: the unknown state with polarization
/// `p_a` next to the Bell pair `shared` held by Alice (A) and Bob (B).
pub fn initial_joint_state(p_a: [f64; 3], shared: BellLabel) -> Result<CMatrix> {
    let p = BlochVector::new(p_a[0], p_a[1], p_a[2])?;
    Ok(p.density().kronecker(&TwoQubitState::bell(shared).density()))
}
