//! Angular-momentum operators and the total-spin sector structure of a bath
//! of `N` spin-1/2 particles.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Largest bath handled. Keeps `2^N` and every binomial exact in `u128` and
/// every multiplicity exact as an `f64`.
pub const MAX_BATH_SPINS: u32 = 64;

/// A non-negative half-integer spin `j`, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinQuantumNumber {
    twice: u32,
}

impl SpinQuantumNumber {
    pub const ZERO: Self = Self { twice: 0 };
    pub const HALF: Self = Self { twice: 1 };

    pub const fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Integer spin `j`.
    pub const fn integer(j: u32) -> Self {
        Self { twice: 2 * j }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Multiplet dimension `2j + 1`.
    pub const fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// `j (j + 1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }
}

impl fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Cartesian components of a spin operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperators {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.x, &self.y, &self.z]
    }
}

/// Spin-`j` matrices in the `|j, m⟩` basis ordered `m = j, j-1, …, -j`.
pub fn spin_operators(j: SpinQuantumNumber) -> SpinOperators {
    let dim = j.dim();
    let jj = j.value();
    let m = |k: usize| jj - k as f64;

    let mut x = CMatrix::zeros(dim, dim);
    let mut y = CMatrix::zeros(dim, dim);
    let mut z = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        z[(k, k)] = Complex64::new(m(k), 0.0);
    }
    // ⟨m+1| J+ |m⟩ = sqrt(j(j+1) - m(m+1)); row k-1 holds m+1 when column k holds m.
    for k in 1..dim {
        let mk = m(k);
        let amp = libm::sqrt(jj * (jj + 1.0) - mk * (mk + 1.0));
        x[(k - 1, k)] = Complex64::new(amp / 2.0, 0.0);
        x[(k, k - 1)] = Complex64::new(amp / 2.0, 0.0);
        y[(k - 1, k)] = Complex64::new(0.0, -amp / 2.0);
        y[(k, k - 1)] = Complex64::new(0.0, amp / 2.0);
    }
    SpinOperators { x, y, z }
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial, so the division is exact.
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn check_bath_size(spins: u32) -> Result<()> {
    if spins == 0 || spins > MAX_BATH_SPINS {
        return Err(Error::InvalidBathSize {
            spins,
            max: MAX_BATH_SPINS,
        });
    }
    Ok(())
}

/// Number of spin-`I` multiplets in `N` spin-1/2 particles,
/// `C(N, N/2 - I) - C(N, N/2 - I - 1)`.
pub fn sector_multiplicity(spins: u32, total: SpinQuantumNumber) -> Result<u128> {
    check_bath_size(spins)?;
    let twice = total.twice();
    if twice > spins || !(spins - twice).is_multiple_of(2) {
        return Err(Error::InvalidSector {
            spins,
            twice_spin: twice,
        });
    }
    let k = (spins - twice) / 2;
    let lower = if k == 0 { 0 } else { binomial(spins, k - 1) };
    Ok(binomial(spins, k) - lower)
}

/// Total-spin values of an `N`-spin bath in ascending order.
pub fn sectors(spins: u32) -> impl Iterator<Item = SpinQuantumNumber> {
    (spins % 2..=spins).step_by(2).map(SpinQuantumNumber::from_twice)
}

/// Exact unpolarized weight `g(N, I)(2I + 1) / 2^N` as `(numerator, denominator)`.
pub fn unpolarized_weight_fraction(spins: u32, total: SpinQuantumNumber) -> Result<(u128, u128)> {
    let g = sector_multiplicity(spins, total)?;
    Ok((g * total.dim() as u128, 1u128 << spins))
}

/// Sector weights of the maximally mixed bath `1 / 2^N`, ascending in `I`.
pub fn unpolarized_sector_weights(spins: u32) -> Result<Vec<(SpinQuantumNumber, f64)>> {
    check_bath_size(spins)?;
    sectors(spins)
        .map(|total| {
            let (num, den) = unpolarized_weight_fraction(spins, total)?;
            // Both integers are exact in f64 for N <= 64 (den is a power of two).
            Ok((total, num as f64 / den as f64))
        })
        .collect()
}

/// Sector weights `λ_I ∝ I² exp(-2 I² / N)`, normalized over every sector of
/// the bath (half-integer sectors included for odd `N`), ascending in `I`.
pub fn polarized_sector_weights(spins: u32) -> Result<Vec<(SpinQuantumNumber, f64)>> {
    check_bath_size(spins)?;
    let n = f64::from(spins);
    let raw: Vec<(SpinQuantumNumber, f64)> = sectors(spins)
        .map(|total| {
            let i = total.value();
            (total, i * i * libm::exp(-2.0 * i * i / n))
        })
        .collect();
    let norm: f64 = raw.iter().map(|(_, w)| w).sum();
    Ok(raw.into_iter().map(|(s, w)| (s, w / norm)).collect())
}

/// Internal state of one total-spin sector at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectorState {
    /// Maximally mixed over the `2I + 1` projections.
    Unpolarized,
    /// The pure state `|I, m = I⟩`.
    MaxPolarizedZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolarizationModel {
    /// `ρ = 1 / 2^N`.
    UnpolarizedIdentity,
    /// `λ_I ∝ I² exp(-2I²/N)` with every sector in `|I, I⟩`.
    PolarizedGaussianI2,
}

/// One incoherent component of the bath: all `multiplicity` copies of the
/// spin-`I` multiplet share the aggregated `weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSpec {
    pub spin: SpinQuantumNumber,
    pub multiplicity: u128,
    pub weight: f64,
    pub internal_state: SectorState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BathSpec {
    pub spins: u32,
    /// Ascending in `I`; the engine sums sectors in this order.
    pub sectors: Vec<SectorSpec>,
    pub model: PolarizationModel,
}

impl BathSpec {
    pub fn unpolarized(spins: u32) -> Result<Self> {
        Self::from_weights(
            spins,
            unpolarized_sector_weights(spins)?,
            SectorState::Unpolarized,
            PolarizationModel::UnpolarizedIdentity,
        )
    }

    pub fn polarized(spins: u32) -> Result<Self> {
        Self::from_weights(
            spins,
            polarized_sector_weights(spins)?,
            SectorState::MaxPolarizedZ,
            PolarizationModel::PolarizedGaussianI2,
        )
    }

    pub fn new(spins: u32, model: PolarizationModel) -> Result<Self> {
        match model {
            PolarizationModel::UnpolarizedIdentity => Self::unpolarized(spins),
            PolarizationModel::PolarizedGaussianI2 => Self::polarized(spins),
        }
    }

    fn from_weights(
        spins: u32,
        weights: Vec<(SpinQuantumNumber, f64)>,
        internal_state: SectorState,
        model: PolarizationModel,
    ) -> Result<Self> {
        let sectors = weights
            .into_iter()
            .map(|(spin, weight)| {
                Ok(SectorSpec {
                    spin,
                    multiplicity: sector_multiplicity(spins, spin)?,
                    weight,
                    internal_state,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { spins, sectors, model })
    }

    pub fn weight_sum(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight).sum()
    }

    /// Fails unless the weights sum to one within `1e-12`.
    pub fn check_normalized(&self) -> Result<()> {
        let sum = self.weight_sum();
        if (sum - 1.0).abs() > 1e-12 || self.sectors.iter().any(|s| !(s.weight >= 0.0)) {
            return Err(Error::UnnormalizedBath { sum });
        }
        Ok(())
    }

    /// `⟨I²⟩ = Σ λ_I I(I+1)`.
    pub fn mean_square_spin(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight * s.spin.casimir()).sum()
    }
}
