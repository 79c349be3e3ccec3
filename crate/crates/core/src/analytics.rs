//! Leading-order short-time predictions and the quadratic fit used to
//! compare them against exact evolution.
//!
//! Rates are quoted as coefficients of `(Kt)²` in `1 − F_av`, with
//! `K² = K_a² + K_A²`; for an unpolarized bath `⟨I²⟩ = 3N/4`.

use crate::evolution::CouplingConfig;
use crate::state::BellLabel;
use crate::{Error, Result};

/// Default fit horizon in `Kt`.
pub const DEFAULT_FIT_HORIZON: f64 = 0.05;
/// Minimum number of samples accepted by [`quadratic_decay_fit`].
pub const MIN_FIT_POINTS: usize = 5;

/// `⟨I²⟩` of an unpolarized bath of `spins` spins.
pub fn unpolarized_mean_square_spin(spins: u32) -> f64 {
    0.75 * spins as f64
}

/// Bell-measurement decay rates in `(Kt)²` units for an unpolarized bath.
pub fn bell_decay_rate(inhomogeneity: f64, spins: u32, label: BellLabel) -> f64 {
    let scale = unpolarized_mean_square_spin(spins) / 6.0;
    if label.is_singlet() {
        scale * (1.0 - inhomogeneity)
    } else {
        scale * (1.0 + inhomogeneity / 3.0)
    }
}

/// Gaussian decay times of the singlet and triplet outcomes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceTimescales {
    /// `τ` for the singlet outcome, in the time unit of the couplings;
    /// infinite when the outcome does not decay.
    pub singlet: f64,
    pub triplet: f64,
}

impl DecoherenceTimescales {
    /// `τ_T² / τ_S0²`.
    pub fn squared_ratio(&self) -> f64 {
        (self.triplet * self.triplet) / (self.singlet * self.singlet)
    }

    pub fn for_label(&self, label: BellLabel) -> f64 {
        if label.is_singlet() {
            self.singlet
        } else {
            self.triplet
        }
    }
}

fn tau_from_rate(rate: f64) -> f64 {
    if rate > 0.0 {
        1.0 / libm::sqrt(rate)
    } else {
        f64::INFINITY
    }
}

/// Decoherence times of a Bell measurement with an unpolarized bath.
pub fn decoherence_timescales(couplings: CouplingConfig, spins: u32) -> DecoherenceTimescales {
    let k2 = couplings.magnitude() * couplings.magnitude();
    let delta = couplings.inhomogeneity();
    DecoherenceTimescales {
        singlet: tau_from_rate(bell_decay_rate(delta, spins, BellLabel::S0) * k2),
        triplet: tau_from_rate(bell_decay_rate(delta, spins, BellLabel::T0) * k2),
    }
}

/// Leading-order behaviour `F_av ≈ F_av(0) − a (Kt)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortTimePrediction {
    pub intercept: f64,
    /// `a`, the coefficient of `(Kt)²` in `1 − F_av`.
    pub coefficient: f64,
    /// `1/√a` in `1/K` units, infinite for `a = 0`.
    pub tau: f64,
    /// Horizon in `Kt` over which the quadratic form is trusted.
    pub kt_max: f64,
}

impl ShortTimePrediction {
    fn new(intercept: f64, coefficient: f64) -> Self {
        Self {
            intercept,
            coefficient,
            tau: tau_from_rate(coefficient),
            kt_max: DEFAULT_FIT_HORIZON,
        }
    }

    pub fn at_kt(&self, kt: f64) -> f64 {
        self.intercept - self.coefficient * kt * kt
    }
}

/// Bell-measurement prediction for an unpolarized bath.
pub fn bell_short_time(couplings: CouplingConfig, spins: u32, label: BellLabel) -> ShortTimePrediction {
    ShortTimePrediction::new(1.0, bell_decay_rate(couplings.inhomogeneity(), spins, label))
}

/// `[(1+r)² + 2r] / [6(1+r²)]`, the weight of the correlated part of `F_av`
/// for the `r`-deformed basis.
pub fn partial_basis_prefactor(r: f64) -> f64 {
    ((1.0 + r) * (1.0 + r) + 2.0 * r) / (6.0 * (1.0 + r * r))
}

/// `F_av` at `t = 0` for the `r`-deformed basis.
pub fn partial_basis_intercept(r: f64) -> f64 {
    0.5 + partial_basis_prefactor(r)
}

/// Label-dependent bracket multiplying `t²/τ₀²`.
fn partial_basis_bracket(r: f64, delta: f64, label: BellLabel) -> f64 {
    let d = (1.0 + r) * (1.0 + r) + 2.0 * r;
    match label {
        BellLabel::S0 => 1.0 - delta,
        BellLabel::T0 => 1.0 + delta * (1.0 + r * r) / d,
        BellLabel::TPlus | BellLabel::TMinus => 1.0 + 2.0 * delta * r / d,
    }
}

/// Short-time prediction for outcome `label` of the `r`-deformed basis,
/// unpolarized bath, probability-weighted averaging; `1/τ₀² = ⟨I²⟩K²/3`.
pub fn partial_basis_prediction(
    r: f64,
    couplings: CouplingConfig,
    spins: u32,
    label: BellLabel,
) -> ShortTimePrediction {
    let inv_tau0_sq = unpolarized_mean_square_spin(spins) / 3.0;
    let a = partial_basis_prefactor(r) * inv_tau0_sq * partial_basis_bracket(r, couplings.inhomogeneity(), label);
    ShortTimePrediction::new(partial_basis_intercept(r), a)
}

/// Predicted `F_av(t)` (physical time `t`) of the `r`-deformed basis.
pub fn partial_basis_short_time(r: f64, couplings: CouplingConfig, spins: u32, label: BellLabel, t: f64) -> f64 {
    partial_basis_prediction(r, couplings, spins, label).at_kt(couplings.magnitude() * t)
}

/// Least-squares fit of `1 − F_av = b + a (Kt)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// `a`, in `(Kt)²` units.
    pub coefficient: f64,
    /// `b`, the fitted `1 − F_av(0)`.
    pub offset: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

/// Fits the samples with `Kt ≤ kt_max`.
pub fn quadratic_decay_fit(times_kt: &[f64], f_av: &[f64], kt_max: f64) -> Result<DecayFit> {
    let samples: alloc::vec::Vec<(f64, f64)> = times_kt
        .iter()
        .zip(f_av)
        .filter(|(kt, _)| kt.abs() <= kt_max)
        .map(|(kt, f)| (kt * kt, 1.0 - f))
        .collect();
    let n = samples.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            found: n,
        });
    }
    let nf = n as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx) * (s.0 - mx)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            found: 1,
        });
    }
    let coefficient = sxy / sxx;
    let offset = my - coefficient * mx;
    let ss: f64 = samples
        .iter()
        .map(|&(x, y)| {
            let e = y - offset - coefficient * x;
            e * e
        })
        .sum();
    Ok(DecayFit {
        coefficient,
        offset,
        residual: libm::sqrt(ss / nf),
        points: n,
    })
}
