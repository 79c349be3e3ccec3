//! The teleportation pipeline on top of the bath channel: Alice's
//! measurement, Bob's Pauli correction and the fidelity figures of merit.
//!
//! For every `(shared pair, measured outcome)` the end-to-end protocol maps
//! the input Bloch vector `P` to Bob's unnormalized corrected Bloch vector
//! `T P + c` (the Bloch part of `4 ω`, `ω` being Bob's unnormalized state),
//! and the outcome probability is affine in `P` as well. Both averaging modes
//! are derived from that pair of affine maps.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::evolution::{BathPropagator, CouplingConfig, TwoQubitChannel};
use crate::linalg::{self, CMatrix};
use crate::spin::{BathSpec, PolarizationModel};
use crate::state::{initial_joint_state, qubit_bloch, BellLabel, BlochVector, MeasurementBasis};
use crate::{Error, Result};

/// Probabilities below this are treated as impossible outcomes.
pub const MIN_PROBABILITY: f64 = 1e-14;

/// How Bob's state is normalized when fidelities are averaged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AveragingMode {
    /// Bob's state is renormalized per outcome; `F_av` is the uniform
    /// average of the conditional fidelity.
    Conditional,
    /// Each input is weighted by its outcome probability. Bob's operator is
    /// normalized by the sphere-averaged probability `p̄` rather than the
    /// input-specific one; for `p̄ = 1/4` this is `4ω` left unnormalized.
    #[default]
    ProbabilityWeighted,
}

impl AveragingMode {
    pub const fn name(self) -> &'static str {
        match self {
            AveragingMode::Conditional => "conditional",
            AveragingMode::ProbabilityWeighted => "weighted",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "conditional" => Some(AveragingMode::Conditional),
            "weighted" | "probability-weighted" | "probabilityweighted" => Some(AveragingMode::ProbabilityWeighted),
            _ => None,
        }
    }
}

impl fmt::Display for AveragingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of projecting Alice's pair onto one member of the measurement basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub label: BellLabel,
    pub r: f64,
    pub probability: f64,
    /// Bob's Bloch vector: of `ω / Tr ω` in conditional mode, of `4ω` in
    /// probability-weighted mode.
    pub bob_state: Vector3<f64>,
    pub mode: AveragingMode,
}

impl MeasurementOutcome {
    /// Applies Bob's Pauli correction for the given shared pair.
    pub fn corrected(mut self, shared: BellLabel) -> Self {
        let signs = bob_correction(shared, self.label).signs();
        self.bob_state.component_mul_assign(&Vector3::from(signs));
        self
    }
}

/// Bob's operator `ω = Tr_aA[(Π ⊗ 1) ρ]` for a state on `a ⊗ A ⊗ B`.
fn bob_operator(rho: &CMatrix, projector: &CMatrix) -> CMatrix {
    let mut omega = CMatrix::zeros(2, 2);
    for b in 0..2 {
        for bp in 0..2 {
            let mut acc = linalg::ZERO;
            for s in 0..4 {
                for u in 0..4 {
                    let p = projector[(s, u)];
                    if p != linalg::ZERO {
                        acc += p * rho[(2 * u + b, 2 * s + bp)];
                    }
                }
            }
            omega[(b, bp)] = acc;
        }
    }
    omega
}

/// Projects qubits `(a, A)` of `ρ_aAB` onto `label` of the `r`-deformed basis.
pub fn project_measurement(rho: &CMatrix, label: BellLabel, r: f64, mode: AveragingMode) -> Result<MeasurementOutcome> {
    if rho.shape() != (8, 8) {
        return Err(Error::DimensionMismatch {
            expected: 8,
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    }
    let basis = MeasurementBasis::new(r)?;
    let omega = bob_operator(rho, &basis.projector(label));
    let probability = omega.trace().re;
    if !(probability >= MIN_PROBABILITY) {
        return Err(Error::ImpossibleOutcome { probability });
    }
    let bloch = qubit_bloch(&omega);
    let bob_state = match mode {
        AveragingMode::Conditional => bloch / probability,
        AveragingMode::ProbabilityWeighted => bloch * 4.0,
    };
    Ok(MeasurementOutcome {
        label,
        r,
        probability,
        bob_state,
        mode,
    })
}

/// Bob's Pauli correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliCorrection {
    Identity,
    X,
    Y,
    Z,
}

impl PauliCorrection {
    /// Action on Bloch vectors: component `i` is multiplied by `signs()[i]`.
    pub const fn signs(self) -> [f64; 3] {
        match self {
            PauliCorrection::Identity => [1.0, 1.0, 1.0],
            PauliCorrection::X => [1.0, -1.0, -1.0],
            PauliCorrection::Y => [-1.0, 1.0, -1.0],
            PauliCorrection::Z => [-1.0, -1.0, 1.0],
        }
    }

    pub fn matrix(self) -> CMatrix {
        linalg::pauli(match self {
            PauliCorrection::Identity => 0,
            PauliCorrection::X => 1,
            PauliCorrection::Y => 2,
            PauliCorrection::Z => 3,
        })
    }

    pub const ALL: [PauliCorrection; 4] = [
        PauliCorrection::Identity,
        PauliCorrection::X,
        PauliCorrection::Y,
        PauliCorrection::Z,
    ];
}

/// The correction multiplying Bloch component `i` by `D_i M_i`, with `D` the
/// shared pair's correlation vector and `M` the measured one. For a deformed
/// basis the correction of the matching Bell outcome is used.
pub fn bob_correction(shared: BellLabel, measured: BellLabel) -> PauliCorrection {
    let d = shared.correlation_vector();
    let m = measured.correlation_vector();
    let s = [d[0] * m[0], d[1] * m[1], d[2] * m[2]];
    PauliCorrection::ALL
        .into_iter()
        .find(|c| c.signs() == s)
        .expect("products of Bell vectors are Pauli signs")
}

/// Outcome probability as an affine function of the input Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeProbability {
    pub constant: f64,
    pub gradient: Vector3<f64>,
}

impl OutcomeProbability {
    pub fn at(&self, p: &Vector3<f64>) -> f64 {
        self.constant + self.gradient.dot(p)
    }

    /// True when the probability does not depend on the input.
    pub fn is_uniform(&self) -> bool {
        self.gradient.norm() <= 1e-12
    }
}

/// End-to-end action of the corrected protocol on the input Bloch vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTransfer {
    /// `T` in `P ↦ T P + c`, Bloch part of Bob's corrected `4ω`.
    pub matrix: Matrix3<f64>,
    pub offset: Vector3<f64>,
    pub probability: OutcomeProbability,
    pub mode: AveragingMode,
}

impl ChannelTransfer {
    pub fn identity(mode: AveragingMode) -> Self {
        Self {
            matrix: Matrix3::identity(),
            offset: Vector3::zeros(),
            probability: OutcomeProbability {
                constant: 0.25,
                gradient: Vector3::zeros(),
            },
            mode,
        }
    }

    /// Bob's corrected Bloch vector for input `p` under this transfer's mode.
    pub fn bob_bloch(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let raw = self.matrix * p + self.offset;
        match self.mode {
            AveragingMode::ProbabilityWeighted => raw / (4.0 * self.probability.constant),
            AveragingMode::Conditional => {
                let q = 4.0 * self.probability.at(p);
                if q > 4.0 * MIN_PROBABILITY {
                    raw / q
                } else {
                    Vector3::zeros()
                }
            }
        }
    }

    /// Affine map of the conditional Bloch vector when it is affine, i.e.
    /// when the outcome probability does not depend on the input.
    pub fn conditional_affine(&self) -> Option<(Matrix3<f64>, Vector3<f64>)> {
        self.probability.is_uniform().then(|| {
            let q = 4.0 * self.probability.constant;
            (self.matrix / q, self.offset / q)
        })
    }
}

/// Runs the pipeline once: prepare, evolve, measure, correct.
fn run_single(
    channel: &TwoQubitChannel,
    input: [f64; 3],
    shared: BellLabel,
    measured: BellLabel,
    r: f64,
) -> Result<(f64, Vector3<f64>)> {
    let rho = channel.apply_to_joint(&initial_joint_state(input, shared)?);
    let omega = bob_operator(&rho, &MeasurementBasis::new(r)?.projector(measured));
    let signs = Vector3::from(bob_correction(shared, measured).signs());
    Ok((omega.trace().re, (qubit_bloch(&omega) * 4.0).component_mul(&signs)))
}

/// Affine transfer of the corrected protocol, reconstructed from the inputs
/// `0, x̂, ŷ, ẑ`.
pub fn effective_transfer(
    channel: &TwoQubitChannel,
    shared: BellLabel,
    measured: BellLabel,
    r: f64,
    mode: AveragingMode,
) -> Result<ChannelTransfer> {
    let (p0, c) = run_single(channel, [0.0; 3], shared, measured, r)?;
    // Probability is affine in P, so a vanishing sphere average means the
    // outcome cannot occur for any input.
    if !(p0 >= MIN_PROBABILITY) {
        return Err(Error::ImpossibleOutcome { probability: p0 });
    }
    let mut matrix = Matrix3::zeros();
    let mut gradient = Vector3::zeros();
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        let (p, v) = run_single(channel, e, shared, measured, r)?;
        matrix.set_column(k, &(v - c));
        gradient[k] = p - p0;
    }
    Ok(ChannelTransfer {
        matrix,
        offset: c,
        probability: OutcomeProbability { constant: p0, gradient },
        mode,
    })
}

/// `F = ½ (1 + P · P_B)` with `P_B` Bob's corrected Bloch vector.
pub fn fidelity(p_a: &BlochVector, transfer: &ChannelTransfer) -> f64 {
    let p = p_a.vector();
    0.5 * (1.0 + p.dot(&transfer.bob_bloch(p)))
}

/// Fidelity averaged over pure inputs.
///
/// Probability-weighted: `⟨p F⟩ / ⟨p⟩ = ½ + Tr T / (24 p̄)`, which is
/// `½ + Tr T / 6` whenever `p̄ = 1/4`. Conditional: the uniform average,
/// integrated numerically when the outcome probability depends on the input.
pub fn average_fidelity(transfer: &ChannelTransfer) -> f64 {
    match transfer.mode {
        AveragingMode::ProbabilityWeighted => 0.5 + transfer.matrix.trace() / (24.0 * transfer.probability.constant),
        AveragingMode::Conditional => match transfer.conditional_affine() {
            Some((t, _)) => 0.5 + t.trace() / 6.0,
            None => sphere_average(|p| 0.5 * (1.0 + p.dot(&transfer.bob_bloch(p)))),
        },
    }
}

fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order as f64;
    (0..order)
        .map(|i| {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Uniform average over the unit sphere: Gauss–Legendre in `cos θ`,
/// trapezoidal in `φ`.
pub fn sphere_average(f: impl Fn(&Vector3<f64>) -> f64) -> f64 {
    const POLAR: usize = 64;
    const AZIMUTH: usize = 128;
    let mut acc = 0.0;
    for (z, w) in gauss_legendre(POLAR) {
        let s = libm::sqrt(1.0 - z * z);
        for k in 0..AZIMUTH {
            let (sp, cp) = libm::sincos(2.0 * core::f64::consts::PI * k as f64 / AZIMUTH as f64);
            acc += w * f(&Vector3::new(s * cp, s * sp, z));
        }
    }
    acc / (2.0 * AZIMUTH as f64)
}

/// What is teleported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InputState {
    /// Uniform average over pure states.
    SphereAverage,
    Fixed(BlochVector),
}

/// Protocol choices that stay fixed along a time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolSetup {
    pub input: InputState,
    pub shared: BellLabel,
    pub basis: MeasurementBasis,
    pub mode: AveragingMode,
}

impl ProtocolSetup {
    pub fn bell(shared: BellLabel) -> Self {
        Self {
            input: InputState::SphereAverage,
            shared,
            basis: MeasurementBasis::BELL,
            mode: AveragingMode::default(),
        }
    }
}

/// Time series of one measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeSeries {
    pub label: BellLabel,
    /// Fidelity of the configured input; equals `average_fidelity` when the
    /// input is the sphere average.
    pub fidelity: Vec<f64>,
    pub average_fidelity: Vec<f64>,
    /// Outcome probability for the configured input (sphere-averaged for
    /// [`InputState::SphereAverage`]).
    pub probability: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelitySeries {
    /// Dimensionless times `Kt`.
    pub times: Vec<f64>,
    /// One entry per outcome in [`BellLabel::ALL`] order.
    pub outcomes: Vec<OutcomeSeries>,
    pub setup: ProtocolSetup,
    pub couplings: CouplingConfig,
    pub spins: u32,
    pub model: PolarizationModel,
}

impl FidelitySeries {
    pub fn outcome(&self, label: BellLabel) -> &OutcomeSeries {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .expect("every outcome is recorded")
    }
}

/// Runs the protocol for every outcome on a grid of `Kt` values.
pub fn run_protocol(propagator: &BathPropagator, setup: &ProtocolSetup, times_kt: &[f64]) -> Result<FidelitySeries> {
    let mut outcomes: Vec<OutcomeSeries> = BellLabel::ALL
        .into_iter()
        .map(|label| OutcomeSeries {
            label,
            fidelity: Vec::with_capacity(times_kt.len()),
            average_fidelity: Vec::with_capacity(times_kt.len()),
            probability: Vec::with_capacity(times_kt.len()),
        })
        .collect();
    for &kt in times_kt {
        let channel = propagator.channel_at_kt(kt);
        for series in &mut outcomes {
            let transfer = effective_transfer(&channel, setup.shared, series.label, setup.basis.r(), setup.mode)?;
            let f_av = average_fidelity(&transfer);
            let (f, p) = match setup.input {
                InputState::SphereAverage => (f_av, transfer.probability.constant),
                InputState::Fixed(ref v) => (fidelity(v, &transfer), transfer.probability.at(v.vector())),
            };
            series.fidelity.push(f);
            series.average_fidelity.push(f_av);
            series.probability.push(p);
        }
    }
    Ok(FidelitySeries {
        times: times_kt.to_vec(),
        outcomes,
        setup: *setup,
        couplings: propagator.couplings(),
        spins: propagator.spins(),
        model: propagator.model(),
    })
}

/// Builds the propagator for `bath` and runs [`run_protocol`].
pub fn run_protocol_for(
    bath: &BathSpec,
    couplings: CouplingConfig,
    setup: &ProtocolSetup,
    times_kt: &[f64],
) -> Result<FidelitySeries> {
    run_protocol(&BathPropagator::new(bath, couplings)?, setup, times_kt)
}

/// `4ω` for an ideal (decoherence-free) run; used by tests and examples.
pub fn ideal_bob_operator(p_a: [f64; 3], shared: BellLabel, measured: BellLabel, r: f64) -> Result<CMatrix> {
    let rho = initial_joint_state(p_a, shared)?;
    let projector = MeasurementBasis::new(r)?.projector(measured);
    Ok(bob_operator(&rho, &projector) * Complex64::new(4.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn ideal(shared: BellLabel, measured: BellLabel, r: f64, mode: AveragingMode) -> ChannelTransfer {
        effective_transfer(&TwoQubitChannel::identity(0.0), shared, measured, r, mode).unwrap()
    }

    #[test]
    fn ideal_outcomes_have_quarter_probability() {
        let rho = initial_joint_state([0.3, -0.5, 0.1], BellLabel::S0).unwrap();
        let mut total = 0.0;
        for label in BellLabel::ALL {
            let out = project_measurement(&rho, label, 1.0, AveragingMode::Conditional).unwrap();
            assert!((out.probability - 0.25).abs() < 1e-15);
            total += out.probability;
        }
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_basis_outcome() {
        // Worked by hand: ρ_a = |↑⟩⟨↑|, pair in the singlet, outcome |↑↓⟩ on (a, A)
        // leaves A in |↓⟩ and therefore B in |↑⟩, with probability 1/2.
        let rho = initial_joint_state([0.0, 0.0, 1.0], BellLabel::S0).unwrap();
        let out = project_measurement(&rho, BellLabel::S0, 0.0, AveragingMode::Conditional).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert!((out.bob_state - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn probabilities_sum_to_one_for_deformed_basis() {
        let rho = initial_joint_state([0.6, 0.0, -0.8], BellLabel::TMinus).unwrap();
        for r in [0.0, 0.3, 1.0, 2.5] {
            let total: f64 = BellLabel::ALL
                .into_iter()
                .map(|l| {
                    project_measurement(&rho, l, r, AveragingMode::ProbabilityWeighted)
                        .unwrap()
                        .probability
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn impossible_outcome() {
        // |↓⟩ input with the singlet pair never yields |↑↓⟩ on (a, A).
        let rho = initial_joint_state([0.0, 0.0, -1.0], BellLabel::S0).unwrap();
        assert!(matches!(
            project_measurement(&rho, BellLabel::S0, 0.0, AveragingMode::Conditional),
            Err(Error::ImpossibleOutcome { .. })
        ));
    }

    #[test]
    fn corrections() {
        assert_eq!(bob_correction(BellLabel::S0, BellLabel::S0), PauliCorrection::Identity);
        assert_eq!(bob_correction(BellLabel::S0, BellLabel::T0).signs(), [-1.0, -1.0, 1.0]);
        assert_eq!(bob_correction(BellLabel::S0, BellLabel::T0), PauliCorrection::Z);
        assert_eq!(
            bob_correction(BellLabel::S0, BellLabel::TPlus).signs(),
            [-1.0, 1.0, -1.0]
        );
        assert_eq!(bob_correction(BellLabel::S0, BellLabel::TPlus), PauliCorrection::Y);
    }

    #[test]
    fn correction_matches_conjugation() {
        // The sign rule agrees with conjugating Bob's qubit by the Pauli matrix.
        let v = Vector3::new(0.2, -0.4, 0.7);
        for c in PauliCorrection::ALL {
            let rho = crate::state::qubit_density(&v);
            let m = c.matrix();
            let out = qubit_bloch(&(&m * rho * &m));
            let expected = v.component_mul(&Vector3::from(c.signs()));
            assert!((out - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn ideal_transfer_is_identity() {
        for shared in BellLabel::ALL {
            for measured in BellLabel::ALL {
                for mode in [AveragingMode::Conditional, AveragingMode::ProbabilityWeighted] {
                    let t = ideal(shared, measured, 1.0, mode);
                    assert!((t.matrix - Matrix3::identity()).norm() < 1e-14);
                    assert!(t.offset.norm() < 1e-14);
                    assert!((average_fidelity(&t) - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let mut t = ChannelTransfer::identity(AveragingMode::ProbabilityWeighted);
        for p in [BlochVector::X, BlochVector::Z, BlochVector::from_angles(1.1, 0.3)] {
            assert!((fidelity(&p, &t) - 1.0).abs() < 1e-15);
        }
        t.matrix = Matrix3::zeros();
        assert_eq!(fidelity(&BlochVector::Y, &t), 0.5);
        t.matrix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert_eq!(fidelity(&BlochVector::Z, &t), 0.0);
    }

    #[test]
    fn product_basis_average_fidelity() {
        for label in BellLabel::ALL {
            let weighted = ideal(BellLabel::S0, label, 0.0, AveragingMode::ProbabilityWeighted);
            assert!((average_fidelity(&weighted) - 2.0 / 3.0).abs() < 1e-14, "{label}");
            // Renormalizing per outcome collapses Bob onto a fixed pole.
            let conditional = ideal(BellLabel::S0, label, 0.0, AveragingMode::Conditional);
            assert!((average_fidelity(&conditional) - 0.5).abs() < 1e-6, "{label}");
        }
    }

    #[test]
    fn ideal_bob_operator_has_quarter_trace() {
        let w = ideal_bob_operator([0.0, 1.0, 0.0], BellLabel::T0, BellLabel::TPlus, 1.0).unwrap();
        assert!((w.trace().re - 1.0).abs() < 1e-14);
        let expected = crate::state::qubit_density(&Vector3::new(0.0, -1.0, 0.0));
        let corrected = {
            let m = bob_correction(BellLabel::T0, BellLabel::TPlus).matrix();
            &m * &w * &m
        };
        assert!(max_abs_diff(&corrected, &crate::state::qubit_density(&Vector3::new(0.0, 1.0, 0.0))) < 1e-14);
        assert!(max_abs_diff(&w, &expected) < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(16);
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let x4: f64 = nodes.iter().map(|(x, w)| w * x.powi(4)).sum();
        assert!((x4 - 0.4).abs() < 1e-14);
        assert!((sphere_average(|p| p[2] * p[2]) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn mode_names() {
        for m in [AveragingMode::Conditional, AveragingMode::ProbabilityWeighted] {
            assert_eq!(AveragingMode::from_name(m.name()), Some(m));
        }
        assert_eq!(AveragingMode::default(), AveragingMode::ProbabilityWeighted);
    }
}
