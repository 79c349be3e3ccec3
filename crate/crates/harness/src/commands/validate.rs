//! Invariant suites with a machine-readable report.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spinbath_core::analytics::{bell_decay_rate, quadratic_decay_fit};
use spinbath_core::evolution::{extract_fg, CouplingConfig};
use spinbath_core::linalg::{max_abs_diff, CMatrix};
use spinbath_core::oracle::FullSpaceOracle;
use spinbath_core::protocol::{
    average_fidelity, effective_transfer, fidelity, run_protocol, AveragingMode, ProtocolSetup,
};
use spinbath_core::spin::{sector_multiplicity, sectors, BathSpec, PolarizationModel};
use spinbath_core::state::{BellLabel, BlochVector};

use crate::engine::build_propagator;
use crate::error::Result;

/// Deliberate defects used to check that the suites can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// The engine receives `−K_A` instead of `K_A`.
    FlipPairSign,
}

impl Fault {
    fn engine_couplings(self, c: CouplingConfig) -> CouplingConfig {
        match self {
            Fault::None => c,
            Fault::FlipPairSign => CouplingConfig::new(c.k_input, -c.k_pair),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub invariant: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Suite {
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub fault: Fault,
    pub passed: bool,
    pub suites: Vec<Suite>,
}

impl Report {
    pub fn suite(&self, name: &str) -> Option<&Suite> {
        self.suites.iter().find(|s| s.name == name)
    }
}

struct SuiteBuilder {
    name: &'static str,
    checks: Vec<Check>,
}

impl SuiteBuilder {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, invariant: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            invariant: invariant.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        });
    }

    fn finish(self) -> Suite {
        Suite {
            name: self.name,
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
        }
    }
}

pub const SUITES: [&str; 5] = [
    "weight-sum",
    "oracle-agreement",
    "short-time",
    "dark-subspace",
    "monte-carlo",
];

pub fn run(seed: u64, fault: Fault) -> Result<Report> {
    let suites = vec![
        weight_sum()?,
        oracle_agreement(seed, fault)?,
        short_time(fault)?,
        dark_subspace(fault)?,
        monte_carlo(seed, fault)?,
    ];
    Ok(Report {
        schema_version: crate::output::SCHEMA_VERSION,
        tool: "spinbath",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        fault,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn weight_sum() -> Result<Suite> {
    let mut suite = SuiteBuilder::new("weight-sum");
    let (mut completeness, mut moment, mut float_sum): (u128, u128, f64) = (0, 0, 0.0);
    for n in 1..=24u32 {
        let total = 1u128 << n;
        let (mut states, mut casimir4) = (0u128, 0u128);
        for spin in sectors(n) {
            let g = sector_multiplicity(n, spin)?;
            let tw = spin.twice() as u128;
            states += g * (tw + 1);
            casimir4 += g * (tw + 1) * tw * (tw + 2);
        }
        completeness = completeness.max(states.abs_diff(total));
        // 4 Σ λ I(I+1) · 2^N = 3N · 2^N
        moment = moment.max(casimir4.abs_diff(3 * n as u128 * total));
        for model in [
            PolarizationModel::UnpolarizedIdentity,
            PolarizationModel::PolarizedGaussianI2,
        ] {
            float_sum = float_sum.max((BathSpec::new(n, model)?.weight_sum() - 1.0).abs());
        }
    }
    suite.check("sum_I g(N,I)(2I+1) = 2^N, N <= 24", completeness as f64, 0.0);
    suite.check("sum_I lambda_I I(I+1) = 3N/4 (exact), N <= 24", moment as f64, 0.0);
    suite.check("sum_I lambda_I = 1, both bath models", float_sum, 1e-12);
    Ok(suite.finish())
}

fn random_density(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn oracle_agreement(seed: u64, fault: Fault) -> Result<Suite> {
    let mut suite = SuiteBuilder::new("oracle-agreement");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [2u32, 4, 6] {
        for model in [
            PolarizationModel::UnpolarizedIdentity,
            PolarizationModel::PolarizedGaussianI2,
        ] {
            let bath = BathSpec::new(n, model)?;
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let couplings = CouplingConfig::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let oracle = FullSpaceOracle::new(&bath, couplings)?;
                let engine = build_propagator(&bath, fault.engine_couplings(couplings))?;
                for _ in 0..5 {
                    let t = rng.gen_range(0.0..3.0) / couplings.magnitude();
                    let rho = random_density(&mut rng, 8);
                    worst = worst.max(max_abs_diff(
                        &engine.channel(t).apply_to_joint(&rho),
                        &oracle.evolve(&rho, t),
                    ));
                }
            }
            suite.check(format!("sector engine = full space, N={n}, {model:?}"), worst, 1e-10);
        }
    }
    Ok(suite.finish())
}

fn short_time(fault: Fault) -> Result<Suite> {
    let mut suite = SuiteBuilder::new("short-time");
    let bath = BathSpec::unpolarized(22)?;
    let times: Vec<f64> = (0..=10).map(|k| 0.005 * k as f64).collect();
    for delta in [-1.0, 0.0, 0.5] {
        let couplings = CouplingConfig::from_inhomogeneity(delta, 1.0)?;
        let propagator = build_propagator(&bath, fault.engine_couplings(couplings))?;
        let series = run_protocol(&propagator, &ProtocolSetup::bell(BellLabel::S0), &times)?;
        let mut fitted = [0.0; 2];
        for (i, label) in [BellLabel::S0, BellLabel::T0].into_iter().enumerate() {
            let fit = quadratic_decay_fit(&times, &series.outcome(label).average_fidelity, 0.05)?;
            let predicted = bell_decay_rate(delta, 22, label);
            fitted[i] = fit.coefficient;
            suite.check(
                format!("1/tau^2 fit vs prediction, N=22, delta={delta}, {label}"),
                ((fit.coefficient - predicted) / predicted).abs(),
                0.02,
            );
        }
        if delta == -1.0 {
            suite.check(
                "tau_T^2 / tau_S0^2 = 3 at delta=-1",
                (fitted[0] / fitted[1] / 3.0 - 1.0).abs(),
                0.03,
            );
        }
    }
    Ok(suite.finish())
}

fn dark_subspace(fault: Fault) -> Result<Suite> {
    let mut suite = SuiteBuilder::new("dark-subspace");
    let couplings = CouplingConfig::new(1.0, 1.0);
    let propagator = build_propagator(&BathSpec::unpolarized(22)?, fault.engine_couplings(couplings))?;
    let times: Vec<f64> = (0..=60).map(|k| 0.05 * k as f64).collect();
    let series = run_protocol(&propagator, &ProtocolSetup::bell(BellLabel::S0), &times)?;
    let singlet = series.outcome(BellLabel::S0);
    let dev = |v: &[f64], target: f64| v.iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
    suite.check(
        "singlet F_av = 1 for K_a = K_A, N=22",
        dev(&singlet.average_fidelity, 1.0),
        1e-10,
    );
    suite.check(
        "singlet probability = 1/4 for K_a = K_A, N=22",
        dev(&singlet.probability, 0.25),
        1e-10,
    );
    let fg = times
        .iter()
        .map(|&kt| {
            let fg = extract_fg(&propagator.channel_at_kt(kt));
            (fg.f + 3.0 * fg.g - 1.0).abs()
        })
        .fold(0.0, f64::max);
    suite.check("f + 3g = 1 for K_a = K_A", fg, 1e-10);
    Ok(suite.finish())
}

fn monte_carlo(seed: u64, fault: Fault) -> Result<Suite> {
    let mut suite = SuiteBuilder::new("monte-carlo");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let couplings = CouplingConfig::new(0.8, -0.6);
    let propagator = build_propagator(&BathSpec::unpolarized(6)?, fault.engine_couplings(couplings))?;
    let channel = propagator.channel_at_kt(1.2);
    let samples = 20_000;
    for label in BellLabel::ALL {
        let weighted = effective_transfer(&channel, BellLabel::S0, label, 0.5, AveragingMode::ProbabilityWeighted)?;
        let conditional = effective_transfer(&channel, BellLabel::S0, label, 0.5, AveragingMode::Conditional)?;
        let (mut num, mut den, mut sq) = (0.0, 0.0, 0.0);
        for _ in 0..samples {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            let p = BlochVector::new(s * phi.cos(), s * phi.sin(), z)?;
            let prob = conditional.probability.at(p.vector());
            let pf = prob * fidelity(&p, &conditional);
            num += pf;
            den += prob;
            sq += pf * pf;
        }
        let n = samples as f64;
        let sigma = ((sq / n - (num / n).powi(2)) / n).sqrt() / (den / n);
        let z_score = (average_fidelity(&weighted) - num / den).abs() / sigma.max(1e-15);
        suite.check(
            format!("weighted F_av = <pF>/<p> (z-score), outcome {label}"),
            z_score,
            5.0,
        );
    }
    Ok(suite.finish())
}
