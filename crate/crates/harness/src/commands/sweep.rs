//! Long-format sweep over inhomogeneity, basis parameter, outcome and mode.

use rayon::prelude::*;
use serde::Serialize;
use spinbath_core::analytics::{partial_basis_prediction, quadratic_decay_fit, DEFAULT_FIT_HORIZON};
use spinbath_core::evolution::CouplingConfig;
use spinbath_core::protocol::{run_protocol, AveragingMode, FidelitySeries, ProtocolSetup};
use spinbath_core::state::MeasurementBasis;

use crate::config::{BathKind, RunConfig, Settings};
use crate::engine::build_propagator;
use crate::error::Result;
use crate::output::{num, Table};

pub const COLUMNS: [&str; 8] = ["delta", "r", "label", "mode", "kt", "f_av", "fidelity", "probability"];

pub fn defaults() -> RunConfig {
    RunConfig::defaults()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepFit {
    pub delta: f64,
    pub r: f64,
    pub label: &'static str,
    pub mode: &'static str,
    /// Fitted coefficient of `(Kt)²` in `1 − F_av`; absent when the grid has
    /// too few points below the horizon.
    pub coefficient: Option<f64>,
    pub residual: Option<f64>,
    /// Leading-order prediction, given for unpolarized baths in weighted mode.
    pub predicted: Option<f64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepSummary {
    pub fit_horizon_kt: f64,
    pub fits: Vec<SweepFit>,
}

pub fn run(settings: &Settings) -> Result<(Table, SweepSummary)> {
    let bath = settings.bath_spec()?;
    let times = settings.grid.times();
    let runs: Vec<Vec<(f64, f64, AveragingMode, FidelitySeries)>> = settings
        .deltas
        .par_iter()
        .map(|&delta| {
            let couplings = CouplingConfig::from_inhomogeneity(delta, 1.0)?;
            let propagator = build_propagator(&bath, couplings)?;
            let mut out = Vec::new();
            for &r in &settings.rs {
                for &mode in &settings.modes {
                    let setup = ProtocolSetup {
                        input: settings.input,
                        shared: settings.shared,
                        basis: MeasurementBasis::new(r)?,
                        mode,
                    };
                    out.push((delta, r, mode, run_protocol(&propagator, &setup, &times)?));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(COLUMNS.to_vec());
    let mut fits = Vec::new();
    for (delta, r, mode, series) in runs.iter().flatten() {
        for &label in &settings.labels {
            let outcome = series.outcome(label);
            for (k, kt) in times.iter().enumerate() {
                table.push(vec![
                    num(*delta),
                    num(*r),
                    label.name().to_string(),
                    mode.name().to_string(),
                    num(*kt),
                    num(outcome.average_fidelity[k]),
                    num(outcome.fidelity[k]),
                    num(outcome.probability[k]),
                ]);
            }
            let fit = quadratic_decay_fit(&times, &outcome.average_fidelity, DEFAULT_FIT_HORIZON).ok();
            let predicted = (settings.bath == BathKind::Unpolarized && *mode == AveragingMode::ProbabilityWeighted)
                .then(|| partial_basis_prediction(*r, series.couplings, settings.spins, label).coefficient);
            fits.push(SweepFit {
                delta: *delta,
                r: *r,
                label: label.name(),
                mode: mode.name(),
                coefficient: fit.map(|f| f.coefficient),
                residual: fit.map(|f| f.residual),
                predicted,
            });
        }
    }
    Ok((
        table,
        SweepSummary {
            fit_horizon_kt: DEFAULT_FIT_HORIZON,
            fits,
        },
    ))
}
