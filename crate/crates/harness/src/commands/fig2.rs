//! Fidelity of fixed inputs parallel and perpendicular to a polarized bath.

use serde::Serialize;
use spinbath_core::protocol::{effective_transfer, run_protocol, InputState, ProtocolSetup};
use spinbath_core::state::BlochVector;

use crate::config::{BathKind, RunConfig, Settings};
use crate::engine::build_propagator;
use crate::error::Result;
use crate::output::{num, Table};

pub const COLUMNS: [&str; 5] = ["kt", "f_parallel", "f_perpendicular", "p_parallel", "p_perpendicular"];

/// Classical limit for teleporting an unknown pure state.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

pub fn defaults() -> RunConfig {
    RunConfig::defaults().layered(RunConfig {
        bath: Some(BathKind::Polarized),
        mode: Some("conditional".into()),
        ..Default::default()
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Fig2Summary {
    pub min_parallel: f64,
    pub min_perpendicular: f64,
    pub final_parallel: f64,
    pub final_perpendicular: f64,
    pub perpendicular_above_limit: bool,
    pub parallel_dips_below_limit: bool,
    /// Largest `|c|` of the corrected protocol over the grid.
    pub max_offset_norm: f64,
}

pub fn run(settings: &Settings) -> Result<(Table, Fig2Summary)> {
    let propagator = build_propagator(&settings.bath_spec()?, settings.couplings)?;
    let times = settings.grid.times();
    let series = |input: BlochVector| {
        let setup = ProtocolSetup {
            input: InputState::Fixed(input),
            shared: settings.shared,
            basis: settings.basis,
            mode: settings.mode,
        };
        run_protocol(&propagator, &setup, &times).map(|s| s.outcome(settings.measured).clone())
    };
    let parallel = series(BlochVector::Z)?;
    let perpendicular = series(BlochVector::X)?;

    let mut max_offset: f64 = 0.0;
    for &kt in &times {
        let channel = propagator.channel_at_kt(kt);
        let t = effective_transfer(
            &channel,
            settings.shared,
            settings.measured,
            settings.basis.r(),
            settings.mode,
        )?;
        max_offset = max_offset.max(t.offset.norm());
    }

    let mut table = Table::new(COLUMNS.to_vec());
    for (k, kt) in times.iter().enumerate() {
        table.push(vec![
            num(*kt),
            num(parallel.fidelity[k]),
            num(perpendicular.fidelity[k]),
            num(parallel.probability[k]),
            num(perpendicular.probability[k]),
        ]);
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let (min_par, min_perp) = (min(&parallel.fidelity), min(&perpendicular.fidelity));
    let summary = Fig2Summary {
        min_parallel: min_par,
        min_perpendicular: min_perp,
        final_parallel: *parallel.fidelity.last().unwrap_or(&f64::NAN),
        final_perpendicular: *perpendicular.fidelity.last().unwrap_or(&f64::NAN),
        perpendicular_above_limit: min_perp > CLASSICAL_LIMIT,
        parallel_dips_below_limit: min_par < CLASSICAL_LIMIT,
        max_offset_norm: max_offset,
    };
    Ok((table, summary))
}
