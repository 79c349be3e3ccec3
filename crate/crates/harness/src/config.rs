//! Run configuration: a JSON file plus command-line overrides, merged over
//! per-command defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinbath_core::evolution::CouplingConfig;
use spinbath_core::protocol::{AveragingMode, InputState};
use spinbath_core::spin::{BathSpec, PolarizationModel, MAX_BATH_SPINS};
use spinbath_core::state::{BellLabel, BlochVector, MeasurementBasis};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BathKind {
    Unpolarized,
    Polarized,
}

impl BathKind {
    pub fn model(self) -> PolarizationModel {
        match self {
            BathKind::Unpolarized => PolarizationModel::UnpolarizedIdentity,
            BathKind::Polarized => PolarizationModel::PolarizedGaussianI2,
        }
    }
}

/// Every field is optional so that files and flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ka: Option<f64>,
    #[serde(rename = "kA", skip_serializing_if = "Option::is_none")]
    pub k_pair: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_steps: Option<usize>,
    /// `"sphere"` or a Bloch vector `"x,y,z"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

macro_rules! layer {
    ($base:ident, $top:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| HarnessError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Fields set in `top` win.
    pub fn layered(self, top: RunConfig) -> RunConfig {
        let base = self;
        layer!(base, top; n, ka, k_pair, bath, shared, measured, r, mode, t_start, t_max, t_steps, input,
            deltas, rs, labels, modes, seed, out)
    }

    /// Shared defaults; individual commands override some of them.
    pub fn defaults() -> Self {
        RunConfig {
            n: Some(22),
            ka: Some(1.0),
            k_pair: Some(-1.0),
            bath: Some(BathKind::Unpolarized),
            shared: Some("s0".into()),
            measured: Some("s0".into()),
            r: Some(1.0),
            mode: Some(AveragingMode::ProbabilityWeighted.name().into()),
            t_start: Some(0.0),
            t_max: Some(3.0),
            t_steps: Some(301),
            input: Some("sphere".into()),
            deltas: Some(vec![-1.0, 0.0, 1.0]),
            rs: Some(vec![1.0]),
            labels: Some(BellLabel::ALL.iter().map(|l| l.name().to_string()).collect()),
            modes: Some(vec![AveragingMode::ProbabilityWeighted.name().into()]),
            seed: Some(0),
            out: None,
        }
    }

    pub fn resolve(&self) -> Result<Settings> {
        fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
            v.clone()
                .ok_or_else(|| HarnessError::config(format!("missing value for {name}")))
        }
        let spins = need(&self.n, "n")?;
        if spins == 0 || spins > MAX_BATH_SPINS {
            return Err(HarnessError::config(format!(
                "n must be in 1..={MAX_BATH_SPINS}, got {spins}"
            )));
        }
        let (ka, kp) = (need(&self.ka, "ka")?, need(&self.k_pair, "kA")?);
        if !ka.is_finite() || !kp.is_finite() {
            return Err(HarnessError::config("couplings must be finite"));
        }
        let r = need(&self.r, "r")?;
        let basis = MeasurementBasis::new(r)
            .map_err(|_| HarnessError::config(format!("r must be finite and >= 0, got {r}")))?;
        let grid = TimeGrid::new(
            need(&self.t_start, "t_start")?,
            need(&self.t_max, "t_max")?,
            need(&self.t_steps, "t_steps")?,
        )?;
        let rs = need(&self.rs, "rs")?;
        if let Some(bad) = rs.iter().find(|r| MeasurementBasis::new(**r).is_err()) {
            return Err(HarnessError::config(format!("r must be finite and >= 0, got {bad}")));
        }
        let deltas = need(&self.deltas, "deltas")?;
        if let Some(bad) = deltas.iter().find(|d| !(-1.0..=1.0).contains(*d)) {
            return Err(HarnessError::config(format!(
                "inhomogeneity must lie in [-1, 1], got {bad}"
            )));
        }
        Ok(Settings {
            spins,
            couplings: CouplingConfig::new(ka, kp),
            bath: need(&self.bath, "bath")?,
            shared: parse_label(&need(&self.shared, "shared")?)?,
            measured: parse_label(&need(&self.measured, "measured")?)?,
            basis,
            mode: parse_mode(&need(&self.mode, "mode")?)?,
            grid,
            input: parse_input(&need(&self.input, "input")?)?,
            deltas,
            rs,
            labels: need(&self.labels, "labels")?
                .iter()
                .map(|l| parse_label(l))
                .collect::<Result<_>>()?,
            modes: need(&self.modes, "modes")?
                .iter()
                .map(|m| parse_mode(m))
                .collect::<Result<_>>()?,
            seed: need(&self.seed, "seed")?,
            out: self.out.clone(),
        })
    }
}

pub fn parse_label(s: &str) -> Result<BellLabel> {
    BellLabel::from_name(s).ok_or_else(|| HarnessError::config(format!("unknown Bell label {s:?}")))
}

pub fn parse_mode(s: &str) -> Result<AveragingMode> {
    AveragingMode::from_name(s).ok_or_else(|| HarnessError::config(format!("unknown averaging mode {s:?}")))
}

pub fn parse_input(s: &str) -> Result<InputState> {
    let t = s.trim().to_ascii_lowercase();
    if t == "sphere" || t == "average" {
        return Ok(InputState::SphereAverage);
    }
    let parts: Vec<f64> = t
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| HarnessError::config(format!("input must be \"sphere\" or \"x,y,z\", got {s:?}")))?;
    let [x, y, z] = parts[..] else {
        return Err(HarnessError::config(format!(
            "input must have three components, got {s:?}"
        )));
    };
    BlochVector::new(x, y, z)
        .map(InputState::Fixed)
        .map_err(|_| HarnessError::config(format!("input {s:?} lies outside the Bloch ball")))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(HarnessError::config(format!(
                "time grid needs at least 2 points, got {count}"
            )));
        }
        if !(start.is_finite() && stop.is_finite() && stop > start && start >= 0.0) {
            return Err(HarnessError::config(format!(
                "time grid must satisfy 0 <= start < stop, got [{start}, {stop}]"
            )));
        }
        Ok(Self { start, stop, count })
    }

    /// `Kt` values, evenly spaced and strictly increasing.
    pub fn times(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + span * k as f64 / last).collect()
    }
}

/// Fully resolved run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub spins: u32,
    pub couplings: CouplingConfig,
    pub bath: BathKind,
    pub shared: BellLabel,
    pub measured: BellLabel,
    pub basis: MeasurementBasis,
    pub mode: AveragingMode,
    pub grid: TimeGrid,
    pub input: InputState,
    pub deltas: Vec<f64>,
    pub rs: Vec<f64>,
    pub labels: Vec<BellLabel>,
    pub modes: Vec<AveragingMode>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn bath_spec(&self) -> Result<BathSpec> {
        Ok(BathSpec::new(self.spins, self.bath.model())?)
    }
}
