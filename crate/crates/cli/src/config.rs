//! Scenario configuration: strict JSON schema, defaults and validation.
//!
//! ```json
//! {
//!   "params": { "nEff": 5e4, "g0": 6.28e7, "deltaCA": 6.28e11, "kappa": 6.28e6, "omegaZ": 2.5e5 },
//!   "scenario": "bands",
//!   "bands": { "depth": 2.0 },
//!   "output": "out/bands"
//! }
//! ```
//!
//! Frequencies are rad/s unless the loader is told to read them as Hz, in
//! which case every frequency field (params and scenario blocks) is scaled
//! by 2π on load. Detunings inside sweep/map/backaction blocks are in units
//! of κ and are never scaled.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use optomech_core::lattice::{DEFAULT_CUTOFF, DEFAULT_N_BANDS, DEFAULT_Q_GRID};
use optomech_core::statics::SweepDirection;
use optomech_core::SystemParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SWEEP_POINTS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Bands,
    Weights,
    Sweep,
    Map,
    Backaction,
    Granularity,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Bands,
        ScenarioKind::Weights,
        ScenarioKind::Sweep,
        ScenarioKind::Map,
        ScenarioKind::Backaction,
        ScenarioKind::Granularity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Bands => "bands",
            ScenarioKind::Weights => "weights",
            ScenarioKind::Sweep => "sweep",
            ScenarioKind::Map => "map",
            ScenarioKind::Backaction => "backaction",
            ScenarioKind::Granularity => "granularity",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_cutoff() -> usize {
    DEFAULT_CUTOFF
}
fn default_q_grid() -> usize {
    DEFAULT_Q_GRID
}
fn default_n_bands() -> usize {
    DEFAULT_N_BANDS
}
fn default_sweep_points() -> usize {
    DEFAULT_SWEEP_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BandsConfig {
    /// Lattice depth, E_r.
    pub depth: f64,
    #[serde(default = "default_q_grid")]
    pub q_grid: usize,
    #[serde(default = "default_n_bands")]
    pub n_bands: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WeightsConfig {
    /// Lattice depths, E_r.
    pub depths: Vec<f64>,
    #[serde(default = "default_n_bands")]
    pub n_bands: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDirections {
    Up,
    Down,
    Both,
}

impl SweepDirections {
    pub fn directions(&self) -> Vec<SweepDirection> {
        match self {
            SweepDirections::Up => vec![SweepDirection::Up],
            SweepDirections::Down => vec![SweepDirection::Down],
            SweepDirections::Both => vec![SweepDirection::Up, SweepDirection::Down],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepConfig {
    pub n_max: f64,
    /// Detuning range, units of κ.
    pub delta_min: f64,
    pub delta_max: f64,
    #[serde(default = "default_sweep_points")]
    pub points: usize,
    pub direction: SweepDirections,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MapConfig {
    /// Units of κ.
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub n_max_min: f64,
    pub n_max_max: f64,
    pub n_max_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BackactionConfig {
    /// Units of κ.
    pub delta_min: f64,
    pub delta_max: f64,
    #[serde(default = "default_sweep_points")]
    pub points: usize,
    pub mean_photons: f64,
    /// Replaces `params.omegaZ` for this scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GranularityConfig {
    /// Atom-cavity detunings Δ_ca.
    pub detunings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioBlock {
    Bands(BandsConfig),
    Weights(WeightsConfig),
    Sweep(SweepConfig),
    Map(MapConfig),
    Backaction(BackactionConfig),
    Granularity(GranularityConfig),
}

impl ScenarioBlock {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioBlock::Bands(_) => ScenarioKind::Bands,
            ScenarioBlock::Weights(_) => ScenarioKind::Weights,
            ScenarioBlock::Sweep(_) => ScenarioKind::Sweep,
            ScenarioBlock::Map(_) => ScenarioKind::Map,
            ScenarioBlock::Backaction(_) => ScenarioKind::Backaction,
            ScenarioBlock::Granularity(_) => ScenarioKind::Granularity,
        }
    }
}

/// On-disk layout; exactly one of the scenario blocks may be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawConfig {
    params: SystemParams,
    scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bands: Option<BandsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<WeightsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<MapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    backaction: Option<BackactionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    granularity: Option<GranularityConfig>,
    output: String,
}

/// A validated scenario with defaults applied and all frequencies in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: SystemParams,
    pub block: ScenarioBlock,
    pub output: String,
}

impl ScenarioConfig {
    pub fn kind(&self) -> ScenarioKind {
        self.block.kind()
    }

    pub fn from_json_str(text: &str, hz: bool) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_raw(raw, hz)
    }

    pub fn from_json_value(value: serde_json::Value, hz: bool) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_raw(raw, hz)
    }

    /// The fully resolved config in the on-disk schema (rad/s, defaults filled).
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut raw = RawConfig {
            params: self.params,
            scenario: self.kind(),
            bands: None,
            weights: None,
            sweep: None,
            map: None,
            backaction: None,
            granularity: None,
            output: self.output.clone(),
        };
        match &self.block {
            ScenarioBlock::Bands(b) => raw.bands = Some(b.clone()),
            ScenarioBlock::Weights(b) => raw.weights = Some(b.clone()),
            ScenarioBlock::Sweep(b) => raw.sweep = Some(b.clone()),
            ScenarioBlock::Map(b) => raw.map = Some(b.clone()),
            ScenarioBlock::Backaction(b) => raw.backaction = Some(b.clone()),
            ScenarioBlock::Granularity(b) => raw.granularity = Some(b.clone()),
        }
        serde_json::to_value(raw).expect("config serializes")
    }

    fn from_raw(mut raw: RawConfig, hz: bool) -> Result<Self, CliError> {
        let present: Vec<ScenarioKind> = [
            raw.bands.is_some().then_some(ScenarioKind::Bands),
            raw.weights.is_some().then_some(ScenarioKind::Weights),
            raw.sweep.is_some().then_some(ScenarioKind::Sweep),
            raw.map.is_some().then_some(ScenarioKind::Map),
            raw.backaction.is_some().then_some(ScenarioKind::Backaction),
            raw.granularity.is_some().then_some(ScenarioKind::Granularity),
        ]
        .into_iter()
        .flatten()
        .collect();
        if present != [raw.scenario] {
            let listed: Vec<&str> = present.iter().map(|k| k.as_str()).collect();
            return Err(CliError::Config(format!(
                "scenario `{}` requires exactly one matching `{}` block, found [{}]",
                raw.scenario,
                raw.scenario,
                listed.join(", ")
            )));
        }

        if hz {
            let p = &mut raw.params;
            for f in [&mut p.g0, &mut p.delta_ca, &mut p.kappa, &mut p.omega_z] {
                *f *= 2.0 * PI;
            }
            if let Some(b) = raw.backaction.as_mut() {
                if let Some(w) = b.omega_z.as_mut() {
                    *w *= 2.0 * PI;
                }
            }
            if let Some(g) = raw.granularity.as_mut() {
                g.detunings.iter_mut().for_each(|d| *d *= 2.0 * PI);
            }
        }

        raw.params
            .validate()
            .map_err(|e| CliError::Config(format!("params: {e}")))?;
        if raw.params.n_eff == 0.0 {
            return Err(CliError::Config(
                "params: invalid parameter `nEff`: must be > 0 for a collective mode".into(),
            ));
        }
        if raw.output.is_empty() {
            return Err(CliError::Config("`output` must be a nonempty path prefix".into()));
        }

        let block = match raw.scenario {
            ScenarioKind::Bands => ScenarioBlock::Bands(raw.bands.take().unwrap()),
            ScenarioKind::Weights => ScenarioBlock::Weights(raw.weights.take().unwrap()),
            ScenarioKind::Sweep => ScenarioBlock::Sweep(raw.sweep.take().unwrap()),
            ScenarioKind::Map => ScenarioBlock::Map(raw.map.take().unwrap()),
            ScenarioKind::Backaction => ScenarioBlock::Backaction(raw.backaction.take().unwrap()),
            ScenarioKind::Granularity => ScenarioBlock::Granularity(raw.granularity.take().unwrap()),
        };
        validate_block(&block)?;
        Ok(ScenarioConfig {
            params: raw.params,
            block,
            output: raw.output,
        })
    }
}

fn bad(field: &str, reason: impl fmt::Display) -> CliError {
    CliError::Config(format!("invalid `{field}`: {reason}"))
}

fn check_range(block: &str, lo_name: &str, lo: f64, hi_name: &str, hi: f64) -> Result<(), CliError> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(bad(&format!("{block}.{lo_name}"), "range bounds must be finite"));
    }
    if lo > hi {
        return Err(bad(
            &format!("{block}.{lo_name}"),
            format!("{lo_name} = {lo} exceeds {hi_name} = {hi}"),
        ));
    }
    Ok(())
}

fn check_points(field: &str, points: usize, lo: f64, hi: f64, min: usize) -> Result<(), CliError> {
    if points < min {
        return Err(bad(field, format!("needs at least {min} points, got {points}")));
    }
    if points == 1 && lo != hi {
        return Err(bad(field, "a single point requires min == max"));
    }
    Ok(())
}

fn check_lattice(block: &str, n_bands: usize, cutoff: usize) -> Result<(), CliError> {
    if cutoff < optomech_core::lattice::MIN_CUTOFF {
        return Err(bad(
            &format!("{block}.cutoff"),
            format!("must be >= {}", optomech_core::lattice::MIN_CUTOFF),
        ));
    }
    if n_bands == 0 || n_bands + 1 > 2 * cutoff {
        return Err(bad(
            &format!("{block}.nBands"),
            format!("must be in 1..={}", 2 * cutoff - 1),
        ));
    }
    Ok(())
}

fn validate_block(block: &ScenarioBlock) -> Result<(), CliError> {
    match block {
        ScenarioBlock::Bands(b) => {
            if !(b.depth >= 0.0 && b.depth.is_finite()) {
                return Err(bad("bands.depth", "must be finite and >= 0"));
            }
            if b.q_grid < 2 {
                return Err(bad("bands.qGrid", "must be >= 2"));
            }
            check_lattice("bands", b.n_bands, b.cutoff)
        }
        ScenarioBlock::Weights(w) => {
            if w.depths.is_empty() {
                return Err(bad("weights.depths", "must be nonempty"));
            }
            if w.depths.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
                return Err(bad("weights.depths", "every depth must be finite and >= 0"));
            }
            if w.n_bands < 3 {
                return Err(bad("weights.nBands", "must be >= 3"));
            }
            check_lattice("weights", w.n_bands, w.cutoff)
        }
        ScenarioBlock::Sweep(s) => {
            check_range("sweep", "deltaMin", s.delta_min, "deltaMax", s.delta_max)?;
            check_points("sweep.points", s.points, s.delta_min, s.delta_max, 2)?;
            if !(s.n_max >= 0.0 && s.n_max.is_finite()) {
                return Err(bad("sweep.nMax", "must be finite and >= 0"));
            }
            Ok(())
        }
        ScenarioBlock::Map(m) => {
            check_range("map", "deltaMin", m.delta_min, "deltaMax", m.delta_max)?;
            check_range("map", "nMaxMin", m.n_max_min, "nMaxMax", m.n_max_max)?;
            check_points("map.deltaPoints", m.delta_points, m.delta_min, m.delta_max, 1)?;
            check_points("map.nMaxPoints", m.n_max_points, m.n_max_min, m.n_max_max, 1)?;
            if m.n_max_min < 0.0 {
                return Err(bad("map.nMaxMin", "must be >= 0"));
            }
            Ok(())
        }
        ScenarioBlock::Backaction(b) => {
            check_range("backaction", "deltaMin", b.delta_min, "deltaMax", b.delta_max)?;
            check_points("backaction.points", b.points, b.delta_min, b.delta_max, 1)?;
            if !(b.mean_photons >= 0.0 && b.mean_photons.is_finite()) {
                return Err(bad("backaction.meanPhotons", "must be finite and >= 0"));
            }
            if let Some(w) = b.omega_z {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(bad("backaction.omegaZ", "must be finite and > 0"));
                }
            }
            Ok(())
        }
        ScenarioBlock::Granularity(g) => {
            if g.detunings.iter().any(|d| *d == 0.0 || !d.is_finite()) {
                return Err(bad(
                    "granularity.detunings",
                    "every detuning must be finite and nonzero",
                ));
            }
            Ok(())
        }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path, hz: bool) -> Result<ScenarioConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::from_json_str(&text, hz)
}

/// Evenly spaced values from `lo` to `hi` inclusive; `[lo]` for one point.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}
