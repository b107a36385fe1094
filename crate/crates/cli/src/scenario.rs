//! Runs one configured scenario and writes `<output>.<scenario>.csv` plus a
//! `<output>.<scenario>.json` sidecar holding the resolved config, the derived
//! collective mode and a short summary.

use std::path::{Path, PathBuf};

use log::info;
use optomech_core::backaction::{sensitivity_backaction_check, spectral_densities, BackactionRates};
use optomech_core::lattice::{band_structure, deep_lattice_gap, excitation_weights, LatticeSpec};
use optomech_core::params::{derive_collective_mode, granularity_scan, GranularityScale};
use optomech_core::statics::{
    bistability_map, linear_schedule, transmission_sweep, DriveCondition, ReducedDrive, SweepDirection,
};
use optomech_core::{CollectiveMode, PhysicalConstants};
use serde_json::{json, Value};

use crate::config::{linspace, ScenarioBlock, ScenarioConfig};
use crate::csv::{emit_csv, Dataset};
use crate::error::CliError;

pub const BANDS_COLUMNS: [&str; 3] = ["q_over_kt", "band_index", "energy_Er"];
pub const WEIGHTS_COLUMNS: [&str; 3] = ["depth_Er", "band_index", "weight"];
pub const SWEEP_COLUMNS: [&str; 5] = ["delta_pc_over_kappa", "direction", "z_m", "photons_norm", "branch_jump"];
pub const MAP_COLUMNS: [&str; 3] = ["delta_over_kappa", "n_max", "solution_count"];
pub const BACKACTION_COLUMNS: [&str; 6] = [
    "delta_pc_over_kappa",
    "s_minus",
    "s_plus",
    "diffusion",
    "dynamical",
    "steady_phonons_or_nan",
];
pub const GRANULARITY_COLUMNS: [&str; 3] = ["delta_ca", "epsilon", "granular"];

/// In-memory result of a scenario, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub data: Dataset,
    pub mode: CollectiveMode,
    pub summary: Value,
}

pub fn compute(cfg: &ScenarioConfig) -> Result<ScenarioOutput, CliError> {
    let consts = PhysicalConstants::CODATA;
    let mode = derive_collective_mode(&cfg.params, &consts)?;
    let p = &cfg.params;
    let (data, summary) = match &cfg.block {
        ScenarioBlock::Bands(b) => {
            let spec = LatticeSpec::from_params(p, b.depth, b.cutoff)?;
            let bands = band_structure(&spec, b.q_grid, b.n_bands)?;
            let mut data = Dataset::new(&BANDS_COLUMNS);
            for band in 0..bands.n_bands() {
                for (iq, &q) in bands.quasimomenta.iter().enumerate() {
                    data.push(vec![q.into(), band.into(), bands.energies[band][iq].into()]);
                }
            }
            let widths: Vec<f64> = (0..bands.n_bands()).map(|i| bands.bandwidth(i)).collect();
            let mean_gap = (bands.n_bands() >= 2).then(|| bands.mean_gap(0, 1));
            let summary = json!({
                "harmonicGapEr": deep_lattice_gap(&spec),
                "meanGap01Er": mean_gap,
                "bandwidthsEr": widths,
            });
            (data, summary)
        }
        ScenarioBlock::Weights(w) => {
            let mut data = Dataset::new(&WEIGHTS_COLUMNS);
            let mut q_star = None;
            for &depth in &w.depths {
                let spec = LatticeSpec::from_params(p, depth, w.cutoff)?;
                let weights = excitation_weights(&spec, w.n_bands)?;
                q_star = Some(weights.quasimomentum);
                for (band, weight) in weights.bands.iter().zip(&weights.weights) {
                    data.push(vec![depth.into(), (*band).into(), (*weight).into()]);
                }
            }
            (data, json!({ "probeQuasimomentumOverKt": q_star }))
        }
        ScenarioBlock::Sweep(s) => {
            let mut data = Dataset::new(&SWEEP_COLUMNS);
            let mut jumps = Vec::new();
            for direction in s.direction.directions() {
                let (start, end) = match direction {
                    SweepDirection::Up => (s.delta_min, s.delta_max),
                    SweepDirection::Down => (s.delta_max, s.delta_min),
                };
                let schedule = linear_schedule(start, end, s.points, s.n_max, p.kappa)?;
                let trace = transmission_sweep(&schedule, direction, &mode)?;
                for pt in &trace.points {
                    let norm = if s.n_max > 0.0 { pt.photons / s.n_max } else { 0.0 };
                    data.push(vec![
                        (pt.delta_pc / p.kappa).into(),
                        direction.as_str().into(),
                        pt.z.into(),
                        norm.into(),
                        pt.branch_jump.into(),
                    ]);
                    if pt.branch_jump {
                        jumps.push(json!({
                            "direction": direction.as_str(),
                            "deltaOverKappa": pt.delta_pc / p.kappa,
                        }));
                    }
                }
            }
            let beta = ReducedDrive::new(&DriveCondition::new(0.0, s.n_max, p.kappa)?, &mode).beta;
            (data, json!({ "beta": beta, "jumps": jumps }))
        }
        ScenarioBlock::Map(m) => {
            let deltas = linspace(m.delta_min, m.delta_max, m.delta_points);
            let n_maxes = linspace(m.n_max_min, m.n_max_max, m.n_max_points);
            let detunings: Vec<f64> = deltas.iter().map(|d| d * p.kappa).collect();
            let counts = bistability_map(&detunings, &n_maxes, &mode, p.kappa)?;
            let mut data = Dataset::new(&MAP_COLUMNS);
            let mut bistable = 0usize;
            for (row, &n_max) in counts.iter().zip(&n_maxes) {
                for (&count, &delta) in row.iter().zip(&deltas) {
                    bistable += (count == 3) as usize;
                    data.push(vec![delta.into(), n_max.into(), count.into()]);
                }
            }
            (data, json!({ "bistableCells": bistable }))
        }
        ScenarioBlock::Backaction(b) => {
            let mut params = *p;
            if let Some(w) = b.omega_z {
                params.omega_z = w;
            }
            let mode = derive_collective_mode(&params, &consts)?;
            let mut data = Dataset::new(&BACKACTION_COLUMNS);
            let mut drives = Vec::with_capacity(b.points);
            for delta in linspace(b.delta_min, b.delta_max, b.points) {
                let d = DriveCondition::new(delta * p.kappa, b.mean_photons, p.kappa)?;
                let pair = spectral_densities(&d, b.mean_photons, mode.omega_z)?;
                let rates = BackactionRates::new(&pair, &mode);
                data.push(vec![
                    delta.into(),
                    pair.s_minus.into(),
                    pair.s_plus.into(),
                    rates.diffusion.into(),
                    rates.dynamical.into(),
                    rates.steady_phonons.unwrap_or(f64::NAN).into(),
                ]);
                drives.push(d);
            }
            let mismatch = sensitivity_backaction_check(&drives, &mode, b.mean_photons, mode.omega_z).ok();
            let summary = json!({
                "omegaZ": mode.omega_z,
                "granularity": mode.granularity,
                "sensitivityBackactionMismatch": mismatch,
            });
            (data, summary)
        }
        ScenarioBlock::Granularity(g) => {
            let scan = granularity_scan(p, &consts, &g.detunings)?;
            let mut data = Dataset::new(&GRANULARITY_COLUMNS);
            for pt in &scan {
                data.push(vec![pt.delta_ca.into(), pt.granularity.into(), pt.granular.into()]);
            }
            let scale = GranularityScale::from_params(p, &consts)?;
            (data, json!({ "granularThresholdDetuning": scale.threshold_detuning() }))
        }
    };
    Ok(ScenarioOutput { data, mode, summary })
}

pub fn output_paths(cfg: &ScenarioConfig) -> (PathBuf, PathBuf) {
    let base = format!("{}.{}", cfg.output, cfg.kind());
    (
        PathBuf::from(format!("{base}.csv")),
        PathBuf::from(format!("{base}.json")),
    )
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn sidecar(cfg: &ScenarioConfig, out: &ScenarioOutput, csv_path: &Path) -> Value {
    json!({
        "config": cfg.to_json_value(),
        "collectiveMode": out.mode,
        "outputs": [file_name(csv_path)],
        "summary": out.summary,
        "run": {
            "tool": "optomech",
            "version": env!("CARGO_PKG_VERSION"),
        },
    })
}

/// Computes the scenario and writes its files. Returns the written paths,
/// data file first. Nothing is left behind on failure.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, CliError> {
    let out = compute(cfg)?;
    let (csv_path, json_path) = output_paths(cfg);
    if let Some(parent) = csv_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }

    let mut text = serde_json::to_string_pretty(&sidecar(cfg, &out, &csv_path)).expect("sidecar serializes");
    text.push('\n');
    let written = emit_csv(&out.data, &csv_path).and_then(|csv| {
        std::fs::write(&json_path, text)
            .map(|_| vec![csv, json_path.clone()])
            .map_err(|source| CliError::Io {
                path: json_path.display().to_string(),
                source,
            })
    });
    if written.is_err() {
        let _ = std::fs::remove_file(&csv_path);
        let _ = std::fs::remove_file(&json_path);
    }
    if let Ok(files) = &written {
        info!(
            "{} scenario wrote {} rows to {}",
            cfg.kind(),
            out.data.rows.len(),
            files[0].display()
        );
    }
    written
}
