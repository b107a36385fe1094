//! Physical inputs and the collective-mode reduction.
//!
//! Everything here is SI. The ensemble enters only through `n_eff`; the mass,
//! oscillator length, per-photon force and granularity of the single
//! collective mode follow from it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fundamental constants used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Mass of one 87Rb atom, kg.
    pub atom_mass_rb87: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
        atom_mass_rb87: 1.443_16e-25,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

pub const DEFAULT_PROBE_WAVELENGTH: f64 = 780e-9;
pub const DEFAULT_TRAP_WAVELENGTH: f64 = 850e-9;

fn default_probe_wavelength() -> f64 {
    DEFAULT_PROBE_WAVELENGTH
}

fn default_trap_wavelength() -> f64 {
    DEFAULT_TRAP_WAVELENGTH
}

/// Primitive inputs describing atoms, cavity, trap and probe.
///
/// Frequencies are angular (rad/s). `delta_ca` is the signed cavity-atom
/// detuning ω_c − ω_a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SystemParams {
    pub n_eff: f64,
    pub g0: f64,
    #[serde(rename = "deltaCA")]
    pub delta_ca: f64,
    pub kappa: f64,
    pub omega_z: f64,
    #[serde(default = "default_probe_wavelength")]
    pub lambda_probe: f64,
    #[serde(default = "default_trap_wavelength")]
    pub lambda_trap: f64,
}

impl SystemParams {
    /// Builds a parameter set with the default 780 nm probe and 850 nm trap.
    pub fn new(n_eff: f64, g0: f64, delta_ca: f64, kappa: f64, omega_z: f64) -> Result<Self> {
        let p = SystemParams {
            n_eff,
            g0,
            delta_ca,
            kappa,
            omega_z,
            lambda_probe: DEFAULT_PROBE_WAVELENGTH,
            lambda_trap: DEFAULT_TRAP_WAVELENGTH,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("nEff", self.n_eff),
            ("g0", self.g0),
            ("deltaCA", self.delta_ca),
            ("kappa", self.kappa),
            ("omegaZ", self.omega_z),
            ("lambdaProbe", self.lambda_probe),
            ("lambdaTrap", self.lambda_trap),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.n_eff < 0.0 {
            return Err(Error::invalid("nEff", "must be >= 0"));
        }
        for (name, v) in [
            ("g0", self.g0),
            ("kappa", self.kappa),
            ("omegaZ", self.omega_z),
            ("lambdaProbe", self.lambda_probe),
            ("lambdaTrap", self.lambda_trap),
        ] {
            if v <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if self.delta_ca == 0.0 {
            return Err(Error::invalid(
                "deltaCA",
                "must be nonzero (resonant atom-cavity tuning is unphysical here)",
            ));
        }
        Ok(())
    }

    /// Probe wavenumber k_p = 2π/λ_p, rad/m.
    pub fn k_probe(&self) -> f64 {
        2.0 * PI / self.lambda_probe
    }

    /// Trap wavenumber k_t = 2π/λ_t, rad/m.
    pub fn k_trap(&self) -> f64 {
        2.0 * PI / self.lambda_trap
    }

    /// Lattice recoil energy ħ²k_t²/2m, J.
    pub fn recoil_energy(&self, c: &PhysicalConstants) -> f64 {
        let k = self.k_trap();
        c.hbar * c.hbar * k * k / (2.0 * c.atom_mass_rb87)
    }

    /// Same parameters with a different atom-cavity detuning.
    pub fn with_delta_ca(&self, delta_ca: f64) -> Result<Self> {
        let p = SystemParams { delta_ca, ..*self };
        p.validate()?;
        Ok(p)
    }
}

/// The single harmonic mode of the ensemble that couples to the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CollectiveMode {
    /// M = N_eff · m, kg.
    pub mass: f64,
    pub omega_z: f64,
    /// sqrt(ħ / 2Mω_z), m.
    pub z_ho: f64,
    /// Signed per-photon force F, N.
    pub per_photon_force: f64,
    /// |F|·Z_ho/(ħκ).
    pub granularity: f64,
    /// κ the granularity was referred to, rad/s.
    pub kappa: f64,
    pub hbar: f64,
}

impl CollectiveMode {
    /// Stiffness Mω_z², N/m.
    pub fn stiffness(&self) -> f64 {
        self.mass * self.omega_z * self.omega_z
    }
}

/// Per-photon force F = N_eff ħ k_p g0² / Δ_ca. Carries the sign of Δ_ca.
pub fn derive_per_photon_force(p: &SystemParams, c: &PhysicalConstants) -> Result<f64> {
    if p.delta_ca == 0.0 {
        return Err(Error::invalid("deltaCA", "must be nonzero"));
    }
    Ok(p.n_eff * c.hbar * p.k_probe() * p.g0 * p.g0 / p.delta_ca)
}

fn granularity_of(force: f64, z_ho: f64, hbar: f64, kappa: f64) -> f64 {
    force.abs() * z_ho / (hbar * kappa)
}

pub fn derive_collective_mode(p: &SystemParams, c: &PhysicalConstants) -> Result<CollectiveMode> {
    p.validate()?;
    if p.n_eff == 0.0 {
        return Err(Error::invalid(
            "nEff",
            "must be > 0 for a collective mechanical mode to exist",
        ));
    }
    let mass = p.n_eff * c.atom_mass_rb87;
    let z_ho = (c.hbar / (2.0 * mass * p.omega_z)).sqrt();
    let force = derive_per_photon_force(p, c)?;
    Ok(CollectiveMode {
        mass,
        omega_z: p.omega_z,
        z_ho,
        per_photon_force: force,
        granularity: granularity_of(force, z_ho, c.hbar, p.kappa),
        kappa: p.kappa,
        hbar: c.hbar,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GranularityPoint {
    pub delta_ca: f64,
    pub granularity: f64,
    pub granular: bool,
}

/// ε as a function of Δ_ca with everything else held fixed.
pub fn granularity_scan(p: &SystemParams, c: &PhysicalConstants, detunings: &[f64]) -> Result<Vec<GranularityPoint>> {
    detunings
        .iter()
        .map(|&delta_ca| {
            let mode = derive_collective_mode(&p.with_delta_ca(delta_ca)?, c)?;
            Ok(GranularityPoint {
                delta_ca,
                granularity: mode.granularity,
                granular: mode.granularity > 1.0,
            })
        })
        .collect()
}

/// ε·|Δ_ca| is the only Δ_ca-independent combination, so one number fixes the
/// whole ε(Δ_ca) curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GranularityScale {
    product: f64,
}

impl GranularityScale {
    pub fn from_params(p: &SystemParams, c: &PhysicalConstants) -> Result<Self> {
        let mode = derive_collective_mode(p, c)?;
        Ok(GranularityScale {
            product: mode.granularity * p.delta_ca.abs(),
        })
    }

    /// Calibrate from one known point, e.g. ε = 1 at a measured threshold detuning.
    pub fn calibrated(delta_ca: f64, granularity: f64) -> Result<Self> {
        if delta_ca == 0.0 || !delta_ca.is_finite() {
            return Err(Error::invalid(
                "deltaCA",
                "calibration detuning must be finite and nonzero",
            ));
        }
        if !(granularity >= 0.0) || !granularity.is_finite() {
            return Err(Error::invalid("granularity", "must be finite and >= 0"));
        }
        Ok(GranularityScale {
            product: granularity * delta_ca.abs(),
        })
    }

    pub fn at(&self, delta_ca: f64) -> f64 {
        self.product / delta_ca.abs()
    }

    /// |Δ_ca| below which ε > 1.
    pub fn threshold_detuning(&self) -> f64 {
        self.product
    }
}

/// Momentum kick from one photon over its cavity lifetime and the resulting
/// collective displacement: (ΔP, ΔZ) = (F/2κ, ΔP/Mω_z).
pub fn photon_impulse_displacement(mode: &CollectiveMode, kappa: f64) -> (f64, f64) {
    let dp = mode.per_photon_force / (2.0 * kappa);
    let dz = dp / (mode.mass * mode.omega_z);
    (dp, dz)
}

/// ε computed as sqrt(F·ΔZ/ħκ) from the single-photon kick.
pub fn granularity_from_impulse(mode: &CollectiveMode, kappa: f64) -> f64 {
    let (_, dz) = photon_impulse_displacement(mode, kappa);
    (mode.per_photon_force * dz / (mode.hbar * kappa)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PI: f64 = 2.0 * PI;

    fn reference() -> SystemParams {
        SystemParams::new(5e4, TWO_PI * 10e6, TWO_PI * 100e9, TWO_PI * 1e6, 2.618e5).unwrap()
    }

    #[test]
    fn force_golden_value() {
        // hand arithmetic: 5e4 * 1.054571817e-34 * (2π/780e-9) * (2π·1e7)^2 / (2π·1e11)
        let f = derive_per_photon_force(&reference(), &PhysicalConstants::CODATA).unwrap();
        assert!((f - 2.668_770_934_955_897_7e-19).abs() < 1e-12 * 2.67e-19, "{f}");
    }

    #[test]
    fn force_scales_inversely_with_detuning() {
        let c = PhysicalConstants::CODATA;
        let p = reference();
        let f1 = derive_per_photon_force(&p, &c).unwrap();
        let f2 = derive_per_photon_force(&p.with_delta_ca(2.0 * p.delta_ca).unwrap(), &c).unwrap();
        assert!((f2 - f1 / 2.0).abs() <= 1e-15 * f1.abs());
        let fneg = derive_per_photon_force(&p.with_delta_ca(-p.delta_ca).unwrap(), &c).unwrap();
        assert_eq!(fneg, -f1);
    }

    #[test]
    fn zero_atoms() {
        let c = PhysicalConstants::CODATA;
        let p = SystemParams {
            n_eff: 0.0,
            ..reference()
        };
        assert_eq!(derive_per_photon_force(&p, &c).unwrap(), 0.0);
        assert!(matches!(
            derive_collective_mode(&p, &c),
            Err(Error::InvalidParameter { name: "nEff", .. })
        ));
    }

    #[test]
    fn rejects_resonant_tuning() {
        let err = SystemParams::new(5e4, 1.0, 0.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "deltaCA", .. }));
        let p = SystemParams {
            delta_ca: 0.0,
            ..reference()
        };
        assert!(derive_per_photon_force(&p, &PhysicalConstants::CODATA).is_err());
    }

    #[test]
    fn mass_and_oscillator_length() {
        let c = PhysicalConstants::CODATA;
        // ħω_z/k_B = 2 μK
        let omega_z = 2e-6 * c.k_b / c.hbar;
        assert!((omega_z - 2.619e5).abs() < 1e2);
        let p = SystemParams { omega_z, ..reference() };
        let m = derive_collective_mode(&p, &c).unwrap();
        assert!((m.mass - 7.2158e-21).abs() < 1e-24);
        // order 1e-17 g
        assert!(m.mass * 1e3 > 1e-18 && m.mass * 1e3 < 1e-16);
        assert!((m.z_ho - 1.67e-10).abs() < 0.01e-10, "{}", m.z_ho);
        assert_eq!(m.z_ho, (c.hbar / (2.0 * m.mass * m.omega_z)).sqrt());
        assert_eq!(m.granularity, m.per_photon_force.abs() * m.z_ho / (c.hbar * p.kappa));
    }

    #[test]
    fn granularity_scan_product_and_sign() {
        let c = PhysicalConstants::CODATA;
        let p = reference();
        let dets: Vec<f64> = (1..=10).map(|i| TWO_PI * 10e9 * i as f64).collect();
        let scan = granularity_scan(&p, &c, &dets).unwrap();
        let k0 = scan[0].granularity * scan[0].delta_ca.abs();
        for pt in &scan {
            let k = pt.granularity * pt.delta_ca.abs();
            assert!(((k - k0) / k0).abs() < 1e-12);
            assert_eq!(pt.granular, pt.granularity > 1.0);
        }
        let neg = granularity_scan(&p, &c, &[-dets[3]]).unwrap();
        assert_eq!(neg[0].granularity, scan[3].granularity);
        assert!(granularity_scan(&p, &c, &[]).unwrap().is_empty());
        assert!(granularity_scan(&p, &c, &[0.0]).is_err());
    }

    #[test]
    fn calibrated_threshold() {
        let s = GranularityScale::calibrated(TWO_PI * 27e9, 1.0).unwrap();
        assert_eq!(s.at(TWO_PI * 54e9), 0.5);
        assert_eq!(s.at(-TWO_PI * 27e9), 1.0);
        assert_eq!(s.threshold_detuning(), TWO_PI * 27e9);
    }

    #[test]
    fn impulse() {
        let c = PhysicalConstants::CODATA;
        let p = reference();
        let m = derive_collective_mode(&p, &c).unwrap();
        let (dp, dz) = photon_impulse_displacement(&m, p.kappa);
        let (dp2, dz2) = photon_impulse_displacement(&m, 2.0 * p.kappa);
        assert_eq!(dp2, dp / 2.0);
        assert_eq!(dz2, dz / 2.0);
        let eps = granularity_from_impulse(&m, p.kappa);
        assert!(((eps - m.granularity) / m.granularity).abs() < 1e-12);

        let zero = CollectiveMode {
            per_photon_force: 0.0,
            ..m
        };
        assert_eq!(photon_impulse_displacement(&zero, p.kappa), (0.0, 0.0));
    }

    #[test]
    fn derived_values_are_deterministic() {
        let c = PhysicalConstants::CODATA;
        let a = derive_collective_mode(&reference(), &c).unwrap();
        let b = derive_collective_mode(&reference(), &c).unwrap();
        assert_eq!(a, b);
    }
}
