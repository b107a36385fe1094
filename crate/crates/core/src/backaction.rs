//! Photon-number fluctuations and their effect on the collective mode:
//! sideband spectral densities, the phonon-number rate equation, and the
//! cavity field response to a displacement.
//!
//! Rates are in rad/s. The prefactor κ²ε² of the rate equation equals
//! (F·Z_ho/ħ)², so it does not depend on which κ the granularity was quoted at.

use log::warn;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::integrate_linear_ode;
use crate::params::CollectiveMode;
use crate::statics::DriveCondition;

/// Photon-number spectral densities at the two mechanical sidebands.
///
/// `s_minus` is evaluated at Δ_pc − ω_z and drives heating; `s_plus` at
/// Δ_pc + ω_z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralPair {
    pub s_minus: f64,
    pub s_plus: f64,
    pub mean_photons: f64,
}

pub fn spectral_densities(d: &DriveCondition, mean_photons: f64, omega_z: f64) -> Result<SpectralPair> {
    if !(mean_photons >= 0.0) || !mean_photons.is_finite() {
        return Err(Error::invalid("meanPhotons", "must be finite and >= 0"));
    }
    let k = d.kappa;
    let lorentz = |detuning: f64| 2.0 * mean_photons * k / (k * k + detuning * detuning);
    Ok(SpectralPair {
        s_minus: lorentz(d.delta_pc - omega_z),
        s_plus: lorentz(d.delta_pc + omega_z),
        mean_photons,
    })
}

/// κ²ε² = (F Z_ho/ħ)², rad²/s².
pub fn rate_prefactor(mode: &CollectiveMode) -> f64 {
    let g = mode.per_photon_force * mode.z_ho / mode.hbar;
    g * g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BackactionRates {
    /// κ²ε²·S⁻, phonons per second.
    pub diffusion: f64,
    /// κ²ε²·(S⁻ − S⁺); negative means cooling.
    pub dynamical: f64,
    /// S⁻/(S⁺ − S⁻) when cooling; `None` when there is no steady state.
    pub steady_phonons: Option<f64>,
}

impl BackactionRates {
    pub fn new(pair: &SpectralPair, mode: &CollectiveMode) -> Self {
        let c = rate_prefactor(mode);
        let dynamical = c * (pair.s_minus - pair.s_plus);
        let steady_phonons = (dynamical < 0.0).then(|| pair.s_minus / (pair.s_plus - pair.s_minus));
        BackactionRates {
            diffusion: c * pair.s_minus,
            dynamical,
            steady_phonons,
        }
    }

    pub fn is_cooling(&self) -> bool {
        self.dynamical < 0.0
    }

    pub fn is_divergent(&self) -> bool {
        self.steady_phonons.is_none()
    }

    /// d⟨a†a⟩/dt at the given occupation.
    pub fn rate_at(&self, phonons: f64) -> f64 {
        self.diffusion + self.dynamical * phonons
    }
}

pub fn backaction_rates(d: &DriveCondition, mode: &CollectiveMode, mean_photons: f64) -> Result<BackactionRates> {
    let pair = spectral_densities(d, mean_photons, mode.omega_z)?;
    Ok(BackactionRates::new(&pair, mode))
}

/// κ²ε²[S⁻ + (S⁻ − S⁺)·n].
pub fn energy_rate(phonons: f64, d: &DriveCondition, mode: &CollectiveMode, mean_photons: f64) -> Result<f64> {
    if !(phonons >= 0.0) {
        return Err(Error::invalid("phonons", "must be >= 0"));
    }
    Ok(backaction_rates(d, mode, mean_photons)?.rate_at(phonons))
}

/// Phonon number after time `t`, from the closed-form solution of the rate equation.
pub fn evolve_phonons(n0: f64, t: f64, d: &DriveCondition, mode: &CollectiveMode, mean_photons: f64) -> Result<f64> {
    if !(n0 >= 0.0) {
        return Err(Error::invalid("n0", "must be >= 0"));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid("t", "must be >= 0"));
    }
    let rates = backaction_rates(d, mode, mean_photons)?;
    Ok(integrate_linear_ode(rates.diffusion, rates.dynamical, n0, t).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldResponse {
    /// E_sig/E_0.
    pub ratio: Complex64,
    /// False when |F ΔZ/ħ| > 0.1κ and first-order response is doubtful.
    pub first_order_valid: bool,
}

/// Linear response of the intracavity field to a collective displacement:
/// E_sig/E_0 = i/(κ − iΔ_pc) · (F ΔZ/ħ).
pub fn field_response(delta_z: f64, d: &DriveCondition, mode: &CollectiveMode) -> FieldResponse {
    let shift = mode.per_photon_force * delta_z / mode.hbar;
    let first_order_valid = shift.abs() <= 0.1 * d.kappa;
    if !first_order_valid {
        warn!(
            "cavity shift {:.3e} rad/s exceeds 0.1 kappa; first-order field response is unreliable",
            shift
        );
    }
    let ratio = Complex64::i() / Complex64::new(d.kappa, -d.delta_pc) * shift;
    FieldResponse {
        ratio,
        first_order_valid,
    }
}

/// Largest difference between the normalized detection sensitivity
/// |E_sig/E_0|² and the normalized heating spectral density S⁻ over `drives`,
/// both normalized to their value at Δ_pc = 0 with the same κ.
pub fn sensitivity_backaction_check(
    drives: &[DriveCondition],
    mode: &CollectiveMode,
    mean_photons: f64,
    omega_z: f64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for d in drives {
        if omega_z / d.kappa > 1e-2 {
            return Err(Error::invalid(
                "omegaZ",
                format!(
                    "omega_z/kappa = {:e} is outside the omega_z << kappa regime",
                    omega_z / d.kappa
                ),
            ));
        }
        let at_zero = d.with_delta_pc(0.0);
        let sens = |dd: &DriveCondition| field_response(mode.z_ho, dd, mode).ratio.norm_sqr();
        let heat = |dd: &DriveCondition| spectral_densities(dd, mean_photons, omega_z).map(|s| s.s_minus);
        let a = sens(d) / sens(&at_zero);
        let b = heat(d)? / heat(&at_zero)?;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}
