//! 1D Bloch bands in the trapping lattice and probe excitation weights.
//!
//! Units at this boundary: wavevectors and quasimomenta in units of k_t,
//! energies and depths in units of the recoil energy E_r = ħ²k_t²/2m. The
//! lattice potential is `depth·E_r·sin²(k_t z)`, so the reciprocal lattice
//! vector is 2k_t and the plane-wave basis is e^{i(q + 2n)k_t z},
//! n ∈ [−cutoff, cutoff].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, EigenDecomposition, HermitianMatrix};
use crate::params::SystemParams;

pub const DEFAULT_CUTOFF: usize = 16;
pub const DEFAULT_Q_GRID: usize = 128;
pub const DEFAULT_N_BANDS: usize = 5;
pub const MIN_CUTOFF: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeSpec {
    /// V₀ in units of E_r.
    pub depth: f64,
    pub k_trap: f64,
    pub k_probe: f64,
    pub planewave_cutoff: usize,
}

impl LatticeSpec {
    pub fn new(depth: f64, k_trap: f64, k_probe: f64, planewave_cutoff: usize) -> Result<Self> {
        if !(depth >= 0.0) || !depth.is_finite() {
            return Err(Error::invalid("depth", format!("must be finite and >= 0, got {depth}")));
        }
        if !(k_trap > 0.0 && k_trap.is_finite()) {
            return Err(Error::invalid("kT", "must be > 0"));
        }
        if !(k_probe > 0.0 && k_probe.is_finite()) {
            return Err(Error::invalid("kP", "must be > 0"));
        }
        if planewave_cutoff < MIN_CUTOFF {
            return Err(Error::invalid(
                "planewaveCutoff",
                format!("must be >= {MIN_CUTOFF}, got {planewave_cutoff}"),
            ));
        }
        Ok(LatticeSpec {
            depth,
            k_trap,
            k_probe,
            planewave_cutoff,
        })
    }

    pub fn from_params(p: &SystemParams, depth: f64, planewave_cutoff: usize) -> Result<Self> {
        Self::new(depth, p.k_trap(), p.k_probe(), planewave_cutoff)
    }

    pub fn with_depth(&self, depth: f64) -> Result<Self> {
        Self::new(depth, self.k_trap, self.k_probe, self.planewave_cutoff)
    }

    pub fn with_cutoff(&self, planewave_cutoff: usize) -> Result<Self> {
        Self::new(self.depth, self.k_trap, self.k_probe, planewave_cutoff)
    }

    pub fn basis_size(&self) -> usize {
        2 * self.planewave_cutoff + 1
    }

    /// Wavevector 2k_p transferred by the probe standing wave, units of k_t.
    pub fn probe_transfer(&self) -> f64 {
        2.0 * self.k_probe / self.k_trap
    }
}

/// Maps an extended-zone wavevector (units of k_t) to `(q, fold)` with
/// `k = q + 2·fold` and `q ∈ (−1, 1]`.
pub fn fold_to_first_bz(k: f64) -> (f64, i64) {
    let fold = ((k - 1.0) / 2.0).ceil();
    let mut q = k - 2.0 * fold;
    let mut fold = fold as i64;
    // guard against rounding pushing q just outside the half-open zone
    if q <= -1.0 {
        q += 2.0;
        fold -= 1;
    } else if q > 1.0 {
        q -= 2.0;
        fold += 1;
    }
    (q, fold)
}

/// The b-th lowest free-particle energy (q + 2n)² at quasimomentum q.
pub fn free_particle_energy(q: f64, band: usize) -> f64 {
    let n = band as i64;
    // bands alternate sides of the parabola: n = 0, -sgn(q), +sgn(q), ...
    let side = if q >= 0.0 { 1 } else { -1 };
    let index = if band == 0 {
        0
    } else if band % 2 == 1 {
        -side * (n + 1) / 2
    } else {
        side * n / 2
    };
    let k = q + 2.0 * index as f64;
    k * k
}

pub fn bloch_hamiltonian(spec: &LatticeSpec, q: f64) -> Result<HermitianMatrix> {
    if !(q > -1.0 && q <= 1.0) {
        return Err(Error::OutsideZone(q));
    }
    let cutoff = spec.planewave_cutoff as i64;
    let diagonal: Vec<f64> = (-cutoff..=cutoff)
        .map(|n| {
            let k = q + 2.0 * n as f64;
            k * k + 0.5 * spec.depth
        })
        .collect();
    Ok(HermitianMatrix::tridiagonal(&diagonal, -0.25 * spec.depth))
}

fn solve(spec: &LatticeSpec, q: f64) -> Result<EigenDecomposition> {
    hermitian_eigen(&bloch_hamiltonian(spec, q)?)
}

/// Uniform grid over (−1, 1], ending exactly at the zone edge +1.
pub fn quasimomentum_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| -1.0 + 2.0 * (j + 1) as f64 / points as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BandStructure {
    pub depth: f64,
    /// Units of k_t.
    pub quasimomenta: Vec<f64>,
    /// `energies[band][q]`, units of E_r.
    pub energies: Vec<Vec<f64>>,
    /// `bloch_coefficients[band][q]`: amplitudes on the plane waves n = −cutoff..=cutoff.
    #[serde(skip)]
    pub bloch_coefficients: Vec<Vec<Vec<Complex64>>>,
}

impl BandStructure {
    pub fn n_bands(&self) -> usize {
        self.energies.len()
    }

    /// max − min of a band over the grid.
    pub fn bandwidth(&self, band: usize) -> f64 {
        let e = &self.energies[band];
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn mean_energy(&self, band: usize) -> f64 {
        let e = &self.energies[band];
        e.iter().sum::<f64>() / e.len() as f64
    }

    /// Difference of grid-averaged band energies.
    pub fn mean_gap(&self, lower: usize, upper: usize) -> f64 {
        self.mean_energy(upper) - self.mean_energy(lower)
    }
}

pub fn band_structure(spec: &LatticeSpec, q_grid: usize, n_bands: usize) -> Result<BandStructure> {
    if q_grid < 2 {
        return Err(Error::invalid("qGrid", "must be >= 2"));
    }
    if n_bands == 0 || n_bands > 2 * spec.planewave_cutoff {
        return Err(Error::invalid(
            "nBands",
            format!("must be in 1..={}", 2 * spec.planewave_cutoff),
        ));
    }
    let qs = quasimomentum_grid(q_grid);
    let solved: Vec<EigenDecomposition> = qs.par_iter().map(|&q| solve(spec, q)).collect::<Result<_>>()?;

    let energies = (0..n_bands)
        .map(|b| solved.iter().map(|d| d.values[b]).collect())
        .collect();
    let bloch_coefficients = (0..n_bands)
        .map(|b| solved.iter().map(|d| d.vectors[b].clone()).collect())
        .collect();
    Ok(BandStructure {
        depth: spec.depth,
        quasimomenta: qs,
        energies,
        bloch_coefficients,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExcitationWeights {
    pub depth: f64,
    /// Folded probe transfer q*, units of k_t.
    pub quasimomentum: f64,
    /// Band indices at q*; the lowest band (index 0) is not an excitation.
    pub bands: Vec<usize>,
    /// Normalized over `bands`.
    pub weights: Vec<f64>,
    /// Energies of `bands` at q*, units of E_r.
    pub energies: Vec<f64>,
}

impl ExcitationWeights {
    pub fn weight(&self, band: usize) -> Option<f64> {
        self.bands.iter().position(|&b| b == band).map(|i| self.weights[i])
    }
}

/// Relative probabilities |⟨q*; i| cos(2k_p z) |g⟩|² for the excited bands
/// i = 1..=n_bands, from the band-0 ground state at q = 0.
///
/// Only the e^{+2ik_p z} half of the cosine is used: it lands on q*, while
/// the other half lands on −q* where the weights are identical by parity.
pub fn excitation_weights(spec: &LatticeSpec, n_bands: usize) -> Result<ExcitationWeights> {
    if n_bands < 3 {
        return Err(Error::invalid("nBands", "must be >= 3"));
    }
    if n_bands + 1 > spec.basis_size() {
        return Err(Error::invalid(
            "nBands",
            format!("needs n_bands + 1 <= basis size {}", spec.basis_size()),
        ));
    }
    let ground = solve(spec, 0.0)?;
    let (q_star, fold) = fold_to_first_bz(spec.probe_transfer());
    let excited = solve(spec, q_star)?;

    let g = &ground.vectors[0];
    let dim = g.len() as i64;
    let bands: Vec<usize> = (1..=n_bands).collect();
    let raw: Vec<f64> = bands
        .iter()
        .map(|&b| {
            let d = &excited.vectors[b];
            // e^{2ik_p z} carries plane wave n at q = 0 to n + fold at q*
            let element: Complex64 = (0..dim)
                .filter_map(|i| {
                    let j = i + fold;
                    (0..dim).contains(&j).then(|| d[j as usize].conj() * g[i as usize])
                })
                .sum();
            element.norm_sqr()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("spec", "probe couples to none of the retained bands"));
    }
    Ok(ExcitationWeights {
        depth: spec.depth,
        quasimomentum: q_star,
        energies: bands.iter().map(|&b| excited.values[b]).collect(),
        weights: raw.iter().map(|w| w / total).collect(),
        bands,
    })
}

/// Harmonic estimate of the band spacing in a deep lattice, 2·sqrt(depth) E_r.
pub fn deep_lattice_gap(spec: &LatticeSpec) -> f64 {
    2.0 * spec.depth.sqrt()
}

/// Band-0 → band-1 gap from the full band structure (difference of band means).
pub fn exact_band_gap(spec: &LatticeSpec, q_grid: usize) -> Result<f64> {
    Ok(band_structure(spec, q_grid, 2)?.mean_gap(0, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(depth: f64) -> LatticeSpec {
        LatticeSpec::new(depth, 2.0 * PI / 850e-9, 2.0 * PI / 780e-9, DEFAULT_CUTOFF).unwrap()
    }

    #[test]
    fn folding() {
        assert_eq!(fold_to_first_bz(0.0), (0.0, 0));
        assert_eq!(fold_to_first_bz(-1.0), (1.0, -1));
        assert_eq!(fold_to_first_bz(1.0), (1.0, 0));
        let k = 2.0 * 850.0 / 780.0;
        let (q, f) = fold_to_first_bz(k);
        assert_eq!(f, 1);
        assert!((q - 0.179_487_179_487).abs() < 1e-11);
        assert_eq!(q + 2.0 * f as f64, k);
        for k in [-7.3, -3.0, -0.999, 2.5, 3.0, 11.1] {
            let (q, f) = fold_to_first_bz(k);
            assert!(q > -1.0 && q <= 1.0);
            assert!((q + 2.0 * f as f64 - k).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_structure() {
        let s = spec(2.0);
        let h = bloch_hamiltonian(&s, 0.3).unwrap();
        let expected: f64 = (-16i64..=16).map(|n| (0.3 + 2.0 * n as f64).powi(2) + 1.0).sum();
        assert!((h.trace() - expected).abs() < 1e-9);
        assert_eq!(h.get(4, 5).re, -0.5);
        assert_eq!(h.get(4, 6).re, 0.0);
        assert!(bloch_hamiltonian(&s, -1.0).is_err());
        assert!(bloch_hamiltonian(&s, 1.2).is_err());

        let free = bloch_hamiltonian(&spec(0.0), 0.5).unwrap();
        for i in 0..free.dim() {
            for j in 0..free.dim() {
                if i != j {
                    assert_eq!(free.get(i, j).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn weak_lattice_ground_energy() {
        let e = solve(&spec(2.0), 0.0).unwrap().values[0];
        let dense = solve(&spec(2.0).with_cutoff(32).unwrap(), 0.0).unwrap().values[0];
        assert!(e > 0.0 && e < 1.0, "{e}");
        assert!((e - dense).abs() < 1e-10);
    }

    #[test]
    fn free_particle_bands() {
        let b = band_structure(&spec(0.0), 64, 5).unwrap();
        for (iq, &q) in b.quasimomenta.iter().enumerate() {
            for band in 0..5 {
                let want = free_particle_energy(q, band);
                assert!((b.energies[band][iq] - want).abs() <= 1e-9 * want.max(1e-300));
            }
        }
    }

    #[test]
    fn band_invariants() {
        let b = band_structure(&spec(5.0), 32, 5).unwrap();
        let qs = &b.quasimomenta;
        for band in 0..4 {
            for iq in 0..qs.len() {
                assert!(b.energies[band][iq] <= b.energies[band + 1][iq]);
            }
        }
        // q_j and q_{N-2-j} are mirror images
        let n = qs.len();
        for j in 0..n - 1 {
            let m = n - 2 - j;
            assert!((qs[j] + qs[m]).abs() < 1e-14);
            for band in 0..5 {
                assert!((b.energies[band][j] - b.energies[band][m]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn weak_lattice_is_slightly_perturbed() {
        let b = band_structure(&spec(2.0), 64, 5).unwrap();
        for (iq, &q) in b.quasimomenta.iter().enumerate() {
            assert!((b.energies[0][iq] - free_particle_energy(q, 0)).abs() < 1.0);
        }
    }

    #[test]
    fn deep_lattice_is_flat() {
        let b = band_structure(&spec(15.0), 64, 3).unwrap();
        assert!(b.bandwidth(0) < 0.05, "{}", b.bandwidth(0));
    }

    #[test]
    fn weights_limits() {
        let shallow = excitation_weights(&spec(0.01), 5).unwrap();
        assert!(shallow.weight(2).unwrap() >= 0.999);
        let deep = excitation_weights(&spec(15.0), 5).unwrap();
        let p = |i| deep.weight(i).unwrap();
        assert!(p(1) > p(2) && p(1) > p(3));
        let mid = excitation_weights(&spec(5.0), 5).unwrap();
        assert!(mid.weights.iter().filter(|&&w| w > 0.1).count() >= 2);
        for w in [&shallow, &deep, &mid] {
            assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(w.weights.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
        assert!(excitation_weights(&spec(5.0), 2).is_err());
    }

    #[test]
    fn q_star_energies_match_extended_zone_at_zero_depth() {
        let w = excitation_weights(&spec(0.0), 4).unwrap();
        let (q, _) = fold_to_first_bz(spec(0.0).probe_transfer());
        for (i, &band) in w.bands.iter().enumerate() {
            assert!((w.energies[i] - free_particle_energy(q, band)).abs() < 1e-9);
        }
        // the excitation carried by the probe sits at the extended-zone value (2k_p/k_t)²
        let k = spec(0.0).probe_transfer();
        assert!((w.energies[1] - k * k).abs() < 1e-9);
    }

    #[test]
    fn harmonic_gap() {
        assert_eq!(deep_lattice_gap(&spec(25.0)), 10.0);
        assert_eq!(deep_lattice_gap(&spec(0.0)), 0.0);
    }

    #[test]
    fn exact_gap_approaches_harmonic_estimate() {
        // anharmonic correction lowers the gap by ~1 E_r
        for depth in [25.0, 100.0] {
            let s = spec(depth).with_cutoff(24).unwrap();
            let exact = exact_band_gap(&s, 32).unwrap();
            let harmonic = deep_lattice_gap(&s);
            assert!(exact < harmonic && harmonic - exact < 1.5, "{depth}: {exact}");
        }
    }
}
