//! Conservative optomechanics: force, potential, self-consistent equilibria,
//! optical spring and quasi-static transmission sweeps.
//!
//! Equilibria are solved in the dimensionless variables
//! x = F z/(ħκ), δ = Δ_pc/κ and β = F² n_max/(Mω_z² ħκ) = 2ε²(κ/ω_z) n_max,
//! where force balance reads x·(1 + (δ − x)²) = β. Any root has 0 ≤ x ≤ β.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::find_real_roots;
use crate::params::CollectiveMode;

/// Grid nodes per monotone segment of the fixed-point residual.
pub const ROOT_GRID_POINTS: usize = 4096;

/// Branch continuity tolerance as a fraction of the stable-branch spacing.
pub const BRANCH_CONTINUITY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DriveCondition {
    /// Probe detuning from the atom-shifted cavity resonance, rad/s.
    pub delta_pc: f64,
    /// Intracavity photon number on resonance.
    pub n_max: f64,
    /// Cavity half-linewidth, rad/s.
    pub kappa: f64,
}

impl DriveCondition {
    pub fn new(delta_pc: f64, n_max: f64, kappa: f64) -> Result<Self> {
        if !delta_pc.is_finite() {
            return Err(Error::invalid("deltaPC", "must be finite"));
        }
        if !(n_max >= 0.0) || !n_max.is_finite() {
            return Err(Error::invalid("nMax", format!("must be finite and >= 0, got {n_max}")));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::invalid("kappa", format!("must be finite and > 0, got {kappa}")));
        }
        Ok(DriveCondition { delta_pc, n_max, kappa })
    }

    pub fn with_delta_pc(&self, delta_pc: f64) -> Self {
        DriveCondition { delta_pc, ..*self }
    }

    /// δ = Δ_pc/κ.
    pub fn delta(&self) -> f64 {
        self.delta_pc / self.kappa
    }
}

/// −Mω_z² z + F·n.
pub fn opto_force(z: f64, photons: f64, mode: &CollectiveMode) -> f64 {
    -mode.stiffness() * z + mode.per_photon_force * photons
}

/// Detuning of the probe from the displaced cavity resonance, in units of κ.
fn shifted_detuning(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> f64 {
    (d.delta_pc - mode.per_photon_force * z / mode.hbar) / d.kappa
}

/// n_max κ² / (κ² + (Δ_pc − F z/ħ)²).
pub fn intracavity_photons(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> f64 {
    let u = shifted_detuning(z, d, mode);
    d.n_max / (1.0 + u * u)
}

/// U(z) = ½Mω_z²z² + n_max ħκ arctan((Δ_pc − F z/ħ)/κ), J.
pub fn optomech_potential(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> f64 {
    let u = shifted_detuning(z, d, mode);
    0.5 * mode.stiffness() * z * z + d.n_max * mode.hbar * d.kappa * u.atan()
}

/// U''(z) = Mω_z² − 2 n_max F² u / (ħκ (1 + u²)²), J/m².
pub fn potential_curvature(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> f64 {
    let u = shifted_detuning(z, d, mode);
    let f = mode.per_photon_force;
    let w = 1.0 + u * u;
    mode.stiffness() - 2.0 * d.n_max * f * f * u / (mode.hbar * d.kappa * w * w)
}

/// U''(z)/(Mω_z²) = 1 − 2β u/(1 + u²)².
fn curvature_ratio(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> f64 {
    let u = shifted_detuning(z, d, mode);
    let beta = ReducedDrive::new(d, mode).beta;
    let w = 1.0 + u * u;
    1.0 - 2.0 * beta * u / (w * w)
}

/// Effective mechanical frequency sqrt(U''/M) at a stable point.
pub fn optical_spring_shift(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> Result<f64> {
    let ratio = curvature_ratio(z, d, mode);
    if !(ratio > 0.0) {
        return Err(Error::Unstable {
            curvature: ratio * mode.stiffness(),
        });
    }
    Ok(mode.omega_z * ratio.sqrt())
}

/// Dimensionless drive (δ, β) for a drive condition and mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedDrive {
    pub delta: f64,
    pub beta: f64,
}

impl ReducedDrive {
    pub fn new(d: &DriveCondition, mode: &CollectiveMode) -> Self {
        let f = mode.per_photon_force;
        ReducedDrive {
            delta: d.delta(),
            beta: f * f * d.n_max / (mode.stiffness() * mode.hbar * d.kappa),
        }
    }
}

/// x·(1 + (δ − x)²) − β. Same sign as x − β/(1 + (δ − x)²).
pub fn fixed_point_residual(x: f64, delta: f64, beta: f64) -> f64 {
    let u = delta - x;
    x * (1.0 + u * u) - beta
}

fn fixed_point_slope(x: f64, delta: f64) -> f64 {
    3.0 * x * x - 4.0 * delta * x + 1.0 + delta * delta
}

/// Search interval guaranteed to contain every root.
pub fn fixed_point_bracket(delta: f64, beta: f64) -> (f64, f64) {
    (delta.min(0.0) - beta - 1.0, delta.max(0.0) + beta + 1.0)
}

/// All real solutions x of the force-balance cubic, ascending.
pub fn fixed_point_roots(delta: f64, beta: f64) -> Vec<f64> {
    let (lo, hi) = fixed_point_bracket(delta, beta);
    // split at the residual's extrema so every segment is monotone
    let mut cuts = vec![lo];
    let disc = 4.0 * delta * delta - 12.0;
    if disc > 0.0 {
        let s = disc.sqrt();
        for c in [(4.0 * delta - s) / 6.0, (4.0 * delta + s) / 6.0] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
    }
    cuts.push(hi);

    let g = |x: f64| fixed_point_residual(x, delta, beta);
    let dedup = 1e-10 * (hi - lo);
    let mut roots: Vec<f64> = Vec::new();
    for seg in cuts.windows(2) {
        for r in find_real_roots(g, seg[0], seg[1], ROOT_GRID_POINTS) {
            let r = polish(r, delta, beta, seg[0], seg[1]);
            if roots.last().is_none_or(|&last| r - last > dedup) {
                roots.push(r);
            }
        }
    }
    roots
}

/// A few guarded Newton steps after bisection.
fn polish(mut x: f64, delta: f64, beta: f64, lo: f64, hi: f64) -> f64 {
    let mut gx = fixed_point_residual(x, delta, beta);
    for _ in 0..4 {
        let slope = fixed_point_slope(x, delta);
        if slope == 0.0 || gx == 0.0 {
            break;
        }
        let next = x - gx / slope;
        if !(next >= lo && next <= hi) {
            break;
        }
        let gn = fixed_point_residual(next, delta, beta);
        if gn.abs() >= gx.abs() {
            break;
        }
        x = next;
        gx = gn;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Equilibrium {
    pub z: f64,
    pub photons: f64,
    pub stable: bool,
    /// sqrt(U''/M) for stable points.
    pub omega_eff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    /// Ordered by z.
    pub solutions: Vec<Equilibrium>,
}

impl EquilibriumSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn stable(&self) -> impl Iterator<Item = &Equilibrium> {
        self.solutions.iter().filter(|s| s.stable)
    }

    pub fn is_bistable(&self) -> bool {
        self.stable().count() >= 2
    }
}

fn equilibrium_at(z: f64, d: &DriveCondition, mode: &CollectiveMode) -> Equilibrium {
    let omega_eff = optical_spring_shift(z, d, mode).ok();
    Equilibrium {
        z,
        photons: intracavity_photons(z, d, mode),
        stable: omega_eff.is_some(),
        omega_eff,
    }
}

pub fn equilibria(d: &DriveCondition, mode: &CollectiveMode) -> EquilibriumSet {
    let f = mode.per_photon_force;
    if f == 0.0 {
        return EquilibriumSet {
            solutions: vec![equilibrium_at(0.0, d, mode)],
        };
    }
    let reduced = ReducedDrive::new(d, mode);
    let scale = mode.hbar * d.kappa / f;
    let mut solutions: Vec<Equilibrium> = fixed_point_roots(reduced.delta, reduced.beta)
        .into_iter()
        .map(|x| equilibrium_at(x * scale, d, mode))
        .collect();
    solutions.sort_by(|a, b| a.z.total_cmp(&b.z));
    EquilibriumSet { solutions }
}

/// Solution counts per cell, indexed `[n_max][delta]`.
pub fn bistability_map(
    delta_grid: &[f64],
    n_max_grid: &[f64],
    mode: &CollectiveMode,
    kappa: f64,
) -> Result<Vec<Vec<usize>>> {
    if delta_grid.is_empty() || n_max_grid.is_empty() {
        return Err(Error::invalid(
            "grid",
            "detuning and photon-number grids must be nonempty",
        ));
    }
    n_max_grid
        .par_iter()
        .map(|&n_max| {
            delta_grid
                .iter()
                .map(|&delta_pc| {
                    let d = DriveCondition::new(delta_pc, n_max, kappa)?;
                    Ok(equilibria(&d, mode).len())
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepDirection::Up => "up",
            SweepDirection::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepPoint {
    pub delta_pc: f64,
    pub z: f64,
    pub photons: f64,
    pub branch_jump: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTrace {
    pub direction: SweepDirection,
    pub n_max: f64,
    pub kappa: f64,
    pub points: Vec<SweepPoint>,
}

impl SweepTrace {
    pub fn jumps(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| p.branch_jump)
    }
}

fn stable_spread(set: &EquilibriumSet) -> f64 {
    let mut zs = set.stable().map(|s| s.z);
    match zs.next() {
        None => 0.0,
        Some(first) => {
            let (lo, hi) = zs.fold((first, first), |(lo, hi), z| (lo.min(z), hi.max(z)));
            hi - lo
        }
    }
}

/// Quasi-static branch following across a detuning schedule.
///
/// Starts on the stable solution with the smallest |z|, then at each step
/// keeps the stable solution nearest the previous z. A step counts as a jump
/// when that nearest solution moved by more than `BRANCH_CONTINUITY` times the
/// separation of the stable branches (before or after the step).
pub fn transmission_sweep(
    schedule: &[DriveCondition],
    direction: SweepDirection,
    mode: &CollectiveMode,
) -> Result<SweepTrace> {
    let Some(first) = schedule.first() else {
        return Ok(SweepTrace {
            direction,
            n_max: 0.0,
            kappa: 0.0,
            points: Vec::new(),
        });
    };
    for pair in schedule.windows(2) {
        let ordered = match direction {
            SweepDirection::Up => pair[1].delta_pc >= pair[0].delta_pc,
            SweepDirection::Down => pair[1].delta_pc <= pair[0].delta_pc,
        };
        if !ordered {
            return Err(Error::invalid(
                "schedule",
                format!("detunings must be monotone for a {} sweep", direction.as_str()),
            ));
        }
        if pair[1].n_max != first.n_max || pair[1].kappa != first.kappa {
            return Err(Error::invalid("schedule", "nMax and kappa must be fixed along a sweep"));
        }
    }

    let mut points = Vec::with_capacity(schedule.len());
    let mut previous: Option<(f64, f64)> = None; // (z, stable spread)
    for d in schedule {
        let set = equilibria(d, mode);
        let spread = stable_spread(&set);
        let (chosen, jump) = match previous {
            None => {
                let start = set
                    .stable()
                    .min_by(|a, b| a.z.abs().total_cmp(&b.z.abs()))
                    .ok_or_else(|| Error::invalid("schedule", "no stable equilibrium"))?;
                (*start, false)
            }
            Some((z_prev, spread_prev)) => {
                let nearest = set
                    .stable()
                    .min_by(|a, b| (a.z - z_prev).abs().total_cmp(&(b.z - z_prev).abs()))
                    .ok_or_else(|| Error::invalid("schedule", "no stable equilibrium"))?;
                let spacing = spread.max(spread_prev);
                let jump = spacing > 0.0 && (nearest.z - z_prev).abs() > BRANCH_CONTINUITY * spacing;
                (*nearest, jump)
            }
        };
        points.push(SweepPoint {
            delta_pc: d.delta_pc,
            z: chosen.z,
            photons: chosen.photons,
            branch_jump: jump,
        });
        previous = Some((chosen.z, spread));
    }
    Ok(SweepTrace {
        direction,
        n_max: first.n_max,
        kappa: first.kappa,
        points,
    })
}

/// Evenly spaced drive conditions from δ_start to δ_end (units of κ).
pub fn linear_schedule(
    delta_start: f64,
    delta_end: f64,
    points: usize,
    n_max: f64,
    kappa: f64,
) -> Result<Vec<DriveCondition>> {
    if points < 2 {
        return Err(Error::invalid("points", "need at least 2 sweep points"));
    }
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            let delta = if i == points - 1 {
                delta_end
            } else {
                delta_start + (delta_end - delta_start) * t
            };
            DriveCondition::new(delta * kappa, n_max, kappa)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_collective_mode, PhysicalConstants, SystemParams};
    use std::f64::consts::PI;

    fn mode() -> CollectiveMode {
        let p = SystemParams::new(5e4, 2.0 * PI * 10e6, 2.0 * PI * 100e9, 2.0 * PI * 1e6, 2.0 * PI * 40e3).unwrap();
        derive_collective_mode(&p, &PhysicalConstants::CODATA).unwrap()
    }

    /// n_max giving the requested β for `mode()` at its own κ.
    fn n_max_for(beta: f64, m: &CollectiveMode) -> f64 {
        beta / (2.0 * m.granularity * m.granularity * m.kappa / m.omega_z)
    }

    fn brute_force_count(delta: f64, beta: f64) -> usize {
        let (lo, hi) = (-1.0, beta + 1.0);
        let n = 100_000;
        let g = |i: usize| fixed_point_residual(lo + (hi - lo) * i as f64 / (n - 1) as f64, delta, beta);
        let mut count = 0;
        let mut prev = g(0);
        for i in 1..n {
            let cur = g(i);
            if cur == 0.0 || (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
                count += 1;
            }
            prev = cur;
        }
        count
    }

    #[test]
    fn force_examples() {
        let m = mode();
        assert_eq!(opto_force(0.0, 0.0, &m), 0.0);
        let n = 3.0;
        let z = m.per_photon_force * n / m.stiffness();
        assert!(opto_force(z, n, &m).abs() < 1e-12 * m.per_photon_force * n);
        let harmonic = opto_force(m.z_ho, 0.0, &m);
        assert_eq!(harmonic, -m.mass * m.omega_z * m.omega_z * m.z_ho);
    }

    #[test]
    fn photon_number_examples() {
        let m = mode();
        let d = DriveCondition::new(3.0 * m.kappa, 2.0, m.kappa).unwrap();
        let z_res = d.delta_pc * m.hbar / m.per_photon_force;
        assert!((intracavity_photons(z_res, &d, &m) - 2.0).abs() < 1e-12);
        let half = DriveCondition::new(m.kappa, 2.0, m.kappa).unwrap();
        assert_eq!(intracavity_photons(0.0, &half, &m), 1.0);
        let dark = DriveCondition::new(m.kappa, 0.0, m.kappa).unwrap();
        assert_eq!(intracavity_photons(1e-9, &dark, &m), 0.0);
    }

    #[test]
    fn potential_limits() {
        let m = mode();
        let dark = DriveCondition::new(0.7 * m.kappa, 0.0, m.kappa).unwrap();
        for z in [-3e-9, 0.0, 1e-10] {
            assert_eq!(optomech_potential(z, &dark, &m), 0.5 * m.stiffness() * z * z);
        }
        let d = DriveCondition::new(0.7 * m.kappa, 5.0, m.kappa).unwrap();
        let bound = 5.0 * m.hbar * m.kappa * PI / 2.0;
        for i in -50..=50 {
            let z = i as f64 * 1e-9;
            let extra = optomech_potential(z, &d, &m) - 0.5 * m.stiffness() * z * z;
            assert!(extra.abs() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn potential_gradient_is_force() {
        let m = mode();
        let d = DriveCondition::new(2.0 * m.kappa, n_max_for(8.0, &m), m.kappa).unwrap();
        let h = m.z_ho * 1e-4;
        let span = 11.0 * m.hbar * m.kappa / m.per_photon_force;
        for i in 0..200 {
            let z = -span + 2.0 * span * i as f64 / 199.0;
            let numeric = -(optomech_potential(z + h, &d, &m) - optomech_potential(z - h, &d, &m)) / (2.0 * h);
            let analytic = opto_force(z, intracavity_photons(z, &d, &m), &m);
            let scale = analytic.abs().max(m.stiffness() * m.z_ho);
            assert!((numeric - analytic).abs() < 1e-8 * scale, "z={z}");
        }
    }

    #[test]
    fn undriven_equilibrium() {
        let m = mode();
        let d = DriveCondition::new(1.3 * m.kappa, 0.0, m.kappa).unwrap();
        let set = equilibria(&d, &m);
        assert_eq!(set.len(), 1);
        let s = set.solutions[0];
        assert_eq!(s.z, 0.0);
        assert!(s.stable);
        assert_eq!(s.omega_eff, Some(m.omega_z));
    }

    #[test]
    fn solution_counts_follow_brute_force() {
        // at δ = 2 the cubic has three roots only for 50/27 < β < 2
        assert_eq!(brute_force_count(2.0, 8.0), 1);
        assert_eq!(fixed_point_roots(2.0, 8.0).len(), 1);
        assert_eq!(brute_force_count(2.0, 1.9), 3);
        assert_eq!(fixed_point_roots(2.0, 1.9).len(), 3);
    }

    #[test]
    fn three_solutions_at_delta_4_beta_8() {
        assert_eq!(brute_force_count(4.0, 8.0), 3);
        let m = mode();
        let d = DriveCondition::new(4.0 * m.kappa, n_max_for(8.0, &m), m.kappa).unwrap();
        let set = equilibria(&d, &m);
        assert_eq!(set.len(), 3);
        let flags: Vec<bool> = set.solutions.iter().map(|s| s.stable).collect();
        assert_eq!(flags, vec![true, false, true]);
        for s in &set.solutions {
            let residual = m.stiffness() * s.z - m.per_photon_force * s.photons;
            assert!(residual.abs() < 1e-9 * m.stiffness() * s.z.abs().max(m.z_ho));
            let curvature = potential_curvature(s.z, &d, &m);
            assert_eq!(s.stable, curvature > 0.0);
        }
    }

    #[test]
    fn resonant_drive_is_monostable() {
        for beta in [0.5, 3.0, 20.0, 300.0] {
            assert_eq!(fixed_point_roots(0.0, beta).len(), 1);
            assert_eq!(brute_force_count(0.0, beta), 1);
        }
    }

    #[test]
    fn reduced_root_matches_direct_root_of_gradient() {
        let m = mode();
        let d = DriveCondition::new(4.0 * m.kappa, n_max_for(8.0, &m), m.kappa).unwrap();
        let set = equilibria(&d, &m);
        let span = 10.0 * m.hbar * m.kappa / m.per_photon_force;
        let grad = |z: f64| -opto_force(z, intracavity_photons(z, &d, &m), &m);
        let direct = find_real_roots(grad, -span, span, 20_000);
        assert_eq!(direct.len(), set.len());
        for (a, b) in direct.iter().zip(&set.solutions) {
            assert!((a - b.z).abs() < 1e-9 * b.z.abs().max(m.z_ho));
        }
    }

    #[test]
    fn spring_shift() {
        let m = mode();
        let dark = DriveCondition::new(m.kappa, 0.0, m.kappa).unwrap();
        assert_eq!(optical_spring_shift(0.0, &dark, &m).unwrap(), m.omega_z);

        // on the inflection point of the arctan the light adds no stiffness
        let d = DriveCondition::new(m.kappa, 3.0, m.kappa).unwrap();
        let z_res = d.delta_pc * m.hbar / m.per_photon_force;
        assert!((optical_spring_shift(z_res, &d, &m).unwrap() - m.omega_z).abs() < 1e-9 * m.omega_z);

        let soft = DriveCondition::new(m.kappa, n_max_for(0.2, &m), m.kappa).unwrap();
        let eq = equilibria(&soft, &m).solutions[0];
        let w = optical_spring_shift(eq.z, &soft, &m).unwrap();
        assert!(w < m.omega_z);
        let h = m.z_ho * 1e-3;
        let u = |z| optomech_potential(z, &soft, &m);
        let fd = (u(eq.z + h) - 2.0 * u(eq.z) + u(eq.z - h)) / (h * h);
        assert!(((fd / m.mass).sqrt() - w).abs() < 1e-6 * w);

        let bi = DriveCondition::new(4.0 * m.kappa, n_max_for(8.0, &m), m.kappa).unwrap();
        let unstable = equilibria(&bi, &m).solutions[1];
        assert!(matches!(
            optical_spring_shift(unstable.z, &bi, &m),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn map_counts() {
        let m = mode();
        let deltas: Vec<f64> = (-20..=20).map(|i| 0.25 * i as f64 * m.kappa).collect();
        let nmax = vec![0.0, n_max_for(2.0, &m), n_max_for(8.0, &m)];
        let counts = bistability_map(&deltas, &nmax, &m, m.kappa).unwrap();
        assert!(counts[0].iter().all(|&c| c == 1));
        assert!(counts.iter().flatten().all(|&c| (1..=3).contains(&c)));
        assert!(counts[2].contains(&3));
        assert!(bistability_map(&[], &nmax, &m, m.kappa).is_err());
    }

    #[test]
    fn bistable_window_one_sign_for_either_force_sign() {
        let m = mode();
        let flipped = CollectiveMode {
            per_photon_force: -m.per_photon_force,
            ..m
        };
        let deltas: Vec<f64> = (-40..=40).map(|i| 0.25 * i as f64 * m.kappa).collect();
        for mm in [m, flipped] {
            let counts = bistability_map(&deltas, &[n_max_for(8.0, &m)], &mm, m.kappa).unwrap();
            let bistable: Vec<f64> = deltas
                .iter()
                .zip(&counts[0])
                .filter(|(_, &c)| c == 3)
                .map(|(d, _)| d / m.kappa)
                .collect();
            assert!(!bistable.is_empty());
            assert!(bistable.iter().all(|&d| d > 0.0));
            for (&delta, &c) in deltas.iter().zip(&counts[0]) {
                assert_eq!(c, brute_force_count(delta / m.kappa, 8.0));
            }
        }
    }

    #[test]
    fn monostable_sweeps_agree() {
        let m = mode();
        let n = n_max_for(1.0, &m);
        let up = linear_schedule(-5.0, 5.0, 101, n, m.kappa).unwrap();
        let down: Vec<_> = up.iter().rev().copied().collect();
        let tu = transmission_sweep(&up, SweepDirection::Up, &m).unwrap();
        let td = transmission_sweep(&down, SweepDirection::Down, &m).unwrap();
        for (a, b) in tu.points.iter().zip(td.points.iter().rev()) {
            assert_eq!(a.photons, b.photons);
            assert!(!a.branch_jump && !b.branch_jump);
        }
    }

    #[test]
    fn hysteresis_in_window() {
        let m = mode();
        let n = n_max_for(8.0, &m);
        let up = linear_schedule(0.0, 4.0, 201, n, m.kappa).unwrap();
        let down = linear_schedule(4.0, 0.0, 201, n, m.kappa).unwrap();
        let tu = transmission_sweep(&up, SweepDirection::Up, &m).unwrap();
        let td = transmission_sweep(&down, SweepDirection::Down, &m).unwrap();
        let ju: Vec<f64> = tu.jumps().map(|p| p.delta_pc).collect();
        let jd: Vec<f64> = td.jumps().map(|p| p.delta_pc).collect();
        assert_ne!(ju, jd);
        // the down sweep starts on the low-photon branch and must leave it at the lower fold
        assert_eq!(jd.len(), 1);
        let fold = jd[0] / m.kappa;
        assert!(fold > 3.4 && fold < 3.7, "{fold}");

        for trace in [&tu, &td] {
            for p in &trace.points {
                let d = DriveCondition::new(p.delta_pc, n, m.kappa).unwrap();
                assert!(potential_curvature(p.z, &d, &m) > 0.0);
                let set = equilibria(&d, &m);
                assert!(set.stable().any(|s| s.z == p.z));
            }
        }
    }

    #[test]
    fn weak_drive_reproduces_bare_lorentzian() {
        let m = mode();
        let n = 1e-9;
        let sched = linear_schedule(-4.0, 4.0, 81, n, m.kappa).unwrap();
        let t = transmission_sweep(&sched, SweepDirection::Up, &m).unwrap();
        for p in &t.points {
            let delta = p.delta_pc / m.kappa;
            let bare = n / (1.0 + delta * delta);
            assert!((p.photons - bare).abs() < 1e-6 * n);
        }
    }

    #[test]
    fn sweep_contract_errors() {
        let m = mode();
        assert!(transmission_sweep(&[], SweepDirection::Up, &m)
            .unwrap()
            .points
            .is_empty());
        let sched = linear_schedule(0.0, 1.0, 5, 1.0, m.kappa).unwrap();
        assert!(transmission_sweep(&sched, SweepDirection::Down, &m).is_err());
    }
}
