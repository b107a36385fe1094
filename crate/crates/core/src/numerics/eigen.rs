//! Cyclic Jacobi diagonalization of dense Hermitian matrices.
//!
//! Each step first rotates the phase of row/column `q` so the pivot `h[p][q]`
//! becomes real, then applies an ordinary real plane rotation that zeroes it.
//! Sweeps visit pivots in fixed row-major order, so results are bit-for-bit
//! reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 512;
pub const MAX_SWEEPS: usize = 100;

const HERMITIAN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates Hermiticity to 1e-14 relative to the largest entry.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::invalid(
                "entries",
                format!("expected {} entries for dim {dim}, got {}", dim * dim, entries.len()),
            ));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if !scale.is_finite() {
            return Err(Error::invalid("entries", "non-finite matrix entry"));
        }
        for i in 0..dim {
            for j in i..dim {
                let dev = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                if dev > HERMITIAN_TOL * scale {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(HermitianMatrix { dim, entries })
    }

    /// Real symmetric tridiagonal matrix with constant off-diagonal.
    pub fn tridiagonal(diagonal: &[f64], off_diagonal: f64) -> Self {
        let dim = diagonal.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &d) in diagonal.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(d, 0.0);
            if i + 1 < dim {
                entries[i * dim + i + 1] = Complex64::new(off_diagonal, 0.0);
                entries[(i + 1) * dim + i] = Complex64::new(off_diagonal, 0.0);
            }
        }
        HermitianMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| {
                self.entries[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
///
/// Each vector's largest-magnitude component (first one on ties) is real and
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[i * n + j].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

pub fn hermitian_eigen(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim;
    if n > MAX_DIM {
        return Err(Error::invalid("dim", format!("{n} exceeds the maximum of {MAX_DIM}")));
    }
    let mut a = h.entries.clone();
    // symmetrize exactly so the diagonal stays real through the rotations
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = f64::EPSILON * frob;
    let mut converged = n <= 1 || off_diagonal_norm(&a, n) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
        converged = off_diagonal_norm(&a, n) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_diagonal_norm(&a, n),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re).then(i.cmp(&j)));

    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<Complex64> = (0..n).map(|i| v[i * n + k]).collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Zeroes a[p][q] (and a[q][p]) with a unitary similarity transform.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // skip pivots already negligible against both diagonal entries
    if r < 1e-300 || (app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs()) {
        a[p * n + q] = Complex64::new(0.0, 0.0);
        a[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }

    // phase step: D = diag(.., e^{-iφ} at q ..), A <- D† A D makes a[p][q] = r
    let phase = apq / r; // e^{iφ}
    let dq = phase.conj();
    for k in 0..n {
        a[k * n + q] *= dq;
    }
    for k in 0..n {
        a[q * n + k] *= phase;
    }
    for k in 0..n {
        v[k * n + q] *= dq;
    }

    // real rotation, columns: a'_kp = c a_kp - s a_kq, a'_kq = s a_kp + c a_kq
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * s;
        a[k * n + q] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * s;
        a[q * n + k] = apk * s + aqk * c;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - vkq * s;
        v[k * n + q] = vkp * s + vkq * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

fn fix_phase(col: &mut [Complex64]) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = m;
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let phase = col[best].conj() / best_norm;
    for z in col.iter_mut() {
        *z *= phase;
    }
    col[best] = Complex64::new(best_norm, 0.0);
}
