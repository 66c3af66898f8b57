//! Exact spectrum of the doubled-space generator and tracking of the
//! |1⟩⟨0| coherence eigenvalue along a drive sweep.
//!
//! H_u never changes the transmon labels (n_al, n_ar), so it is block
//! diagonal with n_a² blocks of size n_c². Each block carries the constant
//! transmon offset E_a(n_al) − E_a(n_ar), which is removed before the
//! eigensolve and added back afterwards.

use num_complex::Complex64;

use crate::exec::{self, Execution};
use crate::linalg::{eig, frobenius, residuals, CMatrix};
use crate::liouville::{build_extended_hamiltonian, ExtendedOperator};
use crate::model::SystemParams;
use crate::response::steady_state;
use crate::{Error, Result};

/// Accepted eigenpair residual relative to ‖M‖_F.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Minimal overlap between consecutive tracked eigenvectors.
pub const TRACK_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct EigenSet {
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: CMatrix,
    pub residuals: Vec<f64>,
    pub matrix_norm: f64,
}

pub fn eigendecompose(m: &CMatrix) -> Result<EigenSet> {
    let e = eig(m, true)?;
    let res = residuals(m, &e);
    let norm = frobenius(m);
    let worst = res.iter().copied().fold(0.0, f64::max);
    if worst > RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence(format!("residual {worst:.3e} exceeds {RESIDUAL_TOL:e} * {norm:.3e}")));
    }
    Ok(EigenSet { values: e.values, vectors: e.vectors, residuals: res, matrix_norm: norm })
}

/// Transmon offset of the (n_al, n_ar) block.
pub fn sector_offset(p: &SystemParams, n_al: usize, n_ar: usize) -> f64 {
    p.qubit_energy(n_al) - p.qubit_energy(n_ar)
}

/// Eigenpairs of one transmon block; vectors are in block coordinates.
pub fn sector_eigen(p: &SystemParams, h: &ExtendedOperator, n_al: usize, n_ar: usize) -> Result<(Vec<usize>, EigenSet)> {
    let (idx, mut block) = h.sector_block(p, n_al, n_ar);
    let shift = sector_offset(p, n_al, n_ar);
    for i in 0..block.nrows() {
        block[[i, i]] -= shift;
    }
    let mut set = eigendecompose(&block)?;
    for v in set.values.iter_mut() {
        *v += shift;
    }
    Ok((idx, set))
}

/// Full spectrum of H_u as the union of all transmon blocks.
pub fn full_spectrum(p: &SystemParams, omega: f64, mode: Execution) -> Result<Vec<Complex64>> {
    let h = build_extended_hamiltonian(p, omega)?;
    let sectors: Vec<(usize, usize)> =
        (0..p.n_a).flat_map(|l| (0..p.n_a).map(move |r| (l, r))).collect();
    let parts = exec::try_map(mode, &sectors, |&(l, r)| sector_eigen(p, &h, l, r).map(|(_, s)| s.values))?;
    Ok(parts.into_iter().flatten().collect())
}

#[derive(Debug, Clone)]
pub struct TrackPoint {
    pub omega: f64,
    pub photon: f64,
    pub value: Complex64,
    pub overlap: f64,
    /// Unit eigenvector in (1, 0)-block coordinates.
    pub vector: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CoherenceTrack {
    pub params: SystemParams,
    /// Doubled-space indices of the (1, 0) block.
    pub indices: Vec<usize>,
    pub points: Vec<TrackPoint>,
}

impl CoherenceTrack {
    /// Tracked eigenvector of point k in the full doubled space.
    pub fn embed(&self, k: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); self.params.extended_dim()];
        for (i, &g) in self.indices.iter().enumerate() {
            v[g] = self.points[k].vector[i];
        }
        v
    }
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    dot.norm() / (na * nb).sqrt()
}

/// Follow the eigenvalue that starts as the bare |1⟩⟨0| coherence (vacuum
/// resonator, eigenvalue E_a(1) − E_a(0)) through the drive grid by maximal
/// eigenvector overlap.
pub fn track_coherence(p: &SystemParams, omegas: &[f64], mode: Execution) -> Result<CoherenceTrack> {
    if omegas.is_empty() {
        return Err(Error::EmptySweep);
    }
    let h0 = build_extended_hamiltonian(p, 0.0)?;
    let (indices, _) = h0.sector_block(p, 1, 0);
    let dim = indices.len();
    let decomps = exec::try_map(mode, omegas, |&om| -> Result<Option<EigenSet>> {
        if om == 0.0 {
            return Ok(None);
        }
        let h = build_extended_hamiltonian(p, om)?;
        sector_eigen(p, &h, 1, 0).map(|(_, s)| Some(s))
    })?;
    let mut basis = vec![Complex64::default(); dim];
    basis[0] = Complex64::new(1.0, 0.0);
    let mut prev = basis.clone();
    let bare = sector_offset(p, 1, 0);
    let mut points = Vec::with_capacity(omegas.len());
    for (&om, dec) in omegas.iter().zip(decomps) {
        let photon = steady_state(p, om).1;
        let point = match dec {
            None => TrackPoint {
                omega: om,
                photon,
                value: Complex64::new(bare, 0.0),
                overlap: overlap(&prev, &basis),
                vector: basis.clone(),
            },
            Some(set) => {
                let mut best = (0usize, -1.0);
                for k in 0..set.values.len() {
                    let col: Vec<Complex64> = set.vectors.column(k).to_vec();
                    let o = overlap(&prev, &col);
                    if o > best.1 {
                        best = (k, o);
                    }
                }
                TrackPoint {
                    omega: om,
                    photon,
                    value: set.values[best.0],
                    overlap: best.1,
                    vector: set.vectors.column(best.0).to_vec(),
                }
            }
        };
        if point.overlap <= TRACK_OVERLAP {
            return Err(Error::TrackingLost { omega_mhz: om, overlap: point.overlap });
        }
        prev = point.vector.clone();
        points.push(point);
    }
    Ok(CoherenceTrack { params: *p, indices, points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedRates {
    pub omega: f64,
    pub photon: f64,
    pub value: Complex64,
    pub stark: f64,
    pub dephasing: f64,
    pub overlap: f64,
}

pub fn extract_rates(track: &CoherenceTrack) -> Vec<TrackedRates> {
    let bare = sector_offset(&track.params, 1, 0);
    track
        .points
        .iter()
        .map(|pt| TrackedRates {
            omega: pt.omega,
            photon: pt.photon,
            value: pt.value,
            stark: pt.value.re - bare,
            dephasing: -pt.value.im,
            overlap: pt.overlap,
        })
        .collect()
}
