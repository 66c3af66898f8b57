//! Adiabatic effective dynamics of the transmon after eliminating the resonator.
//!
//! Every coherence ρ_mn evolves with its own complex frequency E(m, n): the
//! real part is the measurement-induced Stark shift, −Im the dephasing rate.

use num_complex::Complex64;

use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::model::{SystemParams, TimeGrid, RAD_PER_NS};
use crate::{Error, Result};

/// Resonator correlation functions at constant photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlations {
    pub a_ll: Complex64,
    pub a_rr: Complex64,
    pub b_lr: Complex64,
    pub c_lr: Complex64,
}

pub fn adiabatic_correlations(p: &SystemParams, photon: f64, n_al: f64, n_ar: f64) -> Result<Correlations> {
    let dl = p.detuning_left(n_al);
    let dr = p.detuning_right(n_ar);
    if dl.norm() == 0.0 || dr.norm() == 0.0 {
        return Err(Error::DegenerateDetuning(format!("zero level detuning at n_al = {n_al}, n_ar = {n_ar}")));
    }
    let bc = 1.5 * photon / (dl * dr);
    Ok(Correlations { a_ll: photon / dl, a_rr: photon / p.detuning_right(n_ar), b_lr: bc, c_lr: bc })
}

/// |Δ̂(n)|² = (Δ_cd + 2χn)² + κ²/4.
#[inline]
fn level_norm2(p: &SystemParams, n: f64) -> f64 {
    let x = p.delta_cd + 2.0 * p.chi * n;
    x * x + 0.25 * p.kappa * p.kappa
}

/// E(m, n) for the coherence |m⟩⟨n| at photon number |η|², MHz.
pub fn effective_spectrum(p: &SystemParams, photon: f64, m: usize, n: usize) -> Complex64 {
    let (mf, nf) = (m as f64, n as f64);
    let k2 = 0.25 * p.kappa * p.kappa;
    let d0 = p.delta_cd * p.delta_cd + k2;
    let denom = level_norm2(p, mf) * level_norm2(p, nf);
    let xm = p.delta_cd + 2.0 * p.chi * mf;
    let xn = p.delta_cd + 2.0 * p.chi * nf;
    let sym_re = 2.0 * p.chi * d0 * (xm * xn + k2) * photon / denom;
    let diff = mf - nf;
    let im = -2.0 * p.chi * p.chi * p.kappa * d0 * photon / denom * (diff * diff);
    Complex64::new(sym_re * diff, im)
}

/// Measurement-induced Stark shift and dephasing rate of the |1⟩⟨0| coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub stark: f64,
    pub dephasing: f64,
}

pub fn rates(p: &SystemParams, photon: f64) -> RatePair {
    let x1 = p.delta_cd + 2.0 * p.chi;
    let d1 = level_norm2(p, 1.0);
    RatePair {
        stark: (2.0 * p.chi - 4.0 * p.chi * p.chi * x1 / d1) * photon,
        dephasing: 2.0 * p.chi * p.chi * p.kappa * photon / d1,
    }
}

/// Two-level steady-state comparison rates (χ-symmetric convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GambettaRates {
    pub n_plus: f64,
    pub n_minus: f64,
    pub dephasing: f64,
}

pub fn gambetta_rates(p: &SystemParams, omega: f64) -> GambettaRates {
    let k2 = 0.25 * p.kappa * p.kappa;
    let amp = 0.25 * omega * omega;
    let dp = p.delta_cd + p.chi;
    let dm = p.delta_cd - p.chi;
    let n_plus = amp / (dp * dp + k2);
    let n_minus = amp / (dm * dm + k2);
    let dephasing =
        p.chi * p.chi * p.kappa * (n_plus + n_minus) / (p.delta_cd * p.delta_cd + p.chi * p.chi + k2);
    GambettaRates { n_plus, n_minus, dephasing }
}

/// Number-diagonal Lindblad form: H = Σ h_n |n⟩⟨n|, one collapse C = Σ c_n |n⟩⟨n|.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLindblad {
    pub h: Vec<f64>,
    pub c: Vec<Complex64>,
}

impl EffectiveLindblad {
    /// Complex frequency of |m⟩⟨n| generated by this Lindbladian.
    pub fn frequency(&self, m: usize, n: usize) -> Complex64 {
        let (cm, cn) = (self.c[m], self.c[n]);
        let diss = cm * cn.conj() - 0.5 * (cm.norm_sqr() + cn.norm_sqr());
        Complex64::new(self.h[m] - self.h[n], 0.0) + Complex64::i() * diss
    }
}

pub fn effective_lindblad(p: &SystemParams, photon: f64) -> EffectiveLindblad {
    let chi2 = p.chi * p.chi;
    let amp = (4.0 * chi2 * p.kappa * photon).sqrt();
    let mut h = Vec::with_capacity(p.n_a);
    let mut c = Vec::with_capacity(p.n_a);
    for n in 0..p.n_a {
        let nf = n as f64;
        let x = p.delta_cd + 2.0 * p.chi * nf;
        h.push(2.0 * p.chi * photon * nf - 4.0 * chi2 * photon * x * nf * nf / level_norm2(p, nf));
        c.push(amp * nf / p.detuning_left(nf));
    }
    EffectiveLindblad { h, c }
}

/// ρ_mn(t) = ρ_mn(0) exp(−2πi ∫ E_mn dt') along a photon-number series, trapezoid rule.
pub fn effective_map_apply(
    p: &SystemParams,
    rho0: &CMatrix,
    photons: &[f64],
    grid: &TimeGrid,
) -> Result<Vec<CMatrix>> {
    let (d, d2) = rho0.dim();
    if d != d2 || d > p.n_a {
        return Err(Error::Dimension(format!("rho0 is {d}x{d2}, transmon has {} levels", p.n_a)));
    }
    if photons.len() != grid.len {
        return Err(Error::GridMismatch(format!("{} photon samples for {} grid points", photons.len(), grid.len)));
    }
    let herm = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (rho0[[i, j]] - rho0[[j, i]].conj()).norm())
        .fold(0.0, f64::max);
    if herm > 1e-12 {
        return Err(Error::NonHermitian(herm));
    }
    // E is linear in the photon number.
    let unit: Vec<Complex64> =
        (0..d * d).map(|k| effective_spectrum(p, 1.0, k / d, k % d)).collect();
    let mut out = Vec::with_capacity(grid.len);
    let mut area = 0.0;
    out.push(rho0.clone());
    for k in 1..grid.len {
        area += 0.5 * grid.dt_ns * (photons[k - 1] + photons[k]);
        let rho = CMatrix::from_shape_fn((d, d), |(i, j)| {
            rho0[[i, j]] * (-Complex64::i() * unit[i * d + j] * (area * RAD_PER_NS)).exp()
        });
        out.push(rho);
    }
    Ok(out)
}

/// Choi matrix of the Schur-multiplier channel ρ_mn → ρ_mn·exp(−2πi E(m,n) t).
pub fn choi_matrix<F>(levels: usize, t_ns: f64, e: F) -> CMatrix
where
    F: Fn(usize, usize) -> Complex64,
{
    let d = levels;
    let mut choi = CMatrix::zeros((d * d, d * d));
    for m in 0..d {
        for n in 0..d {
            choi[[m * d + m, n * d + n]] = (-Complex64::i() * e(m, n) * (RAD_PER_NS * t_ns)).exp();
        }
    }
    choi
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiReport {
    pub min_eigenvalue: f64,
    pub trace_preserving_error: f64,
}

impl ChoiReport {
    pub fn is_cptp(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol && self.trace_preserving_error <= tol
    }
}

pub fn choi_report(choi: &CMatrix, levels: usize) -> ChoiReport {
    let ev = hermitian_eigenvalues(choi);
    // Tr_out J = I on the input factor.
    let d = levels;
    let mut tp: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s: Complex64 = (0..d).map(|k| choi[[i * d + k, j * d + k]]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            tp = tp.max((s - target).norm());
        }
    }
    ChoiReport { min_eigenvalue: ev[0], trace_preserving_error: tp }
}

pub fn choi_cptp_check(p: &SystemParams, photon: f64, t_ns: f64) -> ChoiReport {
    let choi = choi_matrix(p.n_a, t_ns, |m, n| effective_spectrum(p, photon, m, n));
    choi_report(&choi, p.n_a)
}
