//! Time-dependent resonator correlation functions and the transient generator.
//!
//! Each indefinite integral ∫^t f(t') e^{λ(t−t')} dt' is the bounded particular
//! solution of y' = f + λy. Modes with Re λ ≤ 0 are integrated forward from
//! y(0) = 0 (η vanishes before the pulse); modes with Re λ > 0 are integrated
//! backward from y(t_end) = 0, which requires the trajectory to extend past
//! the ring-down. The double integrals of the cross correlations factor into
//! products of single integrals plus one nested cascade.
//!
//! Correlations are returned in ν-units: A in 1/MHz, B and C in 1/MHz².

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::exec::{self, Execution};
use crate::model::{SystemParams, TimeGrid, RAD_PER_NS};
use crate::response::ResonatorTrajectory;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct LevelCorrelations {
    pub n_al: usize,
    pub n_ar: usize,
    pub a_ll: Vec<Complex64>,
    pub a_rr: Vec<Complex64>,
    pub b_lr: Vec<Complex64>,
    pub c_lr: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CorrelationSet {
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    pub photon: Vec<f64>,
    pub levels: Vec<LevelCorrelations>,
}

impl CorrelationSet {
    pub fn level(&self, n_al: usize, n_ar: usize) -> Option<&LevelCorrelations> {
        self.levels.iter().find(|l| l.n_al == n_al && l.n_ar == n_ar)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSeries {
    pub n_al: usize,
    pub n_ar: usize,
    pub times: Vec<f64>,
    /// E(t) in MHz.
    pub values: Vec<Complex64>,
}

/// Bounded solution of y' = s(t) + λ y on the grid, with sources and their
/// derivatives given at grid points (cubic Hermite midpoints). Returns (y, y').
fn particular(src: &[Complex64], dsrc: &[Complex64], lambda: Complex64, h: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = src.len();
    let mut y = vec![Complex64::default(); n];
    let mid = |k: usize| 0.5 * (src[k] + src[k + 1]) + (h / 8.0) * (dsrc[k] - dsrc[k + 1]);
    let step = |y0: Complex64, s0: Complex64, sm: Complex64, s1: Complex64, h: f64| {
        let k1 = s0 + lambda * y0;
        let k2 = sm + lambda * (y0 + 0.5 * h * k1);
        let k3 = sm + lambda * (y0 + 0.5 * h * k2);
        let k4 = s1 + lambda * (y0 + h * k3);
        y0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    if lambda.re <= 0.0 {
        for k in 0..n - 1 {
            y[k + 1] = step(y[k], src[k], mid(k), src[k + 1], h);
        }
    } else {
        for k in (0..n - 1).rev() {
            y[k] = step(y[k + 1], src[k + 1], mid(k), src[k], -h);
        }
    }
    let dy = (0..n).map(|k| src[k] + lambda * y[k]).collect();
    (y, dy)
}

struct Signals {
    h: f64,
    eta: Vec<Complex64>,
    deta: Vec<Complex64>,
    etac: Vec<Complex64>,
    detac: Vec<Complex64>,
}

impl Signals {
    fn new(traj: &ResonatorTrajectory) -> Result<Self> {
        let grid = traj.check()?;
        Ok(Signals {
            h: grid.dt_ns,
            eta: traj.eta.clone(),
            deta: traj.eta_d1.clone(),
            etac: traj.eta.iter().map(|z| z.conj()).collect(),
            detac: traj.eta_d1.iter().map(|z| z.conj()).collect(),
        })
    }

    /// ∫^t η*(t') e^{iD(t−t')} dt'.
    fn conj_kernel(&self, d: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        particular(&self.etac, &self.detac, I * d, self.h)
    }

    /// ∫^t η(t') e^{−iD(t−t')} dt'.
    fn kernel(&self, d: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        particular(&self.eta, &self.deta, -I * d, self.h)
    }

    /// A(t) in ns for angular detuning d (rad/ns).
    fn a(&self, d: Complex64) -> Vec<Complex64> {
        let (i1, _) = self.conj_kernel(d);
        let (i2, _) = self.kernel(d);
        (0..self.eta.len())
            .map(|k| (self.eta[k] * i1[k] - self.etac[k] * i2[k]) / (2.0 * I))
            .collect()
    }

    /// (B, C) in ns² for angular detunings dl, dr.
    fn bc(&self, dl: Complex64, dr: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let gap = I * (dr - dl);
        let (k1, dk1) = self.conj_kernel(dr);
        let (i2l, di2l) = self.kernel(dl);
        let (m1, _) = self.kernel(dr);
        let (i1l, _) = self.conj_kernel(dl);
        let (n2, _) = particular(&i2l, &di2l, -I * dr, self.h);
        let (n4, _) = particular(&k1, &dk1, I * dl, self.h);
        let n = self.eta.len();
        let mut b = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let (e, ec) = (self.eta[k], self.etac[k]);
            b.push(k1[k] * i2l[k] - 0.5 * (e * k1[k] + ec * i2l[k]) / gap);
            c.push(0.5 * ec * m1[k] / gap - 0.5 * ec * n2[k] + 0.5 * e * i1l[k] / gap - 0.5 * e * n4[k]);
        }
        (b, c)
    }
}

fn angular_left(p: &SystemParams, n: usize) -> Complex64 {
    p.detuning_left(n as f64) * RAD_PER_NS
}

fn angular_right(p: &SystemParams, n: usize) -> Complex64 {
    p.detuning_right(n as f64) * RAD_PER_NS
}

/// Correlation functions for each (n_al, n_ar) pair from the auxiliary ODE cascade.
pub fn correlations_timedomain(
    p: &SystemParams,
    traj: &ResonatorTrajectory,
    levels: &[(usize, usize)],
    mode: Execution,
) -> Result<CorrelationSet> {
    let sig = Signals::new(traj)?;
    if levels.is_empty() {
        return Err(Error::EmptySweep);
    }
    let r2 = RAD_PER_NS * RAD_PER_NS;
    let out = exec::map(mode, levels, |&(nl, nr)| {
        let (dl, dr) = (angular_left(p, nl), angular_right(p, nr));
        let a_ll = sig.a(dl).into_iter().map(|z| z * RAD_PER_NS).collect();
        let a_rr = sig.a(dr).into_iter().map(|z| z * RAD_PER_NS).collect();
        let (b, c) = sig.bc(dl, dr);
        LevelCorrelations {
            n_al: nl,
            n_ar: nr,
            a_ll,
            a_rr,
            b_lr: b.into_iter().map(|z| z * r2).collect(),
            c_lr: c.into_iter().map(|z| z * r2).collect(),
        }
    });
    Ok(CorrelationSet { grid: traj.grid, times: traj.times.clone(), photon: traj.photon_number(), levels: out })
}

/// Truncated adiabatic series for A on one copy at transmon level n, orders 0..=2, 1/MHz.
pub fn adiabatic_series_a(
    p: &SystemParams,
    traj: &ResonatorTrajectory,
    side: Side,
    n: usize,
    order: usize,
) -> Result<Vec<Complex64>> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    traj.check()?;
    let d = match side {
        Side::Left => angular_left(p, n),
        Side::Right => angular_right(p, n),
    };
    Ok((0..traj.len())
        .map(|k| {
            let (e, e1, e2) = (traj.eta[k], traj.eta_d1[k], traj.eta_d2[k]);
            let mut a = e.norm_sqr() / d;
            if order >= 1 {
                a += (e * e1.conj() - e.conj() * e1) / (2.0 * I * d * d);
            }
            if order >= 2 {
                a -= (e * e2.conj() + e.conj() * e2) / (2.0 * d * d * d);
            }
            a * RAD_PER_NS
        })
        .collect())
}

/// A on one copy from the separable frequency-domain kernel ½[1/(ω+Δ̂) + 1/(ω'+Δ̂)],
/// zero-padded to `n_freq` samples (power of two, ≥ trajectory length), 1/MHz.
pub fn fourier_a(p: &SystemParams, traj: &ResonatorTrajectory, side: Side, n: usize, n_freq: usize) -> Result<Vec<Complex64>> {
    let grid = traj.check()?;
    if !n_freq.is_power_of_two() {
        return Err(Error::Sampling(format!("n_freq = {n_freq} is not a power of two")));
    }
    if n_freq < traj.len() {
        return Err(Error::Sampling(format!("n_freq = {n_freq} shorter than {} samples", traj.len())));
    }
    let d = match side {
        Side::Left => angular_left(p, n),
        Side::Right => angular_right(p, n),
    };
    let nyquist = std::f64::consts::PI / grid.dt_ns;
    if d.re.abs() >= 0.5 * nyquist {
        return Err(Error::Sampling(format!(
            "detuning {:.4} rad/ns not resolved below half the Nyquist frequency {nyquist:.4} rad/ns",
            d.re.abs()
        )));
    }
    let g = filtered(&traj.eta, d, grid.dt_ns, n_freq);
    let gc: Vec<Complex64> = filtered(&traj.eta, d.conj(), grid.dt_ns, n_freq).into_iter().map(|z| z.conj()).collect();
    Ok((0..traj.len())
        .map(|k| 0.5 * (traj.eta[k] * gc[k] + traj.eta[k].conj() * g[k]) * RAD_PER_NS)
        .collect())
}

/// ∫dω/2π η̃(ω) e^{iωt} / (ω + d) on the first `x.len()` grid points.
fn filtered(x: &[Complex64], d: Complex64, dt: f64, m: usize) -> Vec<Complex64> {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut buf = vec![Complex64::default(); m];
    buf[..x.len()].copy_from_slice(x);
    fwd.process(&mut buf);
    let w0 = 2.0 * std::f64::consts::PI / (m as f64 * dt);
    for (j, v) in buf.iter_mut().enumerate() {
        let jj = if j < m / 2 { j as f64 } else { j as f64 - m as f64 };
        *v /= jj * w0 + d;
    }
    inv.process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.truncate(x.len());
    buf.into_iter().map(|z| z * scale).collect()
}

/// E(t) = 2χ|η|²(n_l − n_r) − 4χ²[A_ll n_l² − A_rr n_r²] + i4χ²κ[B/6 + C/2] n_l n_r.
pub fn effective_generator_timedep(p: &SystemParams, corr: &CorrelationSet, n_al: usize, n_ar: usize) -> Result<GeneratorSeries> {
    let lv = corr
        .level(n_al, n_ar)
        .ok_or_else(|| Error::Dimension(format!("correlations for ({n_al}, {n_ar}) not computed")))?;
    let (nl, nr) = (n_al as f64, n_ar as f64);
    let chi2 = p.chi * p.chi;
    let values = (0..corr.times.len())
        .map(|k| {
            Complex64::new(2.0 * p.chi * corr.photon[k] * (nl - nr), 0.0)
                - 4.0 * chi2 * (lv.a_ll[k] * nl * nl - lv.a_rr[k] * nr * nr)
                + I * 4.0 * chi2 * p.kappa * (lv.b_lr[k] / 6.0 + lv.c_lr[k] / 2.0) * nl * nr
        })
        .collect();
    Ok(GeneratorSeries { n_al, n_ar, times: corr.times.clone(), values })
}
