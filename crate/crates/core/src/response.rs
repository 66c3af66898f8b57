//! Classical resonator response η(t) to the drive.
//!
//! η̇ = −(iΔ_cd + κ/2) η − (i/2) Ω P(t), integrated with fixed-step RK4 on a
//! uniform grid starting from η(0) = 0. Higher derivatives follow from the
//! ODE itself and the analytic envelope derivatives.

use num_complex::Complex64;

use crate::model::{envelope_all, PulseSpec, SystemParams, TimeGrid, RAD_PER_NS};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest accepted step is this fraction of the fastest rate in rad/ns.
pub const STEP_FRACTION: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct ResonatorTrajectory {
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    pub eta: Vec<Complex64>,
    /// dη/dt per ns.
    pub eta_d1: Vec<Complex64>,
    pub eta_d2: Vec<Complex64>,
    pub eta_d3: Vec<Complex64>,
}

impl ResonatorTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn photon_number(&self) -> Vec<f64> {
        self.eta.iter().map(|e| e.norm_sqr()).collect()
    }

    pub(crate) fn check(&self) -> Result<TimeGrid> {
        let n = self.times.len();
        if [self.eta.len(), self.eta_d1.len(), self.eta_d2.len(), self.eta_d3.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::GridMismatch("trajectory arrays differ in length".into()));
        }
        let g = TimeGrid::from_times(&self.times)?;
        if g.len != self.grid.len || (g.dt_ns - self.grid.dt_ns).abs() > 1e-12 * g.dt_ns {
            return Err(Error::GridMismatch("trajectory grid disagrees with its sample times".into()));
        }
        Ok(g)
    }
}

/// Steady state under constant drive: (η_ss, n_c = |η_ss|²).
pub fn steady_state(p: &SystemParams, omega: f64) -> (Complex64, f64) {
    let eta = -0.5 * I * omega / Complex64::new(0.5 * p.kappa, p.delta_cd);
    let n = 0.25 * omega * omega / (p.delta_cd * p.delta_cd + 0.25 * p.kappa * p.kappa);
    (eta, n)
}

/// Drive amplitude that gives `photons` steady-state photons.
pub fn omega_for_photons(p: &SystemParams, photons: f64) -> f64 {
    2.0 * (photons * (p.delta_cd * p.delta_cd + 0.25 * p.kappa * p.kappa)).sqrt()
}

/// Largest stable step for [`solve_eta`] in ns.
pub fn max_step(p: &SystemParams, pulse: &PulseSpec) -> f64 {
    let scale = p.delta_cd.abs().max(p.kappa).max(pulse.omega().abs()) * RAD_PER_NS;
    if scale == 0.0 {
        f64::INFINITY
    } else {
        STEP_FRACTION / scale
    }
}

struct Rhs {
    lambda: Complex64,
    drive: Complex64,
}

impl Rhs {
    fn new(p: &SystemParams, pulse: &PulseSpec) -> Self {
        Rhs {
            lambda: -Complex64::new(0.5 * p.kappa, p.delta_cd) * RAD_PER_NS,
            drive: -0.5 * I * pulse.omega() * RAD_PER_NS,
        }
    }

    fn f(&self, eta: Complex64, env: f64) -> Complex64 {
        self.lambda * eta + self.drive * env
    }
}

pub fn solve_eta(p: &SystemParams, pulse: &PulseSpec, grid: &TimeGrid) -> Result<ResonatorTrajectory> {
    pulse.validate()?;
    let bound = max_step(p, pulse);
    if grid.dt_ns > bound {
        return Err(Error::StepSize { dt_ns: grid.dt_ns, max_ns: bound });
    }
    let rhs = Rhs::new(p, pulse);
    let h = grid.dt_ns;
    let mut eta = Vec::with_capacity(grid.len);
    let mut y = Complex64::new(0.0, 0.0);
    eta.push(y);
    for k in 1..grid.len {
        let t = grid.t(k - 1);
        let e0 = envelope_all(t, pulse)[0];
        let eh = envelope_all(t + 0.5 * h, pulse)[0];
        let e1 = envelope_all(t + h, pulse)[0];
        let k1 = rhs.f(y, e0);
        let k2 = rhs.f(y + 0.5 * h * k1, eh);
        let k3 = rhs.f(y + 0.5 * h * k2, eh);
        let k4 = rhs.f(y + h * k3, e1);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        eta.push(y);
    }
    let times = grid.times();
    let mut d1 = Vec::with_capacity(grid.len);
    let mut d2 = Vec::with_capacity(grid.len);
    let mut d3 = Vec::with_capacity(grid.len);
    for (k, &t) in times.iter().enumerate() {
        let env = envelope_all(t, pulse);
        let a = rhs.f(eta[k], env[0]);
        let b = rhs.lambda * a + rhs.drive * env[1];
        let c = rhs.lambda * b + rhs.drive * env[2];
        d1.push(a);
        d2.push(b);
        d3.push(c);
    }
    Ok(ResonatorTrajectory { grid: *grid, times, eta, eta_d1: d1, eta_d2: d2, eta_d3: d3 })
}
