//! System parameters, drive envelopes and the validity margin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Angular frequency in rad/ns of a 1 MHz (ν-units) frequency.
pub const RAD_PER_NS: f64 = 2.0 * std::f64::consts::PI * 1e-3;

/// Transmon + readout resonator in the frame of the drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub delta_ad: f64,
    pub delta_cd: f64,
    pub alpha: f64,
    pub chi: f64,
    pub kappa: f64,
    pub n_a: usize,
    pub n_c: usize,
}

impl SystemParams {
    pub fn new(
        delta_ad: f64,
        delta_cd: f64,
        alpha: f64,
        chi: f64,
        kappa: f64,
        n_a: usize,
        n_c: usize,
    ) -> Result<Self> {
        let p = SystemParams { delta_ad, delta_cd, alpha, chi, kappa, n_a, n_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_ad_mhz", self.delta_ad),
            ("delta_cd_mhz", self.delta_cd),
            ("alpha_a_mhz", self.alpha),
            ("chi_ac_mhz", self.chi),
            ("kappa_c_mhz", self.kappa),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParams { key, reason: format!("not finite ({v})") });
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParams { key: "kappa_c_mhz", reason: "must be > 0".into() });
        }
        if self.n_a < 2 {
            return Err(Error::InvalidParams { key: "n_a", reason: "need at least 2 levels".into() });
        }
        if self.n_c < 2 {
            return Err(Error::InvalidParams { key: "n_c", reason: "need at least 2 Fock states".into() });
        }
        Ok(())
    }

    pub fn with_truncation(mut self, n_a: usize, n_c: usize) -> Self {
        self.n_a = n_a;
        self.n_c = n_c;
        self
    }

    /// Single-copy Hilbert-space dimension n_a·n_c.
    pub fn single_dim(&self) -> usize {
        self.n_a * self.n_c
    }

    /// Doubled-space dimension (n_a·n_c)².
    pub fn extended_dim(&self) -> usize {
        self.single_dim() * self.single_dim()
    }

    /// Bare transmon energy of level n: Δ_ad n + (α/2) n(n-1).
    pub fn qubit_energy(&self, n: usize) -> f64 {
        let n = n as f64;
        self.delta_ad * n + 0.5 * self.alpha * n * (n - 1.0)
    }

    /// Δ̂_l(n) = Δ_cd − iκ/2 + 2χn.
    pub fn detuning_left(&self, n: f64) -> Complex64 {
        LevelDetuning::left(self, n).value
    }

    /// Δ̂_r(n) = Δ_cd + iκ/2 + 2χn.
    pub fn detuning_right(&self, n: f64) -> Complex64 {
        LevelDetuning::right(self, n).value
    }
}

/// Complex, level-dependent resonator detuning on one copy of the doubled space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDetuning {
    pub level: f64,
    pub value: Complex64,
}

impl LevelDetuning {
    pub fn left(p: &SystemParams, n: f64) -> Self {
        LevelDetuning { level: n, value: Complex64::new(p.delta_cd + 2.0 * p.chi * n, -0.5 * p.kappa) }
    }

    pub fn right(p: &SystemParams, n: f64) -> Self {
        LevelDetuning { level: n, value: Complex64::new(p.delta_cd + 2.0 * p.chi * n, 0.5 * p.kappa) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseSpec {
    /// Envelope 1 at all times.
    Constant { omega: f64 },
    /// Gaussian ramps of width σ_r over τ_r, flat top, total length τ_p.
    SquareGaussian { omega: f64, tau_p: f64, tau_r: f64, sigma_r: f64 },
}

impl PulseSpec {
    pub fn constant(omega: f64) -> Self {
        PulseSpec::Constant { omega }
    }

    pub fn square_gaussian(omega: f64, tau_p: f64, tau_r: f64, sigma_r: f64) -> Result<Self> {
        let p = PulseSpec::SquareGaussian { omega, tau_p, tau_r, sigma_r };
        p.validate()?;
        Ok(p)
    }

    pub fn omega(&self) -> f64 {
        match *self {
            PulseSpec::Constant { omega } | PulseSpec::SquareGaussian { omega, .. } => omega,
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        match self {
            PulseSpec::Constant { .. } => PulseSpec::Constant { omega },
            PulseSpec::SquareGaussian { tau_p, tau_r, sigma_r, .. } => {
                PulseSpec::SquareGaussian { omega, tau_p, tau_r, sigma_r }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PulseSpec::Constant { omega } => {
                if !omega.is_finite() {
                    return Err(Error::InvalidPulse("omega_c_mhz not finite".into()));
                }
            }
            PulseSpec::SquareGaussian { omega, tau_p, tau_r, sigma_r } => {
                if !(omega.is_finite() && tau_p.is_finite() && tau_r.is_finite() && sigma_r.is_finite()) {
                    return Err(Error::InvalidPulse("non-finite pulse parameter".into()));
                }
                if sigma_r <= 0.0 {
                    return Err(Error::InvalidPulse("sigma_r_ns must be > 0".into()));
                }
                if tau_r <= 0.0 {
                    return Err(Error::InvalidPulse("tau_r_ns must be > 0".into()));
                }
                if tau_p < 2.0 * tau_r {
                    return Err(Error::InvalidPulse(format!(
                        "tau_p_ns ({tau_p}) must be >= 2 tau_r_ns ({})",
                        2.0 * tau_r
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Normalized Gaussian ramp and its derivatives, u = t minus the ramp center.
fn ramp(u: f64, sigma: f64, g0: f64) -> [f64; 4] {
    let s2 = sigma * sigma;
    let g = (-u * u / (2.0 * s2)).exp();
    let norm = 1.0 / (1.0 - g0);
    [
        (g - g0) * norm,
        -u / s2 * g * norm,
        (u * u / (s2 * s2) - 1.0 / s2) * g * norm,
        (-u * u * u / (s2 * s2 * s2) + 3.0 * u / (s2 * s2)) * g * norm,
    ]
}

/// Envelope value and its first three time derivatives (per ns^k).
pub(crate) fn envelope_all(t: f64, pulse: &PulseSpec) -> [f64; 4] {
    match *pulse {
        PulseSpec::Constant { .. } => [1.0, 0.0, 0.0, 0.0],
        PulseSpec::SquareGaussian { tau_p, tau_r, sigma_r, .. } => {
            if !(0.0..=tau_p).contains(&t) {
                return [0.0; 4];
            }
            let g0 = (-tau_r * tau_r / (2.0 * sigma_r * sigma_r)).exp();
            if t < tau_r {
                ramp(t - tau_r, sigma_r, g0)
            } else if t <= tau_p - tau_r {
                [1.0, 0.0, 0.0, 0.0]
            } else {
                ramp(t - (tau_p - tau_r), sigma_r, g0)
            }
        }
    }
}

/// Dimensionless drive envelope P(t) ∈ [0, 1].
pub fn sg_envelope(t_ns: f64, pulse: &PulseSpec) -> f64 {
    envelope_all(t_ns, pulse)[0]
}

/// [P, P', …, P^(order)] at `t_ns`, derivatives per ns^k.
pub fn envelope_derivatives(t_ns: f64, pulse: &PulseSpec, order: usize) -> Result<Vec<f64>> {
    if order > 3 {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(envelope_all(t_ns, pulse)[..=order].to_vec())
}

/// |χΩ| / (|Δ̂(0)| |Δ̂(1)|); the dispersive expansion needs this ≪ 1.
pub fn validity_margin(p: &SystemParams, omega: f64) -> Result<f64> {
    let k2 = 0.25 * p.kappa * p.kappa;
    let d0 = (p.delta_cd * p.delta_cd + k2).sqrt();
    let x1 = p.delta_cd + 2.0 * p.chi;
    let d1 = (x1 * x1 + k2).sqrt();
    if d0 == 0.0 || d1 == 0.0 {
        return Err(Error::DegenerateDetuning(format!(
            "delta_cd = {}, kappa = {}",
            p.delta_cd, p.kappa
        )));
    }
    Ok((p.chi * omega).abs() / (d0 * d1))
}

/// Uniform time grid t_k = k·dt_ns, k = 0..len.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt_ns: f64,
    pub len: usize,
}

impl TimeGrid {
    /// Grid covering [0, t_end_ns] with step dt_ns (t_end rounded to a whole step).
    pub fn new(dt_ns: f64, t_end_ns: f64) -> Result<Self> {
        if !(dt_ns > 0.0 && dt_ns.is_finite()) {
            return Err(Error::GridMismatch(format!("dt_ns must be > 0, got {dt_ns}")));
        }
        if !(t_end_ns >= 0.0 && t_end_ns.is_finite()) {
            return Err(Error::GridMismatch(format!("t_end_ns must be >= 0, got {t_end_ns}")));
        }
        let steps = (t_end_ns / dt_ns).round() as usize;
        Ok(TimeGrid { dt_ns, len: steps + 1 })
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt_ns
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.len - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.t(k)).collect()
    }

    /// Recover the grid from explicit sample times, rejecting non-uniform input.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::GridMismatch("need at least two samples".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::GridMismatch(format!("grid must start at 0, got {}", times[0])));
        }
        let dt = times[1] - times[0];
        let tol = 1e-9 * dt.max(1.0) * times.len() as f64;
        for (k, &t) in times.iter().enumerate() {
            if (t - k as f64 * dt).abs() > tol {
                return Err(Error::GridMismatch(format!("non-uniform sample {k} at t = {t}")));
            }
        }
        if dt <= 0.0 {
            return Err(Error::GridMismatch("non-increasing grid".into()));
        }
        Ok(TimeGrid { dt_ns: dt, len: times.len() })
    }
}

/// JSON config with the system keys and a `pulse` block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub delta_ad_mhz: f64,
    pub delta_cd_mhz: f64,
    pub alpha_a_mhz: f64,
    pub chi_ac_mhz: f64,
    pub kappa_c_mhz: f64,
    pub n_a: usize,
    pub n_c: usize,
    pub pulse: PulseConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    /// `constant` or `square_gaussian`.
    pub kind: String,
    pub omega_c_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_p_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_r_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_r_ns: Option<f64>,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.delta_ad_mhz,
            self.delta_cd_mhz,
            self.alpha_a_mhz,
            self.chi_ac_mhz,
            self.kappa_c_mhz,
            self.n_a,
            self.n_c,
        )
    }

    pub fn pulse(&self) -> Result<PulseSpec> {
        self.pulse.to_spec()
    }
}

impl PulseConfig {
    pub fn to_spec(&self) -> Result<PulseSpec> {
        match self.kind.as_str() {
            "constant" => {
                let p = PulseSpec::constant(self.omega_c_mhz);
                p.validate()?;
                Ok(p)
            }
            "square_gaussian" => {
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| Error::Config(format!("missing field `pulse.{key}` for square_gaussian")))
                };
                PulseSpec::square_gaussian(
                    self.omega_c_mhz,
                    need(self.tau_p_ns, "tau_p_ns")?,
                    need(self.tau_r_ns, "tau_r_ns")?,
                    need(self.sigma_r_ns, "sigma_r_ns")?,
                )
            }
            other => Err(Error::Config(format!(
                "invalid value `{other}` for key `pulse.kind` (expected constant | square_gaussian)"
            ))),
        }
    }
}
