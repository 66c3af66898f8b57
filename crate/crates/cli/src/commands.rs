//! Subcommand pipelines. Each returns a table in grid order.

use anyhow::{bail, Context, Result};
use dispmap_core::effective::{effective_map_apply, effective_spectrum, gambetta_rates, rates};
use dispmap_core::eigenstates::coherence_eigenstate_reports;
use dispmap_core::exec::{self, Execution};
use dispmap_core::io::{
    eigenstate_table, level_grid_table, matrix_dump_table, spectra_table, sweep_table, transient_table, SweepRow,
    Table,
};
use dispmap_core::linalg::CMatrix;
use dispmap_core::liouville::{build_extended_hamiltonian, max_propagation_step, propagate, VectorizedState};
use dispmap_core::model::{SystemParams, TimeGrid};
use dispmap_core::response::{solve_eta, steady_state};
use dispmap_core::spectra::{extract_rates, track_coherence};
use dispmap_core::transient::{correlations_timedomain, effective_generator_timedep};
use dispmap_core::Complex64;

use crate::config;

/// Photon number (Ω/2)² / ((Δ + 2χn)² + κ²/4) of the resonator with the transmon in level n.
fn conditioned_photons(p: &SystemParams, omega: f64, n: f64) -> f64 {
    0.25 * omega * omega / p.detuning_left(n).norm_sqr()
}

pub fn rates_sweep(cfg: &config::RatesSweep, mode: Execution) -> Result<Table> {
    let (p, pulse) = config::system(&cfg.system)?;
    let omega = pulse.omega();
    let grid = cfg.delta_cd_mhz.values("delta_cd_mhz")?;
    let rows = exec::map(mode, &grid, |&d| {
        let q = SystemParams { delta_cd: d, ..p };
        let n = steady_state(&q, omega).1;
        let r = rates(&q, n);
        SweepRow {
            delta_cd: d,
            gamma_phi: r.dephasing,
            stark: r.stark,
            n_ground: n,
            n_excited: conditioned_photons(&q, omega, 1.0),
        }
    });
    Ok(sweep_table(&rows))
}

pub fn benchmark_eig(cfg: &config::BenchmarkEig, mode: Execution) -> Result<Table> {
    let (p, _) = config::system(&cfg.system)?;
    let omegas = cfg.omega_c_mhz.values("omega_c_mhz")?;
    let track = track_coherence(&p, &omegas, mode)?;
    let rows = extract_rates(&track);
    let mut table = spectra_table(&rows);
    table.columns.extend(["stark_perturbative_mhz".to_string(), "gamma_phi_perturbative_mhz".to_string()]);
    for (row, r) in table.rows.iter_mut().zip(&rows) {
        let pert = rates(&p, r.photon);
        row.extend([pert.stark, pert.dephasing]);
    }
    Ok(table)
}

pub fn transient(cfg: &config::Transient, mode: Execution) -> Result<Table> {
    let (p, pulse) = config::system(&cfg.system)?;
    let grid = TimeGrid::new(cfg.dt_ns, cfg.t_end_ns)?;
    let traj = solve_eta(&p, &pulse, &grid)?;
    let [nl, nr] = cfg.level;
    if nl >= p.n_a || nr >= p.n_a {
        bail!("config error: `level` {:?} outside n_a = {}", cfg.level, p.n_a);
    }
    let corr = correlations_timedomain(&p, &traj, &[(nl, nr)], mode)?;
    let gen = effective_generator_timedep(&p, &corr, nl, nr)?;
    Ok(transient_table(&corr, &gen)?)
}

pub fn spectrum_grid(cfg: &config::SpectrumGrid) -> Result<Table> {
    let (p, _) = config::system(&cfg.system)?;
    let levels = cfg.levels.unwrap_or(p.n_a);
    if levels == 0 {
        bail!("config error: `levels` is 0 (empty grid)");
    }
    if !(cfg.photon_number >= 0.0) {
        bail!("config error: `photon_number` must be >= 0");
    }
    let values: Vec<(usize, usize, Complex64)> = (0..levels)
        .flat_map(|m| (0..levels).map(move |n| (m, n)))
        .map(|(m, n)| (m, n, effective_spectrum(&p, cfg.photon_number, m, n)))
        .collect();
    Ok(level_grid_table(&values))
}

/// Full |1⟩⟨0| coherence against the effective adiabatic map, starting from (|0⟩ + |1⟩)/√2 and vacuum.
pub fn propagate_compare(cfg: &config::Propagate) -> Result<Table> {
    let (p, pulse) = config::system(&cfg.system)?;
    if cfg.samples == 0 {
        bail!("config error: `samples` is 0 (empty output)");
    }
    let dt = match cfg.dt_ns {
        Some(dt) => dt,
        None => {
            let h = build_extended_hamiltonian(&p, pulse.omega())?;
            let bound = max_propagation_step(&h);
            cfg.t_end_ns / (cfg.t_end_ns / bound).ceil()
        }
    };
    let grid = TimeGrid::new(dt, cfg.t_end_ns)?;
    let mut psi = vec![Complex64::default(); p.single_dim()];
    psi[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[p.n_c] = psi[0];
    let stride = ((grid.len - 1) / cfg.samples).max(1);
    let mut full = Vec::new();
    propagate(&p, &pulse, &VectorizedState::pure(&psi), &grid, |k, t, s| {
        if k % stride == 0 {
            full.push((k, t, s.qubit_element(&p, 1, 0)));
        }
    })?;
    let traj = solve_eta(&p, &pulse, &grid)?;
    let mut q0 = CMatrix::zeros((2, 2));
    q0.fill(Complex64::new(0.5, 0.0));
    let eff = effective_map_apply(&p, &q0, &traj.photon_number(), &grid)?;
    let mut table = Table::new(["t_ns", "re_rho10_full", "im_rho10_full", "re_rho10_eff", "im_rho10_eff", "abs_ratio"]);
    for (k, t, f) in full {
        let e = eff[k][[1, 0]];
        table.push(vec![t, f.re, f.im, e.re, e.im, f.norm() / e.norm()])?;
    }
    Ok(table)
}

pub fn compare_gambetta(cfg: &config::CompareGambetta, mode: Execution) -> Result<Table> {
    let (p, pulse) = config::system(&cfg.system)?;
    let omega = pulse.omega();
    let grid = cfg.delta_cd_mhz.values("delta_cd_mhz")?;
    let rows = exec::map(mode, &grid, |&d| {
        let q = SystemParams { delta_cd: d, ..p };
        let ours = rates(&q, steady_state(&q, omega).1).dephasing;
        let theirs = gambetta_rates(&q, omega).dephasing;
        let shifted = gambetta_rates(&SystemParams { delta_cd: d + p.chi, ..p }, omega).dephasing;
        vec![d, ours, theirs, shifted]
    });
    let mut table = Table::new(["delta_cd_mhz", "gamma_phi_mhz", "gamma_phi_gambetta_mhz", "gamma_phi_gambetta_shifted_mhz"]);
    table.rows = rows;
    Ok(table)
}

pub fn eigenstates(cfg: &config::Eigenstates, mode: Execution) -> Result<Table> {
    let (p, _) = config::system(&cfg.system)?;
    let omegas = cfg.omega_c_mhz.values("omega_c_mhz")?;
    let reports = exec::try_map(mode, &omegas, |&om| {
        coherence_eigenstate_reports(&p, om, cfg.tracking_steps, Execution::Sequential)
            .with_context(|| format!("omega_c_mhz = {om}"))
    })?;
    Ok(eigenstate_table(&reports.concat()))
}

pub fn dump_hu(cfg: &config::Single) -> Result<Table> {
    let (p, pulse) = config::system(&cfg.system)?;
    let h = build_extended_hamiltonian(&p, pulse.omega())?;
    Ok(matrix_dump_table(&h.matrix))
}
