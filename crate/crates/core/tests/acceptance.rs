//! Acceptance criteria 1-10. One PASS/FAIL line per criterion; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use dispmap_core::effective::{
    choi_cptp_check, choi_matrix, choi_report, effective_map_apply, effective_spectrum, gambetta_rates, rates,
};
use dispmap_core::eigenstates::coherence_eigenstate_reports;
use dispmap_core::exec::Execution;
use dispmap_core::linalg::CMatrix;
use dispmap_core::liouville::{
    build_extended_hamiltonian, build_superoperator, max_propagation_step, propagate, single_collapses,
    single_hamiltonian, CollapseTerm, ExtendedOperator, VectorizedState,
};
use dispmap_core::model::{PulseSpec, SystemParams, TimeGrid, RAD_PER_NS};
use dispmap_core::response::{omega_for_photons, solve_eta, steady_state};
use dispmap_core::spectra::{extract_rates, track_coherence};
use dispmap_core::transient::{adiabatic_series_a, correlations_timedomain, fourier_a, Side};
use dispmap_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reference() -> SystemParams {
    SystemParams::new(-2005.0, -5.0, -300.0, -1.0, 1.0, 2, 14).unwrap()
}

fn random_complex(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_shape_fn((d, d), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn c1_vectorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let g = random_complex(&mut rng, 10);
        let h = (&g + &g.t().mapv(|z| z.conj())) * Complex64::new(0.5, 0.0);
        let collapses: Vec<CollapseTerm> = (0..2)
            .map(|_| CollapseTerm { rate: rng.gen_range(0.1..2.0), op: random_complex(&mut rng, 10) })
            .collect();
        let hu = ExtendedOperator::from_parts(&h, &collapses).map_err(|e| e.to_string())?;
        let lhs = hu.matrix.mapv(|z| z * Complex64::new(0.0, -2.0 * std::f64::consts::PI));
        let rhs = build_superoperator(&h, &collapses).map_err(|e| e.to_string())?;
        worst = worst.max(max_diff(&lhs, &rhs));
    }
    let p = reference().with_truncation(2, 5);
    let hu = build_extended_hamiltonian(&p, 7.3).map_err(|e| e.to_string())?;
    let lhs = hu.matrix.mapv(|z| z * Complex64::new(0.0, -2.0 * std::f64::consts::PI));
    let rhs = build_superoperator(&single_hamiltonian(&p, 7.3), &single_collapses(&p)).map_err(|e| e.to_string())?;
    let kerr = max_diff(&lhs, &rhs);
    check(worst < 1e-12 && kerr < 1e-12, format!("random max {worst:.2e}, Kerr max {kerr:.2e} (tol 1e-12)"))
}

fn c2_response() -> Outcome {
    let p = reference();
    let omega = 10.0;
    let grid = TimeGrid::new(0.1, 2000.0).map_err(|e| e.to_string())?;
    let traj = solve_eta(&p, &PulseSpec::constant(omega), &grid).map_err(|e| e.to_string())?;
    let (ss, _) = steady_state(&p, omega);
    let lam = -Complex64::new(0.5 * p.kappa, p.delta_cd) * RAD_PER_NS;
    let err = traj
        .times
        .iter()
        .zip(&traj.eta)
        .map(|(&t, &e)| (e - ss * (1.0 - (lam * t).exp())).norm())
        .fold(0.0, f64::max);
    // Ring-down after a square-Gaussian pulse.
    let pulse = PulseSpec::square_gaussian(omega, 1000.0, 100.0, 50.0).map_err(|e| e.to_string())?;
    let traj = solve_eta(&p, &pulse, &grid).map_err(|e| e.to_string())?;
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &e) in traj.times.iter().zip(&traj.eta) {
        if t > 1000.0 && t <= 1600.0 {
            let y = e.norm_sqr().ln();
            sx += t;
            sy += y;
            sxx += t * t;
            sxy += t * y;
            m += 1.0;
        }
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let kappa_fit = -slope / RAD_PER_NS;
    let rel = (kappa_fit / p.kappa - 1.0).abs();
    check(err < 1e-8 && rel < 0.01, format!("step max err {err:.2e} (tol 1e-8), fitted kappa {kappa_fit:.6} MHz, rel {rel:.2e} (tol 1e-2)"))
}

fn c3_calibration() -> Outcome {
    let p6 = SystemParams::new(-2050.0, -50.0, -300.0, -1.0, 5.0, 2, 4).unwrap();
    let n6 = steady_state(&p6, 14.2).1;
    let om = omega_for_photons(&reference(), 4.0);
    check(
        (n6 - 0.0201).abs() <= 5e-4 && (om - 20.1).abs() <= 0.1,
        format!("crosstalk n_ss = {n6:.5} (0.0201 +- 5e-4), 4-photon drive = {om:.4} MHz (20.1 +- 0.1)"),
    )
}

fn c4_gambetta() -> Outcome {
    let base = SystemParams::new(0.0, 0.0, -300.0, -2.0, 1.0, 2, 4).unwrap();
    let omega = 10.0;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let delta = -10.0 + 20.0 * k as f64 / 99.0;
        let ours = SystemParams { delta_cd: delta, ..base };
        let shifted = SystemParams { delta_cd: delta + base.chi, ..base };
        let g = rates(&ours, steady_state(&ours, omega).1).dephasing;
        let gg = gambetta_rates(&shifted, omega).dephasing;
        worst = worst.max((g - gg).abs() / g.abs());
    }
    check(worst < 1e-12, format!("max relative difference {worst:.2e} over 100 points (tol 1e-12)"))
}

fn c5_benchmark() -> Outcome {
    let p = reference();
    let omegas: Vec<f64> = (0..12).map(|k| 20.1 * k as f64 / 11.0).collect();
    let t0 = Instant::now();
    let track = track_coherence(&p, &omegas, Execution::default()).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    let rows = extract_rates(&track);
    let mut ok = true;
    let mut low_worst: f64 = 0.0;
    let mut devs = Vec::new();
    for r in rows.iter().skip(1) {
        let ratio = r.dephasing / rates(&p, r.photon).dephasing;
        if r.photon <= 0.5 {
            low_worst = low_worst.max((ratio - 1.0).abs());
            ok &= (0.95..=1.05).contains(&ratio);
        } else {
            devs.push((r.photon, (ratio - 1.0).abs()));
        }
    }
    let monotone = devs.windows(2).all(|w| w[1].1 > w[0].1);
    let top = rows.last().unwrap().photon;
    let summary: Vec<String> = devs.iter().map(|(n, d)| format!("{n:.2}:{d:.1e}")).collect();
    check(
        ok && monotone && elapsed < 120.0,
        format!(
            "low-power max |ratio-1| {low_worst:.3e}, deviations above 0.5 photons [{}] monotone={monotone}, top n_c {top:.3}, {elapsed:.1} s",
            summary.join(" ")
        ),
    )
}

fn c6_spectrum_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_anti: f64 = 0.0;
    let mut diag_exact = true;
    let mut im_negative = true;
    for _ in 0..500 {
        let chi = rng.gen_range(0.05..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = SystemParams::new(
            rng.gen_range(-3000.0..-1000.0),
            rng.gen_range(-20.0..20.0),
            rng.gen_range(-400.0..-100.0),
            chi,
            rng.gen_range(0.1..10.0),
            4,
            4,
        )
        .unwrap();
        let photon = rng.gen_range(0.01..20.0);
        for m in 0..4 {
            for n in 0..4 {
                let e = effective_spectrum(&p, photon, m, n);
                if m == n {
                    diag_exact &= e == Complex64::new(0.0, 0.0);
                } else {
                    let f = effective_spectrum(&p, photon, n, m);
                    worst_anti = worst_anti.max((e + f.conj()).norm() / e.norm());
                    im_negative &= e.im < 0.0;
                }
            }
        }
    }
    check(
        diag_exact && worst_anti < 1e-12 && im_negative,
        format!("500 draws: E_nn == 0 {diag_exact}, antisymmetry {worst_anti:.2e} (tol 1e-12), Im E < 0 {im_negative}"),
    )
}

fn c7_cptp() -> Outcome {
    let p = SystemParams::new(0.0, -5.0, -300.0, -1.0, 1.0, 3, 4).unwrap();
    let mut min_ev = f64::INFINITY;
    let mut mutant_min = f64::INFINITY;
    for t in [10.0, 100.0, 1000.0] {
        min_ev = min_ev.min(choi_cptp_check(&p, 10.0, t).min_eigenvalue);
        let flipped = choi_matrix(3, t, |m, n| effective_spectrum(&p, 10.0, m, n).conj());
        mutant_min = mutant_min.min(choi_report(&flipped, 3).min_eigenvalue);
    }
    check(
        min_ev >= -1e-10 && mutant_min < -1e-10,
        format!("min Choi eigenvalue {min_ev:.3e} (>= -1e-10), sign-flipped mutant {mutant_min:.3e} (rejected)"),
    )
}

fn c8_transient() -> Outcome {
    use dispmap_core::effective::adiabatic_correlations;
    // Constant drive at t = 10/kappa (10 us for kappa = 1 MHz).
    let p = SystemParams::new(-2005.0, -5.0, -300.0, -1.0, 1.0, 2, 4).unwrap();
    let grid = TimeGrid::new(0.1, 20_000.0).map_err(|e| e.to_string())?;
    let traj = solve_eta(&p, &PulseSpec::constant(6.0), &grid).map_err(|e| e.to_string())?;
    let corr = correlations_timedomain(&p, &traj, &[(1, 0), (1, 1)], Execution::default()).map_err(|e| e.to_string())?;
    let k = 100_000;
    let n = steady_state(&p, 6.0).1;
    let mut limit: f64 = 0.0;
    for lv in &corr.levels {
        let ad = adiabatic_correlations(&p, n, lv.n_al as f64, lv.n_ar as f64).map_err(|e| e.to_string())?;
        for (got, want) in [(lv.a_ll[k], ad.a_ll), (lv.a_rr[k], ad.a_rr), (lv.b_lr[k], ad.b_lr), (lv.c_lr[k], ad.c_lr)] {
            limit = limit.max((got - want).norm() / want.norm());
        }
    }
    // Square-Gaussian readout pulse.
    let p5 = SystemParams::new(-2005.0, -5.0, -300.0, -1.0, 5.0, 2, 4).unwrap();
    let pulse = PulseSpec::square_gaussian(50.0, 1000.0, 100.0, 50.0).map_err(|e| e.to_string())?;
    let grid = TimeGrid::new(0.1, 2000.0).map_err(|e| e.to_string())?;
    let traj = solve_eta(&p5, &pulse, &grid).map_err(|e| e.to_string())?;
    let corr = correlations_timedomain(&p5, &traj, &[(1, 0)], Execution::default()).map_err(|e| e.to_string())?;
    let quad = &corr.levels[0].a_ll;
    let s0 = adiabatic_series_a(&p5, &traj, Side::Left, 1, 0).map_err(|e| e.to_string())?;
    let s2 = adiabatic_series_a(&p5, &traj, Side::Left, 1, 2).map_err(|e| e.to_string())?;
    let ramps = |t: f64| t <= 200.0 || (800.0..=1000.0).contains(&t);
    let err = |s: &[Complex64]| {
        traj.times.iter().enumerate().filter(|(_, &t)| ramps(t)).map(|(i, _)| (s[i] - quad[i]).norm()).fold(0.0, f64::max)
    };
    let (e0, e2) = (err(&s0), err(&s2));
    let four = fourier_a(&p5, &traj, Side::Left, 1, 1 << 16).map_err(|e| e.to_string())?;
    let interior: Vec<usize> = (0..traj.len()).filter(|&i| (200.0..=800.0).contains(&traj.times[i])).collect();
    let scale = interior.iter().map(|&i| quad[i].norm()).fold(0.0, f64::max);
    let four_err = interior.iter().map(|&i| (four[i] - quad[i]).norm()).fold(0.0, f64::max) / scale;
    check(
        limit < 1e-6 && e2 < e0 && four_err < 1e-3,
        format!(
            "adiabatic limit rel {limit:.2e} (tol 1e-6), ramp max err order2 {e2:.3e} < order0 {e0:.3e}, Fourier rel {four_err:.2e} (tol 1e-3)"
        ),
    )
}

fn c9_end_to_end() -> Outcome {
    let p = SystemParams::new(0.0, -5.0, -300.0, -1.0, 1.0, 2, 10).unwrap();
    let omega = omega_for_photons(&p, 0.1);
    let gamma = rates(&p, 0.1).dephasing;
    let t_end = 3.0 / (gamma * RAD_PER_NS);
    let h = build_extended_hamiltonian(&p, omega).map_err(|e| e.to_string())?;
    let dt = max_propagation_step(&h);
    let steps = (t_end / dt).ceil();
    let grid = TimeGrid::new(t_end / steps, t_end).map_err(|e| e.to_string())?;
    // Adiabatic switch-on; a sudden step adds a ring-up offset outside the adiabatic map.
    let pulse = PulseSpec::square_gaussian(omega, t_end + 1000.0, 500.0, 250.0).map_err(|e| e.to_string())?;
    let mut psi = vec![Complex64::default(); p.single_dim()];
    psi[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[p.n_c] = psi[0];
    let rho0 = VectorizedState::pure(&psi);
    let stride = (grid.len / 400).max(1);
    let mut full = Vec::new();
    let t0 = Instant::now();
    propagate(&p, &pulse, &rho0, &grid, |k, _, s| {
        if k % stride == 0 {
            full.push((k, s.qubit_element(&p, 1, 0).norm()));
        }
    })
    .map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed().as_secs_f64();
    let traj = solve_eta(&p, &pulse, &grid).map_err(|e| e.to_string())?;
    let q0 = CMatrix::from_elem((2, 2), Complex64::new(0.5, 0.0));
    let eff = effective_map_apply(&p, &q0, &traj.photon_number(), &grid).map_err(|e| e.to_string())?;
    let worst = full.iter().map(|&(k, f)| (f / eff[k][[1, 0]].norm() - 1.0).abs()).fold(0.0, f64::max);
    check(
        worst < 0.03 && elapsed < 60.0,
        format!("max relative |rho_10| deviation {worst:.3e} over {t_end:.0} ns (tol 3e-2), {} steps in {elapsed:.1} s", grid.len - 1),
    )
}

fn c10_eigenstates() -> Outcome {
    let p = reference();
    let omegas: Vec<f64> = (0..6).map(|k| 10f64.powf(k as f64 / 5.0)).collect();
    let mut ordered = true;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut rows = Vec::new();
    for &om in &omegas {
        let r = coherence_eigenstate_reports(&p, om, 20, Execution::default()).map_err(|e| e.to_string())?;
        ordered &= r[2].infidelity < r[1].infidelity && r[1].infidelity < r[0].infidelity;
        xs.push(om.ln());
        ys.push(r[0].infidelity.ln());
        rows.push(format!("{om:.2}:{:.1e}/{:.1e}/{:.1e}", r[0].infidelity, r[1].infidelity, r[2].infidelity));
    }
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    check(
        ordered && (slope - 2.0).abs() <= 0.4,
        format!("strict ordering {ordered}, order-0 slope {slope:.3} (2 +- 0.4), [{}]", rows.join(" ")),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("vectorization oracle", c1_vectorization),
        ("response solver", c2_response),
        ("photon calibration", c3_calibration),
        ("Gambetta equivalence", c4_gambetta),
        ("numerical diagonalization benchmark", c5_benchmark),
        ("spectrum properties", c6_spectrum_properties),
        ("CPTP", c7_cptp),
        ("transient consistency", c8_transient),
        ("end-to-end propagation", c9_end_to_end),
        ("eigenstate ordering", c10_eigenstates),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = f();
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
