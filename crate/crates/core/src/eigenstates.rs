//! Perturbative instantaneous eigenstates of H_u under constant drive and
//! their comparison with exact eigenvectors.
//!
//! In the displaced frame each copy carrying an excited transmon label picks up
//! corrections in X_l = c_l† − η* (left) or X_r = c_r† − η (right), built on the
//! coherent product |η⟩|η*⟩.

use num_complex::Complex64;

use crate::effective::effective_spectrum;
use crate::exec::Execution;
use crate::liouville::{build_extended_hamiltonian, index};
use crate::model::SystemParams;
use crate::response::steady_state;
use crate::spectra::{sector_offset, track_coherence};
use crate::{Error, Result};

/// Coherent-state amplitudes e^{−|α|²/2} α^k / √k!, k < n.
pub fn coherent(alpha: Complex64, n: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(n);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 0..n {
        if k > 0 {
            c *= alpha / (k as f64).sqrt();
        }
        v.push(c);
    }
    v
}

/// (c† − shift) v in a truncated Fock space.
fn displaced_raise(v: &[Complex64], shift: Complex64) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|k| {
            let up = if k > 0 { v[k - 1] * (k as f64).sqrt() } else { Complex64::default() };
            up - shift * v[k]
        })
        .collect()
}

/// [1 − βX + ½β²X²] |base⟩ truncated at `order` in β.
fn corrected(base: &[Complex64], shift: Complex64, beta: Complex64, order: usize) -> Vec<Complex64> {
    let mut out = base.to_vec();
    if order >= 1 {
        let x1 = displaced_raise(base, shift);
        for (o, v) in out.iter_mut().zip(&x1) {
            *o -= beta * v;
        }
        if order >= 2 {
            let x2 = displaced_raise(&x1, shift);
            for (o, v) in out.iter_mut().zip(&x2) {
                *o += 0.5 * beta * beta * v;
            }
        }
    }
    out
}

/// Eigenstate with transmon labels (n_al, n_ar) ∈ {0, 1}², SW order 0..=2, unit norm.
pub fn perturbative_eigenstate(p: &SystemParams, omega: f64, label: (usize, usize), order: usize) -> Result<Vec<Complex64>> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    if label.0 > 1 || label.1 > 1 || p.n_a < 2 {
        return Err(Error::Dimension(format!("labels {label:?} outside the computational subspace")));
    }
    let (eta, photons) = steady_state(p, omega);
    if photons >= 0.25 * p.n_c as f64 {
        return Err(Error::Truncation(format!(
            "|eta|^2 = {photons:.3} needs n_c > {:.1}, have {}",
            4.0 * photons,
            p.n_c
        )));
    }
    let left0 = coherent(eta, p.n_c);
    let right0 = coherent(eta.conj(), p.n_c);
    let beta_l = 2.0 * p.chi * eta / p.detuning_left(1.0);
    let beta_r = 2.0 * p.chi * eta.conj() / p.detuning_right(1.0);
    let right_order = |o: usize| if label.0 == 1 { order - o.min(order) } else { order };
    let mut v = vec![Complex64::default(); p.extended_dim()];
    // The cross term of the doubly excited state keeps the product to total order `order`.
    let left_terms: Vec<(usize, Vec<Complex64>)> = if label.0 == 1 {
        (0..=order).map(|o| (o, only_order(&left0, eta.conj(), beta_l, o))).collect()
    } else {
        vec![(0, left0.clone())]
    };
    for (lo, lv) in &left_terms {
        let ro_max = if label.1 == 1 { right_order(*lo) } else { 0 };
        for ro in 0..=ro_max {
            let rv = if label.1 == 1 { only_order(&right0, eta, beta_r, ro) } else { right0.clone() };
            for cl in 0..p.n_c {
                for cr in 0..p.n_c {
                    v[index(p, label.0, cl, label.1, cr)] += lv[cl] * rv[cr];
                }
            }
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    Ok(v)
}

/// The single β^o term of [`corrected`].
fn only_order(base: &[Complex64], shift: Complex64, beta: Complex64, o: usize) -> Vec<Complex64> {
    let upto = corrected(base, shift, beta, o);
    if o == 0 {
        return upto;
    }
    let below = corrected(base, shift, beta, o - 1);
    upto.iter().zip(&below).map(|(a, b)| a - b).collect()
}

/// 1 − |⟨a|b⟩|² / (‖a‖² ‖b‖²).
pub fn eigenstate_fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    1.0 - dot.norm_sqr() / (na * nb)
}

/// Exact |1⟩⟨0| eigenpair at `omega`, followed from zero drive in `steps` increments.
pub fn exact_coherence_eigenstate(p: &SystemParams, omega: f64, steps: usize, mode: Execution) -> Result<(Complex64, Vec<Complex64>)> {
    let steps = steps.max(1);
    let grid: Vec<f64> = (0..=steps).map(|k| omega * k as f64 / steps as f64).collect();
    let track = track_coherence(p, &grid, mode)?;
    let last = track.points.len() - 1;
    Ok((track.points[last].value, track.embed(last)))
}

/// ‖H_u v − λ v‖ / ‖v‖ with λ = E_a(1) − E_a(0) + E(1, 0).
pub fn coherence_residual(p: &SystemParams, omega: f64, v: &[Complex64]) -> Result<f64> {
    let h = build_extended_hamiltonian(p, omega)?;
    let photons = steady_state(p, omega).1;
    let lam = sector_offset(p, 1, 0) + effective_spectrum(p, photons, 1, 0);
    let x = ndarray::ArrayView1::from(v);
    let hv = h.matrix.dot(&x);
    let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - lam * b).norm_sqr()).sum();
    let n: f64 = v.iter().map(|b| b.norm_sqr()).sum();
    Ok((r / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenstateReport {
    pub omega: f64,
    pub order: usize,
    pub infidelity: f64,
    pub residual_norm: f64,
}

/// Infidelity and residual of the |1⟩⟨0| perturbative state for orders 0..=2.
pub fn coherence_eigenstate_reports(p: &SystemParams, omega: f64, steps: usize, mode: Execution) -> Result<Vec<EigenstateReport>> {
    let (_, exact) = exact_coherence_eigenstate(p, omega, steps, mode)?;
    (0..=2)
        .map(|order| {
            let v = perturbative_eigenstate(p, omega, (1, 0), order)?;
            Ok(EigenstateReport {
                omega,
                order,
                infidelity: eigenstate_fidelity(&v, &exact),
                residual_norm: coherence_residual(p, omega, &v)?,
            })
        })
        .collect()
}
