//! Doubled-space (vectorized) operators and master-equation propagation.
//!
//! A density matrix ρ = Σ ρ_mn |m⟩⟨n| is stored as the row-major vector
//! Σ ρ_mn |m⟩|n⟩. Left copies act as O_l = O ⊗ I, right copies as
//! O_r = I ⊗ O*, and the master equation reads dρ/dt = −2πi H_u ρ with
//! H_u = H_l − H_r + iκ(c_l c_r − ½ c_l†c_l − ½ c_r†c_r).
//! Basis order is |n_al, n_cl⟩ ⊗ |n_ar, n_cr⟩.

use ndarray::Array1;
use num_complex::Complex64;

use crate::linalg::{conj, dagger, identity, kron, transpose, CMatrix};
use crate::model::{envelope_all, PulseSpec, SystemParams, TimeGrid, RAD_PER_NS};
use crate::response::STEP_FRACTION;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Lindblad collapse channel γ·D[C].
#[derive(Debug, Clone)]
pub struct CollapseTerm {
    pub rate: f64,
    pub op: CMatrix,
}

/// Operator on the doubled space with its single-copy dimension.
#[derive(Debug, Clone)]
pub struct ExtendedOperator {
    pub single_dim: usize,
    pub matrix: CMatrix,
}

/// Doubled-space index of |n_al, n_cl⟩ ⊗ |n_ar, n_cr⟩.
#[inline]
pub fn index(p: &SystemParams, n_al: usize, n_cl: usize, n_ar: usize, n_cr: usize) -> usize {
    ((n_al * p.n_c + n_cl) * p.n_a + n_ar) * p.n_c + n_cr
}

/// Inverse of [`index`].
#[inline]
pub fn labels(p: &SystemParams, idx: usize) -> (usize, usize, usize, usize) {
    let d = p.single_dim();
    let (l, r) = (idx / d, idx % d);
    (l / p.n_c, l % p.n_c, r / p.n_c, r % p.n_c)
}

pub fn annihilation(n: usize) -> CMatrix {
    let mut a = CMatrix::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Transmon lowering operator on the single copy.
pub fn qubit_lowering(p: &SystemParams) -> CMatrix {
    kron(&annihilation(p.n_a), &identity(p.n_c))
}

/// Resonator lowering operator on the single copy.
pub fn resonator_lowering(p: &SystemParams) -> CMatrix {
    kron(&identity(p.n_a), &annihilation(p.n_c))
}

/// H_s + H_d on one copy, ν-units.
pub fn single_hamiltonian(p: &SystemParams, omega: f64) -> CMatrix {
    let a = qubit_lowering(p);
    let c = resonator_lowering(p);
    let ad = dagger(&a);
    let cd = dagger(&c);
    let na = ad.dot(&a);
    let nc = cd.dot(&c);
    let kerr = ad.dot(&ad).dot(&a).dot(&a);
    let re = |x: f64| Complex64::new(x, 0.0);
    &na * re(p.delta_ad) + &kerr * re(0.5 * p.alpha) + &nc * re(p.delta_cd) + na.dot(&nc) * re(2.0 * p.chi)
        + (&c + &cd) * re(0.5 * omega)
}

pub fn single_collapses(p: &SystemParams) -> Vec<CollapseTerm> {
    vec![CollapseTerm { rate: p.kappa, op: resonator_lowering(p) }]
}

impl ExtendedOperator {
    /// Lift a single-copy Hamiltonian and collapse set through explicit left/right copies.
    pub fn from_parts(h: &CMatrix, collapses: &[CollapseTerm]) -> Result<Self> {
        let (d, d2) = h.dim();
        if d != d2 {
            return Err(Error::Dimension(format!("Hamiltonian is {d}x{d2}")));
        }
        let id = identity(d);
        let left = |o: &CMatrix| kron(o, &id);
        let right = |o: &CMatrix| kron(&id, &conj(o));
        let mut m = left(h) - right(h);
        for ct in collapses {
            if ct.op.dim() != (d, d) {
                return Err(Error::Dimension(format!("collapse operator is {:?}, expected {d}x{d}", ct.op.dim())));
            }
            let cl = left(&ct.op);
            let cr = right(&ct.op);
            let term = cl.dot(&cr) - dagger(&cl).dot(&cl) * Complex64::new(0.5, 0.0)
                - dagger(&cr).dot(&cr) * Complex64::new(0.5, 0.0);
            m = m + term * (I * ct.rate);
        }
        Ok(ExtendedOperator { single_dim: d, matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Principal sub-block of fixed transmon labels (n_al, n_ar) and its doubled-space indices.
    pub fn sector_block(&self, p: &SystemParams, n_al: usize, n_ar: usize) -> (Vec<usize>, CMatrix) {
        let idx: Vec<usize> = (0..p.n_c)
            .flat_map(|cl| (0..p.n_c).map(move |cr| (cl, cr)))
            .map(|(cl, cr)| index(p, n_al, cl, n_ar, cr))
            .collect();
        let b = CMatrix::from_shape_fn((idx.len(), idx.len()), |(i, j)| self.matrix[[idx[i], idx[j]]]);
        (idx, b)
    }

    /// Largest modulus of an entry coupling different transmon sectors.
    pub fn off_sector_norm(&self, p: &SystemParams) -> f64 {
        let mut worst: f64 = 0.0;
        for ((i, j), v) in self.matrix.indexed_iter() {
            let (al, _, ar, _) = labels(p, i);
            let (bl, _, br, _) = labels(p, j);
            if al != bl || ar != br {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_dense(&self.matrix)
    }

    /// Nonzero entries as (row, col, value), row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        self.matrix
            .indexed_iter()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|((i, j), v)| (i, j, *v))
            .collect()
    }
}

/// H_u of the driven dispersive model, assembled from ladder matrix elements.
pub fn build_extended_hamiltonian(p: &SystemParams, omega: f64) -> Result<ExtendedOperator> {
    p.validate()?;
    let d = p.single_dim();
    let mut m = CMatrix::zeros((d * d, d * d));
    let energy = |a: usize, c: usize| p.qubit_energy(a) + p.delta_cd * c as f64 + 2.0 * p.chi * (a * c) as f64;
    let half = 0.5 * omega;
    for al in 0..p.n_a {
        for ar in 0..p.n_a {
            for cl in 0..p.n_c {
                for cr in 0..p.n_c {
                    let src = index(p, al, cl, ar, cr);
                    m[[src, src]] += Complex64::new(
                        energy(al, cl) - energy(ar, cr),
                        -0.5 * p.kappa * (cl + cr) as f64,
                    );
                    if cl > 0 && cr > 0 {
                        let dst = index(p, al, cl - 1, ar, cr - 1);
                        m[[dst, src]] += I * (p.kappa * ((cl * cr) as f64).sqrt());
                    }
                    if half != 0.0 {
                        if cl > 0 {
                            m[[index(p, al, cl - 1, ar, cr), src]] += half * (cl as f64).sqrt();
                        }
                        if cl + 1 < p.n_c {
                            m[[index(p, al, cl + 1, ar, cr), src]] += half * ((cl + 1) as f64).sqrt();
                        }
                        if cr > 0 {
                            m[[index(p, al, cl, ar, cr - 1), src]] -= half * (cr as f64).sqrt();
                        }
                        if cr + 1 < p.n_c {
                            m[[index(p, al, cl, ar, cr + 1), src]] -= half * ((cr + 1) as f64).sqrt();
                        }
                    }
                }
            }
        }
    }
    Ok(ExtendedOperator { single_dim: d, matrix: m })
}

/// Lindblad generator in rad/μs from H and rates in MHz, via vec(AXB) = (A ⊗ Bᵀ) vec(X).
pub fn build_superoperator(h: &CMatrix, collapses: &[CollapseTerm]) -> Result<CMatrix> {
    let (d, d2) = h.dim();
    if d != d2 {
        return Err(Error::Dimension(format!("Hamiltonian is {d}x{d2}")));
    }
    let id = identity(d);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut l = (kron(h, &id) - kron(&id, &transpose(h))) * (-I * two_pi);
    for ct in collapses {
        let c = &ct.op;
        let cdc = dagger(c).dot(c);
        let d_term = kron(c, &conj(c)) - kron(&cdc, &id) * Complex64::new(0.5, 0.0)
            - kron(&id, &transpose(&cdc)) * Complex64::new(0.5, 0.0);
        l = l + d_term * Complex64::new(two_pi * ct.rate, 0.0);
    }
    Ok(l)
}

/// Compressed sparse rows.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<Complex64>,
}

impl Csr {
    pub fn from_dense(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..m.ncols() {
                let v = m[[i, j]];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// y += α A x.
    #[inline]
    pub fn mul_add(&self, alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] += alpha * s;
        }
    }
}

/// Vectorized density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState {
    pub single_dim: usize,
    pub data: Array1<Complex64>,
}

impl VectorizedState {
    pub fn from_density(rho: &CMatrix) -> Result<Self> {
        let (d, d2) = rho.dim();
        if d != d2 {
            return Err(Error::Dimension(format!("density matrix is {d}x{d2}")));
        }
        Ok(VectorizedState { single_dim: d, data: rho.iter().copied().collect() })
    }

    /// |ψ⟩⟨ψ| for a single-copy state.
    pub fn pure(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let data = (0..d * d).map(|k| psi[k / d] * psi[k % d].conj()).collect();
        VectorizedState { single_dim: d, data }
    }

    pub fn to_density(&self) -> CMatrix {
        let d = self.single_dim;
        CMatrix::from_shape_fn((d, d), |(i, j)| self.data[i * d + j])
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.single_dim;
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.single_dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    /// Reduced transmon element ⟨m|Tr_c ρ|n⟩.
    pub fn qubit_element(&self, p: &SystemParams, m: usize, n: usize) -> Complex64 {
        (0..p.n_c).map(|c| self.data[index(p, m, c, n, c)]).sum()
    }

    /// Resonator population of Fock level k summed over transmon levels.
    pub fn resonator_population(&self, p: &SystemParams, k: usize) -> f64 {
        (0..p.n_a).map(|a| self.data[index(p, a, k, a, k)].re).sum()
    }
}

/// Largest stable step for [`propagate`] in ns.
pub fn max_propagation_step(h: &ExtendedOperator) -> f64 {
    let scale = (0..h.dim()).map(|i| h.matrix[[i, i]].norm()).fold(0.0, f64::max) * RAD_PER_NS;
    if scale == 0.0 {
        f64::INFINITY
    } else {
        STEP_FRACTION / scale
    }
}

/// RK4 integration of dρ/dt = −2πi H_u(t) ρ with the drive block rescaled by
/// the envelope at every substep. `observer` sees every step index, time and state.
pub fn propagate<F>(
    p: &SystemParams,
    pulse: &PulseSpec,
    rho0: &VectorizedState,
    grid: &TimeGrid,
    mut observer: F,
) -> Result<VectorizedState>
where
    F: FnMut(usize, f64, &VectorizedState),
{
    pulse.validate()?;
    if rho0.single_dim != p.single_dim() {
        return Err(Error::Dimension(format!(
            "state has single-copy dimension {}, model has {}",
            rho0.single_dim,
            p.single_dim()
        )));
    }
    let h0 = build_extended_hamiltonian(p, 0.0)?;
    let h1 = build_extended_hamiltonian(p, pulse.omega())?;
    let bound = max_propagation_step(&h1);
    if grid.dt_ns > bound {
        return Err(Error::StepSize { dt_ns: grid.dt_ns, max_ns: bound });
    }
    let drive = ExtendedOperator { single_dim: h0.single_dim, matrix: &h1.matrix - &h0.matrix };
    let a0 = h0.to_csr();
    let a1 = drive.to_csr();
    let n = rho0.data.len();
    let tr0 = rho0.trace();
    let mut state = rho0.clone();
    let scale = -I * RAD_PER_NS;
    let eval = |x: &[Complex64], env: f64, out: &mut [Complex64]| {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        a0.mul_add(scale, x, out);
        if env != 0.0 {
            a1.mul_add(scale * env, x, out);
        }
    };
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n]);
    let h = grid.dt_ns;
    observer(0, 0.0, &state);
    for step in 1..grid.len {
        let t = grid.t(step - 1);
        let e0 = envelope_all(t, pulse)[0];
        let eh = envelope_all(t + 0.5 * h, pulse)[0];
        let e1 = envelope_all(t + h, pulse)[0];
        let y = state.data.as_slice_mut().expect("contiguous state");
        eval(y, e0, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        eval(&tmp, eh, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        eval(&tmp, eh, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        eval(&tmp, e1, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let drift = (state.trace() - tr0).norm();
        if drift > 1e-6 {
            return Err(Error::Accuracy(format!("trace drift {drift:.3e} at t = {} ns", grid.t(step))));
        }
        observer(step, grid.t(step), &state);
    }
    Ok(state)
}
