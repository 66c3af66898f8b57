//! Small dense complex linear-algebra helpers.

pub mod eigen;

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

pub use eigen::{eig, residuals, Eigen};

pub type CMatrix = Array2<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    ndarray::linalg::kron(a, b)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn conj(a: &CMatrix) -> CMatrix {
    a.mapv(|z| z.conj())
}

pub fn transpose(a: &CMatrix) -> CMatrix {
    a.t().to_owned()
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Solved through the real symmetric embedding [[Re, −Im], [Im, Re]], whose
/// spectrum is that of `a` with every eigenvalue doubled; the complex QL path
/// returns NaN on matrices with many exact zeros next to tiny entries.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let (n, _) = a.dim();
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = a[[i % n, j % n]];
        match (i / n, j / n) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_spectrum_of_pauli_y() {
        let mut y = CMatrix::zeros((2, 2));
        y[[0, 1]] = Complex64::new(0.0, -1.0);
        y[[1, 0]] = Complex64::new(0.0, 1.0);
        let ev = hermitian_eigenvalues(&y);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn near_underflow_entries_stay_finite() {
        let mut a = CMatrix::from_shape_fn((4, 4), |(i, j)| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() });
        a[[0, 1]] = Complex64::new(3e-104, 4e-104);
        a[[1, 0]] = a[[0, 1]].conj();
        a[[2, 3]] = Complex64::new(2e-300, 0.0);
        a[[3, 2]] = a[[2, 3]];
        let ev = hermitian_eigenvalues(&a);
        assert!(ev.iter().all(|x| (x - 1.0).abs() < 1e-15), "{ev:?}");
    }

    #[test]
    fn kron_mixed_product() {
        let a = CMatrix::from_shape_fn((2, 2), |(i, j)| Complex64::new(i as f64, j as f64));
        let b = CMatrix::from_shape_fn((3, 3), |(i, j)| Complex64::new((i * j) as f64, 1.0));
        let lhs = kron(&a, &identity(3)).dot(&kron(&identity(2), &b));
        assert!(max_abs_diff(&lhs, &kron(&a, &b)) < 1e-14);
    }
}
