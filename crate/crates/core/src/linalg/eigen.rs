//! Dense non-Hermitian complex eigensolver.
//!
//! Balancing, Householder reduction to upper Hessenberg form, implicit
//! single-shift QR to complex Schur form, then eigenvectors of the triangular
//! factor by back substitution.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Row-major square work matrix.
struct Work {
    n: usize,
    a: Vec<Complex64>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }
    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }
}

/// Diagonal similarity by powers of two (scaling only, no permutation).
fn balance(w: &mut Work) -> Vec<f64> {
    let n = w.n;
    let radix = 2.0_f64;
    let b2 = radix * radix;
    let mut scale = vec![1.0; n];
    let mut again = true;
    let mut sweeps = 0;
    while again && sweeps < 100 {
        again = false;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(w.at(j, i));
                    r += abs1(w.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= b2;
            }
            g = r * radix;
            while c >= g {
                f /= radix;
                c /= b2;
            }
            if (c + r) / f < 0.95 * s {
                again = true;
                scale[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    let v = w.at(i, j) * inv;
                    w.set(i, j, v);
                }
                for j in 0..n {
                    let v = w.at(j, i) * f;
                    w.set(j, i, v);
                }
            }
        }
    }
    scale
}

/// A ← Qᴴ A Q with A upper Hessenberg; returns Q (row-major).
fn hessenberg(w: &mut Work) -> Vec<Complex64> {
    let n = w.n;
    let mut q = vec![ZERO; n * n];
    for i in 0..n {
        q[i * n + i] = ONE;
    }
    let mut v = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let mut xnorm2 = 0.0;
        for i in (k + 1)..n {
            xnorm2 += w.at(i, k).norm_sqr();
        }
        let alpha_tail: f64 = ((k + 2)..n).map(|i| w.at(i, k).norm_sqr()).sum();
        if alpha_tail == 0.0 {
            continue;
        }
        let xnorm = xnorm2.sqrt();
        let x0 = w.at(k + 1, k);
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        for i in 0..n {
            v[i] = ZERO;
        }
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = w.at(i, k);
        }
        let vnorm2: f64 = ((k + 1)..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // A ← (I − τ v vᴴ) A on rows k+1.., columns k..
        for j in k..n {
            let mut s = ZERO;
            for i in (k + 1)..n {
                s += v[i].conj() * w.at(i, j);
            }
            s *= tau;
            for i in (k + 1)..n {
                let val = w.at(i, j) - v[i] * s;
                w.set(i, j, val);
            }
        }
        // A ← A (I − τ v vᴴ) on all rows, columns k+1..
        for i in 0..n {
            let mut s = ZERO;
            for j in (k + 1)..n {
                s += w.at(i, j) * v[j];
            }
            tmp[i] = s * tau;
        }
        for i in 0..n {
            let t = tmp[i];
            for j in (k + 1)..n {
                let val = w.at(i, j) - t * v[j].conj();
                w.set(i, j, val);
            }
        }
        // Q ← Q (I − τ v vᴴ)
        for i in 0..n {
            let mut s = ZERO;
            for j in (k + 1)..n {
                s += q[i * n + j] * v[j];
            }
            let s = s * tau;
            for j in (k + 1)..n {
                q[i * n + j] -= s * v[j].conj();
            }
        }
        for i in (k + 2)..n {
            w.set(i, k, ZERO);
        }
    }
    q
}

/// Givens rotation G = [[c, s], [−s̄, c]] with G·[x; y] = [r; 0].
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    if y.norm() == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    let norm = ax.hypot(y.norm());
    (ax / norm, (x / ax) * y.conj() / norm)
}

fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = 0.5 * (a - d);
    let disc = (half * half + b * c).sqrt();
    let m1 = 0.5 * (a + d) + disc;
    let m2 = 0.5 * (a + d) - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Upper Hessenberg H → upper triangular T with Z ← Z·(accumulated rotations).
fn schur(w: &mut Work, z: &mut [Complex64]) -> Result<()> {
    let n = w.n;
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64) / eps;
    let max_iter = 60 * n.max(10);
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(w.at(lo, lo - 1));
            if sub <= small {
                break;
            }
            let tst = abs1(w.at(lo - 1, lo - 1)) + abs1(w.at(lo, lo));
            if sub <= eps * tst {
                break;
            }
            lo -= 1;
        }
        if lo > 0 {
            w.set(lo, lo - 1, ZERO);
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence(format!("QR iteration limit at block end {hi}")));
        }
        let shift = if its % 11 == 10 {
            let s = abs1(w.at(hi, hi - 1)) + if hi >= 2 { abs1(w.at(hi - 1, hi - 2)) } else { 0.0 };
            w.at(hi, hi) + Complex64::new(0.75 * s, 0.0)
        } else {
            wilkinson(w.at(hi - 1, hi - 1), w.at(hi - 1, hi), w.at(hi, hi - 1), w.at(hi, hi))
        };
        let mut x = w.at(lo, lo) - shift;
        let mut y = w.at(lo + 1, lo);
        for k in lo..hi {
            if k > lo {
                x = w.at(k, k - 1);
                y = w.at(k + 1, k - 1);
            }
            let (c, s) = givens(x, y);
            let sc = s.conj();
            let j0 = if k > lo { k - 1 } else { k };
            for j in j0..n {
                let a = w.at(k, j);
                let b = w.at(k + 1, j);
                w.set(k, j, a * c + s * b);
                w.set(k + 1, j, b * c - sc * a);
            }
            let i1 = (k + 2).min(hi);
            for i in 0..=i1 {
                let a = w.at(i, k);
                let b = w.at(i, k + 1);
                w.set(i, k, a * c + b * sc);
                w.set(i, k + 1, b * c - a * s);
            }
            for i in 0..n {
                let a = z[i * n + k];
                let b = z[i * n + k + 1];
                z[i * n + k] = a * c + b * sc;
                z[i * n + k + 1] = b * c - a * s;
            }
            if k > lo {
                w.set(k + 1, k - 1, ZERO);
            }
        }
    }
    Ok(())
}

/// Right eigenvectors of upper triangular T (columns of the returned row-major matrix).
fn triangular_eigenvectors(t: &Work, tnorm: f64) -> Vec<Complex64> {
    let n = t.n;
    let mut x = vec![ZERO; n * n];
    let smallnum = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut col = vec![ZERO; n];
    for k in 0..n {
        let lam = t.at(k, k);
        for v in col.iter_mut() {
            *v = ZERO;
        }
        col[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in (i + 1)..=k {
                s += t.at(i, j) * col[j];
            }
            let mut d = t.at(i, i) - lam;
            if d.norm() < smallnum {
                d = Complex64::new(smallnum, 0.0);
            }
            col[i] = -s / d;
            let big = col[i].norm();
            if big > 1e100 {
                let inv = 1.0 / big;
                for v in col[i..=k].iter_mut() {
                    *v *= inv;
                }
            }
        }
        for i in 0..=k {
            x[i * n + k] = col[i];
        }
    }
    x
}

#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: Array2<Complex64>,
}

/// All eigenpairs of a square complex matrix.
pub fn eig(m: &Array2<Complex64>, balance_input: bool) -> Result<Eigen> {
    let (n, nc) = m.dim();
    if n != nc {
        return Err(Error::Dimension(format!("eigendecomposition needs a square matrix, got {n}x{nc}")));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence("non-finite matrix entry".into()));
    }
    let mut w = Work { n, a: m.iter().copied().collect() };
    let scale = if balance_input { balance(&mut w) } else { vec![1.0; n] };
    let mut z = hessenberg(&mut w);
    schur(&mut w, &mut z)?;
    let tnorm = w.a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let x = triangular_eigenvectors(&w, tnorm);
    let values: Vec<Complex64> = (0..n).map(|i| w.at(i, i)).collect();
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    // V = D · Z · X
    let mut row = vec![ZERO; n];
    for i in 0..n {
        for v in row.iter_mut() {
            *v = ZERO;
        }
        for l in 0..n {
            let zil = z[i * n + l];
            if zil == ZERO {
                continue;
            }
            let xr = &x[l * n..(l + 1) * n];
            for k in l..n {
                row[k] += zil * xr[k];
            }
        }
        for k in 0..n {
            vectors[[i, k]] = row[k] * scale[i];
        }
    }
    for mut col in vectors.columns_mut() {
        let nrm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            col.mapv_inplace(|v| v / nrm);
        }
    }
    Ok(Eigen { values, vectors })
}

/// ‖M v − λ v‖ / ‖v‖ for every eigenpair.
pub fn residuals(m: &Array2<Complex64>, e: &Eigen) -> Vec<f64> {
    let mv = m.dot(&e.vectors);
    (0..e.values.len())
        .map(|k| {
            let v = e.vectors.column(k);
            let lam = e.values[k];
            let r: f64 = mv.column(k).iter().zip(v.iter()).map(|(a, b)| (a - lam * b).norm_sqr()).sum();
            let vn: f64 = v.iter().map(|b| b.norm_sqr()).sum();
            (r / vn).sqrt()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn fro(m: &Array2<Complex64>) -> f64 {
        m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn random_matrices_small_residual() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (40, 5), (120, 6)] {
            let m = random(n, seed);
            let e = eig(&m, true).unwrap();
            let r = residuals(&m, &e);
            let bound = 1e-10 * fro(&m);
            assert!(r.iter().all(|&x| x < bound), "n={n} max={:e}", r.iter().cloned().fold(0.0, f64::max));
            let tr: Complex64 = (0..n).map(|i| m[[i, i]]).sum();
            let sum: Complex64 = e.values.iter().sum();
            assert!((tr - sum).norm() < 1e-9 * n as f64);
        }
    }

    #[test]
    fn triangular_and_diagonal_exact() {
        let mut m = Array2::<Complex64>::zeros((4, 4));
        for i in 0..4 {
            m[[i, i]] = Complex64::new(i as f64, -0.5 * i as f64);
            for j in (i + 1)..4 {
                m[[i, j]] = Complex64::new(1.0, 1.0);
            }
        }
        let e = eig(&m, true).unwrap();
        let mut got: Vec<_> = e.values.iter().map(|v| v.re).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, g) in got.iter().enumerate() {
            assert!((g - i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn badly_scaled_matrix() {
        let n = 30;
        let mut m = random(n, 9);
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] *= 10f64.powi(i as i32 / 3 - j as i32 / 3);
            }
        }
        let e = eig(&m, true).unwrap();
        let r = residuals(&m, &e);
        assert!(r.iter().all(|&x| x < 1e-8 * fro(&m)));
    }

    #[test]
    fn defective_jordan_block() {
        let mut m = Array2::<Complex64>::zeros((3, 3));
        m[[0, 1]] = ONE;
        m[[1, 2]] = ONE;
        let e = eig(&m, true).unwrap();
        assert!(e.values.iter().all(|v| v.norm() < 1e-12));
    }
}
