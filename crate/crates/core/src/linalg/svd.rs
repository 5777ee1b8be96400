//! One-sided (Hestenes) Jacobi SVD.
//!
//! Slow compared to bidiagonalization but accurate to high relative precision
//! and simple; used for the small and tall-skinny matrices of the Grushin and
//! quasimode code and as the full-SVD reference in tests.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// `m x n`; column `j` is the left singular vector for `s[j]` (zero when `s[j] == 0`).
    pub u: DenseMatrix<T>,
    /// Descending, length `n` (trailing zeros when `m < n`).
    pub s: Vec<T>,
    /// `n x n` unitary.
    pub v: DenseMatrix<T>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `rel_tol * s_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let smax = self.s.first().copied().unwrap_or(T::zero());
        self.s.iter().filter(|&&x| x > rel_tol * smax).count()
    }

    /// Columns of `V` whose singular values are at most `rel_tol * s_max`, as vectors.
    pub fn null_space(&self, rel_tol: T) -> Vec<Vec<Complex<T>>> {
        let r = self.rank(rel_tol);
        (r..self.s.len()).map(|j| self.v.column(j)).collect()
    }
}

pub fn svd<T: Real>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex::zero(); n];
            e[j] = Complex::new(T::one(), T::zero());
            e
        })
        .collect();
    let eps = T::epsilon();
    // Pairs of columns already at roundoff level relative to A are left alone.
    let frob2: T = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    let floor = eps * eps * frob2;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let mut gamma = Complex::<T>::zero();
                for (x, y) in cols[p].iter().zip(&cols[q]) {
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g <= floor || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let two = T::one() + T::one();
                let zeta = (beta - alpha) / (two * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let ph = phase.conj();
                rotate(&mut cols, p, q, c, s, ph);
                rotate(&mut vcols, p, q, c, s, ph);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Jacobi SVD",
            iterations: MAX_SWEEPS,
        });
    }
    let norms: Vec<T> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let s: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let u = DenseMatrix::from_fn(m, n, |i, k| {
        let j = order[k];
        if norms[j] > T::zero() {
            cols[j][i] / norms[j]
        } else {
            Complex::zero()
        }
    });
    let v = DenseMatrix::from_fn(n, n, |i, k| vcols[order[k]][i]);
    Ok(Svd { u, s, v })
}

/// `x_p <- c x_p - s ph x_q`, `x_q <- s x_p + c ph x_q` where `ph` removes the phase of `<x_p, x_q>`.
fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, c: T, s: T, ph: Complex<T>) {
    let (lo, hi) = cols.split_at_mut(q);
    let (xp, xq) = (&mut lo[p], &mut hi[0]);
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * ph;
        let ap = *a;
        *a = ap * c - bq * s;
        *b = ap * s + bq * c;
    }
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    // Orthogonalizing the shorter side is cheaper.
    if a.nrows() < a.ncols() {
        let mut s = svd(&a.adjoint())?.s;
        s.truncate(a.nrows());
        Ok(s)
    } else {
        Ok(svd(a)?.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;
    type M = DenseMatrix<f64>;

    #[test]
    fn reconstructs_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = M::from_fn(7, 5, |_, _| {
            C::new(rng.random::<f64>() - 0.5, rng.random::<f64>())
        });
        let d = svd(&a).unwrap();
        let sigma = M::from_diagonal(&d.s.iter().map(|&x| C::new(x, 0.0)).collect::<Vec<_>>());
        let back = d.u.matmul(&sigma).unwrap().matmul(&d.v.adjoint()).unwrap();
        assert!(back.sub(&a).unwrap().max_abs() < 1e-13);
        let vtv = d.v.adjoint().matmul(&d.v).unwrap();
        assert!(vtv.sub(&M::identity(5)).unwrap().max_abs() < 1e-13);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn wide_matrix_null_space() {
        // Rank-1 row: null space of dimension 2.
        let a = M::from_fn(1, 3, |_, j| C::new(1.0 + j as f64, 0.5));
        let d = svd(&a).unwrap();
        assert_eq!(d.rank(1e-10), 1);
        let ns = d.null_space(1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v)[0].norm() < 1e-14);
        }
    }

    #[test]
    fn diagonal_values() {
        let a = M::from_diagonal(&[C::new(0.0, 3.0), C::new(1e-6, 0.0), C::new(-2.0, 0.0)]);
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-15 && (s[1] - 2.0).abs() < 1e-15);
        assert!((s[2] - 1e-6).abs() < 1e-20);
    }
}
