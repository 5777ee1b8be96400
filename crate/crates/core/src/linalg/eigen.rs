//! Eigenvalues of general complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! implicit QR with Wilkinson shifts and the Ahues-Tisseur deflation test
//! (the structure of LAPACK's `zlahqr`, eigenvalues only). The result is
//! backward stable: the computed eigenvalues are exact for `A + dA` with
//! `||dA|| = O(n * eps * ||A||)`.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cabs1, Real};

/// Default largest dimension accepted by [`eigenvalues`].
pub const DEFAULT_MAX_DIM: usize = 2048;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub max_dim: usize,
    /// QR sweeps allowed per deflated eigenvalue, times `max(10, n)`.
    pub iterations_per_dim: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            iterations_per_dim: 30,
        }
    }
}

/// All `n` eigenvalues of a square matrix, with multiplicity, in no particular order.
pub fn eigenvalues<T: Real>(a: &DenseMatrix<T>) -> Result<Vec<Complex<T>>> {
    eigenvalues_with(a, EigenOptions::default())
}

pub fn eigenvalues_with<T: Real>(
    a: &DenseMatrix<T>,
    opts: EigenOptions,
) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n > opts.max_dim {
        return Err(Error::TooLarge {
            n,
            max: opts.max_dim,
        });
    }
    let mut h = a.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h, opts)
}

/// In-place unitary similarity to upper Hessenberg form; entries below the
/// first subdiagonal are set to exact zeros.
pub fn reduce_to_hessenberg<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.nrows();
    debug_assert!(a.is_square());
    let two = T::one() + T::one();
    let mut v = vec![Complex::<T>::zero(); n];
    let mut w = vec![Complex::<T>::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = a[(k + 1, k)];
        let mut tail = T::zero();
        for i in k + 2..n {
            tail += a[(i, k)].norm_sqr();
        }
        if tail == T::zero() {
            continue;
        }
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let anorm = alpha.norm();
        let phase = if anorm == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            alpha / anorm
        };
        let beta = -phase * xnorm;
        v[0] = alpha - beta;
        for i in 1..m {
            v[i] = a[(k + 1 + i, k)];
        }
        let vnorm2 = v[0].norm_sqr() + tail;
        let tau = two / vnorm2;

        // Left: rows k+1.., columns k+1.. (column k is set explicitly below).
        let w = &mut w[k + 1..n];
        w.iter_mut().for_each(|x| *x = Complex::zero());
        for i in 0..m {
            let c = v[i].conj();
            let row = &a.row(k + 1 + i)[k + 1..];
            for (wj, &r) in w.iter_mut().zip(row) {
                *wj += c * r;
            }
        }
        for i in 0..m {
            let f = v[i] * tau;
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for (r, &wj) in row.iter_mut().zip(w.iter()) {
                *r -= f * wj;
            }
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = Complex::zero();
        }

        // Right: all rows, columns k+1..
        let vs = &v[..m];
        for r in 0..n {
            let row = &mut a.row_mut(r)[k + 1..];
            let mut s = Complex::zero();
            for (&x, &vi) in row.iter().zip(vs) {
                s += x * vi;
            }
            let f = s * tau;
            for (x, &vi) in row.iter_mut().zip(vs) {
                *x -= f * vi.conj();
            }
        }
    }
}

/// Plane rotation `G = [[c, s], [-conj(s), c]]` with `G (x, y)^T = (r, 0)^T`.
#[inline]
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>, Complex<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), Complex::zero(), x);
    }
    if ax == T::zero() {
        return (T::zero(), Complex::new(T::one(), T::zero()), y);
    }
    let r = ax.hypot(ay);
    let phase = x / ax;
    let c = ax / r;
    let s = phase * y.conj() / r;
    (c, s, phase * r)
}

/// Eigenvalues of an upper Hessenberg matrix; `h` is overwritten.
pub fn hessenberg_qr<T: Real>(
    h: &mut DenseMatrix<T>,
    opts: EigenOptions,
) -> Result<Vec<Complex<T>>> {
    let n = h.nrows();
    let mut eig = vec![Complex::<T>::zero(); n];
    if n == 0 {
        return Ok(eig);
    }
    let ulp = T::epsilon();
    let safmin = T::min_positive_value();
    let smlnum = safmin * (T::from_usize(n) / ulp);
    let half = T::from_f64(0.5);
    let dat1 = T::from_f64(0.75);
    let itmax = opts.iterations_per_dim * n.max(10);

    let mut i = n - 1;
    let mut kdefl = 0usize;
    let mut rotations: Vec<(Complex<T>, Complex<T>, Complex<T>)> = Vec::with_capacity(n);
    loop {
        let mut l = 0usize;
        let mut converged = false;
        for _its in 0..=itmax {
            // Look for a negligible subdiagonal entry.
            let mut k = i;
            while k > l {
                let sub = h[(k, k - 1)];
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
                if tst == T::zero() {
                    if k >= l + 2 {
                        tst += cabs1(h[(k - 1, k - 2)]);
                    }
                    if k < i {
                        tst += cabs1(h[(k + 1, k)]);
                    }
                }
                if cabs1(sub) <= ulp * tst {
                    let sup = cabs1(h[(k - 1, k)]);
                    let ab = cabs1(sub).max(sup);
                    let ba = cabs1(sub).min(sup);
                    let d = cabs1(h[(k, k)]);
                    let e = cabs1(h[(k - 1, k - 1)] - h[(k, k)]);
                    let aa = d.max(e);
                    let bb = d.min(e);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = Complex::zero();
            }
            if l >= i {
                converged = true;
                break;
            }
            kdefl += 1;

            let t = if kdefl.is_multiple_of(20) {
                h[(i, i)] + Complex::new(dat1 * cabs1(h[(i, i - 1)]), T::zero())
            } else if kdefl.is_multiple_of(10) {
                h[(l, l)] + Complex::new(dat1 * cabs1(h[(l + 1, l)]), T::zero())
            } else {
                wilkinson_shift(h, i, half)
            };

            // Implicit single-shift sweep over the active block [l, i]. Column
            // rotation k touches rows l..=k+2; rows k..=k+2 are updated at once,
            // rows above k only after the sweep (contiguous row passes).
            rotations.clear();
            let mut x = h[(l, l)] - t;
            let mut y = h[(l + 1, l)];
            for k in l..i {
                if k > l {
                    x = h[(k, k - 1)];
                    y = h[(k + 1, k - 1)];
                }
                let (c, s, r) = givens(x, y);
                if k > l {
                    h[(k, k - 1)] = r;
                    h[(k + 1, k - 1)] = Complex::zero();
                }
                let cc = Complex::new(c, T::zero());
                let sc = s.conj();
                {
                    let (rk, rk1) = h.two_rows_mut(k, k + 1);
                    for (a, b) in rk[k..=i].iter_mut().zip(rk1[k..=i].iter_mut()) {
                        let (p, q) = (*a, *b);
                        *a = cc * p + s * q;
                        *b = cc * q - sc * p;
                    }
                }
                let last = (k + 2).min(i);
                for r in k.max(l)..=last {
                    let row = h.row_mut(r);
                    let (p, q) = (row[k], row[k + 1]);
                    row[k] = cc * p + sc * q;
                    row[k + 1] = cc * q - s * p;
                }
                rotations.push((cc, s, sc));
            }
            for r in l..i {
                let row = h.row_mut(r);
                // Rotations k < r were applied in the sweep.
                for (k, &(cc, s, sc)) in rotations.iter().enumerate().skip(r + 1 - l) {
                    let k = k + l;
                    let (p, q) = (row[k], row[k + 1]);
                    row[k] = cc * p + sc * q;
                    row[k + 1] = cc * q - s * p;
                }
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "Hessenberg QR",
                iterations: itmax,
            });
        }
        // Block [l, i] has split; l == i is a converged eigenvalue.
        eig[i] = h[(i, i)];
        kdefl = 0;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    Ok(eig)
}

fn wilkinson_shift<T: Real>(h: &DenseMatrix<T>, i: usize, half: T) -> Complex<T> {
    let mut t = h[(i, i)];
    let u = h[(i - 1, i)].sqrt() * h[(i, i - 1)].sqrt();
    let s = cabs1(u);
    if s != T::zero() {
        let x = (h[(i - 1, i - 1)] - t) * half;
        let sx = cabs1(x);
        let s = s.max(sx);
        let xs = x / s;
        let us = u / s;
        let mut y = (xs * xs + us * us).sqrt() * s;
        if sx > T::zero() {
            let xn = x / sx;
            if xn.re * y.re + xn.im * y.im < T::zero() {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random_matrix(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, n, |_, _| {
            C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn sorted(mut v: Vec<C>) -> Vec<C> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn hessenberg_is_similar() {
        let a = random_matrix(12, 3);
        let mut h = a.clone();
        reduce_to_hessenberg(&mut h);
        for i in 0..12usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], C::zero());
            }
        }
        let tr_a: C = (0..12).map(|i| a[(i, i)]).sum();
        let tr_h: C = (0..12).map(|i| h[(i, i)]).sum();
        assert!((tr_a - tr_h).norm() < 1e-12);
        assert!((a.hs_norm() - h.hs_norm()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_and_triangular() {
        let d = DenseMatrix::<f64>::from_diagonal(&[
            C::new(1.0, 0.0),
            C::new(2.0, 0.0),
            C::new(3.0, 0.0),
        ]);
        let ev = sorted(eigenvalues(&d).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e - C::new(k as f64 + 1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn cyclic_shift_gives_roots_of_unity() {
        let n = 4;
        let p = DenseMatrix::<f64>::from_fn(n, n, |i, j| {
            if (i + n - j) % n == 1 {
                C::new(1.0, 0.0)
            } else {
                C::zero()
            }
        });
        let ev = eigenvalues(&p).unwrap();
        for target in [
            C::new(1.0, 0.0),
            C::new(0.0, 1.0),
            C::new(-1.0, 0.0),
            C::new(0.0, -1.0),
        ] {
            assert!(
                ev.iter().any(|e| (e - target).norm() < 1e-12),
                "{target} missing from {ev:?}"
            );
        }
    }

    #[test]
    fn trace_and_transpose_invariance() {
        let a = random_matrix(40, 11);
        let ev = eigenvalues(&a).unwrap();
        let tr: C = (0..40).map(|i| a[(i, i)]).sum();
        assert!((ev.iter().sum::<C>() - tr).norm() < 1e-11);
        let evt = eigenvalues(&a.transpose()).unwrap();
        for e in &ev {
            let d = evt
                .iter()
                .map(|f| (e - f).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let a = DenseMatrix::<f32>::from_diagonal(&[
            Complex::new(2.0f32, 1.0),
            Complex::new(-1.0, 0.5),
        ]);
        let ev = eigenvalues(&a).unwrap();
        assert!(ev
            .iter()
            .any(|e| (e - Complex::new(2.0f32, 1.0)).norm() < 1e-5));
    }

    #[test]
    fn rejects_non_square_and_oversized() {
        assert!(matches!(
            eigenvalues(&DenseMatrix::<f64>::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
        let opts = EigenOptions {
            max_dim: 2,
            ..Default::default()
        };
        assert!(matches!(
            eigenvalues_with(&DenseMatrix::<f64>::identity(3), opts),
            Err(Error::TooLarge { .. })
        ));
    }
}
