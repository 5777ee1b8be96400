use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lu::Lu;
use super::matrix::{vec_norm, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_POWER_ITERATIONS: usize = 5000;
const MAX_LANCZOS_STEPS: usize = 400;

fn start_vector<T: Real>(n: usize) -> Vec<Complex<T>> {
    // Fixed seed: estimates are deterministic functions of the matrix.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_70e9);
    let mut x: Vec<Complex<T>> = (0..n)
        .map(|_| {
            Complex::new(
                T::from_f64(rng.random::<f64>() + 0.5),
                T::from_f64(rng.random::<f64>() - 0.5),
            )
        })
        .collect();
    normalize(&mut x);
    x
}

fn normalize<T: Real>(x: &mut [Complex<T>]) -> T {
    let nrm = vec_norm(x);
    if nrm > T::zero() {
        x.iter_mut().for_each(|z| *z /= nrm);
    }
    nrm
}

/// Largest singular value by power iteration on `A^H A`; stops when the
/// estimate stagnates to `rel_tol`. The estimate is a lower bound on `||A||_2`.
pub fn operator_norm_estimate_with<T: Real>(a: &DenseMatrix<T>, rel_tol: T) -> Result<T> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(T::zero());
    }
    let mut x = start_vector::<T>(a.ncols());
    let mut est = T::zero();
    for _ in 0..MAX_POWER_ITERATIONS {
        let y = a.mul_vec(&x);
        let new = vec_norm(&y);
        if new == T::zero() {
            // Start vector in the kernel; the matrix may still be nonzero.
            if a.max_abs() == T::zero() {
                return Ok(T::zero());
            }
            x = start_vector::<T>(a.ncols()).into_iter().rev().collect();
            continue;
        }
        let mut z = a.adjoint_mul_vec(&y);
        normalize(&mut z);
        x = z;
        if (new - est).abs() <= rel_tol * new {
            return Ok(new.max(est));
        }
        est = new;
    }
    Err(Error::NonConvergence {
        what: "operator norm power iteration",
        iterations: MAX_POWER_ITERATIONS,
    })
}

pub fn operator_norm_estimate<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    operator_norm_estimate_with(a, T::from_f64(1e-6))
}

/// Smallest singular value by Lanczos iteration on `(A^H A)^{-1}` using one LU
/// factorization. Returns zero for an exactly singular matrix.
pub fn smallest_singular_value_with<T: Real>(a: &DenseMatrix<T>, rel_tol: T) -> Result<T> {
    let lu = Lu::factor(a)?;
    smallest_singular_value_lu(&lu, rel_tol)
}

pub fn smallest_singular_value<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    smallest_singular_value_with(a, T::from_f64(1e-8))
}

fn inner<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter()
        .zip(y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + a.conj() * b
        })
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e`, by Sturm-sequence bisection.
fn tridiagonal_max_eigenvalue<T: Real>(d: &[T], e: &[T]) -> T {
    let m = d.len();
    let off = |i: usize| if i < e.len() { e[i].abs() } else { T::zero() };
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for i in 0..m {
        let r = off(i) + if i > 0 { off(i - 1) } else { T::zero() };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    // Number of eigenvalues below x.
    let below = |x: T| {
        let mut count = 0;
        let mut q = T::one();
        for i in 0..m {
            let e2 = if i > 0 {
                e[i - 1] * e[i - 1]
            } else {
                T::zero()
            };
            q = d[i] - x - if i > 0 { e2 / q } else { T::zero() };
            if q == T::zero() {
                q = T::epsilon() * (x.abs() + T::one());
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = (lo + hi) / T::from_f64(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn smallest_singular_value_lu<T: Real>(lu: &Lu<T>, rel_tol: T) -> Result<T> {
    let n = lu.dim();
    if n == 0 {
        return Ok(T::infinity());
    }
    if lu.is_singular() {
        return Ok(T::zero());
    }
    let steps = n.min(MAX_LANCZOS_STEPS);
    let mut basis: Vec<Vec<Complex<T>>> = vec![start_vector::<T>(n)];
    let (mut diag, mut off) = (Vec::new(), Vec::new());
    let mut prev = T::zero();
    for k in 0..steps {
        let mut w = lu.solve_vec(&lu.solve_adjoint_vec(&basis[k])?)?;
        if !vec_norm(&w).is_finite() {
            return Ok(T::zero());
        }
        diag.push(inner(&basis[k], &w).re);
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * *qi);
            }
        }
        let theta = tridiagonal_max_eigenvalue(&diag, &off);
        let beta = normalize(&mut w);
        let exhausted = k + 1 == n || beta <= T::epsilon() * theta;
        if exhausted || (k > 0 && (theta - prev).abs() <= rel_tol * theta) {
            return Ok(T::one() / theta.sqrt());
        }
        prev = theta;
        off.push(beta);
        basis.push(w);
    }
    Err(Error::NonConvergence {
        what: "Lanczos iteration for the smallest singular value",
        iterations: steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd::singular_values;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;
    type M = DenseMatrix<f64>;

    #[test]
    fn identity_and_diagonal() {
        assert!((smallest_singular_value(&M::identity(5)).unwrap() - 1.0).abs() < 1e-12);
        let d = M::from_diagonal(&[C::new(1.0, 0.0), C::new(1e-6, 0.0)]);
        assert!((smallest_singular_value(&d).unwrap() - 1e-6).abs() < 1e-14);
        let d = M::from_diagonal(&[C::new(3.0, 0.0), C::new(1.0, 0.0)]);
        assert!((operator_norm_estimate(&d).unwrap() - 3.0).abs() < 3e-6);
    }

    #[test]
    fn singular_returns_zero() {
        let mut a = M::identity(3);
        a[(2, 2)] = C::new(0.0, 0.0);
        assert_eq!(smallest_singular_value(&a).unwrap(), 0.0);
    }

    #[test]
    fn agrees_with_full_svd_on_small_random() {
        for seed in 0..6 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 8 + 8 * seed as usize;
            let a = M::from_fn(n, n, |_, _| {
                C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let s = singular_values(&a).unwrap();
            let smin = smallest_singular_value(&a).unwrap();
            assert!(
                (smin - s[n - 1]).abs() <= 1e-7 * s[n - 1],
                "n={n}: {smin} vs {}",
                s[n - 1]
            );
            let smax = operator_norm_estimate(&a).unwrap();
            assert!(smax <= s[0] * (1.0 + 1e-12) && smax >= s[0] * (1.0 - 1e-5));
        }
    }

    #[test]
    fn smin_times_inverse_norm_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 20;
        let mut a = M::from_fn(n, n, |_, _| {
            C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        for i in 0..n {
            a[(i, i)] += C::new(4.0, 0.0);
        }
        let inv = Lu::factor(&a).unwrap().inverse().unwrap();
        let prod = smallest_singular_value(&a).unwrap()
            * operator_norm_estimate_with(&inv, 1e-12).unwrap();
        assert!((prod - 1.0).abs() < 1e-5);
    }
}
