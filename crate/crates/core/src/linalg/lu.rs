use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{axpy, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    factors: DenseMatrix<T>,
    /// `perm[i]` is the original row stored at position `i`.
    perm: Vec<usize>,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NonSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let n = a.nrows();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = f[(k, k)].norm();
            for i in k + 1..n {
                let v = f[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                let (rp, rk) = f.two_rows_mut(p, k);
                rp.swap_with_slice(rk);
                perm.swap(p, k);
            }
            let pivot = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / pivot;
                if l.is_zero() {
                    continue;
                }
                f[(i, k)] = l;
                let (ri, rk) = f.two_rows_mut(i, k);
                axpy(-l, &rk[k + 1..], &mut ri[k + 1..]);
            }
        }
        Ok(Self {
            factors: f,
            perm,
            singular,
        })
    }

    pub fn dim(&self) -> usize {
        self.factors.nrows()
    }

    /// True when some pivot is exactly zero.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// `log |det A|`, `-inf` for an exactly singular matrix.
    pub fn log_abs_det(&self) -> T {
        if self.singular {
            return T::neg_infinity();
        }
        (0..self.dim())
            .map(|i| self.factors[(i, i)].norm().ln())
            .sum()
    }

    /// Smallest pivot modulus; a cheap singularity indicator.
    pub fn min_pivot(&self) -> T {
        (0..self.dim())
            .map(|i| self.factors[(i, i)].norm())
            .fold(T::infinity(), T::min)
    }

    fn require_regular(&self) -> Result<()> {
        if self.singular {
            Err(Error::PreconditionViolated(
                "matrix is exactly singular".into(),
            ))
        } else {
            Ok(())
        }
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.require_regular()?;
        let n = self.dim();
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "rhs length {} for dimension {n}",
                b.len()
            )));
        }
        let f = &self.factors;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = f.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = f.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        Ok(x)
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint_vec(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.require_regular()?;
        let n = self.dim();
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "rhs length {} for dimension {n}",
                b.len()
            )));
        }
        let f = &self.factors;
        // A^H = U^H L^H P, so solve U^H y = b, L^H w = y, x = P^T w.
        let mut y = b.to_vec();
        for i in 0..n {
            y[i] /= f[(i, i)].conj();
            let yi = y[i];
            let row = f.row(i);
            for j in i + 1..n {
                y[j] -= row[j].conj() * yi;
            }
        }
        for i in (0..n).rev() {
            let yi = y[i];
            let row = f.row(i);
            for j in 0..i {
                y[j] -= row[j].conj() * yi;
            }
        }
        let mut x = vec![Complex::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if b.nrows() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "rhs has {} rows for dimension {}",
                b.nrows(),
                self.dim()
            )));
        }
        let mut out = DenseMatrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let x = self.solve_vec(&b.column(j))?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        self.solve(&DenseMatrix::identity(self.dim()))
    }
}

/// `log |det A|` from the pivots of a partially pivoted LU; `-inf` if a pivot is exactly zero.
pub fn lu_log_abs_det<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    Ok(Lu::factor(a)?.log_abs_det())
}

pub fn solve<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Lu::factor(a)?.solve(b)
}
