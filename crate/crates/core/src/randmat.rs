//! Reproducible complex Gaussian matrices.
//!
//! Entries are iid `N_C(0, 1)`: real and imaginary parts are independent real
//! normals of variance 1/2, so `E|q|^2 = 1`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Matrix;

/// `(master_seed, trial_index)`; each index selects its own ChaCha stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `n x n` matrix of iid complex standard Gaussians, filled row-major.
pub fn sample_gaussian_matrix(n: usize, stream: &SeededStream) -> Matrix {
    let mut rng = stream.rng();
    Matrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng))
}

/// `P + delta Q`.
pub fn perturb(p: &Matrix, delta: f64, q: &Matrix) -> Result<Matrix> {
    if p.nrows() != q.nrows() || p.ncols() != q.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "operator is {}x{}, perturbation is {}x{}",
            p.nrows(),
            p.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    let mut out = p.clone();
    for (o, x) in out.as_mut_slice().iter_mut().zip(q.as_slice()) {
        *o += x * delta;
    }
    Ok(out)
}

/// Whether `||Q||_HS <= c1 N`.
pub fn hs_norm_event(q: &Matrix, c1: f64) -> bool {
    q.hs_norm() <= c1 * q.nrows() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_entries() {
        let mut rng = SeededStream::new(2024, 0).rng();
        let draws = 1_000_000;
        let (mut sum, mut sq) = (C64::new(0.0, 0.0), 0.0);
        let (mut re2, mut im2) = (0.0, 0.0);
        for _ in 0..draws {
            let q = complex_gaussian(&mut rng);
            sum += q;
            sq += q.norm_sqr();
            re2 += q.re * q.re;
            im2 += q.im * q.im;
        }
        let n = draws as f64;
        assert!((sum / n).norm() <= 0.005);
        assert!((sq / n - 1.0).abs() <= 0.01);
        assert!((re2 / n - 0.5).abs() <= 0.005 && (im2 / n - 0.5).abs() <= 0.005);
    }

    #[test]
    fn determinism_and_stream_separation() {
        let a = sample_gaussian_matrix(5, &SeededStream::new(7, 3));
        assert_eq!(a, sample_gaussian_matrix(5, &SeededStream::new(7, 3)));
        assert_ne!(a, sample_gaussian_matrix(5, &SeededStream::new(7, 4)));
        assert_ne!(a, sample_gaussian_matrix(5, &SeededStream::new(8, 3)));
    }

    #[test]
    fn perturb_is_linear() {
        let p = sample_gaussian_matrix(6, &SeededStream::new(1, 0));
        let q = sample_gaussian_matrix(6, &SeededStream::new(1, 1));
        assert_eq!(perturb(&p, 0.0, &q).unwrap(), p);
        let delta = 1e-3;
        let diff = perturb(&p, delta, &q).unwrap().sub(&p).unwrap().hs_norm();
        assert!((diff - delta * q.hs_norm()).abs() <= 1e-12 * diff);
        assert!(matches!(
            perturb(&p, 1.0, &Matrix::zeros(2, 2)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn hs_norm_event_frequencies() {
        let hits = (0..10_000u64)
            .filter(|&k| hs_norm_event(&sample_gaussian_matrix(100, &SeededStream::new(9, k)), 2.0))
            .count();
        assert_eq!(hits, 10_000);
        let q = sample_gaussian_matrix(4, &SeededStream::new(9, 0));
        assert!(!hs_norm_event(&q, 0.0));

        let trials = 1000;
        let mean: f64 = (0..trials)
            .map(|k| {
                sample_gaussian_matrix(64, &SeededStream::new(10, k))
                    .hs_norm()
                    .powi(2)
            })
            .sum::<f64>()
            / trials as f64;
        assert!((mean / 4096.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn unitary_conjugation_preserves_entry_law() {
        let n = 16;
        let dft = Matrix::from_fn(n, n, |j, k| {
            C64::from_polar(
                1.0 / (n as f64).sqrt(),
                -std::f64::consts::TAU * (j * k) as f64 / n as f64,
            )
        });
        let trials = 10_000u64;
        let (mut m1, mut v1, mut m2, mut v2) = (C64::new(0.0, 0.0), 0.0, C64::new(0.0, 0.0), 0.0);
        for k in 0..trials {
            let q = sample_gaussian_matrix(n, &SeededStream::new(77, k));
            let uqu = dft.matmul(&q).unwrap().matmul(&dft.adjoint()).unwrap();
            for (a, b) in q.as_slice().iter().zip(uqu.as_slice()) {
                m1 += a;
                v1 += a.norm_sqr();
                m2 += b;
                v2 += b.norm_sqr();
            }
        }
        let count = (trials as usize * n * n) as f64;
        let sigma_mean = (1.0 / count).sqrt();
        // |q|^2 is Exp(1): variance 1.
        let sigma_var = (1.0 / count).sqrt();
        assert!((m1 / count).norm() < 5.0 * sigma_mean && (m2 / count).norm() < 5.0 * sigma_mean);
        assert!(
            (v1 / count - 1.0).abs() < 5.0 * sigma_var
                && (v2 / count - 1.0).abs() < 5.0 * sigma_var
        );
        assert!((v1 / count - v2 / count).abs() < 5.0 * 2f64.sqrt() * sigma_var);
    }
}
