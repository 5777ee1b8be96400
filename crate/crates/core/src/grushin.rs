//! The circulant Grushin problem `P_S - z` split along `S = J + I_N`, its
//! inverse blocks, the perturbed effective Hamiltonian and the log-determinant
//! factorization.
//!
//! Circulant positions `0..N~` stand for `nu = -N_- .. N + N_+ - 1`; the
//! first `|J|` positions are `J = [-N_-, N_+ - 1]` and the last `N` are
//! `I_N = [N_+, N_+ + N - 1]`, on which the circulant restricts to the
//! Toeplitz matrix.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm_estimate, svd, Lu};
use crate::operators::{
    build_circulant, build_toeplitz, circulant_spectrum, CirculantKernel, OperatorSpec,
};
use crate::Matrix;

const RANK_TOL: f64 = 1e-10;

/// The four blocks of `P_S - z`: `[[P_N - z, R_-], [R_+, R_{+-}]]`.
#[derive(Debug, Clone)]
pub struct GrushinProblem {
    pub p: Matrix,
    /// `I_N x J`.
    pub r_minus: Matrix,
    /// `J x I_N`.
    pub r_plus: Matrix,
    /// `J x J`.
    pub r_plus_minus: Matrix,
}

impl GrushinProblem {
    /// `P_S - z` in circulant position order.
    pub fn reassemble(&self) -> Matrix {
        let j = self.r_plus_minus.nrows();
        let n = self.p.nrows();
        let mut m = Matrix::zeros(n + j, n + j);
        m.set_block(0, 0, &self.r_plus_minus);
        m.set_block(0, j, &self.r_plus);
        m.set_block(j, 0, &self.r_minus);
        m.set_block(j, j, &self.p);
        m
    }
}

/// Restricts `build_circulant - z` to the index split and checks that `R_+`
/// is onto and `R_-` one-to-one.
pub fn assemble_grushin_problem(spec: &OperatorSpec, z: C64) -> Result<GrushinProblem> {
    let full = build_circulant(spec).shifted(z);
    let (j, nt) = (spec.j_len(), spec.n_tilde());
    let g = GrushinProblem {
        p: full.submatrix(j..nt, j..nt),
        r_minus: full.submatrix(j..nt, 0..j),
        r_plus: full.submatrix(0..j, j..nt),
        r_plus_minus: full.submatrix(0..j, 0..j),
    };
    for m in [&g.r_plus.adjoint(), &g.r_minus] {
        let rank = svd(m)?.rank(RANK_TOL);
        if rank != j {
            return Err(Error::RankDeficient { rank, expected: j });
        }
    }
    Ok(g)
}

/// Blocks of `(P_S - z)^{-1}`, all read off the circulant kernel.
#[derive(Debug, Clone)]
pub struct GrushinBlocks {
    pub z: C64,
    pub spec: OperatorSpec,
    /// `I_N x I_N`.
    pub e: Matrix,
    /// `I_N x J`.
    pub e_plus: Matrix,
    /// `J x I_N`.
    pub e_minus: Matrix,
    /// `J x J`.
    pub e_minus_plus: Matrix,
}

impl GrushinBlocks {
    /// The full inverse in circulant position order.
    pub fn reassemble(&self) -> Matrix {
        let j = self.e_minus_plus.nrows();
        let n = self.e.nrows();
        let mut m = Matrix::zeros(n + j, n + j);
        m.set_block(0, 0, &self.e_minus_plus);
        m.set_block(0, j, &self.e_minus);
        m.set_block(j, 0, &self.e_plus);
        m.set_block(j, j, &self.e);
        m
    }
}

pub fn grushin_blocks(spec: &OperatorSpec, z: C64) -> Result<GrushinBlocks> {
    let kernel = CirculantKernel::new(&spec.symbol, spec.n_tilde(), z)?;
    let (j, n) = (spec.j_len(), spec.n);
    // Position p (0-based) carries nu = p - N_-; only differences matter.
    let k = |row: usize, col: usize| kernel.get(row as i64 - col as i64);
    Ok(GrushinBlocks {
        z,
        spec: spec.clone(),
        e: Matrix::from_fn(n, n, |a, b| k(j + a, j + b)),
        e_plus: Matrix::from_fn(n, j, |a, b| k(j + a, b)),
        e_minus: Matrix::from_fn(j, n, |a, b| k(a, j + b)),
        e_minus_plus: Matrix::from_fn(j, j, k),
    })
}

/// `sum_k log |lambda_k - z|` over the circulant spectrum, i.e. `log |det(P_S - z)|`.
pub fn circulant_log_det(spec: &OperatorSpec, z: C64) -> Result<f64> {
    let lambda = circulant_spectrum(&spec.symbol, spec.n_tilde());
    let distance = alpha_of(&lambda, z);
    if distance == 0.0 {
        return Err(Error::OnSpectrum { distance });
    }
    Ok(lambda.iter().map(|l| (l - z).norm().ln()).sum())
}

/// Both sides of `log|det(P_N - z)| = log|det(P_S - z)| + log|det E_{-+}(z)|`.
pub fn effective_det_factorization(spec: &OperatorSpec, z: C64) -> Result<(f64, f64)> {
    let lhs = Lu::factor(&build_toeplitz(spec).shifted(z))?.log_abs_det();
    if !lhs.is_finite() {
        return Err(Error::OnSpectrum { distance: 0.0 });
    }
    let blocks = grushin_blocks(spec, z)?;
    let rhs = circulant_log_det(spec, z)? + Lu::factor(&blocks.e_minus_plus)?.log_abs_det();
    Ok((lhs, rhs))
}

/// Terms of the perturbed factorization
/// `log|det(P_N + dQ - z)| = log|det P^d| + log|det E^d_{-+}|`, with
/// `log|det P^d| = log|det(P_S - z)| + log|det(1 + E^0 dQ)|`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FactorizationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub circulant: f64,
    /// `log|det(1 + E^0 dQ)|`; zero when `delta = 0`.
    pub correction: f64,
    pub effective: f64,
}

pub fn perturbed_det_factorization(
    spec: &OperatorSpec,
    z: C64,
    q: &Matrix,
    delta: f64,
) -> Result<FactorizationCheck> {
    let perturbed = crate::randmat::perturb(&build_toeplitz(spec), delta, q)?;
    let lhs = Lu::factor(&perturbed.shifted(z))?.log_abs_det();
    let eff = perturbed_effective(spec, z, q, delta)?;
    let circulant = circulant_log_det(spec, z)?;
    let effective = Lu::factor(&eff.e_minus_plus_delta)?.log_abs_det();
    Ok(FactorizationCheck {
        lhs,
        rhs: circulant + eff.log_det_correction + effective,
        circulant,
        correction: eff.log_det_correction,
        effective,
    })
}

/// Norms entering the perturbation bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbationDiagnostics {
    pub alpha: f64,
    pub delta_q_norm: f64,
    pub e_norm: f64,
    pub e_plus_norm: f64,
    pub e_minus_norm: f64,
    /// `||E^d_{-+} - E^0_{-+}||`.
    pub shift_norm: f64,
    /// `2 ||E_+|| ||E_-|| ||dQ||`.
    pub shift_bound: f64,
    /// `||E^d_{-+}||` against `2 / alpha`.
    pub effective_norm: f64,
}

impl PerturbationDiagnostics {
    pub fn bounds_hold(&self) -> bool {
        let slack = 1.0 + 1e-9;
        self.shift_norm <= self.shift_bound * slack + 1e-15
            && self.effective_norm <= 2.0 / self.alpha * slack
    }
}

#[derive(Debug, Clone)]
pub struct PerturbedEffective {
    pub delta: f64,
    pub e_minus_plus_delta: Matrix,
    /// `E^0_{-+} - E^0_- dQ E^0_+`.
    pub first_order: Matrix,
    /// `log|det(1 + E^0 dQ)|`.
    pub log_det_correction: f64,
    pub diagnostics: PerturbationDiagnostics,
}

fn alpha_of(lambda: &[C64], z: C64) -> f64 {
    lambda
        .iter()
        .map(|l| (l - z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `E^d_{-+} = E^0_{-+} - E^0_- dQ (1 + E^0 dQ)^{-1} E^0_+` by one `N x N` solve.
pub fn perturbed_effective(
    spec: &OperatorSpec,
    z: C64,
    q: &Matrix,
    delta: f64,
) -> Result<PerturbedEffective> {
    let n = spec.n;
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "perturbation is {}x{}, operator is {n}x{n}",
            q.nrows(),
            q.ncols()
        )));
    }
    let blocks = grushin_blocks(spec, z)?;
    let alpha = alpha(spec, z);
    let delta_q_norm = delta.abs() * operator_norm_estimate(q)?;
    // ||E^0|| <= ||(P_S - z)^{-1}|| = 1 / alpha.
    let product = delta_q_norm / alpha;
    if product >= 0.5 {
        return Err(Error::NeumannDivergence { product });
    }
    let first_order;
    let e_minus_plus_delta;
    let log_det_correction;
    if delta == 0.0 {
        first_order = blocks.e_minus_plus.clone();
        e_minus_plus_delta = blocks.e_minus_plus.clone();
        log_det_correction = 0.0;
    } else {
        let dq = q.scaled(C64::new(delta, 0.0));
        let dq_e_plus = dq.matmul(&blocks.e_plus)?;
        first_order = blocks
            .e_minus_plus
            .sub(&blocks.e_minus.matmul(&dq_e_plus)?)?;
        let one_plus = Matrix::identity(n).add(&blocks.e.matmul(&dq)?)?;
        let lu = Lu::factor(&one_plus)?;
        log_det_correction = lu.log_abs_det();
        let x = lu.solve(&blocks.e_plus)?;
        e_minus_plus_delta = blocks
            .e_minus_plus
            .sub(&blocks.e_minus.matmul(&dq.matmul(&x)?)?)?;
    }
    let shift = e_minus_plus_delta.sub(&blocks.e_minus_plus)?;
    let e_plus_norm = operator_norm_estimate(&blocks.e_plus)?;
    let e_minus_norm = operator_norm_estimate(&blocks.e_minus)?;
    let diagnostics = PerturbationDiagnostics {
        alpha,
        delta_q_norm,
        e_norm: operator_norm_estimate(&blocks.e)?,
        e_plus_norm,
        e_minus_norm,
        shift_norm: operator_norm_estimate(&shift)?,
        shift_bound: 2.0 * e_plus_norm * e_minus_norm * delta_q_norm,
        effective_norm: operator_norm_estimate(&e_minus_plus_delta)?,
    };
    Ok(PerturbedEffective {
        delta,
        e_minus_plus_delta,
        first_order,
        log_det_correction,
        diagnostics,
    })
}

const SERIES_MAX_TERMS: usize = 200;

/// `E^d_{-+}` by summing the Neumann series of `(1 + E^0 dQ)^{-1} E^0_+`
/// column-wise; `O(N^2 |J|)` per term instead of a dense `N x N` solve.
pub fn perturbed_effective_series(
    blocks: &GrushinBlocks,
    q: &Matrix,
    delta: f64,
) -> Result<Matrix> {
    let n = blocks.e.nrows();
    let j = blocks.e_plus.ncols();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "perturbation is {}x{}, need {n}x{n}",
            q.nrows(),
            q.ncols()
        )));
    }
    if delta == 0.0 {
        return Ok(blocks.e_minus_plus.clone());
    }
    let mut out = blocks.e_minus_plus.clone();
    for col in 0..j {
        let mut term = blocks.e_plus.column(col);
        let mut acc = term.clone();
        let mut converged = false;
        for _ in 0..SERIES_MAX_TERMS {
            let qt: Vec<C64> = q.mul_vec(&term).into_iter().map(|x| x * delta).collect();
            term = blocks.e.mul_vec(&qt).into_iter().map(|x| -x).collect();
            let tn = crate::linalg::vec_norm(&term);
            acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            if tn <= f64::EPSILON * crate::linalg::vec_norm(&acc) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "Neumann series for the effective Hamiltonian",
                iterations: SERIES_MAX_TERMS,
            });
        }
        let qacc: Vec<C64> = q.mul_vec(&acc).into_iter().map(|x| x * delta).collect();
        let corr = blocks.e_minus.mul_vec(&qacc);
        for (row, c) in corr.into_iter().enumerate() {
            out[(row, col)] -= c;
        }
    }
    Ok(out)
}

/// Singular values of `E_+` and of `E_-^*`, descending.
pub fn singular_values_e_pm(blocks: &GrushinBlocks) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((svd(&blocks.e_plus)?.s, svd(&blocks.e_minus.adjoint())?.s))
}

/// `alpha(z) = dist(z, p(S^_N~))`.
pub fn alpha(spec: &OperatorSpec, z: C64) -> f64 {
    alpha_of(&circulant_spectrum(&spec.symbol, spec.n_tilde()), z)
}

/// `phi(z) = (1/N) sum_{lambda in p(S^_N~)} log |lambda - z|` (N~ terms, divided by N).
pub fn phi(spec: &OperatorSpec, z: C64) -> Result<f64> {
    Ok(circulant_log_det(spec, z)? / spec.n as f64)
}

/// `psi = phi + C log N / N`.
pub fn psi(spec: &OperatorSpec, z: C64, c_psi: f64) -> Result<f64> {
    let n = spec.n as f64;
    Ok(phi(spec, z)? + c_psi * n.ln() / n)
}

pub const DEFAULT_C_PSI: f64 = 1.0;
