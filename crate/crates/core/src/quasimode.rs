//! Exponential solutions of `(p(tau) - z) u = 0` and the quasimodes they
//! produce for `P_N - z` when the half-line operator has a kernel.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, vec_norm};
use crate::operators::{toeplitz_matrix, OperatorSpec};
use crate::symbol::{LaurentSymbol, CIRCLE_TOL};
use crate::Matrix;

/// Relative SVD threshold for rank and null space.
pub const NULL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Roots inside the unit disk; solutions decay as `nu -> +inf`.
    DecayingRight,
    /// Roots outside; solutions decay as `nu -> -inf`.
    DecayingLeft,
}

/// Functions `nu -> nu^k zeta^(nu - anchor)`.
#[derive(Debug, Clone)]
pub struct ExpSolutionBasis {
    pub z: C64,
    pub side: Side,
    pub modes: Vec<(C64, u32)>,
    pub anchor: i64,
}

impl ExpSolutionBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Value of mode `m` at `nu`.
    pub fn eval(&self, m: usize, nu: i64) -> C64 {
        let (zeta, k) = self.modes[m];
        zeta.powi((nu - self.anchor) as i32) * (nu as f64).powi(k as i32)
    }

    /// Rows `nus`, one column per mode.
    pub fn sample(&self, nus: impl IntoIterator<Item = i64>) -> Matrix {
        let nus: Vec<i64> = nus.into_iter().collect();
        Matrix::from_fn(nus.len(), self.len(), |r, m| self.eval(m, nus[r]))
    }
}

/// Decaying exponential solutions on one side, with anchor `anchor`.
pub fn exp_solution_basis_at(
    sym: &LaurentSymbol,
    z: C64,
    side: Side,
    anchor: i64,
) -> Result<ExpSolutionBasis> {
    let split = sym.roots_split(z, CIRCLE_TOL)?;
    if split.at_zero > 0 || split.at_infinity > 0 {
        return Err(Error::DegenerateParameter(format!(
            "z = {z} loses characteristic roots to 0 or infinity"
        )));
    }
    let roots = match side {
        Side::DecayingRight => &split.inside,
        Side::DecayingLeft => &split.outside,
    };
    let modes = roots
        .iter()
        .flat_map(|&(zeta, mult)| (0..mult as u32).map(move |k| (zeta, k)))
        .collect();
    Ok(ExpSolutionBasis {
        z,
        side,
        modes,
        anchor,
    })
}

pub fn exp_solution_basis(sym: &LaurentSymbol, z: C64, side: Side) -> Result<ExpSolutionBasis> {
    exp_solution_basis_at(sym, z, side, 0)
}

/// `max_nu |((p(tau) - z) f)(nu)| / max_nu sum_j |a_j f(nu - j)|` over `window`.
pub fn recurrence_residual(
    sym: &LaurentSymbol,
    basis: &ExpSolutionBasis,
    m: usize,
    window: std::ops::Range<i64>,
) -> f64 {
    let terms = sym.terms();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for nu in window {
        let mut acc = -basis.z * basis.eval(m, nu);
        let mut mag = (basis.z * basis.eval(m, nu)).norm();
        for &(j, a) in &terms {
            let v = a * basis.eval(m, nu - j as i64);
            acc += v;
            mag += v.norm();
        }
        worst = worst.max(acc.norm());
        scale = scale.max(mag);
    }
    worst / scale
}

/// Boundary conditions `u(nu) = 0`, `nu in [-N_+, -1]`, on the right-decaying
/// basis: an `N_+ x m_+` matrix of maximal rank.
pub fn boundary_matrix(sym: &LaurentSymbol, z: C64) -> Result<(ExpSolutionBasis, Matrix)> {
    let np = sym.n_plus() as i64;
    let basis = exp_solution_basis_at(sym, z, Side::DecayingRight, -np)?;
    if basis.is_empty() {
        return Err(Error::WrongIndexSign {
            m: 0,
            n: np as usize,
        });
    }
    let a = basis.sample(-np..0);
    let expected = a.nrows().min(a.ncols());
    if expected > 0 {
        let rank = svd(&a)?.rank(NULL_TOL);
        if rank != expected {
            return Err(Error::RankDeficient { rank, expected });
        }
    }
    Ok((basis, a))
}

/// Coefficient vectors spanning the kernel of the boundary matrix.
fn boundary_null_space(a: &Matrix) -> Result<Vec<Vec<C64>>> {
    let m = a.ncols();
    if a.nrows() == 0 {
        return Ok((0..m)
            .map(|i| {
                (0..m)
                    .map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect());
    }
    // Pad to square so the SVD sees every right singular vector.
    let mut padded = Matrix::zeros(m.max(a.nrows()), m);
    padded.set_block(0, 0, a);
    Ok(svd(&padded)?.null_space(NULL_TOL))
}

#[derive(Debug, Clone, Serialize)]
pub struct Quasimode {
    /// `DecayingRight` for a quasimode of `P_N - z`, `DecayingLeft` for one of
    /// `(P_N - z)^*`.
    pub side: Side,
    pub vector: Vec<C64>,
    pub residual: f64,
}

fn right_quasimode(sym: &LaurentSymbol, n: usize, z: C64) -> Result<(Vec<C64>, f64)> {
    let (basis, a) = boundary_matrix(sym, z)?;
    let kernel = boundary_null_space(&a)?;
    let coeffs = kernel.first().ok_or(Error::WrongIndexSign {
        m: basis.len(),
        n: sym.n_plus(),
    })?;
    let window = basis.sample(0..n as i64);
    let mut u = window.mul_vec(coeffs);
    let norm = vec_norm(&u);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::NonConvergence {
            what: "quasimode normalization",
            iterations: 0,
        });
    }
    u.iter_mut().for_each(|x| *x /= norm);
    let r = toeplitz_matrix(sym, n).shifted(z).mul_vec(&u);
    Ok((u, vec_norm(&r)))
}

/// A unit vector `e` with `||(P_N - z) e||` (or, when the index is negative,
/// `||(P_N - z)^* e||`) exponentially small in `N`.
pub fn build_quasimode(spec: &OperatorSpec, z: C64) -> Result<Quasimode> {
    let sym = &spec.symbol;
    let split = sym.roots_split(z, CIRCLE_TOL)?;
    if split.m_plus > sym.n_plus() {
        let (vector, residual) = right_quasimode(sym, spec.n, z)?;
        return Ok(Quasimode {
            side: Side::DecayingRight,
            vector,
            residual,
        });
    }
    if split.m_minus > sym.n_minus() {
        // (P_N - z)^* is the Toeplitz matrix of the adjoint symbol at conj(z).
        let (vector, residual) = right_quasimode(&sym.adjoint(), spec.n, z.conj())?;
        return Ok(Quasimode {
            side: Side::DecayingLeft,
            vector,
            residual,
        });
    }
    Err(Error::WrongIndexSign {
        m: split.m_plus,
        n: sym.n_plus(),
    })
}
