//! Toeplitz and circulant matrices of a symbol, the circulant spectrum, and
//! the resolvent kernels on `Z` and on `Z / N~ Z`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::domains::{count_in_region, Region};
use crate::error::{Error, Result};
use crate::symbol::{preimage_measure, CurveGrid, LaurentSymbol, RootSplit, CIRCLE_TOL};
use crate::Matrix;

/// A Toeplitz dimension `N` together with its symbol; the circulant
/// dimension is `N~ = N + N_+ + N_-`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub symbol: LaurentSymbol,
    pub n: usize,
}

impl OperatorSpec {
    pub fn new(symbol: LaurentSymbol, n: usize) -> Result<Self> {
        if n < symbol.degree() + 1 {
            return Err(Error::InvariantViolation(format!(
                "N = {n} must be at least N_+ + N_- + 1 = {}",
                symbol.degree() + 1
            )));
        }
        Ok(Self { symbol, n })
    }

    pub fn n_tilde(&self) -> usize {
        self.n + self.symbol.degree()
    }

    /// `|J| = N_+ + N_-`.
    pub fn j_len(&self) -> usize {
        self.symbol.degree()
    }
}

/// `N x N` band matrix with `M[nu, mu] = a_{nu - mu}`.
pub fn build_toeplitz(spec: &OperatorSpec) -> Matrix {
    toeplitz_matrix(&spec.symbol, spec.n)
}

pub fn toeplitz_matrix(sym: &LaurentSymbol, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for (j, a) in sym.terms() {
        for nu in 0..n as i64 {
            let mu = nu - j as i64;
            if (0..n as i64).contains(&mu) {
                m[(nu as usize, mu as usize)] = a;
            }
        }
    }
    m
}

/// `N~ x N~` circulant of the spec.
pub fn build_circulant(spec: &OperatorSpec) -> Matrix {
    circulant_matrix(&spec.symbol, spec.n_tilde())
        .expect("N~ exceeds the band width by construction")
}

/// Circulant with `M[nu, mu] = a_j` for `j = nu - mu mod N~`.
pub fn circulant_matrix(sym: &LaurentSymbol, n_tilde: usize) -> Result<Matrix> {
    if n_tilde <= sym.degree() {
        return Err(Error::Overlap {
            n_tilde,
            band: sym.degree(),
        });
    }
    let n = n_tilde as i64;
    let mut m = Matrix::zeros(n_tilde, n_tilde);
    for (j, a) in sym.terms() {
        for nu in 0..n {
            let mu = (nu - j as i64).rem_euclid(n);
            m[(nu as usize, mu as usize)] = a;
        }
    }
    Ok(m)
}

/// `lambda_k = sum_j a_j omega_k^{-j}`, `omega_k = e^{2 pi i k / N~}`, `k = 0..N~`.
pub fn circulant_spectrum(sym: &LaurentSymbol, n_tilde: usize) -> Vec<C64> {
    (0..n_tilde)
        .map(|k| sym.eval_curve(-TAU * k as f64 / n_tilde as f64))
        .collect()
}

/// Resolvent kernel of `p(tau) - z` on `Z`:
/// `K(k) = (1/2 pi) int zeta^k / (p(1/zeta) - z) d theta` over a circle
/// separating the inside roots from the outside roots.
#[derive(Debug, Clone)]
pub struct InfiniteKernel {
    sym: LaurentSymbol,
    z: C64,
    split: RootSplit,
    radius: f64,
}

pub const QUADRATURE_TOL: f64 = 1e-11;
const QUADRATURE_START: usize = 64;
const QUADRATURE_MAX: usize = 1 << 22;

impl InfiniteKernel {
    pub fn new(sym: &LaurentSymbol, z: C64) -> Result<Self> {
        let split = sym.roots_split(z, CIRCLE_TOL).map_err(|e| match e {
            Error::RootsOnCircle { .. } => {
                let (distance, _) = crate::symbol::dist_to_curve(sym, z);
                Error::OnCurve {
                    distance,
                    tol: CIRCLE_TOL,
                }
            }
            other => other,
        })?;
        let (rho_in, rho_out) = (split.rho_in(), split.rho_out());
        let radius = if rho_in == 0.0 {
            rho_out.min(2.0) / 2.0
        } else if rho_out.is_infinite() {
            2.0 * rho_in.max(0.5)
        } else {
            (rho_in * rho_out).sqrt()
        };
        Ok(Self {
            sym: sym.clone(),
            z,
            split,
            radius,
        })
    }

    pub fn split(&self) -> &RootSplit {
        &self.split
    }

    /// Contour radius used by [`Self::quadrature`] at `k = 0`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Contour radius for index `k`: biased toward the inner root circle for
    /// `k > 0` and the outer one for `k < 0`, which keeps `|zeta^k|` small on
    /// the contour.
    pub fn contour_radius(&self, k: i64) -> f64 {
        let (rho_in, rho_out) = (self.split.rho_in(), self.split.rho_out());
        if k == 0 || rho_in == 0.0 || rho_out.is_infinite() {
            return self.radius;
        }
        let s = if k > 0 { 0.25 } else { 0.75 };
        rho_in.powf(1.0 - s) * rho_out.powf(s)
    }

    /// Residues at simple roots for `|k| >= 1`, contour quadrature otherwise.
    pub fn eval(&self, k: i64) -> Result<C64> {
        if k != 0 && self.split.all_simple() {
            Ok(self.residue(k).expect("simple roots"))
        } else {
            self.quadrature(k)
        }
    }

    /// `d/dzeta p(1/zeta)`.
    fn dp_inv(&self, zeta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, a) in self.sym.terms() {
            acc -= a * j as f64 * zeta.powi(-j - 1);
        }
        acc
    }

    /// Residue form; `None` unless all roots are simple and `k != 0`.
    pub fn residue(&self, k: i64) -> Option<C64> {
        if k == 0 || !self.split.all_simple() {
            return None;
        }
        let term = |zeta: C64| zeta.powi((k - 1) as i32) / self.dp_inv(zeta);
        Some(if k >= 1 {
            self.split.inside.iter().map(|r| term(r.0)).sum()
        } else {
            -self.split.outside.iter().map(|r| term(r.0)).sum::<C64>()
        })
    }

    /// Trapezoid rule on `|zeta| = contour_radius(k)`, doubling nodes until successive
    /// values agree to `QUADRATURE_TOL`.
    pub fn quadrature(&self, k: i64) -> Result<C64> {
        let radius = self.contour_radius(k);
        let f = |theta: f64| {
            let zeta = C64::from_polar(radius, theta);
            zeta.powi(k as i32) / (self.sym.eval(zeta.inv()) - self.z)
        };
        let mut n = QUADRATURE_START;
        let mut sum: C64 = (0..n).map(|m| f(TAU * m as f64 / n as f64)).sum();
        let mut value = sum / n as f64;
        loop {
            // Reuse the old nodes; only the odd ones are new.
            let odd: C64 = (0..n)
                .map(|m| f(TAU * (2 * m + 1) as f64 / (2 * n) as f64))
                .sum();
            sum += odd;
            n *= 2;
            let next = sum / n as f64;
            let change = (next - value).norm();
            value = next;
            if change <= QUADRATURE_TOL {
                return Ok(value);
            }
            if n >= QUADRATURE_MAX {
                return Err(Error::QuadratureStall { nodes: n, change });
            }
        }
    }
}

pub fn kernel_k_infinity(sym: &LaurentSymbol, z: C64, k: i64) -> Result<C64> {
    InfiniteKernel::new(sym, z)?.eval(k)
}

/// Resolvent kernel of the circulant: `(P_S - z)^{-1}[nu, mu] = K(nu - mu)`,
/// `K(nu) = (1/N~) sum_k omega_k^nu / (lambda_k - z)`.
#[derive(Debug, Clone)]
pub struct CirculantKernel {
    n_tilde: usize,
    /// `K(0..N~)`.
    values: Vec<C64>,
}

impl CirculantKernel {
    pub fn new(sym: &LaurentSymbol, n_tilde: usize, z: C64) -> Result<Self> {
        let lambda = circulant_spectrum(sym, n_tilde);
        let distance = lambda
            .iter()
            .map(|l| (l - z).norm())
            .fold(f64::INFINITY, f64::min);
        if distance == 0.0 || !distance.is_finite() {
            return Err(Error::OnSpectrum { distance });
        }
        let inv: Vec<C64> = lambda.iter().map(|l| (l - z).inv()).collect();
        let roots: Vec<C64> = (0..n_tilde)
            .map(|m| C64::from_polar(1.0, TAU * m as f64 / n_tilde as f64))
            .collect();
        let values = (0..n_tilde)
            .map(|nu| {
                let s: C64 = inv
                    .iter()
                    .enumerate()
                    .map(|(k, w)| roots[(k * nu) % n_tilde] * w)
                    .sum();
                s / n_tilde as f64
            })
            .collect();
        Ok(Self { n_tilde, values })
    }

    pub fn n_tilde(&self) -> usize {
        self.n_tilde
    }

    /// `K(nu)` for any integer `nu` (periodic).
    pub fn get(&self, nu: i64) -> C64 {
        self.values[nu.rem_euclid(self.n_tilde as i64) as usize]
    }

    /// Dense `(P_S - z)^{-1}`.
    pub fn inverse_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n_tilde, self.n_tilde, |i, j| {
            self.get(i as i64 - j as i64)
        })
    }
}

/// `K_N~(z; nu)` by the discrete Fourier sum. In debug builds the value is
/// cross-checked against the periodization of `K_infinity` when `z` is at
/// least `1e-3` from the circulant spectrum and off the curve.
pub fn kernel_k_n(spec: &OperatorSpec, z: C64, nu: i64) -> Result<C64> {
    let kernel = CirculantKernel::new(&spec.symbol, spec.n_tilde(), z)?;
    let value = kernel.get(nu);
    if cfg!(debug_assertions) {
        let alpha = circulant_spectrum(&spec.symbol, spec.n_tilde())
            .iter()
            .map(|l| (l - z).norm())
            .fold(f64::INFINITY, f64::min);
        if alpha >= 1e-3 {
            if let Ok(periodized) = kernel_k_n_periodized(spec, z, nu) {
                let diff = (periodized - value).norm();
                if diff > 1e-8 {
                    return Err(Error::InvariantViolation(format!(
                        "K_N Fourier sum and periodization differ by {diff:e} at nu = {nu}"
                    )));
                }
            }
        }
    }
    Ok(value)
}

pub const PERIODIZATION_TOL: f64 = 1e-14;
const PERIODIZATION_MAX_TERMS: i64 = 100_000;

/// `sum_m K_infinity(nu + m N~)`, truncated once both tails are past the
/// origin and below `PERIODIZATION_TOL`.
pub fn kernel_k_n_periodized(spec: &OperatorSpec, z: C64, nu: i64) -> Result<C64> {
    let kinf = InfiniteKernel::new(&spec.symbol, z)?;
    periodize(&kinf, spec.n_tilde(), nu)
}

pub fn periodize(kinf: &InfiniteKernel, n_tilde: usize, nu: i64) -> Result<C64> {
    let n = n_tilde as i64;
    let mut sum = kinf.eval(nu)?;
    for m in 1..PERIODIZATION_MAX_TERMS {
        let right = kinf.eval(nu + m * n)?;
        let left = kinf.eval(nu - m * n)?;
        sum += right + left;
        // Both indices must be past the origin, where the tails decay.
        if m * n > nu.abs() && right.norm() < PERIODIZATION_TOL && left.norm() < PERIODIZATION_TOL {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "kernel periodization",
        iterations: PERIODIZATION_MAX_TERMS as usize,
    })
}

/// `(#{lambda_k in region}, (N / 2 pi) * preimage measure)`.
pub fn circulant_weyl_count(spec: &OperatorSpec, region: &Region) -> Result<(usize, f64)> {
    let lambda = circulant_spectrum(&spec.symbol, spec.n_tilde());
    let count = count_in_region(&lambda, region);
    let predicted = spec.n as f64 / TAU * preimage_measure(&spec.symbol, region)?;
    Ok((count, predicted))
}

/// Circulant eigenvalues on one curve segment through the neighbourhood.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentSpacing {
    /// Closest curve parameter to `z0` on the segment.
    pub theta_star: f64,
    pub eigenvalues: usize,
    pub min_gap: f64,
    /// `min_gap * N~`.
    pub scaled_gap: f64,
}

pub const DERIV_TOL: f64 = 1e-6;

/// Minimal eigenvalue gaps of the circulant, per curve segment meeting the
/// disk `D(z0, radius)`.
pub fn eigenvalue_spacing_check(
    spec: &OperatorSpec,
    z0: C64,
    radius: f64,
) -> Result<Vec<SegmentSpacing>> {
    let sym = &spec.symbol;
    let nt = spec.n_tilde();
    let scale = sym.l1_norm();

    // Closest points of each curve branch near z0, with the derivative test.
    let grid = CurveGrid::new(sym, crate::symbol::DIST_GRID);
    let g = grid.samples();
    let n = g.len();
    let d: Vec<f64> = g.iter().map(|v| (v - z0).norm()).collect();
    for i in 0..n {
        if d[i] < radius && d[i] <= d[(i + n - 1) % n] && d[i] <= d[(i + 1) % n] {
            let theta = TAU * i as f64 / n as f64;
            let derivative = sym.curve_derivative(theta).norm();
            if derivative <= DERIV_TOL * scale {
                return Err(Error::DegenerateCriticalPoint { derivative });
            }
        }
    }

    // Eigenvalues lambda_k = f(theta_k), ordered by increasing theta.
    let by_theta: Vec<(f64, C64)> = (0..nt)
        .map(|m| {
            let theta = TAU * m as f64 / nt as f64;
            (theta, sym.eval_curve(theta))
        })
        .collect();
    let near: Vec<bool> = by_theta
        .iter()
        .map(|(_, l)| (l - z0).norm() < radius)
        .collect();
    if near.iter().all(|&b| b) {
        return Err(Error::PreconditionViolated(
            "the neighbourhood contains the whole curve".into(),
        ));
    }
    // Cyclic runs of consecutive in-disk eigenvalues.
    let start = near.iter().position(|&b| !b).unwrap();
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for step in 1..=nt {
        let m = (start + step) % nt;
        if near[m] {
            current.push(m);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    let mut out = Vec::new();
    for run in runs.into_iter().filter(|r| r.len() >= 2) {
        let pts: Vec<C64> = run.iter().map(|&m| by_theta[m].1).collect();
        let mut min_gap = f64::INFINITY;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                min_gap = min_gap.min((pts[a] - pts[b]).norm());
            }
        }
        let closest = run
            .iter()
            .min_by(|&&a, &&b| {
                (by_theta[a].1 - z0)
                    .norm()
                    .total_cmp(&(by_theta[b].1 - z0).norm())
            })
            .unwrap();
        out.push(SegmentSpacing {
            theta_star: by_theta[*closest].0,
            eigenvalues: run.len(),
            min_gap,
            scaled_gap: min_gap * nt as f64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, Lu};
    use crate::symparse::{parse_symbol, Convention};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sym(text: &str) -> LaurentSymbol {
        parse_symbol(text, Convention::Direct).unwrap()
    }

    fn fig1() -> LaurentSymbol {
        parse_symbol("2i*z^-1 + z^2 + 7/10*z^3", Convention::ZetaInverse).unwrap()
    }

    fn fig2() -> LaurentSymbol {
        parse_symbol(
            "2*z^-3 - z^-2 + 2i*z^-1 - 4*z^2 - 2i*z^3",
            Convention::ZetaInverse,
        )
        .unwrap()
    }

    /// Greedy nearest matching; fine for well-separated sets.
    fn same_set(a: &[C64], b: &[C64], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.len() == b.len()
            && a.iter().all(|x| {
                let best = (0..b.len())
                    .filter(|&i| !used[i])
                    .min_by(|&i, &j| (b[i] - x).norm().total_cmp(&(b[j] - x).norm()))
                    .unwrap();
                used[best] = true;
                (b[best] - x).norm() <= tol
            })
    }

    #[test]
    fn spec_requires_room_for_the_band() {
        assert!(OperatorSpec::new(fig1(), 4).is_err());
        let s = OperatorSpec::new(fig1(), 5).unwrap();
        assert_eq!(s.n_tilde(), 9);
    }

    #[test]
    fn toeplitz_examples() {
        let m = toeplitz_matrix(&sym("z^-1"), 3);
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 2)], c(1.0, 0.0));
        assert_eq!(m.as_slice().iter().filter(|x| x.norm() > 0.0).count(), 2);

        let m = build_toeplitz(&OperatorSpec::new(fig1(), 5).unwrap());
        assert_eq!(m[(2, 1)], c(0.0, 2.0));
        assert_eq!(m[(1, 3)], c(1.0, 0.0));
        assert_eq!(m[(1, 4)], c(0.7, 0.0));
        assert!((0..5).all(|i| m[(i, i)] == c(0.0, 0.0)));

        let s = fig2();
        let m = toeplitz_matrix(&s, 12);
        for j in 0..12 {
            let col: f64 = (0..12).map(|i| m[(i, j)].norm()).sum();
            assert!(col <= s.l1_norm() + 1e-12);
        }
    }

    #[test]
    fn circulant_examples() {
        let m = circulant_matrix(&sym("z"), 4).unwrap();
        for nu in 0..4 {
            assert_eq!(m[((nu + 1) % 4, nu)], c(1.0, 0.0));
        }
        let m = circulant_matrix(&fig1(), 12).unwrap();
        assert_eq!(m[(0, 11)], c(0.0, 2.0));
        assert_eq!(m[(0, 2)], c(1.0, 0.0));
        assert_eq!(m[(0, 3)], c(0.7, 0.0));
        assert!(matches!(
            circulant_matrix(&fig1(), 4),
            Err(Error::Overlap { .. })
        ));
        for i in 1..12 {
            for j in 0..12 {
                assert_eq!(m[(i, j)], m[(i - 1, (j + 11) % 12)]);
            }
        }
    }

    #[test]
    fn toeplitz_is_the_trailing_block_of_the_circulant() {
        for s in [fig1(), fig2(), sym("z")] {
            let spec = OperatorSpec::new(s.clone(), 9).unwrap();
            let big = build_circulant(&spec);
            let j = spec.j_len();
            let block = big.submatrix(j..spec.n_tilde(), j..spec.n_tilde());
            assert_eq!(block, build_toeplitz(&spec));
        }
    }

    #[test]
    fn spectrum_examples() {
        let l = circulant_spectrum(&sym("z"), 4);
        assert!(same_set(
            &l,
            &[c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)],
            1e-15
        ));
        for (k, v) in circulant_spectrum(&sym("z + z^-1"), 6).iter().enumerate() {
            assert!((v - c(2.0 * (TAU * k as f64 / 6.0).cos(), 0.0)).norm() < 1e-14);
        }
        for (s, n) in [(fig2(), 32), (fig1(), 64)] {
            let closed = circulant_spectrum(&s, n);
            let eig = eigenvalues(&circulant_matrix(&s, n).unwrap()).unwrap();
            assert!(same_set(&closed, &eig, 1e-10));
        }
    }

    #[test]
    fn k_infinity_examples() {
        let s = sym("z");
        assert!(
            (kernel_k_infinity(&s, c(2.0, 0.0), 3).unwrap() - c(-1.0 / 16.0, 0.0)).norm() < 1e-15
        );
        assert!(kernel_k_infinity(&s, c(2.0, 0.0), -1).unwrap().norm() < 1e-12);
        let k = InfiniteKernel::new(&s, c(2.0, 0.0)).unwrap();
        for n in 0..10 {
            let want = -(0.5f64).powi(n + 1);
            assert!((k.eval(n as i64).unwrap().re - want).abs() < 1e-12);
        }
        // Symmetric tridiagonal: partial fractions give K(k) = zeta_-^{|k|} / (zeta_- - zeta_+).
        let k = InfiniteKernel::new(&sym("z + z^-1"), c(3.0, 0.0)).unwrap();
        let s5 = 5f64.sqrt();
        let (zm, zp) = ((3.0 - s5) / 2.0, (3.0 + s5) / 2.0);
        for n in -5i64..=5 {
            let want = zm.powi(n.unsigned_abs() as i32) / (zm - zp);
            assert!(
                (k.quadrature(n).unwrap().re - want).abs() < 1e-10,
                "k = {n}"
            );
            assert!((k.eval(n).unwrap().re - want).abs() < 1e-10);
        }
        assert!(matches!(
            kernel_k_infinity(&s, c(1.0, 0.0), 0),
            Err(Error::OnCurve { .. })
        ));
    }

    #[test]
    fn k_infinity_inverts_the_convolution() {
        // sum_j a_j K(k - j) - z K(k) = delta_k
        let s = fig2();
        let z = c(0.3, -0.4);
        let k = InfiniteKernel::new(&s, z).unwrap();
        for n in -6i64..=6 {
            let mut acc = -z * k.eval(n).unwrap();
            for (j, a) in s.terms() {
                acc += a * k.eval(n - j as i64).unwrap();
            }
            let want = if n == 0 { 1.0 } else { 0.0 };
            assert!((acc - c(want, 0.0)).norm() < 1e-9, "k = {n}: {acc}");
        }
    }

    #[test]
    fn periodization_reaches_a_one_sided_tail() {
        // K_infinity vanishes for k >= 1 here, so the first terms summed at
        // nu = 28 are exact zeros.
        let s = LaurentSymbol::new([(-1, c(0.0, 0.952)), (0, c(0.0, 0.757))]).unwrap();
        let spec = OperatorSpec::new(s, 24).unwrap();
        let z = c(0.0, -1.318);
        let fourier = kernel_k_n(&spec, z, 28).unwrap();
        let periodized = kernel_k_n_periodized(&spec, z, 28).unwrap();
        assert!(fourier.norm() > 1e-8);
        assert!((fourier - periodized).norm() < 1e-14);
    }

    #[test]
    fn k_n_examples() {
        let s = sym("z");
        let spec = OperatorSpec::new(s.clone(), 7).unwrap();
        let z = c(2.0, 0.0);
        let direct: C64 = (0..8)
            .map(|k| (C64::from_polar(1.0, TAU * k as f64 / 8.0).inv() - z).inv())
            .sum::<C64>()
            / 8.0;
        assert!((kernel_k_n(&spec, z, 0).unwrap() - direct).norm() < 1e-15);
        let kern = CirculantKernel::new(&s, 8, z).unwrap();
        for nu in -20..20 {
            assert_eq!(kern.get(nu), kern.get(nu + 8));
        }
    }

    #[test]
    fn k_n_converges_to_k_infinity() {
        let s = fig1();
        let z = c(0.5, 3.5);
        let kinf = InfiniteKernel::new(&s, z).unwrap();
        let err = |n: usize| {
            let kn = CirculantKernel::new(&s, n, z).unwrap();
            (-3i64..=3)
                .map(|nu| (kn.get(nu) - kinf.eval(nu).unwrap()).norm())
                .fold(0.0, f64::max)
        };
        // Nearest outside root has modulus ~1.18, so the error falls like 1.18^-N~.
        let e: Vec<f64> = [16, 32, 64, 128].iter().map(|&n| err(n)).collect();
        assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
        assert!(e[3] < 1e-8, "{e:?}");
    }

    #[test]
    fn circulant_kernel_is_the_inverse() {
        for (s, z) in [(fig1(), c(1.0, 1.0)), (fig2(), c(-0.5, 2.0))] {
            let spec = OperatorSpec::new(s.clone(), 40).unwrap();
            let kern = CirculantKernel::new(&s, spec.n_tilde(), z).unwrap();
            let lu_inv = Lu::factor(&build_circulant(&spec).shifted(z))
                .unwrap()
                .inverse()
                .unwrap();
            assert!(kern.inverse_matrix().sub(&lu_inv).unwrap().max_abs() < 1e-8);
        }
    }

    #[test]
    fn weyl_count_examples() {
        let spec = OperatorSpec::new(sym("z"), 99).unwrap();
        let (count, predicted) =
            circulant_weyl_count(&spec, &Region::half_plane(0.0, 0.0)).unwrap();
        assert!((count as i64 - 50).abs() <= 1);
        assert!((predicted - 49.5).abs() < 1e-6);
        let spec = OperatorSpec::new(fig1(), 1000).unwrap();
        let (count, _) = circulant_weyl_count(&spec, &Region::Whole).unwrap();
        assert_eq!(count, 1004);
        let disk = Region::disk(c(0.0, 0.0), 1.5).unwrap();
        let (count, predicted) = circulant_weyl_count(&spec, &disk).unwrap();
        let crossings = 8.0;
        assert!(
            (count as f64 - predicted).abs() <= 2.0 + crossings,
            "{count} vs {predicted}"
        );
    }

    #[test]
    fn spacing_examples() {
        let spec = OperatorSpec::new(sym("z"), 127).unwrap();
        let segs = eigenvalue_spacing_check(&spec, c(0.0, 1.0), 0.3).unwrap();
        assert_eq!(segs.len(), 1);
        let want = 2.0 * (std::f64::consts::PI / 128.0).sin();
        assert!((segs[0].min_gap - want).abs() < 1e-12);

        let mut scaled = Vec::new();
        for nt in [128, 256, 512] {
            let spec = OperatorSpec::new(fig1(), nt - 4).unwrap();
            let z0 = fig1().eval_curve(0.9);
            let segs = eigenvalue_spacing_check(&spec, z0, 0.3).unwrap();
            scaled.extend(segs.iter().map(|s| s.scaled_gap));
        }
        let (lo, hi) = scaled
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(lo > 0.5 && hi / lo < 4.0, "{scaled:?}");

        let spec = OperatorSpec::new(sym("z + z^-1"), 64).unwrap();
        assert!(matches!(
            eigenvalue_spacing_check(&spec, c(2.0, 0.0), 0.1),
            Err(Error::DegenerateCriticalPoint { .. })
        ));
    }
}
