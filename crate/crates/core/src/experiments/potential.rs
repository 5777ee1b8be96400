use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grushin::phi;
use crate::linalg::Lu;
use crate::operators::{build_toeplitz, OperatorSpec};
use crate::randmat::{perturb, sample_gaussian_matrix, SeededStream};
use crate::symbol::LaurentSymbol;

pub const POTENTIAL_TOL: f64 = 1e-10;
const MIN_NODES: usize = 64;
const MAX_NODES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PotentialProbe {
    pub re: f64,
    pub im: f64,
    /// `-(1/N) log |det(P_N^delta - z)|`.
    pub u_xi_n: f64,
    /// `-(1/2 pi) int log |z - f(theta)| d theta`.
    pub u_xi: f64,
    /// `(1/N) sum_{N~ circulant eigenvalues} log |lambda - z|`.
    pub phi: f64,
}

/// Logarithmic potential of the pushforward of `d theta / 2 pi` to the curve,
/// by periodic trapezoid sums doubled until two agree to `POTENTIAL_TOL`.
pub fn log_potential_curve(sym: &LaurentSymbol, z: C64) -> Result<f64> {
    let f = |t: f64| (z - sym.eval_curve(t)).norm().ln();
    let mut nodes = MIN_NODES;
    let mut sum: f64 = (0..nodes).map(|k| f(TAU * k as f64 / nodes as f64)).sum();
    let mut prev = -sum / nodes as f64;
    while nodes < MAX_NODES {
        // Midpoints of the current grid.
        let mid: f64 = (0..nodes)
            .map(|k| f(TAU * (k as f64 + 0.5) / nodes as f64))
            .sum();
        sum += mid;
        nodes *= 2;
        let cur = -sum / nodes as f64;
        if !cur.is_finite() {
            return Err(Error::OnCurve {
                distance: 0.0,
                tol: 0.0,
            });
        }
        if (cur - prev).abs() <= POTENTIAL_TOL {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureStall {
        nodes,
        change: f64::NAN,
    })
}

/// Empirical potential of one perturbed spectrum (by LU), the curve potential
/// and `phi` at each probe.
pub fn potential_compare(
    spec: &OperatorSpec,
    delta: f64,
    probes: &[C64],
    stream: &SeededStream,
) -> Result<Vec<PotentialProbe>> {
    let n = spec.n;
    let p = perturb(
        &build_toeplitz(spec),
        delta,
        &sample_gaussian_matrix(n, stream),
    )?;
    probes
        .iter()
        .map(|&z| {
            let log_det = Lu::factor(&p.shifted(z))?.log_abs_det();
            if !log_det.is_finite() {
                return Err(Error::OnSpectrum { distance: 0.0 });
            }
            Ok(PotentialProbe {
                re: z.re,
                im: z.im,
                u_xi_n: -log_det / n as f64,
                u_xi: log_potential_curve(&spec.symbol, z)?,
                phi: phi(spec, z)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symparse::{parse_symbol, Convention};

    #[test]
    fn jensen_formula() {
        let shift = parse_symbol("z", Convention::Direct).unwrap();
        for (z, want) in [
            (C64::new(2.0, 0.0), -(2f64.ln())),
            (C64::new(0.3, 0.2), 0.0),
            (C64::new(0.0, -5.0), -(5f64.ln())),
        ] {
            let u = log_potential_curve(&shift, z).unwrap();
            assert!((u - want).abs() < 1e-10, "{z}: {u} vs {want}");
        }
    }

    #[test]
    fn phi_tracks_minus_potential() {
        let s = parse_symbol(
            "2*z^-3 - z^-2 + 2i*z^-1 - 4*z^2 - 2i*z^3",
            Convention::ZetaInverse,
        )
        .unwrap();
        let spec = OperatorSpec::new(s.clone(), 400).unwrap();
        let z = C64::new(0.5, 0.5);
        let u = log_potential_curve(&s, z).unwrap();
        // phi sums N~ = N + M terms over N.
        let scaled = phi(&spec, z).unwrap() * spec.n as f64 / spec.n_tilde() as f64;
        assert!((scaled + u).abs() < 1e-6);
    }
}
