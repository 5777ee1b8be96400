use num_complex::Complex64 as C64;
use serde::Serialize;

use super::stats::{linear_fit, LinearFit};
use crate::error::Result;
use crate::linalg::smallest_singular_value;
use crate::operators::{eigenvalue_spacing_check, toeplitz_matrix, OperatorSpec};
use crate::quasimode::build_quasimode;
use crate::symbol::LaurentSymbol;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpacingRow {
    pub n: usize,
    pub n_tilde: usize,
    pub min_gap: f64,
    /// `min_gap * N~`.
    pub scaled_gap: f64,
}

/// Smallest circulant eigenvalue gap near `z0`, over all segments, per `N`.
pub fn spacing_experiment(
    sym: &LaurentSymbol,
    ns: &[usize],
    z0: C64,
    radius: f64,
) -> Result<Vec<SpacingRow>> {
    ns.iter()
        .map(|&n| {
            let spec = OperatorSpec::new(sym.clone(), n)?;
            let segs = eigenvalue_spacing_check(&spec, z0, radius)?;
            let min_gap = segs.iter().map(|s| s.min_gap).fold(f64::INFINITY, f64::min);
            Ok(SpacingRow {
                n,
                n_tilde: spec.n_tilde(),
                min_gap,
                scaled_gap: min_gap * spec.n_tilde() as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySweep {
    pub re: f64,
    pub im: f64,
    /// `(N, s_min(P_N - z))`.
    pub rows: Vec<(usize, f64)>,
    /// `max / min` of `s_min` over the sweep.
    pub ratio: f64,
}

pub fn resolvent_stability_experiment(
    sym: &LaurentSymbol,
    z: C64,
    ns: &[usize],
) -> Result<StabilitySweep> {
    let rows = ns
        .iter()
        .map(|&n| {
            Ok((
                n,
                smallest_singular_value(&toeplitz_matrix(sym, n).shifted(z))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(StabilitySweep {
        re: z.re,
        im: z.im,
        rows,
        ratio: max / min,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecaySweep {
    pub re: f64,
    pub im: f64,
    /// `(N, quasimode residual)`.
    pub rows: Vec<(usize, f64)>,
    /// Fit of `ln residual` against `N`.
    pub fit: LinearFit,
}

pub fn quasimode_decay_experiment(sym: &LaurentSymbol, z: C64, ns: &[usize]) -> Result<DecaySweep> {
    let rows = ns
        .iter()
        .map(|&n| {
            Ok((
                n,
                build_quasimode(&OperatorSpec::new(sym.clone(), n)?, z)?.residual,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, r)| (n as f64, r.ln())).collect();
    Ok(DecaySweep {
        re: z.re,
        im: z.im,
        fit: linear_fit(&pts),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symparse::{parse_symbol, Convention};

    fn fig1() -> LaurentSymbol {
        parse_symbol("2i*z^-1 + z^2 + 7/10*z^3", Convention::ZetaInverse).unwrap()
    }

    #[test]
    fn spacing_scales_like_one_over_n() {
        let rows =
            spacing_experiment(&fig1(), &[64, 128, 256, 512], fig1().eval_curve(1.0), 0.3).unwrap();
        let lo = rows
            .iter()
            .map(|r| r.scaled_gap)
            .fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r.scaled_gap).fold(0.0, f64::max);
        assert!(lo > 0.0 && hi / lo < 1.5, "{rows:?}");
    }

    #[test]
    fn sweeps_report_fits() {
        let z = C64::new(0.0, 0.0);
        let d = quasimode_decay_experiment(&fig1(), z, &[50, 100, 150]).unwrap();
        assert!(d.fit.slope < 0.0 && d.fit.r_squared > 0.99);
        let far = C64::new(8.0, 0.0);
        let s = resolvent_stability_experiment(&fig1(), far, &[64, 128]).unwrap();
        assert!(s.ratio < 2.0);
    }
}
