use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use super::LaurentSymbol;
use crate::domains::Region;
use crate::error::{Error, Result};

pub const DIST_GRID: usize = 8192;
pub const PREIMAGE_GRID: usize = 16384;

const THETA_TOL: f64 = 1e-10;
/// Local minima refined per query.
const CANDIDATES: usize = 4;

/// The curve sampled on an equispaced `theta` grid; reused across many
/// distance queries.
#[derive(Debug, Clone)]
pub struct CurveGrid {
    symbol: LaurentSymbol,
    values: Vec<C64>,
}

impl CurveGrid {
    pub fn new(symbol: &LaurentSymbol, samples: usize) -> Self {
        let samples = samples.max(8);
        let values = (0..samples)
            .map(|k| symbol.eval_curve(TAU * k as f64 / samples as f64))
            .collect();
        Self {
            symbol: symbol.clone(),
            values,
        }
    }

    pub fn symbol(&self) -> &LaurentSymbol {
        &self.symbol
    }

    pub fn samples(&self) -> &[C64] {
        &self.values
    }

    /// `(min_theta |z - f(theta)|, argmin in [0, 2 pi))`.
    pub fn dist(&self, z: C64) -> (f64, f64) {
        let n = self.values.len();
        let h = TAU / n as f64;
        let d2: Vec<f64> = self.values.iter().map(|v| (v - z).norm_sqr()).collect();
        let mut minima: Vec<usize> = (0..n)
            .filter(|&i| d2[i] <= d2[(i + n - 1) % n] && d2[i] <= d2[(i + 1) % n])
            .collect();
        minima.sort_by(|&a, &b| d2[a].total_cmp(&d2[b]));
        minima.truncate(CANDIDATES);
        let mut best = (f64::INFINITY, 0.0);
        for i in minima {
            let t0 = i as f64 * h;
            let (d, t) = golden_min(|t| (self.symbol.eval_curve(t) - z).norm(), t0 - h, t0 + h);
            if d < best.0 {
                best = (d, t.rem_euclid(TAU));
            }
        }
        best
    }
}

/// Golden-section search on `[a, b]` down to `THETA_TOL`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > THETA_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (f(t), t)
}

/// Distance from `z` to the curve and an argmin `theta_star`.
pub fn dist_to_curve(sym: &LaurentSymbol, z: C64) -> (f64, f64) {
    CurveGrid::new(sym, DIST_GRID).dist(z)
}

/// Arc measure of `{theta : f(theta) in region}`.
pub fn preimage_measure(sym: &LaurentSymbol, region: &Region) -> Result<f64> {
    preimage_measure_with(sym, region, PREIMAGE_GRID)
}

/// As [`preimage_measure`] on a grid of `samples` points, with one doubling
/// pass to detect tangencies.
pub fn preimage_measure_with(sym: &LaurentSymbol, region: &Region, samples: usize) -> Result<f64> {
    let fine = 2 * samples.max(8);
    let inside = |t: f64| region.contains(sym.eval_curve(t));
    let member: Vec<bool> = (0..fine)
        .map(|k| inside(TAU * k as f64 / fine as f64))
        .collect();
    let coarse: Vec<bool> = member.iter().step_by(2).copied().collect();
    let crossings = |m: &[bool]| {
        (0..m.len())
            .filter(|&i| m[i] != m[(i + 1) % m.len()])
            .count()
    };
    let (nc, nf) = (crossings(&coarse), crossings(&member));
    if nc != nf {
        return Err(Error::SuspectBoundary {
            coarse: nc,
            fine: nf,
        });
    }
    if nf == 0 {
        return Ok(if member[0] { TAU } else { 0.0 });
    }
    let h = TAU / fine as f64;
    let mut measure = 0.0;
    for i in 0..fine {
        let (a, b) = (member[i], member[(i + 1) % fine]);
        let t0 = i as f64 * h;
        if a == b {
            if a {
                measure += h;
            }
            continue;
        }
        // Bisect the crossing, keeping `inside(lo) == a`.
        let (mut lo, mut hi) = (t0, t0 + h);
        while hi - lo > THETA_TOL {
            let mid = 0.5 * (lo + hi);
            if inside(mid) == a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tc = 0.5 * (lo + hi);
        measure += if a { tc - t0 } else { t0 + h - tc };
    }
    Ok(measure.clamp(0.0, TAU))
}
