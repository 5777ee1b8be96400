use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{smallest_singular_value_lu, Lu};
use crate::operators::{build_toeplitz, OperatorSpec};
use crate::randmat::{perturb, sample_gaussian_matrix, SeededStream};

pub const MAX_GRID_SIDE: usize = 512;
const SMIN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bbox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bbox {
    /// Node `(ix, iy)` of an `nx x ny` grid including the edges.
    pub fn node(&self, ix: usize, iy: usize, nx: usize, ny: usize) -> C64 {
        let t = |i: usize, n: usize| {
            if n > 1 {
                i as f64 / (n - 1) as f64
            } else {
                0.5
            }
        };
        C64::new(
            self.x_min + (self.x_max - self.x_min) * t(ix, nx),
            self.y_min + (self.y_max - self.y_min) * t(iy, ny),
        )
    }
}

/// `log10 s_min(P - z)` on a grid; row `iy` holds the nodes with the `iy`-th
/// imaginary part. Failed nodes are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct PseudoGrid {
    pub bbox: Bbox,
    pub nx: usize,
    pub ny: usize,
    pub n: usize,
    pub delta: Option<f64>,
    pub master_seed: Option<u64>,
    pub log10_smin: Vec<Option<f64>>,
}

impl PseudoGrid {
    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.log10_smin[iy * self.nx + ix]
    }
}

/// Smallest singular values of `P_N - z` (or of `P_N + delta Q - z`) over the
/// grid, by Lanczos iteration on an LU factorization at each node.
pub fn pseudospectrum_grid(
    spec: &OperatorSpec,
    bbox: Bbox,
    nx: usize,
    ny: usize,
    perturbation: Option<(f64, SeededStream)>,
) -> Result<PseudoGrid> {
    if nx == 0 || ny == 0 || nx > MAX_GRID_SIDE || ny > MAX_GRID_SIDE {
        return Err(Error::TooLarge {
            n: nx.max(ny),
            max: MAX_GRID_SIDE,
        });
    }
    let p = match perturbation {
        Some((delta, stream)) => perturb(
            &build_toeplitz(spec),
            delta,
            &sample_gaussian_matrix(spec.n, &stream),
        )?,
        None => build_toeplitz(spec),
    };
    let log10_smin = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let z = bbox.node(k % nx, k / nx, nx, ny);
            let lu = Lu::factor(&p.shifted(z)).ok()?;
            let s = smallest_singular_value_lu(&lu, SMIN_TOL).ok()?;
            Some(s.log10())
        })
        .collect();
    Ok(PseudoGrid {
        bbox,
        nx,
        ny,
        n: spec.n,
        delta: perturbation.map(|p| p.0),
        master_seed: perturbation.map(|p| p.1.master_seed),
        log10_smin,
    })
}
