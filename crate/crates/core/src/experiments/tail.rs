use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grushin::{alpha, grushin_blocks, perturbed_effective_series};
use crate::linalg::Lu;
use crate::operators::OperatorSpec;
use crate::randmat::{sample_gaussian_matrix, SeededStream};

/// `||Q||_HS <= C1 N` is taken to hold with this `C1`.
pub const TAIL_C1: f64 = 2.0;
/// Probes need `alpha(z) >= 1 / (C N)` with this `C`.
pub const TAIL_C_ALPHA: f64 = 1.0;
const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailProbe {
    pub re: f64,
    pub im: f64,
    pub alpha: f64,
    /// `log |det E_{-+}^delta|^2`, one per trial.
    pub log_det_sq: Vec<f64>,
    /// Share of trials with `log |det E_{-+}^delta|^2 >= -threshold`.
    pub frequency: f64,
    /// Whether `delta <= alpha / (C1 N)^3` holds.
    pub cubic_condition: bool,
    pub histogram: Vec<HistogramBin>,
}

impl TailProbe {
    pub fn frequency_at(&self, t: f64) -> f64 {
        let hits = self.log_det_sq.iter().filter(|&&v| v >= -t).count();
        hits as f64 / self.log_det_sq.len() as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TailTable {
    pub n: usize,
    pub delta: f64,
    pub epsilon0: f64,
    pub master_seed: u64,
    pub trials: u64,
    /// `t = N^eps0`.
    pub threshold: f64,
    pub probes: Vec<TailProbe>,
}

fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Vec::new();
    }
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lo: lo + b as f64 * width,
            hi: lo + (b + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        out[b].count += 1;
    }
    out
}

/// Empirical lower tail of `log |det E_{-+}^delta(z)|^2` over `trials` draws of `Q`.
pub fn effective_tail_experiment(
    spec: &OperatorSpec,
    delta: f64,
    probes: &[C64],
    trials: u64,
    epsilon0: f64,
    master_seed: u64,
) -> Result<TailTable> {
    let n = spec.n;
    let nf = n as f64;
    if trials == 0 {
        return Err(Error::PreconditionViolated(
            "need at least one trial".into(),
        ));
    }
    let mut setup = Vec::with_capacity(probes.len());
    for &z in probes {
        let a = alpha(spec, z);
        if a < 1.0 / (TAIL_C_ALPHA * nf) {
            return Err(Error::PreconditionViolated(format!(
                "alpha(z) >= 1/(C N) fails at z = {z}: alpha = {a:e}, 1/(C N) = {:e}",
                1.0 / (TAIL_C_ALPHA * nf)
            )));
        }
        if delta * TAIL_C1 * nf / a >= 0.5 {
            return Err(Error::PreconditionViolated(format!(
                "delta C1 N / alpha < 1/2 fails at z = {z}: {:e}",
                delta * TAIL_C1 * nf / a
            )));
        }
        setup.push((z, a, grushin_blocks(spec, z)?));
    }
    let draws: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let q = sample_gaussian_matrix(n, &SeededStream::new(master_seed, k));
            setup
                .iter()
                .map(|(_, _, b)| {
                    let e = perturbed_effective_series(b, &q, delta)?;
                    Ok(2.0 * Lu::factor(&e)?.log_abs_det())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let threshold = nf.powf(epsilon0);
    let probes = setup
        .iter()
        .enumerate()
        .map(|(i, &(z, a, _))| {
            let log_det_sq: Vec<f64> = draws.iter().map(|d| d[i]).collect();
            let mut p = TailProbe {
                re: z.re,
                im: z.im,
                alpha: a,
                histogram: histogram(&log_det_sq, HISTOGRAM_BINS),
                log_det_sq,
                frequency: 0.0,
                cubic_condition: delta <= a / (TAIL_C1 * nf).powi(3),
            };
            p.frequency = p.frequency_at(threshold);
            p
        })
        .collect();
    Ok(TailTable {
        n,
        delta,
        epsilon0,
        master_seed,
        trials,
        threshold,
        probes,
    })
}
