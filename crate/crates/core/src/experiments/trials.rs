use std::f64::consts::TAU;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::quantile;
use crate::domains::{annulus_bounds_jordan, count_in_region, Region, RegionSpec};
use crate::error::{Error, Result};
use crate::grushin::{grushin_blocks, perturbed_effective_series, GrushinBlocks};
use crate::linalg::{eigenvalues, Lu};
use crate::operators::{build_toeplitz, toeplitz_matrix, OperatorSpec};
use crate::randmat::{perturb, sample_gaussian_matrix, SeededStream};
use crate::symbol::{preimage_measure, CurveGrid, LaurentSymbol, DIST_GRID};
use crate::symparse::{format_symbol, Convention};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceQuantiles {
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

impl DistanceQuantiles {
    pub fn from_distances(mut d: Vec<f64>) -> Self {
        d.sort_by(f64::total_cmp);
        Self {
            q50: quantile(&d, 0.5),
            q90: quantile(&d, 0.9),
            q99: quantile(&d, 0.99),
        }
    }
}

/// A probe point and a value computed there; `None` when the computation
/// failed at that point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeValue {
    pub re: f64,
    pub im: f64,
    pub value: Option<f64>,
}

/// One Monte Carlo trial. `runtime_ms` is kept in memory but never
/// serialized, so record files are reproducible byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub master_seed: u64,
    pub trial_index: u64,
    /// The symbol in canonical `zeta_inverse` notation.
    pub symbol: String,
    pub n: usize,
    pub delta: f64,
    pub region: String,
    pub observed_count: usize,
    pub predicted_count: f64,
    /// Eigenvalues outside the region.
    pub outside_count: usize,
    pub hs_norm: f64,
    /// `log |det E_{-+}^delta(z)|` at the probe points.
    pub log_det_eminusplus: Vec<ProbeValue>,
    pub distance_quantiles: DistanceQuantiles,
    #[serde(skip)]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub eigenvalues: Vec<C64>,
}

/// `(C e^{-N^eps0 / (2M)}, N^{-4} / C)` with `C = 1`: the coupling window of
/// the probabilistic Weyl law.
pub fn delta_window(n: usize, m: usize, epsilon0: f64) -> (f64, f64) {
    let n = n as f64;
    ((-n.powf(epsilon0) / (2.0 * m as f64)).exp(), n.powi(-4))
}

/// A warning naming the violated side of the window, if any.
pub fn check_delta_window(n: usize, m: usize, delta: f64, epsilon0: f64) -> Option<String> {
    let (lo, hi) = delta_window(n, m, epsilon0);
    if delta < lo {
        Some(format!(
            "delta = {delta:e} is below exp(-N^eps0/(2M)) = {lo:e} (N = {n}, M = {m}, eps0 = {epsilon0})"
        ))
    } else if delta > hi {
        Some(format!(
            "delta = {delta:e} is above N^-4 = {hi:e} (N = {n})"
        ))
    } else {
        None
    }
}

/// `tau = N^{-1 + epsilon}`.
pub fn tube_radius(n: usize, epsilon: f64) -> f64 {
    (n as f64).powf(epsilon - 1.0)
}

/// Everything a trial needs that does not depend on the random draw.
#[derive(Debug, Clone)]
pub struct WeylSetup {
    pub spec: OperatorSpec,
    pub delta: f64,
    pub region_spec: RegionSpec,
    pub region: Region,
    pub predicted_count: f64,
    pub curve: Arc<CurveGrid>,
    pub probes: Vec<C64>,
    blocks: Vec<Option<GrushinBlocks>>,
    symbol_id: String,
}

impl WeylSetup {
    pub fn new(
        spec: &OperatorSpec,
        delta: f64,
        region_spec: &RegionSpec,
        probes: &[C64],
    ) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!(
                "delta must be finite and >= 0, got {delta}"
            )));
        }
        let region = region_spec.build(Some(&spec.symbol))?;
        let predicted_count = spec.n as f64 / TAU * preimage_measure(&spec.symbol, &region)?;
        let blocks = probes
            .iter()
            .map(|&z| grushin_blocks(spec, z).ok())
            .collect();
        Ok(Self {
            spec: spec.clone(),
            delta,
            region_spec: region_spec.clone(),
            region,
            predicted_count,
            curve: Arc::new(CurveGrid::new(&spec.symbol, DIST_GRID)),
            probes: probes.to_vec(),
            blocks,
            symbol_id: format_symbol(&spec.symbol, Convention::ZetaInverse),
        })
    }

    /// One draw of `Q`, a full eigensolve of `P_N + delta Q` and the record.
    pub fn trial(&self, stream: &SeededStream) -> Result<TrialOutcome> {
        let start = Instant::now();
        let n = self.spec.n;
        let q = sample_gaussian_matrix(n, stream);
        let p = perturb(&build_toeplitz(&self.spec), self.delta, &q)?;
        let eigs = eigenvalues(&p)?;
        let observed = count_in_region(&eigs, &self.region);
        let distances = eigs.iter().map(|&z| self.curve.dist(z).0).collect();
        let log_det_eminusplus = self
            .probes
            .iter()
            .zip(&self.blocks)
            .map(|(&z, b)| ProbeValue {
                re: z.re,
                im: z.im,
                value: b.as_ref().and_then(|b| {
                    let e = perturbed_effective_series(b, &q, self.delta).ok()?;
                    let v = Lu::factor(&e).ok()?.log_abs_det();
                    v.is_finite().then_some(v)
                }),
            })
            .collect();
        let record = TrialRecord {
            schema_version: SCHEMA_VERSION,
            master_seed: stream.master_seed,
            trial_index: stream.trial_index,
            symbol: self.symbol_id.clone(),
            n,
            delta: self.delta,
            region: self.region_spec.to_string(),
            observed_count: observed,
            predicted_count: self.predicted_count,
            outside_count: n - observed,
            hs_norm: q.hs_norm(),
            log_det_eminusplus,
            distance_quantiles: DistanceQuantiles::from_distances(distances),
            runtime_ms: Some(start.elapsed().as_secs_f64() * 1e3),
        };
        Ok(TrialOutcome {
            record,
            eigenvalues: eigs,
        })
    }
}

impl WeylSetup {
    /// The record of `outcome` re-counted against this setup's region.
    pub fn recount(&self, outcome: &TrialOutcome) -> TrialRecord {
        let observed = count_in_region(&outcome.eigenvalues, &self.region);
        TrialRecord {
            region: self.region_spec.to_string(),
            observed_count: observed,
            predicted_count: self.predicted_count,
            outside_count: outcome.eigenvalues.len() - observed,
            ..outcome.record.clone()
        }
    }
}

/// One Weyl-law sample: `#(Spec(P_N^delta) in region)` against
/// `(N / 2 pi) |p^{-1}(region)|`.
pub fn weyl_trial(
    spec: &OperatorSpec,
    delta: f64,
    region: &RegionSpec,
    stream: &SeededStream,
) -> Result<TrialRecord> {
    Ok(WeylSetup::new(spec, delta, region, &[])?
        .trial(stream)?
        .record)
}

/// A Weyl trial whose region is the tube of radius `N^{-1 + epsilon}` about
/// the curve; `outside_count` is the out-of-tube count.
pub fn thin_tube_trial(
    spec: &OperatorSpec,
    delta: f64,
    epsilon: f64,
    stream: &SeededStream,
) -> Result<TrialRecord> {
    let region = RegionSpec::Tube {
        tau: tube_radius(spec.n, epsilon),
    };
    weyl_trial(spec, delta, &region, stream)
}

/// Trials `0..trials` of `setup` on streams `(master_seed, k)`, in parallel,
/// returned in trial order.
pub fn run_campaign(setup: &WeylSetup, master_seed: u64, trials: u64) -> Result<Vec<TrialOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|k| setup.trial(&SeededStream::new(master_seed, k)))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JordanAnnulus {
    pub r_lo: f64,
    pub r_hi: f64,
    pub outside: usize,
}

/// Eigenvalues of the perturbed `N x N` Jordan block `{a_{-1} = 1}` outside
/// the annulus `[(delta N)^{1/N} e^{-sigma}, (delta N)^{1/N}]`.
pub fn jordan_annulus_trial(
    n: usize,
    delta: f64,
    sigma: f64,
    stream: &SeededStream,
) -> Result<JordanAnnulus> {
    let (r_lo, r_hi) = annulus_bounds_jordan(n, delta, sigma)?;
    let jordan = LaurentSymbol::new([(-1, C64::new(1.0, 0.0))])?;
    let p = perturb(
        &toeplitz_matrix(&jordan, n),
        delta,
        &sample_gaussian_matrix(n, stream),
    )?;
    let outside = eigenvalues(&p)?
        .iter()
        .filter(|z| {
            let r = z.norm();
            r < r_lo || r > r_hi
        })
        .count();
    Ok(JordanAnnulus {
        r_lo,
        r_hi,
        outside,
    })
}
