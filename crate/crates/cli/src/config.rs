use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use toeplab::domains::RegionSpec;
use toeplab::symparse::{parse_complex, parse_symbol, Convention};
use toeplab::{Error, LaurentSymbol, OperatorSpec, Result, C64};

/// Every run setting. Flags override values read from `--config`; the merged
/// result is what `--dump-config` writes.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Symbol expression, e.g. "2i*z^-1 + z^2 + 7/10*z^3"
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,

    /// How to read the expression: zeta_inverse (text is p(1/zeta), as in the
    /// figure captions) or direct (text is p(t)) [default: zeta_inverse]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,

    /// Matrix dimension N
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    /// Dimensions for sweeps, comma separated
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sweep: Option<Vec<usize>>,

    /// Coupling constant(s) delta, comma separated
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,

    /// Region literal, repeatable: whole, disk:cx,cy,r, annulus:cx,cy,r_in,r_out,
    /// halfplane:angle,offset, polygon:x1,y1,x2,y2,..., tube:tau
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<String>>,

    /// Spectral parameter(s) z, repeatable, e.g. 1+1i or -0.5i
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<String>>,

    /// Master seed for all randomness
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Number of Monte Carlo trials
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,

    /// Output directory [default: toeplab-out]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Files to write, comma separated from csv, jsonl, svg [default: all]
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emit: Option<Vec<String>>,

    /// Tube exponent: tau = N^(-1 + epsilon) [default: 0.2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    /// Exponent eps0 of the delta window and the tail threshold N^eps0 [default: 0.8]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,

    /// Constant C in psi = phi + C log N / N [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_psi: Option<f64>,

    /// Annulus width sigma for the Jordan experiment [default: 0.2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,

    /// Pseudospectrum box x_min,x_max,y_min,y_max
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bbox: Option<Vec<f64>>,

    /// Pseudospectrum grid columns [default: 64]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,

    /// Pseudospectrum grid rows [default: 64]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,

    /// Kernel indices k, as lo..hi (inclusive) or a comma list [default: -5..5]
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            self, base, symbol, convention, n, n_sweep, delta, region, z, seed, trials, out, emit,
            epsilon, epsilon0, c_psi, sigma, bbox, nx, ny, k
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn symbol(&self) -> Result<LaurentSymbol> {
        let text = self
            .symbol
            .as_deref()
            .ok_or_else(|| Error::Config("--symbol is required".into()))?;
        parse_symbol(text, self.convention.unwrap_or_default())
    }

    pub fn n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::Config("--n is required".into()))
    }

    pub fn operator(&self) -> Result<OperatorSpec> {
        let sym = self.symbol()?;
        let n = self.n()?;
        let m = sym.n_plus() + sym.n_minus();
        if n < m + 1 {
            return Err(Error::Config(format!(
                "N >= N_+ + N_- + 1 fails: N = {n}, N_+ + N_- = {m}"
            )));
        }
        OperatorSpec::new(sym, n)
    }

    pub fn n_sweep(&self) -> Result<Vec<usize>> {
        match (&self.n_sweep, self.n) {
            (Some(v), _) if !v.is_empty() => Ok(v.clone()),
            (_, Some(n)) => Ok(vec![n]),
            _ => Err(Error::Config("--n or --n-sweep is required".into())),
        }
    }

    pub fn deltas(&self) -> Result<Vec<f64>> {
        let d = self.delta.clone().unwrap_or_default();
        for &x in &d {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Config(format!("delta >= 0 fails: delta = {x}")));
            }
        }
        Ok(d)
    }

    /// The single coupling constant, 0 when none is given.
    pub fn delta(&self) -> Result<f64> {
        let d = self.deltas()?;
        match d.len() {
            0 => Ok(0.0),
            1 => Ok(d[0]),
            _ => Err(Error::Config("this command takes a single --delta".into())),
        }
    }

    pub fn regions(&self) -> Result<Vec<RegionSpec>> {
        self.region.iter().flatten().map(|r| r.parse()).collect()
    }

    pub fn probes(&self) -> Result<Vec<C64>> {
        self.z.iter().flatten().map(|z| parse_complex(z)).collect()
    }

    pub fn seed_required(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::Config("--seed is required: every random run must be reproducible".into())
        })
    }

    pub fn trials(&self) -> Result<u64> {
        match self.trials.unwrap_or(1) {
            0 => Err(Error::Config("trials >= 1 fails: trials = 0".into())),
            t => Ok(t),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("toeplab-out"))
    }

    pub fn emits(&self, kind: &str) -> bool {
        self.emit
            .as_ref()
            .is_none_or(|v| v.iter().any(|e| e.eq_ignore_ascii_case(kind)))
    }

    pub fn validate_emit(&self) -> Result<()> {
        for e in self.emit.iter().flatten() {
            if !matches!(e.to_ascii_lowercase().as_str(), "csv" | "jsonl" | "svg") {
                return Err(Error::Config(format!(
                    "unknown --emit kind {e:?} (expected csv, jsonl, svg)"
                )));
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(0.2)
    }

    pub fn epsilon0(&self) -> Result<f64> {
        let e = self.epsilon0.unwrap_or(0.8);
        if e > 0.0 && e < 1.0 {
            Ok(e)
        } else {
            Err(Error::Config(format!("0 < eps0 < 1 fails: eps0 = {e}")))
        }
    }

    pub fn bbox(&self) -> Result<Option<[f64; 4]>> {
        match &self.bbox {
            None => Ok(None),
            Some(v) if v.len() == 4 && v[0] < v[1] && v[2] < v[3] => Ok(Some([v[0], v[1], v[2], v[3]])),
            Some(v) => Err(Error::Config(format!(
                "--bbox takes x_min,x_max,y_min,y_max with x_min < x_max and y_min < y_max, got {v:?}"
            ))),
        }
    }

    pub fn k_values(&self) -> Result<Vec<i64>> {
        let text = self.k.as_deref().unwrap_or("-5..5");
        let bad = || Error::Config(format!("--k takes lo..hi or a comma list, got {text:?}"));
        if let Some((lo, hi)) = text.split_once("..") {
            let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo..=hi).collect())
        } else {
            text.split(',')
                .map(|s| s.trim().parse().map_err(|_| bad()))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file = RunConfig {
            n: Some(10),
            seed: Some(1),
            ..Default::default()
        };
        let flags = RunConfig {
            n: Some(20),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!((merged.n, merged.seed), (Some(20), Some(1)));
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            symbol: Some("2i*z^-1 + z^2".into()),
            convention: Some(Convention::Direct),
            delta: Some(vec![1e-14, 1e-12]),
            region: Some(vec!["disk:0,0,1.5".into()]),
            z: Some(vec!["1+1i".into()]),
            ..Default::default()
        };
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn k_ranges() {
        let mut c = RunConfig::default();
        assert_eq!(c.k_values().unwrap().len(), 11);
        c.k = Some("-2..1".into());
        assert_eq!(c.k_values().unwrap(), vec![-2, -1, 0, 1]);
        c.k = Some("3,-4".into());
        assert_eq!(c.k_values().unwrap(), vec![3, -4]);
        c.k = Some("4..1".into());
        assert!(c.k_values().is_err());
    }
}
