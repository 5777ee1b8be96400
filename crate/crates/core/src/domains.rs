//! Planar regions for eigenvalue counting.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{CurveGrid, LaurentSymbol, DIST_GRID};

/// A closed region of the complex plane (boundary points count as inside,
/// except for curve tubes, which are open).
#[derive(Debug, Clone)]
pub enum Region {
    Whole,
    Disk {
        center: C64,
        radius: f64,
    },
    Annulus {
        center: C64,
        r_in: f64,
        r_out: f64,
    },
    /// `{z : Re(z e^{-i angle}) >= offset}`.
    HalfPlane {
        angle: f64,
        offset: f64,
    },
    Polygon {
        vertices: Vec<C64>,
    },
    /// `{z : dist(z, p(S^1)) < tau}`.
    CurveTube {
        tau: f64,
        grid: Arc<CurveGrid>,
    },
}

impl Region {
    pub fn disk(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !finite(center) {
            return Err(Error::InvariantViolation(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Ok(Region::Disk { center, radius })
    }

    pub fn annulus(center: C64, r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) || !finite(center) {
            return Err(Error::InvariantViolation(format!(
                "annulus needs 0 < r_in < r_out, got {r_in}, {r_out}"
            )));
        }
        Ok(Region::Annulus {
            center,
            r_in,
            r_out,
        })
    }

    pub fn half_plane(angle: f64, offset: f64) -> Self {
        Region::HalfPlane { angle, offset }
    }

    pub fn polygon(vertices: Vec<C64>) -> Result<Self> {
        if vertices.len() < 3 || vertices.iter().any(|v| !finite(*v)) {
            return Err(Error::InvariantViolation(
                "polygon needs at least 3 finite vertices".into(),
            ));
        }
        if let Some((i, j)) = self_intersection(&vertices) {
            return Err(Error::InvariantViolation(format!(
                "polygon edges {i} and {j} intersect"
            )));
        }
        Ok(Region::Polygon { vertices })
    }

    pub fn curve_tube(symbol: &LaurentSymbol, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvariantViolation(format!(
                "tube radius must be positive, got {tau}"
            )));
        }
        Ok(Region::CurveTube {
            tau,
            grid: Arc::new(CurveGrid::new(symbol, DIST_GRID)),
        })
    }

    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Whole => true,
            Region::Disk { center, radius } => (z - center).norm() <= *radius,
            Region::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let r = (z - center).norm();
                *r_in <= r && r <= *r_out
            }
            Region::HalfPlane { angle, offset } => (z * C64::from_polar(1.0, -angle)).re >= *offset,
            Region::Polygon { vertices } => polygon_contains(vertices, z),
            Region::CurveTube { tau, grid } => grid.dist(z).0 < *tau,
        }
    }

    /// Numeric description, for records and literals.
    pub fn spec(&self) -> RegionSpec {
        match self {
            Region::Whole => RegionSpec::Whole,
            Region::Disk { center, radius } => RegionSpec::Disk {
                cx: center.re,
                cy: center.im,
                r: *radius,
            },
            Region::Annulus {
                center,
                r_in,
                r_out,
            } => RegionSpec::Annulus {
                cx: center.re,
                cy: center.im,
                r_in: *r_in,
                r_out: *r_out,
            },
            Region::HalfPlane { angle, offset } => RegionSpec::HalfPlane {
                angle: *angle,
                offset: *offset,
            },
            Region::Polygon { vertices } => RegionSpec::Polygon {
                vertices: vertices.iter().map(|v| [v.re, v.im]).collect(),
            },
            Region::CurveTube { tau, .. } => RegionSpec::Tube { tau: *tau },
        }
    }
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn count_in_region(points: &[C64], region: &Region) -> usize {
    points.iter().filter(|&&z| region.contains(z)).count()
}

/// `((delta N)^{1/N} e^{-sigma}, (delta N)^{1/N})`, the annulus holding most
/// eigenvalues of a randomly perturbed `N x N` Jordan block.
pub fn annulus_bounds_jordan(n: usize, delta: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0) || !(sigma > 0.0) || n == 0 {
        return Err(Error::PreconditionViolated(format!(
            "need N >= 1, delta > 0, sigma > 0 (got N = {n}, delta = {delta}, sigma = {sigma})"
        )));
    }
    let r_hi = ((delta * n as f64).ln() / n as f64).exp();
    Ok((r_hi * (-sigma).exp(), r_hi))
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn on_segment(p: C64, a: C64, b: C64, tol: f64) -> bool {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm() <= tol;
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm() <= tol
}

fn segments_intersect(a: C64, b: C64, c: C64, d: C64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, a, b, 0.0))
        || (d2 == 0.0 && on_segment(d, a, b, 0.0))
        || (d3 == 0.0 && on_segment(a, c, d, 0.0))
        || (d4 == 0.0 && on_segment(b, c, d, 0.0))
}

fn self_intersection(v: &[C64]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only share their common vertex.
                let (a, b, c) = if j == i + 1 {
                    (v[i], v[j], v[(j + 1) % n])
                } else {
                    (v[1], v[0], v[n - 1])
                };
                if cross(b - a, c - b) == 0.0
                    && ((c - b).re * (a - b).re + (c - b).im * (a - b).im) > 0.0
                {
                    return Some((i, j));
                }
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn polygon_contains(v: &[C64], z: C64) -> bool {
    let scale = v.iter().map(|p| p.norm()).fold(z.norm(), f64::max).max(1.0);
    let n = v.len();
    if (0..n).any(|i| on_segment(z, v[i], v[(i + 1) % n], 1e-12 * scale)) {
        return true;
    }
    // Even-odd ray cast to +x; the half-open rule on y settles rays through vertices.
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if x > z.re {
                inside = !inside;
            }
        }
    }
    inside
}

/// Numeric region record: the config/JSON form and the `kind:args` literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec {
    Whole,
    Disk {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Annulus {
        cx: f64,
        cy: f64,
        r_in: f64,
        r_out: f64,
    },
    HalfPlane {
        angle: f64,
        offset: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    /// Tube around the curve of the run's symbol.
    Tube {
        tau: f64,
    },
}

impl RegionSpec {
    /// Tubes need the symbol whose curve they surround.
    pub fn build(&self, symbol: Option<&LaurentSymbol>) -> Result<Region> {
        match self {
            RegionSpec::Whole => Ok(Region::Whole),
            RegionSpec::Disk { cx, cy, r } => Region::disk(C64::new(*cx, *cy), *r),
            RegionSpec::Annulus {
                cx,
                cy,
                r_in,
                r_out,
            } => Region::annulus(C64::new(*cx, *cy), *r_in, *r_out),
            RegionSpec::HalfPlane { angle, offset } => Ok(Region::half_plane(*angle, *offset)),
            RegionSpec::Polygon { vertices } => {
                Region::polygon(vertices.iter().map(|&[x, y]| C64::new(x, y)).collect())
            }
            RegionSpec::Tube { tau } => {
                let sym =
                    symbol.ok_or_else(|| Error::Config("a tube region needs a symbol".into()))?;
                Region::curve_tube(sym, *tau)
            }
        }
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::Whole => write!(f, "whole"),
            RegionSpec::Disk { cx, cy, r } => write!(f, "disk:{cx},{cy},{r}"),
            RegionSpec::Annulus {
                cx,
                cy,
                r_in,
                r_out,
            } => write!(f, "annulus:{cx},{cy},{r_in},{r_out}"),
            RegionSpec::HalfPlane { angle, offset } => write!(f, "halfplane:{angle},{offset}"),
            RegionSpec::Polygon { vertices } => {
                write!(f, "polygon:")?;
                let flat: Vec<String> = vertices
                    .iter()
                    .flat_map(|v| [v[0].to_string(), v[1].to_string()])
                    .collect();
                write!(f, "{}", flat.join(","))
            }
            RegionSpec::Tube { tau } => write!(f, "tube:{tau}"),
        }
    }
}

impl FromStr for RegionSpec {
    type Err = Error;

    /// `whole`, `disk:cx,cy,r`, `annulus:cx,cy,r_in,r_out`,
    /// `halfplane:angle,offset`, `polygon:x1,y1,x2,y2,...`, `tube:tau`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number {a:?} in region {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        let want = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "region {kind} takes {k} numbers, got {}",
                    nums.len()
                )))
            }
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "whole" | "plane" => {
                want(0)?;
                Ok(RegionSpec::Whole)
            }
            "disk" => {
                want(3)?;
                Ok(RegionSpec::Disk {
                    cx: nums[0],
                    cy: nums[1],
                    r: nums[2],
                })
            }
            "annulus" => {
                want(4)?;
                Ok(RegionSpec::Annulus {
                    cx: nums[0],
                    cy: nums[1],
                    r_in: nums[2],
                    r_out: nums[3],
                })
            }
            "halfplane" | "half_plane" => {
                want(2)?;
                Ok(RegionSpec::HalfPlane {
                    angle: nums[0],
                    offset: nums[1],
                })
            }
            "polygon" => {
                if nums.len() < 6 || !nums.len().is_multiple_of(2) {
                    return Err(Error::Config("polygon takes an even number (>= 6) of coordinates".into()));
                }
                Ok(RegionSpec::Polygon {
                    vertices: nums.chunks(2).map(|p| [p[0], p[1]]).collect(),
                })
            }
            "tube" => {
                want(1)?;
                Ok(RegionSpec::Tube { tau: nums[0] })
            }
            other => Err(Error::Config(format!(
                "unknown region kind {other:?} (expected whole, disk, annulus, halfplane, polygon, tube)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn membership_examples() {
        assert!(Region::disk(c(0.0, 0.0), 1.0)
            .unwrap()
            .contains(c(0.0, 0.0)));
        assert!(!Region::annulus(c(0.0, 0.0), 1.0, 2.0)
            .unwrap()
            .contains(c(0.0, 0.0)));
        assert!(Region::disk(c(0.0, 0.0), 1.0)
            .unwrap()
            .contains(c(1.0, 0.0)));
        let fig1 =
            LaurentSymbol::new([(1, c(0.0, 2.0)), (-2, c(1.0, 0.0)), (-3, c(0.7, 0.0))]).unwrap();
        let tube = Region::curve_tube(&fig1, 0.1).unwrap();
        for k in 0..20 {
            assert!(tube.contains(fig1.eval_curve(0.31 * k as f64)));
        }
    }

    #[test]
    fn invalid_regions_rejected() {
        assert!(Region::disk(c(0.0, 0.0), 0.0).is_err());
        assert!(Region::annulus(c(0.0, 0.0), 2.0, 1.0).is_err());
        let bowtie = vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert!(Region::polygon(bowtie).is_err());
        assert!(Region::polygon(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        let fig1 = LaurentSymbol::new([(1, c(1.0, 0.0))]).unwrap();
        assert!(Region::curve_tube(&fig1, 0.0).is_err());
    }

    #[test]
    fn count_examples() {
        let roots: Vec<C64> = (0..4)
            .map(|k| C64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * k as f64))
            .collect();
        assert_eq!(count_in_region(&roots, &Region::half_plane(0.0, 0.5)), 1);
        assert_eq!(count_in_region(&[], &Region::Whole), 0);
    }

    #[test]
    fn jordan_annulus_examples() {
        let (lo, hi) = annulus_bounds_jordan(1000, 1e-14, 0.1).unwrap();
        assert!((hi - (1e-11f64.ln() / 1000.0).exp()).abs() < 1e-15);
        assert!((hi - 0.9750).abs() < 1e-4);
        assert!((lo - hi * (-0.1f64).exp()).abs() < 1e-15);
        let (lo, hi) = annulus_bounds_jordan(1000, 1e-14, 1e-12).unwrap();
        assert!((hi - lo).abs() < 1e-11);
        let (_, hi) = annulus_bounds_jordan(100, 0.01, 0.1).unwrap();
        assert!((hi - 1.0).abs() < 1e-15);
        assert!(annulus_bounds_jordan(10, 0.0, 0.1).is_err());
    }

    /// Independent oracle: total turning angle of the vertices seen from z.
    fn angle_sum_inside(v: &[C64], z: C64) -> bool {
        let n = v.len();
        let total: f64 = (0..n)
            .map(|i| ((v[(i + 1) % n] - z) / (v[i] - z)).arg())
            .sum();
        total.abs() > std::f64::consts::PI
    }

    #[test]
    fn polygon_agrees_with_angle_sum_oracle() {
        // A non-convex "comb".
        let v = vec![
            c(0.0, 0.0),
            c(4.0, 0.0),
            c(4.0, 3.0),
            c(3.0, 3.0),
            c(3.0, 1.0),
            c(2.0, 1.0),
            c(2.0, 3.0),
            c(1.0, 3.0),
            c(1.0, 1.0),
            c(0.5, 2.5),
        ];
        let poly = Region::polygon(v.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let z = c(
                rng.random::<f64>() * 5.0 - 0.5,
                rng.random::<f64>() * 4.0 - 0.5,
            );
            assert_eq!(poly.contains(z), angle_sum_inside(&v, z), "z = {z}");
        }
        // Ray through a vertex.
        assert!(poly.contains(c(0.8, 1.0)));
        assert!(!poly.contains(c(-1.0, 3.0)));
    }

    #[test]
    fn literals_round_trip() {
        for lit in [
            "disk:0,0,1.5",
            "annulus:1,-1,0.5,2",
            "halfplane:0.5,-1",
            "polygon:0,0,1,0,0,1",
            "tube:0.04",
            "whole",
        ] {
            let spec: RegionSpec = lit.parse().unwrap();
            assert_eq!(spec.to_string().parse::<RegionSpec>().unwrap(), spec);
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<RegionSpec>(&json).unwrap(), spec);
        }
        assert!("disk:0,0".parse::<RegionSpec>().is_err());
        assert!("blob:1".parse::<RegionSpec>().is_err());
        assert!(RegionSpec::Tube { tau: 0.1 }.build(None).is_err());
    }
}
