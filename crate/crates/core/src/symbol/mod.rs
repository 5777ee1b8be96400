//! Laurent symbols `p(tau) = sum_j a_j tau^j`, their circle image, and the
//! roots of the characteristic equation `p(1/zeta) = z`.

pub mod aberth;
mod curve;

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use curve::{
    dist_to_curve, preimage_measure, preimage_measure_with, CurveGrid, DIST_GRID, PREIMAGE_GRID,
};

pub const CIRCLE_TOL: f64 = 1e-9;
pub const CLUSTER_TOL: f64 = 1e-7;

/// Laurent polynomial with coefficients `a_j`, `j` in `[-N_-, N_+]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolRecord", into = "SymbolRecord")]
pub struct LaurentSymbol {
    n_plus: usize,
    n_minus: usize,
    /// `coeffs[j + n_minus] = a_j`.
    coeffs: Vec<C64>,
}

/// Serialized form: nonzero terms `[j, re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SymbolRecord {
    terms: Vec<(i32, f64, f64)>,
}

impl TryFrom<SymbolRecord> for LaurentSymbol {
    type Error = Error;

    fn try_from(r: SymbolRecord) -> Result<Self> {
        LaurentSymbol::new(r.terms.into_iter().map(|(j, re, im)| (j, C64::new(re, im))))
    }
}

impl From<LaurentSymbol> for SymbolRecord {
    fn from(s: LaurentSymbol) -> Self {
        SymbolRecord {
            terms: s
                .terms()
                .into_iter()
                .map(|(j, c)| (j, c.re, c.im))
                .collect(),
        }
    }
}

impl LaurentSymbol {
    /// Builds a symbol from `(j, a_j)` pairs. Repeated powers are summed and
    /// zero coefficients dropped; `N_+` and `N_-` are read off the support.
    pub fn new(terms: impl IntoIterator<Item = (i32, C64)>) -> Result<Self> {
        let mut map: BTreeMap<i32, C64> = BTreeMap::new();
        for (j, c) in terms {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvariantViolation(format!(
                    "coefficient a_{j} is not finite"
                )));
            }
            *map.entry(j).or_default() += c;
        }
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        let (Some(&lo), Some(&hi)) = (map.keys().next(), map.keys().next_back()) else {
            return Err(Error::EmptySymbol);
        };
        let n_plus = hi.max(0) as usize;
        let n_minus = (-lo).max(0) as usize;
        if n_plus + n_minus == 0 {
            return Err(Error::InvariantViolation(
                "constant symbol: at least one of N_+, N_- must be nonzero".into(),
            ));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n_plus + n_minus + 1];
        for (j, c) in map {
            coeffs[(j + n_minus as i32) as usize] = c;
        }
        Ok(Self {
            n_plus,
            n_minus,
            coeffs,
        })
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    /// `M = N_+ + N_-`, the degree of the characteristic polynomial.
    pub fn degree(&self) -> usize {
        self.n_plus + self.n_minus
    }

    /// `a_j`, zero outside the band.
    pub fn coeff(&self, j: i64) -> C64 {
        let idx = j + self.n_minus as i64;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Nonzero `(j, a_j)` in increasing `j`.
    pub fn terms(&self) -> Vec<(i32, C64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(i, &c)| (i as i32 - self.n_minus as i32, c))
            .collect()
    }

    /// `sum_j |a_j|`, a bound for `|p|` on the circle and for `||p(tau)||`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Curve point `f(theta) = sum_j a_j e^{i j theta}`.
    pub fn eval_curve(&self, theta: f64) -> C64 {
        self.eval(C64::from_polar(1.0, theta))
    }

    /// `df/dtheta`.
    pub fn curve_derivative(&self, theta: f64) -> C64 {
        let w = C64::from_polar(1.0, theta);
        let mut acc = C64::new(0.0, 0.0);
        for (j, c) in self.terms() {
            acc += c * C64::new(0.0, j as f64) * w.powi(j);
        }
        acc
    }

    /// `p(t) = sum_j a_j t^j` for `t != 0`.
    pub fn eval(&self, t: C64) -> C64 {
        // Horner in t from the top, then divide out t^{N_-}.
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc / t.powi(self.n_minus as i32)
    }

    /// Symbol of the adjoint matrix, `b_j = conj(a_{-j})`.
    pub fn adjoint(&self) -> Self {
        let mut coeffs: Vec<C64> = self.coeffs.iter().map(|c| c.conj()).collect();
        coeffs.reverse();
        Self {
            n_plus: self.n_minus,
            n_minus: self.n_plus,
            coeffs,
        }
    }

    /// Ascending coefficients of `sum_{j=0}^{M} a_{N_+ - j} zeta^j - z zeta^{N_+}`,
    /// which vanishes exactly where `p(1/zeta) = z`.
    pub fn characteristic_coeffs(&self, z: C64) -> Result<Vec<C64>> {
        if (self.n_plus == 0 || self.n_minus == 0) && z == self.coeff(0) {
            return Err(Error::DegenerateParameter(format!(
                "z = a_0 = {z} lowers the degree of the characteristic polynomial of a one-sided symbol"
            )));
        }
        Ok(self.raw_characteristic_coeffs(z))
    }

    fn raw_characteristic_coeffs(&self, z: C64) -> Vec<C64> {
        let m = self.degree();
        let mut out: Vec<C64> = (0..=m)
            .map(|j| self.coeff(self.n_plus as i64 - j as i64))
            .collect();
        out[self.n_plus] -= z;
        out
    }

    /// Roots of the characteristic polynomial split by the unit circle.
    ///
    /// For a one-sided symbol at `z = a_0` the polynomial loses degree; the
    /// lost roots sit at `zeta = 0` (counted inside) or at infinity (outside).
    pub fn roots_split(&self, z: C64, circle_tol: f64) -> Result<RootSplit> {
        let mut c = self.raw_characteristic_coeffs(z);
        let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let negligible = |x: &C64| x.norm() <= 8.0 * f64::EPSILON * scale;
        let mut at_infinity = 0;
        while c.len() > 1 && negligible(c.last().unwrap()) {
            c.pop();
            at_infinity += 1;
        }
        let mut at_zero = 0;
        while c.len() > 1 && negligible(&c[0]) {
            c.remove(0);
            at_zero += 1;
        }
        let roots = aberth::polynomial_roots(&c)?;
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for (root, mult) in cluster(&roots, CLUSTER_TOL) {
            let modulus = root.norm();
            if (modulus - 1.0).abs() <= circle_tol {
                return Err(Error::RootsOnCircle {
                    modulus,
                    tol: circle_tol,
                });
            }
            if modulus < 1.0 {
                inside.push((root, mult));
            } else {
                outside.push((root, mult));
            }
        }
        let m_plus = inside.iter().map(|r| r.1).sum::<usize>() + at_zero;
        let m_minus = outside.iter().map(|r| r.1).sum::<usize>() + at_infinity;
        debug_assert_eq!(m_plus + m_minus, self.degree());
        Ok(RootSplit {
            z,
            inside,
            outside,
            m_plus,
            m_minus,
            at_zero,
            at_infinity,
        })
    }

    /// Winding number of the curve around `z`, by argument tracking along
    /// increasing `theta`. Equals `N_+ - m_+`.
    pub fn winding_number(&self, z: C64) -> Result<i64> {
        let (distance, _) = dist_to_curve(self, z);
        let tol = WINDING_TOL * (1.0 + self.l1_norm());
        if distance <= tol {
            return Err(Error::OnCurve { distance, tol });
        }
        let w = track_argument(self, z, distance)?;
        if cfg!(debug_assertions) {
            if let Ok(split) = self.roots_split(z, CIRCLE_TOL) {
                let expected = self.n_plus as i64 - split.m_plus as i64;
                if w != expected {
                    return Err(Error::InvariantViolation(format!(
                        "argument tracking gives winding {w} but N_+ - m_+ = {expected} at z = {z}"
                    )));
                }
            }
        }
        Ok(w)
    }

    /// Index `m_+ - N_+` of the half-line Toeplitz operator `p(tau) - z`.
    pub fn fredholm_index(&self, z: C64) -> Result<i64> {
        let split = self.roots_split(z, CIRCLE_TOL)?;
        Ok(split.m_plus as i64 - self.n_plus as i64)
    }
}

const WINDING_TOL: f64 = 1e-10;
const MAX_WINDING_SAMPLES: usize = 1 << 22;

fn track_argument(sym: &LaurentSymbol, z: C64, distance: f64) -> Result<i64> {
    // Starting density from the curve speed bound and the distance to z.
    let speed: f64 = sym
        .terms()
        .iter()
        .map(|(j, c)| j.unsigned_abs() as f64 * c.norm())
        .sum();
    let guess = (TAU * speed / distance).ceil() as usize;
    let mut n = guess.clamp(64, MAX_WINDING_SAMPLES).next_power_of_two();
    loop {
        let mut total = 0.0;
        let mut max_turn: f64 = 0.0;
        let mut prev = sym.eval_curve(0.0) - z;
        for k in 1..=n {
            let cur = sym.eval_curve(TAU * k as f64 / n as f64) - z;
            let turn = (cur / prev).arg();
            total += turn;
            max_turn = max_turn.max(turn.abs());
            prev = cur;
        }
        if max_turn < PI / 2.0 {
            return Ok((total / TAU).round() as i64);
        }
        if n >= MAX_WINDING_SAMPLES {
            return Err(Error::RefinementExhausted { samples: n });
        }
        n *= 2;
    }
}

/// Groups numerically equal roots; returns `(mean, multiplicity)`.
fn cluster(roots: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for &r in roots {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|&x| (x - r).norm() <= tol * x.norm().max(1.0)))
        {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let n = g.len();
            (g.iter().sum::<C64>() / n as f64, n)
        })
        .collect()
}

/// Characteristic roots at a spectral parameter, split by the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSplit {
    pub z: C64,
    /// `(root, multiplicity)` with `0 < |root| < 1`.
    pub inside: Vec<(C64, usize)>,
    /// `(root, multiplicity)` with `|root| > 1`.
    pub outside: Vec<(C64, usize)>,
    /// Includes `at_zero`.
    pub m_plus: usize,
    /// Includes `at_infinity`.
    pub m_minus: usize,
    /// Roots lost at `zeta = 0` (one-sided symbol, `N_+ = 0`, `z = a_0`).
    pub at_zero: usize,
    /// Roots lost at infinity (one-sided symbol, `N_- = 0`, `z = a_0`).
    pub at_infinity: usize,
}

impl RootSplit {
    pub fn all_simple(&self) -> bool {
        self.at_zero == 0
            && self.at_infinity == 0
            && self.inside.iter().chain(&self.outside).all(|r| r.1 == 1)
    }

    /// Largest inside modulus, 0 if none.
    pub fn rho_in(&self) -> f64 {
        self.inside.iter().map(|r| r.0.norm()).fold(0.0, f64::max)
    }

    /// Smallest outside modulus, infinite if none.
    pub fn rho_out(&self) -> f64 {
        self.outside
            .iter()
            .map(|r| r.0.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn fig1() -> LaurentSymbol {
        LaurentSymbol::new([(1, c(0.0, 2.0)), (-2, c(1.0, 0.0)), (-3, c(0.7, 0.0))]).unwrap()
    }

    fn fig2() -> LaurentSymbol {
        LaurentSymbol::new([
            (3, c(2.0, 0.0)),
            (2, c(-1.0, 0.0)),
            (1, c(0.0, 2.0)),
            (-2, c(-4.0, 0.0)),
            (-3, c(0.0, -2.0)),
        ])
        .unwrap()
    }

    fn shift() -> LaurentSymbol {
        LaurentSymbol::new([(1, c(1.0, 0.0))]).unwrap()
    }

    fn cosine() -> LaurentSymbol {
        LaurentSymbol::new([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn construction_invariants() {
        assert!(matches!(LaurentSymbol::new([]), Err(Error::EmptySymbol)));
        assert!(matches!(
            LaurentSymbol::new([(1, c(1.0, 0.0)), (1, c(-1.0, 0.0))]),
            Err(Error::EmptySymbol)
        ));
        assert!(matches!(
            LaurentSymbol::new([(0, c(2.0, 0.0))]),
            Err(Error::InvariantViolation(_))
        ));
        assert!(LaurentSymbol::new([(2, c(f64::NAN, 0.0))]).is_err());
        let s = fig1();
        assert_eq!((s.n_plus(), s.n_minus()), (1, 3));
        assert_eq!(s.coeff(-2), c(1.0, 0.0));
        assert_eq!(s.coeff(7), c(0.0, 0.0));
    }

    #[test]
    fn eval_curve_examples() {
        assert!((shift().eval_curve(PI / 2.0) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((fig1().eval_curve(0.0) - c(1.7, 2.0)).norm() < 1e-15);
        for k in 0..10 {
            let t = 0.37 * k as f64;
            let v = cosine().eval_curve(t);
            assert!((v - c(2.0 * t.cos(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn curve_derivative_matches_difference_quotient() {
        let s = fig2();
        let h = 1e-6;
        for k in 0..8 {
            let t = 0.8 * k as f64;
            let fd = (s.eval_curve(t + h) - s.eval_curve(t - h)) / (2.0 * h);
            assert!((fd - s.curve_derivative(t)).norm() < 1e-6);
        }
    }

    #[test]
    fn characteristic_coeffs_examples() {
        assert_eq!(
            shift().characteristic_coeffs(c(2.0, 0.0)).unwrap(),
            vec![c(1.0, 0.0), c(-2.0, 0.0)]
        );
        assert_eq!(
            cosine().characteristic_coeffs(c(3.0, 0.0)).unwrap(),
            vec![c(1.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]
        );
        assert!(matches!(
            shift().characteristic_coeffs(c(0.0, 0.0)),
            Err(Error::DegenerateParameter(_))
        ));
    }

    #[test]
    fn characteristic_coeffs_fig1_term_by_term() {
        // zeta^{N_+} (p(1/zeta) - z) = 2i + zeta^3 + 0.7 zeta^4 - z zeta, written out by hand.
        let z = c(1.0, 1.0);
        let got = fig1().characteristic_coeffs(z).unwrap();
        let want = vec![c(0.0, 2.0), -z, c(0.0, 0.0), c(1.0, 0.0), c(0.7, 0.0)];
        assert_eq!(got, want);
    }

    #[test]
    fn roots_split_examples() {
        let r = shift().roots_split(c(2.0, 0.0), CIRCLE_TOL).unwrap();
        assert_eq!((r.m_plus, r.m_minus), (1, 0));
        assert!((r.inside[0].0 - c(0.5, 0.0)).norm() < 1e-15);

        let r = cosine().roots_split(c(3.0, 0.0), CIRCLE_TOL).unwrap();
        let s5 = 5f64.sqrt();
        assert_eq!((r.m_plus, r.m_minus), (1, 1));
        assert!((r.inside[0].0.re - (3.0 - s5) / 2.0).abs() < 1e-13);
        assert!((r.outside[0].0.re - (3.0 + s5) / 2.0).abs() < 1e-13);

        let r = shift().roots_split(c(0.5, 0.0), CIRCLE_TOL).unwrap();
        assert_eq!((r.m_plus, r.m_minus), (0, 1));
        assert!((r.outside[0].0 - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn roots_on_circle_rejected() {
        assert!(matches!(
            shift().roots_split(c(1.0, 0.0), CIRCLE_TOL),
            Err(Error::RootsOnCircle { .. })
        ));
    }

    #[test]
    fn degenerate_one_sided_cases() {
        let r = shift().roots_split(c(0.0, 0.0), CIRCLE_TOL).unwrap();
        assert_eq!((r.m_plus, r.m_minus, r.at_infinity), (0, 1, 1));
        let jordan = LaurentSymbol::new([(-1, c(1.0, 0.0))]).unwrap();
        let r = jordan.roots_split(c(0.0, 0.0), CIRCLE_TOL).unwrap();
        assert_eq!((r.m_plus, r.m_minus, r.at_zero), (1, 0, 1));
        assert_eq!(jordan.winding_number(c(0.0, 0.0)).unwrap(), -1);
    }

    #[test]
    fn winding_examples() {
        assert_eq!(shift().winding_number(c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(shift().winding_number(c(2.0, 0.0)).unwrap(), 0);
        let s = fig2();
        let split = s.roots_split(c(0.0, 0.0), CIRCLE_TOL).unwrap();
        assert_eq!(
            s.winding_number(c(0.0, 0.0)).unwrap(),
            s.n_plus() as i64 - split.m_plus as i64
        );
        assert!(matches!(
            shift().winding_number(c(1.0, 0.0)),
            Err(Error::OnCurve { .. })
        ));
    }

    #[test]
    fn fredholm_index_examples() {
        assert_eq!(shift().fredholm_index(c(0.0, 0.0)).unwrap(), -1);
        let jordan = LaurentSymbol::new([(-1, c(1.0, 0.0))]).unwrap();
        assert_eq!(jordan.fredholm_index(c(0.5, 0.0)).unwrap(), 1);
        assert_eq!(cosine().fredholm_index(c(3.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn adjoint_reverses_and_conjugates() {
        let a = fig1().adjoint();
        assert_eq!((a.n_plus(), a.n_minus()), (3, 1));
        assert_eq!(a.coeff(-1), c(0.0, -2.0));
        assert_eq!(a.coeff(3), c(0.7, 0.0));
        for k in 0..5 {
            let t = 0.9 * k as f64;
            assert!((a.eval_curve(t) - fig1().eval_curve(t).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn serde_round_trip() {
        let s = fig2();
        let text = serde_json::to_string(&s).unwrap();
        let back: LaurentSymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<LaurentSymbol>(r#"{"terms":[]}"#).is_err());
    }
}
