//! Simultaneous polynomial root finding (Aberth-Ehrlich).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 500;

/// `(p(x), p'(x))` by Horner; `coeffs` ascending.
#[inline]
fn horner(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Running bound on the rounding error of Horner at `|x|`.
#[inline]
fn horner_error_bound(coeffs: &[C64], r: f64) -> f64 {
    let mut e = 0.0;
    for c in coeffs.iter().rev() {
        e = e * r + c.norm();
    }
    e * f64::EPSILON * (4 * coeffs.len()) as f64
}

/// All roots of `sum_k coeffs[k] x^k`, with multiplicity. The leading
/// coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    polynomial_roots_with(coeffs, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn polynomial_roots_with(coeffs: &[C64], tol: f64, max_iter: usize) -> Result<Vec<C64>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    if lead.norm() == 0.0 {
        return Err(Error::InvariantViolation(
            "leading coefficient is zero".into(),
        ));
    }
    if coeffs
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(Error::InvariantViolation(
            "non-finite polynomial coefficient".into(),
        ));
    }
    if d == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();

    // Initial guesses: a rotated circle of the geometric-mean root modulus.
    let c0 = monic[0].norm();
    let radius = if c0 > 0.0 {
        c0.powf(1.0 / d as f64)
    } else {
        1.0
    };
    let mut z: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let mut done = vec![false; d];

    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() <= horner_error_bound(&monic, z[i].norm()) {
                done[i] = true;
                continue;
            }
            all = false;
            let ratio = p / dp;
            let mut s = C64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    s += (z[i] - zj).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                // p'(z) = 0 or coincident iterates: nudge and retry.
                z[i] += C64::new(1e-3, 1e-3) * radius.max(1e-3);
                continue;
            }
            z[i] -= w;
            if w.norm() <= tol * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if all || done.iter().all(|&x| x) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        what: "Aberth-Ehrlich root iteration",
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn expand(roots: &[C64]) -> Vec<C64> {
        let mut p = vec![c(1.0, 0.0)];
        for &r in roots {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * r;
            }
            p = q;
        }
        p
    }

    fn matched(found: &[C64], want: &[C64], tol: f64) -> bool {
        let mut used = vec![false; found.len()];
        want.iter().all(|w| {
            let best = (0..found.len())
                .filter(|&i| !used[i])
                .min_by(|&a, &b| (found[a] - w).norm().total_cmp(&(found[b] - w).norm()));
            match best {
                Some(i) if (found[i] - w).norm() <= tol => {
                    used[i] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn quadratic_golden_roots() {
        let r = polynomial_roots(&[c(1.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        let s5 = 5f64.sqrt();
        assert!(matched(
            &r,
            &[c((3.0 - s5) / 2.0, 0.0), c((3.0 + s5) / 2.0, 0.0)],
            1e-13
        ));
    }

    #[test]
    fn recovers_prescribed_roots() {
        let want = [
            c(0.3, -0.2),
            c(-1.5, 0.7),
            c(0.0, 2.2),
            c(4.0, 0.1),
            c(-0.05, -0.9),
            c(1.0, 1.0),
        ];
        let r = polynomial_roots(&expand(&want)).unwrap();
        assert!(matched(&r, &want, 1e-11));
    }

    #[test]
    fn double_root_is_found_twice() {
        let want = [c(0.5, 0.0), c(0.5, 0.0), c(-2.0, 1.0)];
        let r = polynomial_roots(&expand(&want)).unwrap();
        assert!(matched(&r, &want, 1e-7));
    }

    #[test]
    fn linear_and_constant() {
        assert!(polynomial_roots(&[c(2.0, 0.0)]).unwrap().is_empty());
        let r = polynomial_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]).unwrap();
        assert!((r[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }
}
