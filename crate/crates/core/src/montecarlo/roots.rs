//! Polynomial roots by Aberth–Ehrlich simultaneous iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;
/// Coefficients below this magnitude are treated as zero at the top end.
pub const TRAILING_ZERO: f64 = 1e-300;
/// Residual gate factor.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `Σ c_k x^k` and its derivative by Horner's rule.
fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// `|p(r)| / max(1, |r|)^d`, evaluated through the reversed polynomial
/// outside the unit disk so it cannot overflow.
pub fn scaled_residual(coeffs: &[Complex64], reversed: &[Complex64], r: Complex64) -> f64 {
    if r.norm() <= 1.0 {
        horner(coeffs, r).0.norm()
    } else {
        horner(reversed, r.inv()).0.norm()
    }
}

/// The gate `|p(r)| ≤ tol · max|c| · max(1, |r|)^d`.
pub fn passes_gate(coeffs: &[Complex64], reversed: &[Complex64], r: Complex64) -> bool {
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    scaled_residual(coeffs, reversed, r) <= RESIDUAL_TOL * cmax
}

/// Initial guesses on circles whose radii follow the upper convex hull of
/// `(k, ln|c_k|)`, one circle per hull edge.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k as f64, c.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(d);
    // Offset angle keeps guesses off the real axis, where real polynomials
    // would otherwise pin them.
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let count = (k1 - k0) as usize;
        let radius = ((l0 - l1) / (k1 - k0)).exp();
        for i in 0..count {
            let ang = 2.0 * std::f64::consts::PI * i as f64 / count as f64
                + 2.0 * std::f64::consts::PI * k0 / d as f64
                + sigma;
            out.push(Complex64::from_polar(radius, ang));
        }
    }
    out
}

/// Newton correction `p(x)/p′(x)`. Outside the unit disk it is computed from
/// the reversed polynomial `q(w) = wᵈ p(1/w)`, where
/// `p/p′ = x q / (d q − w q′)` avoids overflow and keeps relative accuracy.
fn newton_ratio(coeffs: &[Complex64], reversed: &[Complex64], x: Complex64) -> Option<Complex64> {
    if x.norm() <= 1.0 {
        let (p, dp) = horner(coeffs, x);
        if p == Complex64::new(0.0, 0.0) {
            return None;
        }
        return Some(p / dp);
    }
    let d = (coeffs.len() - 1) as f64;
    let w = x.inv();
    let (q, dq) = horner(reversed, w);
    if q == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some(x * q / (q * d - w * dq))
}

fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let reversed: Vec<Complex64> = coeffs.iter().rev().cloned().collect();
    let mut z = initial_guesses(coeffs);
    let mut done = vec![false; d];
    for _ in 0..MAX_ITER {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let Some(ratio) = newton_ratio(coeffs, &reversed, z[i]) else {
                done[i] = true;
                continue;
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
            }
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

fn newton_polish(coeffs: &[Complex64], r: Complex64) -> Complex64 {
    let (p, dp) = horner(coeffs, r);
    let step = p / dp;
    let cand = r - step;
    if !step.is_finite() {
        return r;
    }
    let (pc, _) = horner(coeffs, cand);
    if pc.norm() <= p.norm() {
        cand
    } else {
        r
    }
}

/// All roots of `Σ c_k x^k`, counted with multiplicity.
///
/// Zero constant terms contribute exact zero roots. Every root gets one
/// Newton polishing step and must pass the residual gate.
pub fn find_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
    }
    let top = coeffs
        .iter()
        .rposition(|c| c.norm() >= TRAILING_ZERO)
        .ok_or_else(|| Error::InvalidInput("polynomial has no nonzero coefficient".into()))?;
    let trimmed = &coeffs[..=top];
    let low = trimmed.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
    let core = &trimmed[low..];
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    if core.len() > 1 {
        let raw = aberth(core);
        let reversed: Vec<Complex64> = core.iter().rev().cloned().collect();
        for r in raw {
            // Large roots are refined in the reciprocal variable, where they are well scaled.
            let polished = if r.norm() <= 1.0 {
                newton_polish(core, r)
            } else {
                newton_polish(&reversed, r.inv()).inv()
            };
            roots.push(polished);
        }
    }
    let reversed: Vec<Complex64> = trimmed.iter().rev().cloned().collect();
    for r in &roots {
        if !passes_gate(trimmed, &reversed, *r) {
            return Err(Error::RootQuality(format!(
                "residual {:e} at root {r} exceeds gate",
                scaled_residual(trimmed, &reversed, *r)
            )));
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn quadratic() {
        let r = sorted(find_roots(&[c(-1.0), c(0.0), c(1.0)]).unwrap());
        assert!((r[0] - c(-1.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn expanded_cubic_round_trip() {
        // (z - 0.5)(z - 2)(z + 1) = z^3 - 1.5 z^2 - 1.5 z + 1
        let r = sorted(find_roots(&[c(1.0), c(-1.5), c(-1.5), c(1.0)]).unwrap());
        for (got, want) in r.iter().zip([-1.0, 0.5, 2.0]) {
            assert!((got - c(want)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_low_and_trailing_coefficients() {
        let r = find_roots(&[c(0.0), c(0.0), c(-4.0), c(1.0), c(0.0)]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!(r.iter().any(|z| (z - c(4.0)).norm() < 1e-12));
    }

    #[test]
    fn rejects_empty() {
        assert!(find_roots(&[c(0.0), c(0.0)]).is_err());
        assert!(find_roots(&[c(f64::NAN), c(1.0)]).is_err());
    }

    #[test]
    fn roots_of_unity() {
        let mut p = vec![c(0.0); 65];
        p[0] = c(-1.0);
        p[64] = c(1.0);
        let r = find_roots(&p).unwrap();
        assert_eq!(r.len(), 64);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(64) - c(1.0)).norm() < 1e-10);
        }
    }
}
