//! Scaling-limit calculus.
//!
//! Everything here is built from the model function
//! `F_m(t) = ∫₀¹ e^{ty} yᵐ dy`. The limit covariance of the normalized kernel
//! at two points separated by `u/N` is the 2×2 matrix [`g_matrix`], its
//! conditional derivative covariance is [`q_matrix`], and the limit density and
//! pair correlation are closed-form functionals of these.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Directions with `|β(u)|` below this are treated as holomorphic-tangential.
pub const TOL_BETA: f64 = 1e-8;

/// Largest order accepted by [`eval_f`]. Orders up to 64 are supported for
/// callers; the extra two cover the `m + 2` entries needed by [`q_matrix`].
pub const MAX_ORDER: usize = 66;

const SERIES_RADIUS: f64 = 1.0;
const SERIES_REL_STOP: f64 = 1e-17;
const BACKWARD_DAMPING: f64 = 1e-20;

/// `F_m(t) = ∫₀¹ e^{ty} yᵐ dy`.
pub fn eval_f(m: usize, t: Complex64) -> Result<Complex64> {
    Ok(*f_sequence(m, t)?.last().unwrap())
}

/// `[F_0(t), …, F_m(t)]`, each entry evaluated along a numerically stable route.
///
/// Near the origin the power series is used. Otherwise orders `k ≤ |t|` come
/// from the upward recurrence `F_k = (e^t − k F_{k−1}) / t` and orders above
/// `|t|` from the same recurrence run downward, which damps start-up error by
/// `|t| / k` per step.
pub fn f_sequence(m: usize, t: Complex64) -> Result<Vec<Complex64>> {
    if !(t.re.is_finite() && t.im.is_finite()) {
        return Err(Error::Domain(format!("F_m argument must be finite, got {t}")));
    }
    if m > MAX_ORDER {
        return Err(Error::Domain(format!("order m = {m} exceeds {MAX_ORDER}")));
    }
    let r = t.norm();
    if r < SERIES_RADIUS {
        return Ok((0..=m).map(|k| f_series(k, t)).collect());
    }

    let et = t.exp();
    let mut out = Vec::with_capacity(m + 1);
    // |t| >= 1 here, so e^t - 1 carries no cancellation worth guarding.
    out.push((et - 1.0) / t);
    let upward_top = (r.floor() as usize).min(m);
    for k in 1..=upward_top {
        let prev = out[k - 1];
        out.push((et - prev * k as f64) / t);
    }
    if upward_top == m {
        return Ok(out);
    }

    // Downward leg for orders upward_top+1 ..= m.
    let mut top = m;
    let mut damping = 1.0;
    while damping > BACKWARD_DAMPING {
        top += 1;
        damping *= r / top as f64;
    }
    let mut f = et / (t + (top + 1) as f64);
    let mut tail = vec![Complex64::new(0.0, 0.0); m - upward_top];
    for k in (upward_top + 1..=top).rev() {
        // f currently holds F_k; step to F_{k-1}.
        if k <= m {
            tail[k - upward_top - 1] = f;
        }
        f = (et - t * f) / k as f64;
    }
    out.extend(tail);
    Ok(out)
}

fn f_series(m: usize, t: Complex64) -> Complex64 {
    // Σ_k t^k / (k! (m + k + 1))
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(1.0 / (m as f64 + 1.0), 0.0);
    for k in 1..200 {
        power = power * t / k as f64;
        let term = power / (m + k + 1) as f64;
        sum += term;
        if term.norm() < SERIES_REL_STOP * sum.norm() {
            break;
        }
    }
    sum
}

/// `(log F_m)″(s) = (F_{m+2} F_m − F_{m+1}²) / F_m²`, using `F_m′ = F_{m+1}`.
pub fn log_f_dd(m: usize, s: Complex64) -> Result<Complex64> {
    let f = f_sequence(m + 2, s)?;
    let (f0, f1, f2) = (f[m], f[m + 1], f[m + 2]);
    if f0.norm() < 1e-300 {
        return Err(Error::Singularity(format!("F_{m}({s}) vanishes")));
    }
    Ok((f2 * f0 - f1 * f1) / (f0 * f0))
}

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Mat2 {
    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn identity() -> Self {
        Self::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Cofactor inverse. Returns `None` for an exactly singular matrix.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }

    pub fn conj_transpose(&self) -> Mat2 {
        Mat2::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }
}

/// `G_m(x) = [[F_m(x + x̄), F_m(x)], [F_m(x̄), F_m(0)]]`.
pub fn g_matrix(m: usize, x: Complex64) -> Result<Mat2> {
    let zero = Complex64::new(0.0, 0.0);
    Ok(Mat2::new(eval_f(m, x + x.conj())?, eval_f(m, x)?, eval_f(m, x.conj())?, eval_f(m, zero)?))
}

/// `Q_m(x) = G_{m+2}(x) − G_{m+1}(x) G_m(x)⁻¹ G_{m+1}(x)`.
pub fn q_matrix(m: usize, x: Complex64) -> Result<Mat2> {
    if x.norm() < TOL_BETA {
        return Err(Error::DegenerateDirection { beta_abs: x.norm() });
    }
    let g0 = g_matrix(m, x)?;
    let g1 = g_matrix(m + 1, x)?;
    let g2 = g_matrix(m + 2, x)?;
    let inv = g0.inverse().ok_or_else(|| Error::Singularity(format!("G_{m}({x}) is singular")))?;
    Ok(g2.sub(&g1.mul(&inv).mul(&g1)))
}

/// 2×2 permanent.
pub fn perm2(m: &Mat2) -> Complex64 {
    m.a11 * m.a22 + m.a12 * m.a21
}

/// Boundary-point data entering the limit formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitGeometry {
    /// Complex dimension minus one.
    pub m: usize,
    /// `1 / (d′ρ(z)·z)`.
    pub t0: Complex64,
    /// `‖P‖²` with `P = ∂ρ/∂z̄`.
    pub p_norm_sq: f64,
    /// `β(P)`, which must equal `t0 ‖P‖²`.
    pub beta_of_p: Complex64,
}

impl LimitGeometry {
    /// Checks `beta_of_p = t0 · p_norm_sq` to 1e-12 relative.
    pub fn new(m: usize, t0: Complex64, p_norm_sq: f64, beta_of_p: Complex64) -> Result<Self> {
        if !(p_norm_sq.is_finite() && p_norm_sq >= 0.0) {
            return Err(Error::InvalidInput(format!("‖P‖² must be finite and ≥ 0, got {p_norm_sq}")));
        }
        let expect = t0 * p_norm_sq;
        let scale = expect.norm().max(beta_of_p.norm()).max(f64::MIN_POSITIVE);
        if (expect - beta_of_p).norm() > 1e-12 * scale {
            return Err(Error::InvalidInput(format!("β(P) = {beta_of_p} disagrees with t0‖P‖² = {expect}")));
        }
        Ok(Self { m, t0, p_norm_sq, beta_of_p })
    }

    /// Round circle `|z| = 1` at any boundary point.
    pub fn unit_circle() -> Self {
        Self { m: 0, t0: 1.0.into(), p_norm_sq: 1.0, beta_of_p: 1.0.into() }
    }

    /// Unit sphere in `C^{m+1}`; `t0 = 1` and `‖P‖ = 1` at every boundary point.
    pub fn unit_sphere(m: usize) -> Self {
        Self { m, t0: 1.0.into(), p_norm_sq: 1.0, beta_of_p: 1.0.into() }
    }

    fn t0_p_sq(&self) -> Complex64 {
        self.t0 * self.t0 * self.p_norm_sq
    }
}

fn real_part_checked(v: Complex64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-10 * v.re.abs() {
        return Err(Error::Accuracy(format!(
            "{what} has imaginary residue {:e} against real part {:e}",
            v.im, v.re
        )));
    }
    Ok(v.re)
}

/// Limit density `D^∞(u) = ((t0‖P‖)²/π) (log F_m)″(β(u) + β̄(u))`.
pub fn density_limit(geom: &LimitGeometry, beta_u: Complex64) -> Result<f64> {
    let s = Complex64::new(2.0 * beta_u.re, 0.0);
    let v = geom.t0_p_sq() * log_f_dd(geom.m, s)? / PI;
    real_part_checked(v, "limit density")
}

/// Limit pair correlation, raw and normalized by the one-point densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLimit {
    pub k_inf: f64,
    pub k_tilde_inf: f64,
}

pub fn pair_limit(geom: &LimitGeometry, beta_u: Complex64) -> Result<PairLimit> {
    let m = geom.m;
    let q = q_matrix(m, beta_u)?;
    let g = g_matrix(m, beta_u)?;
    let ratio = perm2(&q) / g.det();
    let pre = geom.t0_p_sq();
    let k_inf = real_part_checked(pre * pre * ratio / (PI * PI), "K^∞")?;
    let dd_u = log_f_dd(m, Complex64::new(2.0 * beta_u.re, 0.0))?;
    let dd_0 = log_f_dd(m, Complex64::new(0.0, 0.0))?;
    let k_tilde_inf = real_part_checked(ratio / (dd_u * dd_0), "normalized K^∞")?;
    Ok(PairLimit { k_inf, k_tilde_inf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn f_at_zero_is_reciprocal_order() {
        for m in 0..=64 {
            let v = eval_f(m, c(0.0, 0.0)).unwrap();
            assert_eq!(v, c(1.0 / (m as f64 + 1.0), 0.0));
        }
        assert_eq!(eval_f(3, c(0.0, 0.0)).unwrap().re, 0.25);
    }

    #[test]
    fn f_small_closed_forms() {
        assert!((eval_f(1, c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!((eval_f(0, c(1.0, 0.0)).unwrap() - c(E - 1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn f_rejects_non_finite() {
        assert!(matches!(eval_f(0, c(f64::NAN, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(eval_f(2, c(0.0, f64::INFINITY)), Err(Error::Domain(_))));
        assert!(matches!(eval_f(MAX_ORDER + 1, c(0.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn log_f_dd_series_values() {
        assert!((log_f_dd(0, c(0.0, 0.0)).unwrap().re - 1.0 / 12.0).abs() < 1e-15);
        assert!((log_f_dd(1, c(0.0, 0.0)).unwrap().re - 1.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn g_matrix_at_origin_is_singular() {
        let g = g_matrix(0, c(0.0, 0.0)).unwrap();
        assert_eq!(g, Mat2::from_real(1.0, 1.0, 1.0, 1.0));
        assert_eq!(g.det(), c(0.0, 0.0));
    }

    #[test]
    fn g_matrix_closed_form_order_zero() {
        let g = g_matrix(0, c(1.0, 0.0)).unwrap();
        let want = Mat2::from_real((E * E - 1.0) / 2.0, E - 1.0, E - 1.0, 1.0);
        for (a, b) in [(g.a11, want.a11), (g.a12, want.a12), (g.a21, want.a21), (g.a22, want.a22)] {
            assert!((a - b).norm() < 1e-14 * b.norm());
        }
    }

    #[test]
    fn g_matrix_imaginary_argument() {
        for m in 0..4 {
            let g = g_matrix(m, c(0.0, 2.5)).unwrap();
            let inv = 1.0 / (m as f64 + 1.0);
            assert_eq!(g.a11, c(inv, 0.0));
            assert_eq!(g.a22, c(inv, 0.0));
            assert_eq!(g.a12, g.a21.conj());
        }
    }

    #[test]
    fn q_matrix_real_and_hermitian() {
        let q = q_matrix(0, c(1.3, 0.0)).unwrap();
        for v in [q.a11, q.a12, q.a21, q.a22] {
            assert_eq!(v.im, 0.0);
        }
        let q = q_matrix(1, c(0.5, 0.0)).unwrap();
        assert!((q.a21 - q.a12.conj()).norm() < 1e-14);
        let q = q_matrix(1, c(0.3, 1.7)).unwrap();
        assert!((q.a21 - q.a12.conj()).norm() < 1e-12 * q.a12.norm().max(1e-3));
        assert!(q.a11.im.abs() < 1e-14 && q.a22.im.abs() < 1e-14);
    }

    #[test]
    fn q_matrix_rejects_tangential() {
        assert!(matches!(q_matrix(1, c(1e-9, 0.0)), Err(Error::DegenerateDirection { .. })));
    }

    #[test]
    fn perm2_examples() {
        assert_eq!(perm2(&Mat2::identity()), c(1.0, 0.0));
        assert_eq!(perm2(&Mat2::from_real(1.0, 2.0, 3.0, 4.0)), c(10.0, 0.0));
        assert_eq!(perm2(&Mat2::from_real(2.5, 0.0, 0.0, -3.0)), c(-7.5, 0.0));
    }

    #[test]
    fn density_limit_circle_and_sphere() {
        let d = density_limit(&LimitGeometry::unit_circle(), c(0.0, 0.0)).unwrap();
        assert!((d - 1.0 / (12.0 * PI)).abs() < 1e-15);
        let d = density_limit(&LimitGeometry::unit_sphere(1), c(0.0, 0.0)).unwrap();
        assert!((d - 1.0 / (18.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn density_limit_depends_on_real_part_only() {
        let g = LimitGeometry::unit_sphere(1);
        let a = density_limit(&g, c(0.7, -3.0)).unwrap();
        let b = density_limit(&g, c(0.7, 11.0)).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
    }

    #[test]
    fn limit_geometry_checks_beta_of_p() {
        assert!(LimitGeometry::new(1, c(0.5, 0.0), 4.0, c(2.0, 0.0)).is_ok());
        assert!(LimitGeometry::new(1, c(0.5, 0.0), 4.0, c(2.1, 0.0)).is_err());
    }

    #[test]
    fn pair_limit_rejects_tangential() {
        assert!(pair_limit(&LimitGeometry::unit_sphere(1), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn pair_limit_normal_direction_values() {
        // 50-digit evaluations of the same closed form with quadrature for F_m.
        let g = LimitGeometry::unit_sphere(1);
        for (lam, want) in [(1.0, 0.00921513429946), (20.0, 0.886765333749), (50.0, 0.979296288267)] {
            let got = pair_limit(&g, c(lam, 0.0)).unwrap().k_tilde_inf;
            assert!((got - want).abs() < 1e-9 * want.max(1e-3), "λ={lam}: {got}");
        }
    }
}
