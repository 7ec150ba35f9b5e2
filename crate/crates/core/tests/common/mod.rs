//! Reference computations used only by tests. Nothing here calls into the
//! library's own quadrature or special-function code.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1] via Newton on `P_n` started
/// from Tricomi's approximation.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let theta = PI * (4.0 * i as f64 - 1.0) / (4.0 * n as f64 + 2.0);
        let mut x = (1.0 - (n as f64 - 1.0) / (8.0 * (n as f64).powi(3))) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` panels of `order` nodes.
pub fn integrate<F: Fn(f64) -> Complex64>(a: f64, b: f64, panels: usize, order: usize, f: F) -> Complex64 {
    let nodes = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        let (c, r) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for &(x, w) in &nodes {
            acc += f(c + r * x) * (w * r);
        }
    }
    acc
}

/// `∫₀¹ e^{ty} yᵐ dy` by brute-force quadrature.
pub fn f_oracle(m: usize, t: Complex64) -> Complex64 {
    integrate(0.0, 1.0, 32, 40, |y| (t * y).exp() * y.powi(m as i32))
}

/// `(log F_m)″(s)` from quadrature values of `F_m, F_{m+1}, F_{m+2}`.
pub fn log_f_dd_oracle(m: usize, s: Complex64) -> Complex64 {
    let (f0, f1, f2) = (f_oracle(m, s), f_oracle(m + 1, s), f_oracle(m + 2, s));
    (f2 * f0 - f1 * f1) / (f0 * f0)
}

/// `∫_{S³} |z₀|^{2a} |z₁|^{2b} dσ = 4π² ∫₀^{π/2} cos^{2a+1} sin^{2b+1}`.
pub fn sphere3_norm_oracle(a: u32, b: u32) -> f64 {
    let v = integrate(0.0, PI / 2.0, 16, 48, |t| {
        Complex64::new(t.cos().powi(2 * a as i32 + 1) * t.sin().powi(2 * b as i32 + 1), 0.0)
    });
    4.0 * PI * PI * v.re
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
