//! Partial Szegő kernel `S_N(z, w) = Σ_{|J|≤N} z^J w̄^J / n_J` and its first
//! and mixed second derivatives.

use num_complex::Complex64;

use super::norms::NormTable;
use crate::error::{Error, Result};
use crate::geometry::{beta, GeometryJet};
use crate::limits::eval_f;

const LOG_MODE_DEGREE: usize = 500;
const LOG_MODE_MODULUS: f64 = 1.5;

/// Kernel value and derivatives at one `(z, w)`.
///
/// Stored values equal the true values times `e^{-log_scale}`; `log_scale` is
/// zero unless the overflow guard switched to log-magnitude evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelJet {
    pub s: Complex64,
    /// `∂S/∂w̄_j`.
    pub ds_w: Vec<Complex64>,
    /// `∂S/∂z_i`.
    pub ds_z: Vec<Complex64>,
    /// `∂²S/∂z_i∂w̄_j`, row-major with `i` the row.
    pub d2s: Vec<Complex64>,
    pub log_scale: f64,
}

impl KernelJet {
    pub fn dim(&self) -> usize {
        self.ds_w.len()
    }

    pub fn d2(&self, i: usize, j: usize) -> Complex64 {
        self.d2s[i * self.dim() + j]
    }

    /// Multiplies stored values by `e^{log_scale − target}` so the jet reads
    /// in units of `e^{target}`.
    pub fn rescale_to(&mut self, target: f64) {
        let f = (self.log_scale - target).exp();
        self.s *= f;
        self.ds_w.iter_mut().for_each(|v| *v *= f);
        self.ds_z.iter_mut().for_each(|v| *v *= f);
        self.d2s.iter_mut().for_each(|v| *v *= f);
        self.log_scale = target;
    }
}

/// Jet at the table's top degree.
pub fn kernel_jet(table: &NormTable, z: &[Complex64], w: &[Complex64]) -> Result<KernelJet> {
    kernel_jet_at_degree(table, table.degree(), z, w)
}

/// Jet of `S_n` for `n ≤ table.degree()`.
///
/// Powers come from per-coordinate tables built once, so the sum costs
/// `O(#indices)` for fixed dimension.
pub fn kernel_jet_at_degree(
    table: &NormTable,
    n: usize,
    z: &[Complex64],
    w: &[Complex64],
) -> Result<KernelJet> {
    let dim = table.dim();
    if z.len() != dim || w.len() != dim {
        return Err(Error::InvalidInput(format!(
            "kernel arguments need {dim} coordinates, got {} and {}",
            z.len(),
            w.len()
        )));
    }
    if n > table.degree() {
        return Err(Error::InvalidInput(format!(
            "degree {n} exceeds the norm table's degree {}",
            table.degree()
        )));
    }
    if z.iter().chain(w).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::InvalidInput("kernel arguments must be finite".into()));
    }
    let max_mod = z.iter().chain(w).map(|c| c.norm()).fold(0.0, f64::max);
    let log_mode = n > LOG_MODE_DEGREE && max_mod > LOG_MODE_MODULUS;

    // In log mode each coordinate is split as z_i = e^{a_i} ẑ_i with |ẑ_i| = 1
    // and the magnitudes are folded into the per-index weight.
    let split = |c: Complex64| -> (f64, Complex64) {
        if log_mode && c.norm() > 0.0 {
            let a = c.norm().ln();
            (a, c / c.norm())
        } else {
            (0.0, c)
        }
    };
    let (za, zu): (Vec<f64>, Vec<Complex64>) = z.iter().map(|c| split(*c)).unzip();
    let (wa, wu): (Vec<f64>, Vec<Complex64>) = w.iter().map(|c| split(*c)).unzip();

    let powers = |base: Complex64| -> Vec<Complex64> {
        let mut p = Vec::with_capacity(n + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=n {
            p.push(acc);
            acc *= base;
        }
        p
    };
    let pz: Vec<Vec<Complex64>> = zu.iter().map(|c| powers(*c)).collect();
    let pw: Vec<Vec<Complex64>> = wu.iter().map(|c| powers(c.conj())).collect();

    let count = table.prefix_len(n);
    let weights: Vec<f64>;
    let log_scale;
    if log_mode {
        let lw: Vec<f64> = (0..count)
            .map(|k| {
                let j = table.exponent(k);
                let mut v = -table.ln_norms()[k];
                for i in 0..dim {
                    if j[i] > 0 {
                        v += j[i] as f64 * (za[i] + wa[i]);
                    }
                }
                v
            })
            .collect();
        log_scale = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        weights = lw.iter().map(|v| (v - log_scale).exp()).collect();
    } else {
        log_scale = 0.0;
        weights = table.norms()[..count].iter().map(|n| 1.0 / n).collect();
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut s = zero;
    let mut ds_w = vec![zero; dim];
    let mut ds_z = vec![zero; dim];
    let mut d2s = vec![zero; dim * dim];
    let mut full = vec![zero; dim];
    let mut dz = vec![zero; dim];
    let mut dw = vec![zero; dim];

    for (k, &wt) in weights.iter().enumerate() {
        let j = table.exponent(k);
        for i in 0..dim {
            let e = j[i] as usize;
            full[i] = pz[i][e] * pw[i][e];
            if e > 0 {
                let f = e as f64;
                dz[i] = pz[i][e - 1] * pw[i][e] * f;
                dw[i] = pz[i][e] * pw[i][e - 1] * f;
            } else {
                dz[i] = zero;
                dw[i] = zero;
            }
        }
        let prod = full.iter().fold(Complex64::new(wt, 0.0), |a, b| a * b);
        s += prod;
        for a in 0..dim {
            let mut rest = Complex64::new(wt, 0.0);
            for (b, f) in full.iter().enumerate() {
                if b != a {
                    rest *= f;
                }
            }
            ds_z[a] += rest * dz[a];
            ds_w[a] += rest * dw[a];
            if j[a] > 0 {
                let e = j[a] as usize;
                d2s[a * dim + a] += rest * pz[a][e - 1] * pw[a][e - 1] * (e * e) as f64;
            }
            for c in 0..dim {
                if c == a || j[a] == 0 || j[c] == 0 {
                    continue;
                }
                let mut rest2 = Complex64::new(wt, 0.0);
                for (b, f) in full.iter().enumerate() {
                    if b != a && b != c {
                        rest2 *= f;
                    }
                }
                d2s[a * dim + c] += rest2 * dz[a] * dw[c];
            }
        }
    }

    if log_mode {
        for i in 0..dim {
            ds_z[i] *= (-za[i]).exp();
            ds_w[i] *= (-wa[i]).exp();
            for c in 0..dim {
                d2s[i * dim + c] *= (-za[i] - wa[c]).exp();
            }
        }
    }
    Ok(KernelJet { s, ds_w, ds_z, d2s, log_scale })
}

fn offset(z: &[Complex64], u: &[Complex64], n: usize) -> Vec<Complex64> {
    z.iter().zip(u).map(|(a, b)| a + b / n as f64).collect()
}

/// `S_N(z + u/N, z + v/N) / S_N(z, z)`.
///
/// The unknown boundary constant cancels, so this tends to
/// [`scaled_ratio_limit`] as `N → ∞`.
pub fn scaled_ratio(
    table: &NormTable,
    z: &[Complex64],
    u: &[Complex64],
    v: &[Complex64],
    n: usize,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidInput("scaled ratio needs N ≥ 1".into()));
    }
    if u.len() != z.len() || v.len() != z.len() {
        return Err(Error::InvalidInput("u and v must match the dimension of z".into()));
    }
    let num = kernel_jet_at_degree(table, n, &offset(z, u, n), &offset(z, v, n))?;
    let den = kernel_jet_at_degree(table, n, z, z)?;
    Ok(num.s / den.s * (num.log_scale - den.log_scale).exp())
}

/// `F_m(β(u) + β̄(v)) / F_m(0)`.
pub fn scaled_ratio_limit(jet: &GeometryJet, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    let m = jet.m();
    let arg = beta(jet, u) + beta(jet, v).conj();
    Ok(eval_f(m, arg)? / eval_f(m, Complex64::new(0.0, 0.0))?)
}

/// `S_N(z, z) / N^{m+1}` at the table's top degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalConstant {
    pub c_hat: f64,
    pub n_used: usize,
}

pub fn empirical_constant(table: &NormTable, z: &[Complex64]) -> Result<EmpiricalConstant> {
    empirical_constant_at_degree(table, table.degree(), z)
}

pub fn empirical_constant_at_degree(
    table: &NormTable,
    n: usize,
    z: &[Complex64],
) -> Result<EmpiricalConstant> {
    if n < 50 {
        return Err(Error::InvalidInput(format!("empirical constant needs degree ≥ 50, got {n}")));
    }
    let jet = kernel_jet_at_degree(table, n, z, z)?;
    let ln_c = jet.s.re.ln() + jet.log_scale - (table.m() as f64 + 1.0) * (n as f64).ln();
    Ok(EmpiricalConstant { c_hat: ln_c.exp(), n_used: n })
}
