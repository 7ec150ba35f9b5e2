//! Monomial norm tables.
//!
//! The boundary measure is torus invariant, so distinct monomials are
//! orthogonal and the inner product is fully described by the diagonal
//! `n_J = ∫ |z^J|² dμ`. Writing `z_i = r_i e^{iθ_i}`, surface measure splits as
//! `dσ_Σ(r) Π r_i dθ_i` where `Σ` is the boundary in modulus space, hence
//! `n_J = (2π)^{m+1} ∫_Σ Π r_i^{2J_i+1} dσ_Σ(r)`.

use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::indices::{enumerate_flat, index_count};
use crate::error::{Error, Result};
use crate::geometry::{radial_scale, ProfileKind, RadialProfile};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_QUAD_ORDER: usize = 256;
const MAX_QUAD_ORDER: usize = 16384;
const QUAD_REL_GATE: f64 = 1e-9;

/// Positive radial weight multiplying surface measure, as a function of the
/// moduli `r_i`.
pub type RadialWeight = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Monomial norms `n_J` for all `|J| ≤ N`, in graded-lex order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTable {
    m: usize,
    degree: usize,
    exponents: Vec<u32>,
    norms: Vec<f64>,
    ln_norms: Vec<f64>,
    measure_tag: String,
}

impl NormTable {
    /// Wraps precomputed norms; `norms` must follow the graded-lex order.
    pub fn from_norms(m: usize, degree: usize, measure_tag: &str, norms: Vec<f64>) -> Result<Self> {
        if measure_tag.contains('\n') {
            return Err(Error::InvalidInput("measure tag must be a single line".into()));
        }
        let exponents = enumerate_flat(m, degree)?;
        if exponents.len() != norms.len() * (m + 1) {
            return Err(Error::InvalidInput(format!(
                "expected {} norms for m = {m}, N = {degree}, got {}",
                exponents.len() / (m + 1),
                norms.len()
            )));
        }
        if let Some(bad) = norms.iter().position(|n| !(n.is_normal() && *n > 0.0)) {
            return Err(Error::Accuracy(format!(
                "norm #{bad} = {:e} is not a positive normal float",
                norms[bad]
            )));
        }
        let ln_norms = norms.iter().map(|n| n.ln()).collect();
        Ok(Self { m, degree, exponents, norms, ln_norms, measure_tag: measure_tag.to_string() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    /// Top degree `N`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn measure_tag(&self) -> &str {
        &self.measure_tag
    }

    /// `n_0`, the mass of the measure.
    pub fn total_mass(&self) -> f64 {
        self.norms[0]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn ln_norms(&self) -> &[f64] {
        &self.ln_norms
    }

    pub fn exponent(&self, k: usize) -> &[u32] {
        let d = self.dim();
        &self.exponents[k * d..(k + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.exponents.chunks_exact(self.dim()).zip(self.norms.iter().copied())
    }

    /// `n_J`, if `J` is in the table.
    pub fn norm(&self, j: &[u32]) -> Option<f64> {
        if j.len() != self.dim() || j.iter().map(|&v| v as usize).sum::<usize>() > self.degree {
            return None;
        }
        Some(self.norms[super::indices::graded_lex_rank(j)])
    }

    /// Number of leading entries with degree ≤ `n`.
    pub fn prefix_len(&self, n: usize) -> usize {
        index_count(self.m, n.min(self.degree)).unwrap() as usize
    }

    /// Same table with every norm multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_norms(
            self.m,
            self.degree,
            &format!("{};scaled:{c}", self.measure_tag),
            self.norms.iter().map(|n| n * c).collect(),
        )
    }

    /// Text format: `#m=`, `#N=`, `#measure=`, `#order=graded-lex` headers,
    /// then one `j0,...,jm<TAB>n_J` line per index with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(32 * self.len() + 64);
        let _ = writeln!(s, "#m={}", self.m);
        let _ = writeln!(s, "#N={}", self.degree);
        let _ = writeln!(s, "#measure={}", self.measure_tag);
        let _ = writeln!(s, "#order=graded-lex");
        for (j, n) in self.iter() {
            let idx: Vec<String> = j.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}\t{:.16e}", idx.join(","), n);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m: Option<usize> = None;
        let mut degree: Option<usize> = None;
        let mut measure: Option<String> = None;
        let mut order_ok = false;
        let mut rows: Vec<(Vec<u32>, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            if let Some(h) = line.strip_prefix('#') {
                let (key, val) = h.split_once('=').ok_or_else(|| bad("malformed header"))?;
                match key {
                    "m" => m = Some(val.parse().map_err(|_| bad("bad m"))?),
                    "N" => degree = Some(val.parse().map_err(|_| bad("bad N"))?),
                    "measure" => measure = Some(val.to_string()),
                    "order" => {
                        if val != "graded-lex" {
                            return Err(bad("unsupported index order"));
                        }
                        order_ok = true;
                    }
                    _ => return Err(bad("unknown header")),
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (idx, val) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let j = idx
                .split(',')
                .map(|v| v.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("bad exponent"))?;
            let n: f64 = val.parse().map_err(|_| bad("bad norm"))?;
            rows.push((j, n));
        }
        let (m, degree, measure) = match (m, degree, measure) {
            (Some(m), Some(d), Some(meas)) if order_ok => (m, d, meas),
            _ => return Err(Error::Parse("missing #m, #N, #measure or #order header".into())),
        };
        let expected = enumerate_flat(m, degree)?;
        if expected.len() != rows.len() * (m + 1) {
            return Err(Error::Parse(format!(
                "expected {} entries, found {}",
                expected.len() / (m + 1),
                rows.len()
            )));
        }
        for (k, (j, _)) in rows.iter().enumerate() {
            if j.as_slice() != &expected[k * (m + 1)..(k + 1) * (m + 1)] {
                return Err(Error::Parse(format!("entry {k} is out of graded-lex order")));
            }
        }
        Self::from_norms(m, degree, &measure, rows.into_iter().map(|(_, n)| n).collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Norm table for the profile's boundary measure.
///
/// Circle and sphere use closed forms; other `m = 0` profiles are round
/// circles with arclength measure; other `m = 1` profiles are integrated.
pub fn compute_norms(profile: &RadialProfile, n: usize, quad_order: usize) -> Result<NormTable> {
    if quad_order == 0 {
        return Err(Error::InvalidInput("quadrature order must be ≥ 1".into()));
    }
    let m = profile.m();
    let tag = profile.measure_tag();
    match profile.kind() {
        ProfileKind::Circle => NormTable::from_norms(0, n, &tag, vec![1.0; n + 1]),
        ProfileKind::Sphere => sphere_norms(m, n),
        _ if m == 0 => {
            let r = radial_scale(profile, &[1.0])?;
            let norms = (0..=n).map(|k| 2.0 * PI * r.powi(2 * k as i32 + 1)).collect();
            NormTable::from_norms(0, n, &tag, norms)
        }
        _ if m == 1 => {
            let norms = curve_norms_converged(profile, n, quad_order, None)?;
            NormTable::from_norms(1, n, &tag, norms)
        }
        _ => Err(Error::InvalidInput(format!(
            "norms for {} need m ≤ 1 (only spheres are supported in higher dimension)",
            tag
        ))),
    }
}

/// Norms for surface measure times a radial weight, `m = 1` only.
pub fn compute_norms_weighted(
    profile: &RadialProfile,
    n: usize,
    quad_order: usize,
    weight: &RadialWeight,
    weight_name: &str,
) -> Result<NormTable> {
    if profile.m() != 1 {
        return Err(Error::InvalidInput("weighted norms are implemented for m = 1".into()));
    }
    let norms = curve_norms_converged(profile, n, quad_order, Some(weight))?;
    NormTable::from_norms(1, n, &format!("{};weight:{weight_name}", profile.measure_tag()), norms)
}

/// Closed form `∫_{S^{2m+1}} |z^J|² dσ = 2π^{m+1} J! / (m + |J|)!`.
pub fn sphere_norms(m: usize, n: usize) -> Result<NormTable> {
    let flat = enumerate_flat(m, n)?;
    let dim = m + 1;
    let mut ln_fact = vec![0.0f64; n + m + 2];
    for k in 1..ln_fact.len() {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_pre = (2.0f64).ln() + (m as f64 + 1.0) * PI.ln();
    let norms = flat
        .chunks_exact(dim)
        .map(|j| {
            let deg: usize = j.iter().map(|&v| v as usize).sum();
            let num: f64 = j.iter().map(|&v| ln_fact[v as usize]).sum();
            (ln_pre + num - ln_fact[deg + m]).exp()
        })
        .collect();
    NormTable::from_norms(m, n, &RadialProfile::sphere(m).measure_tag(), norms)
}

/// Quadrature route for every supported profile; for the circle and sphere
/// this is the independent check on the closed forms.
pub fn quadrature_norms(profile: &RadialProfile, n: usize, quad_order: usize) -> Result<Vec<f64>> {
    if quad_order == 0 {
        return Err(Error::InvalidInput("quadrature order must be ≥ 1".into()));
    }
    match profile.m() {
        0 => {
            // Integrate |z^k|² over the circle of radius r in θ.
            let r = radial_scale(profile, &[1.0])?;
            let gl = GaussLegendre::new(quad_order);
            let circle_measure = profile.is_circle();
            Ok((0..=n)
                .map(|k| {
                    let integral = gl.integrate(0.0, 2.0 * PI, |th| {
                        let z = num_complex::Complex64::from_polar(r, th);
                        z.powu(k as u32).norm_sqr()
                    });
                    if circle_measure {
                        integral / (2.0 * PI)
                    } else {
                        integral * r
                    }
                })
                .collect())
        }
        1 => curve_norms(profile, n, quad_order, None),
        _ => Err(Error::InvalidInput("quadrature norms need m ≤ 1".into())),
    }
}

fn curve_norms_converged(
    profile: &RadialProfile,
    n: usize,
    quad_order: usize,
    weight: Option<&RadialWeight>,
) -> Result<Vec<f64>> {
    let mut order = quad_order.max(8);
    let mut coarse = curve_norms(profile, n, order, weight)?;
    loop {
        let next = order * 2;
        if next > MAX_QUAD_ORDER {
            return Err(Error::Accuracy(format!(
                "norm quadrature did not converge below order {MAX_QUAD_ORDER}"
            )));
        }
        let fine = curve_norms(profile, n, next, weight)?;
        let worst = coarse.iter().zip(&fine).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
        if worst <= QUAD_REL_GATE {
            return Ok(fine);
        }
        coarse = fine;
        order = next;
    }
}

/// Boundary curve of an `m = 1` profile in modulus space, sampled at
/// Gauss–Legendre nodes in the polar angle `φ ∈ (0, π/2)`.
struct CurveSample {
    ln_r0: f64,
    ln_r1: f64,
    ln_weight: f64,
}

fn curve_samples(
    profile: &RadialProfile,
    quad_order: usize,
    weight: Option<&RadialWeight>,
) -> Result<Vec<CurveSample>> {
    let gl = GaussLegendre::new(quad_order);
    let mut out = Vec::with_capacity(quad_order);
    for (phi, w) in gl.mapped(0.0, PI / 2.0) {
        let (sn, cs) = phi.sin_cos();
        let radius = radial_scale(profile, &[cs * cs, sn * sn])?;
        let s = [radius * radius * cs * cs, radius * radius * sn * sn];
        let g = profile.grad_hat(&s);
        let denom = g[0] * cs * cs + g[1] * sn * sn;
        if !(denom > 0.0) {
            return Err(Error::Accuracy(format!("profile gradient degenerates at φ = {phi}")));
        }
        // Implicit differentiation of ρ̂(R² cos²φ, R² sin²φ) = 0.
        let d_radius = -radius * cs * sn * (g[1] - g[0]) / denom;
        let arc = (radius * radius + d_radius * d_radius).sqrt();
        let (r0, r1) = (radius * cs, radius * sn);
        let extra = weight.map_or(1.0, |wf| wf(&[r0, r1]));
        if !(extra > 0.0 && extra.is_finite()) {
            return Err(Error::InvalidInput("radial weight must be positive and finite".into()));
        }
        out.push(CurveSample {
            ln_r0: r0.ln(),
            ln_r1: r1.ln(),
            ln_weight: (w * arc * extra).ln() + 2.0 * (2.0 * PI).ln(),
        });
    }
    Ok(out)
}

fn curve_norms(
    profile: &RadialProfile,
    n: usize,
    quad_order: usize,
    weight: Option<&RadialWeight>,
) -> Result<Vec<f64>> {
    let samples = curve_samples(profile, quad_order, weight)?;
    let flat = enumerate_flat(1, n)?;
    let norms: Vec<f64> = flat
        .par_chunks_exact(2)
        .map(|j| {
            let e0 = 2.0 * j[0] as f64 + 1.0;
            let e1 = 2.0 * j[1] as f64 + 1.0;
            // log-sum-exp over nodes
            let logs: Vec<f64> = samples.iter().map(|s| s.ln_weight + e0 * s.ln_r0 + e1 * s.ln_r1).collect();
            let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            top.exp() * logs.iter().map(|l| (l - top).exp()).sum::<f64>()
        })
        .collect();
    Ok(norms)
}
