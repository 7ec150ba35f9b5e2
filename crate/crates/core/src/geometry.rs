//! Complete Reinhardt domain geometry.
//!
//! A profile is a defining function written in squared moduli,
//! `ρ(z) = ρ̂(|z₀|², …, |z_m|²)`, so torus invariance holds by construction.
//! The chain rule `∂ρ/∂z_i = ρ̂_i z̄_i` is applied in exactly one place,
//! [`geometry_jet`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits::LimitGeometry;

/// Absolute tolerance on `|ρ(z)|` for a point to count as on the boundary.
pub const ON_BOUNDARY_TOL: f64 = 1e-10;
/// Coordinates smaller than this count as zero.
pub const ZERO_COORD_TOL: f64 = 1e-12;

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// User-supplied profile with analytic first and second partials.
#[derive(Clone)]
pub struct CustomProfile {
    pub name: String,
    pub rho_hat: Arc<ScalarFn>,
    pub grad_hat: Arc<VectorFn>,
    /// Row-major `(m+1)×(m+1)` Hessian of `ρ̂`.
    pub hess_hat: Arc<VectorFn>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `|z|² = 1` with the normalized measure `dθ/2π`.
    Circle,
    /// Unit sphere `Σ|z_i|² = 1` with surface measure.
    Sphere,
    /// `Σ a_i |z_i|² = 1`.
    Ellipsoid(Vec<f64>),
    /// `Σ |z_i|^{2p_i} = 1`.
    PowerEllipsoid(Vec<f64>),
    Custom(CustomProfile),
}

/// Defining function of a complete Reinhardt domain in squared-moduli coordinates.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    kind: ProfileKind,
    m: usize,
}

impl RadialProfile {
    pub fn circle() -> Self {
        Self { kind: ProfileKind::Circle, m: 0 }
    }

    /// Unit sphere in `C^{m+1}`.
    pub fn sphere(m: usize) -> Self {
        Self { kind: ProfileKind::Sphere, m }
    }

    pub fn ellipsoid(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "ellipsoid coefficients must be positive and finite, got {coeffs:?}"
            )));
        }
        let m = coeffs.len() - 1;
        Ok(Self { kind: ProfileKind::Ellipsoid(coeffs), m })
    }

    pub fn power_ellipsoid(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() || exponents.iter().any(|p| !(p.is_finite() && *p >= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "power-ellipsoid exponents must be finite and ≥ 1, got {exponents:?}"
            )));
        }
        let m = exponents.len() - 1;
        Ok(Self { kind: ProfileKind::PowerEllipsoid(exponents), m })
    }

    /// Admits a user profile after checking `ρ̂(0) < 0` and strict
    /// pseudoconvexity at `working_point`.
    pub fn custom(m: usize, custom: CustomProfile, working_point: &[Complex64]) -> Result<Self> {
        let profile = Self { kind: ProfileKind::Custom(custom), m };
        if profile.rho_hat(&vec![0.0; m + 1]) >= 0.0 {
            return Err(Error::InvalidInput("custom profile must satisfy ρ̂(0) < 0".into()));
        }
        let point = BoundaryPoint::project(&profile, working_point)?;
        let eig = levi_min_eig(&profile, &point);
        if eig <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "custom profile is not strictly pseudoconvex at the working point (min eig {eig:e})"
            )));
        }
        Ok(profile)
    }

    /// Parses `circle`, `sphere`, `sphere:<dim>`, `ellipsoid:a0,a1,...` or
    /// `pellipsoid:p0,p1,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, tail) = match spec.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (spec, None),
        };
        let numbers = |t: &str| -> Result<Vec<f64>> {
            t.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number '{s}' in profile '{spec}'")))
                })
                .collect()
        };
        match (head, tail) {
            ("circle", None) => Ok(Self::circle()),
            ("sphere", None) => Ok(Self::sphere(1)),
            ("sphere", Some(t)) => {
                let dim: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sphere dimension in '{spec}'")))?;
                if dim == 0 {
                    return Err(Error::Parse("sphere dimension must be ≥ 1".into()));
                }
                Ok(Self::sphere(dim - 1))
            }
            ("ellipsoid", Some(t)) => Self::ellipsoid(numbers(t)?),
            ("pellipsoid", Some(t)) => Self::power_ellipsoid(numbers(t)?),
            _ => Err(Error::Parse(format!(
                "unknown profile '{spec}' (expected circle, sphere[:dim], ellipsoid:a0,..., pellipsoid:p0,...)"
            ))),
        }
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Number of coordinates minus one.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.kind, ProfileKind::Circle)
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.kind, ProfileKind::Sphere)
    }

    /// Short description of the boundary measure used for norms.
    pub fn measure_tag(&self) -> String {
        match &self.kind {
            ProfileKind::Circle => "circle;dtheta/2pi".to_string(),
            ProfileKind::Sphere => format!("sphere:{};surface", self.dim()),
            ProfileKind::Ellipsoid(a) => format!("ellipsoid:{};surface", join(a)),
            ProfileKind::PowerEllipsoid(p) => format!("pellipsoid:{};surface", join(p)),
            ProfileKind::Custom(c) => format!("custom:{};surface", c.name),
        }
    }

    pub fn rho_hat(&self, s: &[f64]) -> f64 {
        match &self.kind {
            ProfileKind::Circle | ProfileKind::Sphere => s.iter().sum::<f64>() - 1.0,
            ProfileKind::Ellipsoid(a) => a.iter().zip(s).map(|(a, s)| a * s).sum::<f64>() - 1.0,
            ProfileKind::PowerEllipsoid(p) => p.iter().zip(s).map(|(p, s)| s.powf(*p)).sum::<f64>() - 1.0,
            ProfileKind::Custom(c) => (c.rho_hat)(s),
        }
    }

    pub fn grad_hat(&self, s: &[f64]) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Circle | ProfileKind::Sphere => vec![1.0; self.dim()],
            ProfileKind::Ellipsoid(a) => a.clone(),
            ProfileKind::PowerEllipsoid(p) => {
                p.iter().zip(s).map(|(p, s)| if *p == 1.0 { 1.0 } else { p * s.powf(p - 1.0) }).collect()
            }
            ProfileKind::Custom(c) => (c.grad_hat)(s),
        }
    }

    /// Row-major Hessian of `ρ̂`.
    pub fn hess_hat(&self, s: &[f64]) -> Vec<f64> {
        let n = self.dim();
        match &self.kind {
            ProfileKind::Circle | ProfileKind::Sphere | ProfileKind::Ellipsoid(_) => {
                vec![0.0; n * n]
            }
            ProfileKind::PowerEllipsoid(p) => {
                let mut h = vec![0.0; n * n];
                for (i, (p, s)) in p.iter().zip(s).enumerate() {
                    h[i * n + i] = if *p == 1.0 { 0.0 } else { p * (p - 1.0) * s.powf(p - 2.0) };
                }
                h
            }
            ProfileKind::Custom(c) => (c.hess_hat)(s),
        }
    }

    pub fn rho(&self, z: &[Complex64]) -> f64 {
        self.rho_hat(&squared_moduli(z))
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn squared_moduli(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|c| c.norm_sqr()).collect()
}

/// A point of the boundary `ρ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    z: Vec<Complex64>,
    moduli: Vec<f64>,
}

impl BoundaryPoint {
    /// Accepts `z` as given; it must already satisfy `|ρ(z)| ≤ 1e-10`.
    pub fn new(profile: &RadialProfile, z: &[Complex64]) -> Result<Self> {
        check_dim(profile, z)?;
        let r = profile.rho(z);
        if !(r.abs() <= ON_BOUNDARY_TOL) {
            return Err(Error::InvalidInput(format!("point is off the boundary: ρ(z) = {r:e}")));
        }
        Self::admit(profile, z.to_vec())
    }

    /// Scales `z` radially onto the boundary.
    pub fn project(profile: &RadialProfile, z: &[Complex64]) -> Result<Self> {
        check_dim(profile, z)?;
        let s = squared_moduli(z);
        if s.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput("cannot project the origin onto the boundary".into()));
        }
        let scale = radial_scale(profile, &s)?;
        let projected: Vec<Complex64> = z.iter().map(|c| c * scale).collect();
        Self::new(profile, &projected)
    }

    fn admit(profile: &RadialProfile, z: Vec<Complex64>) -> Result<Self> {
        let moduli: Vec<f64> = z.iter().map(|c| c.norm()).collect();
        // Sphere norms are closed-form and need no nonzero coordinates.
        if !profile.is_sphere() && moduli.iter().any(|&r| r < ZERO_COORD_TOL) {
            return Err(Error::DegeneratePoint(
                "boundary points must have all coordinates nonzero for this profile".into(),
            ));
        }
        Ok(Self { z, moduli })
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }
}

/// Scale `t > 0` with `ρ̂(t² s) = 0`, by bisection to 1e-14 relative.
pub(crate) fn radial_scale(profile: &RadialProfile, s: &[f64]) -> Result<f64> {
    let g = |t: f64| profile.rho_hat(&s.iter().map(|v| v * t * t).collect::<Vec<_>>());
    if g(0.0) >= 0.0 {
        return Err(Error::InvalidInput("profile must be negative at the origin".into()));
    }
    let mut hi = 1.0;
    let mut steps = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 200 {
            return Err(Error::InvalidInput("ray from the origin never leaves the domain".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

fn check_dim(profile: &RadialProfile, z: &[Complex64]) -> Result<()> {
    if z.len() != profile.dim() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, profile expects {}",
            z.len(),
            profile.dim()
        )));
    }
    if z.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::InvalidInput("point coordinates must be finite".into()));
    }
    Ok(())
}

/// First-order boundary data at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryJet {
    /// `d′ρ = (∂ρ/∂z_i)`.
    pub d_rho: Vec<Complex64>,
    /// `P = (∂ρ/∂z̄_i)`.
    pub p: Vec<Complex64>,
    /// `1 / (d′ρ·z)`.
    pub t0: Complex64,
    pub p_norm_sq: f64,
}

impl GeometryJet {
    pub fn m(&self) -> usize {
        self.d_rho.len() - 1
    }

    /// Limit-formula view. `β(P)` is evaluated through [`beta`] rather than
    /// taken as `t0‖P‖²`, so the constructor's consistency check has teeth.
    pub fn limit_geometry(&self) -> Result<LimitGeometry> {
        LimitGeometry::new(self.m(), self.t0, self.p_norm_sq, beta(self, &self.p))
    }
}

pub fn geometry_jet(profile: &RadialProfile, point: &BoundaryPoint) -> Result<GeometryJet> {
    let z = point.z();
    let grad = profile.grad_hat(&squared_moduli(z));
    let d_rho: Vec<Complex64> = grad.iter().zip(z).map(|(g, zi)| zi.conj() * *g).collect();
    let p: Vec<Complex64> = grad.iter().zip(z).map(|(g, zi)| zi * *g).collect();
    let dz: Complex64 = d_rho.iter().zip(z).map(|(d, zi)| d * zi).sum();
    if !(dz.norm() >= 1e-12) {
        return Err(Error::DegeneratePoint(format!("d′ρ(z)·z = {dz} is too small")));
    }
    let t0 = 1.0 / dz;
    let p_norm_sq = p.iter().map(|c| c.norm_sqr()).sum();
    if !(t0.re.is_finite() && t0.im.is_finite() && f64::is_finite(p_norm_sq)) {
        return Err(Error::DegeneratePoint("non-finite gradient".into()));
    }
    Ok(GeometryJet { d_rho, p, t0, p_norm_sq })
}

/// `β(u) = (d′ρ·u) / (d′ρ·z)`.
pub fn beta(jet: &GeometryJet, u: &[Complex64]) -> Complex64 {
    jet.d_rho.iter().zip(u).map(|(d, ui)| d * ui).sum::<Complex64>() * jet.t0
}

/// Complex Hessian `∂²ρ/∂z_j∂z̄_k = ρ̂_j δ_jk + ρ̂_jk z̄_j z_k`, row-major.
pub fn complex_hessian(profile: &RadialProfile, z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    let s = squared_moduli(z);
    let g = profile.grad_hat(&s);
    let h = profile.hess_hat(&s);
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let mut v = z[j].conj() * z[k] * h[j * n + k];
            if j == k {
                v += g[j];
            }
            out[j * n + k] = v;
        }
    }
    out
}

/// Smallest eigenvalue of the Levi form on `{v : d′ρ·v = 0}`; `+∞` when `m = 0`.
pub fn levi_min_eig(profile: &RadialProfile, point: &BoundaryPoint) -> f64 {
    let m = profile.m();
    if m == 0 {
        return f64::INFINITY;
    }
    let z = point.z();
    let n = m + 1;
    let s = squared_moduli(z);
    let grad = profile.grad_hat(&s);
    // d′ρ·v = 0  ⇔  v ⟂ P in the Hermitian inner product.
    let p: Vec<Complex64> = grad.iter().zip(z).map(|(g, zi)| zi * *g).collect();
    let basis = orthonormal_complement(&p);
    let hess = complex_hessian(profile, z);

    let mut levi = DMatrix::<Complex64>::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += hess[j * n + k] * basis[a][j] * basis[b][k].conj();
                }
            }
            levi[(a, b)] = acc;
        }
    }
    // The form is Σ M_ab c_a c̄_b; M and Mᵀ share eigenvalues.
    let levi = levi.transpose();
    SymmetricEigen::new(levi).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Orthonormal basis of the Hermitian orthogonal complement of `p`.
fn orthonormal_complement(p: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = p.len();
    let pn = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<Complex64>> = vec![p.iter().map(|c| c / pn).collect()];
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = 1.0.into();
        // Two Gram–Schmidt passes.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = v.iter().zip(b).map(|(vi, bi)| vi * bi.conj()).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.iter().map(|c| c / norm).collect());
        }
    }
    basis.remove(0);
    basis
}
