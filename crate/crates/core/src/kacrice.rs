//! Finite-degree Kac–Rice densities and pair correlations.
//!
//! For the Gaussian field with covariance `S_N`, the value/gradient covariance
//! at a set of points is assembled from kernel jets into blocks `A` (values),
//! `B` (value × conjugate gradient) and `C` (gradients). The conditional
//! gradient covariance given vanishing values is the Schur complement
//! `Λ = C − B* A⁻¹ B`, and
//!
//! * `D_N = tr Λ / (π A)` at one point,
//! * `K_N = (tr Λ¹¹ tr Λ²² + Σ_ij Λ¹²_ij Λ²¹_ji) / (π² det A)` at two points.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{beta, GeometryJet};
use crate::limits::{density_limit, pair_limit, TOL_BETA};
use crate::szego::{kernel_jet_at_degree, KernelJet, NormTable};

/// One-point covariance blocks.
#[derive(Debug, Clone)]
pub struct OnePointBlocks {
    pub a: f64,
    /// `∂S/∂w̄_i` at the point.
    pub b: Vec<Complex64>,
    pub c: DMatrix<Complex64>,
    pub lambda: DMatrix<Complex64>,
    pub log_scale: f64,
}

pub fn one_point_blocks(table: &NormTable, x: &[Complex64], n: usize) -> Result<OnePointBlocks> {
    let jet = kernel_jet_at_degree(table, n, x, x)?;
    let dim = jet.dim();
    let a = jet.s.re;
    let c = DMatrix::from_fn(dim, dim, |i, j| jet.d2(i, j));
    let c_norm = c.norm();
    if !(a > 1e-12 * c_norm) || !(a > 0.0) {
        return Err(Error::Conditioning(format!(
            "kernel diagonal {a:e} is negligible against ‖C‖ = {c_norm:e}"
        )));
    }
    // Cov(∂_i f, f) = ∂S/∂z_i, Cov(f, ∂_j f) = ∂S/∂w̄_j.
    let lambda = DMatrix::from_fn(dim, dim, |i, j| c[(i, j)] - jet.ds_z[i] * jet.ds_w[j] / a);
    Ok(OnePointBlocks { a, b: jet.ds_w, c, lambda, log_scale: jet.log_scale })
}

fn offset(z: &[Complex64], u: &[Complex64], n: usize) -> Vec<Complex64> {
    z.iter().zip(u).map(|(a, b)| a + b / n as f64).collect()
}

fn check_scaling_args(z: &[Complex64], u: &[Complex64], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("degree N must be ≥ 1".into()));
    }
    if z.len() != u.len() {
        return Err(Error::InvalidInput("u must have the dimension of z".into()));
    }
    Ok(())
}

/// Expected zero density `D_N(x) = tr Λ / (π A)` at an arbitrary point.
pub fn density_at(table: &NormTable, x: &[Complex64], n: usize) -> Result<f64> {
    let blocks = one_point_blocks(table, x, n)?;
    let tr_c: f64 = (0..blocks.c.nrows()).map(|i| blocks.c[(i, i)].re).sum();
    let tr: f64 = (0..blocks.lambda.nrows()).map(|i| blocks.lambda[(i, i)].re).sum();
    if tr < -1e-9 * tr_c.abs() {
        return Err(Error::Accuracy(format!("negative conditional variance trace {tr:e}")));
    }
    Ok(tr.max(0.0) / (PI * blocks.a))
}

/// `D_N(z + u/N)`.
pub fn density_n(table: &NormTable, z: &[Complex64], u: &[Complex64], n: usize) -> Result<f64> {
    check_scaling_args(z, u, n)?;
    density_at(table, &offset(z, u, n), n)
}

/// Two-point covariance blocks with points `x₁, x₂`; gradient coordinates are
/// ordered `(point, coordinate)`.
#[derive(Debug, Clone)]
pub struct TwoPointBlocks {
    pub a: [[Complex64; 2]; 2],
    pub b: DMatrix<Complex64>,
    pub c: DMatrix<Complex64>,
    pub lambda: DMatrix<Complex64>,
    pub log_scale: f64,
    dim: usize,
}

impl TwoPointBlocks {
    pub fn det_a(&self) -> Complex64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    /// `Λ^{ab}` with `a, b ∈ {1, 2}`.
    pub fn lambda_block(&self, a: usize, b: usize) -> DMatrix<Complex64> {
        let d = self.dim;
        self.lambda.view(((a - 1) * d, (b - 1) * d), (d, d)).into_owned()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn two_point_blocks(
    table: &NormTable,
    x1: &[Complex64],
    x2: &[Complex64],
    n: usize,
) -> Result<TwoPointBlocks> {
    let pts = [x1, x2];
    let mut jets: Vec<Vec<KernelJet>> = Vec::with_capacity(2);
    for pa in pts {
        let mut row = Vec::with_capacity(2);
        for pb in pts {
            row.push(kernel_jet_at_degree(table, n, pa, pb)?);
        }
        jets.push(row);
    }
    let scale = jets.iter().flatten().map(|j| j.log_scale).fold(f64::NEG_INFINITY, f64::max);
    jets.iter_mut().flatten().for_each(|j| j.rescale_to(scale));

    let dim = table.dim();
    let a = [[jets[0][0].s, jets[0][1].s], [jets[1][0].s, jets[1][1].s]];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(det.re > 1e-14 * (a[0][0].re * a[1][1].re)) {
        return Err(Error::DegenerateSeparation(format!(
            "det A = {det:e} is too small; the points are too close or too tangential for N = {n}"
        )));
    }
    let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];

    // B[p][(q,i)] = ∂S/∂w̄_i (x_p, x_q);  B*[(p,i)][q] = ∂S/∂z_i (x_p, x_q).
    let b = DMatrix::from_fn(2, 2 * dim, |p, col| jets[p][col / dim].ds_w[col % dim]);
    let b_star = DMatrix::from_fn(2 * dim, 2, |row, q| jets[row / dim][q].ds_z[row % dim]);
    let c =
        DMatrix::from_fn(2 * dim, 2 * dim, |row, col| jets[row / dim][col / dim].d2(row % dim, col % dim));
    let a_inv = DMatrix::from_fn(2, 2, |i, j| inv[i][j]);
    let lambda = &c - &b_star * a_inv * &b;
    Ok(TwoPointBlocks { a, b, c, lambda, log_scale: scale, dim })
}

fn trace(m: &DMatrix<Complex64>) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `K_N(x₁, x₂)` from the block traces.
pub fn pair_density_at(table: &NormTable, x1: &[Complex64], x2: &[Complex64], n: usize) -> Result<f64> {
    let blk = two_point_blocks(table, x1, x2, n)?;
    let l11 = blk.lambda_block(1, 1);
    let l22 = blk.lambda_block(2, 2);
    let l12 = blk.lambda_block(1, 2);
    let l21 = blk.lambda_block(2, 1);
    let mut cross = Complex64::new(0.0, 0.0);
    for i in 0..blk.dim {
        for j in 0..blk.dim {
            cross += l12[(i, j)] * l21[(j, i)];
        }
    }
    let num = trace(&l11) * trace(&l22) + cross;
    let k = num / (blk.det_a() * PI * PI);
    if k.im.abs() > 1e-8 * k.re.abs() {
        return Err(Error::Accuracy(format!("pair density has imaginary residue {:e}", k.im)));
    }
    Ok(k.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairN {
    pub k_n: f64,
    pub k_tilde_n: f64,
}

/// `K_N(z + u/N, z)` and its normalization by `D_N(z + u/N) D_N(z)`.
pub fn pair_n(
    table: &NormTable,
    jet: &GeometryJet,
    z: &[Complex64],
    u: &[Complex64],
    n: usize,
) -> Result<PairN> {
    check_scaling_args(z, u, n)?;
    let b = beta(jet, u);
    if b.norm() < TOL_BETA {
        return Err(Error::DegenerateDirection { beta_abs: b.norm() });
    }
    let x1 = offset(z, u, n);
    let k_n = pair_density_at(table, &x1, z, n)?;
    let d1 = density_at(table, &x1, n)?;
    let d2 = density_at(table, z, n)?;
    Ok(PairN { k_n, k_tilde_n: k_n / (d1 * d2) })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue over the trace, for a Hermitian PSD matrix.
pub fn top_eigen_fraction(m: &DMatrix<Complex64>) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(m)).eigenvalues;
    let top = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top / eig.iter().sum::<f64>()
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub d_scaled: f64,
    pub d_limit: f64,
    pub err_d: f64,
    /// Pair quantities, when requested.
    pub pair: Option<PairRow>,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRow {
    pub k_scaled: f64,
    pub k_limit: f64,
    pub err_k: f64,
    pub k_tilde: f64,
    pub k_tilde_limit: f64,
    pub err_k_tilde: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log err_D` against `log N`.
    pub rate_d: Option<f64>,
    pub rate_k: Option<f64>,
    pub rate_k_tilde: Option<f64>,
}

/// Relative error above which a row is flagged.
pub const FLAG_THRESHOLD: f64 = 0.10;

impl ConvergenceReport {
    /// The gate: the row at the largest `N` is not flagged.
    pub fn passed(&self) -> bool {
        self.rows.last().is_some_and(|r| !r.flagged)
    }
}

fn rel_err(x: f64, lim: f64) -> f64 {
    ((x - lim) / lim).abs()
}

/// Slope of the least-squares line through `(ln N, ln err)`, skipping zero errors.
pub fn fitted_rate(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0 && e.is_finite())
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Scaled densities at each `N` against their limits, plus pair
/// correlations when `with_pair` is set.
pub fn convergence_table(
    table: &NormTable,
    jet: &GeometryJet,
    z: &[Complex64],
    u: &[Complex64],
    n_list: &[usize],
    with_pair: bool,
) -> Result<ConvergenceReport> {
    if n_list.len() < 3 {
        return Err(Error::InvalidInput("convergence study needs at least three N values".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("N list must be strictly ascending".into()));
    }
    if *n_list.last().unwrap() > table.degree() {
        return Err(Error::InvalidInput("N list exceeds the norm table degree".into()));
    }
    let geom = jet.limit_geometry()?;
    let b = beta(jet, u);
    let d_limit = density_limit(&geom, b)?;
    let pair_lim = if with_pair { Some(pair_limit(&geom, b)?) } else { None };

    let rows: Vec<ConvergenceRow> = n_list
        .par_iter()
        .map(|&n| -> Result<ConvergenceRow> {
            let nf = n as f64;
            let d_scaled = density_n(table, z, u, n)? / (nf * nf);
            let err_d = rel_err(d_scaled, d_limit);
            let pair = match pair_lim {
                Some(pl) => {
                    let p = pair_n(table, jet, z, u, n)?;
                    let k_scaled = p.k_n / nf.powi(4);
                    Some(PairRow {
                        k_scaled,
                        k_limit: pl.k_inf,
                        err_k: rel_err(k_scaled, pl.k_inf),
                        k_tilde: p.k_tilde_n,
                        k_tilde_limit: pl.k_tilde_inf,
                        err_k_tilde: rel_err(p.k_tilde_n, pl.k_tilde_inf),
                    })
                }
                None => None,
            };
            let worst = pair.map_or(err_d, |p| err_d.max(p.err_k).max(p.err_k_tilde));
            Ok(ConvergenceRow { n, d_scaled, d_limit, err_d, pair, flagged: worst > FLAG_THRESHOLD })
        })
        .collect::<Result<_>>()?;

    let series = |f: &dyn Fn(&ConvergenceRow) -> Option<f64>| -> Vec<(usize, f64)> {
        rows.iter().filter_map(|r| f(r).map(|e| (r.n, e))).collect()
    };
    let rate_d = fitted_rate(&series(&|r| Some(r.err_d)));
    let rate_k = fitted_rate(&series(&|r| r.pair.map(|p| p.err_k)));
    let rate_k_tilde = fitted_rate(&series(&|r| r.pair.map(|p| p.err_k_tilde)));
    Ok(ConvergenceReport { rows, rate_d, rate_k, rate_k_tilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geometry_jet, BoundaryPoint, RadialProfile};
    use crate::szego::compute_norms;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_density_closed_form() {
        let t = compute_norms(&RadialProfile::circle(), 60, 8).unwrap();
        for n in [1usize, 10, 50] {
            let d = density_n(&t, &[c(1.0, 0.0)], &[c(0.0, 0.0)], n).unwrap();
            let nf = n as f64;
            let want = nf * (nf + 2.0) / (12.0 * PI);
            assert!((d - want).abs() < 1e-12 * want, "n={n}");
        }
    }

    #[test]
    fn pair_rejects_tangential_direction() {
        let prof = RadialProfile::sphere(1);
        let z = [c(1.0, 0.0), c(0.0, 0.0)];
        let jet = geometry_jet(&prof, &BoundaryPoint::new(&prof, &z).unwrap()).unwrap();
        let t = crate::szego::sphere_norms(1, 20).unwrap();
        let err = pair_n(&t, &jet, &z, &[c(0.0, 0.0), c(0.0, 1.0)], 20).unwrap_err();
        assert!(matches!(err, Error::DegenerateDirection { .. }));
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let t = compute_norms(&RadialProfile::circle(), 20, 8).unwrap();
        let z = [c(1.0, 0.0)];
        assert!(matches!(pair_density_at(&t, &z, &z, 20), Err(Error::DegenerateSeparation(_))));
    }

    #[test]
    fn fitted_rate_of_power_law() {
        let pts: Vec<(usize, f64)> = [10usize, 20, 40, 80].iter().map(|&n| (n, 3.0 / n as f64)).collect();
        assert!((fitted_rate(&pts).unwrap() + 1.0).abs() < 1e-12);
        assert!(fitted_rate(&[(10, 0.0), (20, 0.0)]).is_none());
    }

    #[test]
    fn convergence_preconditions() {
        let prof = RadialProfile::circle();
        let z = [c(1.0, 0.0)];
        let jet = geometry_jet(&prof, &BoundaryPoint::new(&prof, &z).unwrap()).unwrap();
        let t = compute_norms(&prof, 100, 8).unwrap();
        let u = [c(0.0, 0.0)];
        assert!(convergence_table(&t, &jet, &z, &u, &[10, 20], false).is_err());
        assert!(convergence_table(&t, &jet, &z, &u, &[10, 30, 20], false).is_err());
        assert!(convergence_table(&t, &jet, &z, &u, &[10, 20, 200], false).is_err());
    }
}
