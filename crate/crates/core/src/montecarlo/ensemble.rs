//! Gaussian random polynomials in one variable and binned zero densities in
//! the scaled coordinate `u = N(ζ − z)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::roots::find_roots;
use crate::error::{Error, Result};
use crate::geometry::{beta, GeometryJet};
use crate::limits::density_limit;
use crate::quadrature::GaussLegendre;
use crate::szego::NormTable;

pub const MIN_TRIALS: usize = 100;
pub const MAX_WINDOW: f64 = 10.0;
/// Gauss points per axis used to average the prediction over a bin.
const BIN_QUAD: usize = 4;

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the `u` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(half: f64) -> Self {
        Self { re_min: -half, re_max: half, im_min: -half, im_max: half }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub window: Window,
    pub bins_re: usize,
    pub bins_im: usize,
}

impl EnsembleConfig {
    /// 21 × 21 bins of width 0.5 centered on `u = 0`.
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        Self { n, trials, seed, window: Window::square(5.25), bins_re: 21, bins_im: 21 }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.window;
        if self.n == 0 {
            return Err(Error::InvalidInput("degree N must be ≥ 1".into()));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidInput(format!("need at least {MIN_TRIALS} trials")));
        }
        if self.bins_re == 0 || self.bins_im == 0 {
            return Err(Error::InvalidInput("bin counts must be positive".into()));
        }
        let coords = [w.re_min, w.re_max, w.im_min, w.im_max];
        if coords.iter().any(|c| !c.is_finite() || c.abs() > MAX_WINDOW) {
            return Err(Error::InvalidInput(format!("window must lie within |u| ≤ {MAX_WINDOW}")));
        }
        if !(w.re_min < w.re_max && w.im_min < w.im_max) {
            return Err(Error::InvalidInput("window is empty".into()));
        }
        Ok(())
    }

    fn bin_size(&self) -> (f64, f64) {
        let w = &self.window;
        ((w.re_max - w.re_min) / self.bins_re as f64, (w.im_max - w.im_min) / self.bins_im as f64)
    }

    fn bin_of(&self, u: Complex64) -> Option<usize> {
        let w = &self.window;
        if !(u.re >= w.re_min && u.re < w.re_max && u.im >= w.im_min && u.im < w.im_max) {
            return None;
        }
        let (dx, dy) = self.bin_size();
        let i = (((u.re - w.re_min) / dx) as usize).min(self.bins_re - 1);
        let j = (((u.im - w.im_min) / dy) as usize).min(self.bins_im - 1);
        Some(j * self.bins_re + i)
    }
}

/// RNG for one trial; independent of scheduling order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian with `E|a|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Monomial coefficients `c_k = a_k / √n_k`, `k = 0..=n`.
pub fn sample_poly<R: Rng + ?Sized>(table: &NormTable, n: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if table.m() != 0 {
        return Err(Error::InvalidInput("random polynomial sampling needs a one-variable table".into()));
    }
    if n > table.degree() {
        return Err(Error::InvalidInput(format!(
            "degree {n} exceeds the norm table degree {}",
            table.degree()
        )));
    }
    Ok(table.norms()[..=n].iter().map(|nk| complex_gaussian(rng) / nk.sqrt()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistogram {
    pub bins_re: usize,
    pub bins_im: usize,
    /// Row-major over `(im, re)`.
    pub centers: Vec<Complex64>,
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    pub stderr: Vec<f64>,
    pub predicted: Vec<f64>,
    pub z_score: Vec<f64>,
    pub bin_area: f64,
}

impl DensityHistogram {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Index of the bin containing `u`, or `None` outside the window.
    pub fn locate(&self, u: Complex64) -> Option<usize> {
        self.centers
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - u).norm().total_cmp(&(b.1 - u).norm()))
            .filter(|(_, c)| {
                let (hx, hy) = (self.half_widths().0 + 1e-12, self.half_widths().1 + 1e-12);
                (c.re - u.re).abs() <= hx && (c.im - u.im).abs() <= hy
            })
            .map(|(k, _)| k)
    }

    fn half_widths(&self) -> (f64, f64) {
        if self.centers.len() < 2 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let dx =
            if self.bins_re > 1 { (self.centers[1].re - self.centers[0].re) / 2.0 } else { f64::INFINITY };
        let dy = if self.bins_im > 1 {
            (self.centers[self.bins_re].im - self.centers[0].im) / 2.0
        } else {
            f64::INFINITY
        };
        (dx, dy)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_u,im_u,count,empirical,predicted,z_score\n");
        for k in 0..self.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}\n",
                self.centers[k].re,
                self.centers[k].im,
                self.counts[k],
                self.empirical[k],
                self.predicted[k],
                self.z_score[k]
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub center_bin: Option<usize>,
    pub center_z_score: Option<f64>,
    pub fraction_within_3: f64,
    /// Mean number of roots per accepted trial, over the whole plane.
    pub mean_roots_per_trial: f64,
    pub accepted_trials: usize,
    pub discarded_trials: usize,
    /// Largest `|z|` of the difference between bins at `u` and `ū`.
    pub max_conjugate_z: f64,
}

impl EnsembleReport {
    pub fn center_within_3(&self) -> bool {
        self.center_z_score.is_some_and(|z| z.abs() < 3.0)
    }
}

/// Per-trial outcome: bin counts (sparse) and total roots, or a rejected trial.
type TrialResult = Option<(Vec<usize>, usize)>;

fn run_trial(config: &EnsembleConfig, table: &NormTable, z: Complex64, trial: u64) -> Result<TrialResult> {
    let mut rng = trial_rng(config.seed, trial);
    let coeffs = sample_poly(table, config.n, &mut rng)?;
    match find_roots(&coeffs) {
        Ok(roots) => {
            let nf = config.n as f64;
            let hits = roots.iter().filter_map(|r| config.bin_of((r - z) * nf)).collect();
            Ok(Some((hits, roots.len())))
        }
        Err(Error::RootQuality(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Samples `trials` polynomials, bins the scaled zeros near `z` and compares
/// the empirical density with the limit density averaged over each bin.
pub fn estimate_density(
    config: &EnsembleConfig,
    table: &NormTable,
    jet: &GeometryJet,
    z: Complex64,
) -> Result<(DensityHistogram, EnsembleReport)> {
    config.validate()?;
    if table.m() != 0 || jet.m() != 0 {
        return Err(Error::InvalidInput("Monte Carlo densities are one-variable only".into()));
    }
    let geom = jet.limit_geometry()?;
    let nbins = config.bins_re * config.bins_im;

    let results: Vec<TrialResult> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, table, z, t))
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; nbins];
    let mut accepted = 0usize;
    let mut total_roots = 0usize;
    for (hits, n_roots) in results.iter().flatten() {
        accepted += 1;
        total_roots += n_roots;
        for &b in hits {
            counts[b] += 1;
        }
    }
    let discarded = config.trials - accepted;

    let (dx, dy) = config.bin_size();
    let area = dx * dy;
    let w = &config.window;
    let gl = GaussLegendre::new(BIN_QUAD);
    let mut centers = Vec::with_capacity(nbins);
    let mut predicted = Vec::with_capacity(nbins);
    for j in 0..config.bins_im {
        for i in 0..config.bins_re {
            let x0 = w.re_min + i as f64 * dx;
            let y0 = w.im_min + j as f64 * dy;
            centers.push(Complex64::new(x0 + dx / 2.0, y0 + dy / 2.0));
            let mut acc = 0.0;
            for (x, wx) in gl.mapped(x0, x0 + dx) {
                for (y, wy) in gl.mapped(y0, y0 + dy) {
                    acc += wx * wy * density_limit(&geom, beta(jet, &[Complex64::new(x, y)]))?;
                }
            }
            predicted.push(acc / area);
        }
    }

    let norm = accepted.max(1) as f64 * area;
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / norm).collect();
    let stderr: Vec<f64> = predicted.iter().map(|p| (p * norm).sqrt() / norm).collect();
    let z_score: Vec<f64> = counts
        .iter()
        .zip(&predicted)
        .map(|(&c, &p)| {
            let expected = p * norm;
            (c as f64 - expected) / expected.sqrt()
        })
        .collect();

    let hist = DensityHistogram {
        bins_re: config.bins_re,
        bins_im: config.bins_im,
        centers,
        counts,
        empirical,
        stderr,
        predicted,
        z_score,
        bin_area: area,
    };

    let center_bin = hist.locate(Complex64::new(0.0, 0.0));
    let within = hist.z_score.iter().filter(|z| z.abs() < 3.0).count();
    let mut max_conj = 0.0f64;
    for k in 0..hist.len() {
        if let Some(kc) = hist.locate(hist.centers[k].conj()) {
            let (a, b) = (hist.counts[k] as f64, hist.counts[kc] as f64);
            if kc != k && a + b > 0.0 {
                max_conj = max_conj.max((a - b).abs() / (a + b).sqrt());
            }
        }
    }
    let report = EnsembleReport {
        center_bin,
        center_z_score: center_bin.map(|k| hist.z_score[k]),
        fraction_within_3: within as f64 / nbins as f64,
        mean_roots_per_trial: total_roots as f64 / accepted.max(1) as f64,
        accepted_trials: accepted,
        discarded_trials: discarded,
        max_conjugate_z: max_conj,
    };
    Ok((hist, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geometry_jet, BoundaryPoint, RadialProfile};
    use crate::szego::compute_norms;

    #[test]
    fn sampling_is_deterministic() {
        let t = compute_norms(&RadialProfile::circle(), 20, 8).unwrap();
        let a = sample_poly(&t, 20, &mut trial_rng(7, 3)).unwrap();
        let b = sample_poly(&t, 20, &mut trial_rng(7, 3)).unwrap();
        let c = sample_poly(&t, 20, &mut trial_rng(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 21);
    }

    #[test]
    fn gaussian_second_moment() {
        let mut rng = trial_rng(1, 0);
        let k = 10_000;
        let mean: f64 = (0..k).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum::<f64>() / k as f64;
        assert!((0.97..=1.03).contains(&mean), "{mean}");
    }

    #[test]
    fn config_validation() {
        let mut c = EnsembleConfig::new(50, 99, 0);
        assert!(c.validate().is_err());
        c.trials = 100;
        assert!(c.validate().is_ok());
        c.window = Window::square(11.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn bin_lookup() {
        let c = EnsembleConfig::new(50, 100, 0);
        assert_eq!(c.bin_of(Complex64::new(0.0, 0.0)), Some(10 * 21 + 10));
        assert_eq!(c.bin_of(Complex64::new(6.0, 0.0)), None);
    }

    #[test]
    fn small_run_counts_all_roots() {
        let prof = RadialProfile::circle();
        let z = [Complex64::new(1.0, 0.0)];
        let jet = geometry_jet(&prof, &BoundaryPoint::new(&prof, &z).unwrap()).unwrap();
        let t = compute_norms(&prof, 30, 8).unwrap();
        let cfg = EnsembleConfig::new(30, 200, 11);
        let (h, r) = estimate_density(&cfg, &t, &jet, z[0]).unwrap();
        assert_eq!(r.discarded_trials, 0);
        assert_eq!(r.mean_roots_per_trial, 30.0);
        assert_eq!(h.total_count(), h.counts.iter().sum::<u64>());
        assert_eq!(r.center_bin, Some(220));
        let (h2, _) = estimate_density(&cfg, &t, &jet, z[0]).unwrap();
        assert_eq!(h, h2);
    }
}
