//! Exponential families used throughout: the 1-d unit-variance Gaussian mean
//! family and d-dimensional diagonal Gaussians, in the extended
//! parameterization tau = [theta, alpha] with sufficient statistics
//! T(x) = [T~(x), -1], so that log p(x) = log h(x) + theta . T~(x) - alpha.
//!
//! Also home to the deterministic sample streams (SplitMix64 + Box-Muller)
//! and numerically measured family constants (parameter-norm bound, log
//! partition Lipschitz constant, Fisher-matrix eigenvalue range).

use crate::numerics::{sym_eigen, NumericsError, SymMat, LOG_SQRT_2PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpfamError {
    #[error("parameter dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("non-finite parameter entry")]
    NonFinite,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Extended parameter: natural parameter plus a free log-partition estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct TauParam {
    pub theta: Vec<f64>,
    pub alpha: f64,
}

impl TauParam {
    pub fn new(theta: Vec<f64>, alpha: f64) -> Self {
        TauParam { theta, alpha }
    }

    /// Full coordinate vector [theta..., alpha].
    pub fn as_vec(&self) -> Vec<f64> {
        let mut v = self.theta.clone();
        v.push(self.alpha);
        v
    }

    /// Inverse of [`TauParam::as_vec`].
    pub fn from_vec(v: &[f64]) -> Self {
        let (theta, alpha) = v.split_at(v.len() - 1);
        TauParam { theta: theta.to_vec(), alpha: alpha[0] }
    }

    pub fn dim(&self) -> usize {
        self.theta.len() + 1
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.theta.iter().all(|t| t.is_finite())
    }

    /// Euclidean distance in the extended coordinates.
    pub fn dist(&self, other: &TauParam) -> f64 {
        let mut s = (self.alpha - other.alpha) * (self.alpha - other.alpha);
        for (a, b) in self.theta.iter().zip(&other.theta) {
            s += (a - b) * (a - b);
        }
        s.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Unit-variance Gaussians on the line, natural parameter = mean.
    GaussianMean1D,
    /// Diagonal-covariance Gaussians in the given dimension; natural
    /// parameters are d precisions followed by d precision-scaled means.
    DiagGaussian(usize),
}

/// A concrete exponential family: kind plus the dimension of T(x)
/// (including the trailing -1 coordinate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub suff_stat_dim: usize,
}

impl FamilySpec {
    pub fn gaussian_mean_1d() -> Self {
        FamilySpec { kind: FamilyKind::GaussianMean1D, suff_stat_dim: 2 }
    }

    pub fn diag_gaussian(d: usize) -> Self {
        FamilySpec { kind: FamilyKind::DiagGaussian(d), suff_stat_dim: 2 * d + 1 }
    }

    /// Dimension of the sample space.
    pub fn sample_dim(&self) -> usize {
        match self.kind {
            FamilyKind::GaussianMean1D => 1,
            FamilyKind::DiagGaussian(d) => d,
        }
    }

    /// Dimension of the natural parameter theta (suff_stat_dim - 1).
    pub fn theta_dim(&self) -> usize {
        self.suff_stat_dim - 1
    }

    /// Extended parameter for the family member described by mean
    /// parameters: one mean for the 1-d family; d means followed by d
    /// positive variances for diagonal Gaussians. The resulting alpha is the
    /// exact log partition, so the density is normalized.
    pub fn tau_of_theta(&self, mean_params: &[f64]) -> Result<TauParam, ExpfamError> {
        match self.kind {
            FamilyKind::GaussianMean1D => {
                if mean_params.len() != 1 {
                    return Err(ExpfamError::DimensionMismatch { expected: 1, got: mean_params.len() });
                }
                let theta = vec![mean_params[0]];
                let alpha = self.log_partition(&theta)?;
                Ok(TauParam::new(theta, alpha))
            }
            FamilyKind::DiagGaussian(d) => {
                if mean_params.len() != 2 * d {
                    return Err(ExpfamError::DimensionMismatch { expected: 2 * d, got: mean_params.len() });
                }
                let (mu, var) = mean_params.split_at(d);
                let mut theta = Vec::with_capacity(2 * d);
                for &v in var {
                    if !(v > 0.0) {
                        return Err(ExpfamError::Domain(format!("variance must be positive, got {v}")));
                    }
                    theta.push(1.0 / v);
                }
                for i in 0..d {
                    theta.push(mu[i] / var[i]);
                }
                let alpha = self.log_partition(&theta)?;
                Ok(TauParam::new(theta, alpha))
            }
        }
    }

    /// Sufficient statistics T(x), with the trailing -1 coordinate.
    pub fn suff_stats(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.sample_dim(), "sample dimension mismatch");
        match self.kind {
            FamilyKind::GaussianMean1D => vec![x[0], -1.0],
            FamilyKind::DiagGaussian(d) => {
                let mut t = Vec::with_capacity(2 * d + 1);
                for &xi in x {
                    t.push(-0.5 * xi * xi);
                }
                t.extend_from_slice(x);
                t.push(-1.0);
                t
            }
        }
    }

    /// log h(x) + theta . T~(x) - alpha; a normalized log density whenever
    /// alpha is the true log partition.
    pub fn log_pdf(&self, tau: &TauParam, x: &[f64]) -> f64 {
        assert_eq!(tau.theta.len(), self.theta_dim(), "parameter dimension mismatch");
        let t = self.suff_stats(x);
        let mut dot = 0.0;
        for (th, ti) in tau.theta.iter().zip(&t) {
            dot += th * ti;
        }
        let log_h = match self.kind {
            FamilyKind::GaussianMean1D => -0.5 * x[0] * x[0],
            FamilyKind::DiagGaussian(_) => 0.0,
        };
        log_h + dot - tau.alpha
    }

    /// Exact closed-form log partition A(theta) in natural parameters.
    pub fn log_partition(&self, theta: &[f64]) -> Result<f64, ExpfamError> {
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(ExpfamError::NonFinite);
        }
        match self.kind {
            FamilyKind::GaussianMean1D => {
                if theta.len() != 1 {
                    return Err(ExpfamError::DimensionMismatch { expected: 1, got: theta.len() });
                }
                Ok(0.5 * theta[0] * theta[0] + LOG_SQRT_2PI)
            }
            FamilyKind::DiagGaussian(d) => {
                if theta.len() != 2 * d {
                    return Err(ExpfamError::DimensionMismatch { expected: 2 * d, got: theta.len() });
                }
                let (a, b) = theta.split_at(d);
                let mut acc = 0.0;
                for i in 0..d {
                    if !(a[i] > 0.0) {
                        return Err(ExpfamError::Domain(format!(
                            "precision must be positive, got {}",
                            a[i]
                        )));
                    }
                    acc += b[i] * b[i] / (2.0 * a[i])
                        + 0.5 * ((2.0 * std::f64::consts::PI).ln() - a[i].ln());
                }
                Ok(acc)
            }
        }
    }

    /// Per-dimension (mean, variance) pairs of the member at tau's natural
    /// parameter.
    pub fn mean_and_var(&self, theta: &[f64]) -> Result<Vec<(f64, f64)>, ExpfamError> {
        match self.kind {
            FamilyKind::GaussianMean1D => {
                if theta.len() != 1 {
                    return Err(ExpfamError::DimensionMismatch { expected: 1, got: theta.len() });
                }
                Ok(vec![(theta[0], 1.0)])
            }
            FamilyKind::DiagGaussian(d) => {
                if theta.len() != 2 * d {
                    return Err(ExpfamError::DimensionMismatch { expected: 2 * d, got: theta.len() });
                }
                let (a, b) = theta.split_at(d);
                (0..d)
                    .map(|i| {
                        if !(a[i] > 0.0) {
                            Err(ExpfamError::Domain(format!(
                                "precision must be positive, got {}",
                                a[i]
                            )))
                        } else {
                            Ok((b[i] / a[i], 1.0 / a[i]))
                        }
                    })
                    .collect()
            }
        }
    }

    /// n i.i.d. draws from the member at tau; deterministic given the seed.
    pub fn sample(&self, tau: &TauParam, n: usize, seed: u64) -> Result<Vec<Vec<f64>>, ExpfamError> {
        let mv = self.mean_and_var(&tau.theta)?;
        let expect_alpha = self.log_partition(&tau.theta)?;
        if (tau.alpha - expect_alpha).abs() > 1e-6 * (1.0 + expect_alpha.abs()) {
            return Err(ExpfamError::Domain(format!(
                "tau is not a normalized member: alpha = {}, log partition = {}",
                tau.alpha, expect_alpha
            )));
        }
        let mut normals = NormalSampler::new(seed);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let x: Vec<f64> =
                mv.iter().map(|&(mu, var)| mu + var.sqrt() * normals.next()).collect();
            out.push(x);
        }
        Ok(out)
    }

    /// Closed-form second-moment matrix E[T(x) T(x)^T] at the member with
    /// the given natural parameter.
    pub fn moment_matrix(&self, theta: &[f64]) -> Result<SymMat, ExpfamError> {
        let mv = self.mean_and_var(theta)?;
        match self.kind {
            FamilyKind::GaussianMean1D => {
                let th = mv[0].0;
                Ok(SymMat::from_rows(&[vec![th * th + 1.0, -th], vec![-th, 1.0]])
                    .expect("2x2 construction"))
            }
            FamilyKind::DiagGaussian(d) => {
                // Blocks: u_i = -x_i^2/2 (0..d), x_i (d..2d), then -1.
                let m1: Vec<f64> = mv.iter().map(|&(mu, _)| mu).collect();
                let m2: Vec<f64> = mv.iter().map(|&(mu, v)| mu * mu + v).collect();
                let m3: Vec<f64> = mv.iter().map(|&(mu, v)| mu * mu * mu + 3.0 * mu * v).collect();
                let m4: Vec<f64> = mv
                    .iter()
                    .map(|&(mu, v)| mu.powi(4) + 6.0 * mu * mu * v + 3.0 * v * v)
                    .collect();
                let n = 2 * d + 1;
                let mut m = SymMat::zeros(n);
                for i in 0..d {
                    for j in i..d {
                        let v = if i == j { m4[i] / 4.0 } else { m2[i] * m2[j] / 4.0 };
                        m.set_sym(i, j, v);
                    }
                    for j in 0..d {
                        let v = if i == j { -m3[i] / 2.0 } else { -m2[i] * m1[j] / 2.0 };
                        m.set_sym(i, d + j, v);
                    }
                    m.set_sym(i, 2 * d, m2[i] / 2.0);
                }
                for i in 0..d {
                    for j in i..d {
                        let v = if i == j { m2[i] } else { m1[i] * m1[j] };
                        m.set_sym(d + i, d + j, v);
                    }
                    m.set_sym(d + i, 2 * d, -m1[i]);
                }
                m.set_sym(2 * d, 2 * d, 1.0);
                Ok(m)
            }
        }
    }
}

/// Numerically measured family constants over a finite set of natural
/// parameters: parameter-norm bound, log-partition gradient bound (Lipschitz
/// constant), Fisher-matrix eigenvalue range, and the measured Lipschitz
/// range of the Fisher map itself.
#[derive(Debug, Clone)]
pub struct FamilyBounds {
    pub omega: f64,
    pub beta_z: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub gamma_max: f64,
    pub gamma_min: f64,
}

impl FamilyBounds {
    /// Measures all constants over the provided grid of natural parameters.
    pub fn measure(family: &FamilySpec, grid: &[Vec<f64>]) -> Result<FamilyBounds, ExpfamError> {
        if grid.is_empty() {
            return Err(ExpfamError::Domain("empty parameter grid".into()));
        }
        let mut omega = 0.0_f64;
        let mut beta_z = 0.0_f64;
        let mut lambda_max = f64::NEG_INFINITY;
        let mut lambda_min = f64::INFINITY;
        let mut taus = Vec::with_capacity(grid.len());
        for theta in grid {
            let alpha = family.log_partition(theta)?;
            let tau = TauParam::new(theta.clone(), alpha);
            let norm: f64 = tau.as_vec().iter().map(|v| v * v).sum::<f64>().sqrt();
            omega = omega.max(norm);
            beta_z = beta_z.max(log_partition_grad_norm(family, theta)?);
            let eig = sym_eigen(&family.moment_matrix(theta)?)?;
            lambda_max = lambda_max.max(*eig.eigenvalues.last().unwrap());
            lambda_min = lambda_min.min(eig.eigenvalues[0]);
            taus.push(tau);
        }
        let (mut gamma_max, mut gamma_min) = (1.0_f64, 1.0_f64);
        if grid.len() >= 2 {
            gamma_max = 0.0;
            gamma_min = f64::INFINITY;
            for w in 0..grid.len() - 1 {
                let ma = family.moment_matrix(&grid[w])?;
                let mb = family.moment_matrix(&grid[w + 1])?;
                let n = ma.n();
                let mut diff = SymMat::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        diff.set_sym(i, j, ma.get(i, j) - mb.get(i, j));
                    }
                }
                let spectral = sym_eigen(&diff)?.singular_extremes().1;
                let dist = taus[w].dist(&taus[w + 1]);
                if dist > 0.0 {
                    let ratio = spectral / dist;
                    gamma_max = gamma_max.max(ratio);
                    gamma_min = gamma_min.min(ratio);
                }
            }
            if gamma_min > gamma_max {
                // Degenerate grid (all points equal): fall back to neutral.
                gamma_max = 1.0;
                gamma_min = 1.0;
            }
        }
        Ok(FamilyBounds { omega, beta_z, lambda_max, lambda_min, gamma_max, gamma_min })
    }
}

fn log_partition_grad_norm(family: &FamilySpec, theta: &[f64]) -> Result<f64, ExpfamError> {
    match family.kind {
        FamilyKind::GaussianMean1D => Ok(theta[0].abs()),
        FamilyKind::DiagGaussian(d) => {
            let (a, b) = theta.split_at(d);
            let mut s = 0.0;
            for i in 0..d {
                let da = -b[i] * b[i] / (2.0 * a[i] * a[i]) - 0.5 / a[i];
                let db = b[i] / a[i];
                s += da * da + db * db;
            }
            Ok(s.sqrt())
        }
    }
}

/// SplitMix64: a tiny, well-studied 64-bit generator with a constant-time
/// jump, used for all sampling so streams are bit-reproducible across
/// platforms.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn scramble(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        scramble(self.state)
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform draw in [lo, hi).
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Deterministic combination of a base seed and a stream index, so parallel
/// callers own disjoint streams.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    scramble(seed ^ scramble(stream.wrapping_mul(GOLDEN).wrapping_add(1)))
}

/// Standard-normal stream via Box-Muller pairs over SplitMix64 uniforms.
#[derive(Debug, Clone)]
pub struct NormalSampler {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl NormalSampler {
    pub fn new(seed: u64) -> Self {
        NormalSampler { rng: SplitMix64::new(seed), spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.rng.next_f64();
        let u2 = self.rng.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * phi.sin());
        r * phi.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tau_of_theta_1d_examples() {
        let fam = FamilySpec::gaussian_mean_1d();
        let t0 = fam.tau_of_theta(&[0.0]).unwrap();
        assert_eq!(t0.theta, vec![0.0]);
        assert_relative_eq!(t0.alpha, 0.918_938_533_2, epsilon = 1e-9);
        let t16 = fam.tau_of_theta(&[16.0]).unwrap();
        assert_relative_eq!(t16.alpha, 128.918_938_533_2, epsilon = 1e-9);
    }

    #[test]
    fn tau_of_theta_diag_standard_normal() {
        // mu=0, var=1: natural parameters (precision 1, linear 0), alpha =
        // log sqrt(2 pi); normalization cross-checked by quadrature in the
        // integration suite.
        let fam = FamilySpec::diag_gaussian(1);
        let tau = fam.tau_of_theta(&[0.0, 1.0]).unwrap();
        assert_eq!(tau.theta[0], 1.0);
        assert_eq!(tau.theta[1], 0.0);
        assert_relative_eq!(tau.alpha, 0.918_938_533_2, epsilon = 1e-9);
    }

    #[test]
    fn tau_of_theta_rejects_bad_variance() {
        let fam = FamilySpec::diag_gaussian(1);
        assert!(matches!(fam.tau_of_theta(&[0.0, 0.0]), Err(ExpfamError::Domain(_))));
        assert!(matches!(fam.tau_of_theta(&[0.0, -1.0]), Err(ExpfamError::Domain(_))));
    }

    #[test]
    fn suff_stats_examples() {
        let fam = FamilySpec::gaussian_mean_1d();
        assert_eq!(fam.suff_stats(&[3.0]), vec![3.0, -1.0]);
        assert_eq!(fam.suff_stats(&[0.0]), vec![0.0, -1.0]);
        let fam2 = FamilySpec::diag_gaussian(2);
        assert_eq!(fam2.suff_stats(&[1.0, 2.0]), vec![-0.5, -2.0, 1.0, 2.0, -1.0]);
    }

    #[test]
    fn log_pdf_examples() {
        let fam = FamilySpec::gaussian_mean_1d();
        let t0 = fam.tau_of_theta(&[0.0]).unwrap();
        assert_relative_eq!(fam.log_pdf(&t0, &[0.0]), -0.918_938_533_2, epsilon = 1e-9);
        let t16 = fam.tau_of_theta(&[16.0]).unwrap();
        assert_relative_eq!(fam.log_pdf(&t16, &[16.0]), -0.918_938_533_2, epsilon = 1e-9);
        assert_relative_eq!(fam.log_pdf(&t0, &[2.0]), -2.918_938_533_2, epsilon = 1e-9);
    }

    #[test]
    fn log_partition_examples() {
        let fam = FamilySpec::gaussian_mean_1d();
        assert_relative_eq!(fam.log_partition(&[0.0]).unwrap(), 0.918_938_533_2, epsilon = 1e-9);
        assert_relative_eq!(fam.log_partition(&[4.0]).unwrap(), 8.918_938_533_2, epsilon = 1e-9);
        // Precision 2, linear 0: 0.5 * log(2 pi / 2), checked against the
        // Gaussian integral oracle.
        let fam2 = FamilySpec::diag_gaussian(1);
        assert_relative_eq!(
            fam2.log_partition(&[2.0, 0.0]).unwrap(),
            0.572_364_942_9,
            epsilon = 1e-9
        );
        assert!(matches!(fam2.log_partition(&[-2.0, 0.0]), Err(ExpfamError::Domain(_))));
    }

    #[test]
    fn sampling_matches_moments_and_is_deterministic() {
        let fam = FamilySpec::gaussian_mean_1d();
        let t0 = fam.tau_of_theta(&[0.0]).unwrap();
        let n = 1_000_000;
        let xs = fam.sample(&t0, n, 1).unwrap();
        let mean: f64 = xs.iter().map(|x| x[0]).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "sample mean {mean}");

        let t16 = fam.tau_of_theta(&[16.0]).unwrap();
        let ys = fam.sample(&t16, n, 1).unwrap();
        let m: f64 = ys.iter().map(|y| y[0]).sum::<f64>() / n as f64;
        let var: f64 = ys.iter().map(|y| (y[0] - m) * (y[0] - m)).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.01, "sample variance {var}");

        let a = fam.sample(&t0, 1000, 42).unwrap();
        let b = fam.sample(&t0, 1000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_empty_is_not_an_error() {
        let fam = FamilySpec::gaussian_mean_1d();
        let t0 = fam.tau_of_theta(&[0.0]).unwrap();
        assert!(fam.sample(&t0, 0, 9).unwrap().is_empty());
    }

    #[test]
    fn sample_rejects_unnormalized_tau() {
        let fam = FamilySpec::gaussian_mean_1d();
        let bad = TauParam::new(vec![0.0], 5.0);
        assert!(matches!(fam.sample(&bad, 10, 1), Err(ExpfamError::Domain(_))));
    }

    #[test]
    fn moment_matrix_1d_closed_form() {
        let fam = FamilySpec::gaussian_mean_1d();
        let m = fam.moment_matrix(&[3.0]).unwrap();
        assert_eq!(m.get(0, 0), 10.0);
        assert_eq!(m.get(0, 1), -3.0);
        assert_eq!(m.get(1, 1), 1.0);
    }

    #[test]
    fn moment_matrix_diag_matches_monte_carlo() {
        let fam = FamilySpec::diag_gaussian(2);
        let tau = fam.tau_of_theta(&[0.5, -1.0, 2.0, 0.5]).unwrap();
        let m = fam.moment_matrix(&tau.theta).unwrap();
        let n = 400_000;
        let xs = fam.sample(&tau, n, 7).unwrap();
        let dim = fam.suff_stat_dim;
        let mut acc = vec![0.0; dim * dim];
        for x in &xs {
            let t = fam.suff_stats(x);
            for i in 0..dim {
                for j in 0..dim {
                    acc[i * dim + j] += t[i] * t[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let est = acc[i * dim + j] / n as f64;
                let exact = m.get(i, j);
                assert!(
                    (est - exact).abs() <= 0.05 * (1.0 + exact.abs()),
                    "entry ({i},{j}): mc {est} vs closed form {exact}"
                );
            }
        }
    }

    #[test]
    fn family_bounds_on_a_segment() {
        let fam = FamilySpec::gaussian_mean_1d();
        let grid: Vec<Vec<f64>> = (0..=32).map(|i| vec![2.0 * i as f64 / 32.0]).collect();
        let b = FamilyBounds::measure(&fam, &grid).unwrap();
        assert_relative_eq!(b.beta_z, 2.0, max_relative = 1e-12);
        // Fisher matrix [[th^2+1, -th], [-th, 1]] at th=2 has the largest
        // top eigenvalue on this grid; lambda_min < 1 < lambda_max.
        assert!(b.lambda_max > 5.0 && b.lambda_max < 6.0);
        assert!(b.lambda_min > 0.0 && b.lambda_min < 1.0);
        assert!(b.omega > 0.0 && b.gamma_max >= b.gamma_min && b.gamma_min > 0.0);
    }

    #[test]
    fn splitmix_streams_are_reproducible_and_distinct() {
        let mut a = SplitMix64::new(5);
        let mut b = SplitMix64::new(5);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
        let u = SplitMix64::new(3).next_f64();
        assert!(u > 0.0 && u < 1.0);
    }
}
