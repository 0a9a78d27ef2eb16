//! NCE and eNCE objectives over exponential families: population loss,
//! gradient, and Hessian (adaptive quadrature for 1-d sample spaces, Monte
//! Carlo otherwise) plus empirical batch versions with per-sample clipping.
//!
//! All quadrature integrands are assembled in log space and exponentiated at
//! the last moment: each integral is shifted by a pilot estimate of the
//! integrand's maximum log magnitude so the adaptive pass works at unit
//! scale. That keeps relative accuracy uniform even when every quantity of
//! interest sits at exp(-R^2/8) scale.

use crate::expfam::{mix_seed, FamilySpec, TauParam};
use crate::numerics::{
    integrate, log_abs_expm1, log_softplus, log_sum_exp, sigmoid, softplus, sym_eigen,
    NumericsError, QuadratureSpec, SymMat,
};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Expfam(#[from] crate::expfam::ExpfamError),
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
    #[error("batch must contain samples from both distributions")]
    EmptyBatch,
    #[error("batch data/noise sample counts differ: {data} vs {noise}")]
    UnequalBatch { data: usize, noise: usize },
    #[error("invalid clip policy: {0}")]
    InvalidClip(String),
    #[error("parameter is not a normalized member: {0}")]
    NotNormalized(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Nce,
    Ence,
}

impl LossKind {
    pub fn label(&self) -> &'static str {
        match self {
            LossKind::Nce => "nce",
            LossKind::Ence => "ence",
        }
    }
}

/// Evaluation backend for population quantities.
#[derive(Debug, Clone)]
pub enum Backend {
    Quadrature(QuadratureSpec),
    MonteCarlo { n: usize, seed: u64 },
}

/// Paired samples from the data and noise distributions.
#[derive(Debug, Clone)]
pub struct Batch {
    pub data: Vec<Vec<f64>>,
    pub noise: Vec<Vec<f64>>,
}

impl Batch {
    pub fn new(data: Vec<Vec<f64>>, noise: Vec<Vec<f64>>) -> Result<Self, ObjectiveError> {
        if data.len() != noise.len() {
            return Err(ObjectiveError::UnequalBatch { data: data.len(), noise: noise.len() });
        }
        Ok(Batch { data, noise })
    }

    /// n draws from each of the two members, on streams derived from the
    /// seed.
    pub fn sample(
        family: &FamilySpec,
        tau_star: &TauParam,
        tau_q: &TauParam,
        n: usize,
        seed: u64,
    ) -> Result<Self, ObjectiveError> {
        let data = family.sample(tau_star, n, mix_seed(seed, 0xda7a))?;
        let noise = family.sample(tau_q, n, mix_seed(seed, 0x9015e))?;
        Ok(Batch { data, noise })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Per-sample stabilization caps for empirical evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClipPolicy {
    pub grad_norm_cap: Option<f64>,
    pub log_ratio_cap: Option<f64>,
}

impl ClipPolicy {
    pub fn none() -> Self {
        ClipPolicy::default()
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        for (name, cap) in
            [("grad_norm_cap", self.grad_norm_cap), ("log_ratio_cap", self.log_ratio_cap)]
        {
            if let Some(c) = cap {
                if !(c > 0.0) {
                    return Err(ObjectiveError::InvalidClip(format!("{name} must be positive, got {c}")));
                }
            }
        }
        Ok(())
    }

    fn clamp_z(&self, z: f64) -> f64 {
        match self.log_ratio_cap {
            Some(c) => z.clamp(-c, c),
            None => z,
        }
    }
}

/// One NCE or eNCE problem instance: the data member tau_star, the noise
/// member tau_q, and an evaluation backend.
#[derive(Debug)]
pub struct Objective {
    pub loss_kind: LossKind,
    pub family: FamilySpec,
    pub tau_star: TauParam,
    pub tau_q: TauParam,
    pub backend: Backend,
    eval_counter: AtomicU64,
}

/// Default integration window for Gaussian-family problems: twelve standard
/// deviations beyond both member means, so discarded tail mass is below
/// 1e-31.
pub fn default_quadrature_spec(theta_star: f64, theta_q: f64) -> QuadratureSpec {
    QuadratureSpec::new(theta_star.min(theta_q) - 12.0, theta_star.max(theta_q) + 12.0)
}

impl Objective {
    pub fn new(
        loss_kind: LossKind,
        family: FamilySpec,
        tau_star: TauParam,
        tau_q: TauParam,
        backend: Backend,
    ) -> Result<Self, ObjectiveError> {
        for (name, tau) in [("tau_star", &tau_star), ("tau_q", &tau_q)] {
            let expect = family.log_partition(&tau.theta)?;
            if (tau.alpha - expect).abs() > 1e-8 * (1.0 + expect.abs()) {
                return Err(ObjectiveError::NotNormalized(format!(
                    "{name}: alpha = {}, log partition = {expect}",
                    tau.alpha
                )));
            }
        }
        if matches!(backend, Backend::Quadrature(_)) && family.sample_dim() != 1 {
            return Err(ObjectiveError::InvalidBackend(
                "quadrature backend requires a 1-dimensional sample space".into(),
            ));
        }
        if let Backend::MonteCarlo { n, .. } = backend {
            if n == 0 {
                return Err(ObjectiveError::InvalidBackend("Monte Carlo backend needs n >= 1".into()));
            }
        }
        Ok(Objective { loss_kind, family, tau_star, tau_q, backend, eval_counter: AtomicU64::new(0) })
    }

    /// Convenience constructor for the 1-d unit-variance Gaussian problem
    /// with means theta_star / theta_q and the default quadrature window.
    pub fn gaussian_1d(
        loss_kind: LossKind,
        theta_star: f64,
        theta_q: f64,
    ) -> Result<Self, ObjectiveError> {
        let family = FamilySpec::gaussian_mean_1d();
        let tau_star = family.tau_of_theta(&[theta_star])?;
        let tau_q = family.tau_of_theta(&[theta_q])?;
        let spec = default_quadrature_spec(theta_star, theta_q);
        Objective::new(loss_kind, family, tau_star, tau_q, Backend::Quadrature(spec))
    }

    /// Same problem, different backend; the evaluation counter starts fresh.
    pub fn with_backend(&self, backend: Backend) -> Result<Self, ObjectiveError> {
        Objective::new(self.loss_kind, self.family, self.tau_star.clone(), self.tau_q.clone(), backend)
    }

    /// log p_tau(x) - log q(x) = (tau - tau_q) . T(x), computed as a
    /// parameter-difference inner product without forming densities.
    pub fn log_ratio(&self, tau: &TauParam, x: &[f64]) -> f64 {
        param_diff_dot(tau, &self.tau_q, &self.family.suff_stats(x))
    }

    // ----- population quantities -------------------------------------------------

    pub fn population_loss(&self, tau: &TauParam) -> Result<f64, ObjectiveError> {
        match &self.backend {
            Backend::Quadrature(spec) => self.quad_loss(tau, spec),
            Backend::MonteCarlo { .. } => Ok(self.mc_loss_with_se(tau)?.0),
        }
    }

    pub fn population_gradient(&self, tau: &TauParam) -> Result<Vec<f64>, ObjectiveError> {
        match &self.backend {
            Backend::Quadrature(spec) => self.quad_gradient(tau, spec),
            Backend::MonteCarlo { .. } => Ok(self.mc_gradient_with_se(tau)?.0),
        }
    }

    pub fn population_hessian(&self, tau: &TauParam) -> Result<SymMat, ObjectiveError> {
        match &self.backend {
            Backend::Quadrature(spec) => self.quad_hessian(tau, spec),
            Backend::MonteCarlo { .. } => self.mc_hessian(tau),
        }
    }

    fn quad_loss(&self, tau: &TauParam, spec: &QuadratureSpec) -> Result<f64, ObjectiveError> {
        let fam = self.family;
        let (ts, tq) = (&self.tau_star, &self.tau_q);
        match self.loss_kind {
            LossKind::Nce => {
                // (1/2) E_data[softplus(-z)] + (1/2) E_noise[softplus(z)].
                let a = integrate_scaled(
                    |x| (fam.log_pdf(ts, &[x]) + log_softplus(-self.log_ratio(tau, &[x])), 1.0),
                    spec,
                )?;
                let b = integrate_scaled(
                    |x| (fam.log_pdf(tq, &[x]) + log_softplus(self.log_ratio(tau, &[x])), 1.0),
                    spec,
                )?;
                Ok(0.5 * (a + b))
            }
            LossKind::Ence => {
                // (1/2) int p_* sqrt(q/p) + (1/2) int sqrt(p q).
                let a = integrate_scaled(
                    |x| {
                        let lp = fam.log_pdf(tau, &[x]);
                        let lq = fam.log_pdf(tq, &[x]);
                        (fam.log_pdf(ts, &[x]) + 0.5 * (lq - lp), 1.0)
                    },
                    spec,
                )?;
                let b = integrate_scaled(
                    |x| {
                        let lp = fam.log_pdf(tau, &[x]);
                        let lq = fam.log_pdf(tq, &[x]);
                        (0.5 * (lp + lq), 1.0)
                    },
                    spec,
                )?;
                Ok(0.5 * (a + b))
            }
        }
    }

    fn quad_gradient(&self, tau: &TauParam, spec: &QuadratureSpec) -> Result<Vec<f64>, ObjectiveError> {
        let fam = self.family;
        let dim = fam.suff_stat_dim;
        let mut g = vec![0.0; dim];
        for k in 0..dim {
            // Both integrands contain p - p_* = p_* (exp(d) - 1) with
            // d = (tau - tau_*) . T(x); forming d as a parameter-difference
            // inner product keeps the integrand smooth all the way to the
            // optimum, where two separately computed log densities would
            // cancel into rounding noise.
            let v = match self.loss_kind {
                LossKind::Nce => {
                    // (1/2) int q (p - p_*)/(p + q) T_k.
                    let integral = integrate_scaled(
                        |x| {
                            let t = fam.suff_stats(&[x]);
                            let lp = fam.log_pdf(tau, &[x]);
                            let lq = fam.log_pdf(&self.tau_q, &[x]);
                            let lps = fam.log_pdf(&self.tau_star, &[x]);
                            let denom = log_sum_exp(&[lp, lq]).expect("two finite values");
                            let d = param_diff_dot(tau, &self.tau_star, &t);
                            let tk = t[k];
                            (lq + lps + log_abs_expm1(d) - denom + tk.abs().ln(), d.signum() * tk.signum())
                        },
                        spec,
                    )?;
                    0.5 * integral
                }
                LossKind::Ence => {
                    // (1/4) int [sqrt(p q) - p_* sqrt(q/p)] T_k
                    //   = (1/4) int p_* sqrt(q/p) (exp(d) - 1) T_k.
                    let integral = integrate_scaled(
                        |x| {
                            let t = fam.suff_stats(&[x]);
                            let lp = fam.log_pdf(tau, &[x]);
                            let lq = fam.log_pdf(&self.tau_q, &[x]);
                            let lps = fam.log_pdf(&self.tau_star, &[x]);
                            let lb = lps + 0.5 * (lq - lp);
                            let d = param_diff_dot(tau, &self.tau_star, &t);
                            let tk = t[k];
                            (lb + log_abs_expm1(d) + tk.abs().ln(), d.signum() * tk.signum())
                        },
                        spec,
                    )?;
                    0.25 * integral
                }
            };
            g[k] = v;
        }
        Ok(g)
    }

    fn quad_hessian(&self, tau: &TauParam, spec: &QuadratureSpec) -> Result<SymMat, ObjectiveError> {
        let fam = self.family;
        let dim = fam.suff_stat_dim;
        let mut h = SymMat::zeros(dim);
        for k in 0..dim {
            for l in k..dim {
                let v = match self.loss_kind {
                    LossKind::Nce => {
                        // (1/2) int (p_* + q) p q / (p + q)^2 T_k T_l.
                        let integral = integrate_scaled(
                            |x| {
                                let lp = fam.log_pdf(tau, &[x]);
                                let lq = fam.log_pdf(&self.tau_q, &[x]);
                                let lps = fam.log_pdf(&self.tau_star, &[x]);
                                let denom = log_sum_exp(&[lp, lq]).expect("two finite values");
                                let mix = log_sum_exp(&[lps, lq]).expect("two finite values");
                                let t = fam.suff_stats(&[x]);
                                let prod = t[k] * t[l];
                                (mix + lp + lq - 2.0 * denom + prod.abs().ln(), prod.signum())
                            },
                            spec,
                        )?;
                        0.5 * integral
                    }
                    LossKind::Ence => {
                        // (1/8) int [sqrt(p q) + p_* sqrt(q/p)] T_k T_l.
                        let integral = integrate_scaled(
                            |x| {
                                let lp = fam.log_pdf(tau, &[x]);
                                let lq = fam.log_pdf(&self.tau_q, &[x]);
                                let lps = fam.log_pdf(&self.tau_star, &[x]);
                                let la = 0.5 * (lp + lq);
                                let lb = lps + 0.5 * (lq - lp);
                                let sum = log_sum_exp(&[la, lb]).expect("two finite values");
                                let t = fam.suff_stats(&[x]);
                                let prod = t[k] * t[l];
                                (sum + prod.abs().ln(), prod.signum())
                            },
                            spec,
                        )?;
                        0.125 * integral
                    }
                };
                h.set_sym(k, l, v);
            }
        }
        Ok(h)
    }

    // ----- empirical quantities --------------------------------------------------

    pub fn empirical_loss(
        &self,
        tau: &TauParam,
        batch: &Batch,
        clip: &ClipPolicy,
    ) -> Result<f64, ObjectiveError> {
        clip.validate()?;
        if batch.is_empty() {
            return Err(ObjectiveError::EmptyBatch);
        }
        let zs_data: Vec<f64> =
            batch.data.iter().map(|x| clip.clamp_z(self.log_ratio(tau, x))).collect();
        let zs_noise: Vec<f64> =
            batch.noise.iter().map(|x| clip.clamp_z(self.log_ratio(tau, x))).collect();
        match self.loss_kind {
            LossKind::Nce => {
                let a: f64 =
                    zs_data.iter().map(|&z| softplus(-z)).sum::<f64>() / zs_data.len() as f64;
                let b: f64 =
                    zs_noise.iter().map(|&z| softplus(z)).sum::<f64>() / zs_noise.len() as f64;
                Ok(0.5 * (a + b))
            }
            LossKind::Ence => {
                // Means of exp(-z/2) / exp(z/2) via the max-subtraction
                // trick so uncapped log ratios cannot overflow the mean.
                let half_neg: Vec<f64> = zs_data.iter().map(|&z| -0.5 * z).collect();
                let half_pos: Vec<f64> = zs_noise.iter().map(|&z| 0.5 * z).collect();
                let a = (log_sum_exp(&half_neg)? - (half_neg.len() as f64).ln()).exp();
                let b = (log_sum_exp(&half_pos)? - (half_pos.len() as f64).ln()).exp();
                Ok(0.5 * (a + b))
            }
        }
    }

    pub fn empirical_gradient(
        &self,
        tau: &TauParam,
        batch: &Batch,
        clip: &ClipPolicy,
    ) -> Result<Vec<f64>, ObjectiveError> {
        clip.validate()?;
        if batch.is_empty() {
            return Err(ObjectiveError::EmptyBatch);
        }
        let dim = self.family.suff_stat_dim;
        let mut acc_data = vec![0.0; dim];
        let mut acc_noise = vec![0.0; dim];
        let per_sample = |x: &[f64], is_data: bool, acc: &mut Vec<f64>| {
            let z = clip.clamp_z(self.log_ratio(tau, x));
            let t = self.family.suff_stats(x);
            // Gradient of the per-sample loss; the 1/2 mixture weights are
            // applied at aggregation time.
            let w = match (self.loss_kind, is_data) {
                (LossKind::Nce, true) => -sigmoid(-z),
                (LossKind::Nce, false) => sigmoid(z),
                (LossKind::Ence, true) => -0.5 * (-0.5 * z).exp(),
                (LossKind::Ence, false) => 0.5 * (0.5 * z).exp(),
            };
            let mut g: Vec<f64> = t.iter().map(|tk| w * tk).collect();
            if let Some(cap) = clip.grad_norm_cap {
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > cap {
                    let s = cap / norm;
                    for v in g.iter_mut() {
                        *v *= s;
                    }
                }
            }
            for (a, v) in acc.iter_mut().zip(&g) {
                *a += v;
            }
        };
        for x in &batch.data {
            per_sample(x, true, &mut acc_data);
        }
        for x in &batch.noise {
            per_sample(x, false, &mut acc_noise);
        }
        let (nd, nn) = (batch.data.len() as f64, batch.noise.len() as f64);
        Ok((0..dim).map(|k| 0.5 * (acc_data[k] / nd + acc_noise[k] / nn)).collect())
    }

    // ----- Monte Carlo population machinery --------------------------------------

    fn mc_params(&self) -> Result<(usize, u64), ObjectiveError> {
        match self.backend {
            Backend::MonteCarlo { n, seed } => Ok((n, seed)),
            _ => Err(ObjectiveError::InvalidBackend(
                "Monte Carlo estimate requested on a quadrature backend".into(),
            )),
        }
    }

    /// Fresh deterministic stream for one evaluation, derived from the
    /// backend seed, a digest of tau, and an atomically advanced counter.
    fn mc_fresh_batch(&self, tau: &TauParam) -> Result<Batch, ObjectiveError> {
        let (n, seed) = self.mc_params()?;
        let counter = self.eval_counter.fetch_add(1, Ordering::Relaxed);
        let stream = mix_seed(mix_seed(seed, tau_digest(tau)), counter);
        Batch::sample(&self.family, &self.tau_star, &self.tau_q, n, stream)
    }

    /// Monte Carlo population loss with its standard-error estimate.
    pub fn mc_loss_with_se(&self, tau: &TauParam) -> Result<(f64, f64), ObjectiveError> {
        let batch = self.mc_fresh_batch(tau)?;
        let value = self.empirical_loss(tau, &batch, &ClipPolicy::none())?;
        let per = |zs: &[f64]| -> (f64, f64) {
            let n = zs.len() as f64;
            let mean = zs.iter().sum::<f64>() / n;
            let var = zs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            (mean, var / n)
        };
        let (terms_d, terms_n): (Vec<f64>, Vec<f64>) = match self.loss_kind {
            LossKind::Nce => (
                batch.data.iter().map(|x| 0.5 * softplus(-self.log_ratio(tau, x))).collect(),
                batch.noise.iter().map(|x| 0.5 * softplus(self.log_ratio(tau, x))).collect(),
            ),
            LossKind::Ence => (
                batch.data.iter().map(|x| 0.5 * (-0.5 * self.log_ratio(tau, x)).exp()).collect(),
                batch.noise.iter().map(|x| 0.5 * (0.5 * self.log_ratio(tau, x)).exp()).collect(),
            ),
        };
        let se = (per(&terms_d).1 + per(&terms_n).1).sqrt();
        Ok((value, se))
    }

    /// Monte Carlo population gradient with per-coordinate standard errors.
    pub fn mc_gradient_with_se(&self, tau: &TauParam) -> Result<(Vec<f64>, Vec<f64>), ObjectiveError> {
        let batch = self.mc_fresh_batch(tau)?;
        let dim = self.family.suff_stat_dim;
        let mut mean = vec![0.0; dim];
        let mut var = vec![0.0; dim];
        let collect = |samples: &Vec<Vec<f64>>, is_data: bool| -> (Vec<f64>, Vec<f64>) {
            let n = samples.len() as f64;
            let mut m = vec![0.0; dim];
            let mut s2 = vec![0.0; dim];
            let mut per_vals: Vec<Vec<f64>> = Vec::with_capacity(samples.len());
            for x in samples {
                let z = self.log_ratio(tau, x);
                let t = self.family.suff_stats(x);
                let w = match (self.loss_kind, is_data) {
                    (LossKind::Nce, true) => -sigmoid(-z),
                    (LossKind::Nce, false) => sigmoid(z),
                    (LossKind::Ence, true) => -0.5 * (-0.5 * z).exp(),
                    (LossKind::Ence, false) => 0.5 * (0.5 * z).exp(),
                };
                let g: Vec<f64> = t.iter().map(|tk| 0.5 * w * tk).collect();
                for k in 0..dim {
                    m[k] += g[k];
                }
                per_vals.push(g);
            }
            for k in 0..dim {
                m[k] /= n;
            }
            for g in &per_vals {
                for k in 0..dim {
                    s2[k] += (g[k] - m[k]) * (g[k] - m[k]);
                }
            }
            for k in 0..dim {
                s2[k] /= n * n;
            }
            (m, s2)
        };
        let (md, vd) = collect(&batch.data, true);
        let (mn, vn) = collect(&batch.noise, false);
        for k in 0..dim {
            mean[k] = md[k] + mn[k];
            var[k] = vd[k] + vn[k];
        }
        Ok((mean, var.iter().map(|v| v.sqrt()).collect()))
    }

    fn mc_hessian(&self, tau: &TauParam) -> Result<SymMat, ObjectiveError> {
        let batch = self.mc_fresh_batch(tau)?;
        let dim = self.family.suff_stat_dim;
        let mut acc = SymMat::zeros(dim);
        let add_weighted = |x: &[f64], w: f64, acc: &mut SymMat, scale: f64| {
            let t = self.family.suff_stats(x);
            for k in 0..dim {
                for l in k..dim {
                    let v = acc.get(k, l) + scale * w * t[k] * t[l];
                    acc.set_sym(k, l, v);
                }
            }
        };
        let nd = batch.data.len() as f64;
        let nn = batch.noise.len() as f64;
        for x in &batch.data {
            let z = self.log_ratio(tau, x);
            let w = match self.loss_kind {
                // p q / (p+q)^2 = sigmoid(z) sigmoid(-z), stable in logs.
                LossKind::Nce => (-softplus(z) - softplus(-z)).exp() * 0.5,
                LossKind::Ence => (-0.5 * z).exp() * 0.125,
            };
            add_weighted(x, w, &mut acc, 1.0 / nd);
        }
        for x in &batch.noise {
            let z = self.log_ratio(tau, x);
            let w = match self.loss_kind {
                LossKind::Nce => (-softplus(z) - softplus(-z)).exp() * 0.5,
                LossKind::Ence => (0.5 * z).exp() * 0.125,
            };
            add_weighted(x, w, &mut acc, 1.0 / nn);
        }
        Ok(acc)
    }

    /// Smallest eigenvalue of the population Hessian; convenience for PSD
    /// diagnostics.
    pub fn min_hessian_eigenvalue(&self, tau: &TauParam) -> Result<f64, ObjectiveError> {
        let h = self.population_hessian(tau)?;
        Ok(sym_eigen(&h)?.eigenvalues[0])
    }
}

/// (a - b) . t over the extended coordinates [theta..., alpha]; the last
/// entry of t multiplies the alpha difference.
fn param_diff_dot(a: &TauParam, b: &TauParam, t: &[f64]) -> f64 {
    let mut z = 0.0;
    for (k, tk) in t.iter().enumerate() {
        let dk = if k < a.theta.len() { a.theta[k] - b.theta[k] } else { a.alpha - b.alpha };
        z += dk * tk;
    }
    z
}

/// Deterministic 64-bit digest of a parameter vector (bit-exact).
fn tau_digest(tau: &TauParam) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64;
    for v in tau.as_vec() {
        h = mix_seed(h, v.to_bits());
    }
    h
}

/// Integrates sign(x) * exp(logmag(x)) over the quadrature window after
/// shifting by the pilot-grid maximum of logmag, so the adaptive pass sees a
/// unit-scale integrand. `f` returns (log magnitude, sign).
pub(crate) fn integrate_scaled<F: Fn(f64) -> (f64, f64)>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<f64, ObjectiveError> {
    const PILOT_POINTS: usize = 512;
    let width = spec.upper - spec.lower;
    let mut shift = f64::NEG_INFINITY;
    for i in 0..=PILOT_POINTS {
        let x = spec.lower + width * (i as f64) / (PILOT_POINTS as f64);
        let (lm, _) = f(x);
        if lm > shift {
            shift = lm;
        }
    }
    if shift == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let v = integrate(
        |x| {
            let (lm, s) = f(x);
            if lm == f64::NEG_INFINITY {
                0.0
            } else {
                s * (lm - shift).exp()
            }
        },
        spec,
    )?;
    Ok(v * shift.exp())
}
