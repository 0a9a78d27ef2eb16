//! First- and second-order iterative solvers over an [`Objective`]:
//! gradient descent, normalized gradient descent, and a damped Newton
//! method, with full per-step traces and batched (empirical-gradient)
//! variants.

use crate::expfam::{mix_seed, TauParam};
use crate::numerics::{sym_eigen, NumericsError, SymMat};
use crate::objective::{Batch, ClipPolicy, Objective, ObjectiveError};
use thiserror::Error;

/// Iterates whose extended-parameter norm passes this bound are treated as
/// diverged rather than evaluated; legitimate trajectories in this problem
/// family stay orders of magnitude below it.
pub const DIVERGENCE_NORM: f64 = 1e6;

#[derive(Debug, Error)]
pub enum OptimError {
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("gradient vanished; normalized direction undefined")]
    ZeroGradient,
    #[error("Hessian numerically singular at step {step}: |eigenvalue| {sigma_min:e} below floor {floor:e}")]
    SingularHessian { step: usize, sigma_min: f64, floor: f64 },
    #[error("iterate diverged at step {step}")]
    Diverged { step: usize, trace: Trace },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Gd,
    Ngd,
    Newton,
}

impl Algo {
    pub fn label(&self) -> &'static str {
        match self {
            Algo::Gd => "gd",
            Algo::Ngd => "ngd",
            Algo::Newton => "newton",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlgoConfig {
    pub algo: Algo,
    pub eta: f64,
    pub max_steps: usize,
    /// Stop once the distance to the data parameter drops to this value.
    pub target_delta: Option<f64>,
    /// Stop once the gradient norm drops below this value.
    pub grad_tol: f64,
}

impl AlgoConfig {
    pub fn new(algo: Algo, eta: f64, max_steps: usize) -> Self {
        AlgoConfig { algo, eta, max_steps, target_delta: None, grad_tol: 1e-14 }
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(OptimError::Config(format!("step size must be positive and finite, got {}", self.eta)));
        }
        if let Some(d) = self.target_delta {
            if !(d > 0.0) {
                return Err(OptimError::Config(format!("target distance must be positive, got {d}")));
            }
        }
        Ok(())
    }
}

/// Curvature and conditioning constants from which default step sizes are
/// derived. Only the fields the chosen algorithm needs must be present.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepConstants {
    pub sigma_max_global: Option<f64>,
    pub sigma_min_global: Option<f64>,
    pub kappa_star: Option<f64>,
    pub beta_u: Option<f64>,
    pub beta_l: Option<f64>,
    pub delta: Option<f64>,
}

/// Default step-size policy:
/// gradient descent 1/sigma_max, Newton sigma_min/sigma_max,
/// normalized gradient descent sqrt(beta_l / (beta_u * kappa_star)) * delta.
pub fn default_step_size(algo: Algo, c: &StepConstants) -> Result<f64, OptimError> {
    let need = |name: &str, v: Option<f64>| -> Result<f64, OptimError> {
        match v {
            Some(x) if x.is_finite() && x > 0.0 => Ok(x),
            Some(x) => Err(OptimError::Config(format!("{name} must be positive and finite, got {x}"))),
            None => Err(OptimError::Config(format!("{name} required for {} step size", algo.label()))),
        }
    };
    match algo {
        Algo::Gd => Ok(1.0 / need("sigma_max_global", c.sigma_max_global)?),
        Algo::Newton => {
            let smax = need("sigma_max_global", c.sigma_max_global)?;
            let smin = need("sigma_min_global", c.sigma_min_global)?;
            Ok(smin / smax)
        }
        Algo::Ngd => {
            let k = need("kappa_star", c.kappa_star)?;
            let bu = need("beta_u", c.beta_u)?;
            let bl = need("beta_l", c.beta_l)?;
            let d = need("delta", c.delta)?;
            Ok((bl / (bu * k)).sqrt() * d)
        }
    }
}

/// One iterate of the trace.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub step: usize,
    pub tau: TauParam,
    pub loss: f64,
    pub grad_norm: f64,
    /// Distance to the data parameter.
    pub dist: f64,
    /// Running minimum of `dist` up to and including this step.
    pub min_dist: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientVanished,
    TargetReached,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub stop_reason: StopReason,
}

impl Trace {
    pub fn final_record(&self) -> &TraceRecord {
        self.records.last().expect("trace holds at least the initial iterate")
    }

    pub fn min_dist(&self) -> f64 {
        self.final_record().min_dist
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One parameter update. Newton requires the Hessian; the others ignore it.
pub fn step(
    cfg: &AlgoConfig,
    tau: &TauParam,
    grad: &[f64],
    hess: Option<&SymMat>,
) -> Result<TauParam, OptimError> {
    cfg.validate()?;
    let v = tau.as_vec();
    if grad.len() != v.len() {
        return Err(OptimError::Config(format!(
            "gradient dimension {} does not match parameter dimension {}",
            grad.len(),
            v.len()
        )));
    }
    let direction: Vec<f64> = match cfg.algo {
        Algo::Gd => grad.to_vec(),
        Algo::Ngd => {
            let n = norm(grad);
            if n < 1e-300 {
                return Err(OptimError::ZeroGradient);
            }
            grad.iter().map(|g| g / n).collect()
        }
        Algo::Newton => {
            let h = hess.ok_or_else(|| {
                OptimError::Config("Newton step requires a Hessian".into())
            })?;
            newton_direction(h, grad, 0)?
        }
    };
    let new: Vec<f64> = v.iter().zip(&direction).map(|(x, d)| x - cfg.eta * d).collect();
    Ok(TauParam::from_vec(&new))
}

/// Solves H d = g through the eigendecomposition, refusing pivots below
/// 1e-14 of the spectral radius.
fn newton_direction(h: &SymMat, grad: &[f64], step_idx: usize) -> Result<Vec<f64>, OptimError> {
    let eig = sym_eigen(h)?;
    let (sigma_min, sigma_max) = eig.singular_extremes();
    let floor = 1e-14 * sigma_max;
    if sigma_min < floor || sigma_max == 0.0 {
        return Err(OptimError::SingularHessian { step: step_idx, sigma_min, floor });
    }
    let dim = grad.len();
    let mut d = vec![0.0; dim];
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let vk = &eig.eigenvectors[k];
        let proj: f64 = vk.iter().zip(grad).map(|(a, b)| a * b).sum();
        let c = proj / lam;
        for i in 0..dim {
            d[i] += c * vk[i];
        }
    }
    Ok(d)
}

fn record_for(obj: &Objective, step: usize, tau: TauParam, loss: f64, grad_norm: f64, prev_min: f64) -> TraceRecord {
    let dist = tau.dist(&obj.tau_star);
    TraceRecord { step, tau, loss, grad_norm, dist, min_dist: prev_min.min(dist) }
}

/// Runs the configured algorithm on population quantities, recording every
/// iterate from the start point through the stopping step.
pub fn run(obj: &Objective, cfg: &AlgoConfig, tau0: &TauParam) -> Result<Trace, OptimError> {
    cfg.validate()?;
    let mut records: Vec<TraceRecord> = Vec::with_capacity(cfg.max_steps + 1);
    let mut tau = tau0.clone();
    let mut loss = obj.population_loss(&tau)?;
    let mut grad = obj.population_gradient(&tau)?;
    loop {
        let prev_min = records.last().map(|r| r.min_dist).unwrap_or(f64::INFINITY);
        let gn = norm(&grad);
        let rec = record_for(obj, records.len(), tau.clone(), loss, gn, prev_min);
        let dist = rec.dist;
        records.push(rec);
        if gn < cfg.grad_tol {
            return Ok(Trace { records, stop_reason: StopReason::GradientVanished });
        }
        if let Some(delta) = cfg.target_delta {
            if dist <= delta {
                return Ok(Trace { records, stop_reason: StopReason::TargetReached });
            }
        }
        if records.len() > cfg.max_steps {
            return Ok(Trace { records, stop_reason: StopReason::BudgetExhausted });
        }
        let step_idx = records.len();
        let hess = match cfg.algo {
            Algo::Newton => Some(obj.population_hessian(&tau)?),
            _ => None,
        };
        let next = match step(cfg, &tau, &grad, hess.as_ref()) {
            Ok(t) => t,
            Err(OptimError::SingularHessian { sigma_min, floor, .. }) => {
                return Err(OptimError::SingularHessian { step: step_idx, sigma_min, floor })
            }
            Err(e) => return Err(e),
        };
        if !next.is_finite() || norm(&next.as_vec()) >= DIVERGENCE_NORM {
            return Err(OptimError::Diverged {
                step: step_idx,
                trace: Trace { records, stop_reason: StopReason::BudgetExhausted },
            });
        }
        tau = next;
        loss = obj.population_loss(&tau)?;
        grad = obj.population_gradient(&tau)?;
    }
}

/// Runs the configured algorithm on per-step empirical gradients, drawing a
/// fresh batch of the given size each iteration from streams derived from
/// the seed. Newton is not supported here.
pub fn run_batched(
    obj: &Objective,
    cfg: &AlgoConfig,
    tau0: &TauParam,
    batch_size: usize,
    clip: &ClipPolicy,
    seed: u64,
) -> Result<Trace, OptimError> {
    cfg.validate()?;
    if cfg.algo == Algo::Newton {
        return Err(OptimError::Config("Newton is not supported with batched gradients".into()));
    }
    if batch_size == 0 {
        return Err(OptimError::Config("batch size must be at least 1".into()));
    }
    let mut records: Vec<TraceRecord> = Vec::with_capacity(cfg.max_steps + 1);
    let mut tau = tau0.clone();
    loop {
        let t = records.len();
        let batch = Batch::sample(&obj.family, &obj.tau_star, &obj.tau_q, batch_size, mix_seed(seed, t as u64))?;
        let loss = obj.empirical_loss(&tau, &batch, clip)?;
        let grad = obj.empirical_gradient(&tau, &batch, clip)?;
        let gn = norm(&grad);
        let prev_min = records.last().map(|r| r.min_dist).unwrap_or(f64::INFINITY);
        let rec = record_for(obj, t, tau.clone(), loss, gn, prev_min);
        let dist = rec.dist;
        records.push(rec);
        if gn < cfg.grad_tol {
            return Ok(Trace { records, stop_reason: StopReason::GradientVanished });
        }
        if let Some(delta) = cfg.target_delta {
            if dist <= delta {
                return Ok(Trace { records, stop_reason: StopReason::TargetReached });
            }
        }
        if records.len() > cfg.max_steps {
            return Ok(Trace { records, stop_reason: StopReason::BudgetExhausted });
        }
        let step_idx = records.len();
        let next = step(cfg, &tau, &grad, None)?;
        if !next.is_finite() || norm(&next.as_vec()) >= DIVERGENCE_NORM {
            return Err(OptimError::Diverged {
                step: step_idx,
                trace: Trace { records, stop_reason: StopReason::BudgetExhausted },
            });
        }
        tau = next;
    }
}
