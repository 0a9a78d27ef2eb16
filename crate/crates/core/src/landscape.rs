//! Landscape measurement and certification: Hessian eigenvalue extremes,
//! condition numbers, Bhattacharyya overlap, neighborhood smoothness
//! constants, annulus gradient probes, stall/budget protocols for the
//! optimizers, and a pass/fail report aggregating every claim the library
//! certifies.

use crate::expfam::{mix_seed, FamilyBounds, FamilySpec, NormalSampler, SplitMix64, TauParam};
use crate::numerics::{sym_eigen, NumericsError, QuadratureSpec};
use crate::objective::{
    integrate_scaled, Backend, ClipPolicy, LossKind, Objective, ObjectiveError,
};
use crate::optim::{run, run_batched, Algo, AlgoConfig, OptimError, StopReason};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Expfam(#[from] crate::expfam::ExpfamError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Hessian extremes underflow at the optimum: sigma_min = {sigma_min:e}, log10(sigma_max) = {log10_sigma_max}")]
    Underflow { sigma_min: f64, log10_sigma_max: f64 },
}

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
    /// The check could not be evaluated (an error occurred); treated as a
    /// failure for exit-status purposes and rendered as FAIL with a note.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub id: String,
    /// One-line description of the claim being checked.
    pub anchor: String,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Extra context: secondary thresholds, corrected diagnostics, errors.
    pub note: String,
}

impl CheckRecord {
    fn le(id: String, anchor: &str, measured: f64, bound: f64, tol: f64) -> Self {
        let verdict = if measured <= bound + tol { Verdict::Pass } else { Verdict::Fail };
        CheckRecord { id, anchor: anchor.into(), measured, bound, tolerance: tol, verdict, note: String::new() }
    }

    fn ge(id: String, anchor: &str, measured: f64, bound: f64, tol: f64) -> Self {
        let verdict = if measured >= bound - tol { Verdict::Pass } else { Verdict::Fail };
        CheckRecord { id, anchor: anchor.into(), measured, bound, tolerance: tol, verdict, note: String::new() }
    }

    fn abs(id: String, anchor: &str, measured: f64, bound: f64, tol: f64) -> Self {
        let verdict = if (measured - bound).abs() <= tol { Verdict::Pass } else { Verdict::Fail };
        CheckRecord { id, anchor: anchor.into(), measured, bound, tolerance: tol, verdict, note: String::new() }
    }

    /// Pass iff measured lies in [lo, hi]; the report's bound column holds
    /// the upper edge and the note records the full window.
    fn window(id: String, anchor: &str, measured: f64, lo: f64, hi: f64) -> Self {
        let verdict = if measured >= lo && measured <= hi { Verdict::Pass } else { Verdict::Fail };
        CheckRecord {
            id,
            anchor: anchor.into(),
            measured,
            bound: hi,
            tolerance: 0.0,
            verdict,
            note: format!("window [{lo:.9e}, {hi:.9e}]"),
        }
    }

    fn skip(id: String, anchor: &str, note: String) -> Self {
        CheckRecord { id, anchor: anchor.into(), measured: f64::NAN, bound: f64::NAN, tolerance: 0.0, verdict: Verdict::Skip, note }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = note;
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct LandscapeReport {
    pub checks: Vec<CheckRecord>,
}

impl LandscapeReport {
    pub fn all_non_skipped_pass(&self) -> bool {
        self.checks.iter().all(|c| matches!(c.verdict, Verdict::Pass | Verdict::Skip))
    }

    pub fn has_inconclusive(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Inconclusive)
    }

    /// One check per line:
    /// `PASS|FAIL|SKIP <claim-id> measured=<v> bound=<b> anchor="<...>"`,
    /// with an extra `note="..."` field when the check carries one.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let token = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail | Verdict::Inconclusive => "FAIL",
                Verdict::Skip => "SKIP",
            };
            out.push_str(&format!(
                "{token} {} measured={:.9e} bound={:.9e} anchor=\"{}\"",
                c.id, c.measured, c.bound, c.anchor
            ));
            if !c.note.is_empty() {
                out.push_str(&format!(" note=\"{}\"", c.note));
            }
            out.push('\n');
        }
        out
    }

    /// Machine-readable CSV of the same checks.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("id,verdict,measured,bound,tolerance,anchor,note\n");
        for c in &self.checks {
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Skip => "skip",
                Verdict::Inconclusive => "inconclusive",
            };
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},\"{}\",\"{}\"\n",
                c.id, verdict, c.measured, c.bound, c.tolerance, c.anchor, c.note
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Pointwise landscape measurements
// ---------------------------------------------------------------------------

fn require_accurate_backend(obj: &Objective) -> Result<(), LandscapeError> {
    match obj.backend {
        Backend::Quadrature(_) => Ok(()),
        Backend::MonteCarlo { n, .. } if n >= 100_000 => Ok(()),
        Backend::MonteCarlo { n, .. } => Err(LandscapeError::Precondition(format!(
            "Monte Carlo backend needs n >= 100000 for eigenvalue extremes, got {n}"
        ))),
    }
}

/// Smallest and largest singular values of the population Hessian at tau.
pub fn hessian_extremes(obj: &Objective, tau: &TauParam) -> Result<(f64, f64), LandscapeError> {
    require_accurate_backend(obj)?;
    let h = obj.population_hessian(tau)?;
    let eig = sym_eigen(&h)?;
    Ok(eig.singular_extremes())
}

/// sigma_max / sigma_min of the Hessian at the data parameter.
pub fn condition_number_at_optimum(obj: &Objective) -> Result<f64, LandscapeError> {
    let (smin, smax) = hessian_extremes(obj, &obj.tau_star.clone())?;
    if smin < 1e-300 {
        return Err(LandscapeError::Underflow { sigma_min: smin, log10_sigma_max: smax.log10() });
    }
    Ok(smax / smin)
}

/// Bhattacharyya overlap of two normalized members, by the diagonal-Gaussian
/// closed form and (for 1-d sample spaces) by direct quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Overlap {
    pub closed_form: f64,
    pub quadrature: Option<f64>,
}

impl Overlap {
    /// Absolute closed-form/quadrature discrepancy, when both routes ran.
    pub fn agreement(&self) -> Option<f64> {
        self.quadrature.map(|q| (q - self.closed_form).abs())
    }
}

pub fn bhattacharyya(
    family: &FamilySpec,
    tau1: &TauParam,
    tau2: &TauParam,
) -> Result<Overlap, LandscapeError> {
    for tau in [tau1, tau2] {
        let expect = family.log_partition(&tau.theta)?;
        if (tau.alpha - expect).abs() > 1e-8 * (1.0 + expect.abs()) {
            return Err(LandscapeError::Precondition(format!(
                "overlap needs normalized members; alpha = {}, log partition = {expect}",
                tau.alpha
            )));
        }
    }
    let mv1 = family.mean_and_var(&tau1.theta)?;
    let mv2 = family.mean_and_var(&tau2.theta)?;
    let mut log_bc = 0.0;
    for ((m1, v1), (m2, v2)) in mv1.iter().zip(&mv2) {
        let s = v1 + v2;
        log_bc += 0.5 * ((2.0 * (v1 * v2).sqrt() / s).ln()) - (m1 - m2) * (m1 - m2) / (4.0 * s);
    }
    let closed_form = log_bc.exp();
    let quadrature = if family.sample_dim() == 1 {
        let (m1, v1) = mv1[0];
        let (m2, v2) = mv2[0];
        let sd = v1.max(v2).sqrt();
        let spec = QuadratureSpec::new(m1.min(m2) - 12.0 * sd, m1.max(m2) + 12.0 * sd);
        let v = integrate_scaled(
            |x| (0.5 * (family.log_pdf(tau1, &[x]) + family.log_pdf(tau2, &[x])), 1.0),
            &spec,
        )?;
        Some(v)
    } else {
        None
    };
    Ok(Overlap { closed_form, quadrature })
}

/// Empirical smoothness constants of the Hessian within the 1/beta_Z ball
/// around the optimum.
#[derive(Debug, Clone, Copy)]
pub struct NeighborhoodConstants {
    /// max over samples of sigma_max(H(tau)) / sigma_max(H(tau_*)).
    pub beta_u: f64,
    /// min over samples of sigma_min(H(tau)) / sigma_min(H(tau_*)).
    pub beta_l: f64,
    /// Ball radius 1/beta_Z (beta_Z measured over the noise-to-data
    /// segment; unit radius if the segment is degenerate).
    pub radius: f64,
    pub samples_used: usize,
}

/// Measures beta_u / beta_l over n random points tau_* + c*u with u uniform
/// on the unit sphere and c in (0, radius). n = 0 returns the neutral
/// constants (1, 1).
pub fn neighborhood_constants(
    obj: &Objective,
    n_samples: usize,
    seed: u64,
) -> Result<NeighborhoodConstants, LandscapeError> {
    require_accurate_backend(obj)?;
    let bounds = segment_family_bounds(obj)?;
    let radius = if bounds.beta_z > 0.0 { 1.0 / bounds.beta_z } else { 1.0 };
    let (s_min_star, s_max_star) = hessian_extremes(obj, &obj.tau_star.clone())?;
    if s_min_star <= 0.0 || s_max_star <= 0.0 {
        return Err(LandscapeError::Precondition(
            "Hessian at the optimum must have positive eigenvalue extremes".into(),
        ));
    }
    let mut beta_u = 1.0_f64;
    let mut beta_l = 1.0_f64;
    let dim = obj.family.suff_stat_dim;
    let mut normals = NormalSampler::new(mix_seed(seed, 0xba11));
    let mut radii = SplitMix64::new(mix_seed(seed, 0xc0de));
    for _ in 0..n_samples {
        let mut u: Vec<f64>;
        loop {
            u = (0..dim).map(|_| normals.next()).collect();
            let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-12 {
                for v in u.iter_mut() {
                    *v /= n;
                }
                break;
            }
        }
        let c = radius * radii.next_f64();
        let base = obj.tau_star.as_vec();
        let point: Vec<f64> = base.iter().zip(&u).map(|(b, d)| b + c * d).collect();
        let (smin, smax) = hessian_extremes(obj, &TauParam::from_vec(&point))?;
        beta_u = beta_u.max(smax / s_max_star);
        beta_l = beta_l.min(smin / s_min_star);
    }
    Ok(NeighborhoodConstants { beta_u, beta_l, radius, samples_used: n_samples })
}

/// Family constants measured over 33 evenly spaced natural parameters on
/// the noise-to-data segment.
fn segment_family_bounds(obj: &Objective) -> Result<FamilyBounds, LandscapeError> {
    let grid: Vec<Vec<f64>> = (0..33)
        .map(|i| {
            let t = i as f64 / 32.0;
            obj.tau_q
                .theta
                .iter()
                .zip(&obj.tau_star.theta)
                .map(|(a, b)| a + t * (b - a))
                .collect()
        })
        .collect();
    Ok(FamilyBounds::measure(&obj.family, &grid)?)
}

/// |<grad L(tau), unit(tau_* - tau)>|: the gradient component along the
/// direction pointing at the optimum.
pub fn projected_gradient(obj: &Objective, tau: &TauParam) -> Result<f64, LandscapeError> {
    let g = obj.population_gradient(tau)?;
    let a = tau.as_vec();
    let b = obj.tau_star.as_vec();
    let mut diff: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
    let n = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(LandscapeError::Precondition("projection undefined at the optimum itself".into()));
    }
    for v in diff.iter_mut() {
        *v /= n;
    }
    Ok(g.iter().zip(&diff).map(|(x, y)| x * y).sum::<f64>().abs())
}

#[derive(Debug, Clone)]
pub struct AnnulusPoint {
    pub tau: TauParam,
    pub projected_gradient: f64,
}

/// Samples n points uniformly (by area) in the ring
/// {0.1 R <= ||tau - tau_*|| <= 0.2 R} around the optimum of a 1-d
/// logistic-loss objective and reports the projected gradient at each.
pub fn annulus_probe(
    obj: &Objective,
    n_points: usize,
    seed: u64,
) -> Result<Vec<AnnulusPoint>, LandscapeError> {
    if obj.loss_kind != LossKind::Nce {
        return Err(LandscapeError::Precondition("annulus probe is defined for the logistic loss".into()));
    }
    if !matches!(obj.backend, Backend::Quadrature(_)) {
        return Err(LandscapeError::Precondition("annulus probe needs the quadrature backend".into()));
    }
    let r = separation(obj);
    if r < 4.0 {
        return Err(LandscapeError::Precondition(format!(
            "annulus needs separation R >= 4, got {r}"
        )));
    }
    let (r1, r2) = (0.1 * r, 0.2 * r);
    let mut rng = SplitMix64::new(mix_seed(seed, 0xa221));
    let base = obj.tau_star.as_vec();
    let mut out = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let u = rng.next_f64();
        let rad = (r1 * r1 + u * (r2 * r2 - r1 * r1)).sqrt();
        let phi = rng.next_range(0.0, std::f64::consts::TAU);
        let point = TauParam::from_vec(&[base[0] + rad * phi.cos(), base[1] + rad * phi.sin()]);
        let pg = projected_gradient(obj, &point)?;
        out.push(AnnulusPoint { tau: point, projected_gradient: pg });
    }
    Ok(out)
}

/// Natural-parameter separation between the data and noise members.
pub fn separation(obj: &Objective) -> f64 {
    obj.tau_star
        .theta
        .iter()
        .zip(&obj.tau_q.theta)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// Segment profiling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SegmentPoint {
    /// Interpolation coordinate in [0, 1] from the noise parameter to the
    /// data parameter.
    pub t: f64,
    pub tau: TauParam,
    pub dist: f64,
    pub loss: f64,
    pub grad_norm: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Loss, gradient norm, and Hessian extremes at n evenly spaced points on
/// the straight segment from the noise parameter to the data parameter.
pub fn segment_profile(obj: &Objective, n_points: usize) -> Result<Vec<SegmentPoint>, LandscapeError> {
    if n_points < 2 {
        return Err(LandscapeError::Precondition("segment profile needs at least 2 points".into()));
    }
    let a = obj.tau_q.as_vec();
    let b = obj.tau_star.as_vec();
    let mut out = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let t = i as f64 / (n_points - 1) as f64;
        let v: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect();
        let tau = TauParam::from_vec(&v);
        let loss = obj.population_loss(&tau)?;
        let g = obj.population_gradient(&tau)?;
        let grad_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (sigma_min, sigma_max) = hessian_extremes(obj, &tau)?;
        out.push(SegmentPoint { t, dist: tau.dist(&obj.tau_star), tau, loss, grad_norm, sigma_min, sigma_max });
    }
    Ok(out)
}

/// Global Hessian eigenvalue extremes over the 33-point segment profile:
/// (min over points of sigma_min, max over points of sigma_max).
pub fn segment_extremes(obj: &Objective) -> Result<(f64, f64), LandscapeError> {
    let profile = segment_profile(obj, 33)?;
    let mut smin = f64::INFINITY;
    let mut smax = 0.0_f64;
    for p in &profile {
        smin = smin.min(p.sigma_min);
        smax = smax.max(p.sigma_max);
    }
    Ok((smin, smax))
}

// ---------------------------------------------------------------------------
// Dynamics protocols
// ---------------------------------------------------------------------------

/// Outcome of the R=16 stall comparison: plain gradient descent stalls far
/// from the optimum while normalized updates close most of the distance.
#[derive(Debug, Clone)]
pub struct StallOutcome {
    /// Overall minimum distance reached by logistic-loss gradient descent.
    pub gd_min_dist: f64,
    /// Final min-distance of logistic-loss normalized gradient descent.
    pub nce_ngd_final: f64,
    /// Final min-distance of exponential-loss normalized gradient descent
    /// with per-sample clipping, one entry per seeded run.
    pub ence_ngd_finals: Vec<f64>,
    /// 0.1 * R: the stall floor gradient descent must never cross.
    pub stall_floor: f64,
    pub gd_eta: f64,
    pub ngd_eta: f64,
}

/// Runs the stall comparison at R = 16 from the noise parameter with a
/// 100-step budget: population gradient descent and normalized gradient
/// descent on the logistic loss, and five seeded batched normalized runs on
/// the exponential loss (batch 512, per-sample norm cap 10, log-ratio cap
/// 80).
pub fn gd_stall_protocol(base_seed: u64) -> Result<StallOutcome, LandscapeError> {
    let r = 16.0;
    let obj = Objective::gaussian_1d(LossKind::Nce, r, 0.0)?;
    let (_, smax_q) = hessian_extremes(&obj, &obj.tau_q.clone())?;
    let gd_eta = 1.0 / smax_q;
    let gd_trace = run(&obj, &AlgoConfig::new(Algo::Gd, gd_eta, 100), &obj.tau_q.clone())?;
    let ngd_eta = r;
    let ngd_trace = run(&obj, &AlgoConfig::new(Algo::Ngd, ngd_eta, 100), &obj.tau_q.clone())?;
    let ence = Objective::gaussian_1d(LossKind::Ence, r, 0.0)?;
    let clip = ClipPolicy { grad_norm_cap: Some(10.0), log_ratio_cap: Some(80.0) };
    let mut ence_finals = Vec::with_capacity(5);
    for run_idx in 0..5u64 {
        let trace = run_batched(
            &ence,
            &AlgoConfig::new(Algo::Ngd, ngd_eta, 100),
            &ence.tau_q.clone(),
            512,
            &clip,
            base_seed ^ run_idx,
        )?;
        ence_finals.push(trace.min_dist());
    }
    Ok(StallOutcome {
        gd_min_dist: gd_trace.min_dist(),
        nce_ngd_final: ngd_trace.min_dist(),
        ence_ngd_finals: ence_finals,
        stall_floor: 0.1 * r,
        gd_eta,
        ngd_eta,
    })
}

#[derive(Debug, Clone)]
pub struct NewtonStallOutcome {
    pub eta: f64,
    pub sigma_min_global: f64,
    pub sigma_max_global: f64,
    /// Largest single-step decrease of the distance to the optimum.
    pub max_step_decrease: f64,
    pub start_dist: f64,
    pub final_dist: f64,
}

/// Newton with step size sigma_min_global / sigma_max_global (measured over
/// the noise-to-data segment) started inside the annulus: the iterates
/// barely move.
pub fn newton_stall_probe(r: f64, steps: usize) -> Result<NewtonStallOutcome, LandscapeError> {
    let obj = Objective::gaussian_1d(LossKind::Nce, r, 0.0)?;
    let (smin, smax) = segment_extremes(&obj)?;
    if smin <= 0.0 {
        return Err(LandscapeError::Precondition("segment sigma_min must be positive".into()));
    }
    let eta = smin / smax;
    let a = obj.tau_star.as_vec();
    let b = obj.tau_q.as_vec();
    let mut dir: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
    let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in dir.iter_mut() {
        *v /= n;
    }
    let start: Vec<f64> = a.iter().zip(&dir).map(|(x, d)| x + 0.15 * r * d).collect();
    let tau0 = TauParam::from_vec(&start);
    let mut cfg = AlgoConfig::new(Algo::Newton, eta, steps);
    cfg.grad_tol = 0.0;
    let trace = run(&obj, &cfg, &tau0)?;
    let mut max_dec = f64::NEG_INFINITY;
    for w in trace.records.windows(2) {
        max_dec = max_dec.max(w[0].dist - w[1].dist);
    }
    Ok(NewtonStallOutcome {
        eta,
        sigma_min_global: smin,
        sigma_max_global: smax,
        max_step_decrease: max_dec,
        start_dist: trace.records[0].dist,
        final_dist: trace.final_record().dist,
    })
}

#[derive(Debug, Clone)]
pub struct BudgetOutcome {
    pub steps_to_target: usize,
    pub reached: bool,
    pub eta: f64,
    pub kappa_star: f64,
    /// Midpoint moment-matrix eigenvalue ratio lambda_max / lambda_min.
    pub lambda_ratio: f64,
    pub beta_u: f64,
    pub beta_l: f64,
    /// 4 e^2 (lambda_max/lambda_min)^3 ||tau_0 - tau_*||^2 / delta^2.
    pub budget_lambda_form: f64,
    /// (beta_u kappa_star / beta_l) ||tau_0 - tau_*||^2 / delta^2.
    pub budget_beta_form: f64,
}

/// Runs exponential-loss normalized gradient descent from the noise
/// parameter with the certified step size
/// eta = sqrt(beta_l / (beta_u kappa_star)) * delta and reports the step
/// count against both budget formulas with measured constants.
pub fn ngd_budget_certificate(
    r: f64,
    delta: f64,
    base_seed: u64,
) -> Result<BudgetOutcome, LandscapeError> {
    if !(delta > 0.0) {
        return Err(LandscapeError::Precondition(format!("target distance must be positive, got {delta}")));
    }
    let obj = Objective::gaussian_1d(LossKind::Ence, r, 0.0)?;
    let kappa_star = condition_number_at_optimum(&obj)?;
    let mid_theta = vec![0.5 * (obj.tau_star.theta[0] + obj.tau_q.theta[0])];
    let mm = obj.family.moment_matrix(&mid_theta)?;
    let eig = sym_eigen(&mm)?;
    let (lmin, lmax) = eig.singular_extremes();
    let lambda_ratio = lmax / lmin;
    let nc = neighborhood_constants(&obj, 64, mix_seed(base_seed, 0xb7))?;
    let eta = (nc.beta_l / (nc.beta_u * kappa_star)).sqrt() * delta;
    let d0 = obj.tau_q.dist(&obj.tau_star);
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let budget_lambda_form = 4.0 * e2 * lambda_ratio.powi(3) * d0 * d0 / (delta * delta);
    let budget_beta_form = (nc.beta_u * kappa_star / nc.beta_l) * d0 * d0 / (delta * delta);
    let mut cfg = AlgoConfig::new(Algo::Ngd, eta, 20_000);
    cfg.target_delta = Some(delta);
    let trace = run(&obj, &cfg, &obj.tau_q.clone())?;
    Ok(BudgetOutcome {
        steps_to_target: trace.final_record().step,
        reached: trace.stop_reason == StopReason::TargetReached,
        eta,
        kappa_star,
        lambda_ratio,
        beta_u: nc.beta_u,
        beta_l: nc.beta_l,
        budget_lambda_form,
        budget_beta_form,
    })
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CertifySetup {
    pub family: FamilySpec,
    pub r_values: Vec<f64>,
    pub loss_kinds: Vec<LossKind>,
    pub base_seed: u64,
    /// When true the (slow) optimizer stall and budget protocols run too.
    pub include_dynamics: bool,
}

impl CertifySetup {
    pub fn new(r_values: Vec<f64>, loss_kinds: Vec<LossKind>, base_seed: u64) -> Self {
        CertifySetup {
            family: FamilySpec::gaussian_mean_1d(),
            r_values,
            loss_kinds,
            base_seed,
            include_dynamics: false,
        }
    }

    fn has(&self, kind: LossKind) -> bool {
        self.loss_kinds.contains(&kind)
    }

    fn rs_in(&self, allowed: &[f64]) -> Vec<f64> {
        self.r_values.iter().copied().filter(|r| allowed.iter().any(|a| (a - r).abs() < 1e-12)).collect()
    }
}

fn guard(id: &str, anchor: &str, f: impl FnOnce() -> Result<CheckRecord, LandscapeError>) -> CheckRecord {
    match f() {
        Ok(rec) => rec,
        Err(e) => CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            measured: f64::NAN,
            bound: f64::NAN,
            tolerance: 0.0,
            verdict: Verdict::Inconclusive,
            note: format!("evaluation error: {e}"),
        },
    }
}

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Runs every applicable claim check for the setup and aggregates the
/// verdicts. Individual check failures are verdicts; evaluation errors mark
/// the affected check inconclusive without aborting the rest.
pub fn certify(setup: &CertifySetup) -> LandscapeReport {
    let mut checks = Vec::new();
    let r_max = setup.r_values.iter().copied().fold(0.0_f64, f64::max);
    if r_max < 1.0 {
        for r in &setup.r_values {
            checks.push(CheckRecord::skip(
                format!("setup-r{r}"),
                "degenerate setup: the data and noise members are too close for the separation-regime claims",
                format!("no applicable claims at separation R = {r}"),
            ));
        }
        return LandscapeReport { checks };
    }
    if setup.family.sample_dim() != 1 {
        checks.push(CheckRecord::skip(
            "quadrature-suite".into(),
            "quadrature-backed landscape checks need a 1-dimensional sample space",
            format!("sample dimension is {}", setup.family.sample_dim()),
        ));
        return LandscapeReport { checks };
    }

    if setup.has(LossKind::Nce) {
        nce_static_checks(setup, &mut checks);
    }
    if setup.has(LossKind::Ence) {
        ence_static_checks(setup, &mut checks);
    }
    bc_checks(setup, &mut checks);
    if setup.include_dynamics {
        dynamics_checks(setup, &mut checks);
    }
    // Setup separations no criterion covers get an explicit skip marker.
    let covered = [1.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0];
    for r in &setup.r_values {
        if !covered.iter().any(|c| (c - r).abs() < 1e-12) {
            checks.push(CheckRecord::skip(
                format!("setup-r{r}"),
                "no certified claim is parameterized at this separation",
                String::new(),
            ));
        }
    }
    LandscapeReport { checks }
}

fn nce_objective(r: f64) -> Result<Objective, LandscapeError> {
    Ok(Objective::gaussian_1d(LossKind::Nce, r, 0.0)?)
}

fn nce_static_checks(setup: &CertifySetup, checks: &mut Vec<CheckRecord>) {
    for r in setup.rs_in(&[2.0, 4.0, 8.0, 16.0]) {
        let id = format!("init-loss-r{r}");
        checks.push(guard(&id, "", || {
            let obj = nce_objective(r)?;
            let v = obj.population_loss(&obj.tau_q.clone())?;
            Ok(CheckRecord::abs(
                id.clone(),
                "logistic population loss at the noise parameter equals log 2",
                v,
                std::f64::consts::LN_2,
                1e-9,
            ))
        }));
    }
    for r in setup.rs_in(&[4.0, 6.0, 8.0]) {
        let id = format!("opt-loss-window-r{r}");
        checks.push(guard(&id, "", || {
            let obj = nce_objective(r)?;
            let v = obj.population_loss(&obj.tau_star.clone())?;
            let scaled = v * (r * r / 8.0).exp();
            Ok(CheckRecord::window(
                id.clone(),
                "optimal logistic loss times exp(R^2/8) lies in [1/2, 2]",
                scaled,
                0.5,
                2.0,
            )
            .with_note(format!("window [5e-1, 2e0]; raw optimal loss {v:.9e}")))
        }));
    }
    for r in setup.rs_in(&[4.0, 6.0, 8.0]) {
        let scale = (-r * r / 8.0).exp();
        let id_s = format!("opt-smoothness-r{r}");
        checks.push(guard(&id_s, "", || {
            let obj = nce_objective(r)?;
            let (_, smax) = hessian_extremes(&obj, &obj.tau_star.clone())?;
            Ok(CheckRecord::le(
                id_s.clone(),
                "largest Hessian eigenvalue at the optimum is at most (R/sqrt(2 pi)) exp(-R^2/8)",
                smax,
                r / SQRT_2PI * scale,
                0.0,
            ))
        }));
        let id_c = format!("opt-curvature-r{r}");
        checks.push(guard(&id_c, "", || {
            let obj = nce_objective(r)?;
            let (smin, _) = hessian_extremes(&obj, &obj.tau_star.clone())?;
            Ok(CheckRecord::ge(
                id_c.clone(),
                "smallest Hessian eigenvalue at the optimum is at least (1/(4 R sqrt(2 pi))) exp(-R^2/8)",
                smin,
                scale / (4.0 * r * SQRT_2PI),
                0.0,
            )
            .with_note(format!("measured/bound ratio {:.6e}", smin / (scale / (4.0 * r * SQRT_2PI)))))
        }));
    }
    for r in setup.rs_in(&[4.0, 8.0, 16.0]) {
        let id = format!("init-curvature-r{r}");
        checks.push(guard(&id, "", || {
            let obj = nce_objective(r)?;
            let (_, smax) = hessian_extremes(&obj, &obj.tau_q.clone())?;
            let derived = r * r / 8.0;
            let center = (r * r + 2.0) / 8.0;
            let ok = smax >= derived && smax >= 0.5 * center && smax <= 2.0 * center;
            let mut rec = CheckRecord {
                id: id.clone(),
                anchor: "derived-correction: largest Hessian eigenvalue at the noise parameter reaches R^2/8 and lies within a factor 2 of (R^2+2)/8"
                    .into(),
                measured: smax,
                bound: derived,
                tolerance: 0.0,
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                note: String::new(),
            };
            rec.note = format!(
                "stated threshold R^2/2 = {:.9e} shown for reference; factor-2 window [{:.9e}, {:.9e}]",
                r * r / 2.0,
                0.5 * center,
                2.0 * center
            );
            Ok(rec)
        }));
    }
    for r in setup.rs_in(&[8.0, 12.0]) {
        let id = format!("annulus-flat-r{r}");
        let seed = setup.base_seed;
        checks.push(guard(&id, "", || {
            let obj = nce_objective(r)?;
            let points = annulus_probe(&obj, 50, mix_seed(seed, r.to_bits()))?;
            let max_pg = points.iter().map(|p| p.projected_gradient).fold(0.0_f64, f64::max);
            Ok(CheckRecord::le(
                id.clone(),
                "projected gradients across the annulus stay below exp(-0.6 R^2/8)",
                max_pg,
                (-0.6 * r * r / 8.0).exp(),
                0.0,
            ))
        }));
    }
    // Loss-gap/distance ratio near the optimum along the approach
    // direction, checked against the claimed two-sided constants.
    for r in setup.rs_in(&[4.0, 6.0, 8.0]) {
        let id = format!("loss-dist-ratio-r{r}");
        checks.push(guard(&id, "", || {
            let obj = nce_objective(r)?;
            let l_star = obj.population_loss(&obj.tau_star.clone())?;
            let a = obj.tau_star.as_vec();
            let b = obj.tau_q.as_vec();
            let mut dir: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
            let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in dir.iter_mut() {
                *v /= n;
            }
            let delta = 0.01 * r;
            let point: Vec<f64> = a.iter().zip(&dir).map(|(x, d)| x + delta * d).collect();
            let loss = obj.population_loss(&TauParam::from_vec(&point))?;
            let ratio = (loss - l_star) / (r * (-r * r / 8.0).exp() * delta * delta);
            Ok(CheckRecord::window(
                id.clone(),
                "near-optimum loss gap over R exp(-R^2/8) dist^2 lies in [1/(8 sqrt(2 pi)), 4]",
                ratio,
                1.0 / (8.0 * SQRT_2PI),
                4.0,
            ))
        }));
    }
    // Logistic-loss condition number against the overlap-based bound, over
    // seeded nearby pairs.
    let id = "kappa-bc-bound".to_string();
    let seed = setup.base_seed;
    checks.push(guard(&id, "", || {
        let pairs = nearby_pairs(20, mix_seed(seed, 0x11b));
        let mut worst: Option<(f64, f64, f64)> = None; // (margin, kappa, bound)
        for (t1, t2) in &pairs {
            let obj = Objective::gaussian_1d(LossKind::Nce, *t1, *t2)?;
            let kappa = condition_number_at_optimum(&obj)?;
            let mid = vec![0.5 * (t1 + t2)];
            let eig = sym_eigen(&obj.family.moment_matrix(&mid)?)?;
            let (lmin, lmax) = eig.singular_extremes();
            let bc = bhattacharyya(&obj.family, &obj.tau_star, &obj.tau_q)?.closed_form;
            let bound = (lmax / (2.0 * lmin)) / bc;
            let margin = kappa / bound;
            if worst.map(|(m, _, _)| margin > m).unwrap_or(true) {
                worst = Some((margin, kappa, bound));
            }
        }
        let (_, kappa, bound) = worst.expect("at least one pair");
        Ok(CheckRecord::le(
            id.clone(),
            "logistic-loss condition number at the optimum is at most (lambda_max/(2 lambda_min))/BC over nearby pairs",
            kappa,
            bound * (1.0 + 1e-6),
            0.0,
        )
        .with_note(format!("doubled bound (lambda_max/lambda_min)/BC = {:.9e} for the worst pair", 2.0 * bound)))
    }));
}

fn ence_static_checks(setup: &CertifySetup, checks: &mut Vec<CheckRecord>) {
    let id = "ence-kappa-midpoint".to_string();
    let seed = setup.base_seed;
    checks.push(guard(&id, "", || {
        let mut rng = SplitMix64::new(mix_seed(seed, 0x8a8));
        let mut worst: Option<(f64, f64, f64)> = None;
        for _ in 0..20 {
            let t1 = rng.next_range(-3.0, 3.0);
            let mut t2 = rng.next_range(-3.0, 3.0);
            if (t1 - t2).abs() < 1e-3 {
                t2 += 0.5;
            }
            let obj = Objective::gaussian_1d(LossKind::Ence, t1, t2)?;
            let kappa = condition_number_at_optimum(&obj)?;
            let mid = vec![0.5 * (t1 + t2)];
            let eig = sym_eigen(&obj.family.moment_matrix(&mid)?)?;
            let (lmin, lmax) = eig.singular_extremes();
            let bound = lmax / lmin + 1e-6;
            let margin = kappa / bound;
            if worst.map(|(m, _, _)| margin > m).unwrap_or(true) {
                worst = Some((margin, kappa, bound));
            }
        }
        let (_, kappa, bound) = worst.expect("at least one pair");
        Ok(CheckRecord::le(
            id.clone(),
            "exponential-loss condition number at the optimum is bounded by the midpoint moment-matrix eigenvalue ratio",
            kappa,
            bound,
            0.0,
        ))
    }));
    for r in setup.rs_in(&[1.0, 2.0, 4.0]) {
        let id = format!("ence-opt-bc-r{r}");
        checks.push(guard(&id, "", || {
            let obj = Objective::gaussian_1d(LossKind::Ence, r, 0.0)?;
            let loss = obj.population_loss(&obj.tau_star.clone())?;
            let bc = bhattacharyya(&obj.family, &obj.tau_star, &obj.tau_q)?.closed_form;
            Ok(CheckRecord::le(
                id.clone(),
                "exponential-loss optimum equals the Bhattacharyya coefficient",
                (loss - bc).abs(),
                1e-8,
                0.0,
            ))
        }));
    }
}

fn bc_checks(setup: &CertifySetup, checks: &mut Vec<CheckRecord>) {
    let fam = setup.family;
    let seed = setup.base_seed;
    let id = "bc-dual-route".to_string();
    checks.push(guard(&id, "", || {
        let mut rng = SplitMix64::new(mix_seed(seed, 0xdd1));
        let mut max_diff = 0.0_f64;
        for _ in 0..20 {
            let t1 = rng.next_range(-3.0, 3.0);
            let t2 = rng.next_range(-3.0, 3.0);
            let tau1 = fam.tau_of_theta(&[t1])?;
            let tau2 = fam.tau_of_theta(&[t2])?;
            let ov = bhattacharyya(&fam, &tau1, &tau2)?;
            max_diff = max_diff.max(ov.agreement().expect("1-d quadrature route"));
        }
        Ok(CheckRecord::le(
            id.clone(),
            "closed-form and quadrature Bhattacharyya coefficients agree",
            max_diff,
            1e-8,
            0.0,
        ))
    }));
    let id = "bc-symmetry".to_string();
    checks.push(guard(&id, "", || {
        let mut rng = SplitMix64::new(mix_seed(seed, 0x5e5));
        let mut max_asym = 0.0_f64;
        for _ in 0..20 {
            let t1 = rng.next_range(-3.0, 3.0);
            let t2 = rng.next_range(-3.0, 3.0);
            let tau1 = fam.tau_of_theta(&[t1])?;
            let tau2 = fam.tau_of_theta(&[t2])?;
            let a = bhattacharyya(&fam, &tau1, &tau2)?.closed_form;
            let b = bhattacharyya(&fam, &tau2, &tau1)?.closed_form;
            if !(a > 0.0 && a <= 1.0) {
                return Err(LandscapeError::Precondition(format!("overlap {a} outside (0, 1]")));
            }
            max_asym = max_asym.max((a - b).abs());
        }
        Ok(CheckRecord::le(
            id.clone(),
            "Bhattacharyya coefficient is symmetric in its arguments",
            max_asym,
            1e-12,
            0.0,
        ))
    }));
    let id = "bc-lower-bound".to_string();
    checks.push(guard(&id, "", || {
        let pairs = nearby_pairs(20, mix_seed(seed, 0x11b));
        let mut min_bc = f64::INFINITY;
        for (t1, t2) in &pairs {
            let tau1 = fam.tau_of_theta(&[*t1])?;
            let tau2 = fam.tau_of_theta(&[*t2])?;
            min_bc = min_bc.min(bhattacharyya(&fam, &tau1, &tau2)?.closed_form);
        }
        Ok(CheckRecord::ge(
            id.clone(),
            "pairs within squared distance 4/lambda_max have Bhattacharyya coefficient at least 1/2",
            min_bc,
            0.5,
            1e-9,
        ))
    }));
}

/// Seeded pairs (theta1, theta2) with |theta| <= 3 and
/// ||theta1 - theta2||^2 <= 4 / lambda_max, with lambda_max measured over
/// the pair's endpoint and midpoint moment matrices (shrinking the
/// separation until the measured constraint holds).
pub fn nearby_pairs(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let fam = FamilySpec::gaussian_mean_1d();
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let t1 = rng.next_range(-3.0, 3.0);
        let sign = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
        let frac = rng.next_f64();
        // Initial guess from the endpoint moment matrix, then shrink until
        // the set-measured lambda_max accepts the separation.
        let lam_at = |t: f64| -> f64 {
            let eig = sym_eigen(&fam.moment_matrix(&[t]).unwrap()).unwrap();
            eig.singular_extremes().1
        };
        let mut sep = frac * 2.0 / lam_at(t1).sqrt();
        let mut t2 = t1 + sign * sep;
        for _ in 0..64 {
            let lmax = lam_at(t1).max(lam_at(t2)).max(lam_at(0.5 * (t1 + t2)));
            if sep * sep <= 4.0 / lmax && t2.abs() <= 3.0 {
                break;
            }
            sep *= 0.9;
            t2 = t1 + sign * sep;
        }
        if t2.abs() <= 3.0 && sep > 1e-6 {
            out.push((t1, t2));
        }
    }
    out
}

fn dynamics_checks(setup: &CertifySetup, checks: &mut Vec<CheckRecord>) {
    let seed = setup.base_seed;
    if setup.rs_in(&[16.0]).is_empty() {
        checks.push(CheckRecord::skip(
            "stall-suite".into(),
            "stall comparisons are parameterized at separation R = 16",
            "setup does not include R = 16".into(),
        ));
    } else {
        let stall = guard("gd-stall-r16", "", || {
            let out = gd_stall_protocol(seed)?;
            Ok(CheckRecord::ge(
                "gd-stall-r16".into(),
                "plain logistic-loss gradient descent from the noise parameter never gets within 0.1 R of the optimum",
                out.gd_min_dist,
                out.stall_floor,
                0.0,
            )
            .with_note(format!("step size {:.6e}", out.gd_eta)))
        });
        checks.push(stall);
        checks.push(guard("ngd-vs-gd-r16", "", || {
            let out = gd_stall_protocol(seed)?;
            Ok(CheckRecord::le(
                "ngd-vs-gd-r16".into(),
                "normalized logistic-loss updates end at least 10x closer than plain gradient descent",
                out.nce_ngd_final,
                0.1 * out.gd_min_dist,
                0.0,
            ))
        }));
        checks.push(guard("ence-ngd-vs-gd-r16", "", || {
            let out = gd_stall_protocol(seed)?;
            let worst = out.ence_ngd_finals.iter().copied().fold(0.0_f64, f64::max);
            Ok(CheckRecord::le(
                "ence-ngd-vs-gd-r16".into(),
                "batched exponential-loss normalized updates end at least 10x closer than plain gradient descent in every seeded run",
                worst,
                0.1 * out.gd_min_dist,
                0.0,
            ))
        }));
        checks.push(guard("newton-stall-r16", "", || {
            let out = newton_stall_probe(16.0, 100)?;
            Ok(CheckRecord::le(
                "newton-stall-r16".into(),
                "Newton with the measured global step-size ratio decreases the distance by less than 1e-6 per step inside the annulus",
                out.max_step_decrease,
                1e-6,
                0.0,
            )
            .with_note(format!("eta {:.6e}", out.eta)))
        }));
    }
    for r in setup.rs_in(&[2.0, 4.0]) {
        for delta in [0.1, 0.05] {
            let id = format!("ngd-budget-r{r}-delta{delta}");
            checks.push(guard(&id, "", || {
                let out = ngd_budget_certificate(r, delta, seed)?;
                let bound = out.budget_lambda_form.min(out.budget_beta_form);
                let mut rec = CheckRecord::le(
                    id.clone(),
                    "normalized exponential-loss descent reaches the target distance within both measured budget formulas",
                    out.steps_to_target as f64,
                    bound,
                    0.0,
                );
                if !out.reached {
                    rec.verdict = Verdict::Fail;
                    rec.note = "target distance was never reached".into();
                } else {
                    rec.note = format!(
                        "budgets: lambda-form {:.3e}, beta-form {:.3e}; eta {:.6e}",
                        out.budget_lambda_form, out.budget_beta_form, out.eta
                    );
                }
                Ok(rec)
            }));
        }
    }
}
