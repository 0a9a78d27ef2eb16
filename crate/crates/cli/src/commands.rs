//! Subcommand implementations: `run` sweeps optimizer cells and persists
//! results, `verify` drives the certification suite, `landscape` dumps the
//! noise-to-data segment profile, and `presets` lists shipped configs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nce_landscape::expfam::mix_seed;
use nce_landscape::expfam::TauParam;
use nce_landscape::landscape::{
    certify, condition_number_at_optimum, hessian_extremes, neighborhood_constants,
    segment_extremes, segment_profile, CertifySetup, Verdict,
};
use nce_landscape::objective::{default_quadrature_spec, Backend, Batch, ClipPolicy, LossKind, Objective};
use nce_landscape::optim::{
    default_step_size, run as run_population, run_batched, Algo, AlgoConfig, OptimError,
    StepConstants, Trace,
};
use thiserror::Error;

use crate::config::{BackendChoice, ConfigError, EtaChoice, ExperimentConfig, FamilyConfig, ScalesSpec, PRESETS};
use crate::table::{ResultRow, ResultTable, RowStatus, TableError};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{0}")]
    Eval(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> CommandError {
    CommandError::Io { path: path.display().to_string(), source }
}

fn eval_err(e: impl std::fmt::Display) -> CommandError {
    CommandError::Eval(e.to_string())
}

// ---------------------------------------------------------------------------
// Objective construction
// ---------------------------------------------------------------------------

/// The objective a sweep cell optimizes. Batched cells never evaluate
/// population quantities, so they carry a Monte Carlo population fallback
/// only for completeness.
fn cell_objective(
    cfg: &ExperimentConfig,
    loss: LossKind,
    cell_seed: u64,
) -> Result<Objective, CommandError> {
    let (fam, tau_star, tau_q) = cfg.build_members()?;
    let backend = match cfg.backend_for(loss) {
        BackendChoice::Quadrature => {
            Backend::Quadrature(default_quadrature_spec(tau_star.theta[0], tau_q.theta[0]))
        }
        BackendChoice::MonteCarlo(n) => Backend::MonteCarlo { n, seed: cell_seed },
        BackendChoice::Batch(_) => {
            Backend::MonteCarlo { n: 4096, seed: mix_seed(cell_seed, 0xfa11_bacc) }
        }
    };
    Objective::new(loss, fam, tau_star, tau_q, backend).map_err(eval_err)
}

/// Population-accurate objective for step-size calibration and held-out
/// scoring: exact quadrature in one dimension, a large fixed-seed Monte
/// Carlo estimate otherwise.
fn measurement_objective(
    cfg: &ExperimentConfig,
    loss: LossKind,
) -> Result<Objective, CommandError> {
    let (fam, tau_star, tau_q) = cfg.build_members()?;
    let backend = if cfg.is_one_dimensional() {
        Backend::Quadrature(default_quadrature_spec(tau_star.theta[0], tau_q.theta[0]))
    } else {
        Backend::MonteCarlo { n: 100_000, seed: mix_seed(cfg.base_seed, 0x0e7a) }
    };
    Objective::new(loss, fam, tau_star, tau_q, backend).map_err(eval_err)
}

/// Resolves the step size for one (loss, algo) cell; the flag reports
/// whether the automatic policy was used.
fn resolve_eta(
    cfg: &ExperimentConfig,
    loss: LossKind,
    algo: Algo,
) -> Result<(f64, bool), CommandError> {
    match cfg.eta_for(loss, algo) {
        EtaChoice::Fixed(x) => Ok((x, false)),
        EtaChoice::Auto => {
            let obj = measurement_objective(cfg, loss)?;
            let mut consts = StepConstants::default();
            match algo {
                Algo::Gd => {
                    let (_, smax) = hessian_extremes(&obj, &obj.tau_q.clone()).map_err(eval_err)?;
                    consts.sigma_max_global = Some(smax);
                }
                Algo::Newton => {
                    let (smin, smax) = segment_extremes(&obj).map_err(eval_err)?;
                    consts.sigma_min_global = Some(smin);
                    consts.sigma_max_global = Some(smax);
                }
                Algo::Ngd => {
                    let kappa = condition_number_at_optimum(&obj).map_err(eval_err)?;
                    let nb = neighborhood_constants(&obj, 64, mix_seed(cfg.base_seed, 0xb7))
                        .map_err(eval_err)?;
                    let d0 = obj.tau_q.dist(&obj.tau_star);
                    consts.kappa_star = Some(kappa);
                    consts.beta_u = Some(nb.beta_u);
                    consts.beta_l = Some(nb.beta_l);
                    consts.delta = Some(cfg.delta_fraction * d0);
                }
            }
            let eta = default_step_size(algo, &consts).map_err(eval_err)?;
            Ok((eta, true))
        }
    }
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

struct CellOutcome {
    rows: Vec<ResultRow>,
    final_tau: TauParam,
}

fn rows_from_trace(
    loss: LossKind,
    algo: Algo,
    run: usize,
    trace: &Trace,
    status: RowStatus,
) -> Vec<ResultRow> {
    trace
        .records
        .iter()
        .map(|rec| ResultRow {
            loss,
            algo,
            run,
            step: rec.step,
            loss_value: rec.loss,
            grad_norm: rec.grad_norm,
            dist: rec.dist,
            min_dist: rec.min_dist,
            status,
        })
        .collect()
}

fn run_cell(
    cfg: &ExperimentConfig,
    loss: LossKind,
    algo: Algo,
    eta: f64,
    run_idx: usize,
) -> Result<CellOutcome, CommandError> {
    let cell_seed = cfg.base_seed ^ (run_idx as u64);
    let obj = cell_objective(cfg, loss, cell_seed)?;
    let tau0 = obj.tau_q.clone();
    let algo_cfg = AlgoConfig::new(algo, eta, cfg.steps);
    let result = match cfg.backend_for(loss) {
        BackendChoice::Batch(n) => {
            run_batched(&obj, &algo_cfg, &tau0, n, &cfg.clip_for(loss), cell_seed)
        }
        _ => run_population(&obj, &algo_cfg, &tau0),
    };
    match result {
        Ok(trace) => {
            let final_tau = trace.final_record().tau.clone();
            Ok(CellOutcome { rows: rows_from_trace(loss, algo, run_idx, &trace, RowStatus::Ok), final_tau })
        }
        Err(OptimError::Diverged { trace, .. }) => {
            let final_tau = trace.final_record().tau.clone();
            Ok(CellOutcome {
                rows: rows_from_trace(loss, algo, run_idx, &trace, RowStatus::Diverged),
                final_tau,
            })
        }
        Err(OptimError::SingularHessian { .. }) => {
            // Newton stopped before its first update; record the starting
            // iterate so the cell still contributes its rows.
            let loss_value = obj.population_loss(&tau0).map_err(eval_err)?;
            let grad = obj.population_gradient(&tau0).map_err(eval_err)?;
            let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            let dist = tau0.dist(&obj.tau_star);
            Ok(CellOutcome {
                rows: vec![ResultRow {
                    loss,
                    algo,
                    run: run_idx,
                    step: 0,
                    loss_value,
                    grad_norm,
                    dist,
                    min_dist: dist,
                    status: RowStatus::Singular,
                }],
                final_tau: tau0,
            })
        }
        Err(e) => Err(eval_err(e)),
    }
}

pub struct RunOutput {
    pub table: ResultTable,
    /// Per (loss, algo): the step size used and whether it was auto-derived.
    pub resolved_etas: Vec<(LossKind, Algo, f64, bool)>,
    /// Per (loss, algo): the run index with the lowest held-out empirical
    /// loss at its final iterate.
    pub best_runs: Vec<(LossKind, Algo, usize)>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, CommandError> {
    let (fam, tau_star, tau_q) = cfg.build_members()?;
    let mut rows: Vec<ResultRow> = Vec::new();
    let mut resolved_etas = Vec::new();
    let mut best_runs = Vec::new();
    let holdout = Batch::sample(&fam, &tau_star, &tau_q, 2048, cfg.base_seed + 1_000_000)
        .map_err(eval_err)?;

    for &loss in &cfg.losses {
        let scorer = measurement_objective(cfg, loss)?;
        for &algo in &cfg.algos {
            let (eta, was_auto) = resolve_eta(cfg, loss, algo)?;
            resolved_etas.push((loss, algo, eta, was_auto));
            let mut best: Option<(usize, f64)> = None;
            for run_idx in 0..cfg.runs {
                let outcome = run_cell(cfg, loss, algo, eta, run_idx)?;
                rows.extend(outcome.rows);
                let score = scorer
                    .empirical_loss(&outcome.final_tau, &holdout, &ClipPolicy::none())
                    .map_err(eval_err)?;
                if best.map(|(_, s)| score < s).unwrap_or(true) {
                    best = Some((run_idx, score));
                }
            }
            best_runs.push((loss, algo, best.expect("runs >= 1").0));
        }
    }
    Ok(RunOutput { table: ResultTable::new(rows), resolved_etas, best_runs })
}

fn render_settings(cfg: &ExperimentConfig, out: &RunOutput) -> Result<String, CommandError> {
    let (_, tau_star, tau_q) = cfg.build_members()?;
    let mut s = String::new();
    match &cfg.family {
        FamilyConfig::Gauss1d { theta_star, theta_q, .. } => {
            let _ = writeln!(s, "family = gauss1d theta_star={theta_star} theta_q={theta_q}");
        }
        FamilyConfig::DiagGauss { dim, mu_star, mu_q, scales } => {
            let scales_txt = match scales {
                ScalesSpec::Uniform { lo, hi } => format!("uniform:{lo}:{hi}"),
                ScalesSpec::Explicit(v) => v
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            };
            let _ = writeln!(
                s,
                "family = diag_gauss dim={dim} mu_star={mu_star} mu_q={mu_q} scales={scales_txt}"
            );
            let resolved: Vec<String> =
                tau_star.theta[..*dim].iter().map(|p| format!("{:.16e}", 1.0 / p)).collect();
            let _ = writeln!(s, "scales_resolved = {}", resolved.join(","));
        }
    }
    let _ = writeln!(s, "separation = {:.16e}", tau_star.dist(&tau_q));
    let _ = writeln!(s, "steps = {}", cfg.steps);
    let _ = writeln!(s, "runs = {}", cfg.runs);
    let _ = writeln!(s, "base_seed = {}", cfg.base_seed);
    let _ = writeln!(s, "delta_fraction = {}", cfg.delta_fraction);
    for &loss in &cfg.losses {
        let clip = cfg.clip_for(loss);
        let show = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(
            s,
            "loss {} backend={} clip_grad_norm={} clip_log_ratio={}",
            loss.label(),
            cfg.backend_for(loss).label(),
            show(clip.grad_norm_cap),
            show(clip.log_ratio_cap),
        );
    }
    for (loss, algo, eta, was_auto) in &out.resolved_etas {
        let _ = writeln!(
            s,
            "eta {} {} = {:.16e} ({})",
            loss.label(),
            algo.label(),
            eta,
            if *was_auto { "auto" } else { "set" },
        );
    }
    for (loss, algo, run) in &out.best_runs {
        let _ = writeln!(s, "best_run {} {} = {run}", loss.label(), algo.label());
    }
    Ok(s)
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub table_path: PathBuf,
    pub plot_paths: Vec<PathBuf>,
    pub settings_path: PathBuf,
}

pub fn run_command(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunArtifacts, CommandError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let out = run_experiment(cfg)?;
    let table_path = out_dir.join("results.csv");
    out.table.write_csv(&table_path)?;
    let plot_paths = out.table.emit_plot_data(out_dir, &out.best_runs)?;
    let settings_path = out_dir.join("settings.txt");
    std::fs::write(&settings_path, render_settings(cfg, &out)?)
        .map_err(|e| io_err(&settings_path, e))?;
    Ok(RunArtifacts { out_dir: out_dir.to_path_buf(), table_path, plot_paths, settings_path })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct VerifyArtifacts {
    pub status: i32,
    pub report_path: PathBuf,
    pub csv_path: PathBuf,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub inconclusive: usize,
}

/// Runs the certification suite and writes `report.txt` (one check per
/// line) plus `checks.csv`. Exit status: 0 when every non-skipped check
/// passes, 1 on any failure, 2 when a check could not be evaluated.
/// `corrupt` is a test hook that deliberately breaks the named check's
/// bound so the failure path stays exercised.
pub fn verify_command(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    corrupt: Option<&str>,
) -> Result<VerifyArtifacts, CommandError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let (fam, _, _) = cfg.build_members()?;
    let setup = CertifySetup {
        family: fam,
        r_values: cfg.rs.clone(),
        loss_kinds: cfg.losses.clone(),
        base_seed: cfg.base_seed,
        include_dynamics: cfg.dynamics,
    };
    let mut report = certify(&setup);
    if let Some(id) = corrupt {
        let mut found = false;
        for c in &mut report.checks {
            if c.id == id {
                c.bound = c.measured - 1.0;
                c.verdict = Verdict::Fail;
                let hook_note = "bound corrupted by test hook";
                c.note = if c.note.is_empty() {
                    hook_note.into()
                } else {
                    format!("{}; {hook_note}", c.note)
                };
                found = true;
            }
        }
        if !found {
            return Err(CommandError::Eval(format!("corrupt hook: no check named `{id}`")));
        }
    }
    let report_path = out_dir.join("report.txt");
    std::fs::write(&report_path, report.render_text()).map_err(|e| io_err(&report_path, e))?;
    let csv_path = out_dir.join("checks.csv");
    std::fs::write(&csv_path, report.render_csv()).map_err(|e| io_err(&csv_path, e))?;
    let count = |v: Verdict| report.checks.iter().filter(|c| c.verdict == v).count();
    let inconclusive = count(Verdict::Inconclusive);
    let status = if inconclusive > 0 {
        2
    } else if report.all_non_skipped_pass() {
        0
    } else {
        1
    };
    Ok(VerifyArtifacts {
        status,
        report_path,
        csv_path,
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        skipped: count(Verdict::Skip),
        inconclusive,
    })
}

// ---------------------------------------------------------------------------
// landscape
// ---------------------------------------------------------------------------

/// Dumps loss, gradient norm, and Hessian extremes along the straight
/// segment from the noise parameter to the data parameter, one file per
/// loss.
pub fn landscape_command(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CommandError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut created = Vec::new();
    for &loss in &cfg.losses {
        let obj = measurement_objective(cfg, loss)?;
        let points = segment_profile(&obj, 65).map_err(eval_err)?;
        let mut text = String::from("# t dist loss grad_norm sigma_min sigma_max\n");
        for p in &points {
            let _ = writeln!(
                text,
                "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                p.t, p.dist, p.loss, p.grad_norm, p.sigma_min, p.sigma_max
            );
        }
        let path = out_dir.join(format!("segment_{}.dat", loss.label()));
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        created.push(path);
    }
    Ok(created)
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

pub fn presets_text() -> String {
    let mut s = String::new();
    for (name, blurb, _) in PRESETS {
        let _ = writeln!(s, "{name} — {blurb}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;
    use approx::assert_relative_eq;
    use tempfile::tempdir;

    fn tiny_config(extra: &str) -> ExperimentConfig {
        let text = format!(
            "[family]\nkind = gauss1d\ntheta_star = 2\ntheta_q = 0\n{extra}"
        );
        parse_config_str(&text).unwrap()
    }

    #[test]
    fn row_count_matches_cells_times_steps_plus_one() {
        let cfg = tiny_config(
            "[objective]\nlosses = nce,ence\n[optimizer]\nalgos = gd,ngd\neta = 0.25\n[run]\nsteps = 1\nruns = 2\n",
        );
        let out = run_experiment(&cfg).unwrap();
        // 2 losses x 2 algos x 2 runs x (1 step + 1) rows.
        assert_eq!(out.table.len(), 16);
        for r in out.table.rows() {
            assert!(r.step <= 1);
            assert_eq!(r.status, RowStatus::Ok);
        }
    }

    #[test]
    fn first_row_of_wide_benchmark_starts_at_the_noise_member() {
        let cfg = parse_config_str(
            "[family]\nkind = gauss1d\ntheta_star = 16\ntheta_q = 0\n[objective]\nlosses = nce\n[optimizer]\nalgos = gd\neta = 0.1\n[run]\nsteps = 1\nruns = 1\n",
        )
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        let first = &out.table.rows()[0];
        assert_eq!(first.step, 0);
        // Mean offset 16 and log-partition offset 16^2/2 = 128.
        assert_relative_eq!(first.dist, (16.0f64 * 16.0 + 128.0 * 128.0).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(first.loss_value, std::f64::consts::LN_2, max_relative = 1e-9);
    }

    #[test]
    fn run_command_writes_csv_plots_and_settings_deterministically() {
        let cfg = tiny_config(
            "[objective]\nlosses = nce\n[optimizer]\nalgos = ngd\neta = 0.5\n[run]\nsteps = 3\nruns = 2\n",
        );
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let a = run_command(&cfg, dir_a.path()).unwrap();
        let b = run_command(&cfg, dir_b.path()).unwrap();
        for (pa, pb) in [
            (&a.table_path, &b.table_path),
            (&a.settings_path, &b.settings_path),
            (&a.plot_paths[0], &b.plot_paths[0]),
            (&a.plot_paths[1], &b.plot_paths[1]),
        ] {
            let ba = std::fs::read(pa).unwrap();
            let bb = std::fs::read(pb).unwrap();
            assert_eq!(ba, bb, "outputs differ: {} vs {}", pa.display(), pb.display());
        }
        let text = std::fs::read_to_string(&a.settings_path).unwrap();
        assert!(text.contains("eta nce ngd = 5.0000000000000000e-1 (set)"), "{text}");
        assert!(text.contains("best_run nce ngd = 0"), "{text}");
    }

    #[test]
    fn quadrature_cells_ignore_the_base_seed_while_batched_cells_use_it() {
        let base = "[objective]\nlosses = nce,ence\nnce_backend = quadrature\nence_backend = batch:64\n[optimizer]\nalgos = ngd\neta = 0.5\n[run]\nsteps = 2\nruns = 1\n";
        let cfg_a = tiny_config(&format!("{base}base_seed = 11\n"));
        let cfg_b = tiny_config(&format!("{base}base_seed = 12\n"));
        let rows = |cfg: &ExperimentConfig, loss: LossKind| -> Vec<ResultRow> {
            run_experiment(cfg)
                .unwrap()
                .table
                .rows()
                .iter()
                .filter(|r| r.loss == loss)
                .cloned()
                .collect()
        };
        let nce_a = rows(&cfg_a, LossKind::Nce);
        let nce_b = rows(&cfg_b, LossKind::Nce);
        assert_eq!(nce_a, nce_b, "population cells must not depend on the seed");
        let ence_a = rows(&cfg_a, LossKind::Ence);
        let ence_b = rows(&cfg_b, LossKind::Ence);
        assert_ne!(ence_a, ence_b, "batched cells must consume the seed");
    }

    #[test]
    fn diverged_cells_keep_partial_rows_without_aborting_the_sweep() {
        // A huge fixed step diverges immediately; the quadrature cell is
        // unaffected and the table still contains both cells.
        let cfg = tiny_config(
            "[objective]\nlosses = nce\n[optimizer]\nalgos = gd,ngd\ngd_eta = 1e9\nngd_eta = 0.5\n[run]\nsteps = 4\nruns = 1\n",
        );
        let out = run_experiment(&cfg).unwrap();
        let gd: Vec<&ResultRow> =
            out.table.rows().iter().filter(|r| r.algo == Algo::Gd).collect();
        assert!(!gd.is_empty());
        assert!(gd.iter().all(|r| r.status == RowStatus::Diverged));
        let ngd: Vec<&ResultRow> =
            out.table.rows().iter().filter(|r| r.algo == Algo::Ngd).collect();
        assert_eq!(ngd.len(), 5);
        assert!(ngd.iter().all(|r| r.status == RowStatus::Ok));
    }

    #[test]
    fn auto_step_size_for_gd_matches_inverse_curvature() {
        let cfg = tiny_config("[objective]\nlosses = nce\n[optimizer]\nalgos = gd\n[run]\nsteps = 1\nruns = 1\n");
        let (eta, was_auto) = resolve_eta(&cfg, LossKind::Nce, Algo::Gd).unwrap();
        assert!(was_auto);
        let obj = measurement_objective(&cfg, LossKind::Nce).unwrap();
        let (_, smax) = hessian_extremes(&obj, &obj.tau_q.clone()).unwrap();
        assert_relative_eq!(eta, 1.0 / smax, max_relative = 1e-12);
    }

    #[test]
    fn verify_zero_separation_skips_everything_and_passes() {
        let cfg = parse_config_str(
            "[family]\nkind = gauss1d\ntheta_star = 0\ntheta_q = 0\nallow_equal = true\n",
        )
        .unwrap();
        let dir = tempdir().unwrap();
        let art = verify_command(&cfg, dir.path(), None).unwrap();
        assert_eq!(art.status, 0);
        assert_eq!(art.failed, 0);
        assert!(art.skipped > 0);
        let text = std::fs::read_to_string(&art.report_path).unwrap();
        assert!(text.lines().all(|l| l.starts_with("SKIP")), "{text}");
        assert!(art.csv_path.exists());
    }

    #[test]
    fn corrupted_bound_hook_forces_failure_status() {
        let cfg = parse_config_str(
            "[family]\nkind = gauss1d\ntheta_star = 0\ntheta_q = 0\nallow_equal = true\n",
        )
        .unwrap();
        let dir = tempdir().unwrap();
        let art = verify_command(&cfg, dir.path(), Some("setup-r0")).unwrap();
        assert_eq!(art.status, 1);
        let text = std::fs::read_to_string(&art.report_path).unwrap();
        assert!(text.contains("corrupted by test hook"), "{text}");

        let err = verify_command(&cfg, dir.path(), Some("no-such-check")).unwrap_err();
        assert!(err.to_string().contains("no check named"), "{err}");
    }

    #[test]
    fn landscape_dump_covers_the_segment_and_is_deterministic() {
        let cfg = tiny_config("[objective]\nlosses = nce,ence\n");
        let dir = tempdir().unwrap();
        let paths = landscape_command(&cfg, dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let data_lines: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(data_lines.len(), 65);
        let first: Vec<f64> =
            data_lines[0].split_whitespace().map(|c| c.parse().unwrap()).collect();
        let last: Vec<f64> =
            data_lines[64].split_whitespace().map(|c| c.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert_eq!(last[0], 1.0);
        // The segment ends at the data parameter where the distance is zero.
        assert!(last[1] < 1e-12, "{}", last[1]);
        let dir2 = tempdir().unwrap();
        let paths2 = landscape_command(&cfg, dir2.path()).unwrap();
        assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths2[0]).unwrap());
    }

    #[test]
    fn presets_listing_names_both_shipped_configs() {
        let text = presets_text();
        assert!(text.contains("gauss1d_r16"));
        assert!(text.contains("gauss16d"));
    }
}
