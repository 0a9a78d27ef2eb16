//! INI-style experiment configuration: raw parsing, defaults, and semantic
//! validation.
//!
//! Grammar (documented in the README): `#` or `;` start a comment line,
//! sections are `[name]`, entries are `key = value`, lists are
//! comma-separated, booleans are `true`/`false`. Recognized sections are
//! `[family]`, `[objective]`, `[optimizer]`, `[run]`, and `[output]`; only
//! `[family]` is required. Unknown sections or keys are errors with line
//! numbers; semantic violations are collected and reported together.

use std::path::PathBuf;

use nce_landscape::expfam::{mix_seed, FamilySpec, SplitMix64, TauParam};
use nce_landscape::objective::{ClipPolicy, LossKind};
use nce_landscape::optim::Algo;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing [family] section")]
    MissingFamily,
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line, msg: msg.into() }
}

// ---------------------------------------------------------------------------
// Raw INI layer
// ---------------------------------------------------------------------------

struct RawEntry {
    key: String,
    value: String,
    line: usize,
}

struct RawSection {
    name: String,
    line: usize,
    entries: Vec<RawEntry>,
}

fn parse_ini(text: &str) -> Result<Vec<RawSection>, ConfigError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, format!("malformed section header `{line}`")))?
                .trim()
                .to_string();
            if name.is_empty() {
                return Err(parse_err(line_no, "empty section name"));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(parse_err(line_no, format!("duplicate section [{name}]")));
            }
            sections.push(RawSection { name, line: line_no, entries: Vec::new() });
        } else if let Some(eq) = line.find('=') {
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() {
                return Err(parse_err(line_no, "empty key before `=`"));
            }
            let Some(section) = sections.last_mut() else {
                return Err(parse_err(
                    line_no,
                    format!("key `{key}` appears before any [section] header"),
                ));
            };
            if section.entries.iter().any(|e| e.key == key) {
                return Err(parse_err(
                    line_no,
                    format!("duplicate key `{key}` in [{}]", section.name),
                ));
            }
            section.entries.push(RawEntry { key, value, line: line_no });
        } else {
            return Err(parse_err(
                line_no,
                format!("expected `[section]` or `key = value`, got `{line}`"),
            ));
        }
    }
    Ok(sections)
}

/// A section with key consumption tracking: anything not taken by the typed
/// layer is reported as an unknown key.
struct SectionReader {
    name: String,
    line: usize,
    entries: Vec<RawEntry>,
    used: Vec<bool>,
}

impl SectionReader {
    fn new(section: RawSection) -> Self {
        let used = vec![false; section.entries.len()];
        SectionReader { name: section.name, line: section.line, entries: section.entries, used }
    }

    fn empty(name: &str) -> Self {
        SectionReader { name: name.into(), line: 0, entries: Vec::new(), used: Vec::new() }
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.key == key {
                self.used[i] = true;
                return Some((e.value.clone(), e.line));
            }
        }
        None
    }

    fn require(&mut self, key: &str) -> Result<(String, usize), ConfigError> {
        self.take(key).ok_or_else(|| {
            parse_err(self.line, format!("missing required key `{key}` in [{}]", self.name))
        })
    }

    fn finish(self) -> Result<(), ConfigError> {
        for (i, e) in self.entries.iter().enumerate() {
            if !self.used[i] {
                return Err(parse_err(
                    e.line,
                    format!("unknown key `{}` in [{}]", e.key, self.name),
                ));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Value parsers
// ---------------------------------------------------------------------------

fn parse_f64(v: &str, line: usize, key: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| parse_err(line, format!("{key}: expected a number, got `{v}`")))
}

fn parse_usize(v: &str, line: usize, key: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>()
        .map_err(|_| parse_err(line, format!("{key}: expected a non-negative integer, got `{v}`")))
}

fn parse_u64(v: &str, line: usize, key: &str) -> Result<u64, ConfigError> {
    v.parse::<u64>()
        .map_err(|_| parse_err(line, format!("{key}: expected a non-negative integer, got `{v}`")))
}

fn parse_bool(v: &str, line: usize, key: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(parse_err(line, format!("{key}: expected true or false, got `{v}`"))),
    }
}

pub fn parse_loss(v: &str) -> Option<LossKind> {
    match v {
        "nce" => Some(LossKind::Nce),
        "ence" => Some(LossKind::Ence),
        _ => None,
    }
}

pub fn parse_algo(v: &str) -> Option<Algo> {
    match v {
        "gd" => Some(Algo::Gd),
        "ngd" => Some(Algo::Ngd),
        "newton" => Some(Algo::Newton),
        _ => None,
    }
}

fn parse_loss_list(v: &str, line: usize) -> Result<Vec<LossKind>, ConfigError> {
    let mut out = Vec::new();
    for item in v.split(',') {
        let item = item.trim();
        let loss = parse_loss(item)
            .ok_or_else(|| parse_err(line, format!("losses: unknown loss `{item}` (expected nce or ence)")))?;
        if out.contains(&loss) {
            return Err(parse_err(line, format!("losses: `{item}` listed twice")));
        }
        out.push(loss);
    }
    if out.is_empty() {
        return Err(parse_err(line, "losses: list is empty"));
    }
    Ok(out)
}

fn parse_algo_list(v: &str, line: usize) -> Result<Vec<Algo>, ConfigError> {
    let mut out = Vec::new();
    for item in v.split(',') {
        let item = item.trim();
        let algo = parse_algo(item).ok_or_else(|| {
            parse_err(line, format!("algos: unknown algorithm `{item}` (expected gd, ngd, or newton)"))
        })?;
        if out.contains(&algo) {
            return Err(parse_err(line, format!("algos: `{item}` listed twice")));
        }
        out.push(algo);
    }
    if out.is_empty() {
        return Err(parse_err(line, "algos: list is empty"));
    }
    Ok(out)
}

fn parse_f64_list(v: &str, line: usize, key: &str) -> Result<Vec<f64>, ConfigError> {
    let mut out = Vec::new();
    for item in v.split(',') {
        out.push(parse_f64(item.trim(), line, key)?);
    }
    Ok(out)
}

fn parse_backend(v: &str, line: usize, key: &str) -> Result<BackendChoice, ConfigError> {
    if v == "quadrature" {
        return Ok(BackendChoice::Quadrature);
    }
    if let Some(n) = v.strip_prefix("mc:") {
        return Ok(BackendChoice::MonteCarlo(parse_usize(n, line, key)?));
    }
    if let Some(n) = v.strip_prefix("batch:") {
        return Ok(BackendChoice::Batch(parse_usize(n, line, key)?));
    }
    Err(parse_err(line, format!("{key}: expected quadrature, mc:<n>, or batch:<n>, got `{v}`")))
}

fn parse_clip(v: &str, line: usize, key: &str) -> Result<Option<f64>, ConfigError> {
    if v == "none" {
        Ok(None)
    } else {
        Ok(Some(parse_f64(v, line, key)?))
    }
}

fn parse_eta(v: &str, line: usize, key: &str) -> Result<EtaChoice, ConfigError> {
    if v == "auto" {
        Ok(EtaChoice::Auto)
    } else {
        Ok(EtaChoice::Fixed(parse_f64(v, line, key)?))
    }
}

fn parse_scales(v: &str, line: usize) -> Result<ScalesSpec, ConfigError> {
    if let Some(rest) = v.strip_prefix("uniform:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(parse_err(line, format!("scales: expected uniform:<lo>:<hi>, got `{v}`")));
        }
        let lo = parse_f64(parts[0], line, "scales")?;
        let hi = parse_f64(parts[1], line, "scales")?;
        return Ok(ScalesSpec::Uniform { lo, hi });
    }
    Ok(ScalesSpec::Explicit(parse_f64_list(v, line, "scales")?))
}

// ---------------------------------------------------------------------------
// Resolved configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyConfig {
    Gauss1d { theta_star: f64, theta_q: f64, allow_equal: bool },
    DiagGauss { dim: usize, mu_star: f64, mu_q: f64, scales: ScalesSpec },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalesSpec {
    /// Per-coordinate variances drawn once from Uniform[lo, hi), seeded from
    /// the base seed.
    Uniform { lo: f64, hi: f64 },
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Quadrature,
    MonteCarlo(usize),
    Batch(usize),
}

impl BackendChoice {
    pub fn label(&self) -> String {
        match self {
            BackendChoice::Quadrature => "quadrature".into(),
            BackendChoice::MonteCarlo(n) => format!("mc:{n}"),
            BackendChoice::Batch(n) => format!("batch:{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaChoice {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: FamilyConfig,
    pub losses: Vec<LossKind>,
    pub algos: Vec<Algo>,
    backends: Vec<(LossKind, BackendChoice)>,
    clips: Vec<(LossKind, ClipPolicy)>,
    etas: Vec<(LossKind, Algo, EtaChoice)>,
    pub delta_fraction: f64,
    pub steps: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// Include the slow optimizer-dynamics checks in `verify`.
    pub dynamics: bool,
    /// Separations the `verify` suite certifies.
    pub rs: Vec<f64>,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn backend_for(&self, loss: LossKind) -> BackendChoice {
        self.backends
            .iter()
            .find(|(l, _)| *l == loss)
            .map(|(_, b)| *b)
            .expect("backend resolved for every configured loss")
    }

    pub fn clip_for(&self, loss: LossKind) -> ClipPolicy {
        self.clips
            .iter()
            .find(|(l, _)| *l == loss)
            .map(|(_, c)| *c)
            .expect("clip policy resolved for every configured loss")
    }

    pub fn eta_for(&self, loss: LossKind, algo: Algo) -> EtaChoice {
        self.etas
            .iter()
            .find(|(l, a, _)| *l == loss && *a == algo)
            .map(|(_, _, e)| *e)
            .expect("step size resolved for every configured cell")
    }

    pub fn is_one_dimensional(&self) -> bool {
        matches!(self.family, FamilyConfig::Gauss1d { .. })
    }

    /// Output directory after applying an optional environment override
    /// (the `NCE_LANDSCAPE_OUT` variable, read by the binary).
    pub fn output_dir(&self, env_override: Option<&str>) -> PathBuf {
        match env_override {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.out_dir.clone(),
        }
    }

    /// Family plus the extended parameters of the data and noise members.
    /// Uniform variance scales are drawn here, deterministically from the
    /// base seed.
    pub fn build_members(&self) -> Result<(FamilySpec, TauParam, TauParam), ConfigError> {
        let to_invalid = |e: nce_landscape::expfam::ExpfamError| ConfigError::Invalid(e.to_string());
        match &self.family {
            FamilyConfig::Gauss1d { theta_star, theta_q, .. } => {
                let fam = FamilySpec::gaussian_mean_1d();
                let tau_star = fam.tau_of_theta(&[*theta_star]).map_err(to_invalid)?;
                let tau_q = fam.tau_of_theta(&[*theta_q]).map_err(to_invalid)?;
                Ok((fam, tau_star, tau_q))
            }
            FamilyConfig::DiagGauss { dim, mu_star, mu_q, scales } => {
                let fam = FamilySpec::diag_gaussian(*dim);
                let vars: Vec<f64> = match scales {
                    ScalesSpec::Uniform { lo, hi } => {
                        let mut rng = SplitMix64::new(mix_seed(self.base_seed, 0x5ca1e5));
                        (0..*dim).map(|_| rng.next_range(*lo, *hi)).collect()
                    }
                    ScalesSpec::Explicit(v) => v.clone(),
                };
                let mut mp_star = vec![*mu_star; *dim];
                mp_star.extend_from_slice(&vars);
                let mut mp_q = vec![*mu_q; *dim];
                mp_q.extend(std::iter::repeat(1.0).take(*dim));
                let tau_star = fam.tau_of_theta(&mp_star).map_err(to_invalid)?;
                let tau_q = fam.tau_of_theta(&mp_q).map_err(to_invalid)?;
                Ok((fam, tau_star, tau_q))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Shipped presets
// ---------------------------------------------------------------------------

pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "gauss1d_r16",
        "1-d unit-variance Gaussians, data mean 16 vs noise mean 0; population logistic loss, batched exponential loss",
        include_str!("../presets/gauss1d_r16.ini"),
    ),
    (
        "gauss16d",
        "16-d diagonal Gaussians, zero means, data variances from Uniform[6, 12]; batched gradients",
        include_str!("../presets/gauss16d.ini"),
    ),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _, _)| *n == name).map(|(_, _, text)| *text)
}

/// Loads a config from a filesystem path, falling back to a shipped preset
/// of that name when no such file exists.
pub fn load_config(path_or_preset: &str) -> Result<ExperimentConfig, ConfigError> {
    if std::path::Path::new(path_or_preset).exists() {
        return parse_config_file(path_or_preset);
    }
    if let Some(text) = preset(path_or_preset) {
        return parse_config_str(text);
    }
    Err(ConfigError::Io {
        path: path_or_preset.into(),
        source: std::io::Error::new(
            std::io::ErrorKind::NotFound,
            "no such file or shipped preset",
        ),
    })
}

pub fn parse_config_file(path: &str) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_config_str(&text)
}

// ---------------------------------------------------------------------------
// Typed layer
// ---------------------------------------------------------------------------

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let sections = parse_ini(text)?;
    const KNOWN: [&str; 5] = ["family", "objective", "optimizer", "run", "output"];
    for s in &sections {
        if !KNOWN.contains(&s.name.as_str()) {
            return Err(parse_err(s.line, format!("unknown section [{}]", s.name)));
        }
    }

    let grab = |name: &str| -> Option<SectionReader> {
        sections.iter().find(|s| s.name == name).map(|s| {
            SectionReader::new(RawSection {
                name: s.name.clone(),
                line: s.line,
                entries: s
                    .entries
                    .iter()
                    .map(|e| RawEntry { key: e.key.clone(), value: e.value.clone(), line: e.line })
                    .collect(),
            })
        })
    };

    let Some(mut fam_sec) = grab("family") else {
        return Err(ConfigError::MissingFamily);
    };
    let mut obj_sec = grab("objective").unwrap_or_else(|| SectionReader::empty("objective"));
    let mut opt_sec = grab("optimizer").unwrap_or_else(|| SectionReader::empty("optimizer"));
    let mut run_sec = grab("run").unwrap_or_else(|| SectionReader::empty("run"));
    let mut out_sec = grab("output").unwrap_or_else(|| SectionReader::empty("output"));

    // ---- [family] ----------------------------------------------------------
    let (kind, kind_line) = fam_sec.require("kind")?;
    let family = match kind.as_str() {
        "gauss1d" => {
            let (v, l) = fam_sec.require("theta_star")?;
            let theta_star = parse_f64(&v, l, "theta_star")?;
            let (v, l) = fam_sec.require("theta_q")?;
            let theta_q = parse_f64(&v, l, "theta_q")?;
            let allow_equal = match fam_sec.take("allow_equal") {
                Some((v, l)) => parse_bool(&v, l, "allow_equal")?,
                None => false,
            };
            FamilyConfig::Gauss1d { theta_star, theta_q, allow_equal }
        }
        "diag_gauss" => {
            let (v, l) = fam_sec.require("dim")?;
            let dim = parse_usize(&v, l, "dim")?;
            let mu_star = match fam_sec.take("mu_star") {
                Some((v, l)) => parse_f64(&v, l, "mu_star")?,
                None => 0.0,
            };
            let mu_q = match fam_sec.take("mu_q") {
                Some((v, l)) => parse_f64(&v, l, "mu_q")?,
                None => 0.0,
            };
            let (v, l) = fam_sec.require("scales")?;
            let scales = parse_scales(&v, l)?;
            if let Some((v, l)) = fam_sec.take("cov_q") {
                if v != "identity" {
                    return Err(parse_err(l, format!("cov_q: only `identity` is supported, got `{v}`")));
                }
            }
            FamilyConfig::DiagGauss { dim, mu_star, mu_q, scales }
        }
        other => {
            return Err(parse_err(
                kind_line,
                format!("unknown family kind `{other}` (expected gauss1d or diag_gauss)"),
            ))
        }
    };
    fam_sec.finish()?;
    let is_1d = matches!(family, FamilyConfig::Gauss1d { .. });

    // ---- [objective] -------------------------------------------------------
    let losses = match obj_sec.take("losses") {
        Some((v, l)) => parse_loss_list(&v, l)?,
        None => vec![LossKind::Nce, LossKind::Ence],
    };
    let default_backend = if is_1d { BackendChoice::Quadrature } else { BackendChoice::Batch(512) };
    let backend = match obj_sec.take("backend") {
        Some((v, l)) => parse_backend(&v, l, "backend")?,
        None => default_backend,
    };
    let loss_backend = |key: &str, sec: &mut SectionReader| -> Result<Option<BackendChoice>, ConfigError> {
        match sec.take(key) {
            Some((v, l)) => Ok(Some(parse_backend(&v, l, key)?)),
            None => Ok(None),
        }
    };
    let nce_backend = loss_backend("nce_backend", &mut obj_sec)?;
    let ence_backend = loss_backend("ence_backend", &mut obj_sec)?;

    let clip_key = |key: &str, sec: &mut SectionReader| -> Result<Option<Option<f64>>, ConfigError> {
        match sec.take(key) {
            Some((v, l)) => Ok(Some(parse_clip(&v, l, key)?)),
            None => Ok(None),
        }
    };
    let clip_gn = clip_key("clip_grad_norm", &mut obj_sec)?.unwrap_or(None);
    let clip_lr = clip_key("clip_log_ratio", &mut obj_sec)?.unwrap_or(None);
    let nce_clip_gn = clip_key("nce_clip_grad_norm", &mut obj_sec)?;
    let nce_clip_lr = clip_key("nce_clip_log_ratio", &mut obj_sec)?;
    let ence_clip_gn = clip_key("ence_clip_grad_norm", &mut obj_sec)?;
    let ence_clip_lr = clip_key("ence_clip_log_ratio", &mut obj_sec)?;
    obj_sec.finish()?;

    let backends: Vec<(LossKind, BackendChoice)> = losses
        .iter()
        .map(|&loss| {
            let specific = match loss {
                LossKind::Nce => nce_backend,
                LossKind::Ence => ence_backend,
            };
            (loss, specific.unwrap_or(backend))
        })
        .collect();
    let clips: Vec<(LossKind, ClipPolicy)> = losses
        .iter()
        .map(|&loss| {
            let (gn, lr) = match loss {
                LossKind::Nce => (nce_clip_gn, nce_clip_lr),
                LossKind::Ence => (ence_clip_gn, ence_clip_lr),
            };
            (
                loss,
                ClipPolicy {
                    grad_norm_cap: gn.unwrap_or(clip_gn),
                    log_ratio_cap: lr.unwrap_or(clip_lr),
                },
            )
        })
        .collect();

    // ---- [optimizer] -------------------------------------------------------
    let algos = match opt_sec.take("algos") {
        Some((v, l)) => parse_algo_list(&v, l)?,
        None => vec![Algo::Gd, Algo::Ngd],
    };
    let eta_global = match opt_sec.take("eta") {
        Some((v, l)) => parse_eta(&v, l, "eta")?,
        None => EtaChoice::Auto,
    };
    let eta_key = |key: &str, sec: &mut SectionReader| -> Result<Option<EtaChoice>, ConfigError> {
        match sec.take(key) {
            Some((v, l)) => Ok(Some(parse_eta(&v, l, key)?)),
            None => Ok(None),
        }
    };
    let per_algo = [
        (Algo::Gd, eta_key("gd_eta", &mut opt_sec)?),
        (Algo::Ngd, eta_key("ngd_eta", &mut opt_sec)?),
        (Algo::Newton, eta_key("newton_eta", &mut opt_sec)?),
    ];
    let per_cell = [
        (LossKind::Nce, Algo::Gd, eta_key("nce_gd_eta", &mut opt_sec)?),
        (LossKind::Nce, Algo::Ngd, eta_key("nce_ngd_eta", &mut opt_sec)?),
        (LossKind::Nce, Algo::Newton, eta_key("nce_newton_eta", &mut opt_sec)?),
        (LossKind::Ence, Algo::Gd, eta_key("ence_gd_eta", &mut opt_sec)?),
        (LossKind::Ence, Algo::Ngd, eta_key("ence_ngd_eta", &mut opt_sec)?),
        (LossKind::Ence, Algo::Newton, eta_key("ence_newton_eta", &mut opt_sec)?),
    ];
    let delta_fraction = match opt_sec.take("delta_fraction") {
        Some((v, l)) => parse_f64(&v, l, "delta_fraction")?,
        None => 0.05,
    };
    opt_sec.finish()?;

    let etas: Vec<(LossKind, Algo, EtaChoice)> = losses
        .iter()
        .flat_map(|&loss| algos.iter().map(move |&algo| (loss, algo)))
        .map(|(loss, algo)| {
            let cell = per_cell
                .iter()
                .find(|(l, a, _)| *l == loss && *a == algo)
                .and_then(|(_, _, e)| *e);
            let by_algo = per_algo.iter().find(|(a, _)| *a == algo).and_then(|(_, e)| *e);
            (loss, algo, cell.or(by_algo).unwrap_or(eta_global))
        })
        .collect();

    // ---- [run] -------------------------------------------------------------
    let steps = match run_sec.take("steps") {
        Some((v, l)) => parse_usize(&v, l, "steps")?,
        None => 100,
    };
    let runs = match run_sec.take("runs") {
        Some((v, l)) => parse_usize(&v, l, "runs")?,
        None => 5,
    };
    let base_seed = match run_sec.take("base_seed") {
        Some((v, l)) => parse_u64(&v, l, "base_seed")?,
        None => 0,
    };
    let dynamics = match run_sec.take("dynamics") {
        Some((v, l)) => parse_bool(&v, l, "dynamics")?,
        None => false,
    };
    let rs_explicit = match run_sec.take("rs") {
        Some((v, l)) => Some(parse_f64_list(&v, l, "rs")?),
        None => None,
    };
    run_sec.finish()?;

    // ---- [output] ----------------------------------------------------------
    let out_dir = match out_sec.take("dir") {
        Some((v, _)) => PathBuf::from(v),
        None => PathBuf::from("out"),
    };
    out_sec.finish()?;

    let mut config = ExperimentConfig {
        family,
        losses,
        algos,
        backends,
        clips,
        etas,
        delta_fraction,
        steps,
        runs,
        base_seed,
        dynamics,
        rs: rs_explicit.clone().unwrap_or_default(),
        out_dir,
    };

    // ---- semantic validation: collect every violation ----------------------
    let mut violations: Vec<String> = Vec::new();
    if config.steps < 1 {
        violations.push(format!("steps must be at least 1 (got {})", config.steps));
    }
    if config.runs < 1 {
        violations.push(format!("runs must be at least 1 (got {})", config.runs));
    }
    match &config.family {
        FamilyConfig::Gauss1d { theta_star, theta_q, allow_equal } => {
            if !theta_star.is_finite() || !theta_q.is_finite() {
                violations.push("theta_star and theta_q must be finite".into());
            } else if theta_star == theta_q && !*allow_equal {
                violations.push(
                    "theta_star equals theta_q; set allow_equal = true to run a zero-separation family"
                        .into(),
                );
            }
        }
        FamilyConfig::DiagGauss { dim, scales, .. } => {
            if *dim < 1 {
                violations.push("dim must be at least 1".into());
            }
            match scales {
                ScalesSpec::Uniform { lo, hi } => {
                    if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && lo < hi) {
                        violations.push(format!(
                            "scales uniform bounds must satisfy 0 < lo < hi (got {lo}, {hi})"
                        ));
                    }
                }
                ScalesSpec::Explicit(v) => {
                    if v.len() != *dim {
                        violations
                            .push(format!("scales lists {} values but dim = {dim}", v.len()));
                    }
                    if v.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                        violations.push("every scale must be a positive finite variance".into());
                    }
                }
            }
        }
    }
    if !(config.delta_fraction.is_finite()
        && config.delta_fraction > 0.0
        && config.delta_fraction <= 1.0)
    {
        violations.push(format!(
            "delta_fraction must lie in (0, 1] (got {})",
            config.delta_fraction
        ));
    }
    for &(loss, b) in &config.backends {
        match b {
            BackendChoice::Quadrature if !config.is_one_dimensional() => violations.push(format!(
                "backend quadrature requires a one-dimensional family (loss {})",
                loss.label()
            )),
            BackendChoice::MonteCarlo(0) => {
                violations.push(format!("mc backend needs n >= 1 (loss {})", loss.label()))
            }
            BackendChoice::Batch(0) => {
                violations.push(format!("batch backend needs n >= 1 (loss {})", loss.label()))
            }
            _ => {}
        }
        if matches!(b, BackendChoice::Batch(_)) && config.algos.contains(&Algo::Newton) {
            violations.push(format!(
                "newton cannot run on batched gradients (loss {})",
                loss.label()
            ));
        }
    }
    for &(loss, c) in &config.clips {
        for (name, cap) in [("clip_grad_norm", c.grad_norm_cap), ("clip_log_ratio", c.log_ratio_cap)] {
            if let Some(x) = cap {
                if !(x.is_finite() && x > 0.0) {
                    violations.push(format!(
                        "{name} must be positive and finite (loss {}, got {x})",
                        loss.label()
                    ));
                }
            }
        }
    }
    for &(loss, algo, eta) in &config.etas {
        match eta {
            EtaChoice::Fixed(x) if !(x.is_finite() && x > 0.0) => violations.push(format!(
                "step size must be positive and finite (loss {}, algo {}, got {x})",
                loss.label(),
                algo.label()
            )),
            EtaChoice::Auto
                if matches!(algo, Algo::Ngd | Algo::Newton) && !config.is_one_dimensional() =>
            {
                violations.push(format!(
                    "automatic {} step size needs a one-dimensional family; set {}_eta explicitly",
                    algo.label(),
                    algo.label()
                ))
            }
            _ => {}
        }
    }
    if let Some(rs) = &rs_explicit {
        if rs.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            violations.push("rs values must be finite and non-negative".into());
        }
    }
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations.join("; ")));
    }

    // Default certification separations: the configured family's own
    // separation in extended parameters.
    if rs_explicit.is_none() {
        let (_, tau_star, tau_q) = config.build_members()?;
        config.rs = vec![match &config.family {
            FamilyConfig::Gauss1d { theta_star, theta_q, .. } => (theta_star - theta_q).abs(),
            FamilyConfig::DiagGauss { .. } => tau_star.dist(&tau_q),
        }];
    }
    Ok(config)
}
