//! Shared numerical kernels: adaptive 1-d quadrature, stable log-sum-exp and
//! logistic helpers, symmetric eigendecomposition, and finite-difference
//! derivative checks.

use thiserror::Error;

/// log(sqrt(2*pi)), the normal density's normalizing constant in log space.
pub const LOG_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge within {subdivisions} subdivisions; best estimate {best_estimate:e}")]
    ConvergenceFailure { best_estimate: f64, subdivisions: usize },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,
    #[error("matrix is not square: {rows} rows, row {bad_row} has {bad_len} entries")]
    NotSquare { rows: usize, bad_row: usize, bad_len: usize },
}

/// Bounds and error tolerances for [`integrate`].
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    /// Spec over `[lower, upper]` with the default tolerances
    /// (rel 1e-10, abs 1e-16, one million subdivisions).
    pub fn new(lower: f64, upper: f64) -> Self {
        QuadratureSpec { lower, upper, rel_tol: 1e-10, abs_tol: 1e-16, max_subdivisions: 1_000_000 }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(NumericsError::InvalidSpec(format!(
                "bounds must be finite with lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(NumericsError::InvalidSpec("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(NumericsError::InvalidSpec("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

struct Panel {
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    s: f64,
}

fn simpson(a: f64, fa: f64, fm: f64, fb: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson integral of `f` over the window's interval.
///
/// The internal error estimate per panel is kept below the window's tolerances
/// scaled by the panel's share of the interval; accepted panels use Richardson
/// extrapolation. Exhausting the subdivision budget returns a
/// convergence-failure error carrying the best estimate so far.
pub fn integrate<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64, NumericsError> {
    spec.validate()?;
    let (lo, hi) = (spec.lower, spec.upper);
    let width = hi - lo;

    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteSample { x })
        }
    };

    // Coarse composite pass: sets the magnitude scale for the relative
    // tolerance and seeds the adaptive stack with uniform root panels.
    const PILOT_PANELS: usize = 256;
    let mut pilot_vals = Vec::with_capacity(2 * PILOT_PANELS + 1);
    for i in 0..=(2 * PILOT_PANELS) {
        let x = lo + width * (i as f64) / (2.0 * PILOT_PANELS as f64);
        pilot_vals.push(eval(x)?);
    }
    let mut pilot_abs = 0.0;
    for p in 0..PILOT_PANELS {
        pilot_abs += simpson(
            lo + width * (p as f64) / PILOT_PANELS as f64,
            pilot_vals[2 * p].abs(),
            pilot_vals[2 * p + 1].abs(),
            pilot_vals[2 * p + 2].abs(),
            lo + width * ((p + 1) as f64) / PILOT_PANELS as f64,
        );
    }
    // The relative tolerance is scaled by the integrand's absolute mass,
    // not the signed integral: heavily canceling integrands are resolved to
    // the accuracy their magnitude supports instead of chasing an
    // unattainable target near zero.
    let scale = pilot_abs.abs();
    let tol_global = spec.abs_tol.max(spec.rel_tol * scale);

    const ROOT_PANELS: usize = 16;
    let stride = 2 * PILOT_PANELS / ROOT_PANELS;
    let mut stack: Vec<Panel> = Vec::with_capacity(64);
    for r in 0..ROOT_PANELS {
        let (ia, im, ib) = (r * stride, r * stride + stride / 2, (r + 1) * stride);
        let a = lo + width * (ia as f64) / (2.0 * PILOT_PANELS as f64);
        let b = lo + width * (ib as f64) / (2.0 * PILOT_PANELS as f64);
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (pilot_vals[ia], pilot_vals[im], pilot_vals[ib]);
        stack.push(Panel { a, fa, m, fm, b, fb, s: simpson(a, fa, fm, fb, b) });
    }

    // Kahan-compensated accumulator for the accepted panel contributions.
    let mut sum = 0.0;
    let mut comp = 0.0;
    let add = |sum: &mut f64, comp: &mut f64, v: f64| {
        let y = v - *comp;
        let t = *sum + y;
        *comp = (t - *sum) - y;
        *sum = t;
    };

    let mut subdivisions = 0usize;
    let min_width = width * 1e-13;
    while let Some(p) = stack.pop() {
        let ml = 0.5 * (p.a + p.m);
        let mr = 0.5 * (p.m + p.b);
        let (fml, fmr) = (eval(ml)?, eval(mr)?);
        let s_left = simpson(p.a, p.fa, fml, p.fm, p.m);
        let s_right = simpson(p.m, p.fm, fmr, p.fb, p.b);
        let s2 = s_left + s_right;
        let err = s2 - p.s;
        let tol_here = tol_global * ((p.b - p.a) / width);
        if err.abs() <= 15.0 * tol_here || (p.b - p.a) < min_width {
            add(&mut sum, &mut comp, s2 + err / 15.0);
            continue;
        }
        subdivisions += 1;
        if subdivisions >= spec.max_subdivisions {
            // Budget exhausted: fold the unresolved panels in at their
            // current estimates and report the failure.
            add(&mut sum, &mut comp, s2);
            for q in &stack {
                add(&mut sum, &mut comp, q.s);
            }
            return Err(NumericsError::ConvergenceFailure { best_estimate: sum, subdivisions });
        }
        stack.push(Panel { a: p.a, fa: p.fa, m: ml, fm: fml, b: p.m, fb: p.fm, s: s_left });
        stack.push(Panel { a: p.m, fa: p.fm, m: mr, fm: fmr, b: p.b, fb: p.fb, s: s_right });
    }
    Ok(sum)
}

/// log(sum_i exp(v_i)) computed with the max-subtraction trick; never
/// overflows for finite inputs.
pub fn log_sum_exp(values: &[f64]) -> Result<f64, NumericsError> {
    if values.is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = values.iter().map(|v| (v - m).exp()).sum();
    Ok(m + sum.ln())
}

/// log(1 + exp(t)), the softplus function, stable across the whole real line.
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// log(softplus(t)), stable for large |t| (≈ t for very negative t,
/// ≈ log t for very positive t).
pub fn log_softplus(t: f64) -> f64 {
    if t < -34.0 {
        // softplus(t) = exp(t)(1 - exp(t)/2 + ...); the correction is below
        // f64 resolution here.
        t
    } else if t > 34.0 {
        (t + (-t).exp().ln_1p()).ln()
    } else {
        softplus(t).ln()
    }
}

/// Logistic sigmoid 1/(1+exp(-t)) evaluated piecewise by sign, never
/// overflowing.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// log|exp(la) - exp(lb)| together with the sign of the difference, assembled
/// so the inner exponent is always ≤ 0. Returns (-inf, 0.0) when la == lb.
pub fn log_abs_diff_exp(la: f64, lb: f64) -> (f64, f64) {
    if la == lb {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (hi, lo, sign) = if la > lb { (la, lb, 1.0) } else { (lb, la, -1.0) };
    if hi == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    // log(1 - exp(-d)) switches forms at d = log 2: expm1 keeps full
    // relative accuracy when the difference is tiny, ln_1p when it is not.
    let d = hi - lo;
    let log1m = if d < std::f64::consts::LN_2 {
        (-(-d).exp_m1()).ln()
    } else {
        (-((-d).exp())).ln_1p()
    };
    (hi + log1m, sign)
}

/// log|exp(t) - 1|, accurate across the whole line: expm1 below the
/// overflow regime, t itself above it.
pub fn log_abs_expm1(t: f64) -> f64 {
    if t > 33.0 {
        t
    } else {
        t.exp_m1().abs().ln()
    }
}

/// Dense symmetric matrix with full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    n: usize,
    a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat { n, a: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(NumericsError::NotSquare { rows: n, bad_row: i, bad_len: r.len() });
            }
        }
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            a.extend_from_slice(r);
        }
        Ok(SymMat { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Sets entries (i, j) and (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.get(i, j) * x[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn off_diag_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j) * self.get(i, j);
                }
            }
        }
        s.sqrt()
    }
}

/// Eigendecomposition of a symmetric matrix: eigenvalues ascending with
/// matching unit eigenvectors, plus the condition number max/min when the
/// smallest eigenvalue is positive.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub condition_number: Option<f64>,
}

impl EigenResult {
    /// Smallest and largest singular value (absolute eigenvalue) of the
    /// decomposed symmetric matrix.
    pub fn singular_extremes(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for &l in &self.eigenvalues {
            lo = lo.min(l.abs());
            hi = hi.max(l.abs());
        }
        (lo, hi)
    }
}

/// Eigendecomposition via the closed form (2x2) or cyclic Jacobi rotations
/// (larger matrices, off-diagonal norm driven to 1e-12 relative to the
/// matrix scale). Input is symmetrized first.
pub fn sym_eigen(m: &SymMat) -> Result<EigenResult, NumericsError> {
    if m.a.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFiniteMatrix);
    }
    let n = m.n;
    if n == 0 {
        return Err(NumericsError::EmptyInput);
    }
    // Symmetrize defensively; callers are expected to be within 1e-10.
    let mut a = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set_sym(i, j, v);
        }
    }

    let (mut vals, mut vecs) = if n == 1 {
        (vec![a.get(0, 0)], vec![vec![1.0]])
    } else if n == 2 {
        eigen_2x2(a.get(0, 0), a.get(0, 1), a.get(1, 1))
    } else {
        jacobi(&mut a)?
    };

    // Sort ascending, carrying eigenvectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    vals = order.iter().map(|&i| vals[i]).collect();
    vecs = order.iter().map(|&i| vecs[i].clone()).collect();

    let min = vals[0];
    let max = vals[n - 1];
    let condition_number = if min > 0.0 { Some(max / min) } else { None };
    Ok(EigenResult { eigenvalues: vals, eigenvectors: vecs, condition_number })
}

fn eigen_2x2(a: f64, b: f64, d: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    if b == 0.0 {
        return (vec![a, d], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }
    let half_tr = 0.5 * (a + d);
    let disc = (0.5 * (a - d)).hypot(b);
    let l1 = half_tr - disc;
    let l2 = half_tr + disc;
    let vec_for = |l: f64| -> Vec<f64> {
        // (A - l I) v = 0; pick the better-conditioned row.
        let v = if (a - l).abs() > (d - l).abs() { vec![-b, a - l] } else { vec![d - l, -b] };
        let norm = v[0].hypot(v[1]);
        vec![v[0] / norm, v[1] / norm]
    };
    (vec![l1, l2], vec![vec_for(l1), vec_for(l2)])
}

fn jacobi(a: &mut SymMat) -> Result<(Vec<f64>, Vec<Vec<f64>>), NumericsError> {
    let n = a.n;
    let scale = a.max_abs();
    if scale == 0.0 {
        let vecs = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect();
        return Ok((vec![0.0; n], vecs));
    }
    // Work on the scaled matrix so the absolute convergence threshold is
    // meaningful regardless of the matrix's magnitude.
    for v in a.a.iter_mut() {
        *v /= scale;
    }
    let mut v = SymMat::zeros(n);
    for i in 0..n {
        v.set_sym(i, i, 1.0);
    }
    const MAX_SWEEPS: usize = 64;
    const TOL: f64 = 1e-12;
    for _ in 0..MAX_SWEEPS {
        if a.off_diag_norm() <= TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= TOL / (n as f64 * n as f64) {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.a[k * n + p] = c * akp - s * akq;
                    a.a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.a[p * n + k] = c * apk - s * aqk;
                    a.a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.a[k * n + p] = c * vkp - s * vkq;
                    v.a[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| a.get(i, i) * scale).collect();
    let vecs: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|i| v.get(i, k)).collect()).collect();
    Ok((vals, vecs))
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, tau: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; tau.len()];
    let mut work = tau.to_vec();
    for i in 0..tau.len() {
        work[i] = tau[i] + h;
        let fp = f(&work);
        work[i] = tau[i] - h;
        let fm = f(&work);
        work[i] = tau[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

/// Central-difference Jacobian of a vector function; row k holds the
/// derivatives of output coordinate k.
pub fn fd_jacobian<F: Fn(&[f64]) -> Vec<f64>>(g: F, tau: &[f64], h: f64) -> Vec<Vec<f64>> {
    let dim_out = g(tau).len();
    let mut rows = vec![vec![0.0; tau.len()]; dim_out];
    let mut work = tau.to_vec();
    for j in 0..tau.len() {
        work[j] = tau[j] + h;
        let gp = g(&work);
        work[j] = tau[j] - h;
        let gm = g(&work);
        work[j] = tau[j];
        for k in 0..dim_out {
            rows[k][j] = (gp[k] - gm[k]) / (2.0 * h);
        }
    }
    rows
}
