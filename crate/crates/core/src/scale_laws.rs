//! Graph lengths, scale-law fits and ODEs, weak scale laws and box counting.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::ode::rk4_integrate;
use crate::path::SampledPath;
use crate::regression::fit_line;

/// Polygonal length of the graph of `f` sampled every `eps` from `t0`, plus
/// the segment from the last full step to the right endpoint.
pub fn graph_length(f: &SampledPath, eps: f64) -> Result<f64> {
    let k = f.steps(eps)?;
    let n = f.len();
    if k > n - 1 {
        return Err(param(
            "eps",
            format!("width {eps} exceeds the domain {}", f.span()),
        ));
    }
    let v = f.values();
    let full = (n - 1) / k;
    let mut len: f64 = (0..full)
        .map(|i| eps.hypot(v[(i + 1) * k] - v[i * k]))
        .sum();
    let last = full * k;
    if last < n - 1 {
        let tail = (n - 1 - last) as f64 * f.dt();
        len += tail.hypot(v[n - 1] - v[last]);
    }
    Ok(len)
}

/// Log-log fit of graph length against width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLawFit {
    /// `1 + slope`, clamped to `[0, 1]`.
    pub alpha_hat: f64,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Widths, strictly decreasing.
    pub eps: Vec<f64>,
    pub lengths: Vec<f64>,
}

impl ScaleLawFit {
    pub fn from_lengths(eps: &[f64], lengths: &[f64]) -> Result<Self> {
        if eps.len() != lengths.len() {
            return Err(Error::Fit("one length per width is required".into()));
        }
        if lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Fit("lengths must be positive".into()));
        }
        let mut pairs: Vec<(f64, f64)> = eps.iter().copied().zip(lengths.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (eps, lengths): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let y: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
        let line = fit_line(&x, &y)?;
        Ok(Self {
            alpha_hat: (1.0 + line.slope).clamp(0.0, 1.0),
            slope: line.slope,
            intercept: line.intercept,
            residual: line.residual,
            eps,
            lengths,
        })
    }

    /// `(ln eps, ln length)` rows.
    pub fn log_rows(&self) -> Vec<(f64, f64)> {
        self.eps
            .iter()
            .zip(&self.lengths)
            .map(|(e, l)| (e.ln(), l.ln()))
            .collect()
    }
}

/// Dyadic widths `dt * 2^j` between `4 dt` and `span / 32`.
pub fn default_eps_grid(f: &SampledPath) -> Vec<f64> {
    dyadic_widths(f.dt(), 4.0 * f.dt(), f.span() / 32.0)
}

/// `dt * 2^j` for every `j >= 0` landing in `[lo, hi]`, largest first.
pub fn dyadic_widths(dt: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut w = dt;
    while w <= hi * (1.0 + 1e-12) {
        if w >= lo * (1.0 - 1e-12) {
            out.push(w);
        }
        w *= 2.0;
    }
    out.reverse();
    out
}

pub fn fit_holder_exponent(f: &SampledPath, eps_grid: &[f64]) -> Result<ScaleLawFit> {
    if eps_grid.len() < 4 {
        return Err(param(
            "eps_grid",
            format!("need at least 4 widths, got {}", eps_grid.len()),
        ));
    }
    let lengths = eps_grid
        .iter()
        .map(|&e| graph_length(f, e))
        .collect::<Result<Vec<_>>>()?;
    ScaleLawFit::from_lengths(eps_grid, &lengths)
}

/// Lower and upper length envelopes `eps^(α-1) sqrt(eps^(2(1-α)) + c²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub alpha: f64,
    /// Smallest `|Δf| / eps^α` over the partition steps of every width.
    pub c: f64,
    /// Largest `|Δf| / eps^α`.
    pub big_c: f64,
    pub eps: Vec<f64>,
    pub lengths: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl EnvelopeReport {
    pub fn lower_ratios(&self) -> Vec<f64> {
        self.lengths
            .iter()
            .zip(&self.lower)
            .map(|(l, e)| l / e)
            .collect()
    }

    pub fn upper_ratios(&self) -> Vec<f64> {
        self.lengths
            .iter()
            .zip(&self.upper)
            .map(|(l, e)| l / e)
            .collect()
    }

    /// `lower <= length <= upper` at every width, up to relative `tol`.
    pub fn sandwiched(&self, tol: f64) -> bool {
        self.lengths
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(l, (lo, hi))| *l >= lo * (1.0 - tol) && *l <= hi * (1.0 + tol))
    }
}

pub fn envelope(alpha: f64, c: f64, eps: f64) -> f64 {
    eps.powf(alpha - 1.0) * (eps.powf(2.0 * (1.0 - alpha)) + c * c).sqrt()
}

/// Fits `c` and `C` from the increments actually used by [`graph_length`]
/// and evaluates both envelopes on `eps_grid`.
pub fn envelope_report(f: &SampledPath, alpha: f64, eps_grid: &[f64]) -> Result<EnvelopeReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param(
            "alpha",
            format!("exponent must lie in (0, 1), got {alpha}"),
        ));
    }
    let v = f.values();
    let (mut c, mut big_c) = (f64::INFINITY, 0.0f64);
    let mut lengths = Vec::with_capacity(eps_grid.len());
    for &e in eps_grid {
        lengths.push(graph_length(f, e)?);
        let k = f.steps(e)?;
        let scale = e.powf(alpha);
        for i in 0..(v.len() - 1) / k {
            let r = (v[(i + 1) * k] - v[i * k]).abs() / scale;
            c = c.min(r);
            big_c = big_c.max(r);
        }
    }
    let lower = eps_grid.iter().map(|&e| envelope(alpha, c, e)).collect();
    let upper = eps_grid
        .iter()
        .map(|&e| envelope(alpha, big_c, e))
        .collect();
    Ok(EnvelopeReport {
        alpha,
        c,
        big_c,
        eps: eps_grid.to_vec(),
        lengths,
        lower,
        upper,
    })
}

/// Which of the equivalent scale laws to integrate in `t = ln eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleLawForm {
    /// `y' = (α - 1)(y - 1/y)`
    Holder,
    /// `x' = (1 - α)(x - x³)`
    Inverse,
    /// `z' = (1 - α) z`
    Linear,
}

impl ScaleLawForm {
    pub fn rhs(self, alpha: f64, y: f64) -> f64 {
        match self {
            ScaleLawForm::Holder => (alpha - 1.0) * (y - 1.0 / y),
            ScaleLawForm::Inverse => (1.0 - alpha) * (y - y * y * y),
            ScaleLawForm::Linear => (1.0 - alpha) * y,
        }
    }
}

/// Integrates the chosen scale law over `[t_start, t_end]` in `steps` RK4
/// steps; returns `(ln eps, value)` pairs including both ends.
pub fn scale_law_ode(
    form: ScaleLawForm,
    alpha: f64,
    initial: f64,
    t_start: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param(
            "alpha",
            format!("exponent must lie in (0, 1), got {alpha}"),
        ));
    }
    if steps == 0 {
        return Err(param("steps", "need at least one step"));
    }
    if !initial.is_finite() || !t_start.is_finite() || !t_end.is_finite() {
        return Err(param("initial", "values must be finite"));
    }
    if form == ScaleLawForm::Holder {
        if initial == 0.0 {
            return Err(Error::Singularity("y = 0 is a pole of (y - 1/y)".into()));
        }
        if initial < 0.0 {
            return Err(param("initial", "graph lengths are positive"));
        }
    }
    let h = (t_end - t_start) / steps as f64;
    let traj = rk4_integrate(
        |_, y: &[f64]| vec![form.rhs(alpha, y[0])],
        t_start,
        &[initial],
        h,
        steps,
    );
    let out: Vec<(f64, f64)> = traj
        .into_iter()
        .enumerate()
        .map(|(i, y)| (t_start + i as f64 * h, y[0]))
        .collect();
    if out.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::Singularity(
            "trajectory left the finite range".into(),
        ));
    }
    Ok(out)
}

/// Exact holder-form solution, `y² - 1 = (y0² - 1) exp(2(α - 1)(t - t0))`.
pub fn holder_closed_form(alpha: f64, y0: f64, t0: f64, t: f64) -> f64 {
    (1.0 + (y0 * y0 - 1.0) * (2.0 * (alpha - 1.0) * (t - t0)).exp()).sqrt()
}

/// Window exponents for a sampled, non-uniform Hölder exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakScaleLaw {
    pub eps: Vec<f64>,
    /// Minimum over windows of the window mean of α.
    pub gamma: Vec<f64>,
    /// Maximum over windows of the window mean of α.
    pub beta: Vec<f64>,
    /// `dγ / d ln eps`.
    pub dgamma: Vec<f64>,
    /// `dβ / d ln eps`.
    pub dbeta: Vec<f64>,
}

impl WeakScaleLaw {
    /// `E_-(x, t) = (1 - γ - t γ')(x - x³)` at the `i`-th width.
    pub fn e_minus(&self, i: usize, x: f64) -> f64 {
        let t = self.eps[i].ln();
        (1.0 - self.gamma[i] - t * self.dgamma[i]) * (x - x * x * x)
    }

    /// `E_+(x, t) = (1 - β - t β')(x - x³)` at the `i`-th width.
    pub fn e_plus(&self, i: usize, x: f64) -> f64 {
        let t = self.eps[i].ln();
        (1.0 - self.beta[i] - t * self.dbeta[i]) * (x - x * x * x)
    }
}

pub fn weak_scale_exponents(alpha_fn: &SampledPath, eps_grid: &[f64]) -> Result<WeakScaleLaw> {
    if let Some(a) = alpha_fn.values().iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(param("alpha_fn", format!("exponent {a} is outside (0, 1)")));
    }
    if eps_grid.is_empty() {
        return Err(param("eps_grid", "no widths given"));
    }
    let mut eps = eps_grid.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let v = alpha_fn.values();
    let n = v.len();
    let mut gamma = Vec::with_capacity(eps.len());
    let mut beta = Vec::with_capacity(eps.len());
    for &e in &eps {
        let k = alpha_fn.steps(e)?;
        if k > n - 1 {
            return Err(param("eps_grid", format!("width {e} exceeds the domain")));
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut start = 0;
        while start < n - 1 {
            let end = (start + k).min(n - 1);
            let w = &v[start..=end];
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            lo = lo.min(mean);
            hi = hi.max(mean);
            start += k;
        }
        gamma.push(lo);
        beta.push(hi);
    }
    let t: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    Ok(WeakScaleLaw {
        dgamma: derivative(&t, &gamma),
        dbeta: derivative(&t, &beta),
        eps,
        gamma,
        beta,
    })
}

/// Three-point derivative on a non-uniform abscissa; one-sided at the ends.
fn derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (t[1] - t[0])
            } else if i == n - 1 {
                (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2])
            } else {
                let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
                (y[i + 1] * h1 * h1 - y[i - 1] * h2 * h2 + y[i] * (h2 * h2 - h1 * h1))
                    / (h1 * h2 * (h1 + h2))
            }
        })
        .collect()
}

/// Box-counting fit of the graph of a sampled path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountFit {
    pub dimension: f64,
    pub intercept: f64,
    pub residual: f64,
    pub sizes: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Number of `delta × delta` boxes met by the sampled graph, column by column.
pub fn box_count(f: &SampledPath, delta: f64) -> Result<u64> {
    let k = f.steps(delta)?;
    let v = f.values();
    let n = v.len();
    if k > n - 1 {
        return Err(param(
            "box_sizes",
            format!("box {delta} is wider than the domain"),
        ));
    }
    let mut count = 0u64;
    let mut start = 0;
    while start < n - 1 {
        let end = (start + k).min(n - 1);
        let (lo, hi) = v[start..=end]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        count += ((hi / delta).floor() - (lo / delta).floor()) as u64 + 1;
        start += k;
    }
    Ok(count)
}

/// The seven largest dyadic grid multiples not above `span / 16`.
pub fn default_box_sizes(f: &SampledPath) -> Vec<f64> {
    dyadic_widths(f.dt(), f.dt(), f.span() / 16.0)
        .into_iter()
        .take(7)
        .collect()
}

pub fn box_counting_dimension(f: &SampledPath, box_sizes: &[f64]) -> Result<BoxCountFit> {
    if box_sizes.len() < 4 {
        return Err(param(
            "box_sizes",
            format!("need at least 4 sizes, got {}", box_sizes.len()),
        ));
    }
    let counts = box_sizes
        .iter()
        .map(|&d| box_count(f, d))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = box_sizes.iter().map(|d| -d.ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let line = fit_line(&x, &y)?;
    Ok(BoxCountFit {
        dimension: line.slope,
        intercept: line.intercept,
        residual: line.residual,
        sizes: box_sizes.to_vec(),
        counts,
    })
}
