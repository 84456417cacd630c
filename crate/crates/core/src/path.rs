//! Uniform-grid sample containers.
//!
//! A [`Path`] stores samples `values[i]` taken at `t0 + i * dt`. Operators that
//! need a stencil of half-width `k * dt` return a new, shorter path whose `t0`
//! is shifted so that every output sample keeps its original time stamp.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Relative slack allowed when checking that a width is a multiple of `dt`.
const GRID_SLACK: f64 = 1e-9;

/// Scalar types that can be stored in a [`Path`].
pub trait Sample: Copy + std::fmt::Debug + PartialEq + Send + Sync + 'static {
    fn is_finite_sample(&self) -> bool;
}

impl Sample for f64 {
    fn is_finite_sample(&self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    fn is_finite_sample(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path<T> {
    t0: f64,
    dt: f64,
    values: Vec<T>,
}

/// A real function sampled on a uniform grid.
pub type SampledPath = Path<f64>;

/// A complex function sampled on a uniform grid.
pub type ComplexPath = Path<Complex64>;

impl<T: Sample> Path<T> {
    pub fn new(t0: f64, dt: f64, values: Vec<T>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(param(
                "dt",
                format!("grid step must be positive and finite, got {dt}"),
            ));
        }
        if !t0.is_finite() {
            return Err(param("t0", "start time must be finite"));
        }
        if values.is_empty() {
            return Err(param("values", "a path needs at least one sample"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_sample()) {
            return Err(param("values", format!("sample {i} is not finite")));
        }
        Ok(Self { t0, dt, values })
    }

    /// Builds a path by evaluating `f` at `len` grid points starting at `t0`.
    pub fn from_fn(t0: f64, dt: f64, len: usize, f: impl Fn(f64) -> T) -> Result<Self> {
        let values = (0..len).map(|i| f(t0 + i as f64 * dt)).collect();
        Self::new(t0, dt, values)
    }

    /// Internal constructor for outputs derived from already validated paths.
    pub(crate) fn derived(t0: f64, dt: f64, values: Vec<T>) -> Self {
        Self { t0, dt, values }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    /// Last grid time.
    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Length of the sampled domain, `(len - 1) * dt`.
    pub fn span(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    /// Number of grid steps in `width`; fails unless `width = k * dt` with `k >= 1`.
    pub fn steps(&self, width: f64) -> Result<usize> {
        grid_steps(width, self.dt)
    }

    /// Like [`Path::steps`], also requiring `len > 2k` so that a centred
    /// stencil of half-width `k` leaves at least one output sample.
    pub fn centred_steps(&self, width: f64) -> Result<usize> {
        let k = self.steps(width)?;
        if self.len() <= 2 * k {
            return Err(Error::Grid(format!(
                "{} samples cannot hold a centred stencil of half-width {k}",
                self.len()
            )));
        }
        Ok(k)
    }

    /// Contiguous sub-path `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        Self::derived(
            self.time(start),
            self.dt,
            self.values[start..start + len].to_vec(),
        )
    }

    /// Keeps every `stride`-th sample, starting with the first.
    pub fn decimate(&self, stride: usize) -> Self {
        assert!(stride >= 1);
        let values = self.values.iter().step_by(stride).copied().collect();
        Self::derived(self.t0, self.dt * stride as f64, values)
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> Result<Path<U>> {
        Path::new(
            self.t0,
            self.dt,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Applies `f(t, value)` sample by sample.
    pub fn map_with_time<U: Sample>(&self, f: impl Fn(f64, T) -> U) -> Result<Path<U>> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.time(i), v))
            .collect();
        Path::new(self.t0, self.dt, values)
    }

    /// Index ranges of `self` and `other` covering their common time window.
    ///
    /// Both paths must share `dt` and be offset by a whole number of steps.
    pub fn overlap<U: Sample>(&self, other: &Path<U>) -> Result<Overlap> {
        if ((self.dt - other.dt) / self.dt).abs() > GRID_SLACK {
            return Err(Error::GridMismatch {
                width: other.dt,
                dt: self.dt,
            });
        }
        let offset = (other.t0 - self.t0) / self.dt;
        let shift = offset.round();
        if (offset - shift).abs() > 1e-6 {
            return Err(Error::GridMismatch {
                width: other.t0 - self.t0,
                dt: self.dt,
            });
        }
        let shift = shift as i64;
        let a_start = shift.max(0);
        let b_start = (-shift).max(0);
        let len = (self.len() as i64 - a_start).min(other.len() as i64 - b_start);
        if len <= 0 {
            return Err(Error::Grid("paths do not overlap".into()));
        }
        Ok(Overlap {
            a_start: a_start as usize,
            b_start: b_start as usize,
            len: len as usize,
        })
    }
}

/// Result of [`Path::overlap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub a_start: usize,
    pub b_start: usize,
    pub len: usize,
}

impl SampledPath {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Promotes to a complex path with zero imaginary part.
    pub fn to_complex(&self) -> ComplexPath {
        Path::derived(
            self.t0,
            self.dt,
            self.values
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        )
    }
}

impl ComplexPath {
    pub fn re(&self) -> SampledPath {
        Path::derived(self.t0, self.dt, self.values.iter().map(|z| z.re).collect())
    }

    pub fn im(&self) -> SampledPath {
        Path::derived(self.t0, self.dt, self.values.iter().map(|z| z.im).collect())
    }

    pub fn from_parts(re: &SampledPath, im: &SampledPath) -> Result<Self> {
        let o = re.overlap(im)?;
        if o.a_start != 0 || o.b_start != 0 || re.len() != im.len() {
            return Err(Error::Grid(
                "real and imaginary parts must share a grid".into(),
            ));
        }
        Ok(Path::derived(
            re.t0,
            re.dt,
            re.values
                .iter()
                .zip(&im.values)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        ))
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Number of steps `k` with `width = k * dt`, `k >= 1`.
pub fn grid_steps(width: f64, dt: f64) -> Result<usize> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::GridMismatch { width, dt });
    }
    let ratio = width / dt;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > GRID_SLACK * ratio.max(1.0) {
        return Err(Error::GridMismatch { width, dt });
    }
    Ok(k as usize)
}

/// Uniform grid description `(dt, len)` starting at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dt: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(dt: f64, len: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(param("dt", format!("grid step must be positive, got {dt}")));
        }
        if len == 0 {
            return Err(param("length", "grid must hold at least one sample"));
        }
        Ok(Self { dt, len })
    }

    /// `n + 1` samples covering `[0, 1]` with step `1 / n`.
    pub fn unit(n: usize) -> Self {
        Self {
            dt: 1.0 / n as f64,
            len: n + 1,
        }
    }

    pub fn span(&self) -> f64 {
        (self.len.saturating_sub(1)) as f64 * self.dt
    }
}
