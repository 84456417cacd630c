//! Quantum difference operators, the complex scale derivative, the
//! non-differentiability defect and the minimal resolution.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::path::{ComplexPath, Path, Sample, SampledPath};

/// Sample types the difference operators act on.
pub trait Scalar:
    Sample + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Div<f64, Output = Self>
{
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Direction of a quantum difference operator, `sigma = ±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// `∇₊ f(t) = (f(t+eps) - f(t)) / eps` or `∇₋ f(t) = (f(t) - f(t-eps)) / eps`.
///
/// The output drops the `k = eps / dt` samples whose stencil leaves the domain.
pub fn quantum_diff<T: Scalar>(f: &Path<T>, eps: f64, side: Side) -> Result<Path<T>> {
    let k = f.steps(eps)?;
    if f.len() <= k {
        return Err(Error::Grid(format!(
            "{} samples cannot hold a difference of {k} steps",
            f.len()
        )));
    }
    let v = f.values();
    let out: Vec<T> = (0..v.len() - k).map(|i| (v[i + k] - v[i]) / eps).collect();
    let t0 = match side {
        Side::Plus => f.t0(),
        Side::Minus => f.time(k),
    };
    Ok(Path::derived(t0, f.dt(), out))
}

/// Classical translation `(τ_s f)(t) = f(t + s)` for `s = shift_steps * dt`.
pub fn translate<T: Sample>(f: &Path<T>, shift_steps: isize) -> Path<T> {
    Path::derived(
        f.t0() - shift_steps as f64 * f.dt(),
        f.dt(),
        f.values().to_vec(),
    )
}

/// Forward and backward quotients aligned on the centred sub-grid.
pub fn sided_quotients(f: &SampledPath, eps: f64) -> Result<(SampledPath, SampledPath)> {
    let k = f.centred_steps(eps)?;
    let v = f.values();
    let n = v.len();
    let plus = (k..n - k).map(|i| (v[i + k] - v[i]) / eps).collect();
    let minus = (k..n - k).map(|i| (v[i] - v[i - k]) / eps).collect();
    Ok((
        Path::derived(f.time(k), f.dt(), plus),
        Path::derived(f.time(k), f.dt(), minus),
    ))
}

/// `½(p + m) - (i/2)(p - m)` for forward quotient `p` and backward quotient `m`.
#[inline]
pub fn scale_combination(plus: f64, minus: f64) -> Complex64 {
    Complex64::new(0.5 * (plus + minus), -0.5 * (plus - minus))
}

/// The complex `eps`-scale difference operator `□_ε / □t`.
pub trait ScaleDerivative {
    fn scale_derivative(&self, eps: f64) -> Result<ComplexPath>;
}

impl ScaleDerivative for SampledPath {
    fn scale_derivative(&self, eps: f64) -> Result<ComplexPath> {
        let (p, m) = sided_quotients(self, eps)?;
        let values = p
            .values()
            .iter()
            .zip(m.values())
            .map(|(&a, &b)| scale_combination(a, b))
            .collect();
        Ok(Path::derived(p.t0(), p.dt(), values))
    }
}

impl ScaleDerivative for ComplexPath {
    /// Applied to real and imaginary parts separately: `□C = □C_r + i □C_m`.
    fn scale_derivative(&self, eps: f64) -> Result<ComplexPath> {
        let dr = self.re().scale_derivative(eps)?;
        let dm = self.im().scale_derivative(eps)?;
        let values = dr
            .values()
            .iter()
            .zip(dm.values())
            .map(|(&r, &m)| r + Complex64::i() * m)
            .collect();
        Ok(Path::derived(dr.t0(), dr.dt(), values))
    }
}

pub fn scale_derivative<P: ScaleDerivative>(f: &P, eps: f64) -> Result<ComplexPath> {
    f.scale_derivative(eps)
}

/// `a_ε f(t) = |f(t+ε) + f(t-ε) - 2 f(t)| / ε` on the centred sub-grid.
pub fn nondiff_defect(f: &SampledPath, eps: f64) -> Result<SampledPath> {
    let k = f.centred_steps(eps)?;
    let v = f.values();
    let out = (k..v.len() - k).map(|i| defect_at(v, i, k, eps)).collect();
    Ok(Path::derived(f.time(k), f.dt(), out))
}

#[inline]
fn defect_at(v: &[f64], i: usize, k: usize, eps: f64) -> f64 {
    ((v[i + k] + v[i - k] - 2.0 * v[i]) / eps).abs()
}

/// A minimal-resolution value: a grid width or `+∞` when no admissible
/// width brings the defect under the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Finite(f64),
    Infinite,
}

impl Resolution {
    /// `true` when `eps` is strictly above this resolution.
    pub fn exceeded_by(self, eps: f64) -> bool {
        match self {
            Resolution::Finite(r) => eps > r * (1.0 + 1e-12),
            Resolution::Infinite => false,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Resolution::Finite(r) => Some(r),
            Resolution::Infinite => None,
        }
    }

    fn max(self, other: Self) -> Self {
        match (self, other) {
            (Resolution::Finite(a), Resolution::Finite(b)) => Resolution::Finite(a.max(b)),
            _ => Resolution::Infinite,
        }
    }
}

impl Serialize for Resolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Resolution::Finite(r) => s.serialize_f64(*r),
            Resolution::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Resolution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Ok(Resolution::Finite(r)),
            Raw::Text(s) if s == "inf" => Ok(Resolution::Infinite),
            Raw::Text(s) => Err(de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Per-point and global `h`-minimal resolution over the admissible widths
/// `{dt, 2dt, …, max_steps·dt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalResolution {
    pub h: f64,
    pub global: Resolution,
    /// Time of the first entry of `per_point`.
    pub t0: f64,
    pub dt: f64,
    pub max_steps: usize,
    pub per_point: Vec<Resolution>,
}

impl MinimalResolution {
    pub fn global(&self) -> Resolution {
        self.global
    }

    /// `true` when the resolution is not distinguishable from zero on this
    /// grid: every point already satisfies the threshold at `eps = dt`.
    pub fn vanishes(&self) -> bool {
        matches!(self.global, Resolution::Finite(r) if r <= self.dt * (1.0 + 1e-9))
    }
}

/// Default widest admissible width: one eighth of the domain.
pub fn default_resolution_steps(f: &SampledPath) -> usize {
    ((f.len() - 1) / 8).max(1)
}

pub fn minimal_resolution(f: &SampledPath, h: f64) -> Result<MinimalResolution> {
    minimal_resolution_with(f, h, default_resolution_steps(f))
}

/// Minimal resolution restricted to widths of at most `max_steps` grid steps.
/// Only points whose widest stencil fits the domain are reported.
pub fn minimal_resolution_with(
    f: &SampledPath,
    h: f64,
    max_steps: usize,
) -> Result<MinimalResolution> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(param("h", format!("threshold must be positive, got {h}")));
    }
    if max_steps == 0 || f.len() <= 2 * max_steps {
        return Err(Error::Grid(format!(
            "{} samples cannot hold widths up to {max_steps} steps",
            f.len()
        )));
    }
    let v = f.values();
    let dt = f.dt();
    let per_point: Vec<Resolution> = (max_steps..v.len() - max_steps)
        .map(|i| {
            (1..=max_steps)
                .find(|&k| defect_at(v, i, k, k as f64 * dt) < h)
                .map_or(Resolution::Infinite, |k| Resolution::Finite(k as f64 * dt))
        })
        .collect();
    let global = per_point
        .iter()
        .copied()
        .fold(Resolution::Finite(0.0), Resolution::max);
    Ok(MinimalResolution {
        h,
        global,
        t0: f.time(max_steps),
        dt,
        max_steps,
        per_point,
    })
}

/// Largest grid size scanned exhaustively by [`holder_norm_estimate`].
pub const HOLDER_EXACT_CAP: usize = 1 << 12;
const HOLDER_SEED: u64 = 0x5ca1e_ca1c;

/// Lower bound of `|f|_α = sup |f(x) - f(y)| / |x - y|^α` from the samples.
///
/// All pairs are scanned up to [`HOLDER_EXACT_CAP`] samples. Larger grids use
/// every pair of an evenly strided sub-grid (endpoints included) plus a fixed
/// number of seeded random pairs at each dyadic separation below the stride.
pub fn holder_norm_estimate(f: &SampledPath, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param(
            "alpha",
            format!("exponent must lie in (0, 1), got {alpha}"),
        ));
    }
    if f.len() < 2 {
        return Err(param("f", "need at least two samples"));
    }
    let v = f.values();
    let n = v.len();
    let dt = f.dt();
    if n <= HOLDER_EXACT_CAP {
        return Ok(all_pairs(v, 1, dt, alpha));
    }
    let stride = (n - 1).div_ceil(HOLDER_EXACT_CAP - 1);
    let mut sub: Vec<f64> = v.iter().step_by(stride).copied().collect();
    let mut best = all_pairs(&sub, stride, dt, alpha);
    if (n - 1) % stride != 0 {
        // the last sample is off the strided sub-grid: pair it with everything
        let last = v[n - 1];
        sub.clear();
        for (j, &x) in v.iter().enumerate().step_by(stride) {
            let sep = (n - 1 - j) as f64 * dt;
            best = best.max((last - x).abs() / sep.powf(alpha));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(HOLDER_SEED);
    let mut sep = 1usize;
    while sep < stride {
        let inv = 1.0 / (sep as f64 * dt).powf(alpha);
        for _ in 0..HOLDER_EXACT_CAP {
            let i = rng.gen_range(0..n - sep);
            best = best.max((v[i + sep] - v[i]).abs() * inv);
        }
        sep *= 2;
    }
    Ok(best)
}

fn all_pairs(v: &[f64], stride: usize, dt: f64, alpha: f64) -> f64 {
    let n = v.len();
    let mut best = 0.0f64;
    for d in 1..n {
        let inv = 1.0 / ((d * stride) as f64 * dt).powf(alpha);
        let m = v[d..]
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        best = best.max(m * inv);
    }
    best
}
