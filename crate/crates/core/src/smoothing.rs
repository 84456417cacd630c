//! Smoothed representations `f_eps` of a sampled function and the quantum
//! geometric representation built from them.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::path::SampledPath;
use crate::scale_ops::minimal_resolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// Mean over `[t - eps, t + eps]`.
    BoxCentral,
    /// Mean over `[t, t + eps]`.
    BoxForward,
    /// Mean over `[t - eps, t]`.
    BoxBackward,
    /// Gaussian with standard deviation `eps`, truncated at `4 eps`.
    Gaussian,
}

/// How the one-sided box means are normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Weights integrate to one, so constants are preserved.
    #[default]
    Conventional,
    /// Prefactor `1 / (2 eps)` on the one-sided means (half of the usual average).
    HalfAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub width: f64,
    #[serde(default)]
    pub normalization: Normalization,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, width: f64) -> Self {
        Self {
            kind,
            width,
            normalization: Normalization::Conventional,
        }
    }

    pub fn half_average(mut self) -> Self {
        self.normalization = Normalization::HalfAverage;
        self
    }
}

/// Discrete kernel: `weights[j]` multiplies the sample at offset `first + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    pub first: isize,
    pub weights: Vec<f64>,
}

impl DiscreteKernel {
    pub fn last(&self) -> isize {
        self.first + self.weights.len() as isize - 1
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Composite Newton-Cotes weights for `n` unit intervals: Simpson when `n`
/// is even, Simpson plus a closing 3/8 panel when odd, trapezoid for `n = 1`.
/// Exact for cubics when `n >= 2`.
fn newton_cotes(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    if n == 1 {
        w[0] = 0.5;
        w[1] = 0.5;
        return w;
    }
    let simpson_end = if n % 2 == 0 { n } else { n - 3 };
    for p in (0..simpson_end).step_by(2) {
        w[p] += 1.0 / 3.0;
        w[p + 1] += 4.0 / 3.0;
        w[p + 2] += 1.0 / 3.0;
    }
    if n % 2 == 1 {
        let s = simpson_end;
        w[s] += 3.0 / 8.0;
        w[s + 1] += 9.0 / 8.0;
        w[s + 2] += 9.0 / 8.0;
        w[s + 3] += 3.0 / 8.0;
    }
    w
}

impl KernelSpec {
    /// Discretises the kernel on a grid of step `dt`.
    pub fn discretize(&self, dt: f64) -> Result<DiscreteKernel> {
        let k = crate::path::grid_steps(self.width, dt)?;
        let literal = self.normalization == Normalization::HalfAverage;
        let kernel = match self.kind {
            KernelKind::BoxCentral => {
                let w = newton_cotes(2 * k);
                let scale = 1.0 / (2 * k) as f64;
                DiscreteKernel {
                    first: -(k as isize),
                    weights: w.into_iter().map(|x| x * scale).collect(),
                }
            }
            KernelKind::BoxForward | KernelKind::BoxBackward => {
                let w = newton_cotes(k);
                let scale = if literal { 0.5 } else { 1.0 } / k as f64;
                let first = if self.kind == KernelKind::BoxForward {
                    0
                } else {
                    -(k as isize)
                };
                DiscreteKernel {
                    first,
                    weights: w.into_iter().map(|x| x * scale).collect(),
                }
            }
            KernelKind::Gaussian => {
                let half = 4 * k;
                let raw: Vec<f64> = (0..=2 * half)
                    .map(|j| {
                        let s = (j as f64 - half as f64) / k as f64;
                        (-0.5 * s * s).exp()
                    })
                    .collect();
                let total: f64 = raw.iter().sum();
                DiscreteKernel {
                    first: -(half as isize),
                    weights: raw.into_iter().map(|x| x / total).collect(),
                }
            }
        };
        Ok(kernel)
    }
}

/// Convolves `f` with `kernel` on the sub-grid where the kernel fits.
pub fn smooth_representation(f: &SampledPath, kernel: &KernelSpec) -> Result<SampledPath> {
    let disc = kernel.discretize(f.dt())?;
    let lo = (-disc.first).max(0) as usize;
    let hi = disc.last().max(0) as usize;
    if lo + hi >= f.len() {
        return Err(param(
            "width",
            format!(
                "kernel support of {} samples exceeds the {}-sample domain",
                lo + hi + 1,
                f.len()
            ),
        ));
    }
    let vals = f.values();
    let out: Vec<f64> = (lo..f.len() - hi)
        .map(|i| {
            let base = (i as isize + disc.first) as usize;
            disc.weights
                .iter()
                .zip(&vals[base..base + disc.weights.len()])
                .map(|(w, v)| w * v)
                .sum()
        })
        .collect();
    Ok(SampledPath::derived(f.time(lo), f.dt(), out))
}

/// Either the mean graph alone or the pair of one-sided mean graphs.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumRepresentation {
    Single(SampledPath),
    Pair {
        forward: SampledPath,
        backward: SampledPath,
    },
}

impl QuantumRepresentation {
    pub fn is_pair(&self) -> bool {
        matches!(self, QuantumRepresentation::Pair { .. })
    }
}

/// Forward and backward box means of width `eps` on their common sub-grid.
pub fn one_sided_means(f: &SampledPath, eps: f64) -> Result<(SampledPath, SampledPath)> {
    let fwd = smooth_representation(f, &KernelSpec::new(KernelKind::BoxForward, eps))?;
    let bwd = smooth_representation(f, &KernelSpec::new(KernelKind::BoxBackward, eps))?;
    let o = fwd.overlap(&bwd)?;
    Ok((fwd.slice(o.a_start, o.len), bwd.slice(o.b_start, o.len)))
}

/// Single mean graph when `eps` exceeds the `h`-minimal resolution of `f`
/// (or the resolution is below the grid), otherwise the one-sided pair.
pub fn quantum_representation(f: &SampledPath, eps: f64, h: f64) -> Result<QuantumRepresentation> {
    f.steps(eps)?;
    let res = minimal_resolution(f, h)?;
    if res.vanishes() || res.global().exceeded_by(eps) {
        let mean = smooth_representation(f, &KernelSpec::new(KernelKind::BoxCentral, eps))?;
        Ok(QuantumRepresentation::Single(mean))
    } else {
        let (forward, backward) = one_sided_means(f, eps)?;
        Ok(QuantumRepresentation::Pair { forward, backward })
    }
}
