use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::path::{ComplexPath, Path, SampledPath};
use crate::scale_ops::{minimal_resolution, ScaleDerivative};

/// Potential energy `U(x)` with its analytic derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Potential {
    Free,
    /// `U = slope x`; a uniform field of strength `g` is `slope = -g`.
    Linear {
        slope: f64,
    },
    /// `U = k x² / 2`
    Harmonic {
        k: f64,
    },
    /// `U = Σ c_i x^i`
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl Potential {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Linear { slope } => slope * x,
            Potential::Harmonic { k } => 0.5 * k * x * x,
            Potential::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Linear { slope } => *slope,
            Potential::Harmonic { k } => k * x,
            Potential::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + i as f64 * c),
        }
    }
}

/// A Lagrangian `L(x, v, t)` evaluated at possibly complex velocity.
pub trait Lagrangian {
    fn value(&self, x: f64, v: Complex64, t: f64) -> Complex64;
    /// `∂L/∂v`
    fn d_v(&self, x: f64, v: Complex64, t: f64) -> Complex64;
    /// `∂L/∂x`
    fn d_x(&self, x: f64, v: Complex64, t: f64) -> Complex64;
}

/// `L = m v² / 2 + U(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLagrangian {
    pub m: f64,
    pub potential: Potential,
}

impl ClassicalLagrangian {
    pub fn new(m: f64, potential: Potential) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(param("m", format!("mass must be positive, got {m}")));
        }
        Ok(Self { m, potential })
    }
}

impl Lagrangian for ClassicalLagrangian {
    fn value(&self, x: f64, v: Complex64, _t: f64) -> Complex64 {
        v * v * (0.5 * self.m) + self.potential.value(x)
    }

    fn d_v(&self, _x: f64, v: Complex64, _t: f64) -> Complex64 {
        v * self.m
    }

    fn d_x(&self, x: f64, _v: Complex64, _t: f64) -> Complex64 {
        Complex64::new(self.potential.deriv(x), 0.0)
    }
}

/// The operator substituted for `d/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QOperator {
    /// `(f(t+eps) - f(t-eps)) / 2eps`
    Central,
    /// The complex scale derivative.
    Scale,
}

/// `(f(t+eps) - f(t-eps)) / 2eps` on the centred sub-grid, part by part.
pub fn central_derivative(f: &ComplexPath, eps: f64) -> Result<ComplexPath> {
    let k = f.centred_steps(eps)?;
    let v = f.values();
    let out = (k..v.len() - k)
        .map(|i| (v[i + k] - v[i - k]) / (2.0 * eps))
        .collect();
    Ok(Path::derived(f.time(k), f.dt(), out))
}

/// Chooses `Q(d/dt)` from the regularity of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationPipeline {
    pub eps: f64,
    /// Threshold of the minimal resolution test; `None` always uses the scale derivative.
    pub h: Option<f64>,
}

impl QuantizationPipeline {
    pub fn scale(eps: f64) -> Self {
        Self { eps, h: None }
    }

    pub fn with_threshold(eps: f64, h: f64) -> Self {
        Self { eps, h: Some(h) }
    }

    /// Central differences when the `h`-minimal resolution of `x` vanishes on the grid.
    pub fn operator_for(&self, x: &SampledPath) -> Result<QOperator> {
        match self.h {
            None => Ok(QOperator::Scale),
            Some(h) => Ok(if minimal_resolution(x, h)?.vanishes() {
                QOperator::Central
            } else {
                QOperator::Scale
            }),
        }
    }

    pub fn derive(&self, op: QOperator, f: &ComplexPath) -> Result<ComplexPath> {
        match op {
            QOperator::Central => central_derivative(f, self.eps),
            QOperator::Scale => f.scale_derivative(self.eps),
        }
    }

    /// `V = Q(d/dt) X`.
    pub fn velocity(&self, op: QOperator, x: &SampledPath) -> Result<ComplexPath> {
        self.derive(op, &x.to_complex())
    }
}

/// `V = □_ε X / □t`.
pub fn complex_velocity(x: &SampledPath, eps: f64) -> Result<ComplexPath> {
    x.scale_derivative(eps)
}

fn sample_at(x: &SampledPath, t: f64) -> f64 {
    x.values()[((t - x.t0()) / x.dt()).round() as usize]
}

fn value_at(v: &ComplexPath, t: f64) -> Complex64 {
    v.values()[((t - v.t0()) / v.dt()).round() as usize]
}

/// `Q(L)`: the same rule read as a function of `(X, V, t)`.
pub struct QuantizedLagrangian<'a, L: Lagrangian> {
    pub lagrangian: &'a L,
}

impl<'a, L: Lagrangian> QuantizedLagrangian<'a, L> {
    pub fn quantize(lagrangian: &'a L) -> Self {
        Self { lagrangian }
    }

    /// Residual of the scale Euler-Lagrange equation
    /// `Q(d/dt)[∂𝓛/∂V(X, V, t)] - ∂𝓛/∂X(X, V, t)` along `x`.
    pub fn scale_euler_lagrange(
        &self,
        pipeline: &QuantizationPipeline,
        x: &SampledPath,
    ) -> Result<ComplexPath> {
        let op = pipeline.operator_for(x)?;
        let v = pipeline.velocity(op, x)?;
        let momentum = v.map_with_time(|t, vt| self.lagrangian.d_v(sample_at(x, t), vt, t))?;
        let lhs = pipeline.derive(op, &momentum)?;
        lhs.map_with_time(|t, d| d - self.lagrangian.d_x(sample_at(x, t), value_at(&v, t), t))
    }
}

type Rule<'a> = Box<dyn Fn(f64, Complex64, f64) -> Complex64 + 'a>;

/// The classical Euler-Lagrange equation `d/dt p(x, v, t) = F(x, v, t)`,
/// kept as its momentum and force rules.
pub struct ClassicalEquation<'a> {
    momentum: Rule<'a>,
    force: Rule<'a>,
}

impl<'a> ClassicalEquation<'a> {
    pub fn of<L: Lagrangian>(l: &'a L) -> Self {
        Self {
            momentum: Box::new(move |x, v, t| l.d_v(x, v, t)),
            force: Box::new(move |x, v, t| l.d_x(x, v, t)),
        }
    }

    /// Quantizes the equation (`x → X`, `v → V`, `d/dt → Q(d/dt)`) and
    /// returns its residual along `x`.
    pub fn quantized_residual(
        &self,
        pipeline: &QuantizationPipeline,
        x: &SampledPath,
    ) -> Result<ComplexPath> {
        let op = pipeline.operator_for(x)?;
        let v = pipeline.velocity(op, x)?;
        let p = v.map_with_time(|t, vt| (self.momentum)(sample_at(x, t), vt, t))?;
        let dp = pipeline.derive(op, &p)?;
        dp.map_with_time(|t, d| d - (self.force)(sample_at(x, t), value_at(&v, t), t))
    }
}

/// `m □_ε(□_ε X/□t)/□t - U'(X(t))`.
pub fn el_residual(l: &ClassicalLagrangian, x: &SampledPath, eps: f64) -> Result<ComplexPath> {
    QuantizedLagrangian::quantize(l).scale_euler_lagrange(&QuantizationPipeline::scale(eps), x)
}
