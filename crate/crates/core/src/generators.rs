//! Generators for the example fractal functions: Takagi partial sums,
//! fractal interpolation by affine systems, and principal Schrödinger paths.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::path::{grid_steps, Grid, SampledPath};

/// The period-1 tent map: `2t` on `[0, 1/2]`, `2 - 2t` on `[1/2, 1]`.
pub fn tent(t: f64) -> f64 {
    let frac = t - t.floor();
    2.0 * frac.min(1.0 - frac)
}

/// Partial sum `sum_{n < n_terms} 2^{-n alpha} g(2^n t)` of the Takagi series.
pub fn takagi_value(alpha: f64, n_terms: usize, t: f64) -> f64 {
    let decay = 2f64.powf(-alpha);
    let mut weight = 1.0;
    let mut scaled = t;
    let mut sum = 0.0;
    for _ in 0..n_terms {
        sum += weight * tent(scaled);
        weight *= decay;
        scaled *= 2.0;
    }
    sum
}

/// Smallest term count with `2^{-n alpha} < dt`, which keeps the truncation
/// error of the partial sum below the grid resolution.
pub fn takagi_terms_for(alpha: f64, dt: f64) -> usize {
    ((-dt.log2()) / alpha).floor() as usize + 1
}

fn check_exponent(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param(
            "alpha",
            format!("exponent must lie in (0, 1), got {alpha}"),
        ));
    }
    Ok(())
}

/// Samples the Takagi partial sum on `grid`, starting at `t = 0`.
pub fn gen_takagi(alpha: f64, n_terms: usize, grid: Grid) -> Result<SampledPath> {
    check_exponent(alpha)?;
    if n_terms == 0 {
        return Err(param("n_terms", "at least one term is required"));
    }
    let grid = Grid::new(grid.dt, grid.len)?;
    SampledPath::from_fn(0.0, grid.dt, grid.len, |t| takagi_value(alpha, n_terms, t))
}

/// An affine system in the fractal-interpolation form.
///
/// Map `F_i` sends `x` affinely onto `[x_i, x_{i+1}]` and `y` to
/// `d_i y + q_i(x)`, where the linear part `q_i` is fixed by
/// `F_i(A) = A_i` and `F_i(B) = A_{i+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSystem {
    points: Vec<(f64, f64)>,
    scalings: Vec<f64>,
    iterations: usize,
}

impl AffineSystem {
    pub fn new(points: Vec<(f64, f64)>, scalings: Vec<f64>, iterations: usize) -> Result<Self> {
        if points.len() < 3 {
            return Err(param("points", "an affine system needs N + 1 >= 3 points"));
        }
        if scalings.len() + 1 != points.len() {
            return Err(param(
                "scalings",
                format!(
                    "expected {} scalings, got {}",
                    points.len() - 1,
                    scalings.len()
                ),
            ));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(param("points", "coordinates must be finite"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(param("points", "x coordinates must be strictly increasing"));
        }
        if let Some((index, &value)) = scalings.iter().enumerate().find(|(_, d)| !(d.abs() < 1.0)) {
            return Err(Error::Contraction { index, value });
        }
        Ok(Self {
            points,
            scalings,
            iterations,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn scalings(&self) -> &[f64] {
        &self.scalings
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn with_iterations(&self, iterations: usize) -> Self {
        Self {
            iterations,
            ..self.clone()
        }
    }

    pub fn max_scaling(&self) -> f64 {
        self.scalings.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    fn a(&self) -> (f64, f64) {
        self.points[0]
    }

    fn b(&self) -> (f64, f64) {
        self.points[self.points.len() - 1]
    }

    /// Evaluates the `n`-th iterate `z_n` at `x` in `[a, b]`.
    pub fn iterate_at(&self, n: usize, x: f64) -> f64 {
        let (a, ya) = self.a();
        let (b, yb) = self.b();
        if n == 0 {
            return ya + (yb - ya) * (x - a) / (b - a);
        }
        let last = self.points.len() - 2;
        let i = self
            .points
            .windows(2)
            .position(|w| x < w[1].0)
            .unwrap_or(last)
            .min(last);
        let (xi, yi) = self.points[i];
        let (xj, yj) = self.points[i + 1];
        let d = self.scalings[i];
        // pre-image of x under the horizontal part of F_i
        let u = a + (b - a) * (x - xi) / (xj - xi);
        let s = (u - a) / (b - a);
        let q = (yi - d * ya) * (1.0 - s) + (yj - d * yb) * s;
        d * self.iterate_at(n - 1, u) + q
    }
}

/// Samples the iterate `z_n` (`n = system.iterations()`) starting at `x_1`.
pub fn gen_affine_ifs(system: &AffineSystem, grid: Grid) -> Result<SampledPath> {
    let grid = Grid::new(grid.dt, grid.len)?;
    let (a, _) = system.a();
    let (b, _) = system.b();
    if grid.span() > (b - a) * (1.0 + 1e-12) {
        return Err(param(
            "grid",
            format!("grid span {} exceeds the interval [{a}, {b}]", grid.span()),
        ));
    }
    let n = system.iterations;
    SampledPath::from_fn(a, grid.dt, grid.len, |x| system.iterate_at(n, x.min(b)))
}

/// Choice of sign for `±sqrt(hbar/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Parameters of a member of the principal Schrödinger set,
/// `X(t) = sign sqrt(hbar/m) (t - c - eps/2) + P(t)` with
/// `P(t) = amplitude * K_{1/2}((t / eps) mod 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPath {
    pub hbar_over_m: f64,
    pub c: f64,
    pub sign: Sign,
    pub eps: f64,
    pub amplitude: f64,
}

impl PrincipalPath {
    pub fn slope(&self) -> f64 {
        self.sign.value() * self.hbar_over_m.sqrt()
    }
}

/// Samples a principal Schrödinger path on `grid` (starting at `t = 0`).
///
/// All samples lie on one lattice `u Z` with `u` the ulp of the largest
/// magnitude, and samples one period apart differ by the same lattice step
/// `d ≈ slope * eps`. Every `eps`-difference is therefore exactly `d`, and
/// `d` is the lattice point whose quotient `d / eps` squares closest to
/// `hbar/m`. The samples stay within `len * u` of the formula.
pub fn gen_principal_schrodinger(path: &PrincipalPath, grid: Grid) -> Result<SampledPath> {
    if !(path.hbar_over_m > 0.0 && path.hbar_over_m.is_finite()) {
        return Err(param("hbar_over_m", "must be positive"));
    }
    if !path.c.is_finite() || !path.amplitude.is_finite() {
        return Err(param("c", "offset and amplitude must be finite"));
    }
    let grid = Grid::new(grid.dt, grid.len)?;
    let k = grid_steps(path.eps, grid.dt)?;
    let slope = path.slope();
    let n_terms = takagi_terms_for(0.5, 1.0 / k as f64).max(32);
    let periodic: Vec<f64> = (0..k)
        .map(|j| path.amplitude * takagi_value(0.5, n_terms, j as f64 / k as f64))
        .collect();
    let formula = |i: usize| {
        let t = i as f64 * grid.dt;
        slope * (t - path.c - path.eps / 2.0) + periodic[i % k]
    };
    let top = (0..grid.len).map(|i| formula(i).abs()).fold(0.0, f64::max);
    let top = top + grid.len as f64 * top * f64::EPSILON;
    if !top.is_finite() || top >= 2f64.powi(1000) {
        return Err(param("c", "path magnitude out of range"));
    }
    let u = if top < f64::MIN_POSITIVE {
        f64::MIN_POSITIVE * f64::EPSILON
    } else {
        2f64.powi(top.log2().floor() as i32) * f64::EPSILON
    };
    let ratio = path.hbar_over_m;
    let step = (slope * path.eps / u).round() as i64;
    let d = (step - 1..=step + 1)
        .min_by(|&a, &b| {
            let gap = |n: i64| {
                (n as f64 * u / path.eps)
                    .mul_add(n as f64 * u / path.eps, -ratio)
                    .abs()
            };
            gap(a).total_cmp(&gap(b))
        })
        .unwrap_or(step);
    let base: Vec<i64> = (0..k.min(grid.len))
        .map(|j| (formula(j) / u).round() as i64)
        .collect();
    let values = (0..grid.len)
        .map(|i| (base[i % k] + (i / k) as i64 * d) as f64 * u)
        .collect();
    SampledPath::new(0.0, grid.dt, values)
}
