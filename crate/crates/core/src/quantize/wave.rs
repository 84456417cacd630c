use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::ode::rk4_step;
use crate::path::{ComplexPath, Path, Sample};

/// Default `|psi|` below which logarithmic derivatives are refused.
pub const NODE_THRESHOLD: f64 = 1e-12;

/// Complex samples on a uniform `(x, t)` grid, stored time slice by time slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexGrid {
    pub x0: f64,
    pub dx: f64,
    pub nx: usize,
    pub t0: f64,
    pub dt: f64,
    pub nt: usize,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(
        (x0, dx, nx): (f64, f64, usize),
        (t0, dt, nt): (f64, f64, usize),
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if !(dx > 0.0 && dt > 0.0 && dx.is_finite() && dt.is_finite()) {
            return Err(param("dx", "grid steps must be positive"));
        }
        if !(x0.is_finite() && t0.is_finite()) {
            return Err(param("x0", "grid origin must be finite"));
        }
        if nx == 0 || nt == 0 || values.len() != nx * nt {
            return Err(param(
                "values",
                format!("{} samples for a {nx} x {nt} grid", values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_sample()) {
            return Err(param("values", format!("sample {i} is not finite")));
        }
        Ok(Self {
            x0,
            dx,
            nx,
            t0,
            dt,
            nt,
            values,
        })
    }

    pub fn from_fn(
        x_axis: (f64, f64, usize),
        t_axis: (f64, f64, usize),
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let (x0, dx, nx) = x_axis;
        let (t0, dt, nt) = t_axis;
        let mut values = Vec::with_capacity(nx * nt);
        for k in 0..nt {
            for j in 0..nx {
                values.push(f(x0 + j as f64 * dx, t0 + k as f64 * dt));
            }
        }
        Self::new(x_axis, t_axis, values)
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.values[k * self.nx + j]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The `k`-th time slice as a path in `x`.
    pub fn slice(&self, k: usize) -> ComplexPath {
        Path::derived(
            self.x0,
            self.dx,
            self.values[k * self.nx..(k + 1) * self.nx].to_vec(),
        )
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(x, t, value)` in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        (0..self.nt)
            .flat_map(move |k| (0..self.nx).map(move |j| (self.x(j), self.t(k), self.at(j, k))))
    }
}

/// A wave function on an `(x, t)` grid with its physical constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    pub psi: ComplexGrid,
    pub gamma: f64,
    pub m: f64,
    pub hbar: f64,
}

impl WaveField {
    pub fn new(psi: ComplexGrid, gamma: f64, m: f64, hbar: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(param("m", format!("mass must be positive, got {m}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(param("hbar", format!("must be positive, got {hbar}")));
        }
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(param(
                "gamma",
                "normalization constant must be finite and nonzero",
            ));
        }
        if psi.nx < 3 || psi.nt < 3 {
            return Err(Error::Grid("residuals need at least 3 x 3 samples".into()));
        }
        Ok(Self {
            psi,
            gamma,
            m,
            hbar,
        })
    }

    /// `γ = hbar / 2m`.
    pub fn with_schrodinger_gamma(psi: ComplexGrid, m: f64, hbar: f64) -> Result<Self> {
        Self::new(psi, hbar / (2.0 * m), m, hbar)
    }

    /// `psi(x, t) Θ(x)` on every time slice.
    pub fn with_phase(&self, theta: &ComplexPath) -> Result<Self> {
        if theta.len() != self.psi.nx {
            return Err(Error::Grid(format!(
                "phase has {} samples for {} x nodes",
                theta.len(),
                self.psi.nx
            )));
        }
        let g = &self.psi;
        let values = (0..g.nt)
            .flat_map(|k| (0..g.nx).map(move |j| g.at(j, k) * theta.values()[j]))
            .collect();
        let psi = ComplexGrid::new((g.x0, g.dx, g.nx), (g.t0, g.dt, g.nt), values)?;
        Ok(Self {
            psi,
            ..self.clone()
        })
    }
}

/// The coefficient `a_ε(t)` entering the generalized equation.
#[derive(Debug, Clone, PartialEq)]
pub enum AEps {
    Constant(Complex64),
    /// Sampled in `t`; must cover every interior time of the field.
    Path(ComplexPath),
}

impl AEps {
    /// `-2iγ`, the value that reduces the generalized equation to the linear one.
    pub fn schrodinger(gamma: f64) -> Self {
        AEps::Constant(Complex64::new(0.0, -2.0 * gamma))
    }

    fn at(&self, t: f64) -> Result<Complex64> {
        match self {
            AEps::Constant(a) => Ok(*a),
            AEps::Path(p) => {
                let x = (t - p.t0()) / p.dt();
                let i = x.round();
                if (x - i).abs() > 1e-6 || i < 0.0 || i as usize >= p.len() {
                    return Err(Error::Grid(format!("a_eps has no sample at t = {t}")));
                }
                Ok(p.values()[i as usize])
            }
        }
    }
}

/// How the squared-gradient term of the generalized equation is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientForm {
    /// `(∂ψ/∂x)² / ψ`
    #[default]
    Homogeneous,
    /// `(∂ψ/∂x)² / ψ²`
    InverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GseOptions {
    pub gradient: GradientForm,
    pub node_threshold: f64,
}

impl Default for GseOptions {
    fn default() -> Self {
        Self {
            gradient: GradientForm::Homogeneous,
            node_threshold: NODE_THRESHOLD,
        }
    }
}

struct Stencil {
    psi: Complex64,
    dx: Complex64,
    dxx: Complex64,
    dt: Complex64,
}

fn stencil(g: &ComplexGrid, j: usize, k: usize) -> Stencil {
    let c = g.at(j, k);
    let (l, r) = (g.at(j - 1, k), g.at(j + 1, k));
    Stencil {
        psi: c,
        dx: (r - l) / (2.0 * g.dx),
        dxx: (r - c * 2.0 + l) / (g.dx * g.dx),
        dt: (g.at(j, k + 1) - g.at(j, k - 1)) / (2.0 * g.dt),
    }
}

/// Coefficients of `T ψ_t + D ψ_xx + N G - W ψ` at one time slice.
struct Terms {
    t: Complex64,
    d: Complex64,
    n: Option<Complex64>,
}

/// Evaluates `T ψ_t + D ψ_xx [+ N G(ψ, ψ_x)] - W(x) ψ` on the interior grid.
fn residual_grid(
    g: &ComplexGrid,
    terms: impl Fn(usize) -> Result<Terms>,
    gterm: impl Fn(&Stencil) -> Complex64,
    w: impl Fn(f64) -> f64,
    node_threshold: Option<f64>,
) -> Result<ComplexGrid> {
    let (nx, nt) = (g.nx - 2, g.nt - 2);
    let weights: Vec<f64> = (1..=nx).map(|j| w(g.x(j))).collect();
    let mut out = Vec::with_capacity(nx * nt);
    for k in 1..=nt {
        let c = terms(k)?;
        for j in 1..=nx {
            let s = stencil(g, j, k);
            if let Some(th) = node_threshold {
                let modulus = s.psi.norm();
                if modulus < th {
                    return Err(Error::Node {
                        x: g.x(j),
                        t: g.t(k),
                        modulus,
                    });
                }
            }
            let mut r = c.t * s.dt + c.d * s.dxx;
            if let Some(n) = c.n {
                r += n * gterm(&s);
            }
            out.push(r - s.psi * weights[j - 1]);
        }
    }
    ComplexGrid::new((g.x(1), g.dx, nx), (g.t(1), g.dt, nt), out)
}

/// Residual of
/// `2iγm[-G (iγ + a/2) + ψ_t + (a/2) ψ_xx] - (U + α) ψ`
/// with `G` the squared-gradient term selected in `opts`.
pub fn gse_residual(
    field: &WaveField,
    a_eps: &AEps,
    potential: impl Fn(f64) -> f64,
    alpha_gauge: impl Fn(f64) -> f64,
    opts: &GseOptions,
) -> Result<ComplexGrid> {
    let g = &field.psi;
    let gamma = field.gamma;
    let tc = Complex64::new(0.0, 2.0 * gamma * field.m);
    let ig = Complex64::new(0.0, gamma);
    let form = opts.gradient;
    residual_grid(
        g,
        |k| {
            let half = a_eps.at(g.t(k))? / 2.0;
            Ok(Terms {
                t: tc,
                d: tc * half,
                n: Some(-(tc * (ig + half))),
            })
        },
        |s| match form {
            GradientForm::Homogeneous => s.dx * s.dx / s.psi,
            GradientForm::InverseSquare => s.dx * s.dx / (s.psi * s.psi),
        },
        |x| potential(x) + alpha_gauge(x),
        Some(opts.node_threshold),
    )
}

/// Residual of `iħ ψ_t + (ħ²/2m) ψ_xx - U ψ`.
pub fn classical_schrodinger_residual(
    field: &WaveField,
    potential: impl Fn(f64) -> f64,
) -> Result<ComplexGrid> {
    let h = field.hbar;
    let d = Complex64::new(h * (h / (2.0 * field.m)), 0.0);
    residual_grid(
        &field.psi,
        |_| {
            Ok(Terms {
                t: Complex64::new(0.0, h),
                d,
                n: None,
            })
        },
        |_| Complex64::new(0.0, 0.0),
        potential,
        None,
    )
}

/// Residual of `iα ψ_t + (α Re α / 2m) ψ_xx - U ψ + i(α Im α / 2m)(ψ_x)² ψ`.
pub fn nngse_residual(
    field: &WaveField,
    potential: impl Fn(f64) -> f64,
    alpha_c: Complex64,
) -> Result<ComplexGrid> {
    let two_m = 2.0 * field.m;
    let i = Complex64::i();
    residual_grid(
        &field.psi,
        |_| {
            Ok(Terms {
                t: i * alpha_c,
                d: alpha_c * (alpha_c.re / two_m),
                n: Some(i * alpha_c * (alpha_c.im / two_m)),
            })
        },
        |s| s.dx * s.dx * s.psi,
        potential,
        None,
    )
}

/// Action and wave function along an `x` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSamples {
    pub action: ComplexPath,
    pub psi: ComplexPath,
}

/// `A` by cumulative trapezoid of `m V` with `A(x₀) = 0`, and `ψ = exp(iA / 2mγ)`.
pub fn action_and_wave(v: &ComplexPath, m: f64, gamma: f64) -> Result<WaveSamples> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(param(
            "gamma",
            "normalization constant must be finite and nonzero",
        ));
    }
    if !(m > 0.0) {
        return Err(param("m", "mass must be positive"));
    }
    let vals = v.values();
    let half = 0.5 * v.dt() * m;
    let mut a = Vec::with_capacity(vals.len());
    a.push(Complex64::new(0.0, 0.0));
    for i in 1..vals.len() {
        let prev = a[i - 1];
        a.push(prev + (vals[i - 1] + vals[i]) * half);
    }
    let scale = Complex64::new(0.0, 1.0 / (2.0 * m * gamma));
    let psi = a.iter().map(|z| (scale * z).exp()).collect();
    Ok(WaveSamples {
        action: ComplexPath::new(v.t0(), v.dt(), a)?,
        psi: ComplexPath::new(v.t0(), v.dt(), psi)?,
    })
}

/// `V = -2iγ (∂ψ/∂x) / ψ` by central differences on the interior nodes.
pub fn log_derivative_velocity(psi: &ComplexPath, gamma: f64) -> Result<ComplexPath> {
    if psi.len() < 3 {
        return Err(Error::Grid("need at least three samples".into()));
    }
    let v = psi.values();
    let h = psi.dt();
    let c = Complex64::new(0.0, -2.0 * gamma);
    let out = (1..v.len() - 1)
        .map(|i| {
            if v[i].norm() < NODE_THRESHOLD {
                return Err(Error::Node {
                    x: psi.time(i),
                    t: f64::NAN,
                    modulus: v[i].norm(),
                });
            }
            Ok(c * ((v[i + 1] - v[i - 1]) / (2.0 * h)) / v[i])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Path::derived(psi.time(1), h, out))
}

fn lerp(v: &[Complex64], pos: f64) -> Complex64 {
    let lo = pos.floor();
    let i = lo as usize;
    let frac = pos - lo;
    if frac == 0.0 || i + 1 >= v.len() {
        v[i.min(v.len() - 1)]
    } else {
        v[i] * (1.0 - frac) + v[i + 1] * frac
    }
}

/// Solves `a Θ + b Θ' + c Θ'' = 0` with coefficients sampled on a uniform
/// grid of step `dx`, from `Θ(x₀) = theta0`, `Θ'(x₀) = dtheta0`.
///
/// RK4 runs with step `2 dx` so every stage lands on a grid node; odd nodes
/// are filled by cubic Hermite interpolation.
pub fn solve_linear_second_order(
    a: &[Complex64],
    b: &[Complex64],
    c: &[Complex64],
    dx: f64,
    theta0: Complex64,
    dtheta0: Complex64,
) -> Result<Vec<Complex64>> {
    let n = a.len();
    if b.len() != n || c.len() != n || n < 2 {
        return Err(param(
            "coefficients",
            "a, b, c must share a length of at least 2",
        ));
    }
    if let Some(j) = c.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::Singularity(format!(
            "leading coefficient vanishes at node {j}"
        )));
    }
    let rhs = |pos: f64, y: &[Complex64]| -> Vec<Complex64> {
        let p = pos / dx;
        vec![y[1], -(lerp(a, p) * y[0] + lerp(b, p) * y[1]) / lerp(c, p)]
    };
    let mut theta = vec![Complex64::new(0.0, 0.0); n];
    let mut y = vec![theta0, dtheta0];
    theta[0] = theta0;
    let mut j = 0;
    while j + 2 < n {
        let next = rk4_step(&rhs, j as f64 * dx, &y, 2.0 * dx);
        let h = 2.0 * dx;
        theta[j + 1] = (y[0] + next[0]) * 0.5 + (y[1] - next[1]) * (h / 8.0);
        theta[j + 2] = next[0];
        y = next;
        j += 2;
    }
    if j + 1 < n {
        let next = rk4_step(&rhs, j as f64 * dx, &y, dx);
        theta[j + 1] = next[0];
    }
    if theta.iter().any(|z| !z.is_finite_sample()) {
        return Err(Error::Singularity("phase solution overflowed".into()));
    }
    Ok(theta)
}

/// Phase factor `Θ(x)` on time slice `k` removing the gauge function `α(x)`:
/// solves `αψ Θ + 4γ²m ψ_x Θ' + 2γ²m ψ Θ'' = 0`, `Θ(x₀) = 1`, `Θ'(x₀) = 0`.
pub fn phase_gauge_solve(
    field: &WaveField,
    alpha_gauge: impl Fn(f64) -> f64,
    k: usize,
) -> Result<ComplexPath> {
    let g = &field.psi;
    if k >= g.nt {
        return Err(param("t_slice", format!("slice {k} outside 0..{}", g.nt)));
    }
    let psi = g.slice(k);
    let v = psi.values();
    let n = v.len();
    if let Some(j) = v.iter().position(|z| z.norm() < NODE_THRESHOLD) {
        return Err(Error::Singularity(format!(
            "psi vanishes at x = {}",
            g.x(j)
        )));
    }
    let dx = g.dx;
    let psi_x: Vec<Complex64> = (0..n)
        .map(|j| {
            if j == 0 {
                (v[1] * 4.0 - v[0] * 3.0 - v[2]) / (2.0 * dx)
            } else if j == n - 1 {
                (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) / (2.0 * dx)
            } else {
                (v[j + 1] - v[j - 1]) / (2.0 * dx)
            }
        })
        .collect();
    let g2m = field.gamma * field.gamma * field.m;
    let a: Vec<Complex64> = (0..n).map(|j| v[j] * alpha_gauge(g.x(j))).collect();
    let b: Vec<Complex64> = psi_x.iter().map(|z| z * (4.0 * g2m)).collect();
    let c: Vec<Complex64> = v.iter().map(|z| z * (2.0 * g2m)).collect();
    let one = Complex64::new(1.0, 0.0);
    let theta = solve_linear_second_order(&a, &b, &c, dx, one, Complex64::new(0.0, 0.0))?;
    ComplexPath::new(g.x0, dx, theta)
}

/// `exp(i(kx - ωt))` on the given axes.
pub fn plane_wave(
    k: f64,
    omega: f64,
    x_axis: (f64, f64, usize),
    t_axis: (f64, f64, usize),
) -> Result<ComplexGrid> {
    ComplexGrid::from_fn(x_axis, t_axis, |x, t| {
        Complex64::new(0.0, k * x - omega * t).exp()
    })
}

/// Free Gaussian packet of initial width `sigma` centred at `x0` with wave
/// number `k`, an exact solution of `iħψ_t = -(ħ²/2m)ψ_xx`.
pub fn gaussian_packet(
    hbar: f64,
    m: f64,
    sigma: f64,
    x0: f64,
    k: f64,
    x_axis: (f64, f64, usize),
    t_axis: (f64, f64, usize),
) -> Result<ComplexGrid> {
    if !(sigma > 0.0) {
        return Err(param("sigma", "width must be positive"));
    }
    let i = Complex64::i();
    ComplexGrid::from_fn(x_axis, t_axis, |x, t| {
        let a = Complex64::new(sigma * sigma, hbar * t / (2.0 * m));
        let xs = x - x0 - hbar * k * t / m;
        let envelope = a.powf(-0.5) * (-(xs * xs) / (a * 4.0)).exp();
        envelope * (i * (k * x - hbar * k * k * t / (2.0 * m))).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn axes(n: usize, span: f64, nt: usize, tspan: f64) -> ((f64, f64, usize), (f64, f64, usize)) {
        (
            (-span / 2.0, span / (n - 1) as f64, n),
            (0.0, tspan / (nt - 1) as f64, nt),
        )
    }

    #[test]
    fn constant_psi_has_zero_residual() {
        let (xa, ta) = axes(9, 1.0, 7, 1.0);
        let g = ComplexGrid::from_fn(xa, ta, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        let f = WaveField::with_schrodinger_gamma(g, 1.0, 1.0).unwrap();
        let r = gse_residual(
            &f,
            &AEps::schrodinger(f.gamma),
            |_| 0.0,
            |_| 0.0,
            &GseOptions::default(),
        )
        .unwrap();
        assert_eq!(r.max_norm(), 0.0);
        assert_eq!(
            classical_schrodinger_residual(&f, |_| 0.0)
                .unwrap()
                .max_norm(),
            0.0
        );
        let r = nngse_residual(&f, |x| 1.0 + x * x, Complex64::new(1.0, 0.3)).unwrap();
        for (x, _, z) in r.rows() {
            assert_abs_diff_eq!(z.re, -(1.0 + x * x), epsilon = 1e-14);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn plane_wave_converges_at_second_order() {
        let (hbar, m, k) = (1.0, 1.0, 2.0);
        let omega = hbar * k * k / (2.0 * m);
        let err = |n: usize| {
            let (xa, ta) = axes(n, 2.0, n, 1.0);
            let g = plane_wave(k, omega, xa, ta).unwrap();
            let f = WaveField::with_schrodinger_gamma(g, m, hbar).unwrap();
            gse_residual(
                &f,
                &AEps::schrodinger(f.gamma),
                |_| 0.0,
                |_| 0.0,
                &GseOptions::default(),
            )
            .unwrap()
            .max_norm()
        };
        let (e1, e2) = (err(41), err(81));
        assert!(e1 < 0.05);
        assert!((3.0..5.0).contains(&(e1 / e2)), "{e1} {e2}");
    }

    #[test]
    fn reduction_is_bit_exact() {
        let (xa, ta) = axes(21, 2.0, 11, 0.5);
        let g = ComplexGrid::from_fn(xa, ta, |x, t| {
            Complex64::new(1.5 + (3.0 * x).sin() * t, (x * t).cos() - 0.3 * x)
        })
        .unwrap();
        for (hbar, m) in [(1.0, 1.0), (2.0, 2.0), (0.5, 0.25)] {
            let f = WaveField::with_schrodinger_gamma(g.clone(), m, hbar).unwrap();
            let u = |x: f64| 0.5 * x * x - 0.1;
            for form in [GradientForm::Homogeneous, GradientForm::InverseSquare] {
                let opts = GseOptions {
                    gradient: form,
                    ..GseOptions::default()
                };
                let a = gse_residual(&f, &AEps::schrodinger(f.gamma), u, |_| 0.0, &opts).unwrap();
                let b = classical_schrodinger_residual(&f, u).unwrap();
                assert_eq!(a, b);
            }
            let c = nngse_residual(&f, u, Complex64::new(hbar, 0.0)).unwrap();
            assert_eq!(c, classical_schrodinger_residual(&f, u).unwrap());
        }
    }

    #[test]
    fn nodes_are_reported() {
        let (xa, ta) = axes(9, 2.0, 5, 1.0);
        let g = ComplexGrid::from_fn(xa, ta, |x, _| Complex64::new(x, 0.0)).unwrap();
        let f = WaveField::new(g, 0.5, 1.0, 1.0).unwrap();
        let e = gse_residual(
            &f,
            &AEps::schrodinger(0.5),
            |_| 0.0,
            |_| 0.0,
            &GseOptions::default(),
        );
        assert!(matches!(e, Err(Error::Node { x, .. }) if x.abs() < 1e-12));
    }

    #[test]
    fn gaussian_packet_contracts() {
        let sup = |n: usize, nt: usize| {
            let g = gaussian_packet(
                1.0,
                1.0,
                1.0,
                0.0,
                1.0,
                (-8.0, 16.0 / (n - 1) as f64, n),
                (0.0, 1.0 / (nt - 1) as f64, nt),
            )
            .unwrap();
            let f = WaveField::with_schrodinger_gamma(g, 1.0, 1.0).unwrap();
            classical_schrodinger_residual(&f, |_| 0.0)
                .unwrap()
                .max_norm()
        };
        let (a, b) = (sup(161, 21), sup(321, 41));
        assert!((3.0..=5.0).contains(&(a / b)), "{a} {b}");
    }

    #[test]
    fn plane_wave_nngse_nonlinear_residual_is_stable() {
        let (hbar, m, k) = (1.0, 1.0, 1.0);
        let res = |n: usize| {
            let (xa, ta) = axes(n, 2.0, n, 1.0);
            let g = plane_wave(k, hbar * k * k / (2.0 * m), xa, ta).unwrap();
            let f = WaveField::with_schrodinger_gamma(g, m, hbar).unwrap();
            nngse_residual(&f, |_| 0.0, Complex64::new(1.0, 0.2))
                .unwrap()
                .max_norm()
        };
        let (a, b) = (res(41), res(81));
        assert!(a > 1e-3);
        assert!((a - b).abs() / b < 0.05, "{a} {b}");
    }

    #[test]
    fn action_round_trip() {
        let n = 201;
        let dx = 1.0 / (n - 1) as f64;
        let v0 = ComplexPath::from_fn(0.0, dx, n, |_| Complex64::new(1.5, 0.0)).unwrap();
        let w = action_and_wave(&v0, 2.0, 0.25).unwrap();
        assert_eq!(w.action.values()[0], Complex64::new(0.0, 0.0));
        for (x, a) in w.action.times().zip(w.action.values()) {
            assert_abs_diff_eq!(a.re, 3.0 * x, epsilon = 1e-12);
        }
        let v = ComplexPath::from_fn(0.0, dx, n, |x| Complex64::new(x.sin(), -0.3 * x)).unwrap();
        let w = action_and_wave(&v, 1.0, 0.5).unwrap();
        let back = log_derivative_velocity(&w.psi, 0.5).unwrap();
        for (i, z) in back.values().iter().enumerate() {
            assert!((z - v.values()[i + 1]).norm() < 1e-4);
        }
        assert!(action_and_wave(&v, 1.0, 0.0).is_err());
    }

    #[test]
    fn constant_coefficient_phase_equation() {
        // 2Θ'' + 3Θ' + Θ = 0: roots -1/2 and -1
        let n = 401;
        let dx = 2.0 / (n - 1) as f64;
        let one = Complex64::new(1.0, 0.0);
        let th = solve_linear_second_order(
            &vec![one; n],
            &vec![one * 3.0; n],
            &vec![one * 2.0; n],
            dx,
            one,
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        for (j, z) in th.iter().enumerate() {
            let x = j as f64 * dx;
            let exact = 2.0 * (-0.5 * x).exp() - (-x).exp();
            assert!((z.re - exact).abs() < 1e-6, "{j}: {} vs {exact}", z.re);
        }
        let i = Complex64::i();
        // complex roots: Θ'' + Θ = 0 → cos x
        let th = solve_linear_second_order(
            &vec![one; 100],
            &vec![Complex64::new(0.0, 0.0); 100],
            &vec![one; 100],
            0.05,
            one,
            0.0 * i,
        )
        .unwrap();
        for (j, z) in th.iter().enumerate() {
            assert!((z - Complex64::new((j as f64 * 0.05).cos(), 0.0)).norm() < 1e-5);
        }
        assert!(solve_linear_second_order(
            &[one; 3],
            &[one; 3],
            &[one, 0.0 * one, one],
            0.1,
            one,
            one
        )
        .is_err());
    }

    #[test]
    fn gauge_removal() {
        let (hbar, m, omega) = (1.0, 1.0, 0.7);
        let gamma = hbar / (2.0 * m);
        let phi = |x: f64| 1.0 + 0.3 * (2.0 * x).cos();
        let phi_xx = |x: f64| -1.2 * (2.0 * x).cos();
        let u = |x: f64| 0.5 * x * x;
        let alpha =
            |x: f64| 2.0 * gamma * m * omega + 2.0 * gamma * gamma * m * phi_xx(x) / phi(x) - u(x);
        let (xa, ta) = ((0.0, 0.01, 201), (0.0, 0.01, 21));
        let g = ComplexGrid::from_fn(xa, ta, |x, t| {
            Complex64::new(0.0, -omega * t).exp() * phi(x)
        })
        .unwrap();
        let f = WaveField::new(g, gamma, m, hbar).unwrap();
        let a = AEps::schrodinger(gamma);
        let opts = GseOptions::default();
        // ψ solves the equation with α, not without it
        let with = gse_residual(&f, &a, u, alpha, &opts).unwrap().max_norm();
        let before = gse_residual(&f, &a, u, |_| 0.0, &opts).unwrap().max_norm();
        assert!(with < 1e-3 && before > 0.1, "{with} {before}");
        let theta = phase_gauge_solve(&f, alpha, 0).unwrap();
        let gauged = f.with_phase(&theta).unwrap();
        let after = gse_residual(&gauged, &a, u, |_| 0.0, &opts)
            .unwrap()
            .max_norm();
        assert!(after < 1e-2 * before, "{after} vs {before}");
        let flat = phase_gauge_solve(&f, |_| 0.0, 3).unwrap();
        assert!(flat.values().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }
}
