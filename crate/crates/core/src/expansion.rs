//! Expansion of the scale derivative of `f(X(t), t)` in powers of `eps`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Error, Result};
use crate::path::{ComplexPath, Path, SampledPath};
use crate::scale_ops::{sided_quotients, ScaleDerivative};

type Rule = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A real field `f(x, t)` with explicit rules for `∂f/∂t` and `∂^j f/∂x^j`,
/// `j = 1..=order`.
pub struct SmoothField {
    value: Rule,
    d_t: Rule,
    d_x: Vec<Rule>,
}

impl std::fmt::Debug for SmoothField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothField")
            .field("order", &self.order())
            .finish()
    }
}

/// Region and seed used to spot-check derivative rules.
pub const CHECK_SEED: u64 = 0x17_0f;
const CHECK_POINTS: usize = 16;
const CHECK_TOL: f64 = 1e-5;

impl SmoothField {
    /// Builds a field and checks every rule against a centred difference of
    /// the rule one order below at seeded random points of `[-1, 1] × [0, 1]`.
    pub fn new(value: Rule, d_t: Rule, d_x: Vec<Rule>) -> Result<Self> {
        Self::with_region(value, d_t, d_x, (-1.0, 1.0), (0.0, 1.0))
    }

    pub fn with_region(
        value: Rule,
        d_t: Rule,
        d_x: Vec<Rule>,
        x_range: (f64, f64),
        t_range: (f64, f64),
    ) -> Result<Self> {
        if d_x.is_empty() {
            return Err(param(
                "order",
                "a field needs at least its first x-derivative",
            ));
        }
        let field = Self { value, d_t, d_x };
        field.validate(x_range, t_range)?;
        Ok(field)
    }

    fn validate(&self, x_range: (f64, f64), t_range: (f64, f64)) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
        for _ in 0..CHECK_POINTS {
            let x = rng.gen_range(x_range.0..=x_range.1);
            let t = rng.gen_range(t_range.0..=t_range.1);
            let hx = 1e-4 * x.abs().max(1.0);
            let ht = 1e-4 * t.abs().max(1.0);
            let fd_t = ((self.value)(x, t + ht) - (self.value)(x, t - ht)) / (2.0 * ht);
            check_rule("d_t", fd_t, (self.d_t)(x, t), x, t)?;
            for j in 0..self.d_x.len() {
                let below = |y: f64| {
                    if j == 0 {
                        (self.value)(y, t)
                    } else {
                        (self.d_x[j - 1])(y, t)
                    }
                };
                let fd = (below(x + hx) - below(x - hx)) / (2.0 * hx);
                check_rule("d_x", fd, (self.d_x[j])(x, t), x, t)?;
            }
        }
        Ok(())
    }

    /// `Σ c_m x^m`, time independent, with rules up to `order`.
    pub fn polynomial(coeffs: Vec<f64>, order: usize) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(param("coeffs", "empty polynomial"));
        }
        let eval = |c: &[f64], j: usize, x: f64| -> f64 {
            // j-th derivative by Horner on the differentiated coefficients
            let mut acc = 0.0;
            for m in (j..c.len()).rev() {
                let falling: f64 = (m - j + 1..=m).map(|v| v as f64).product();
                acc = acc * x + c[m] * falling;
            }
            acc
        };
        let c0 = coeffs.clone();
        let value: Rule = Box::new(move |x, _| eval(&c0, 0, x));
        let d_x = (1..=order)
            .map(|j| {
                let c = coeffs.clone();
                Box::new(move |x, _| eval(&c, j, x)) as Rule
            })
            .collect();
        Self::new(value, Box::new(|_, _| 0.0), d_x)
    }

    /// `f(x, t) = t`.
    pub fn time(order: usize) -> Result<Self> {
        let d_x = (0..order).map(|_| Box::new(|_, _| 0.0) as Rule).collect();
        Self::new(Box::new(|_, t| t), Box::new(|_, _| 1.0), d_x)
    }

    pub fn order(&self) -> usize {
        self.d_x.len()
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        (self.value)(x, t)
    }

    pub fn d_t(&self, x: f64, t: f64) -> f64 {
        (self.d_t)(x, t)
    }

    /// `∂^j f / ∂x^j` for `1 <= j <= order`.
    pub fn d_x(&self, j: usize, x: f64, t: f64) -> f64 {
        (self.d_x[j - 1])(x, t)
    }
}

fn check_rule(name: &str, fd: f64, rule: f64, x: f64, t: f64) -> Result<()> {
    if (fd - rule).abs() > CHECK_TOL * rule.abs().max(1.0) {
        return Err(param(
            "field",
            format!("{name} rule gives {rule} at ({x}, {t}), finite difference gives {fd}"),
        ));
    }
    Ok(())
}

/// `a_{ε,j} = ½[(Δ₊)^j - (-1)^j (Δ₋)^j] - (i/2)[(Δ₊)^j + (-1)^j (Δ₋)^j]`
/// on the centred sub-grid of `x`.
pub fn a_coeffs(x: &SampledPath, eps: f64, j: usize) -> Result<ComplexPath> {
    if j == 0 {
        return Err(param("j", "order must be at least 1"));
    }
    let (p, m) = sided_quotients(x, eps)?;
    let values = p
        .values()
        .iter()
        .zip(m.values())
        .map(|(&a, &b)| a_coeff(a, b, j))
        .collect();
    Ok(Path::derived(p.t0(), p.dt(), values))
}

#[inline]
fn a_coeff(plus: f64, minus: f64, j: usize) -> Complex64 {
    let pj = plus.powi(j as i32);
    let mj = if j % 2 == 0 { 1.0 } else { -1.0 } * minus.powi(j as i32);
    Complex64::new(0.5 * (pj - mj), -0.5 * (pj + mj))
}

/// `∂f/∂t + Σ_{j=1}^n (1/j!) ∂^j f/∂x^j ε^{j-1} a_{ε,j}` along `(X(t), t)`.
pub fn ito_expand(field: &SmoothField, x: &SampledPath, eps: f64, n: usize) -> Result<ComplexPath> {
    if n == 0 || n > field.order() {
        return Err(param(
            "n",
            format!("order {n} must lie in 1..={}", field.order()),
        ));
    }
    let (p, m) = sided_quotients(x, eps)?;
    let k = x.steps(eps)?;
    let xv = &x.values()[k..x.len() - k];
    let values = p
        .values()
        .iter()
        .zip(m.values())
        .zip(xv)
        .enumerate()
        .map(|(i, ((&a, &b), &xi))| {
            let t = p.time(i);
            let mut acc = Complex64::new(field.d_t(xi, t), 0.0);
            let mut fact = 1.0;
            let mut scale = 1.0;
            for j in 1..=n {
                fact *= j as f64;
                acc += a_coeff(a, b, j) * (field.d_x(j, xi, t) * scale / fact);
                scale *= eps;
            }
            acc
        })
        .collect();
    Ok(Path::derived(p.t0(), p.dt(), values))
}

/// Scale derivative of the composed path `t ↦ f(X(t), t)`.
pub fn direct_scale_derivative(
    field: &SmoothField,
    x: &SampledPath,
    eps: f64,
) -> Result<ComplexPath> {
    let composed = x.map_with_time(|t, v| field.value(v, t))?;
    composed.scale_derivative(eps)
}

/// Both sides of the expansion on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoComparison {
    pub direct: ComplexPath,
    pub expansion: ComplexPath,
    pub max_error: f64,
}

impl ItoComparison {
    /// `(t, direct, expansion)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, Complex64, Complex64)> + '_ {
        self.direct
            .times()
            .zip(self.direct.values().iter().zip(self.expansion.values()))
            .map(|(t, (&d, &e))| (t, d, e))
    }
}

pub fn ito_compare(
    field: &SmoothField,
    x: &SampledPath,
    eps: f64,
    n: usize,
) -> Result<ItoComparison> {
    let expansion = ito_expand(field, x, eps, n)?;
    let direct = direct_scale_derivative(field, x, eps)?;
    let max_error = direct
        .values()
        .iter()
        .zip(expansion.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ItoComparison {
        direct,
        expansion,
        max_error,
    })
}

/// Sup-norm of `direct - expansion` for a time independent polynomial field,
/// computed in exact rational arithmetic from the sampled values.
///
/// Floating-point rounding is removed entirely, so what remains is the true
/// truncation remainder of the order-`n` expansion on these samples.
pub fn exact_polynomial_remainder(
    coeffs: &[f64],
    x: &SampledPath,
    eps: f64,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(param("n", "order must be at least 1"));
    }
    let k = x.centred_steps(eps)?;
    let to_q = |v: f64| {
        BigRational::from_float(v).ok_or_else(|| Error::Format(format!("{v} is not finite")))
    };
    let c: Vec<BigRational> = coeffs.iter().map(|&v| to_q(v)).collect::<Result<_>>()?;
    let xs: Vec<BigRational> = x.values().iter().map(|&v| to_q(v)).collect::<Result<_>>()?;
    let e = to_q(eps)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let eval = |v: &BigRational| {
        c.iter()
            .rev()
            .fold(BigRational::zero(), |acc, ci| acc * v + ci)
    };
    let g: Vec<BigRational> = xs.iter().map(eval).collect();
    // p^(j)(x) / j! = Σ_m C(m, j) c_m x^(m-j)
    let taylor = |j: usize, v: &BigRational| -> BigRational {
        let mut acc = BigRational::zero();
        for m in (j..c.len()).rev() {
            acc = acc * v + &c[m] * BigRational::from_integer(binomial(m, j));
        }
        acc
    };
    let mut worst = 0.0f64;
    for i in k..xs.len() - k {
        let gp = (&g[i + k] - &g[i]) / &e;
        let gm = (&g[i] - &g[i - k]) / &e;
        let d_re = &half * (&gp + &gm);
        let d_im = -&half * (&gp - &gm);
        let dp = (&xs[i + k] - &xs[i]) / &e;
        let dm = (&xs[i] - &xs[i - k]) / &e;
        let (mut e_re, mut e_im) = (BigRational::zero(), BigRational::zero());
        let mut scale = BigRational::one();
        let (mut pj, mut mj) = (BigRational::one(), BigRational::one());
        for j in 1..=n {
            pj *= &dp;
            mj *= -&dm;
            let w = taylor(j, &xs[i]) * &scale;
            e_re += &w * &half * (&pj - &mj);
            e_im -= &w * &half * (&pj + &mj);
            scale *= &e;
        }
        let r_re = (d_re - e_re).abs().to_f64().unwrap_or(f64::INFINITY);
        let r_im = (d_im - e_im).abs().to_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(r_re.hypot(r_im));
    }
    Ok(worst)
}

fn binomial(m: usize, j: usize) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..j {
        b = b * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    b
}
