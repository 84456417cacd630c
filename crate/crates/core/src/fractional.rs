//! One-sided local fractional derivatives estimated from samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::path::SampledPath;
use crate::scale_ops::Side;

/// What the quotient tail says about the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum FracOutcome {
    Limit(f64),
    Divergent,
    Oscillatory,
}

impl FracOutcome {
    pub fn limit(self) -> Option<f64> {
        match self {
            FracOutcome::Limit(v) => Some(v),
            _ => None,
        }
    }

    pub fn flag(self) -> Flag {
        match self {
            FracOutcome::Limit(_) => Flag::Limit,
            FracOutcome::Divergent => Flag::Divergent,
            FracOutcome::Oscillatory => Flag::Oscillatory,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Limit,
    Divergent,
    Oscillatory,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Limit => "limit",
            Flag::Divergent => "divergent",
            Flag::Oscillatory => "oscillatory",
        }
    }
}

impl std::str::FromStr for Flag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limit" => Ok(Flag::Limit),
            "divergent" => Ok(Flag::Divergent),
            "oscillatory" => Ok(Flag::Oscillatory),
            other => Err(Error::Format(format!("unknown flag {other:?}"))),
        }
    }
}

/// How the two sides are merged into one complex number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combination {
    /// `½(d₊ + d₋) + (i/2)(d₊ - d₋)`
    #[default]
    Antisymmetric,
    /// `½(d₊ + d₋) + (i/2)(d₊ + d₋)`
    Literal,
}

impl Combination {
    pub fn apply(self, plus: f64, minus: f64) -> Complex64 {
        let re = 0.5 * (plus + minus);
        match self {
            Combination::Antisymmetric => Complex64::new(re, 0.5 * (plus - minus)),
            Combination::Literal => Complex64::new(re, re),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOptions {
    /// Maximum number of dyadic levels `h = dt 2^j`, finest last.
    pub levels: usize,
    /// Number of Richardson eliminations, removing `h^(r - α)` for `r = 1..=order`.
    pub richardson_order: usize,
    /// Relative spread allowed over the last three extrapolated values.
    pub cauchy_tol: f64,
    /// Growth over the last three raw levels that flags divergence.
    pub divergence_factor: f64,
    pub combination: Combination,
}

impl Default for FracOptions {
    fn default() -> Self {
        Self {
            levels: 12,
            richardson_order: 2,
            cauchy_tol: 1e-3,
            divergence_factor: 10.0,
            combination: Combination::Antisymmetric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracEstimate {
    pub t0: f64,
    pub alpha: f64,
    pub side: Side,
    /// Strictly decreasing steps, ending at the grid step.
    pub h: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Tail of the Richardson table, aligned with the finest entries of `h`.
    pub extrapolated: Vec<f64>,
    pub outcome: FracOutcome,
}

impl FracEstimate {
    /// Quotient at the smallest step.
    pub fn finest(&self) -> f64 {
        *self.quotients.last().expect("at least one level")
    }
}

fn grid_index(f: &SampledPath, t0: f64) -> Result<usize> {
    let x = (t0 - f.t0()) / f.dt();
    let i = x.round();
    if (x - i).abs() > 1e-6 || i < 0.0 || i as usize >= f.len() {
        return Err(param("t0", format!("{t0} is not a grid point of the path")));
    }
    let i = i as usize;
    if i == 0 || i == f.len() - 1 {
        return Err(param("t0", format!("{t0} lies on the boundary")));
    }
    Ok(i)
}

pub fn local_frac_deriv(
    f: &SampledPath,
    t0: f64,
    alpha: f64,
    side: Side,
    opts: &FracOptions,
) -> Result<FracEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param(
            "alpha",
            format!("exponent must lie in (0, 1), got {alpha}"),
        ));
    }
    let i0 = grid_index(f, t0)?;
    let room = match side {
        Side::Plus => f.len() - 1 - i0,
        Side::Minus => i0,
    };
    let max_level = (usize::BITS - 1 - room.leading_zeros()) as usize;
    let levels = (max_level + 1).min(opts.levels);
    let needed = opts.richardson_order + 3;
    if levels < needed {
        return Err(Error::Grid(format!(
            "only {levels} dyadic levels fit beside t0 = {t0}, need {needed}"
        )));
    }
    let v = f.values();
    let dt = f.dt();
    let mut h = Vec::with_capacity(levels);
    let mut q = Vec::with_capacity(levels);
    for j in (0..levels).rev() {
        let k = 1usize << j;
        let step = k as f64 * dt;
        let diff = match side {
            Side::Plus => v[i0 + k] - v[i0],
            Side::Minus => v[i0] - v[i0 - k],
        };
        h.push(step);
        q.push(diff / step.powf(alpha));
    }
    let mut table = q.clone();
    for r in 1..=opts.richardson_order {
        let w = 2f64.powf(r as f64 - alpha);
        table = table
            .windows(2)
            .map(|p| (w * p[1] - p[0]) / (w - 1.0))
            .collect();
    }
    let outcome = classify(&q, &table, opts);
    Ok(FracEstimate {
        t0,
        alpha,
        side,
        h,
        quotients: q,
        extrapolated: table,
        outcome,
    })
}

fn classify(raw: &[f64], ext: &[f64], opts: &FracOptions) -> FracOutcome {
    let tail = &ext[ext.len() - 3..];
    let last = tail[2];
    let scale = last.abs().max(1.0);
    let spread = tail.iter().map(|v| (v - last).abs()).fold(0.0, f64::max);
    if spread <= opts.cauchy_tol * scale {
        return FracOutcome::Limit(last);
    }
    let r = &raw[raw.len() - 3..];
    let growing = r[0].abs() < r[1].abs() && r[1].abs() < r[2].abs();
    if growing && r[2].abs() >= opts.divergence_factor * r[0].abs() {
        FracOutcome::Divergent
    } else {
        FracOutcome::Oscillatory
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexFrac {
    pub t0: f64,
    pub right: FracEstimate,
    pub left: FracEstimate,
    /// Present when both sides have a limit.
    pub value: Option<Complex64>,
    pub outcome: Flag,
}

impl ComplexFrac {
    /// The combination of the two finest raw quotients.
    pub fn finest(&self, combination: Combination) -> Complex64 {
        combination.apply(self.right.finest(), self.left.finest())
    }
}

pub fn complex_local_frac(
    f: &SampledPath,
    t0: f64,
    alpha: f64,
    opts: &FracOptions,
) -> Result<ComplexFrac> {
    let right = local_frac_deriv(f, t0, alpha, Side::Plus, opts)?;
    let left = local_frac_deriv(f, t0, alpha, Side::Minus, opts)?;
    let (value, outcome) = match (right.outcome, left.outcome) {
        (FracOutcome::Limit(p), FracOutcome::Limit(m)) => {
            (Some(opts.combination.apply(p, m)), Flag::Limit)
        }
        (FracOutcome::Divergent, _) | (_, FracOutcome::Divergent) => (None, Flag::Divergent),
        _ => (None, Flag::Oscillatory),
    };
    Ok(ComplexFrac {
        t0,
        right,
        left,
        value,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub value: Option<Complex64>,
    pub flag: Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub alpha: f64,
    pub rows: Vec<ScanRow>,
    pub zero_fraction: f64,
    pub nonzero_fraction: f64,
    pub divergent_fraction: f64,
    pub oscillatory_fraction: f64,
}

/// Values with modulus at most this are counted as zero in scan summaries.
pub const ZERO_TOL: f64 = 1e-3;

pub fn spectrum_scan(
    f: &SampledPath,
    alpha: f64,
    sample_points: &[f64],
    opts: &FracOptions,
) -> Result<SpectrumScan> {
    let rows = sample_points
        .iter()
        .map(|&t| {
            let c = complex_local_frac(f, t, alpha, opts)?;
            Ok(ScanRow {
                t,
                value: c.value,
                flag: c.outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumScan::from_rows(alpha, rows))
}

impl SpectrumScan {
    /// Summarizes scan rows computed elsewhere, e.g. in parallel chunks.
    pub fn from_rows(alpha: f64, rows: Vec<ScanRow>) -> Self {
        let n = rows.len().max(1) as f64;
        let count = |p: &dyn Fn(&ScanRow) -> bool| rows.iter().filter(|r| p(r)).count() as f64 / n;
        SpectrumScan {
            alpha,
            zero_fraction: count(&|r| r.value.is_some_and(|v| v.norm() <= ZERO_TOL)),
            nonzero_fraction: count(&|r| r.value.is_some_and(|v| v.norm() > ZERO_TOL)),
            divergent_fraction: count(&|r| r.flag == Flag::Divergent),
            oscillatory_fraction: count(&|r| r.flag == Flag::Oscillatory),
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_takagi, takagi_terms_for};
    use crate::path::Grid;
    use approx::assert_abs_diff_eq;

    fn unit(n: usize, f: impl Fn(f64) -> f64) -> SampledPath {
        SampledPath::from_fn(0.0, 1.0 / n as f64, n + 1, f).unwrap()
    }

    const N: usize = 1 << 14;

    #[test]
    fn power_law_right_derivative_is_one() {
        for alpha in [0.3, 0.5, 0.8] {
            let f = unit(N, |t| if t >= 0.5 { (t - 0.5).powf(alpha) } else { 0.0 });
            let e = local_frac_deriv(&f, 0.5, alpha, Side::Plus, &FracOptions::default()).unwrap();
            let v = e.outcome.limit().expect("limit");
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-3);
            assert!(e.h.windows(2).all(|w| w[0] > w[1]));
            assert_eq!(*e.h.last().unwrap(), f.dt());
            // the left side sees a constant
            let l = local_frac_deriv(&f, 0.5, alpha, Side::Minus, &FracOptions::default()).unwrap();
            assert_eq!(l.outcome, FracOutcome::Limit(0.0));
        }
    }

    #[test]
    fn smooth_functions_give_zero() {
        for (name, f) in [
            ("line", unit(N, |t| t)),
            ("sine", unit(N, |t| (3.0 * t).sin())),
            ("const", unit(N, |_| 2.0)),
        ] {
            for side in [Side::Plus, Side::Minus] {
                let e = local_frac_deriv(&f, 0.375, 0.5, side, &FracOptions::default()).unwrap();
                let v = e
                    .outcome
                    .limit()
                    .unwrap_or_else(|| panic!("{name}: {:?}", e.outcome));
                assert!(v.abs() < 1e-3, "{name}: {v}");
            }
        }
    }

    #[test]
    fn complex_combinations() {
        let f = unit(N, |t| 0.25 + t * 0.0);
        let c = complex_local_frac(&f, 0.5, 0.5, &FracOptions::default()).unwrap();
        assert_eq!(c.value, Some(Complex64::new(0.0, 0.0)));
        assert_eq!(
            Combination::Antisymmetric.apply(0.7, 0.7),
            Complex64::new(0.7, 0.0)
        );
        assert_eq!(
            Combination::Literal.apply(0.7, 0.7),
            Complex64::new(0.7, 0.7)
        );

        let abs = unit(N, |t| (t - 0.5).abs());
        let c = complex_local_frac(&abs, 0.5, 0.99, &FracOptions::default()).unwrap();
        let z = c.finest(Combination::Antisymmetric);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-12);
        assert!((z.im - 1.0).abs() < 0.15, "{z}");
    }

    #[test]
    fn errors_and_flags() {
        let f = unit(64, |t| t);
        let o = FracOptions::default();
        assert!(local_frac_deriv(&f, 0.0, 0.5, Side::Plus, &o).is_err());
        assert!(local_frac_deriv(&f, 1.0, 0.5, Side::Minus, &o).is_err());
        assert!(local_frac_deriv(&f, 0.5, 1.5, Side::Plus, &o).is_err());
        assert!(local_frac_deriv(&f, 0.51, 0.5, Side::Plus, &o).is_err());
        // a steep cusp grows much faster than h^α can absorb
        let g = unit(N, |t| (t - 0.5).abs().powf(0.05));
        let opts = FracOptions {
            richardson_order: 0,
            ..o
        };
        let e = local_frac_deriv(&g, 0.5 + 1.0 / N as f64, 0.95, Side::Minus, &opts).unwrap();
        assert!(matches!(
            e.outcome,
            FracOutcome::Divergent | FracOutcome::Oscillatory
        ));
    }

    #[test]
    fn localised_power_law_scan() {
        let f = unit(N, |t| if t >= 0.5 { (t - 0.5).sqrt() } else { 0.0 });
        let dt = f.dt();
        // raw quotients at the finest level fade with the distance to the kink
        let near =
            local_frac_deriv(&f, 0.5 + dt, 0.5, Side::Plus, &FracOptions::default()).unwrap();
        let far = local_frac_deriv(&f, 0.75, 0.5, Side::Plus, &FracOptions::default()).unwrap();
        assert!(near.finest().abs() > 0.2);
        assert!(far.finest().abs() < 0.02);
        let pts: Vec<f64> = (1..8).map(|j| 0.25 + j as f64 * 0.0625).collect();
        let scan = spectrum_scan(&f, 0.5, &pts, &FracOptions::default()).unwrap();
        assert_eq!(scan.rows.len(), pts.len());
        let nonzero: Vec<f64> = scan
            .rows
            .iter()
            .filter(|r| r.value.is_some_and(|v| v.norm() > ZERO_TOL))
            .map(|r| r.t)
            .collect();
        assert!(
            nonzero.iter().all(|t| (*t - 0.5).abs() < 0.07),
            "{nonzero:?}"
        );
    }

    #[test]
    fn takagi_has_no_constant_sign_run() {
        let alpha = 0.5;
        let f = gen_takagi(
            alpha,
            takagi_terms_for(alpha, 1.0 / N as f64),
            Grid::unit(N),
        )
        .unwrap();
        let pts: Vec<f64> = (1..64).map(|j| j as f64 / 64.0 + 3.0 / N as f64).collect();
        let scan = spectrum_scan(&f, alpha, &pts, &FracOptions::default()).unwrap();
        let mut run = 0;
        let mut last = 0.0f64;
        for r in &scan.rows {
            match r.value.filter(|v| v.norm() > ZERO_TOL) {
                Some(v) if v.re.signum() == last => run += 1,
                Some(v) => {
                    last = v.re.signum();
                    run = 1;
                }
                None => run = 0,
            }
            assert!(run < 5);
        }
        let total = scan.zero_fraction
            + scan.nonzero_fraction
            + scan.divergent_fraction
            + scan.oscillatory_fraction;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
}
