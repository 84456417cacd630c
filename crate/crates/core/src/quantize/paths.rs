use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::path::SampledPath;
use crate::regression::fit_line;
use crate::scale_ops::sided_quotients;

/// Outcome of checking `Δ₊X = Δ₋X` and `(Δ₊X)² = hbar/m` on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `max |Δ₊X - Δ₋X|`
    pub max_sided_gap: f64,
    /// `max |(Δ₊X)² - hbar/m|`
    pub max_square_gap: f64,
    pub tol: f64,
    pub verdict: bool,
}

pub fn schrodinger_condition_check(
    x: &SampledPath,
    eps: f64,
    hbar: f64,
    m: f64,
    tol: f64,
) -> Result<ConditionReport> {
    if !(hbar > 0.0 && m > 0.0) {
        return Err(param("hbar", "hbar and m must be positive"));
    }
    let (p, q) = sided_quotients(x, eps)?;
    let ratio = hbar / m;
    let (mut gap, mut sq) = (0.0f64, 0.0f64);
    for (&a, &b) in p.values().iter().zip(q.values()) {
        gap = gap.max((a - b).abs());
        sq = sq.max(a.mul_add(a, -ratio).abs());
    }
    Ok(ConditionReport {
        max_sided_gap: gap,
        max_square_gap: sq,
        tol,
        verdict: gap <= tol && sq <= tol,
    })
}

/// Log-log fit of the mean chord length against the time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergFit {
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub dts: Vec<f64>,
    pub chords: Vec<f64>,
}

/// Mean over `t` of `|(t, X(t)) - (t + Δt, X(t + Δt))|` for each `Δt`, and the
/// slope of its logarithm against `ln Δt`.
pub fn heisenberg_scaling_check(x: &SampledPath, dt_grid: &[f64]) -> Result<HeisenbergFit> {
    if dt_grid.len() < 4 {
        return Err(param(
            "dt_grid",
            format!("need at least 4 steps, got {}", dt_grid.len()),
        ));
    }
    let v = x.values();
    let chords = dt_grid
        .iter()
        .map(|&d| {
            let k = x.steps(d)?;
            if k >= v.len() {
                return Err(param("dt_grid", format!("step {d} exceeds the domain")));
            }
            let n = v.len() - k;
            Ok((0..n).map(|i| d.hypot(v[i + k] - v[i])).sum::<f64>() / n as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = dt_grid.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = chords.iter().map(|c| c.ln()).collect();
    let line = fit_line(&lx, &ly)?;
    Ok(HeisenbergFit {
        exponent: line.slope,
        intercept: line.intercept,
        residual: line.residual,
        dts: dt_grid.to_vec(),
        chords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        gen_principal_schrodinger, gen_takagi, takagi_terms_for, PrincipalPath, Sign,
    };
    use crate::path::Grid;
    use crate::scale_laws::dyadic_widths;

    #[test]
    fn principal_paths_pass() {
        for amplitude in [0.0, 0.4] {
            let p = PrincipalPath {
                hbar_over_m: 1.0,
                c: 0.0,
                sign: Sign::Plus,
                eps: 0.0625,
                amplitude,
            };
            let x = gen_principal_schrodinger(&p, Grid::unit(1024)).unwrap();
            let r = schrodinger_condition_check(&x, 0.0625, 1.0, 1.0, 1e-12).unwrap();
            assert!(r.verdict, "{r:?}");
            if amplitude == 0.0 {
                assert!(r.max_sided_gap < 1e-13 && r.max_square_gap < 1e-13);
            }
        }
    }

    #[test]
    fn takagi_fails() {
        let n = 1 << 10;
        let x = gen_takagi(0.5, takagi_terms_for(0.5, 1.0 / n as f64), Grid::unit(n)).unwrap();
        let r = schrodinger_condition_check(&x, 16.0 / n as f64, 1.0, 1.0, 1e-12).unwrap();
        assert!(!r.verdict);
    }

    #[test]
    fn chord_exponents() {
        let n = 1 << 14;
        let dt = 1.0 / n as f64;
        let grid = dyadic_widths(dt, 4.0 * dt, 1.0 / 32.0);
        let line = SampledPath::from_fn(0.0, dt, n + 1, |t| t).unwrap();
        let fit = heisenberg_scaling_check(&line, &grid).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-9);
        let x = gen_takagi(0.3, takagi_terms_for(0.3, dt), Grid::unit(n)).unwrap();
        let fit = heisenberg_scaling_check(&x, &grid).unwrap();
        assert!((fit.exponent - 0.3).abs() < 0.1, "{}", fit.exponent);
        assert!(heisenberg_scaling_check(&x, &grid[..3]).is_err());
    }
}
