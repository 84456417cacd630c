use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use scalecalc::algebra::{check_bialgebra, check_commuting_diagram, EpsPoly, Word, WordSeries};
use scalecalc::expansion::{a_coeffs, exact_polynomial_remainder, ito_compare, SmoothField};
use scalecalc::fractional::{complex_local_frac, Combination, FracOptions, ScanRow, SpectrumScan};
use scalecalc::quantize::{
    classical_schrodinger_residual, gse_residual, heisenberg_scaling_check, nngse_residual,
    schrodinger_condition_check, AEps, ClassicalEquation, ClassicalLagrangian, GradientForm,
    GseOptions, Potential, QuantizationPipeline, QuantizedLagrangian, WaveField,
};
use scalecalc::scale_laws::{
    box_counting_dimension, default_box_sizes, default_eps_grid, dyadic_widths, graph_length,
    ScaleLawFit,
};
use scalecalc::scale_ops::{default_resolution_steps, minimal_resolution_with};
use scalecalc::{io, quantum_diff, scale_derivative, SampledPath, Side};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::input::load_path;
use crate::output::{check_writable, read_file, Outputs};

/// Requires a nonempty, finite, positive, strictly monotone sweep.
fn check_sweep(field: &str, grid: &[f64]) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::usage(field, "sweep grid is empty"));
    }
    if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(CliError::usage(
            field,
            format!("{v} is not a positive width"),
        ));
    }
    let up = grid.windows(2).all(|w| w[0] < w[1]);
    let down = grid.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(CliError::usage(field, "sweep grid must be strictly sorted"));
    }
    Ok(())
}

fn positive(field: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(field, format!("must be positive, got {v}")))
    }
}

fn complex_arg(field: &str, v: &Option<Vec<f64>>) -> CliResult<Option<Complex64>> {
    match v.as_deref() {
        None => Ok(None),
        Some([re, im]) => Ok(Some(Complex64::new(*re, *im))),
        Some(_) => Err(CliError::usage(field, "expected two numbers `re,im`")),
    }
}

pub fn dispatch(cmd: &Command, out: &mut Outputs) -> CliResult<Value> {
    match cmd {
        Command::Gen(a) => gen(a, out),
        Command::Deriv(a) => deriv(a, out),
        Command::Minres(a) => minres(a, out),
        Command::Scalelaw(a) => scalelaw(a, out),
        Command::Dim(a) => dim(a, out),
        Command::ItoCheck(a) => ito(a, out),
        Command::AlgebraCheck(a) => algebra(a, out),
        Command::Fracscan(a) => fracscan(a, out),
        Command::Quantize(a) => quantize(a, out),
        Command::GseResidual(a) => gse(a, out),
        Command::SchrodCheck(a) => schrod(a, out),
        Command::Heisenberg(a) => heisenberg(a, out),
        Command::Run(_) => Err(CliError::usage("op", "manifests cannot nest `run`")),
    }
}

fn gen(a: &GenArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &Some(a.out.clone()))?;
    let f = a.gen.generate()?;
    out.write("out", &a.out, |w| io::write_sampled_path(w, &f))?;
    let (lo, hi) = f
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    Ok(json!({ "len": f.len(), "t0": f.t0(), "dt": f.dt(), "min": lo, "max": hi }))
}

fn deriv(a: &DerivArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &Some(a.out.clone()))?;
    let f = load_path("input", &a.input, &a.gen)?;
    match a.kind {
        DerivKind::Scale => {
            let d = scale_derivative(&f, a.eps)?;
            out.write("out", &a.out, |w| io::write_complex_path(w, &d))?;
            Ok(json!({ "len": d.len(), "t0": d.t0(), "max_norm": d.max_norm() }))
        }
        DerivKind::Plus | DerivKind::Minus => {
            let side = if a.kind == DerivKind::Plus {
                Side::Plus
            } else {
                Side::Minus
            };
            let d = quantum_diff(&f, a.eps, side)?;
            out.write("out", &a.out, |w| io::write_sampled_path(w, &d))?;
            Ok(json!({ "len": d.len(), "t0": d.t0(), "max_abs": d.max_abs() }))
        }
    }
}

fn minres(a: &MinresArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    let f = load_path("input", &a.input, &a.gen)?;
    let steps = a.max_steps.unwrap_or_else(|| default_resolution_steps(&f));
    let r = minimal_resolution_with(&f, a.h, steps)?;
    if let Some(p) = &a.out {
        out.write_json("out", p, &r)?;
    }
    let finite = r.per_point.iter().filter(|v| v.finite().is_some()).count();
    Ok(json!({
        "h": r.h,
        "global": r.global,
        "vanishes": r.vanishes(),
        "max_steps": r.max_steps,
        "points": r.per_point.len(),
        "finite_points": finite,
    }))
}

fn scalelaw(a: &ScalelawArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out_json", &a.out_json)?;
    check_writable("out_csv", &a.out_csv)?;
    let f = load_path("input", &a.input, &a.gen)?;
    let eps = match (&a.eps, a.eps_min, a.eps_max) {
        (Some(e), None, None) => {
            check_sweep("eps", e)?;
            e.clone()
        }
        (None, Some(lo), Some(hi)) => {
            positive("eps_min", lo)?;
            positive("eps_max", hi)?;
            if lo > hi {
                return Err(CliError::usage("eps_min", "must not exceed eps_max"));
            }
            let g = dyadic_widths(f.dt(), lo, hi);
            if g.is_empty() {
                return Err(CliError::usage(
                    "eps_min",
                    "no dyadic grid widths in [eps_min, eps_max]",
                ));
            }
            g
        }
        (None, None, None) => default_eps_grid(&f),
        (Some(_), _, _) => {
            return Err(CliError::usage(
                "eps",
                "give either `eps` or `eps_min`/`eps_max`",
            ))
        }
        _ => {
            return Err(CliError::usage(
                "eps_max",
                "`eps_min` and `eps_max` go together",
            ))
        }
    };
    let lengths = eps
        .par_iter()
        .map(|&e| graph_length(&f, e))
        .collect::<scalecalc::Result<Vec<_>>>()?;
    let fit = ScaleLawFit::from_lengths(&eps, &lengths)?;
    if let Some(p) = &a.out_json {
        out.write_json("out_json", p, &fit)?;
    }
    if let Some(p) = &a.out_csv {
        out.write("out_csv", p, |w| io::write_log_rows(w, &fit.log_rows()))?;
    }
    Ok(json!({
        "alpha_hat": fit.alpha_hat,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "widths": fit.eps.len(),
    }))
}

fn dim(a: &DimArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    let f = load_path("input", &a.input, &a.gen)?;
    let sizes = match &a.box_sizes {
        Some(s) => {
            check_sweep("box_sizes", s)?;
            s.clone()
        }
        None => default_box_sizes(&f),
    };
    let fit = box_counting_dimension(&f, &sizes)?;
    if let Some(p) = &a.out {
        out.write_json("out", p, &fit)?;
    }
    Ok(json!({ "dimension": fit.dimension, "residual": fit.residual, "sizes": fit.sizes.len() }))
}

fn ito(a: &ItoArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    if a.coeffs.is_empty() {
        return Err(CliError::usage("coeffs", "empty polynomial"));
    }
    let x = load_path("input", &a.input, &a.gen)?;
    let field = SmoothField::polynomial(a.coeffs.clone(), a.order)?;
    let cmp = ito_compare(&field, &x, a.eps, a.order)?;
    if let Some(p) = &a.out {
        out.write("out", p, |w| io::write_ito_comparison(w, &cmp))?;
    }
    let exact = exact_polynomial_remainder(&a.coeffs, &x, a.eps, a.order)?;
    let mut summary = json!({
        "eps": a.eps,
        "order": a.order,
        "max_error": cmp.max_error,
        "exact_remainder": exact,
    });
    if let Some(sweep) = &a.sweep {
        check_sweep("sweep", sweep)?;
        let rows = sweep
            .par_iter()
            .map(|&e| {
                let field = SmoothField::polynomial(a.coeffs.clone(), a.order)?;
                let float = ito_compare(&field, &x, e, a.order)?.max_error;
                let exact = exact_polynomial_remainder(&a.coeffs, &x, e, a.order)?;
                Ok(json!({ "eps": e, "max_error": float, "exact_remainder": exact, "ratio": exact / e.sqrt() }))
            })
            .collect::<scalecalc::Result<Vec<_>>>()?;
        summary["sweep"] = Value::Array(rows);
    }
    Ok(summary)
}

fn random_poly(rng: &mut ChaCha8Rng, dt: f64, len: usize) -> scalecalc::Result<SampledPath> {
    let deg = rng.gen_range(0..=4);
    let c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SampledPath::from_fn(0.0, dt, len, |t| {
        c.iter().rev().fold(0.0, |a, &ci| a * t + ci)
    })
}

fn algebra(a: &AlgebraArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    if a.max_word_len == 0 || a.max_word_len > 6 {
        return Err(CliError::usage("max_word_len", "must lie in 1..=6"));
    }
    if a.trials == 0 {
        return Err(CliError::usage("trials", "need at least one trial"));
    }
    let report = check_bialgebra(a.max_word_len);
    let words = Word::all_up_to(a.max_word_len);
    let dt = 1.0 / 64.0;
    let errors = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(i as u64));
            let mut s = WordSeries::zero();
            for _ in 0..rng.gen_range(1..=3) {
                let w = words[rng.gen_range(0..words.len())].clone();
                let c: Vec<f64> = (0..rng.gen_range(1..=3))
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect();
                s.add_term(w, EpsPoly::new(c));
            }
            let f = random_poly(&mut rng, dt, 65)?;
            let g = random_poly(&mut rng, dt, 65)?;
            let eps = rng.gen_range(4..=8) as f64 * dt;
            check_commuting_diagram(&s, &f, &g, eps)
        })
        .collect::<scalecalc::Result<Vec<f64>>>()?;
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let summary = json!({
        "passed": report.passed() && max_error <= 1e-10,
        "max_error": max_error,
        "trials": a.trials,
        "words": report.words,
        "homomorphism": report.homomorphism,
        "counit": report.counit,
        "coassociativity": report.coassociativity,
        "cocommutativity": report.cocommutativity,
        "failure": report.failure,
    });
    if let Some(p) = &a.out {
        out.write_json("out", p, &summary)?;
    }
    Ok(summary)
}

fn fracscan(a: &FracArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    let f = load_path("input", &a.input, &a.gen)?;
    let opts = FracOptions {
        levels: a.levels,
        combination: match a.combination {
            CombinationArg::Antisymmetric => Combination::Antisymmetric,
            CombinationArg::Literal => Combination::Literal,
        },
        ..FracOptions::default()
    };
    let points = match &a.points {
        Some(p) => {
            check_sweep("points", p)?;
            p.clone()
        }
        None => {
            if a.count == 0 {
                return Err(CliError::usage("count", "need at least one point"));
            }
            let margin = 1usize << (opts.richardson_order + 2);
            let n = f.len();
            if n <= 2 * margin + 1 {
                return Err(CliError::Numeric(format!(
                    "{n} samples leave no interior scan points"
                )));
            }
            let span = n - 1 - 2 * margin;
            let count = a.count.min(span + 1);
            (0..count)
                .map(|j| {
                    let i = margin
                        + if count == 1 {
                            span / 2
                        } else {
                            j * span / (count - 1)
                        };
                    f.time(i)
                })
                .collect()
        }
    };
    let rows = points
        .par_iter()
        .map(|&t| {
            let c = complex_local_frac(&f, t, a.alpha, &opts)?;
            Ok(ScanRow {
                t,
                value: c.value,
                flag: c.outcome,
            })
        })
        .collect::<scalecalc::Result<Vec<_>>>()?;
    let scan = SpectrumScan::from_rows(a.alpha, rows);
    if let Some(p) = &a.out {
        out.write("out", p, |w| io::write_scan(w, &scan.rows))?;
    }
    Ok(json!({
        "alpha": scan.alpha,
        "points": scan.rows.len(),
        "zero_fraction": scan.zero_fraction,
        "nonzero_fraction": scan.nonzero_fraction,
        "divergent_fraction": scan.divergent_fraction,
        "oscillatory_fraction": scan.oscillatory_fraction,
    }))
}

fn quantize(a: &QuantizeArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    let x = load_path("input", &a.input, &a.gen)?;
    let l = ClassicalLagrangian::new(a.m, a.potential.clone().unwrap_or(Potential::Free))?;
    let pipeline = match a.h {
        Some(h) => {
            positive("h", h)?;
            QuantizationPipeline::with_threshold(a.eps, h)
        }
        None => QuantizationPipeline::scale(a.eps),
    };
    let op = pipeline.operator_for(&x)?;
    let r = QuantizedLagrangian::quantize(&l).scale_euler_lagrange(&pipeline, &x)?;
    let r2 = ClassicalEquation::of(&l).quantized_residual(&pipeline, &x)?;
    if let Some(p) = &a.out {
        out.write("out", p, |w| io::write_complex_path(w, &r))?;
    }
    Ok(json!({
        "operator": op,
        "coherent": r == r2,
        "len": r.len(),
        "max_norm": r.max_norm(),
    }))
}

fn gse(a: &GseArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    positive("m", a.m)?;
    positive("hbar", a.hbar)?;
    let grid = match (&a.input, &a.field) {
        (Some(p), None) => io::read_complex_grid(read_file("input", p)?)
            .map_err(|e| CliError::usage("input", format!("{}: {e}", p.display())))?,
        (None, Some(f)) => f.generate(a.hbar, a.m)?,
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "input",
                "give either an input file or `field`, not both",
            ))
        }
        (None, None) => {
            return Err(CliError::usage(
                "input",
                "missing: give an input file or `field`",
            ))
        }
    };
    let gamma = a.gamma.unwrap_or(a.hbar / (2.0 * a.m));
    let field = WaveField::new(grid, gamma, a.m, a.hbar)?;
    let u = a.potential.clone().unwrap_or(Potential::Free);
    let gauge = a.alpha_gauge.clone().unwrap_or(Potential::Free);
    let residual = match a.equation {
        Equation::Gse => {
            let a_eps = match a.a_eps_mode {
                AEpsMode::Constant => AEps::Constant(
                    complex_arg("a_eps", &a.a_eps)?.unwrap_or(Complex64::new(0.0, -2.0 * gamma)),
                ),
                AEpsMode::File => {
                    let p = a.a_eps_file.as_ref().ok_or_else(|| {
                        CliError::usage("a_eps_file", "required when a_eps_mode is file")
                    })?;
                    AEps::Path(
                        io::read_complex_path(read_file("a_eps_file", p)?).map_err(|e| {
                            CliError::usage("a_eps_file", format!("{}: {e}", p.display()))
                        })?,
                    )
                }
                AEpsMode::Measured => {
                    let eps = a.eps.ok_or_else(|| {
                        CliError::usage("eps", "required when a_eps_mode is measured")
                    })?;
                    let x = load_path("path_input", &a.path_input, &a.path_gen)?;
                    AEps::Path(a_coeffs(&x, eps, 2)?)
                }
            };
            let opts = GseOptions {
                gradient: match a.gradient {
                    GradientArg::Homogeneous => GradientForm::Homogeneous,
                    GradientArg::InverseSquare => GradientForm::InverseSquare,
                },
                ..GseOptions::default()
            };
            gse_residual(&field, &a_eps, |x| u.value(x), |x| gauge.value(x), &opts)?
        }
        Equation::Classical => classical_schrodinger_residual(&field, |x| u.value(x))?,
        Equation::Nngse => {
            let c = complex_arg("alpha_c", &a.alpha_c)?
                .ok_or_else(|| CliError::usage("alpha_c", "required for the nngse equation"))?;
            nngse_residual(&field, |x| u.value(x), c)?
        }
    };
    if let Some(p) = &a.out {
        out.write("out", p, |w| io::write_complex_grid(w, &residual))?;
    }
    let mut summary = json!({
        "equation": format!("{:?}", a.equation).to_lowercase(),
        "nx": residual.nx,
        "nt": residual.nt,
        "max_norm": residual.max_norm(),
    });
    if a.compare_classical {
        let c = classical_schrodinger_residual(&field, |x| u.value(x))?;
        summary["classical_max_norm"] = json!(c.max_norm());
        summary["identical_to_classical"] = json!(c == residual);
    }
    Ok(summary)
}

fn schrod(a: &SchrodArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    let x = load_path("input", &a.input, &a.gen)?;
    let r = schrodinger_condition_check(&x, a.eps, a.hbar, a.m, a.tol)?;
    if let Some(p) = &a.out {
        out.write_json("out", p, &r)?;
    }
    Ok(serde_json::to_value(r).expect("plain struct"))
}

fn heisenberg(a: &HeisenbergArgs, out: &mut Outputs) -> CliResult<Value> {
    check_writable("out", &a.out)?;
    let x = load_path("input", &a.input, &a.gen)?;
    let grid = match &a.dt_grid {
        Some(g) => {
            check_sweep("dt_grid", g)?;
            g.clone()
        }
        None => dyadic_widths(x.dt(), 4.0 * x.dt(), x.span() / 32.0),
    };
    let fit = heisenberg_scaling_check(&x, &grid)?;
    if let Some(p) = &a.out {
        out.write_json("out", p, &fit)?;
    }
    Ok(
        json!({ "exponent": fit.exponent, "intercept": fit.intercept, "residual": fit.residual, "steps": fit.dts.len() }),
    )
}
