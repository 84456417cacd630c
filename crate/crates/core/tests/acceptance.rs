//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! `cargo test -p scalecalc --test acceptance`

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalecalc::algebra::{check_bialgebra, check_commuting_diagram, EpsPoly, Word, WordSeries};
use scalecalc::expansion::{a_coeffs, exact_polynomial_remainder, ito_compare, SmoothField};
use scalecalc::fractional::{local_frac_deriv, FracOptions};
use scalecalc::generators::{
    gen_principal_schrodinger, gen_takagi, takagi_terms_for, PrincipalPath, Sign,
};
use scalecalc::quantize::{
    classical_schrodinger_residual, gaussian_packet, gse_residual, heisenberg_scaling_check,
    nngse_residual, schrodinger_condition_check, AEps, ClassicalEquation, ClassicalLagrangian,
    ComplexGrid, GradientForm, GseOptions, Potential, QuantizationPipeline, QuantizedLagrangian,
    WaveField,
};
use scalecalc::scale_laws::{
    box_counting_dimension, default_box_sizes, dyadic_widths, fit_holder_exponent, scale_law_ode,
    ScaleLawForm,
};
use scalecalc::{quantum_diff, scale_derivative, Grid, SampledPath, Side};

const SEED: u64 = 0xacce_97;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Check = fn() -> scalecalc::Result<Outcome>;

fn takagi_half(log2_n: u32) -> SampledPath {
    let n = 1usize << log2_n;
    gen_takagi(0.5, takagi_terms_for(0.5, 1.0 / n as f64), Grid::unit(n)).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, dt: f64, len: usize) -> SampledPath {
    let deg = rng.gen_range(0..=5);
    let c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SampledPath::from_fn(0.0, dt, len, |t| {
        c.iter().rev().fold(0.0, |a, &ci| a * t + ci)
    })
    .unwrap()
}

fn leibniz() -> scalecalc::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 1 << 10;
    let dt = 1.0 / n as f64;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = random_poly(&mut rng, dt, n + 1);
        let g = random_poly(&mut rng, dt, n + 1);
        let fg = SampledPath::new(
            0.0,
            dt,
            f.values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| a * b)
                .collect(),
        )?;
        let k = rng.gen_range(1..=32);
        let eps = k as f64 * dt;
        for s in [Side::Plus, Side::Minus] {
            let (df, dg, dfg) = (
                quantum_diff(&f, eps, s)?,
                quantum_diff(&g, eps, s)?,
                quantum_diff(&fg, eps, s)?,
            );
            let off = if s == Side::Plus { 0 } else { k };
            for i in 0..dfg.len() {
                let (a, b) = (df.values()[i], dg.values()[i]);
                let rhs =
                    a * g.values()[i + off] + f.values()[i + off] * b + s.sign() * eps * a * b;
                worst = worst.max((dfg.values()[i] - rhs).abs());
            }
        }
    }
    Ok(outcome(worst <= 1e-10, format!("max error {worst:.3e}")))
}

fn gluing() -> scalecalc::Result<Outcome> {
    let n = 1 << 10;
    let dt = 1.0 / n as f64;
    let f = SampledPath::from_fn(0.0, dt, n + 1, |t| t * t)?;
    let mut exact = true;
    for k in 1..n / 2 {
        let eps = k as f64 * dt;
        let d = scale_derivative(&f, eps)?;
        let mut sup = 0.0f64;
        for (t, z) in d.times().zip(d.values()) {
            exact &= *z == Complex64::new(2.0 * t, -eps);
            sup = sup.max((z - Complex64::new(2.0 * t, 0.0)).norm());
        }
        exact &= sup == eps;
    }
    Ok(outcome(
        exact,
        format!(
            "{} widths, □f = 2t - iε and sup gap = ε bit-exact",
            n / 2 - 1
        ),
    ))
}

fn scale_law_fit() -> scalecalc::Result<Outcome> {
    let x = takagi_half(16);
    let eps = dyadic_widths(x.dt(), 2f64.powi(-12), 2f64.powi(-5));
    let fit = fit_holder_exponent(&x, &eps)?;
    Ok(outcome(
        (0.45..=0.55).contains(&fit.alpha_hat),
        format!(
            "alpha_hat {:.4} over {} widths, residual {:.2e}",
            fit.alpha_hat,
            eps.len(),
            fit.residual
        ),
    ))
}

fn box_dimension() -> scalecalc::Result<Outcome> {
    let x = takagi_half(16);
    let fit = box_counting_dimension(&x, &default_box_sizes(&x))?;
    Ok(outcome(
        (1.4..=1.6).contains(&fit.dimension),
        format!("dimension {:.4}", fit.dimension),
    ))
}

fn ode_conjugacy() -> scalecalc::Result<Outcome> {
    let mut worst_rel = 0.0f64;
    let mut worst_lin = 0.0f64;
    for &alpha in &[0.2, 0.5, 0.8] {
        for &y0 in &[0.5, 0.9, 1.0, 2.0, 5.0] {
            // y < 1 reaches the pole y = 0 as ln ε decreases
            let (t0, t1) = if y0 < 1.0 { (0.0, 6.0) } else { (0.0, -6.0) };
            let y = scale_law_ode(ScaleLawForm::Holder, alpha, y0, t0, t1, 2000)?;
            let x = scale_law_ode(ScaleLawForm::Inverse, alpha, 1.0 / y0, t0, t1, 2000)?;
            for ((_, yv), (_, xv)) in y.iter().zip(&x) {
                worst_rel = worst_rel.max((xv - 1.0 / yv).abs() / xv.abs());
            }
            let z = scale_law_ode(ScaleLawForm::Linear, alpha, y0, t0, t1, 2000)?;
            for (t, zv) in &z {
                let exact = y0 * ((1.0 - alpha) * (t - t0)).exp();
                worst_lin = worst_lin.max((zv - exact).abs());
            }
        }
    }
    Ok(outcome(
        worst_rel <= 1e-6 && worst_lin <= 1e-8,
        format!("x vs 1/y rel {worst_rel:.2e}, linear vs exp {worst_lin:.2e}"),
    ))
}

fn ito_trend() -> scalecalc::Result<Outcome> {
    let x = takagi_half(12);
    let field = SmoothField::polynomial(vec![0.0, 0.0, 1.0], 2)?;
    let mut exact = Vec::new();
    let mut float = Vec::new();
    for k in 5..=10 {
        let eps = 2f64.powi(-k);
        exact.push(exact_polynomial_remainder(&[0.0, 0.0, 1.0], &x, eps, 2)? / eps.sqrt());
        float.push(ito_compare(&field, &x, eps, 2)?.max_error / eps.sqrt());
    }
    let monotone = exact.windows(2).all(|w| w[1] <= w[0]);
    Ok(outcome(
        monotone,
        format!(
            "exact remainder/ε^½ {:?}; floating-point {:?}",
            exact,
            float.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>()
        ),
    ))
}

fn bialgebra() -> scalecalc::Result<Outcome> {
    let report = check_bialgebra(3);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let words = Word::all_up_to(3);
    let dt = 1.0 / 64.0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut s = WordSeries::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let w = words[rng.gen_range(0..words.len())].clone();
            let c: Vec<f64> = (0..rng.gen_range(1..=3))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            s.add_term(w, EpsPoly::new(c));
        }
        let f = random_poly(&mut rng, dt, 65);
        let g = random_poly(&mut rng, dt, 65);
        let eps = rng.gen_range(4..=8) as f64 * dt;
        worst = worst.max(check_commuting_diagram(&s, &f, &g, eps)?);
    }
    Ok(outcome(
        report.passed() && worst <= 1e-10,
        format!(
            "{} words exact: hom {} counit {} coassoc {} cocomm {}; diagram max {worst:.2e}",
            report.words,
            report.homomorphism,
            report.counit,
            report.coassociativity,
            report.cocommutativity
        ),
    ))
}

fn principal_set() -> scalecalc::Result<Outcome> {
    let dt = 1.0 / 1024.0;
    let mut all = true;
    let mut cases = 0;
    for &ratio in &[0.25, 1.0, 3.0] {
        for sign in [Sign::Plus, Sign::Minus] {
            for &k in &[1usize, 4, 16] {
                for &amplitude in &[0.0, 0.3] {
                    let eps = k as f64 * dt;
                    let p = PrincipalPath {
                        hbar_over_m: ratio,
                        c: 0.1,
                        sign,
                        eps,
                        amplitude,
                    };
                    let x = gen_principal_schrodinger(&p, Grid::new(dt, 1025)?)?;
                    let r = schrodinger_condition_check(&x, eps, ratio, 1.0, 1e-12)?;
                    let a2 = a_coeffs(&x, eps, 2)?;
                    all &= r.verdict
                        && a2
                            .values()
                            .iter()
                            .all(|z| (z - Complex64::new(0.0, -ratio)).norm() <= 1e-12);
                    cases += 1;
                }
            }
        }
    }
    Ok(outcome(all, format!("{cases} paths")))
}

fn packet(n: usize, nt: usize) -> scalecalc::Result<WaveField> {
    let g = gaussian_packet(
        1.0,
        1.0,
        1.0,
        0.0,
        1.0,
        (-8.0, 16.0 / (n - 1) as f64, n),
        (0.0, 1.0 / (nt - 1) as f64, nt),
    )?;
    WaveField::with_schrodinger_gamma(g, 1.0, 1.0)
}

fn classical_reduction() -> scalecalc::Result<Outcome> {
    let u = |x: f64| 0.5 * x * x;
    let mut identical = true;
    let f = packet(161, 21)?;
    for form in [GradientForm::Homogeneous, GradientForm::InverseSquare] {
        let opts = GseOptions {
            gradient: form,
            ..GseOptions::default()
        };
        let a = gse_residual(&f, &AEps::schrodinger(f.gamma), u, |_| 0.0, &opts)?;
        identical &= a == classical_schrodinger_residual(&f, u)?;
    }
    let coarse = classical_schrodinger_residual(&packet(161, 21)?, |_| 0.0)?.max_norm();
    let fine = classical_schrodinger_residual(&packet(321, 41)?, |_| 0.0)?.max_norm();
    let ratio = coarse / fine;
    Ok(outcome(
        identical && (3.0..=5.0).contains(&ratio),
        format!("bit-identical {identical}; contraction {ratio:.3} ({coarse:.2e} -> {fine:.2e})"),
    ))
}

fn nngse() -> scalecalc::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let g = ComplexGrid::from_fn((-1.0, 0.05, 41), (0.0, 0.02, 21), |x, t| {
        Complex64::new(1.0 + 0.3 * (2.0 * x + t).sin(), 0.5 * (x * t).cos())
    })?;
    let mut identical = true;
    for &(hbar, m) in &[(1.0, 1.0), (2.0, 2.0), (0.5, 0.25)] {
        let f = WaveField::with_schrodinger_gamma(g.clone(), m, hbar)?;
        let c: f64 = rng.gen_range(-1.0..1.0);
        let u = move |x: f64| c * x * x;
        identical &= nngse_residual(&f, u, Complex64::new(hbar, 0.0))?
            == classical_schrodinger_residual(&f, u)?;
    }
    Ok(outcome(
        identical,
        "α = ħ residual equals the classical residual exactly",
    ))
}

fn heisenberg() -> scalecalc::Result<Outcome> {
    let x = takagi_half(14);
    let grid = dyadic_widths(x.dt(), 4.0 * x.dt(), 1.0 / 32.0);
    let t = heisenberg_scaling_check(&x, &grid)?.exponent;
    let line = SampledPath::from_fn(0.0, x.dt(), x.len(), |t| t)?;
    let l = heisenberg_scaling_check(&line, &grid)?.exponent;
    Ok(outcome(
        (0.4..=0.6).contains(&t) && (0.9..=1.1).contains(&l),
        format!("takagi {t:.4}, line {l:.4}"),
    ))
}

fn coherence() -> scalecalc::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 12);
    let n = 1 << 10;
    let dt = 1.0 / n as f64;
    let mut identical = 0;
    for i in 0..20 {
        let potential = match i % 4 {
            0 => Potential::Free,
            1 => Potential::Linear {
                slope: rng.gen_range(-10.0..10.0),
            },
            2 => Potential::Harmonic {
                k: rng.gen_range(0.1..5.0),
            },
            _ => Potential::Polynomial {
                coeffs: (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            },
        };
        let l = ClassicalLagrangian::new(rng.gen_range(0.1..5.0), potential)?;
        let x = if i % 2 == 0 {
            let a = rng.gen_range(0.2..0.9);
            gen_takagi(a, takagi_terms_for(a, dt), Grid::unit(n))?
        } else {
            let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            SampledPath::from_fn(0.0, dt, n + 1, |t| {
                c.iter().rev().fold(0.0, |a, &ci| a * t + ci)
            })?
        };
        let p = QuantizationPipeline::with_threshold(
            rng.gen_range(1..=16) as f64 * dt,
            rng.gen_range(0.1..2.0),
        );
        let a = QuantizedLagrangian::quantize(&l).scale_euler_lagrange(&p, &x)?;
        let b = ClassicalEquation::of(&l).quantized_residual(&p, &x)?;
        identical += usize::from(a == b);
    }
    Ok(outcome(
        identical == 20,
        format!("{identical}/20 instances identical"),
    ))
}

fn fractional_oracle() -> scalecalc::Result<Outcome> {
    let n = 1 << 14;
    let dt = 1.0 / n as f64;
    let opts = FracOptions::default();
    let mut worst_one = 0.0f64;
    for &alpha in &[0.25, 0.5, 0.75] {
        let f = SampledPath::from_fn(0.0, dt, n + 1, |t| (t - 0.5).max(0.0).powf(alpha))?;
        let e = local_frac_deriv(&f, 0.5, alpha, Side::Plus, &opts)?;
        worst_one = worst_one.max(e.outcome.limit().map_or(f64::INFINITY, |v| (v - 1.0).abs()));
    }
    let mut worst_zero = 0.0f64;
    let smooth: [fn(f64) -> f64; 3] = [|t| t * t, |t| (3.0 * t).sin(), |t| t.exp()];
    for f in smooth {
        let p = SampledPath::from_fn(0.0, dt, n + 1, f)?;
        for side in [Side::Plus, Side::Minus] {
            let e = local_frac_deriv(&p, 0.5, 0.5, side, &opts)?;
            worst_zero = worst_zero.max(e.outcome.limit().map_or(f64::INFINITY, f64::abs));
        }
    }
    Ok(outcome(
        worst_one <= 1e-3 && worst_zero <= 1e-3,
        format!("|d - 1| {worst_one:.2e}, smooth |d| {worst_zero:.2e}"),
    ))
}

fn main() {
    let criteria: [(&str, Check, Option<Duration>); 13] = [
        (
            "deformed Leibniz exactness",
            leibniz,
            Some(Duration::from_secs(1)),
        ),
        ("gluing", gluing, Some(Duration::from_secs(1))),
        (
            "scale-law fit",
            scale_law_fit,
            Some(Duration::from_secs(10)),
        ),
        (
            "box-counting dimension",
            box_dimension,
            Some(Duration::from_secs(10)),
        ),
        ("ODE conjugacy", ode_conjugacy, None),
        (
            "Itô remainder trend",
            ito_trend,
            Some(Duration::from_secs(10)),
        ),
        ("bialgebra", bialgebra, Some(Duration::from_secs(5))),
        (
            "Schrödinger condition",
            principal_set,
            Some(Duration::from_secs(1)),
        ),
        (
            "classical reduction",
            classical_reduction,
            Some(Duration::from_secs(30)),
        ),
        ("nngse consistency", nngse, None),
        (
            "Heisenberg scaling",
            heisenberg,
            Some(Duration::from_secs(10)),
        ),
        ("coherence", coherence, None),
        ("local fractional oracle", fractional_oracle, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.map_or(true, |b| took <= b);
        let limit = budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        let pass = pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {detail} [{:.3}s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
