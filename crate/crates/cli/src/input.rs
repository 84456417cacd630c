use std::path::PathBuf;

use scalecalc::generators::{
    gen_affine_ifs, gen_principal_schrodinger, gen_takagi, takagi_terms_for, AffineSystem,
    PrincipalPath, Sign,
};
use scalecalc::quantize::{gaussian_packet, plane_wave, ComplexGrid};
use scalecalc::{io, Grid, SampledPath};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::read_file;

fn default_sign() -> Sign {
    Sign::Plus
}

/// Path generators; every variant samples `length` points from `t = 0` (IFS:
/// from the first interpolation node) with step `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum GenSpec {
    Takagi {
        alpha: f64,
        /// Defaults to enough terms to resolve `dt`.
        n_terms: Option<usize>,
        dt: f64,
        length: usize,
    },
    Ifs {
        points: Vec<(f64, f64)>,
        scalings: Vec<f64>,
        iterations: usize,
        dt: f64,
        length: usize,
    },
    Principal {
        hbar_over_m: f64,
        #[serde(default)]
        c: f64,
        #[serde(default = "default_sign")]
        sign: Sign,
        eps: f64,
        #[serde(default)]
        amplitude: f64,
        dt: f64,
        length: usize,
    },
    Polynomial {
        coeffs: Vec<f64>,
        dt: f64,
        length: usize,
    },
}

impl GenSpec {
    pub fn generate(&self) -> scalecalc::Result<SampledPath> {
        match self {
            GenSpec::Takagi {
                alpha,
                n_terms,
                dt,
                length,
            } => {
                let n = n_terms.unwrap_or_else(|| takagi_terms_for(*alpha, *dt));
                gen_takagi(*alpha, n, Grid::new(*dt, *length)?)
            }
            GenSpec::Ifs {
                points,
                scalings,
                iterations,
                dt,
                length,
            } => {
                let sys = AffineSystem::new(points.clone(), scalings.clone(), *iterations)?;
                gen_affine_ifs(&sys, Grid::new(*dt, *length)?)
            }
            GenSpec::Principal {
                hbar_over_m,
                c,
                sign,
                eps,
                amplitude,
                dt,
                length,
            } => {
                let p = PrincipalPath {
                    hbar_over_m: *hbar_over_m,
                    c: *c,
                    sign: *sign,
                    eps: *eps,
                    amplitude: *amplitude,
                };
                gen_principal_schrodinger(&p, Grid::new(*dt, *length)?)
            }
            GenSpec::Polynomial { coeffs, dt, length } => {
                SampledPath::from_fn(0.0, *dt, *length, |t| {
                    coeffs.iter().rev().fold(0.0, |a, &c| a * t + c)
                })
            }
        }
    }
}

/// A path given either as a `t,value` CSV or as an inline generator.
pub fn load_path(
    input_field: &str,
    input: &Option<PathBuf>,
    gen: &Option<GenSpec>,
) -> CliResult<SampledPath> {
    match (input, gen) {
        (Some(p), None) => Ok(io::read_sampled_path(read_file(input_field, p)?)
            .map_err(|e| CliError::usage(input_field, format!("{}: {e}", p.display())))?),
        (None, Some(g)) => Ok(g.generate()?),
        (Some(_), Some(_)) => Err(CliError::usage(
            input_field,
            "give either an input file or `gen`, not both",
        )),
        (None, None) => Err(CliError::usage(
            input_field,
            "missing: give an input file or `gen`",
        )),
    }
}

/// Axis `[start, step, len]`.
pub type AxisSpec = (f64, f64, usize);

/// Analytic wave fields on an `(x, t)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    /// Free Gaussian packet of width `sigma`, centre `x0`, wave number `k`.
    Gaussian {
        sigma: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        k: f64,
        x: AxisSpec,
        t: AxisSpec,
    },
    /// `exp(i(kx - ωt))`; `omega` defaults to the free dispersion `ħk²/2m`.
    Plane {
        k: f64,
        omega: Option<f64>,
        x: AxisSpec,
        t: AxisSpec,
    },
}

impl FieldSpec {
    pub fn generate(&self, hbar: f64, m: f64) -> scalecalc::Result<ComplexGrid> {
        match self {
            FieldSpec::Gaussian { sigma, x0, k, x, t } => {
                gaussian_packet(hbar, m, *sigma, *x0, *k, *x, *t)
            }
            FieldSpec::Plane { k, omega, x, t } => {
                let w = omega.unwrap_or(hbar * k * k / (2.0 * m));
                plane_wave(*k, w, *x, *t)
            }
        }
    }
}

pub fn parse_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    let mut de = serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("{path}: {}", e.inner())
        }
    })
}
