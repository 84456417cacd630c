//! Scale quantization: complex velocity, the quantized Euler-Lagrange
//! residual, wave functions and the Schrödinger-type residuals.

mod lagrangian;
mod paths;
mod wave;

pub use lagrangian::{
    central_derivative, complex_velocity, el_residual, ClassicalEquation, ClassicalLagrangian,
    Lagrangian, Potential, QOperator, QuantizationPipeline, QuantizedLagrangian,
};
pub use paths::{
    heisenberg_scaling_check, schrodinger_condition_check, ConditionReport, HeisenbergFit,
};
pub use wave::{
    action_and_wave, classical_schrodinger_residual, gaussian_packet, gse_residual,
    log_derivative_velocity, nngse_residual, phase_gauge_solve, plane_wave,
    solve_linear_second_order, AEps, ComplexGrid, GradientForm, GseOptions, WaveField, WaveSamples,
    NODE_THRESHOLD,
};
