//! Fixed-step fourth-order Runge-Kutta.

use std::ops::{Add, Mul};

/// One RK4 step of `y' = f(t, y)` from `(t, y)` with step `h`.
pub fn rk4_step<T, F>(f: &F, t: f64, y: &[T], h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64, &[T]) -> Vec<T>,
{
    let axpy = |a: &[T], b: &[T], s: f64| -> Vec<T> {
        a.iter().zip(b).map(|(&x, &d)| x + d * s).collect()
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(t + h, &axpy(y, &k3, h));
    (0..y.len())
        .map(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

/// Trajectory of `steps` RK4 steps; entry 0 is `y0`.
pub fn rk4_integrate<T, F>(f: F, t0: f64, y0: &[T], h: f64, steps: usize) -> Vec<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64, &[T]) -> Vec<T>,
{
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.to_vec());
    for s in 0..steps {
        let next = rk4_step(&f, t0 + s as f64 * h, &out[s], h);
        out.push(next);
    }
    out
}
