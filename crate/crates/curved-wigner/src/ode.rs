//! Adaptive Dormand-Prince 5(4) integrator for the small dense systems used
//! by frame transport (20 components) and geodesic integration (8 components).
//!
//! Steps are clamped at requested output times, so sampled states carry the
//! integrator tolerance rather than interpolation error.

use crate::error::{CwError, Result};

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order solution weights equal row 6 of A; 4th-order embedded weights:
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            initial_step: 1e-3,
            max_steps: 50_000_000,
        }
    }
}

/// Integrate dy/dt = f(t, y) from t0 over the sorted sample times, returning
/// the state at each sample (the state at t0 is not included unless listed).
pub fn integrate_sampled<F>(
    f: F,
    t0: f64,
    y0: &[f64],
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut out = Vec::with_capacity(samples.len());
    let span = samples.last().copied().unwrap_or(t0) - t0;
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut h = opts.initial_step.abs().max(1e-12) * dir;
    let h_min = 1e-14 * span.abs().max(1.0);

    let mut k = vec![vec![0.0; n]; 7];
    let mut y_stage = vec![0.0; n];
    let mut steps = 0usize;
    f(t, &y, &mut k[0])?;

    for &ts in samples {
        while (ts - t) * dir > 1e-14 * span.abs().max(1.0) {
            steps += 1;
            if steps > opts.max_steps {
                return Err(CwError::IntegrationFailure {
                    tau: t,
                    reason: format!("exceeded {} steps", opts.max_steps),
                });
            }
            if (t + h - ts) * dir > 0.0 {
                h = ts - t;
            }
            // stages
            for s in 0..6 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s + 1) {
                        acc += A[s][j] * kj[i];
                    }
                    y_stage[i] = y[i] + h * acc;
                }
                f(t + C[s] * h, &y_stage, &mut k[s + 1])?;
            }
            // 5th-order candidate is y_stage from the final row (FSAL layout):
            // recompute explicitly for clarity
            let mut y5 = vec![0.0; n];
            let mut err_norm = 0.0f64;
            for i in 0..n {
                let mut acc5 = 0.0;
                let mut acc4 = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    let b5 = if j < 6 { A[5][j] } else { 0.0 };
                    acc5 += b5 * kj[i];
                    acc4 += B4[j] * kj[i];
                }
                y5[i] = y[i] + h * acc5;
                let e = h * (acc5 - acc4);
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
                err_norm += (e / scale) * (e / scale);
            }
            err_norm = (err_norm / n as f64).sqrt();

            if err_norm <= 1.0 {
                t += h;
                y.copy_from_slice(&y5);
                // FSAL: k7 is f at the new point
                let k_last = k[6].clone();
                k[0].copy_from_slice(&k_last);
            }
            let factor = if err_norm > 0.0 {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h *= factor;
            if h.abs() < h_min {
                return Err(CwError::IntegrationFailure {
                    tau: t,
                    reason: format!("step underflow (h = {h:e})"),
                });
            }
            if err_norm > 1.0 {
                // rejected: refresh k0 at (t, y)
                f(t, &y, &mut k[0])?;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
