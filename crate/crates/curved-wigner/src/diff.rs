//! Central-difference rules shared by every module that differentiates a
//! field numerically (metric, tetrad, spinor connection, radial expansions).

/// Step rule: h = scale * max(1, |x|), second-order central stencil.
#[derive(Debug, Clone, Copy)]
pub struct DiffScheme {
    pub step_scale: f64,
    /// One Richardson refinement (combines h and h/2 into a 4th-order estimate).
    pub richardson: bool,
}

impl Default for DiffScheme {
    fn default() -> Self {
        DiffScheme {
            step_scale: 1e-5,
            richardson: false,
        }
    }
}

impl DiffScheme {
    pub fn step(&self, coordinate: f64) -> f64 {
        self.step_scale * coordinate.abs().max(1.0)
    }

    /// d/dx of a scalar-valued f at x.
    pub fn derive<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> f64 {
        let h = self.step(x);
        let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        if self.richardson {
            (4.0 * d(h / 2.0) - d(h)) / 3.0
        } else {
            d(h)
        }
    }

    /// Componentwise derivative of a vector-of-values field.
    pub fn derive_vec<F: Fn(f64) -> Vec<f64>>(&self, f: F, x: f64) -> Vec<f64> {
        let h = self.step(x);
        let d = |h: f64| -> Vec<f64> {
            let p = f(x + h);
            let m = f(x - h);
            p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        if self.richardson {
            let fine = d(h / 2.0);
            let coarse = d(h);
            fine.iter()
                .zip(&coarse)
                .map(|(f4, f2)| (4.0 * f4 - f2) / 3.0)
                .collect()
        } else {
            d(h)
        }
    }
}
