//! Flat and local Wigner rotations: the standard boost, the exact
//! little-group element, infinitesimal generators, spin-1/2 rotation steps
//! and the time-ordered accumulation along a trajectory.
//!
//! Local axes for equatorial scenarios are fixed to the dictionary
//! {1^, 2^, 3^} = {x^, -z^, y^} <-> {e_r, e_theta, e_phi}, so the Pauli
//! matrices attached to the frame axes are (sigma_x, -sigma_z, sigma_y).
//! Frame indices are lowered with eta = diag(1,-1,-1,-1): p_i = -p^i.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{CwError, Result};
use crate::frames::{FrameSample, Tetrad, TetradField, TransportMode};
use crate::geometry::{metric_at, minkowski, ChartPoint, MetricField};

pub type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrix attached to local axis 1^ (the radial direction x^).
pub fn sigma_axis_1() -> Matrix2<C64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Pauli matrix attached to local axis 2^ (-z^, i.e. e_theta).
pub fn sigma_axis_2() -> Matrix2<C64> {
    Matrix2::new(c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
}

/// Pauli matrix attached to local axis 3^ (y^, i.e. e_phi).
pub fn sigma_axis_3() -> Matrix2<C64> {
    Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

/// Four-momentum components in a local orthonormal frame.
#[derive(Debug, Clone, Copy)]
pub struct LocalMomentum {
    /// Contravariant frame components (p^0, p^1, p^2, p^3).
    pub p: Vector4<f64>,
    pub mass: f64,
}

impl LocalMomentum {
    /// Build from spatial components; the energy is put on shell.
    pub fn from_spatial(mass: f64, spatial: [f64; 3]) -> Result<Self> {
        if mass <= 0.0 {
            return Err(CwError::domain("rest mass must be positive"));
        }
        let p0 = (mass * mass + spatial.iter().map(|v| v * v).sum::<f64>()).sqrt();
        Ok(LocalMomentum {
            p: Vector4::new(p0, spatial[0], spatial[1], spatial[2]),
            mass,
        })
    }

    pub fn at_rest(mass: f64) -> Self {
        Self::from_spatial(mass, [0.0; 3]).expect("positive mass")
    }

    /// Validate and wrap explicit components.
    pub fn from_components(p: Vector4<f64>, mass: f64, tol: f64) -> Result<Self> {
        let shell = (mass * mass + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        if p[0] <= 0.0 || (p[0] - shell).abs() > tol * shell.max(1.0) {
            return Err(CwError::domain(format!(
                "momentum off shell: p0 = {}, shell = {shell}",
                p[0]
            )));
        }
        Ok(LocalMomentum { p, mass })
    }

    pub fn energy(&self) -> f64 {
        self.p[0]
    }

    pub fn spatial_norm_sq(&self) -> f64 {
        self.p[1] * self.p[1] + self.p[2] * self.p[2] + self.p[3] * self.p[3]
    }
}

/// Standard boost L(p) taking (m, 0, 0, 0) to p; L^T eta L = eta.
pub fn standard_boost(p: &LocalMomentum) -> Matrix4<f64> {
    standard_boost_raw(p.mass, &p.p)
}

fn standard_boost_raw(mass: f64, p: &Vector4<f64>) -> Matrix4<f64> {
    let gamma = p[0] / mass;
    let mut l = Matrix4::identity();
    l[(0, 0)] = gamma;
    for i in 1..4 {
        l[(i, 0)] = p[i] / mass;
        // L^0_i = -p_i/m = +p^i/m with the spacelike sign convention
        l[(0, i)] = p[i] / mass;
        for j in 1..4 {
            // (gamma-1)/|p|^2 = 1/(m^2 (1+gamma)), regular at p = 0
            l[(i, j)] += p[i] * p[j] / (mass * mass * (1.0 + gamma));
        }
    }
    l
}

/// max |Lambda^T eta Lambda - eta|.
pub fn lorentz_residual(lambda: &Matrix4<f64>) -> f64 {
    let eta = minkowski();
    (lambda.transpose() * eta * lambda - eta).abs().max()
}

/// Exact little-group element W = L^{-1}(Lambda p) Lambda L(p), using
/// L^{-1}(q) = L(-q) for the inverse standard boost.
pub fn exact_wigner(
    lambda: &Matrix4<f64>,
    p: &LocalMomentum,
    orthogonality_tol: f64,
) -> Result<Matrix4<f64>> {
    let residual = lorentz_residual(lambda);
    if residual > orthogonality_tol {
        return Err(CwError::NotALorentzTransform {
            residual,
            tolerance: orthogonality_tol,
        });
    }
    let p_new = lambda * p.p;
    if p_new[0] <= 0.0 {
        return Err(CwError::domain("boosted momentum has non-positive energy"));
    }
    let l_inv = standard_boost_raw(
        p.mass,
        &Vector4::new(p_new[0], -p_new[1], -p_new[2], -p_new[3]),
    );
    Ok(l_inv * lambda * standard_boost(p))
}

/// Infinitesimal local Lorentz transformation rate; lowered components are
/// antisymmetric.
#[derive(Debug, Clone)]
pub struct InfinitesimalLlt {
    /// Mixed components lambda^a_b (row a, col b), per unit proper time.
    pub lambda: Matrix4<f64>,
}

impl InfinitesimalLlt {
    pub fn antisymmetry_residual(&self) -> f64 {
        let eta = minkowski();
        let low = eta * self.lambda;
        (low + low.transpose()).abs().max()
    }
}

/// lambda^a_b = (1/m)(a^a p_b - p^a a_b) + chi^a_b for local-frame
/// acceleration a and momentum p.
pub fn infinitesimal_llt(
    a_local: &Vector4<f64>,
    p: &LocalMomentum,
    chi: &crate::frames::ChiMatrix,
) -> Result<InfinitesimalLlt> {
    let eta = minkowski();
    let p_low = eta * p.p;
    let a_low = eta * a_local;
    let inner = a_local.dot(&p_low);
    if inner.abs() > 1e-8 * p.mass.max(1.0) {
        return Err(CwError::OrthogonalityViolation { inner });
    }
    let mut lam = Matrix4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            lam[(a, b)] = (a_local[a] * p_low[b] - p.p[a] * a_low[b]) / p.mass + chi.chi[(a, b)];
        }
    }
    Ok(InfinitesimalLlt { lambda: lam })
}

/// Generator of the infinitesimal Wigner rotation; time row and column are
/// zero, the spatial block is antisymmetric.
#[derive(Debug, Clone)]
pub struct WignerGenerator {
    /// Mixed components theta^a_b (row a, col b), per unit proper time.
    pub theta: Matrix4<f64>,
}

impl WignerGenerator {
    pub const ZERO_TIME_COMPONENTS: bool = true;

    pub fn norm(&self) -> f64 {
        self.theta.norm()
    }

    /// Rotation-rate components (theta_23, theta_31, theta_12) used by the
    /// spin-1/2 step.
    pub fn rates(&self) -> (f64, f64, f64) {
        (self.theta[(2, 3)], self.theta[(3, 1)], self.theta[(1, 2)])
    }
}

/// theta^i_j = lambda^i_j + (lambda^i_0 p^j - p^i lambda^j_0) / (p^0 + m).
///
/// The boost-part entries are the raw matrix components; this reading is the
/// one consistent with linearizing the exact little-group element, which the
/// first-order consistency check pins down.
pub fn infinitesimal_wigner(lam: &InfinitesimalLlt, p: &LocalMomentum) -> WignerGenerator {
    let mut theta = Matrix4::zeros();
    let denom = p.p[0] + p.mass;
    for i in 1..4 {
        for j in 1..4 {
            let boost_part = (lam.lambda[(i, 0)] * p.p[j] - p.p[i] * lam.lambda[(j, 0)]) / denom;
            theta[(i, j)] = lam.lambda[(i, j)] + boost_part;
        }
    }
    WignerGenerator { theta }
}

/// A spin-1/2 rotation acting on (up, down) amplitudes.
#[derive(Debug, Clone)]
pub struct SpinHalfRotation {
    pub d: Matrix2<C64>,
}

impl SpinHalfRotation {
    pub fn identity() -> Self {
        SpinHalfRotation {
            d: Matrix2::identity(),
        }
    }

    pub fn unitarity_residual(&self) -> f64 {
        (self.d.adjoint() * self.d - Matrix2::identity()).norm()
    }

    pub fn determinant(&self) -> C64 {
        self.d[(0, 0)] * self.d[(1, 1)] - self.d[(0, 1)] * self.d[(1, 0)]
    }
}

/// First-order rotation step
/// D = I + (i/2)(theta_23 sigma_1 + theta_31 sigma_2 + theta_12 sigma_3) dtau.
pub fn spin_half_step(theta: &WignerGenerator, dtau: f64) -> SpinHalfRotation {
    let (t23, t31, t12) = theta.rates();
    let gen =
        sigma_axis_1() * c(t23, 0.0) + sigma_axis_2() * c(t31, 0.0) + sigma_axis_3() * c(t12, 0.0);
    SpinHalfRotation {
        d: Matrix2::identity() + gen * c(0.0, 0.5 * dtau),
    }
}

/// Exact exponential of a constant generator over a finite proper time.
pub fn spin_half_exact(t23: f64, t31: f64, t12: f64, tau: f64) -> SpinHalfRotation {
    let w = (t23 * t23 + t31 * t31 + t12 * t12).sqrt();
    if w == 0.0 {
        return SpinHalfRotation::identity();
    }
    let half = 0.5 * w * tau;
    let axis = sigma_axis_1() * c(t23 / w, 0.0)
        + sigma_axis_2() * c(t31 / w, 0.0)
        + sigma_axis_3() * c(t12 / w, 0.0);
    SpinHalfRotation {
        d: Matrix2::identity() * c(half.cos(), 0.0) + axis * c(0.0, half.sin()),
    }
}

type WorldVectorFn = Arc<dyn Fn(&ChartPoint) -> Result<Vector4<f64>> + Send + Sync>;

/// Velocity and acceleration fields of the tracked particle (world,
/// contravariant), plus its rest mass.
#[derive(Clone)]
pub struct Motion {
    pub velocity: WorldVectorFn,
    pub acceleration: WorldVectorFn,
    pub mass: f64,
}

impl Motion {
    pub fn new(
        velocity: impl Fn(&ChartPoint) -> Result<Vector4<f64>> + Send + Sync + 'static,
        acceleration: impl Fn(&ChartPoint) -> Result<Vector4<f64>> + Send + Sync + 'static,
        mass: f64,
    ) -> Self {
        Motion {
            velocity: Arc::new(velocity),
            acceleration: Arc::new(acceleration),
            mass,
        }
    }
}

/// Where the observer frame along the trajectory comes from.
pub enum FrameSource<'a> {
    /// An analytic field; chi is obtained by differentiating the field.
    Field(&'a dyn TetradField),
    /// Frames produced by `transport_frame`, sampled at the half-step grid
    /// tau_j = tau0 + j (tau1-tau0)/(2N); chi follows from the transport law.
    Transported {
        samples: &'a [FrameSample],
        mode: TransportMode,
        metric: &'a MetricField,
    },
}

/// Per-step record of the rotation generator.
#[derive(Debug, Clone, Copy)]
pub struct ThetaSample {
    pub tau: f64,
    pub theta_23: f64,
    pub theta_31: f64,
    pub theta_12: f64,
}

/// Result of the ordered accumulation.
#[derive(Debug, Clone)]
pub struct AccumulatedRotation {
    pub w: Matrix4<f64>,
    pub d: SpinHalfRotation,
    pub steps: Vec<ThetaSample>,
}

impl AccumulatedRotation {
    /// ||R^T R - I|| and |det R - 1| of the spatial block.
    pub fn spatial_orthogonality_residual(&self) -> (f64, f64) {
        let r = self.w.fixed_view::<3, 3>(1, 1).into_owned();
        let ortho = (r.transpose() * r - nalgebra::Matrix3::identity()).norm();
        (ortho, (r.determinant() - 1.0).abs())
    }
}

/// Upper bound accepted for ||theta|| dtau per step.
pub const MAX_STEP_ROTATION: f64 = 1e-3;

/// Time-ordered accumulation of the local Wigner rotation along a trajectory
/// x(tau), with the generator sampled at step midpoints and later steps
/// multiplied on the left.
pub fn accumulate_wigner(
    trajectory: &dyn Fn(f64) -> Result<ChartPoint>,
    tau_span: (f64, f64),
    n_steps: usize,
    frame: &FrameSource<'_>,
    motion: &Motion,
) -> Result<AccumulatedRotation> {
    let (t0, t1) = tau_span;
    if n_steps == 0 || t1 == t0 {
        return Ok(AccumulatedRotation {
            w: Matrix4::identity(),
            d: SpinHalfRotation::identity(),
            steps: Vec::new(),
        });
    }
    let dtau = (t1 - t0) / n_steps as f64;
    if let FrameSource::Transported { samples, .. } = frame {
        if samples.len() != 2 * n_steps + 1 {
            return Err(CwError::Config(format!(
                "transported frame needs {} half-step samples, got {}",
                2 * n_steps + 1,
                samples.len()
            )));
        }
    }

    let mut w = Matrix4::identity();
    let mut d = Matrix2::<C64>::identity();
    let mut steps = Vec::with_capacity(n_steps);

    for k in 0..n_steps {
        let tau_mid = t0 + (k as f64 + 0.5) * dtau;
        let x = trajectory(tau_mid)?;
        let v = (motion.velocity)(&x)?;
        let a = (motion.acceleration)(&x)?;

        let (tetrad, chi): (Tetrad, crate::frames::ChiMatrix) = match frame {
            FrameSource::Field(field) => {
                let tet = field.tetrad(&x)?;
                let chi = crate::frames::chi_matrix(&v, *field, &x)?;
                (tet, chi)
            }
            FrameSource::Transported {
                samples,
                mode,
                metric,
            } => {
                let tet = samples[2 * k + 1].tetrad.clone();
                let chi = match mode {
                    TransportMode::Parallel => crate::frames::ChiMatrix::zero(),
                    TransportMode::FermiWalker => {
                        // chi^a_b = -(e^{-1T})^a_mu [(e_b.v) a^mu - (e_b.a) v^mu]
                        let m = metric_at(metric, &tet.base_point)?;
                        let einv_t = tet.inverse_transpose()?;
                        let v_low = m.lower(&v);
                        let a_low = m.lower(&a);
                        let a_frame = einv_t * a;
                        let v_frame = einv_t * v;
                        let mut chi = Matrix4::zeros();
                        for ai in 0..4 {
                            for b in 0..4 {
                                let e_b = tet.frame_vector(b);
                                chi[(ai, b)] =
                                    -e_b.dot(&v_low) * a_frame[ai] + e_b.dot(&a_low) * v_frame[ai];
                            }
                        }
                        crate::frames::ChiMatrix { chi }
                    }
                };
                (tet, chi)
            }
        };

        // project the unit tangent; the O(eps^2) normalization slack of the
        // corrected velocity is absorbed here
        let metric_field = match frame {
            FrameSource::Field(field) => field.metric(),
            FrameSource::Transported { metric, .. } => metric,
        };
        let mv = metric_at(metric_field, &x)?;
        let v_norm = mv.inner(&v, &v).sqrt();
        let v_hat = v / v_norm;
        let einv_t = tetrad.inverse_transpose()?;
        let p_frame_raw = einv_t * (v_hat * motion.mass);
        let p = LocalMomentum::from_spatial(
            motion.mass,
            [p_frame_raw[1], p_frame_raw[2], p_frame_raw[3]],
        )?;
        let a_frame = einv_t * a;

        let lam = infinitesimal_llt(&a_frame, &p, &chi)?;
        let theta = infinitesimal_wigner(&lam, &p);
        let product = theta.norm() * dtau.abs();
        if product > MAX_STEP_ROTATION {
            return Err(CwError::StepTooCoarse {
                product,
                limit: MAX_STEP_ROTATION,
            });
        }

        w = (Matrix4::identity() + theta.theta * dtau) * w;
        d = spin_half_step(&theta, dtau).d * d;
        let (t23, t31, t12) = theta.rates();
        steps.push(ThetaSample {
            tau: tau_mid,
            theta_23: t23,
            theta_31: t31,
            theta_12: t12,
        });
    }

    Ok(AccumulatedRotation {
        w,
        d: SpinHalfRotation { d },
        steps,
    })
}

/// Convergence report of the first-order little-group expansion.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// (dtau, ||(W(I + lambda dtau, p) - I)/dtau - theta||) rows.
    pub rows: Vec<(f64, f64)>,
    /// Log-log slope fitted over the rows; 1 for first-order convergence.
    pub slope: f64,
    /// max |W^0_0 - 1| / dtau observed; second-order smallness of the time
    /// components.
    pub max_time_defect_rate: f64,
}

/// Check that the exact little-group element linearizes to the infinitesimal
/// generator: builds Lambda = I + lambda dtau for each dtau and measures the
/// defect against theta(lambda, p).
pub fn infinitesimal_consistency_check(
    lam: &InfinitesimalLlt,
    p: &LocalMomentum,
    dtaus: &[f64],
) -> Result<ConsistencyReport> {
    let theta = infinitesimal_wigner(lam, p);
    let mut rows = Vec::with_capacity(dtaus.len());
    let mut max_time_defect_rate: f64 = 0.0;
    let lam_scale = lam.lambda.norm().max(1e-30);
    for &dt in dtaus {
        let big = Matrix4::identity() + lam.lambda * dt;
        // I + lambda dtau preserves eta only to O(dtau^2)
        let tol = (100.0 * dt * dt * lam_scale * lam_scale).max(1e-12);
        let w = exact_wigner(&big, p, tol)?;
        let err = ((w - Matrix4::identity()) / dt - theta.theta).norm();
        rows.push((dt, err));
        max_time_defect_rate = max_time_defect_rate.max((w[(0, 0)] - 1.0).abs() / dt);
    }
    // least-squares slope of ln(err) vs ln(dtau)
    let n = rows.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(dt, err) in &rows {
        let (x, y) = (dt.ln(), err.max(1e-300).ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(ConsistencyReport {
        rows,
        slope,
        max_time_defect_rate,
    })
}
