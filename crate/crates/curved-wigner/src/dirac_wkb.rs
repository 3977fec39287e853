//! WKB Dirac machinery: rest-frame spinors, the spinor connection, the O(hbar)
//! velocity and acceleration corrections (general pipeline plus closed-form
//! Schwarzschild evaluations) and the nonlinear frequency correction of the
//! spin-carrying circular orbit.
//!
//! The hbar bookkeeping is a single dimensionless knob eps multiplying every
//! first-order term; all outputs here are per unit eps. Gamma matrices use
//! the Dirac representation with gamma^0 = diag(1,1,-1,-1) and spatial
//! matrices built on the equatorial axis dictionary of `wigner`
//! (sigma_1, sigma_2, sigma_3) = (sigma_x, -sigma_z, sigma_y).

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::diff::DiffScheme;
use crate::error::{CwError, Result};
use crate::frames::{spin_connection, TetradField};
use crate::geodesics::{check_above_photon_sphere, circular_orbit_constants};
use crate::geometry::{metric_at, ChartPoint, RiemannTensor, DIM};
use crate::wigner::{sigma_axis_1, sigma_axis_2, sigma_axis_3, LocalMomentum, C64};

fn cr(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

/// gamma^0 in the Dirac representation.
pub fn gamma_time() -> Matrix4<C64> {
    Matrix4::from_diagonal(&Vector4::new(cr(1.0), cr(1.0), cr(-1.0), cr(-1.0)))
}

fn embed_offdiag(s: &Matrix2<C64>) -> Matrix4<C64> {
    // [[0, s], [-s, 0]] block layout
    let mut g = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            g[(i, j + 2)] = s[(i, j)];
            g[(i + 2, j)] = -s[(i, j)];
        }
    }
    g
}

/// gamma^a for frame axis a = 0..3.
pub fn gamma_axis(a: usize) -> Matrix4<C64> {
    match a {
        0 => gamma_time(),
        1 => embed_offdiag(&sigma_axis_1()),
        2 => embed_offdiag(&sigma_axis_2()),
        3 => embed_offdiag(&sigma_axis_3()),
        _ => unreachable!("frame index {a}"),
    }
}

/// sigma^{ab} = (i/2)[gamma^a, gamma^b] on frame indices.
pub fn sigma_frame(a: usize, b: usize) -> Matrix4<C64> {
    let (ga, gb) = (gamma_axis(a), gamma_axis(b));
    (ga * gb - gb * ga) * Complex64::new(0.0, 0.5)
}

/// Rest-frame spin state with polar angle zeta and azimuth phi relative to
/// the local quantization axis.
#[derive(Debug, Clone, Copy)]
pub struct RestSpinor {
    pub zeta: f64,
    pub phi: f64,
}

impl RestSpinor {
    pub fn new(zeta: f64, phi: f64) -> Self {
        RestSpinor { zeta, phi }
    }

    pub fn up() -> Self {
        RestSpinor::new(0.0, 0.0)
    }

    pub fn down() -> Self {
        RestSpinor::new(std::f64::consts::PI, 0.0)
    }

    /// (cos zeta/2, e^{i phi} sin zeta/2).
    pub fn amplitudes(&self) -> Vector2<C64> {
        Vector2::new(
            cr((self.zeta / 2.0).cos()),
            Complex64::from_polar((self.zeta / 2.0).sin(), self.phi),
        )
    }

    /// Four-component embedding with vanishing lower components.
    pub fn four_component(&self) -> Vector4<C64> {
        let a = self.amplitudes();
        Vector4::new(a[0], a[1], cr(0.0), cr(0.0))
    }

    /// Unit spin direction (n_x, n_y, n_z).
    pub fn direction(&self) -> [f64; 3] {
        [
            self.zeta.sin() * self.phi.cos(),
            self.zeta.sin() * self.phi.sin(),
            self.zeta.cos(),
        ]
    }
}

/// Positive-energy momentum-space spinor (spin up or down along the local
/// quantization axis), normalized to psibar psi = 1; reduces to the
/// rest-frame columns at p = 0.
pub fn momentum_spinor(p: &LocalMomentum, up: bool) -> Vector4<C64> {
    let e = p.energy();
    let m = p.mass;
    let pref = ((e + m) / (2.0 * m)).sqrt();
    let (p1, p2, p3) = (p.p[1], p.p[2], p.p[3]);
    let d = e + m;
    if up {
        Vector4::new(
            cr(pref),
            cr(0.0),
            cr(pref * p3 / d),
            Complex64::new(pref * p1 / d, pref * p2 / d),
        )
    } else {
        Vector4::new(
            cr(0.0),
            cr(pref),
            Complex64::new(pref * p1 / d, -pref * p2 / d),
            cr(-pref * p3 / d),
        )
    }
}

/// Dirac adjoint psibar = psi^dagger gamma^0 as a row vector.
pub fn dirac_adjoint(psi: &Vector4<C64>) -> nalgebra::RowVector4<C64> {
    (gamma_time() * psi.map(|z| z.conj())).transpose()
}

/// Expectation psibar A psi.
pub fn sandwich(psi: &Vector4<C64>, a: &Matrix4<C64>) -> C64 {
    (dirac_adjoint(psi) * a * psi)[(0, 0)]
}

/// Spinor connection Gamma_mu = (i/4) omega_{mu a b} sigma^{ab}.
#[derive(Debug, Clone)]
pub struct SpinorConnection {
    pub gamma: [Matrix4<C64>; 4],
}

impl SpinorConnection {
    /// max || gamma^0 Gamma_mu^dagger gamma^0 + Gamma_mu ||.
    pub fn anti_self_adjointness_residual(&self) -> f64 {
        let g0 = gamma_time();
        self.gamma
            .iter()
            .map(|g| (g0 * g.adjoint() * g0 + g).norm())
            .fold(0.0, f64::max)
    }
}

pub fn spinor_connection(field: &dyn TetradField, x: &ChartPoint) -> Result<SpinorConnection> {
    let om = spin_connection(field, x)?;
    let mut out = [Matrix4::zeros(); 4];
    for mu in 0..DIM {
        let mut g = Matrix4::zeros();
        for a in 0..DIM {
            for b in 0..DIM {
                let w = om.lowered(mu, a, b);
                if w != 0.0 {
                    g += sigma_frame(a, b) * Complex64::new(0.0, 0.25 * w);
                }
            }
        }
        out[mu] = g;
    }
    Ok(SpinorConnection { gamma: out })
}

/// Covariant velocity correction per unit eps:
/// dv_alpha = (1/(i m)) psibar Gamma_alpha psi, real by construction.
pub fn velocity_correction(
    field: &dyn TetradField,
    spinor: &RestSpinor,
    x: &ChartPoint,
    mass: f64,
) -> Result<Vector4<f64>> {
    let conn = spinor_connection(field, x)?;
    let psi = spinor.four_component();
    let mut dv = Vector4::zeros();
    for alpha in 0..DIM {
        let z = sandwich(&psi, &conn.gamma[alpha]) / Complex64::new(0.0, mass);
        if z.im.abs() > 1e-10 * (1.0 + z.re.abs()) {
            return Err(CwError::domain(format!(
                "velocity correction not real: imag {} in component {alpha}",
                z.im
            )));
        }
        dv[alpha] = z.re;
    }
    Ok(dv)
}

/// Which route computes the acceleration correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccelRoute {
    /// Spin-curvature force: contraction of the Riemann tensor with the spin
    /// expectation.
    Curvature,
    /// Antisymmetrized covariant gradient of the spinor connection; an
    /// independent code path used as a cross-check.
    ConnectionGradient,
}

/// Covariant acceleration correction per unit eps for a particle of four-
/// velocity u carrying the given rest spin.
pub fn acceleration_correction(
    field: &dyn TetradField,
    riem: &RiemannTensor,
    u: &Vector4<f64>,
    spinor: &RestSpinor,
    x: &ChartPoint,
    mass: f64,
    route: AccelRoute,
) -> Result<Vector4<f64>> {
    let psi = spinor.four_component();
    match route {
        AccelRoute::Curvature => {
            // a_alpha = -(1/4m) R_{alpha beta gamma delta} u^beta <sigma^{gamma delta}>
            // with the pair-symmetric lowered tensor; the stored lowered view
            // carries the opposite pair order, absorbing the minus sign.
            let tet = field.tetrad(x)?;
            // sigma with upper world indices: sigma^{gd}(x) = e_c^g e_d^d sigma^{cd}
            let mut sig_exp = [[0.0f64; DIM]; DIM];
            let mut sig_frame_exp = [[0.0f64; DIM]; DIM];
            for a in 0..DIM {
                for b in 0..DIM {
                    if a == b {
                        continue;
                    }
                    let z = sandwich(&psi, &sigma_frame(a, b));
                    sig_frame_exp[a][b] = z.re;
                }
            }
            for g in 0..DIM {
                for d in 0..DIM {
                    let mut s = 0.0;
                    for a in 0..DIM {
                        for b in 0..DIM {
                            s += tet.e[(a, g)] * tet.e[(b, d)] * sig_frame_exp[a][b];
                        }
                    }
                    sig_exp[g][d] = s;
                }
            }
            let mut acc = Vector4::zeros();
            for alpha in 0..DIM {
                let mut s = 0.0;
                for beta in 0..DIM {
                    if u[beta] == 0.0 {
                        continue;
                    }
                    for g in 0..DIM {
                        for d in 0..DIM {
                            s += riem.lowered(alpha, beta, g, d) * u[beta] * sig_exp[g][d];
                        }
                    }
                }
                acc[alpha] = s / (4.0 * mass);
            }
            Ok(acc)
        }
        AccelRoute::ConnectionGradient => {
            // a_alpha = (1/(i m)) u^beta psibar (nabla_beta Gamma_alpha
            //          - nabla_alpha Gamma_beta + 2 [Gamma_alpha, Gamma_beta]) psi
            let scheme = field.scheme();
            let conn = spinor_connection(field, x)?;
            let gam = crate::geometry::christoffel(field.metric(), x)?;
            // partial derivatives of the spinor connection
            let mut dconn: Vec<[Matrix4<C64>; 4]> = Vec::with_capacity(4);
            for beta in 0..DIM {
                let h = scheme.step(x.coords[beta]);
                let cp = spinor_connection(field, &x.with_coord(beta, x.coords[beta] + h))?;
                let cm = spinor_connection(field, &x.with_coord(beta, x.coords[beta] - h))?;
                let mut row = [Matrix4::zeros(); 4];
                for al in 0..DIM {
                    row[al] = (cp.gamma[al] - cm.gamma[al]) / cr(2.0 * h);
                }
                dconn.push(row);
            }
            let nabla = |beta: usize, al: usize| -> Matrix4<C64> {
                let mut m = dconn[beta][al];
                for lam in 0..DIM {
                    m -= conn.gamma[lam] * cr(gam.gamma[lam][al][beta]);
                }
                m
            };
            let mut acc = Vector4::zeros();
            for alpha in 0..DIM {
                let mut total = Complex64::new(0.0, 0.0);
                for beta in 0..DIM {
                    if u[beta] == 0.0 {
                        continue;
                    }
                    let anti = nabla(beta, alpha) - nabla(alpha, beta);
                    let comm = (conn.gamma[alpha] * conn.gamma[beta]
                        - conn.gamma[beta] * conn.gamma[alpha])
                        * cr(2.0);
                    total += sandwich(&psi, &(anti + comm)) * cr(u[beta]);
                }
                let z = total / Complex64::new(0.0, mass);
                acc[alpha] = z.re;
            }
            Ok(acc)
        }
    }
}

/// Closed-form corrections on the circular orbit of radius R, per unit eps.
#[derive(Debug, Clone, Copy)]
pub struct CircularCorrections {
    /// Covariant velocity correction (t, r, theta, phi).
    pub delta_v: Vector4<f64>,
    /// Covariant acceleration correction.
    pub accel: Vector4<f64>,
    /// Frame components of the acceleration in the orbiting free-fall frame.
    pub accel_frame: Vector4<f64>,
    /// Spin-up rotation rate of the free-fall frame relative to the
    /// non-rotating frame, (1 - 2M/R)/(2 m R^2).
    pub chi_up: f64,
}

/// Closed forms for spin orientation (zeta, phi) at coordinate time t.
pub fn circular_corrections(
    mass: f64,
    radius: f64,
    m_particle: f64,
    zeta: f64,
    phi: f64,
    t: f64,
) -> Result<CircularCorrections> {
    check_above_photon_sphere(mass, radius)?;
    let k = 1.0 - 3.0 * mass / radius;
    let f = 1.0 - 2.0 * mass / radius;
    let omega = (mass / radius.powi(3)).sqrt();
    let omega_p = omega * k.sqrt();
    let cz = zeta.cos();
    let sz = zeta.sin();
    let arg = omega_p * t - phi;

    let dv_phi = f * cz / (2.0 * m_particle * k.sqrt());
    let delta_v = Vector4::new(
        -omega * dv_phi,
        0.0,
        -f.sqrt() * arg.sin() * sz / (2.0 * m_particle),
        dv_phi,
    );

    // both acceleration rows share the 1/(1 - 3M/R) enhancement; the radial
    // row uses 3 Omega^3 R = 3 M Omega / R^2
    let a_r = -3.0 * omega.powi(3) * radius * cz / (2.0 * m_particle * k);
    let a_th = 3.0 * mass * omega * f.sqrt() * arg.cos() * sz / (2.0 * m_particle * radius * k);
    let accel = Vector4::new(0.0, a_r, a_th, 0.0);

    let radial_mag = 3.0 * omega.powi(3) * radius * f.sqrt() * cz / (2.0 * m_particle * k);
    let accel_frame = Vector4::new(
        0.0,
        radial_mag * (omega_p * t).cos(),
        -a_th / radius,
        radial_mag * (omega_p * t).sin(),
    );

    Ok(CircularCorrections {
        delta_v,
        accel,
        accel_frame,
        chi_up: f / (2.0 * m_particle * radius * radius),
    })
}

/// Covariant velocity correction of the radial-infall scenario, per unit
/// eps: (0, 0, sin zeta sin phi / 2m, cos zeta / 2m). The acceleration
/// correction vanishes identically on radial infall.
pub fn radial_velocity_correction(m_particle: f64, zeta: f64, phi: f64) -> Vector4<f64> {
    Vector4::new(
        0.0,
        0.0,
        zeta.sin() * phi.sin() / (2.0 * m_particle),
        zeta.cos() / (2.0 * m_particle),
    )
}

/// Nonlinear frequency correction of the spin-up circular orbit.
#[derive(Debug, Clone, Copy)]
pub struct FrequencyShift {
    pub mass: f64,
    pub radius: f64,
    /// First-order frequency coefficient omega_1 (per unit eps).
    pub omega1: f64,
    /// Central-difference d omega_1 / dr at r = R; vanishes on the orbit.
    pub d_omega1_dr: f64,
}

impl FrequencyShift {
    /// Renormalized proper rotation rate (1 + eps omega_1) Omega'.
    pub fn corrected_rate(&self, eps: f64) -> f64 {
        let c = circular_orbit_constants(self.mass, self.radius).expect("validated radius");
        (1.0 + eps * self.omega1) * c.omega_prime
    }

    /// Angle traversed by a gyroscope axis per orbit,
    /// 2 pi (1 + eps omega_1) sqrt(1 - 3M/R).
    pub fn corrected_gyroscope_angle(&self, eps: f64) -> f64 {
        2.0 * std::f64::consts::PI
            * (1.0 + eps * self.omega1)
            * (1.0 - 3.0 * self.mass / self.radius).sqrt()
    }

    /// Corrected geodetic precession per orbit, 2 pi minus the traversed
    /// gyroscope angle; reduces to the geodesic value at eps = 0.
    pub fn corrected_precession(&self, eps: f64) -> f64 {
        2.0 * std::f64::consts::PI - self.corrected_gyroscope_angle(eps)
    }
}

/// omega_1(r) = (1/4M)(Omega^3/Omega'(r))(1 + 1/Omega'(r)) with Omega fixed
/// on the orbit; evaluated literally in geometric units.
pub fn orbital_frequency_shift(mass: f64, radius: f64, _m_particle: f64) -> Result<FrequencyShift> {
    let constants = circular_orbit_constants(mass, radius)?;
    let omega1_at = |r: f64| -> f64 {
        let op = constants.omega_prime_at(r);
        (constants.omega.powi(3) / op) * (1.0 + 1.0 / op) / (4.0 * mass)
    };
    let d_omega1_dr = DiffScheme::default().derive(omega1_at, radius);
    Ok(FrequencyShift {
        mass,
        radius,
        omega1: omega1_at(radius),
        d_omega1_dr,
    })
}

/// A classical four-velocity bundled with its first-order corrections at a
/// strength eps; the corrected velocity stays normalized to O(eps^2).
#[derive(Debug, Clone, Copy)]
pub struct PerturbedMotion {
    /// Classical contravariant four-velocity.
    pub u: Vector4<f64>,
    /// Covariant velocity correction per unit eps.
    pub delta_v: Vector4<f64>,
    /// Covariant acceleration per unit eps.
    pub delta_a: Vector4<f64>,
    pub eps: f64,
}

impl PerturbedMotion {
    /// Contravariant corrected velocity u + eps dv.
    pub fn velocity(&self, metric: &crate::geometry::MetricValue) -> Vector4<f64> {
        self.u + metric.raise(&self.delta_v) * self.eps
    }

    /// Covariant acceleration eps * delta_a.
    pub fn acceleration_cov(&self) -> Vector4<f64> {
        self.delta_a * self.eps
    }

    /// |(u + eps dv).(u + eps dv) - 1| in the given metric.
    pub fn normalization_residual(
        &self,
        field: &crate::geometry::MetricField,
        x: &ChartPoint,
    ) -> crate::error::Result<f64> {
        perturbed_normalization_residual(field, x, &self.u, &self.delta_v, self.eps)
    }
}

/// (u + eps dv).(u + eps dv) - 1 for covariant correction dv_alpha; scales as
/// eps^2 when dv comes from the pipeline.
pub fn perturbed_normalization_residual(
    field: &crate::geometry::MetricField,
    x: &ChartPoint,
    u: &Vector4<f64>,
    dv_cov: &Vector4<f64>,
    eps: f64,
) -> Result<f64> {
    let m = metric_at(field, x)?;
    let v = m.lower(u) + dv_cov * eps;
    let v_up = m.raise(&v);
    Ok((v_up.dot(&v) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{AnalyticFrameField, TetradKind};
    use crate::geometry::{riemann, MetricField};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn circ_field(radius: f64) -> AnalyticFrameField {
        AnalyticFrameField::new(TetradKind::CircularFreeFall { mass: 1.0, radius }).unwrap()
    }

    fn radial_field() -> AnalyticFrameField {
        AnalyticFrameField::new(TetradKind::RadialFreeFall { mass: 1.0 }).unwrap()
    }

    #[test]
    fn rest_spinor_states() {
        let up = RestSpinor::up().amplitudes();
        assert!((up[0].re - 1.0).abs() < 1e-15 && up[1].norm() < 1e-15);
        let down = RestSpinor::down().amplitudes();
        assert!(down[0].norm() < 1e-15 && (down[1].re - 1.0).abs() < 1e-12);
        let y = RestSpinor::new(FRAC_PI_2, FRAC_PI_2);
        let a = y.amplitudes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0].re - s).abs() < 1e-15);
        assert!((a[1] - Complex64::new(0.0, s)).norm() < 1e-15);
        let n = y.direction();
        assert!(n[0].abs() < 1e-15 && (n[1] - 1.0).abs() < 1e-15 && n[2].abs() < 1e-16);
    }

    #[test]
    fn momentum_spinor_normalization() {
        for (px, py, pz) in [(0.0, 0.0, 0.0), (0.3, -0.2, 0.5)] {
            let p = LocalMomentum::from_spatial(1.0, [px, py, pz]).unwrap();
            for up in [true, false] {
                let psi = momentum_spinor(&p, up);
                let norm = sandwich(&psi, &Matrix4::identity());
                assert!((norm.re - 1.0).abs() < 1e-13 && norm.im.abs() < 1e-15);
            }
        }
        // rest limit reduces to the constant columns
        let rest = momentum_spinor(&LocalMomentum::at_rest(1.0), true);
        assert!((rest - RestSpinor::up().four_component()).norm() < 1e-15);
    }

    #[test]
    fn gamma_algebra() {
        let eta = [1.0, -1.0, -1.0, -1.0];
        for a in 0..4 {
            for b in 0..4 {
                let anti = gamma_axis(a) * gamma_axis(b) + gamma_axis(b) * gamma_axis(a);
                let expect = if a == b { 2.0 * eta[a] } else { 0.0 };
                assert!(
                    (anti - Matrix4::identity() * cr(expect)).norm() < 1e-14,
                    "anticommutator ({a},{b})"
                );
            }
        }
    }

    #[test]
    fn flat_connection_vanishes() {
        // flat metric with the static (M=0) frame: Gamma_t must vanish; the
        // angular components encode only the chart's axis rotation
        let field = AnalyticFrameField::new(TetradKind::Static { mass: 0.0 }).unwrap();
        let x = ChartPoint::equatorial(0.0, 5.0, 0.3);
        let conn = spinor_connection(&field, &x).unwrap();
        assert!(conn.gamma[0].norm() < 1e-12);
        assert!(conn.gamma[1].norm() < 1e-12);
        assert!(conn.anti_self_adjointness_residual() < 1e-12);
    }

    #[test]
    fn fff_parallel_transports_rest_spinors() {
        // u^alpha Gamma_alpha annihilates the rest spinor along the circular FFF
        let field = circ_field(6.0);
        let x = ChartPoint::equatorial(0.4, 6.0, 1.2);
        let conn = spinor_connection(&field, &x).unwrap();
        let u = circular_orbit_constants(1.0, 6.0).unwrap().four_velocity();
        let mut contracted = Matrix4::<C64>::zeros();
        for alpha in 0..4 {
            contracted += conn.gamma[alpha] * cr(u[alpha]);
        }
        let psi = RestSpinor::up().four_component();
        assert!((contracted * psi).norm() < 1e-9);
    }

    #[test]
    fn anti_self_adjointness_random_points() {
        let field = circ_field(8.0);
        for k in 0..20 {
            let r = 4.0 + 10.0 * ((k as f64) * 0.31).fract();
            let x = ChartPoint::equatorial(0.2 * k as f64, r, 0.1 * k as f64);
            let conn = spinor_connection(&field, &x).unwrap();
            assert!(conn.anti_self_adjointness_residual() < 1e-10, "at r={r}");
        }
    }

    #[test]
    fn pipeline_matches_circular_closed_form() {
        let field = circ_field(6.0);
        for (zeta, phi) in [
            (0.0, 0.0),
            (FRAC_PI_4, 0.0),
            (FRAC_PI_2, FRAC_PI_2),
            (PI, 0.0),
        ] {
            let t = 0.37;
            let x = ChartPoint::equatorial(t, 6.0, 0.7);
            let dv = velocity_correction(&field, &RestSpinor::new(zeta, phi), &x, 1.0).unwrap();
            let closed = circular_corrections(1.0, 6.0, 1.0, zeta, phi, t).unwrap();
            assert!(
                (dv - closed.delta_v).abs().max() < 1e-8,
                "zeta={zeta}, phi={phi}: {dv:?} vs {:?}",
                closed.delta_v
            );
        }
    }

    #[test]
    fn closed_form_values_spin_up() {
        let c = circular_corrections(1.0, 6.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!((c.delta_v[0] + 0.032075014954979209).abs() < 1e-15);
        assert!((c.delta_v[3] - 0.47140452079103168).abs() < 1e-14);
        assert!((c.accel[1] + 0.0056701151453314308).abs() < 1e-16);
        assert!((c.chi_up - 1.0 / 108.0).abs() < 1e-17);
        // spin down flips the t and phi components
        let d = circular_corrections(1.0, 6.0, 1.0, PI, 0.0, 0.0).unwrap();
        assert!((d.delta_v[0] + c.delta_v[0]).abs() < 1e-15);
        assert!((d.delta_v[3] + c.delta_v[3]).abs() < 1e-14);
    }

    #[test]
    fn transverse_oscillation_amplitude() {
        // zeta = pi/2: no radial force; the transverse component oscillates with
        // amplitude Omega sqrt(1-2M/R)/(2m) and phase Omega' t - phi
        let omega = (1.0f64 / 216.0).sqrt();
        let c = circular_orbit_constants(1.0, 6.0).unwrap();
        let t = 0.9 / c.omega_prime; // so that Omega' t = 0.9
        let cc = circular_corrections(1.0, 6.0, 1.0, FRAC_PI_2, 0.9, t).unwrap();
        assert!(cc.accel[1].abs() < 1e-18);
        let expect = omega * (2.0f64 / 3.0).sqrt() / 2.0;
        assert!(
            (cc.accel[2] - expect).abs() < 1e-12,
            "peak transverse accel"
        );
        assert!((expect - 0.027777777777777776).abs() < 1e-15);
    }

    #[test]
    fn curvature_route_matches_closed_form() {
        let field = circ_field(6.0);
        let metric = MetricField::schwarzschild(1.0).unwrap();
        let u = circular_orbit_constants(1.0, 6.0).unwrap().four_velocity();
        for (zeta, phi) in [(0.0, 0.0), (FRAC_PI_4, 0.0), (FRAC_PI_2, FRAC_PI_2)] {
            let t = 0.37;
            let x = ChartPoint::equatorial(t, 6.0, 0.7);
            let riem = riemann(&metric, &x).unwrap();
            let a = acceleration_correction(
                &field,
                &riem,
                &u,
                &RestSpinor::new(zeta, phi),
                &x,
                1.0,
                AccelRoute::Curvature,
            )
            .unwrap();
            let closed = circular_corrections(1.0, 6.0, 1.0, zeta, phi, t).unwrap();
            assert!(
                (a - closed.accel).abs().max() < 1e-8,
                "zeta={zeta} phi={phi}: {a:?} vs {:?}",
                closed.accel
            );
        }
    }

    #[test]
    fn gradient_route_matches_curvature_route() {
        let field = circ_field(6.0);
        let metric = MetricField::schwarzschild(1.0).unwrap();
        let u = circular_orbit_constants(1.0, 6.0).unwrap().four_velocity();
        let x = ChartPoint::equatorial(0.37, 6.0, 0.7);
        let riem = riemann(&metric, &x).unwrap();
        for (zeta, phi) in [(0.0, 0.0), (FRAC_PI_4, FRAC_PI_2)] {
            let s = RestSpinor::new(zeta, phi);
            let a1 = acceleration_correction(&field, &riem, &u, &s, &x, 1.0, AccelRoute::Curvature)
                .unwrap();
            let a2 = acceleration_correction(
                &field,
                &riem,
                &u,
                &s,
                &x,
                1.0,
                AccelRoute::ConnectionGradient,
            )
            .unwrap();
            assert!(
                (a1 - a2).abs().max() < 1e-6,
                "routes disagree: {a1:?} vs {a2:?}"
            );
        }
    }

    #[test]
    fn radial_pipeline_and_zero_acceleration() {
        let field = radial_field();
        let metric = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.0, 10.0, 0.0);
        let u = crate::geodesics::radial_infall_velocity(1.0, 10.0).unwrap();
        let riem = riemann(&metric, &x).unwrap();
        for (zeta, phi) in [(0.0, 0.0), (PI, 0.0), (PI / 3.0, PI / 5.0)] {
            let s = RestSpinor::new(zeta, phi);
            let dv = velocity_correction(&field, &s, &x, 1.0).unwrap();
            let closed = radial_velocity_correction(1.0, zeta, phi);
            assert!(
                (dv - closed).abs().max() < 1e-8,
                "zeta={zeta} phi={phi}: {dv:?} vs {closed:?}"
            );
            for route in [AccelRoute::Curvature, AccelRoute::ConnectionGradient] {
                let a = acceleration_correction(&field, &riem, &u, &s, &x, 1.0, route).unwrap();
                assert!(a.abs().max() < 1e-10, "radial accel {route:?}: {a:?}");
            }
        }
        // spin-up deflection value: covariant dv_phi = 1/(2 m) at any r
        let dv = velocity_correction(&field, &RestSpinor::up(), &x, 1.0).unwrap();
        assert!((dv[3] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn flat_spacetime_zero_corrections() {
        let field = AnalyticFrameField::new(TetradKind::Static { mass: 0.0 }).unwrap();
        let metric = MetricField::flat();
        let x = ChartPoint::equatorial(0.0, 5.0, 0.0);
        let riem = riemann(&metric, &x).unwrap();
        let u = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let a = acceleration_correction(
            &field,
            &riem,
            &u,
            &RestSpinor::new(1.0, 0.5),
            &x,
            1.0,
            AccelRoute::Curvature,
        )
        .unwrap();
        assert!(a.abs().max() < 1e-12);
    }

    #[test]
    fn schwarzschild_selection_rules() {
        // Gamma_r^{s's} = 0; Gamma_{t,phi}^{up,down} = 0; Gamma_theta^{up,up} = 0
        let field = circ_field(6.0);
        let x = ChartPoint::equatorial(0.37, 6.0, 0.7);
        let conn = spinor_connection(&field, &x).unwrap();
        let up = RestSpinor::up().four_component();
        let down = RestSpinor::down().four_component();
        let elem = |al: usize, l: &Vector4<C64>, r: &Vector4<C64>| -> f64 {
            (dirac_adjoint(l) * conn.gamma[al] * r)[(0, 0)].norm()
        };
        for (l, r) in [(&up, &up), (&up, &down), (&down, &up), (&down, &down)] {
            assert!(elem(1, l, r) < 1e-10, "Gamma_r matrix element");
        }
        assert!(elem(0, &up, &down) < 1e-10 && elem(3, &up, &down) < 1e-10);
        assert!(elem(2, &up, &up) < 1e-10 && elem(2, &down, &down) < 1e-10);
        // Gamma^{down down} = -Gamma^{up up} for t and phi
        for al in [0, 3] {
            let a = (dirac_adjoint(&up) * conn.gamma[al] * up)[(0, 0)];
            let b = (dirac_adjoint(&down) * conn.gamma[al] * down)[(0, 0)];
            assert!((a + b).norm() < 1e-10, "sign flip in component {al}");
        }
        // Gamma_theta^{down up} = -conj(Gamma_theta^{up down})
        let ud = (dirac_adjoint(&up) * conn.gamma[2] * down)[(0, 0)];
        let du = (dirac_adjoint(&down) * conn.gamma[2] * up)[(0, 0)];
        assert!((du + ud.conj()).norm() < 1e-10);
        assert!(ud.norm() > 1e-4, "transverse element should be nonzero");
    }

    #[test]
    fn frequency_shift_value_and_flatness() {
        let shift = orbital_frequency_shift(1.0, 6.0, 1.0).unwrap();
        assert!(
            (shift.omega1 - 0.035657512124735222).abs() < 1e-12,
            "omega1 = {}",
            shift.omega1
        );
        assert!(
            shift.d_omega1_dr.abs() < 1e-6,
            "d omega1/dr = {:e}",
            shift.d_omega1_dr
        );
        // eps = 0 restores the geodesic precession rate and angle
        let c = circular_orbit_constants(1.0, 6.0).unwrap();
        assert!((shift.corrected_rate(0.0) - c.omega_prime).abs() < 1e-15);
        assert!((shift.corrected_precession(0.0) - 1.8403023690212202).abs() < 1e-12);
        let p = shift.corrected_gyroscope_angle(1e-3);
        assert!((p - 4.4430413603106024).abs() < 1e-10, "gyro angle {p}");
        // offset from the geodesic angle is linear in eps
        let base = shift.corrected_gyroscope_angle(0.0);
        let delta1 = shift.corrected_gyroscope_angle(1e-3) - base;
        let delta2 = shift.corrected_gyroscope_angle(2e-3) - base;
        assert!((delta2 / delta1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn perturbed_motion_bundle() {
        let metric = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.0, 6.0, 0.0);
        let g = metric_at(&metric, &x).unwrap();
        let closed = circular_corrections(1.0, 6.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let pm = PerturbedMotion {
            u: circular_orbit_constants(1.0, 6.0).unwrap().four_velocity(),
            delta_v: closed.delta_v,
            delta_a: closed.accel,
            eps: 1e-3,
        };
        let v = pm.velocity(&g);
        assert!((v[3] - (pm.u[3] - 1e-3 * closed.delta_v[3] / 36.0)).abs() < 1e-15);
        let r1 = pm.normalization_residual(&metric, &x).unwrap();
        let half = PerturbedMotion { eps: 5e-4, ..pm };
        let r2 = half.normalization_residual(&metric, &x).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 0.05);
        assert!((pm.acceleration_cov()[1] - 1e-3 * closed.accel[1]).abs() < 1e-20);
    }

    struct UserCircularField {
        metric: MetricField,
        mass: f64,
        radius: f64,
    }

    impl crate::frames::TetradField for UserCircularField {
        fn metric(&self) -> &MetricField {
            &self.metric
        }
        fn tetrad(&self, x: &ChartPoint) -> crate::error::Result<crate::frames::Tetrad> {
            crate::frames::analytic_tetrad(
                TetradKind::CircularFreeFall {
                    mass: self.mass,
                    radius: self.radius,
                },
                x,
            )
        }
    }

    #[test]
    fn pipeline_works_over_user_registered_metric() {
        // the same correction through a user-registered metric with
        // finite-difference derivatives; only the FD error budget loosens
        let field = UserCircularField {
            metric: MetricField::user_defined(
                |x: &ChartPoint| {
                    let f = 1.0 - 2.0 / x.r();
                    nalgebra::Matrix4::from_diagonal(&Vector4::new(
                        f,
                        -1.0 / f,
                        -x.r() * x.r(),
                        -x.r() * x.r() * x.theta().sin().powi(2),
                    ))
                },
                None,
            ),
            mass: 1.0,
            radius: 6.0,
        };
        let x = ChartPoint::equatorial(0.4, 6.0, 0.1);
        let dv = velocity_correction(&field, &RestSpinor::new(0.7, 0.3), &x, 1.0).unwrap();
        let closed = circular_corrections(1.0, 6.0, 1.0, 0.7, 0.3, 0.4).unwrap();
        assert!(
            (dv - closed.delta_v).abs().max() < 1e-7,
            "{dv:?} vs {:?}",
            closed.delta_v
        );
    }

    #[test]
    fn pipeline_respects_geometric_scaling() {
        // under (M, R) -> (2M, 2R) at fixed particle mass, lengths double:
        // dv_phi is scale-free, dv_t and chi scale as 1/lambda, the radial
        // acceleration as 1/lambda^2
        let a = circular_corrections(1.0, 6.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let b = circular_corrections(2.0, 12.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!((a.delta_v[3] - b.delta_v[3]).abs() < 1e-14);
        assert!((a.delta_v[0] - 2.0 * b.delta_v[0]).abs() < 1e-14);
        assert!((a.chi_up - 4.0 * b.chi_up).abs() < 1e-16);
        assert!((a.accel[1] - 4.0 * b.accel[1]).abs() < 1e-16);
        // and the general pipeline reproduces the scaled closed form
        let field = AnalyticFrameField::new(TetradKind::CircularFreeFall {
            mass: 2.0,
            radius: 12.0,
        })
        .unwrap();
        let x = ChartPoint::equatorial(0.0, 12.0, 0.0);
        let dv = velocity_correction(&field, &RestSpinor::up(), &x, 1.0).unwrap();
        assert!((dv - b.delta_v).abs().max() < 1e-9);
    }

    #[test]
    fn normalization_residual_scales_quadratically() {
        let metric = MetricField::schwarzschild(1.0).unwrap();
        // circular
        let x = ChartPoint::equatorial(0.2, 6.0, 0.4);
        let u = circular_orbit_constants(1.0, 6.0).unwrap().four_velocity();
        let dv = circular_corrections(1.0, 6.0, 1.0, FRAC_PI_4, FRAC_PI_2, 0.2)
            .unwrap()
            .delta_v;
        let r1 = perturbed_normalization_residual(&metric, &x, &u, &dv, 1e-3).unwrap();
        let r2 = perturbed_normalization_residual(&metric, &x, &u, &dv, 5e-4).unwrap();
        let ratio = r1 / r2;
        assert!((ratio - 4.0).abs() < 0.2, "circular ratio {ratio}");
        // radial
        let xr = ChartPoint::equatorial(0.0, 10.0, 0.0);
        let ur = crate::geodesics::radial_infall_velocity(1.0, 10.0).unwrap();
        let dvr = radial_velocity_correction(1.0, FRAC_PI_4, FRAC_PI_2);
        let r1 = perturbed_normalization_residual(&metric, &xr, &ur, &dvr, 1e-3).unwrap();
        let r2 = perturbed_normalization_residual(&metric, &xr, &ur, &dvr, 5e-4).unwrap();
        let ratio = r1 / r2;
        assert!((ratio - 4.0).abs() < 0.2, "radial ratio {ratio}");
    }
}
