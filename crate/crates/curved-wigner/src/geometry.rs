//! Metric evaluation, Christoffel symbols and Riemann curvature.
//!
//! All index conventions follow the signature (+,-,-,-) with geometric units
//! G = c = 1, so masses are lengths. Coordinates are (t, r, theta, phi).
//! The Riemann tensor is stored with the derivative (antisymmetric) pair
//! first: `riem\[mu\]\[nu\]\[alpha\]\[beta\]` holds R_{mu nu alpha}^{beta}; fully
//! lowered and frame-projected forms are derived views.

use nalgebra::{Matrix4, Vector4};
use std::sync::Arc;

use crate::diff::DiffScheme;
use crate::error::{CwError, Result};

pub const DIM: usize = 4;

/// eta = diag(1, -1, -1, -1).
pub fn minkowski() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// Event in a chart; coords ordered (t, r, theta, phi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub coords: Vector4<f64>,
    pub chart_id: u32,
}

impl ChartPoint {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Self {
        ChartPoint {
            coords: Vector4::new(t, r, theta, phi),
            chart_id: 0,
        }
    }

    /// Equatorial-slice point (theta = pi/2), the default for built-in scenarios.
    pub fn equatorial(t: f64, r: f64, phi: f64) -> Self {
        Self::new(t, r, std::f64::consts::FRAC_PI_2, phi)
    }

    pub fn t(&self) -> f64 {
        self.coords[0]
    }
    pub fn r(&self) -> f64 {
        self.coords[1]
    }
    pub fn theta(&self) -> f64 {
        self.coords[2]
    }
    pub fn phi(&self) -> f64 {
        self.coords[3]
    }

    pub fn with_coord(&self, axis: usize, value: f64) -> Self {
        let mut c = *self;
        c.coords[axis] = value;
        c
    }

    pub fn max_coord_diff(&self, other: &ChartPoint) -> f64 {
        (self.coords - other.coords).abs().max()
    }
}

/// Metric, inverse and determinant at a point.
#[derive(Debug, Clone)]
pub struct MetricValue {
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub det_g: f64,
}

impl MetricValue {
    fn from_matrix(g: Matrix4<f64>) -> Result<Self> {
        let det_g = g.determinant();
        if det_g >= 0.0 {
            return Err(CwError::domain(format!(
                "metric determinant {det_g:e} is not negative"
            )));
        }
        let positive = g
            .symmetric_eigenvalues()
            .iter()
            .filter(|l| **l > 0.0)
            .count();
        if positive != 1 {
            return Err(CwError::domain(format!(
                "metric signature has {positive} positive directions, expected 1"
            )));
        }
        let g_inv = g
            .try_inverse()
            .ok_or_else(|| CwError::domain("metric not invertible"))?;
        Ok(MetricValue { g, g_inv, det_g })
    }

    /// Lower a contravariant vector.
    pub fn lower(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.g * v
    }

    /// Raise a covariant vector.
    pub fn raise(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.g_inv * v
    }

    /// g(u, v) for two contravariant vectors.
    pub fn inner(&self, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
        (self.g * v).dot(u)
    }
}

type ComponentFn = Arc<dyn Fn(&ChartPoint) -> Matrix4<f64> + Send + Sync>;
type DerivativeFn = Arc<dyn Fn(&ChartPoint) -> [Matrix4<f64>; 4] + Send + Sync>;

/// How first derivatives of the metric are obtained.
#[derive(Debug, Clone, Copy, Default)]
pub enum DerivativeMode {
    #[default]
    Analytic,
    CentralDifference(DiffScheme),
}

/// A metric field: the built-in Schwarzschild family or a user-registered one.
#[derive(Clone)]
pub struct MetricField {
    kind: MetricKind,
    pub derivative_mode: DerivativeMode,
}

#[derive(Clone)]
enum MetricKind {
    Schwarzschild {
        mass: f64,
    },
    UserDefined {
        components: ComponentFn,
        derivatives: Option<DerivativeFn>,
    },
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            MetricKind::Schwarzschild { mass } => {
                write!(f, "MetricField::Schwarzschild {{ mass: {mass} }}")
            }
            MetricKind::UserDefined { .. } => write!(f, "MetricField::UserDefined"),
        }
    }
}

impl MetricField {
    pub fn schwarzschild(mass: f64) -> Result<Self> {
        if mass < 0.0 || !mass.is_finite() {
            return Err(CwError::domain(format!("mass {mass} must be >= 0")));
        }
        Ok(MetricField {
            kind: MetricKind::Schwarzschild { mass },
            derivative_mode: DerivativeMode::Analytic,
        })
    }

    /// Flat spacetime in the spherical chart (the M -> 0 member of the family).
    pub fn flat() -> Self {
        MetricField::schwarzschild(0.0).expect("zero mass is valid")
    }

    pub fn user_defined(
        components: impl Fn(&ChartPoint) -> Matrix4<f64> + Send + Sync + 'static,
        derivatives: Option<DerivativeFn>,
    ) -> Self {
        let mode = if derivatives.is_some() {
            DerivativeMode::Analytic
        } else {
            DerivativeMode::CentralDifference(DiffScheme::default())
        };
        MetricField {
            kind: MetricKind::UserDefined {
                components: Arc::new(components),
                derivatives,
            },
            derivative_mode: mode,
        }
    }

    pub fn with_derivative_mode(mut self, mode: DerivativeMode) -> Self {
        self.derivative_mode = mode;
        self
    }

    pub fn mass(&self) -> Option<f64> {
        match self.kind {
            MetricKind::Schwarzschild { mass } => Some(mass),
            _ => None,
        }
    }

    fn check_domain(&self, x: &ChartPoint) -> Result<()> {
        if let MetricKind::Schwarzschild { mass } = self.kind {
            let (r, theta) = (x.r(), x.theta());
            // exclude a thin shell above the horizon where 1/f and the
            // difference stencils are numerically unusable
            let margin = 1e-6 * (2.0 * mass).max(1.0);
            if r <= 2.0 * mass + margin {
                return Err(CwError::domain(format!(
                    "r = {r} at or inside the numerical horizon boundary {}",
                    2.0 * mass + margin
                )));
            }
            let s = theta.sin();
            if s.abs() < 1e-12 {
                return Err(CwError::domain(format!(
                    "theta = {theta} on the polar axis"
                )));
            }
        }
        Ok(())
    }

    fn raw_metric(&self, x: &ChartPoint) -> Result<Matrix4<f64>> {
        self.check_domain(x)?;
        match &self.kind {
            MetricKind::Schwarzschild { mass } => {
                let (r, theta) = (x.r(), x.theta());
                let f = 1.0 - 2.0 * mass / r;
                let s2 = theta.sin().powi(2);
                Ok(Matrix4::from_diagonal(&Vector4::new(
                    f,
                    -1.0 / f,
                    -r * r,
                    -r * r * s2,
                )))
            }
            MetricKind::UserDefined { components, .. } => Ok(components(x)),
        }
    }

    /// dg\[mu\] = d g_{alpha beta} / d x^mu.
    fn metric_derivatives(&self, x: &ChartPoint) -> Result<[Matrix4<f64>; 4]> {
        match (&self.kind, self.derivative_mode) {
            (MetricKind::Schwarzschild { mass }, DerivativeMode::Analytic) => {
                let (r, theta) = (x.r(), x.theta());
                self.check_domain(x)?;
                let f = 1.0 - 2.0 * mass / r;
                let df = 2.0 * mass / (r * r);
                let mut dr = Matrix4::zeros();
                dr[(0, 0)] = df;
                dr[(1, 1)] = df / (f * f);
                dr[(2, 2)] = -2.0 * r;
                dr[(3, 3)] = -2.0 * r * theta.sin().powi(2);
                let mut dth = Matrix4::zeros();
                dth[(3, 3)] = -r * r * 2.0 * theta.sin() * theta.cos();
                Ok([Matrix4::zeros(), dr, dth, Matrix4::zeros()])
            }
            (
                MetricKind::UserDefined {
                    derivatives: Some(d),
                    ..
                },
                DerivativeMode::Analytic,
            ) => Ok(d(x)),
            (_, mode) => {
                let scheme = match mode {
                    DerivativeMode::CentralDifference(s) => s,
                    DerivativeMode::Analytic => DiffScheme::default(),
                };
                let mut out = [Matrix4::zeros(); 4];
                for (mu, slot) in out.iter_mut().enumerate() {
                    let flat = scheme.derive_vec(
                        |c| {
                            let xp = x.with_coord(mu, c);
                            let g = self.raw_metric(&xp).unwrap_or_else(|_| Matrix4::zeros());
                            g.iter().copied().collect()
                        },
                        x.coords[mu],
                    );
                    *slot = Matrix4::from_column_slice(&flat);
                }
                Ok(out)
            }
        }
    }
}

/// Evaluate g, its inverse and determinant.
pub fn metric_at(field: &MetricField, x: &ChartPoint) -> Result<MetricValue> {
    MetricValue::from_matrix(field.raw_metric(x)?)
}

/// Christoffel symbols Gamma^alpha_{mu nu}; symmetric in the lower pair.
#[derive(Debug, Clone)]
pub struct Connection {
    pub gamma: [[[f64; DIM]; DIM]; DIM],
}

impl Connection {
    pub fn get(&self, alpha: usize, mu: usize, nu: usize) -> f64 {
        self.gamma[alpha][mu][nu]
    }

    /// nabla_u v for contravariant v given partial derivatives dv\[mu\]\[alpha\].
    pub fn covariant_directional(
        &self,
        u: &Vector4<f64>,
        v: &Vector4<f64>,
        dv: &[Vector4<f64>; 4],
    ) -> Vector4<f64> {
        let mut out = Vector4::zeros();
        for alpha in 0..DIM {
            let mut s = 0.0;
            for mu in 0..DIM {
                s += u[mu] * dv[mu][alpha];
                for lam in 0..DIM {
                    s += u[mu] * self.gamma[alpha][lam][mu] * v[lam];
                }
            }
            out[alpha] = s;
        }
        out
    }
}

/// Christoffel symbols from the metric and its first derivatives.
pub fn christoffel(field: &MetricField, x: &ChartPoint) -> Result<Connection> {
    let m = metric_at(field, x)?;
    let dg = field.metric_derivatives(x)?;
    let mut gamma = [[[0.0; DIM]; DIM]; DIM];
    for alpha in 0..DIM {
        for mu in 0..DIM {
            for nu in mu..DIM {
                let mut s = 0.0;
                for beta in 0..DIM {
                    s += m.g_inv[(alpha, beta)]
                        * (dg[mu][(beta, nu)] + dg[nu][(beta, mu)] - dg[beta][(mu, nu)]);
                }
                gamma[alpha][mu][nu] = 0.5 * s;
                gamma[alpha][nu][mu] = 0.5 * s;
            }
        }
    }
    Ok(Connection { gamma })
}

/// Riemann curvature. `components\[mu\]\[nu\]\[alpha\]\[beta\]` stores
/// R_{mu nu alpha}^{beta} built from the Christoffel symbols; the derivative
/// pair (mu, nu) comes first.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    pub components: Box<[[[[f64; DIM]; DIM]; DIM]; DIM]>,
    pub metric: MetricValue,
}

impl RiemannTensor {
    pub fn get(&self, mu: usize, nu: usize, alpha: usize, beta_up: usize) -> f64 {
        self.components[mu][nu][alpha][beta_up]
    }

    /// Lowered view: contract the last (upper) index with g.
    /// Note: with the storage order used here this equals minus the
    /// pair-symmetric lowered tensor R_{mu nu alpha beta}; consumers that
    /// need the pair-symmetric form must flip the sign.
    pub fn lowered(&self, mu: usize, nu: usize, alpha: usize, beta: usize) -> f64 {
        let mut s = 0.0;
        for lam in 0..DIM {
            s += self.components[mu][nu][alpha][lam] * self.metric.g[(lam, beta)];
        }
        s
    }

    /// Kretschmann scalar R_{mu nu alpha beta} R^{mu nu alpha beta}.
    pub fn kretschmann(&self) -> f64 {
        let gi = &self.metric.g_inv;
        let mut total = 0.0;
        for mu in 0..DIM {
            for nu in 0..DIM {
                for al in 0..DIM {
                    for be in 0..DIM {
                        let low = self.lowered(mu, nu, al, be);
                        if low == 0.0 {
                            continue;
                        }
                        let mut raised = 0.0;
                        for m2 in 0..DIM {
                            for n2 in 0..DIM {
                                for a2 in 0..DIM {
                                    for b2 in 0..DIM {
                                        let l2 = self.lowered(m2, n2, a2, b2);
                                        if l2 == 0.0 {
                                            continue;
                                        }
                                        raised += gi[(mu, m2)]
                                            * gi[(nu, n2)]
                                            * gi[(al, a2)]
                                            * gi[(be, b2)]
                                            * l2;
                                    }
                                }
                            }
                        }
                        total += low * raised;
                    }
                }
            }
        }
        total
    }

    /// Scale used to normalize identity residuals: the largest lowered
    /// component, floored at 1 so weak-field values stay absolute.
    fn component_scale(&self) -> f64 {
        let mut scale: f64 = 1.0;
        for mu in 0..DIM {
            for nu in 0..DIM {
                for al in 0..DIM {
                    for be in 0..DIM {
                        scale = scale.max(self.lowered(mu, nu, al, be).abs());
                    }
                }
            }
        }
        scale
    }

    /// Largest first-Bianchi residual max |R_{[mu nu alpha] beta}| relative
    /// to the component scale.
    pub fn bianchi_residual(&self) -> f64 {
        let scale = self.component_scale();
        let mut worst: f64 = 0.0;
        for mu in 0..DIM {
            for nu in 0..DIM {
                for al in 0..DIM {
                    for be in 0..DIM {
                        let c = self.lowered(mu, nu, al, be)
                            + self.lowered(nu, al, mu, be)
                            + self.lowered(al, mu, nu, be);
                        worst = worst.max((c / 3.0).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Largest antisymmetry residual over both index pairs of the lowered
    /// form, relative to the component scale.
    pub fn antisymmetry_residual(&self) -> f64 {
        let scale = self.component_scale();
        let mut worst: f64 = 0.0;
        for mu in 0..DIM {
            for nu in 0..DIM {
                for al in 0..DIM {
                    for be in 0..DIM {
                        let v = self.lowered(mu, nu, al, be);
                        worst = worst.max((v + self.lowered(nu, mu, al, be)).abs());
                        worst = worst.max((v + self.lowered(mu, nu, be, al)).abs());
                    }
                }
            }
        }
        worst / scale
    }
}

/// Riemann tensor by central differencing of the Christoffel symbols.
/// The connection derivatives use one Richardson refinement; the plain
/// second-order stencil leaves O(1e-10) truncation in the curvature
/// identities at moderate radii.
pub fn riemann(field: &MetricField, x: &ChartPoint) -> Result<RiemannTensor> {
    let scheme = DiffScheme::default();
    let gam = christoffel(field, x)?;
    // dgam[mu][beta][nu][alpha] = d Gamma^beta_{nu alpha} / d x^mu
    let mut dgam = vec![[[[0.0; DIM]; DIM]; DIM]; DIM];
    for mu in 0..DIM {
        let h = scheme.step(x.coords[mu]);
        let diff = |hh: f64| -> Result<[[[f64; DIM]; DIM]; DIM]> {
            let gp = christoffel(field, &x.with_coord(mu, x.coords[mu] + hh))?;
            let gm = christoffel(field, &x.with_coord(mu, x.coords[mu] - hh))?;
            let mut d = [[[0.0; DIM]; DIM]; DIM];
            for b in 0..DIM {
                for n in 0..DIM {
                    for a in 0..DIM {
                        d[b][n][a] = (gp.gamma[b][n][a] - gm.gamma[b][n][a]) / (2.0 * hh);
                    }
                }
            }
            Ok(d)
        };
        let coarse = diff(h)?;
        let fine = diff(h / 2.0)?;
        for b in 0..DIM {
            for n in 0..DIM {
                for a in 0..DIM {
                    dgam[mu][b][n][a] = (4.0 * fine[b][n][a] - coarse[b][n][a]) / 3.0;
                }
            }
        }
    }
    let mut comp = Box::new([[[[0.0; DIM]; DIM]; DIM]; DIM]);
    for mu in 0..DIM {
        for nu in 0..DIM {
            for al in 0..DIM {
                for be in 0..DIM {
                    let mut s = dgam[mu][be][nu][al] - dgam[nu][be][mu][al];
                    for lam in 0..DIM {
                        s += gam.gamma[be][mu][lam] * gam.gamma[lam][nu][al]
                            - gam.gamma[be][nu][lam] * gam.gamma[lam][mu][al];
                    }
                    comp[mu][nu][al][be] = s;
                }
            }
        }
    }
    Ok(RiemannTensor {
        components: comp,
        metric: metric_at(field, x)?,
    })
}

/// max |nabla_mu g_{alpha beta}| assembled from a Connection; a compatibility
/// diagnostic used by the invariant suite.
pub fn metric_compatibility_residual(field: &MetricField, x: &ChartPoint) -> Result<f64> {
    let gam = christoffel(field, x)?;
    let dg = field.metric_derivatives(x)?;
    let m = metric_at(field, x)?;
    let mut worst: f64 = 0.0;
    for mu in 0..DIM {
        for al in 0..DIM {
            for be in 0..DIM {
                let mut v = dg[mu][(al, be)];
                for lam in 0..DIM {
                    v -= gam.gamma[lam][al][mu] * m.g[(lam, be)]
                        + gam.gamma[lam][be][mu] * m.g[(al, lam)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn schwarzschild_metric_components() {
        let field = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.0, 10.0, 0.0);
        let m = metric_at(&field, &x).unwrap();
        assert!((m.g[(0, 0)] - 0.8).abs() < 1e-15);
        assert!((m.g[(1, 1)] + 1.25).abs() < 1e-15);
        assert!((m.g[(2, 2)] + 100.0).abs() < 1e-12);
        assert!((m.g[(3, 3)] + 100.0).abs() < 1e-12);
        assert!(m.det_g < 0.0);
        let id = m.g * m.g_inv;
        assert!((id - Matrix4::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn flat_limit_is_spherical_minkowski() {
        let field = MetricField::flat();
        let x = ChartPoint::new(1.0, 3.0, 1.1, 2.2);
        let m = metric_at(&field, &x).unwrap();
        assert!((m.g[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((m.g[(1, 1)] + 1.0).abs() < 1e-15);
        assert!((m.g[(2, 2)] + 9.0).abs() < 1e-15);
        assert!((m.g[(3, 3)] + 9.0 * 1.1f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn horizon_and_axis_are_rejected() {
        let field = MetricField::schwarzschild(1.0).unwrap();
        assert!(matches!(
            metric_at(&field, &ChartPoint::equatorial(0.0, 2.000001, 0.0)),
            Err(CwError::Domain(_))
        ));
        assert!(metric_at(&field, &ChartPoint::new(0.0, 10.0, 0.0, 0.0)).is_err());
        assert!(metric_at(&field, &ChartPoint::new(0.0, 10.0, PI, 0.0)).is_err());
    }

    #[test]
    fn christoffel_closed_forms() {
        let field = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.0, 10.0, 0.0);
        let c = christoffel(&field, &x).unwrap();
        // Gamma^r_tt = M(r-2M)/r^3, Gamma^t_tr = M/(r(r-2M)), Gamma^r_phiphi = -(r-2M)
        assert!((c.get(1, 0, 0) - 0.008).abs() < 1e-12);
        assert!((c.get(0, 0, 1) - 0.0125).abs() < 1e-12);
        assert!((c.get(1, 3, 3) + 8.0).abs() < 1e-10);
        let x6 = ChartPoint::equatorial(0.0, 6.0, 0.0);
        let c6 = christoffel(&field, &x6).unwrap();
        assert!((c6.get(1, 0, 0) - 4.0 / 216.0).abs() < 1e-12);
    }

    #[test]
    fn christoffel_lower_pair_symmetry_and_fd_agreement() {
        let analytic = MetricField::schwarzschild(1.0).unwrap();
        let fd = MetricField::schwarzschild(1.0)
            .unwrap()
            .with_derivative_mode(DerivativeMode::CentralDifference(DiffScheme::default()));
        let mut rng_r;
        for k in 0..100 {
            rng_r = 3.0 + 47.0 * ((k as f64) * 0.618).fract();
            let x = ChartPoint::new(0.3, rng_r, FRAC_PI_2 + 0.4 * ((k as f64) * 0.23).sin(), 1.0);
            let ca = christoffel(&analytic, &x).unwrap();
            let cf = christoffel(&fd, &x).unwrap();
            for a in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        assert!(
                            (ca.gamma[a][m][n] - ca.gamma[a][n][m]).abs() < 1e-14,
                            "lower-pair symmetry"
                        );
                        let scale = ca.gamma[a][m][n].abs().max(1.0);
                        assert!(
                            (ca.gamma[a][m][n] - cf.gamma[a][m][n]).abs() / scale < 1e-7,
                            "analytic vs FD at r={rng_r}: {} vs {}",
                            ca.gamma[a][m][n],
                            cf.gamma[a][m][n]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_flat_vanishes() {
        let field = MetricField::flat();
        let x = ChartPoint::new(0.0, 7.0, 1.2, 0.4);
        let r = riemann(&field, &x).unwrap();
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        worst = worst.max(r.get(mu, nu, a, b).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-10, "flat curvature {worst:e}");
    }

    #[test]
    fn kretschmann_matches_known_invariant() {
        let field = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.0, 6.0, 0.0);
        let r = riemann(&field, &x).unwrap();
        let k = r.kretschmann();
        let expect = 48.0 / 46656.0;
        assert!(
            (k - expect).abs() / expect < 1e-7,
            "kretschmann {k} vs {expect}"
        );
    }

    #[test]
    fn riemann_identities() {
        let field = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.2, 8.0, 0.9);
        let r = riemann(&field, &x).unwrap();
        assert!(r.bianchi_residual() < 1e-9);
        assert!(r.antisymmetry_residual() < 1e-9);
    }

    #[test]
    fn metric_compatibility() {
        let field = MetricField::schwarzschild(1.0).unwrap();
        for k in 0..10 {
            let r = 3.0 + 40.0 * ((k as f64) * 0.37).fract();
            let x = ChartPoint::equatorial(0.0, r, 0.5);
            let res = metric_compatibility_residual(&field, &x).unwrap();
            assert!(res < 1e-8, "compatibility residual {res:e} at r={r}");
        }
    }

    #[test]
    fn wrong_signature_rejected() {
        let user = MetricField::user_defined(
            |_x: &ChartPoint| Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0)),
            None,
        );
        assert!(metric_at(&user, &ChartPoint::equatorial(0.0, 5.0, 0.0)).is_err());
    }

    #[test]
    fn user_defined_metric_roundtrip() {
        // Register Schwarzschild M=1 as a user metric with FD derivatives.
        let user = MetricField::user_defined(
            |x: &ChartPoint| {
                let f = 1.0 - 2.0 / x.r();
                Matrix4::from_diagonal(&Vector4::new(
                    f,
                    -1.0 / f,
                    -x.r() * x.r(),
                    -x.r() * x.r() * x.theta().sin().powi(2),
                ))
            },
            None,
        );
        let builtin = MetricField::schwarzschild(1.0).unwrap();
        let x = ChartPoint::equatorial(0.0, 12.0, 0.3);
        let cu = christoffel(&user, &x).unwrap();
        let cb = christoffel(&builtin, &x).unwrap();
        for a in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    assert!((cu.gamma[a][m][n] - cb.gamma[a][m][n]).abs() < 1e-7);
                }
            }
        }
    }
}
