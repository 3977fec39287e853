//! Schwarzschild orbital mechanics: conserved quantities, effective
//! potential, circular-orbit constants, radial infall, general geodesic
//! integration and the action phase of circular orbits.

use nalgebra::Vector4;

use crate::error::{CwError, Result};
use crate::geometry::{christoffel, metric_at, ChartPoint, MetricField};
use crate::ode::{integrate_sampled, OdeOptions};

/// Conserved quantities of a circular orbit of radius R.
#[derive(Debug, Clone, Copy)]
pub struct OrbitConstants {
    pub mass: f64,
    pub radius: f64,
    /// Energy per unit rest mass.
    pub e: f64,
    /// Angular momentum per unit rest mass.
    pub l: f64,
    /// Coordinate angular velocity Omega = sqrt(M/R^3).
    pub omega: f64,
    /// Omega' = Omega sqrt(1 - 3M/R), the proper rotation rate whose radial
    /// derivative vanishes on the orbit.
    pub omega_prime: f64,
}

impl OrbitConstants {
    /// Omega'(r) with Omega held fixed at the orbit value; its r-derivative
    /// vanishes at r = R.
    pub fn omega_prime_at(&self, r: f64) -> f64 {
        let arg = 1.0 - 2.0 * self.mass / r - r * r * self.omega * self.omega;
        self.omega * arg.sqrt()
    }

    /// Contravariant four-velocity (u^t, 0, 0, u^phi) of the circular orbit.
    pub fn four_velocity(&self) -> Vector4<f64> {
        Vector4::new(
            self.omega / self.omega_prime,
            0.0,
            0.0,
            self.omega * self.omega / self.omega_prime,
        )
    }

    /// Coordinate period of one revolution.
    pub fn coordinate_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    /// Proper time elapsed per orbit.
    pub fn proper_period(&self) -> f64 {
        self.coordinate_period() * self.omega_prime / self.omega
    }
}

pub fn check_above_photon_sphere(mass: f64, radius: f64) -> Result<()> {
    if radius <= 3.0 * mass {
        return Err(CwError::PhotonSphere {
            radius,
            limit: 3.0 * mass,
        });
    }
    Ok(())
}

/// Constants of motion for a circular geodesic at r = R.
pub fn circular_orbit_constants(mass: f64, radius: f64) -> Result<OrbitConstants> {
    if mass <= 0.0 {
        return Err(CwError::domain("mass must be positive for a bound orbit"));
    }
    check_above_photon_sphere(mass, radius)?;
    let k = 1.0 - 3.0 * mass / radius;
    let omega = (mass / radius.powi(3)).sqrt();
    Ok(OrbitConstants {
        mass,
        radius,
        e: (1.0 - 2.0 * mass / radius) / k.sqrt(),
        l: (mass * radius).sqrt() / k.sqrt(),
        omega,
        omega_prime: omega * k.sqrt(),
    })
}

/// Effective potential V_eff(r) for angular momentum l (per unit rest mass).
pub fn effective_potential(mass: f64, l: f64, r: f64) -> f64 {
    -mass / r + l * l / (2.0 * r * r) - mass * l * l / r.powi(3)
}

/// Radii of the potential extrema plus the ISCO radius.
#[derive(Debug, Clone, Copy)]
pub struct PotentialExtrema {
    /// Stable circular orbit (outer root).
    pub stable: f64,
    /// Unstable circular orbit (inner root).
    pub unstable: f64,
    pub isco: f64,
}

/// Locations of the circular-orbit extrema of V_eff.
pub fn potential_extrema(mass: f64, l: f64) -> Result<PotentialExtrema> {
    if mass <= 0.0 || l <= 0.0 {
        return Err(CwError::domain(
            "mass and angular momentum must be positive",
        ));
    }
    let lm2 = (l / mass).powi(2);
    // the discriminant is known only to rounding; snap the degenerate case
    let disc = if (lm2 - 12.0).abs() <= 1e-10 * 12.0 {
        0.0
    } else if lm2 < 12.0 {
        return Err(CwError::NoCircularOrbit { l_over_m_sq: lm2 });
    } else {
        (1.0 - 12.0 / lm2).sqrt()
    };
    let base = mass / 2.0 * lm2;
    Ok(PotentialExtrema {
        stable: base * (1.0 + disc),
        unstable: base * (1.0 - disc),
        isco: 6.0 * mass,
    })
}

/// Four-velocity of a particle dropped from rest at spatial infinity
/// (e = 1, l = 0), moving radially inward.
pub fn radial_infall_velocity(mass: f64, r: f64) -> Result<Vector4<f64>> {
    if r <= 2.0 * mass {
        return Err(CwError::domain(format!(
            "r = {r} inside or on the horizon 2M = {}",
            2.0 * mass
        )));
    }
    Ok(Vector4::new(
        1.0 / (1.0 - 2.0 * mass / r),
        -(2.0 * mass / r).sqrt(),
        0.0,
        0.0,
    ))
}

/// Position and four-velocity on a worldline, tagged with proper time.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicState {
    pub x: ChartPoint,
    pub u: Vector4<f64>,
    pub tau: f64,
}

impl GeodesicState {
    pub fn new(x: ChartPoint, u: Vector4<f64>) -> Self {
        GeodesicState { x, u, tau: 0.0 }
    }

    /// u.u in the given metric; 1 for massive particles.
    pub fn norm_sq(&self, field: &MetricField) -> Result<f64> {
        let m = metric_at(field, &self.x)?;
        Ok(m.inner(&self.u, &self.u))
    }
}

/// Killing-vector charges (e, l) evaluated from an arbitrary state.
pub fn killing_charges(field: &MetricField, s: &GeodesicState) -> Result<(f64, f64)> {
    let m = metric_at(field, &s.x)?;
    let u_low = m.lower(&s.u);
    Ok((u_low[0], -u_low[3]))
}

/// Integrate the geodesic equation, sampling at the given proper times.
pub fn integrate_geodesic(
    field: &MetricField,
    init: &GeodesicState,
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<GeodesicState>> {
    let rhs = |_tau: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let x = ChartPoint::new(y[0], y[1], y[2], y[3]);
        let gam = christoffel(field, &x)?;
        let u = Vector4::new(y[4], y[5], y[6], y[7]);
        dy[..4].copy_from_slice(&[u[0], u[1], u[2], u[3]]);
        for alpha in 0..4 {
            let mut acc = 0.0;
            for lam in 0..4 {
                for beta in 0..4 {
                    acc -= gam.gamma[alpha][lam][beta] * u[lam] * u[beta];
                }
            }
            dy[4 + alpha] = acc;
        }
        Ok(())
    };
    let y0 = [
        init.x.t(),
        init.x.r(),
        init.x.theta(),
        init.x.phi(),
        init.u[0],
        init.u[1],
        init.u[2],
        init.u[3],
    ];
    let rows = integrate_sampled(rhs, init.tau, &y0, samples, opts)?;
    Ok(rows
        .iter()
        .zip(samples)
        .map(|(y, &tau)| GeodesicState {
            x: ChartPoint::new(y[0], y[1], y[2], y[3]),
            u: Vector4::new(y[4], y[5], y[6], y[7]),
            tau,
        })
        .collect())
}

/// Action phase S = -(e t + l phi) of a circular orbit.
pub fn action_phase(constants: &OrbitConstants, x: &ChartPoint) -> f64 {
    -(constants.e * x.t() + constants.l * x.phi())
}
