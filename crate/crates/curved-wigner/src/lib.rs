//! Numerical toolkit for local Wigner rotations and first-order
//! spin-curvature corrections to particle motion in curved spacetime,
//! specialized to Schwarzschild circular and radial-infall orbits where
//! closed-form cross-checks exist.
//!
//! Module map:
//! - [`geometry`]: metric evaluation, Christoffel symbols, Riemann curvature;
//! - [`frames`]: orthonormal tetrads, spin connection, parallel and
//!   Fermi-Walker transport, geodetic precession;
//! - [`geodesics`]: Schwarzschild orbital mechanics and the action phase;
//! - [`wigner`]: standard boosts, exact and infinitesimal little-group
//!   elements, spin-1/2 steps, time-ordered accumulation;
//! - [`dirac_wkb`]: spinor connection and the first-order velocity and
//!   acceleration corrections, with closed-form circular/radial oracles;
//! - [`entanglement`]: anti-correlated spin pairs, pair rotation rates,
//!   fidelity and concurrence;
//! - [`scenarios`] and [`cli_app`]: end-to-end drivers, the invariant
//!   suite and the command-line front end.
//!
//! Conventions: geometric units G = c = 1 (masses are lengths), metric
//! signature (+,-,-,-), coordinates (t, r, theta, phi). First-order
//! corrections are reported per unit of the dimensionless strength eps.

// tensor contractions read best as explicit index loops, and frozen oracle
// constants carry their full 17 digits on purpose
#![allow(clippy::needless_range_loop)]
#![allow(clippy::excessive_precision)]

pub mod cli_app;
pub mod diff;
pub mod dirac_wkb;
pub mod entanglement;
pub mod error;
pub mod frames;
pub mod geodesics;
pub mod geometry;
pub mod ode;
pub mod scenarios;
pub mod wigner;
