//! Anti-correlated spin pairs on neighboring orbits: per-particle first-order
//! corrections, pair rotation rates including the radial-offset expansion,
//! the pair state transformation, and fidelity/concurrence measures.

use nalgebra::{Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::diff::DiffScheme;
use crate::dirac_wkb::{velocity_correction, RestSpinor};
use crate::error::{CwError, Result};
use crate::frames::{
    analytic_tetrad, chi_matrix, tetrad_covariant_derivatives, AnalyticFrameField, TetradField,
    TetradKind,
};
use crate::geodesics::{check_above_photon_sphere, radial_infall_velocity};
use crate::geometry::{metric_at, ChartPoint};
use crate::wigner::{spin_half_exact, LocalMomentum, C64};

/// Two-spin state c1 |up,down> + c2 |down,up| with anti-correlated momenta.
#[derive(Debug, Clone)]
pub struct BipartiteSpinState {
    pub theta_mix: f64,
    pub phi_rel: f64,
    /// Amplitudes on the {|up,down>, |down,up>} basis.
    pub amps: Vector2<C64>,
    /// Local momenta the two spin labels ride on.
    pub momentum_labels: [LocalMomentum; 2],
}

impl BipartiteSpinState {
    /// cos(Theta/2) |up,down> + e^{i Phi} sin(Theta/2) |down,up>.
    pub fn new(theta_mix: f64, phi_rel: f64) -> Self {
        BipartiteSpinState {
            theta_mix,
            phi_rel,
            amps: Vector2::new(
                Complex64::new((theta_mix / 2.0).cos(), 0.0),
                Complex64::from_polar((theta_mix / 2.0).sin(), phi_rel),
            ),
            momentum_labels: [LocalMomentum::at_rest(1.0), LocalMomentum::at_rest(1.0)],
        }
    }

    /// The singlet-type state (Theta = pi/2, Phi = pi), amplitudes
    /// (1, -1)/sqrt(2). The anti-symmetric combination; the symmetric
    /// (triplet-type, m = 0) partner sits at Phi = 0.
    pub fn singlet() -> Self {
        BipartiteSpinState::new(std::f64::consts::FRAC_PI_2, std::f64::consts::PI)
    }

    pub fn with_momenta(mut self, labels: [LocalMomentum; 2]) -> Self {
        self.momentum_labels = labels;
        self
    }

    pub fn norm(&self) -> f64 {
        (self.amps[0].norm_sqr() + self.amps[1].norm_sqr()).sqrt()
    }

    /// Inner product <self|other> on the two-dimensional anti-correlated basis.
    pub fn inner(&self, other: &BipartiteSpinState) -> C64 {
        self.amps[0].conj() * other.amps[0] + self.amps[1].conj() * other.amps[1]
    }

    /// Embed into the full two-qubit basis {|00>,|01>,|10>,|11>} with
    /// up = 0, down = 1.
    pub fn full_state(&self) -> Vector4<C64> {
        Vector4::new(
            Complex64::new(0.0, 0.0),
            self.amps[0],
            self.amps[1],
            Complex64::new(0.0, 0.0),
        )
    }

    /// Pure-state density matrix on the full two-qubit basis.
    pub fn density(&self) -> Matrix4<C64> {
        let psi = self.full_state();
        psi * psi.adjoint()
    }
}

/// |<a|b>|^2 for normalized pure states.
pub fn fidelity(a: &BipartiteSpinState, b: &BipartiteSpinState) -> f64 {
    a.inner(b).norm_sqr() / (a.norm() * b.norm()).powi(2)
}

/// Wootters concurrence of a two-qubit density matrix via the spin-flip
/// construction.
pub fn concurrence_density(rho: &Matrix4<C64>) -> Result<f64> {
    // validity: Hermitian, unit trace, positive semidefinite
    let herm = (rho - rho.adjoint()).norm();
    if herm > 1e-8 {
        return Err(CwError::NotAState(format!("non-Hermitian by {herm:e}")));
    }
    let tr = (rho[(0, 0)] + rho[(1, 1)] + rho[(2, 2)] + rho[(3, 3)]).re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(CwError::NotAState(format!("trace {tr} != 1")));
    }
    let eig_rho = rho.symmetric_eigenvalues();
    if eig_rho.iter().any(|l| *l < -1e-8) {
        return Err(CwError::NotAState("negative eigenvalue".into()));
    }
    // sigma_y (x) sigma_y on the computational basis
    let mut yy = Matrix4::<C64>::zeros();
    yy[(0, 3)] = Complex64::new(-1.0, 0.0);
    yy[(1, 2)] = Complex64::new(1.0, 0.0);
    yy[(2, 1)] = Complex64::new(1.0, 0.0);
    yy[(3, 0)] = Complex64::new(-1.0, 0.0);
    let rho_tilde = yy * rho.map(|z| z.conj()) * yy;
    let m = rho * rho_tilde;
    let eig = nalgebra::linalg::Schur::new(m)
        .eigenvalues()
        .ok_or_else(|| CwError::NotAState("eigenvalue extraction failed".into()))?;
    // rank-deficient products carry O(sqrt(machine eps)) junk in their null
    // eigenvalues; clamp before the square root
    let peak = eig.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
    let mut lams: Vec<f64> = eig
        .iter()
        .map(|z| {
            if z.re < 1e-12 * peak.max(1e-30) {
                0.0
            } else {
                z.re.sqrt()
            }
        })
        .collect();
    lams.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lams[0] - lams[1] - lams[2] - lams[3]).max(0.0))
}

/// Concurrence of a pure pair state.
pub fn concurrence(state: &BipartiteSpinState) -> Result<f64> {
    concurrence_density(&state.density())
}

/// Per-particle covariant velocity corrections (per unit eps) for the pair on
/// orbits R +/- deltaR; the anti-correlation gives the two particles opposite
/// signs scaled by cos(Theta).
pub fn pair_corrections(
    state: &BipartiteSpinState,
    mass: f64,
    radius: f64,
    delta_r: f64,
    m_particle: f64,
) -> Result<[Vector4<f64>; 2]> {
    check_above_photon_sphere(mass, radius - delta_r)?;
    let cos_theta = state.theta_mix.cos();
    let mut out = [Vector4::zeros(); 2];
    for (k, sign) in [(0usize, 1.0f64), (1, -1.0)] {
        let r = radius + sign * delta_r;
        let field = AnalyticFrameField::new(TetradKind::CircularFreeFall { mass, radius: r })?;
        let x = ChartPoint::equatorial(0.0, r, 0.0);
        let dv_up = velocity_correction(&field, &RestSpinor::up(), &x, m_particle)?;
        out[k] = dv_up * (sign * cos_theta);
    }
    Ok(out)
}

/// Rotation-rate pair (theta, Delta theta): the two particles see
/// theta(x+-) = +/- theta + deltaR * Dtheta, with theta = cos(Theta) chi_up.
#[derive(Debug, Clone, Copy)]
pub struct PairRotationRates {
    /// Leading rate theta(x) = cos(Theta) chi_up(R), per unit eps.
    pub theta: f64,
    /// Common-mode offset Delta theta = deltaR * d(chi_31)/dr, per unit eps.
    pub delta_theta: f64,
}

/// chi^3_1 of the spin-up pipeline on the circular orbit of radius r,
/// evaluated with the orbit's own free-fall frame.
fn chi_31_spin_up(mass: f64, r: f64, m_particle: f64) -> Result<f64> {
    let field = AnalyticFrameField::new(TetradKind::CircularFreeFall { mass, radius: r })?;
    let x = ChartPoint::equatorial(0.0, r, 0.0);
    let m = metric_at(field.metric(), &x)?;
    let dv = velocity_correction(&field, &RestSpinor::up(), &x, m_particle)?;
    let dv_up = m.raise(&dv);
    let chi = chi_matrix(&dv_up, &field, &x)?;
    Ok(chi.chi[(3, 1)])
}

/// Pair rotation rates with the radial-offset term from the three-term
/// product-rule expansion, r-derivatives by central differences.
pub fn pair_wigner_angles(
    state: &BipartiteSpinState,
    mass: f64,
    radius: f64,
    delta_r: f64,
    m_particle: f64,
) -> Result<PairRotationRates> {
    check_above_photon_sphere(mass, radius - delta_r)?;
    let cos_theta = state.theta_mix.cos();

    let chi_up =
        crate::dirac_wkb::circular_corrections(mass, radius, m_particle, 0.0, 0.0, 0.0)?.chi_up;

    // three r-dependent factors of chi^i_j = -(e^{-1T}) dv^beta (nabla_beta e),
    // each with its own-orbit field at radius r
    let scheme = DiffScheme::default();
    let einv_t = |r: f64| -> Result<Matrix4<f64>> {
        analytic_tetrad(
            TetradKind::CircularFreeFall { mass, radius: r },
            &ChartPoint::equatorial(0.0, r, 0.0),
        )?
        .inverse_transpose()
    };
    let dv_up_field = |r: f64| -> Result<Vector4<f64>> {
        let field = AnalyticFrameField::new(TetradKind::CircularFreeFall { mass, radius: r })?;
        let xr = ChartPoint::equatorial(0.0, r, 0.0);
        let m = metric_at(field.metric(), &xr)?;
        Ok(m.raise(&velocity_correction(
            &field,
            &RestSpinor::up(),
            &xr,
            m_particle,
        )?))
    };
    let nabla_e = |r: f64| -> Result<[Matrix4<f64>; 4]> {
        let field = AnalyticFrameField::new(TetradKind::CircularFreeFall { mass, radius: r })?;
        tetrad_covariant_derivatives(&field, &ChartPoint::equatorial(0.0, r, 0.0))
    };

    let h = scheme.step(radius);
    let d_einv = (einv_t(radius + h)? - einv_t(radius - h)?) / (2.0 * h);
    let d_dv = (dv_up_field(radius + h)? - dv_up_field(radius - h)?) / (2.0 * h);
    let (np, nm) = (nabla_e(radius + h)?, nabla_e(radius - h)?);
    let mut d_nabla = [Matrix4::zeros(); 4];
    for beta in 0..4 {
        d_nabla[beta] = (np[beta] - nm[beta]) / (2.0 * h);
    }

    let e0 = einv_t(radius)?;
    let v0 = dv_up_field(radius)?;
    let n0 = nabla_e(radius)?;
    let contract =
        |einv: &Matrix4<f64>, dv: &Vector4<f64>, nab: &[Matrix4<f64>; 4], i: usize, j: usize| {
            let mut s = 0.0;
            for beta in 0..4 {
                if dv[beta] == 0.0 {
                    continue;
                }
                for mu in 0..4 {
                    s -= einv[(i, mu)] * dv[beta] * nab[beta][(j, mu)];
                }
            }
            s
        };
    let d_chi_31 = contract(&d_einv, &v0, &n0, 3, 1)
        + contract(&e0, &d_dv, &n0, 3, 1)
        + contract(&e0, &v0, &d_nabla, 3, 1);

    Ok(PairRotationRates {
        theta: cos_theta * chi_up,
        delta_theta: delta_r * cos_theta * d_chi_31,
    })
}

/// Exact two-orbit evaluation of the pair rates: chi_31 on each orbit
/// R +/- deltaR. Used to validate the expansion.
pub fn pair_rates_exact(
    state: &BipartiteSpinState,
    mass: f64,
    radius: f64,
    delta_r: f64,
    m_particle: f64,
) -> Result<(f64, f64)> {
    let cos_theta = state.theta_mix.cos();
    let plus = cos_theta * chi_31_spin_up(mass, radius + delta_r, m_particle)?;
    let minus = -cos_theta * chi_31_spin_up(mass, radius - delta_r, m_particle)?;
    // theta(x+) = +theta + D, theta(x-) = -theta + D
    Ok(((plus - minus) / 2.0, (plus + minus) / 2.0))
}

/// Apply the diagonal pair transformation over a finite proper time: the
/// amplitudes acquire e^{-/+ i theta tau}; the common-mode Delta theta cancels
/// identically in the relative phase.
pub fn transform_pair(
    state: &BipartiteSpinState,
    rates: &PairRotationRates,
    tau: f64,
) -> BipartiteSpinState {
    let d_plus = spin_half_exact(0.0, rates.theta + rates.delta_theta, 0.0, tau);
    let d_minus = spin_half_exact(0.0, -rates.theta + rates.delta_theta, 0.0, tau);
    // |up,down> picks D1_uu D2_dd; |down,up> picks D1_dd D2_uu
    let phase_ud = d_plus.d[(0, 0)] * d_minus.d[(1, 1)];
    let phase_du = d_plus.d[(1, 1)] * d_minus.d[(0, 0)];
    let mut out = state.clone();
    out.amps[0] *= phase_ud;
    out.amps[1] *= phase_du;
    out
}

/// Numbers reported by the radial-infall pair scenario.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RadialEprReport {
    pub mass: f64,
    pub r: f64,
    pub eps: f64,
    /// Azimuthal frame momentum p^3 picked up by the spin-up and spin-down
    /// components (per the tetrad-embedded deflection).
    pub deflected_momentum_up: f64,
    pub deflected_momentum_down: f64,
    /// The two orientation-specific corrected frames, row-major entries.
    pub corrected_tetrad_up: [[f64; 4]; 4],
    pub corrected_tetrad_down: [[f64; 4]; 4],
    /// Rotation rates seen against the matched, spin-corrected frames.
    pub matched_rate_up: f64,
    pub matched_rate_down: f64,
    /// Singlet fidelity after one step in the matched frames.
    pub matched_fidelity: f64,
    /// Rotation rate of the spin-up component against the shared uncorrected
    /// free-fall frame.
    pub mismatched_rate: f64,
    /// Triplet admixture amplitude after one step in the shared frame.
    pub triplet_admixture: f64,
    /// Admixture recomputed at eps/2; the ratio tests linear scaling.
    pub triplet_admixture_half_eps: f64,
    pub proper_time_step: f64,
}

fn radial_component_rate(
    mass: f64,
    r: f64,
    eps: f64,
    zeta: f64,
    frame: &dyn TetradField,
) -> Result<f64> {
    // deflection family embedded in the corrected tetrads: dv^phi = -cos(zeta) eps/(4 M r^2)
    let x = ChartPoint::equatorial(0.0, r, 0.0);
    let u = radial_infall_velocity(mass, r)?;
    let mut v = u;
    v[3] += -zeta.cos() * eps / (4.0 * mass * r * r);
    let chi = chi_matrix(&v, frame, &x)?;
    Ok(chi.chi[(3, 1)])
}

/// Radially infalling singlet: deflections, matched-frame invariance and the
/// triplet admixture seen from a single shared free-fall frame.
pub fn radial_epr_report(mass: f64, r: f64, eps: f64) -> Result<RadialEprReport> {
    if mass <= 0.0 {
        return Err(CwError::domain("mass must be positive"));
    }
    let tau_step = 1.0;
    let x = ChartPoint::equatorial(0.0, r, 0.0);

    // deflected momenta: p^3 = m (e^{-1T})^3_phi dv^phi = -+ m eps/(4 M r)
    let tet = analytic_tetrad(TetradKind::RadialFreeFall { mass }, &x)?;
    let einv_t = tet.inverse_transpose()?;
    let dv_phi = eps / (4.0 * mass * r * r);
    let p_up = -einv_t[(3, 3)] * dv_phi;
    let p_down = einv_t[(3, 3)] * dv_phi;

    // matched frames: each component measured in its own corrected frame
    let field_up = AnalyticFrameField::new(TetradKind::CorrectedRadial {
        mass,
        zeta: 0.0,
        phi: 0.0,
        eps,
    })?;
    let field_down = AnalyticFrameField::new(TetradKind::CorrectedRadial {
        mass,
        zeta: std::f64::consts::PI,
        phi: 0.0,
        eps,
    })?;
    let rate_up = radial_component_rate(mass, r, eps, 0.0, &field_up)?;
    let rate_down = radial_component_rate(mass, r, eps, std::f64::consts::PI, &field_down)?;
    let tet_entries = |field: &AnalyticFrameField| -> Result<[[f64; 4]; 4]> {
        let e = field.tetrad(&x)?.e;
        let mut out = [[0.0; 4]; 4];
        for a in 0..4 {
            for mu in 0..4 {
                out[a][mu] = e[(a, mu)];
            }
        }
        Ok(out)
    };
    let corrected_tetrad_up = tet_entries(&field_up)?;
    let corrected_tetrad_down = tet_entries(&field_down)?;
    // the spin labels ride on the deflected momenta
    let singlet = BipartiteSpinState::singlet().with_momenta([
        LocalMomentum::from_spatial(1.0, [0.0, 0.0, p_up])?,
        LocalMomentum::from_spatial(1.0, [0.0, 0.0, p_down])?,
    ]);
    let matched = transform_pair(
        &singlet,
        &PairRotationRates {
            theta: (rate_up - rate_down) / 2.0,
            delta_theta: (rate_up + rate_down) / 2.0,
        },
        tau_step,
    );
    let matched_fidelity = fidelity(&singlet, &matched);

    // shared uncorrected frame: the components rotate oppositely at O(eps)
    let shared = AnalyticFrameField::new(TetradKind::RadialFreeFall { mass })?;
    let mis_rate = |e: f64| -> Result<f64> { radial_component_rate(mass, r, e, 0.0, &shared) };
    let admixture = |e: f64| -> Result<f64> {
        let rate = mis_rate(e)?;
        let rotated = transform_pair(
            &singlet,
            &PairRotationRates {
                theta: rate,
                delta_theta: 0.0,
            },
            tau_step,
        );
        // overlap with the symmetric (triplet) partner
        let triplet = BipartiteSpinState::new(std::f64::consts::FRAC_PI_2, 0.0);
        Ok((triplet.inner(&rotated) / Complex64::new(rotated.norm(), 0.0)).norm())
    };
    let mismatched_rate = mis_rate(eps)?;

    Ok(RadialEprReport {
        mass,
        r,
        eps,
        deflected_momentum_up: p_up,
        deflected_momentum_down: p_down,
        corrected_tetrad_up,
        corrected_tetrad_down,
        matched_rate_up: rate_up,
        matched_rate_down: rate_down,
        matched_fidelity,
        mismatched_rate,
        triplet_admixture: admixture(eps)?,
        triplet_admixture_half_eps: admixture(eps / 2.0)?,
        proper_time_step: tau_step,
    })
}
