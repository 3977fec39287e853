//! Scenario configuration, execution, result persistence and parameter
//! sweeps behind the command-line front end.
//!
//! Configs are single JSON documents; all physical inputs are in geometric
//! units. CSV bodies are deterministic: 17 significant digits, '.' decimal,
//! rows in index order regardless of evaluation order.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{
    concurrence, fidelity, pair_corrections, pair_wigner_angles, radial_epr_report, transform_pair,
    BipartiteSpinState, PairRotationRates,
};
use crate::error::{CwError, Result};
use crate::frames::{
    analytic_tetrad, geodetic_precession, transport_frame, PrecessionMode, TetradKind,
    TransportSpec,
};
use crate::geodesics::circular_orbit_constants;
use crate::geometry::{ChartPoint, MetricField};
use crate::scenarios::{fff_spin_up_track, selfcheck, CheckRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Precession,
    CircularCorrections,
    WignerTrack,
    RadialEpr,
    PairOrbits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CwError::Config(format!("bad config: {e}")))
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.parameters
            .get(key)
            .copied()
            .ok_or_else(|| CwError::Config(format!("missing parameter '{key}'")))
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.parameters.get(key).copied().unwrap_or(default)
    }
}

/// Run metadata persisted next to the outputs; the CSV bodies stay
/// byte-identical between runs, the timestamp lives only here.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: Scenario,
    pub parameters: BTreeMap<String, f64>,
    pub tool_version: &'static str,
    pub timestamp_unix: u64,
    pub checks: Vec<CheckRecord>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// A named table of float rows.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub manifest: RunManifest,
    pub tables: Vec<Table>,
    /// Scalar summary used as the sweep row for this scenario.
    pub headline: Vec<(String, f64)>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn check(name: &str, residual: f64, tolerance: f64, details: &str) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        residual,
        tolerance,
        pass: residual.is_finite() && residual < tolerance,
        details: details.into(),
    }
}

/// Execute a scenario without touching the filesystem.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunResult> {
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let mut headline = Vec::new();

    match config.scenario {
        Scenario::Precession => {
            let mass = config.get_or("M", 1.0);
            let radius = config.get("R")?;
            let analytic = geodetic_precession(mass, radius, PrecessionMode::Analytic)?;
            let numeric = geodetic_precession(mass, radius, PrecessionMode::Numeric)?;
            let rel = ((numeric - analytic) / analytic).abs();
            checks.push(check(
                "precession-numeric-vs-analytic",
                rel,
                1e-8,
                &format!("analytic {analytic:.10}, numeric {numeric:.10}"),
            ));
            tables.push(Table {
                name: "precession".into(),
                columns: vec![
                    "R".into(),
                    "analytic".into(),
                    "numeric".into(),
                    "rel_error".into(),
                ],
                rows: vec![vec![radius, analytic, numeric, rel]],
            });
            // transported-frame samples (tau, coords, 16 tetrad entries)
            let constants = circular_orbit_constants(mass, radius)?;
            let metric = MetricField::schwarzschild(mass)?;
            let x0 = ChartPoint::equatorial(0.0, radius, 0.0);
            let initial = analytic_tetrad(TetradKind::CircularFreeFall { mass, radius }, &x0)?;
            let u = constants.four_velocity();
            let spec = TransportSpec::parallel(move |_| Ok(u), (0.0, constants.proper_period()))
                .with_tolerance(1e-12);
            let n = config.get_or("steps", 64.0).max(2.0) as usize;
            let frames = transport_frame(&metric, &spec, &initial, n)?;
            let mut cols = vec![
                "tau".to_string(),
                "t".into(),
                "r".into(),
                "theta".into(),
                "phi".into(),
            ];
            for a in 0..4 {
                for mu in 0..4 {
                    cols.push(format!("e{a}{mu}"));
                }
            }
            let rows = frames
                .iter()
                .map(|f| {
                    let mut row = vec![
                        f.tau,
                        f.tetrad.base_point.t(),
                        f.tetrad.base_point.r(),
                        f.tetrad.base_point.theta(),
                        f.tetrad.base_point.phi(),
                    ];
                    for a in 0..4 {
                        for mu in 0..4 {
                            row.push(f.tetrad.e[(a, mu)]);
                        }
                    }
                    row
                })
                .collect();
            tables.push(Table {
                name: "frames".into(),
                columns: cols,
                rows,
            });
            headline.push(("analytic".into(), analytic));
            headline.push(("numeric".into(), numeric));
            headline.push(("rel_error".into(), rel));
        }

        Scenario::CircularCorrections => {
            let mass = config.get_or("M", 1.0);
            let radius = config.get("R")?;
            let m_particle = config.get_or("m", 1.0);
            let zeta = config.get_or("zeta", 0.0);
            let phi = config.get_or("phi", 0.0);
            let t = config.get_or("t", 0.0);
            let eps = config.get_or("epsilon", 1e-3);

            let field = crate::frames::AnalyticFrameField::new(TetradKind::CircularFreeFall {
                mass,
                radius,
            })?;
            let constants = circular_orbit_constants(mass, radius)?;
            let u = constants.four_velocity();
            let x = ChartPoint::equatorial(t, radius, 0.0);
            let spin = crate::dirac_wkb::RestSpinor::new(zeta, phi);
            let closed =
                crate::dirac_wkb::circular_corrections(mass, radius, m_particle, zeta, phi, t)?;
            let dv = crate::dirac_wkb::velocity_correction(&field, &spin, &x, m_particle)?;
            let riem = crate::geometry::riemann(crate::frames::TetradField::metric(&field), &x)?;
            let a_curv = crate::dirac_wkb::acceleration_correction(
                &field,
                &riem,
                &u,
                &spin,
                &x,
                m_particle,
                crate::dirac_wkb::AccelRoute::Curvature,
            )?;
            let a_grad = crate::dirac_wkb::acceleration_correction(
                &field,
                &riem,
                &u,
                &spin,
                &x,
                m_particle,
                crate::dirac_wkb::AccelRoute::ConnectionGradient,
            )?;
            let dv_dev = (dv - closed.delta_v).abs().max();
            let a_dev = (a_curv - closed.accel).abs().max();
            let route_dev = (a_curv - a_grad).abs().max();
            let metric = MetricField::schwarzschild(mass)?;
            let r1 = crate::dirac_wkb::perturbed_normalization_residual(&metric, &x, &u, &dv, eps)?;
            let r2 = crate::dirac_wkb::perturbed_normalization_residual(
                &metric,
                &x,
                &u,
                &dv,
                eps / 2.0,
            )?;
            let ratio = r1 / r2;
            checks.push(check("velocity-closed-form", dv_dev, 1e-8, ""));
            checks.push(check("acceleration-closed-form", a_dev, 1e-8, ""));
            checks.push(check("acceleration-route-split", route_dev, 1e-6, ""));
            checks.push(check(
                "normalization-eps-squared",
                (ratio - 4.0).abs(),
                0.2,
                &format!("residual ratio under eps halving: {ratio:.4}"),
            ));
            tables.push(Table {
                name: "corrections".into(),
                columns: vec![
                    "component".into(),
                    "dv_pipeline".into(),
                    "dv_closed".into(),
                    "accel_curvature".into(),
                    "accel_gradient".into(),
                    "accel_closed".into(),
                ],
                rows: (0..4)
                    .map(|k| {
                        vec![
                            k as f64,
                            dv[k],
                            closed.delta_v[k],
                            a_curv[k],
                            a_grad[k],
                            closed.accel[k],
                        ]
                    })
                    .collect(),
            });
            headline.push(("dv_phi".into(), dv[3]));
            headline.push(("accel_r".into(), a_curv[1]));
            headline.push(("chi_up".into(), closed.chi_up));
            headline.push(("norm_residual".into(), r1));
            headline.push(("norm_ratio".into(), ratio));
        }

        Scenario::WignerTrack => {
            let mass = config.get_or("M", 1.0);
            let radius = config.get("R")?;
            let m_particle = config.get_or("m", 1.0);
            let eps = config.get_or("epsilon", 1e-3);
            let steps = config.get_or("steps", 2048.0).max(8.0) as usize;
            let track = fff_spin_up_track(mass, radius, m_particle, eps, steps)?;
            checks.push(check(
                "accumulated-vs-closed-form",
                track.closed_form_residual,
                1e-6,
                &format!("rotation rate chi_up = {:.8}", track.chi_up),
            ));
            let (ortho, det) = track.accumulated.spatial_orthogonality_residual();
            checks.push(check(
                "spatial-block-orthogonality",
                ortho.max(det),
                1e-8,
                "",
            ));
            tables.push(Table {
                name: "track".into(),
                columns: vec![
                    "tau".into(),
                    "theta_23".into(),
                    "theta_31".into(),
                    "theta_12".into(),
                ],
                rows: track
                    .accumulated
                    .steps
                    .iter()
                    .map(|s| vec![s.tau, s.theta_23, s.theta_31, s.theta_12])
                    .collect(),
            });
            let mut element_rows = Vec::new();
            for i in 0..4 {
                for j in 0..4 {
                    element_rows.push(vec![i as f64, j as f64, track.accumulated.w[(i, j)]]);
                }
            }
            tables.push(Table {
                name: "element".into(),
                columns: vec!["row".into(), "col".into(), "w".into()],
                rows: element_rows,
            });
            let d = track.accumulated.d.d;
            tables.push(Table {
                name: "spin-rotation".into(),
                columns: vec!["row".into(), "col".into(), "re".into(), "im".into()],
                rows: (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| vec![i as f64, j as f64, d[(i, j)].re, d[(i, j)].im])
                    .collect(),
            });
            headline.push(("closed_form_residual".into(), track.closed_form_residual));
            headline.push(("d00_re".into(), d[(0, 0)].re));
            headline.push(("d00_im".into(), d[(0, 0)].im));
            headline.push(("phase".into(), eps * track.chi_up * track.tau_span / 2.0));
        }

        Scenario::RadialEpr => {
            let mass = config.get_or("M", 1.0);
            let r = config.get("r")?;
            let eps = config.get_or("epsilon", 1e-3);
            let rep = radial_epr_report(mass, r, eps)?;
            checks.push(check(
                "matched-frame-singlet-fidelity",
                (rep.matched_fidelity - 1.0).abs(),
                1e-10,
                "",
            ));
            if eps > 0.0 {
                let ratio = rep.triplet_admixture / rep.triplet_admixture_half_eps;
                checks.push(check(
                    "admixture-linear-in-eps",
                    (ratio - 2.0).abs(),
                    1e-3,
                    &format!("amplitude {:.6e}", rep.triplet_admixture),
                ));
            }
            tables.push(Table {
                name: "report".into(),
                columns: vec![
                    "deflected_momentum_up".into(),
                    "deflected_momentum_down".into(),
                    "matched_fidelity".into(),
                    "mismatched_rate".into(),
                    "triplet_admixture".into(),
                ],
                rows: vec![vec![
                    rep.deflected_momentum_up,
                    rep.deflected_momentum_down,
                    rep.matched_fidelity,
                    rep.mismatched_rate,
                    rep.triplet_admixture,
                ]],
            });
            headline.push(("matched_fidelity".into(), rep.matched_fidelity));
            headline.push(("triplet_admixture".into(), rep.triplet_admixture));
        }

        Scenario::PairOrbits => {
            let mass = config.get_or("M", 1.0);
            let radius = config.get("R")?;
            let delta_r = config.get_or("deltaR", 0.0);
            let m_particle = config.get_or("m", 1.0);
            let theta_mix = config.get("Theta")?;
            let phi_rel = config.get_or("Phi", 0.0);
            let eps = config.get_or("epsilon", 1e-3);
            if delta_r / radius > 0.05 {
                eprintln!(
                    "warning: deltaR/R = {:.3} exceeds the expansion's comfort zone 0.05",
                    delta_r / radius
                );
            }
            let state = BipartiteSpinState::new(theta_mix, phi_rel);
            let constants = circular_orbit_constants(mass, radius)?;
            let tau = config.get_or("tau", constants.proper_period());
            let [dv1, dv2] = pair_corrections(&state, mass, radius, delta_r, m_particle)?;
            let rates = pair_wigner_angles(&state, mass, radius, delta_r, m_particle)?;
            let scaled = PairRotationRates {
                theta: eps * rates.theta,
                delta_theta: eps * rates.delta_theta,
            };
            let out = transform_pair(&state, &scaled, tau);
            let fid = fidelity(&state, &out);
            let conc_before = concurrence(&state)?;
            let conc_after = concurrence(&out)?;
            checks.push(check("norm-preserved", (out.norm() - 1.0).abs(), 1e-12, ""));
            checks.push(check(
                "concurrence-is-sin-theta",
                (conc_before - theta_mix.sin().abs()).abs(),
                1e-10,
                "",
            ));
            // the common-mode rate must cancel from the state
            let no_common = transform_pair(
                &state,
                &PairRotationRates {
                    theta: scaled.theta,
                    delta_theta: 0.0,
                },
                tau,
            );
            checks.push(check(
                "common-mode-cancellation",
                (out.amps - no_common.amps).norm(),
                1e-12,
                "",
            ));
            tables.push(Table {
                name: "pair".into(),
                columns: vec![
                    "theta_rate".into(),
                    "delta_theta_rate".into(),
                    "fidelity".into(),
                    "concurrence_before".into(),
                    "concurrence_after".into(),
                    "dv1_phi".into(),
                    "dv2_phi".into(),
                ],
                rows: vec![vec![
                    rates.theta,
                    rates.delta_theta,
                    fid,
                    conc_before,
                    conc_after,
                    dv1[3],
                    dv2[3],
                ]],
            });
            headline.push(("fidelity".into(), fid));
            headline.push(("concurrence".into(), conc_after));
            headline.push(("theta_rate".into(), rates.theta));
        }
    }

    Ok(RunResult {
        manifest: RunManifest {
            scenario: config.scenario,
            parameters: config.parameters.clone(),
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: now_unix(),
            checks,
            outputs: Vec::new(),
        },
        tables,
        headline,
    })
}

fn scenario_slug(s: Scenario) -> &'static str {
    match s {
        Scenario::Precession => "precession",
        Scenario::CircularCorrections => "circular-corrections",
        Scenario::WignerTrack => "wigner-track",
        Scenario::RadialEpr => "radial-epr",
        Scenario::PairOrbits => "pair-orbits",
    }
}

/// Write a table as CSV with deterministic 17-significant-digit numbers.
fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| fmt17(*x)).collect();
        writeln!(f, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Execute and persist a scenario; returns the manifest.
pub fn run_and_persist(config: &ScenarioConfig) -> Result<RunManifest> {
    let mut result = run_scenario(config)?;
    std::fs::create_dir_all(&config.output.dir)?;
    let slug = scenario_slug(config.scenario);
    for fmt in &config.output.formats {
        match fmt {
            OutputFormat::Csv => {
                for table in &result.tables {
                    let path = config.output.dir.join(format!("{slug}-{}.csv", table.name));
                    write_csv(&path, table)?;
                    result.manifest.outputs.push(path.display().to_string());
                }
            }
            OutputFormat::Json => {
                let path = config.output.dir.join(format!("{slug}.json"));
                let doc = serde_json::json!({
                    "manifest": &result.manifest,
                    "tables": &result.tables,
                });
                std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
                result.manifest.outputs.push(path.display().to_string());
            }
        }
    }
    let manifest_path = config.output.dir.join(format!("{slug}-manifest.json"));
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&result.manifest)?,
    )?;
    Ok(result.manifest)
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// Evaluate the scenario across the swept parameter; rows are merged in
/// index order so the parallel evaluation matches a sequential one.
pub fn sweep(config: &ScenarioConfig, spec: &SweepSpec) -> Result<(Table, Vec<RunManifest>)> {
    if spec.count == 0 {
        return Err(CwError::Config("sweep count must be positive".into()));
    }
    if config.parameters.contains_key(&spec.param) {
        // the swept parameter replaces any fixed value
    }
    let values: Vec<f64> = (0..spec.count)
        .map(|i| {
            if spec.count == 1 {
                spec.start
            } else {
                spec.start + (spec.stop - spec.start) * i as f64 / (spec.count - 1) as f64
            }
        })
        .collect();
    let results: Vec<Result<RunResult>> = values
        .par_iter()
        .map(|v| {
            let mut c = config.clone();
            c.parameters.insert(spec.param.clone(), *v);
            run_scenario(&c)
        })
        .collect();

    let mut columns = vec![spec.param.clone()];
    let mut rows = Vec::with_capacity(spec.count);
    let mut manifests = Vec::with_capacity(spec.count);
    for (v, res) in values.iter().zip(results) {
        let r = res?;
        if columns.len() == 1 {
            for (k, _) in &r.headline {
                columns.push(k.clone());
            }
        }
        let mut row = vec![*v];
        row.extend(r.headline.iter().map(|(_, x)| *x));
        rows.push(row);
        manifests.push(r.manifest);
    }
    Ok((
        Table {
            name: format!("sweep-{}", spec.param),
            columns,
            rows,
        },
        manifests,
    ))
}

/// Persisted sweep: one aggregated CSV plus a manifest of per-point checks.
pub fn sweep_and_persist(config: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<RunManifest>> {
    let (table, manifests) = sweep(config, spec)?;
    std::fs::create_dir_all(&config.output.dir)?;
    let path = config.output.dir.join(format!(
        "{}-{}.csv",
        scenario_slug(config.scenario),
        table.name
    ));
    write_csv(&path, &table)?;
    if config.output.formats.contains(&OutputFormat::Json) {
        let path = config.output.dir.join(format!(
            "{}-{}.json",
            scenario_slug(config.scenario),
            table.name
        ));
        std::fs::write(&path, serde_json::to_string_pretty(&table)?)?;
    }
    Ok(manifests)
}

/// Run the invariant suite, printing one line per criterion.
pub fn run_selfcheck() -> i32 {
    let records = selfcheck();
    let mut ok = true;
    for rec in &records {
        println!("{}", rec.line());
        ok &= rec.pass;
    }
    if ok {
        println!("selfcheck: all {} criteria passed", records.len());
        0
    } else {
        println!("selfcheck: FAILURES present");
        4
    }
}
