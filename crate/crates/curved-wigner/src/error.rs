use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum CwError {
    /// Point outside the chart (horizon crossed, polar axis, bad mass).
    #[error("domain error: {0}")]
    Domain(String),

    /// Circular orbit requested at or below the photon sphere radius 3M.
    #[error("no circular orbit at R = {radius} (photon sphere at {limit})")]
    PhotonSphere { radius: f64, limit: f64 },

    /// Angular momentum too small for any circular orbit.
    #[error("no circular orbit exists for (l/M)^2 = {l_over_m_sq} < 12")]
    NoCircularOrbit { l_over_m_sq: f64 },

    /// Adaptive integrator step size underflowed.
    #[error("integration failure at tau = {tau}: {reason}")]
    IntegrationFailure { tau: f64, reason: String },

    /// Frame operation mixed quantities anchored at different points.
    #[error("frame mismatch: base points differ by {max_coord_diff:e}")]
    FrameMismatch { max_coord_diff: f64 },

    /// Tetrad matrix not invertible to working precision.
    #[error("singular tetrad (|det| = {det:e})")]
    SingularTetrad { det: f64 },

    /// Matrix fails the metric-preservation test for a Lorentz transform.
    #[error("not a Lorentz transform (residual {residual:e} > {tolerance:e})")]
    NotALorentzTransform { residual: f64, tolerance: f64 },

    /// Four-acceleration not orthogonal to the four-momentum.
    #[error("acceleration/momentum orthogonality violated: |a.p| = {inner:e}")]
    OrthogonalityViolation { inner: f64 },

    /// Ordered-product step too large for the requested accuracy.
    #[error("step too coarse: |theta|*dtau = {product:e} exceeds {limit:e}")]
    StepTooCoarse { product: f64, limit: f64 },

    /// Scenario configuration missing or invalid.
    #[error("config error: {0}")]
    Config(String),

    /// Density matrix or state vector fails norm/Hermiticity/positivity.
    #[error("not a valid quantum state: {0}")]
    NotAState(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CwError>;

impl CwError {
    pub fn domain(msg: impl Into<String>) -> Self {
        CwError::Domain(msg.into())
    }

    /// Process exit code used by the CLI: 2 config, 3 domain, 4 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CwError::Config(_) | CwError::Json(_) => 2,
            CwError::Domain(_) | CwError::PhotonSphere { .. } | CwError::NoCircularOrbit { .. } => {
                3
            }
            _ => 4,
        }
    }
}
