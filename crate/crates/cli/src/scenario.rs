//! Scenario file schema and validation. One JSON file describes one engine
//! run; complex numbers appear as [re, im] pairs; unknown fields are
//! rejected so typos surface as schema errors with field diagnostics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Relstate,
    Geometry,
    Evolve,
    Bridge,
    Phase,
    Clock,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Relstate => "relstate",
            EngineKind::Geometry => "geometry",
            EngineKind::Evolve => "evolve",
            EngineKind::Bridge => "bridge",
            EngineKind::Phase => "phase",
            EngineKind::Clock => "clock",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    #[serde(default = "default_verbosity")]
    pub verbosity: u8,
}

fn default_dir() -> String {
    "out".into()
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

fn default_verbosity() -> u8 {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            formats: default_formats(),
            verbosity: default_verbosity(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub engine: EngineKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relstate: Option<RelstateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock: Option<ClockConfig>,
}

impl Scenario {
    /// Exactly one engine block must be present and it must match `engine`.
    pub fn validate(&self) -> Result<(), String> {
        let blocks = [
            ("relstate", self.relstate.is_some()),
            ("geometry", self.geometry.is_some()),
            ("evolve", self.evolve.is_some()),
            ("bridge", self.bridge.is_some()),
            ("phase", self.phase.is_some()),
            ("clock", self.clock.is_some()),
        ];
        let present: Vec<&str> = blocks
            .iter()
            .filter(|(_, p)| *p)
            .map(|(n, _)| *n)
            .collect();
        if present.len() != 1 {
            return Err(format!(
                "exactly one engine block must be present, found: [{}]",
                present.join(", ")
            ));
        }
        if present[0] != self.engine.name() {
            return Err(format!(
                "engine is '{}' but the present block is '{}'",
                self.engine.name(),
                present[0]
            ));
        }
        Ok(())
    }
}

// --------------------------------------------------------------------------
// Engine blocks.
// --------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelstateCheck {
    /// Separable states recover |b_i|² exactly.
    Separable,
    /// Random entangled states against the full ambient-space projection.
    Oracle,
    /// Metric-contracted partial trace against explicit index contraction.
    PartialTrace,
    /// Inline coefficients/condition with expected raw probabilities.
    InlineRatio,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelstateConfig {
    pub check: RelstateCheck,
    #[serde(default = "four")]
    pub n: usize,
    #[serde(default = "one")]
    pub trials: usize,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_raw_probabilities: Option<Vec<f64>>,
}

fn four() -> usize {
    4
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryFixture {
    /// h = (1+|x|²)^{-2}: R = 2h, the constant-curvature case.
    FubiniStudy,
    /// Constant metric: everything flat.
    Flat,
    /// h = e^{x·x̄}: R = −1.
    GaussianPotential,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub fixture: GeometryFixture,
    pub n: usize,
    pub halfwidth: f64,
    /// When set, the run repeats at this resolution and reports the
    /// max-error ratio (expected ≈ 4 for second-order stencils).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_norm_tol: Option<f64>,
    /// Write the per-node grid dump table.
    #[serde(default)]
    pub dump_field: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveFixture {
    /// N = 1, h(t) = (1 + c·t)².
    ScalarClosedForm,
    /// N = 2, h = U·diag((1+σt)^p, (1+σt)^q)·U†, p + q = 2.
    N2ClosedForm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub fixture: EvolveFixture,
    #[serde(default = "default_c")]
    pub c: f64,
    pub horizon: f64,
    pub steps_coarse: usize,
    pub steps_fine: usize,
    pub order_bounds: [f64; 2],
    pub hermiticity_tol: f64,
}

fn default_c() -> f64 {
    0.9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeGrid {
    pub n_re: usize,
    pub n_im: usize,
    pub halfwidth: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeConfig {
    pub omegas: Vec<f64>,
    pub horizon: f64,
    pub sigma: f64,
    pub k0: f64,
    pub center: [f64; 2],
    pub grid: BridgeGrid,
    /// Acceptance window for the per-octave gap ratio.
    pub ratio_bounds: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseCheck {
    /// Spin-½ ground state dragged around a cone: phase −Ω_s/2.
    SpinCone,
    /// Holomorphic connection: closed-loop Θ vanishes.
    IntegrableLoop,
    /// Line-vs-surface Stokes gap with refinement ratio.
    Stokes,
    /// fs² vs energy variance over random generators.
    Anandan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub check: PhaseCheck,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Cone opening angle (spin_cone).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub tolerance: f64,
    /// Cross-route agreement tolerance (spin_cone) or ratio window (stokes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_bounds: Option<[f64; 2]>,
    /// Number of random generators (anandan).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockFixture {
    /// Two eigenmodes tuned onto the clock ladder; exactness checks.
    IdealResonant,
    /// Free Gaussian packet; spreading-law check.
    GaussianSpreading,
    /// Finite-width conditioning deviation monotonicity.
    WindowMonotonic,
    /// Massive clock with a tuned ±E pair; zero-mode existence.
    GenericPair,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockConfig {
    pub fixture: ClockFixture,
    pub d_x: usize,
    pub d_t: usize,
    pub m_x: f64,
    pub dx: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wd_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectation_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_tol: Option<f64>,
    /// Window widths in clock-step units (window_monotonic).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<f64>>,
    /// Packet width and clock horizon (gaussian_spreading).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_tol: Option<f64>,
    /// Clock mass (generic_pair).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_t: Option<f64>,
}
