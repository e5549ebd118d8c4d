//! Relative-evolution engines: the complex Gauss-Codazzi equation for the
//! subspace metric, its linearized form on an x-chart, and the ket-vector
//! form, integrated with a classical 4th-order one-step method on the
//! first-order reduction (h, ∂h/∂t).
//!
//! The evolution parameter t is one real coordinate (Re t on a single
//! t-axis); the Wirtinger factors of the timelike contraction are folded
//! into the fixture constants. In matrix form, with K = ½ ∂h/∂t and
//! K_s = tr(h⁻¹K):
//!
//!   ∂²h/∂t² = −2·[ R + K_s·K − 2·K h⁻¹ K ]
//!
//! which linearizes (R ≈ −½Δ_x h) to
//!
//!   ∂²h/∂t² = Δ_x h + (∂h/∂t) h⁻¹ (∂h/∂t) − K_s·(∂h/∂t).

use crate::chart::CoordinateChart;
use crate::error::{CoreError, Result};
use crate::geometry::BasisField;
use crate::linalg::{gram, ComplexMatrix, HermitianMatrix, C64};
use crate::tol;

/// Metric state at one evolution instant.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub h: HermitianMatrix,
    pub hdot: ComplexMatrix,
    pub t: f64,
    pub step: f64,
}

impl EvolutionState {
    pub fn new(h: HermitianMatrix, hdot: ComplexMatrix, t: f64, step: f64) -> Result<Self> {
        if step <= 0.0 {
            return Err(CoreError::invalid("step must be > 0"));
        }
        if hdot.hermiticity_drift() > tol::HERMITICITY_TOL {
            return Err(CoreError::invalid("hdot must be Hermitian"));
        }
        if h.min_eigenvalue() <= tol::PD_FLOOR {
            return Err(CoreError::DegenerateMetric(
                "initial metric is not positive-definite".into(),
            ));
        }
        Ok(Self { h, hdot: hdot.symmetrize(), t, step })
    }
}

/// Right-hand side ∂²h/∂t² = F(t, h, ∂h/∂t) for the metric integrator.
pub trait MetricRhs {
    fn second_derivative(
        &self,
        t: f64,
        h: &ComplexMatrix,
        hdot: &ComplexMatrix,
    ) -> Result<ComplexMatrix>;
}

/// The Gauss-Codazzi right-hand side with an externally supplied intrinsic
/// Ricci source (computed from the x-chart, a closed form, or zero).
pub struct GaussCodazziRhs<R>
where
    R: Fn(f64, &ComplexMatrix) -> ComplexMatrix,
{
    pub ricci_source: R,
}

/// −2·[R + K_s·K − 2·K h⁻¹ K] with K = ½hdot, K_s = tr(h⁻¹K).
pub fn gc_rhs(
    h: &ComplexMatrix,
    hdot: &ComplexMatrix,
    ricci: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let hinv = h
        .inverse()
        .map_err(|_| CoreError::DegenerateMetric("singular h in gc_rhs".into()))?;
    let k = hdot.scale(C64::new(0.5, 0.0));
    let k_s = hinv.mul(&k).trace();
    let quad = k.mul(&hinv).mul(&k);
    // −2R − 2 K_s K + 4 K h⁻¹ K
    Ok(ricci
        .scale(C64::new(-2.0, 0.0))
        .add(&k.scale(k_s * -2.0))
        .add(&quad.scale(C64::new(4.0, 0.0))))
}

impl<R> MetricRhs for GaussCodazziRhs<R>
where
    R: Fn(f64, &ComplexMatrix) -> ComplexMatrix,
{
    fn second_derivative(
        &self,
        t: f64,
        h: &ComplexMatrix,
        hdot: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        let ricci = (self.ricci_source)(t, h);
        gc_rhs(h, hdot, &ricci)
    }
}

/// Zero right-hand side (free drift); exercises the integrator alone.
pub struct ZeroRhs;

impl MetricRhs for ZeroRhs {
    fn second_derivative(
        &self,
        _t: f64,
        h: &ComplexMatrix,
        _hdot: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::zeros(h.rows, h.cols))
    }
}

/// Integrator options.
#[derive(Debug, Clone)]
pub struct StepOptions {
    pub pd_floor: f64,
    pub hermiticity_tol: f64,
    pub residual_tol: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            pd_floor: tol::PD_FLOOR,
            hermiticity_tol: tol::HERMITICITY_TOL,
            residual_tol: tol::RESIDUAL_TOL,
        }
    }
}

/// One classical RK4 step of the first-order reduction (h, hdot).
///
/// The result is re-Hermitized; positivity loss rejects the step with a
/// suggested smaller step. The Hermiticity drift before symmetrization is
/// returned so callers can track it per step.
pub fn step_gc(
    state: &EvolutionState,
    rhs: &dyn MetricRhs,
    opts: &StepOptions,
) -> Result<(EvolutionState, f64)> {
    let dt = state.step;
    let h0 = state.h.as_matrix().clone();
    let v0 = state.hdot.clone();
    let f = |t: f64, h: &ComplexMatrix, v: &ComplexMatrix| rhs.second_derivative(t, h, v);

    let a1 = f(state.t, &h0, &v0)?;
    let h1 = h0.add(&v0.scale(C64::new(dt / 2.0, 0.0)));
    let v1 = v0.add(&a1.scale(C64::new(dt / 2.0, 0.0)));
    let a2 = f(state.t + dt / 2.0, &h1, &v1)?;
    let h2 = h0.add(&v1.scale(C64::new(dt / 2.0, 0.0)));
    let v2 = v0.add(&a2.scale(C64::new(dt / 2.0, 0.0)));
    let a3 = f(state.t + dt / 2.0, &h2, &v2)?;
    let h3 = h0.add(&v2.scale(C64::new(dt, 0.0)));
    let v3 = v0.add(&a3.scale(C64::new(dt, 0.0)));
    let a4 = f(state.t + dt, &h3, &v3)?;

    let sixth = dt / 6.0;
    let h_next = h0.add(
        &v0.add(&v1.scale(C64::new(2.0, 0.0)))
            .add(&v2.scale(C64::new(2.0, 0.0)))
            .add(&v3)
            .scale(C64::new(sixth, 0.0)),
    );
    let v_next = v0.add(
        &a1.add(&a2.scale(C64::new(2.0, 0.0)))
            .add(&a3.scale(C64::new(2.0, 0.0)))
            .add(&a4)
            .scale(C64::new(sixth, 0.0)),
    );

    let drift = h_next.hermiticity_drift().max(v_next.hermiticity_drift());
    if drift > opts.hermiticity_tol {
        return Err(CoreError::invalid(format!(
            "Hermiticity drift {drift:.3e} after step exceeds tolerance"
        )));
    }
    let h_sym = HermitianMatrix::with_tol(h_next, opts.hermiticity_tol)?;
    let min_eig = h_sym.min_eigenvalue();
    if min_eig <= opts.pd_floor {
        return Err(CoreError::StepRejected {
            reason: format!("min eigenvalue {min_eig:.3e} at t = {}", state.t + dt),
            suggested_step: dt / 2.0,
        });
    }
    Ok((
        EvolutionState {
            h: h_sym,
            hdot: v_next.symmetrize(),
            t: state.t + dt,
            step: dt,
        },
        drift,
    ))
}

/// A completed metric trajectory with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<EvolutionState>,
    /// Relative three-point residual of the second-order equation at each
    /// interior accepted state.
    pub residuals: Vec<f64>,
    /// Max Hermiticity drift observed before re-symmetrization.
    pub max_hermiticity_drift: f64,
    /// Residual-tolerance breaches (step index, value).
    pub warnings: Vec<(usize, f64)>,
}

/// Integrate a fixed number of steps, recording residuals of the original
/// second-order equation via the three-point difference of accepted states.
pub fn evolve(
    initial: EvolutionState,
    rhs: &dyn MetricRhs,
    n_steps: usize,
    opts: &StepOptions,
) -> Result<Trajectory> {
    let mut states = vec![initial];
    let mut max_drift: f64 = 0.0;
    for _ in 0..n_steps {
        let (next, drift) = step_gc(states.last().unwrap(), rhs, opts)?;
        max_drift = max_drift.max(drift);
        states.push(next);
    }
    let mut residuals = Vec::new();
    let mut warnings = Vec::new();
    for k in 1..states.len().saturating_sub(1) {
        let dt = states[k].step;
        let fd2 = states[k + 1]
            .h
            .as_matrix()
            .add(states[k - 1].h.as_matrix())
            .sub(&states[k].h.as_matrix().scale(C64::new(2.0, 0.0)))
            .scale(C64::new(1.0 / (dt * dt), 0.0));
        let want = rhs.second_derivative(
            states[k].t,
            states[k].h.as_matrix(),
            &states[k].hdot,
        )?;
        let scale = want.max_norm().max(fd2.max_norm()).max(1e-12);
        let rel = fd2.sub(&want).max_norm() / scale;
        if rel > opts.residual_tol {
            warnings.push((k, rel));
        }
        residuals.push(rel);
    }
    Ok(Trajectory { states, residuals, max_hermiticity_drift: max_drift, warnings })
}

// ---------------------------------------------------------------------------
// Linearized engines on an x-chart.
// ---------------------------------------------------------------------------

/// Metric field state for the linearized equation: h and ∂h/∂t sampled on
/// the x-chart.
#[derive(Debug, Clone)]
pub struct LinearizedMetricState {
    pub chart: CoordinateChart,
    pub dim: usize,
    pub h: Vec<ComplexMatrix>,
    pub hdot: Vec<ComplexMatrix>,
    pub t: f64,
}

fn laplacian_of_matrices(
    chart: &CoordinateChart,
    values: &[ComplexMatrix],
    dim: usize,
) -> Result<Vec<ComplexMatrix>> {
    let mut out = vec![ComplexMatrix::zeros(dim, dim); values.len()];
    for i in 0..dim {
        for j in 0..dim {
            let f = crate::chart::ScalarField {
                chart: chart.clone(),
                values: values.iter().map(|m| m[(i, j)]).collect(),
            };
            let lap = f.laplacian()?;
            for (node, v) in lap.values.into_iter().enumerate() {
                out[node][(i, j)] = v;
            }
        }
    }
    Ok(out)
}

/// ∂²h/∂t² = Δ_x h + hdot·h⁻¹·hdot − K_s·hdot at every node.
pub fn linearized_metric_rhs(
    chart: &CoordinateChart,
    dim: usize,
    h: &[ComplexMatrix],
    hdot: &[ComplexMatrix],
) -> Result<Vec<ComplexMatrix>> {
    let lap = laplacian_of_matrices(chart, h, dim)?;
    let mut out = Vec::with_capacity(h.len());
    for node in 0..h.len() {
        let hinv = h[node].inverse().map_err(|_| {
            CoreError::DegenerateMetric(format!("singular h at node {node}"))
        })?;
        let k_s = hinv.mul(&hdot[node]).trace() * 0.5;
        let quad = hdot[node].mul(&hinv).mul(&hdot[node]);
        out.push(lap[node].add(&quad).add(&hdot[node].scale(-k_s)));
    }
    Ok(out)
}

/// One RK4 step of the linearized metric equation; re-Hermitizes and checks
/// positivity nodewise.
pub fn step_linearized_metric(
    state: &LinearizedMetricState,
    dt: f64,
    opts: &StepOptions,
) -> Result<LinearizedMetricState> {
    let n = state.h.len();
    let add_scaled = |a: &[ComplexMatrix], b: &[ComplexMatrix], s: f64| -> Vec<ComplexMatrix> {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.add(&y.scale(C64::new(s, 0.0))))
            .collect()
    };
    let f = |h: &[ComplexMatrix], v: &[ComplexMatrix]| {
        linearized_metric_rhs(&state.chart, state.dim, h, v)
    };
    let a1 = f(&state.h, &state.hdot)?;
    let h1 = add_scaled(&state.h, &state.hdot, dt / 2.0);
    let v1 = add_scaled(&state.hdot, &a1, dt / 2.0);
    let a2 = f(&h1, &v1)?;
    let h2 = add_scaled(&state.h, &v1, dt / 2.0);
    let v2 = add_scaled(&state.hdot, &a2, dt / 2.0);
    let a3 = f(&h2, &v2)?;
    let h3 = add_scaled(&state.h, &v2, dt);
    let v3 = add_scaled(&state.hdot, &a3, dt);
    let a4 = f(&h3, &v3)?;
    let mut h_next = Vec::with_capacity(n);
    let mut v_next = Vec::with_capacity(n);
    for node in 0..n {
        let dh = state.hdot[node]
            .add(&v1[node].scale(C64::new(2.0, 0.0)))
            .add(&v2[node].scale(C64::new(2.0, 0.0)))
            .add(&v3[node])
            .scale(C64::new(dt / 6.0, 0.0));
        let dv = a1[node]
            .add(&a2[node].scale(C64::new(2.0, 0.0)))
            .add(&a3[node].scale(C64::new(2.0, 0.0)))
            .add(&a4[node])
            .scale(C64::new(dt / 6.0, 0.0));
        let h = state.h[node].add(&dh);
        if h.hermiticity_drift() > opts.hermiticity_tol {
            return Err(CoreError::invalid("Hermiticity drift in linearized step"));
        }
        let h = h.symmetrize();
        let hm = HermitianMatrix::with_tol(h.clone(), opts.hermiticity_tol)?;
        if hm.min_eigenvalue() <= opts.pd_floor {
            return Err(CoreError::StepRejected {
                reason: format!("positivity loss at node {node}"),
                suggested_step: dt / 2.0,
            });
        }
        h_next.push(h);
        v_next.push(state.hdot[node].add(&dv).symmetrize());
    }
    Ok(LinearizedMetricState {
        chart: state.chart.clone(),
        dim: state.dim,
        h: h_next,
        hdot: v_next,
        t: state.t + dt,
    })
}

// ---------------------------------------------------------------------------
// Ket-vector form.
// ---------------------------------------------------------------------------

/// How the coupling term h^{kl̄}(∂h_{īk}/∂t)(∂X_l/∂t) is closed.
#[derive(Debug, Clone, Copy)]
pub enum KetCoupling {
    /// Honest closure: Gram and its t-derivative computed from the running
    /// ket field (valid in the slow regime).
    FromGram,
    /// Fast-carrier closure of the Schrödinger limit: ∂h/∂t ≈ −iωh and
    /// ∂X/∂t ≈ −iωX inside the coupling, collapsing it to −ω²·X.
    FastCarrier { omega: f64 },
}

/// Source of the scalar extrinsic curvature K_a(t) entering the ket
/// equation's connection term.
pub enum KaSource {
    Zero,
    /// ½ d(ln det gram)/dt from the running ket field, per node. Nodes whose
    /// Gram determinant is below 1e-9 of the grid maximum contribute zero:
    /// the log-volume rate is not meaningful on vanishing tails and the raw
    /// quotient there is pure roundoff amplification.
    FromGram,
    /// Externally driven K_a(t), uniform over the x-chart.
    External(Box<dyn Fn(f64) -> f64 + Sync>),
}

/// Ket field with velocity: kets.values[node][i] is |X_i⟩ at that node.
#[derive(Debug, Clone)]
pub struct KetState {
    pub kets: BasisField,
    pub kets_dot: BasisField,
    pub t: f64,
}

impl KetState {
    /// Checks the pairing invariant gram(kets) = h within `gram_tol` against
    /// a metric snapshot.
    pub fn check_gram(&self, h: &[ComplexMatrix], gram_tol: f64) -> Result<()> {
        for (node, kets) in self.kets.values.iter().enumerate() {
            let g = gram(kets)?;
            let gap = g.as_matrix().sub(&h[node]).max_norm();
            if gap > gram_tol {
                return Err(CoreError::invalid(format!(
                    "gram(kets) deviates from paired metric by {gap:.3e} at node {node}"
                )));
            }
        }
        Ok(())
    }
}

/// Gram t-derivative ⟨X_i|Ẋ_j⟩ + ⟨Ẋ_i|X_j⟩ at one node.
fn gram_dot(
    kets: &BasisField,
    kets_dot: &BasisField,
    node: usize,
) -> ComplexMatrix {
    let count = kets.count;
    let mut gdot = ComplexMatrix::zeros(count, count);
    for i in 0..count {
        for j in 0..count {
            gdot[(i, j)] = kets.values[node][i].inner(&kets_dot.values[node][j])
                + kets_dot.values[node][i].inner(&kets.values[node][j]);
        }
    }
    gdot
}

/// ∂²X_i/∂t² = Δ_x X_i − K_a ∂X_i/∂t + coupling.
fn ket_rhs(
    kets: &BasisField,
    kets_dot: &BasisField,
    t: f64,
    coupling: KetCoupling,
    ka: &KaSource,
) -> Result<Vec<Vec<crate::linalg::ComplexVector>>> {
    let chart = &kets.chart;
    let count = kets.count;
    let ambient = kets.ambient;
    let mut out =
        vec![vec![crate::linalg::ComplexVector::zeros(ambient); count]; chart.n_nodes()];
    for i in 0..count {
        for c in 0..ambient {
            let f = kets.component_field(i, c);
            let l = f.laplacian()?;
            for (node, v) in l.values.into_iter().enumerate() {
                out[node][i].entries[c] = v;
            }
        }
    }
    // Tail gate for Gram-sourced K_a: determinant floor relative to the
    // grid maximum.
    let det_floor: Option<f64> = if matches!(ka, KaSource::FromGram) {
        let mut dmax = 0.0f64;
        for node in 0..chart.n_nodes() {
            let g = gram(&kets.values[node])?;
            let d = g.as_matrix().det().map(|z| z.re).unwrap_or(0.0);
            dmax = dmax.max(d);
        }
        Some(dmax * 1e-9)
    } else {
        None
    };
    for node in 0..chart.n_nodes() {
        let ka_val: f64 = match ka {
            KaSource::Zero => 0.0,
            KaSource::External(f) => f(t),
            KaSource::FromGram => {
                let g = gram(&kets.values[node])?;
                let det = g.as_matrix().det().map(|z| z.re).unwrap_or(0.0);
                if det <= det_floor.unwrap_or(0.0) {
                    0.0
                } else {
                    let ginv = g.as_matrix().inverse().map_err(|_| {
                        CoreError::DegenerateMetric("singular gram in ket step".into())
                    })?;
                    (ginv.mul(&gram_dot(kets, kets_dot, node)).trace() * 0.5).re
                }
            }
        };
        match coupling {
            KetCoupling::FastCarrier { omega } => {
                let w2 = omega * omega;
                for i in 0..count {
                    for c in 0..ambient {
                        let x = kets.values[node][i].entries[c];
                        let xd = kets_dot.values[node][i].entries[c];
                        out[node][i].entries[c] += -w2 * x - ka_val * xd;
                    }
                }
            }
            KetCoupling::FromGram => {
                let g = gram(&kets.values[node])?;
                let ginv = g.as_matrix().inverse().map_err(|_| {
                    CoreError::DegenerateMetric("singular gram in ket step".into())
                })?;
                // coupling_i = Σ_{k,l} gdot[i][k]·(G⁻¹)[k][l]·Ẋ_l
                let m = gram_dot(kets, kets_dot, node).mul(&ginv);
                for i in 0..count {
                    for l in 0..count {
                        let w = m[(i, l)];
                        for c in 0..ambient {
                            let v = kets_dot.values[node][l].entries[c];
                            out[node][i].entries[c] += w * v;
                        }
                    }
                }
                for i in 0..count {
                    for c in 0..ambient {
                        let xd = kets_dot.values[node][i].entries[c];
                        out[node][i].entries[c] -= ka_val * xd;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn ket_add_scaled(
    a: &BasisField,
    b: &[Vec<crate::linalg::ComplexVector>],
    s: f64,
) -> BasisField {
    let mut out = a.clone();
    for (node, kets) in out.values.iter_mut().enumerate() {
        for (i, k) in kets.iter_mut().enumerate() {
            k.axpy(C64::new(s, 0.0), &b[node][i]);
        }
    }
    out
}

fn ket_add_scaled_field(a: &BasisField, b: &BasisField, s: f64) -> BasisField {
    let mut out = a.clone();
    for (node, kets) in out.values.iter_mut().enumerate() {
        for (i, k) in kets.iter_mut().enumerate() {
            k.axpy(C64::new(s, 0.0), &b.values[node][i]);
        }
    }
    out
}

/// One RK4 step of the ket equation.
pub fn step_linearized_ket(
    state: &KetState,
    dt: f64,
    coupling: KetCoupling,
    ka: &KaSource,
) -> Result<KetState> {
    let f = |k: &BasisField, kd: &BasisField, t: f64| ket_rhs(k, kd, t, coupling, ka);
    let a1 = f(&state.kets, &state.kets_dot, state.t)?;
    let k1 = ket_add_scaled_field(&state.kets, &state.kets_dot, dt / 2.0);
    let v1 = ket_add_scaled(&state.kets_dot, &a1, dt / 2.0);
    let a2 = f(&k1, &v1, state.t + dt / 2.0)?;
    let k2 = ket_add_scaled_field(&state.kets, &v1, dt / 2.0);
    let v2 = ket_add_scaled(&state.kets_dot, &a2, dt / 2.0);
    let a3 = f(&k2, &v2, state.t + dt / 2.0)?;
    let k3 = ket_add_scaled_field(&state.kets, &v2, dt);
    let v3 = ket_add_scaled(&state.kets_dot, &a3, dt);
    let a4 = f(&k3, &v3, state.t + dt)?;

    let mut kets = state.kets.clone();
    let mut kets_dot = state.kets_dot.clone();
    for node in 0..kets.values.len() {
        for i in 0..kets.count {
            for c in 0..kets.ambient {
                let dx = state.kets_dot.values[node][i].entries[c]
                    + 2.0 * v1.values[node][i].entries[c]
                    + 2.0 * v2.values[node][i].entries[c]
                    + v3.values[node][i].entries[c];
                kets.values[node][i].entries[c] += dx * (dt / 6.0);
                let dv = a1[node][i].entries[c]
                    + 2.0 * a2[node][i].entries[c]
                    + 2.0 * a3[node][i].entries[c]
                    + a4[node][i].entries[c];
                kets_dot.values[node][i].entries[c] += dv * (dt / 6.0);
            }
        }
    }
    Ok(KetState { kets, kets_dot, t: state.t + dt })
}
