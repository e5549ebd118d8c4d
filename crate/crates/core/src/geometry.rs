//! Complex differential geometry of metric fields on coordinate charts:
//! connection, intrinsic Ricci curvature, extrinsic curvatures, the relative
//! metric g = G + (i/2)Ω, the inertial-force tensor F, Berry curvature
//! B = F − F†, and Kähler-potential diagnostics.
//!
//! Index conventions: a metric field stores H[i][j] = h_{ī j} (bar on the
//! row index, conjugation convention as in `linalg::gram`). The inverse
//! metric is the plain matrix inverse, so scalar contractions reduce to
//! traces: h^{īj}K_{īj} = tr(H⁻¹K).

use crate::chart::{CoordinateChart, MatrixField, ScalarField, Wirtinger};
use crate::error::{CoreError, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, HermitianMatrix, C64};
use crate::tol;
use rayon::prelude::*;

/// Which subspace metric a field represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Under-study subspace metric h (spacelike: positive-definite).
    H,
    /// Instrument subspace metric s.
    S,
    /// Full-space metric q = h + s.
    Q,
}

/// A Hermitian metric sampled on a chart.
#[derive(Debug, Clone)]
pub struct MetricField {
    pub field: MatrixField,
    pub kind: MetricKind,
}

impl MetricField {
    /// Validates Hermiticity at every node and, for spacelike fields,
    /// positive-definiteness above `pd_floor`.
    pub fn new(field: MatrixField, kind: MetricKind) -> Result<Self> {
        Self::with_floors(field, kind, tol::HERMITICITY_TOL, tol::PD_FLOOR)
    }

    pub fn with_floors(
        mut field: MatrixField,
        kind: MetricKind,
        hermiticity_tol: f64,
        pd_floor: f64,
    ) -> Result<Self> {
        for (node, m) in field.values.iter_mut().enumerate() {
            let drift = m.hermiticity_drift();
            if drift > hermiticity_tol {
                return Err(CoreError::invalid(format!(
                    "metric at node {node} has Hermiticity drift {drift:.3e}"
                )));
            }
            *m = m.symmetrize();
            if kind == MetricKind::H {
                let h = HermitianMatrix::with_tol(m.clone(), hermiticity_tol)?;
                let min = h.min_eigenvalue();
                if min <= pd_floor {
                    return Err(CoreError::DegenerateMetric(format!(
                        "metric at node {node} has min eigenvalue {min:.3e} ≤ pd_floor"
                    )));
                }
            }
        }
        Ok(Self { field, kind })
    }

    pub fn from_fn(
        chart: &CoordinateChart,
        dim: usize,
        kind: MetricKind,
        f: impl Fn(&[C64]) -> ComplexMatrix,
    ) -> Result<Self> {
        Self::new(MatrixField::from_fn(chart, dim, f), kind)
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.field.chart
    }

    pub fn dim(&self) -> usize {
        self.field.dim
    }

    /// Pointwise inverse metric.
    pub fn inverse_field(&self) -> Result<MatrixField> {
        let values: Vec<ComplexMatrix> = self
            .field
            .values
            .par_iter()
            .map(|m| m.inverse())
            .collect::<Result<_>>()?;
        Ok(MatrixField { chart: self.field.chart.clone(), dim: self.field.dim, values })
    }

    /// Field of ln det h (real for Hermitian positive-definite h).
    pub fn logdet_field(&self) -> Result<ScalarField> {
        let values: Vec<C64> = self
            .field
            .values
            .par_iter()
            .map(|m| {
                HermitianMatrix::with_tol(m.clone(), 1e-8)
                    .and_then(|h| h.logdet())
            })
            .collect::<Result<_>>()?;
        Ok(ScalarField { chart: self.field.chart.clone(), values })
    }
}

/// Connection coefficients at one node: `unbarred[i]` is the matrix
/// Γ^k_{ij} (rows k, columns j); the barred block is its conjugate and the
/// mixed-index components vanish identically for a Hermitian metric.
#[derive(Debug, Clone)]
pub struct ConnectionCoefficients {
    pub unbarred: Vec<ComplexMatrix>,
    pub barred: Vec<ComplexMatrix>,
}

/// Γ^k_{ij} = h^{kl̄} ∂h_{jl̄}/∂x^i, as the matrix product H⁻¹·(∂_i H).
pub fn connection(h: &MetricField, node: usize) -> Result<ConnectionCoefficients> {
    let n_axes = h.chart().n_axes();
    let hinv = h
        .field
        .at(node)
        .inverse()
        .map_err(|_| CoreError::DegenerateMetric("singular metric at node".into()))?;
    let mut unbarred = Vec::with_capacity(n_axes);
    for i in 0..n_axes {
        let dh = h.field.wirtinger(i, Wirtinger::Holomorphic)?;
        unbarred.push(hinv.mul(dh.at(node)));
    }
    let barred = unbarred
        .iter()
        .map(|g| {
            let mut c = g.clone();
            for v in &mut c.entries {
                *v = v.conj();
            }
            c
        })
        .collect();
    Ok(ConnectionCoefficients { unbarred, barred })
}

/// Intrinsic Ricci tensor field R_{īj} = −∂_j ∂_ī ln det h, evaluated as
/// nested Wirtinger stencils on the (real) log-determinant field. On the
/// stencil-valid interior (margin ≥ 2) the central operators commute, so
/// the output is Hermitian to roundoff; boundary nodes fall back to
/// one-sided stencils and carry reduced accuracy. Returns the field and
/// the maximum pre-symmetrization Hermiticity drift over the interior.
pub fn ricci_field(h: &MetricField) -> Result<(MatrixField, f64)> {
    let chart = h.chart().clone();
    let n_axes = chart.n_axes();
    let l = h.logdet_field()?;
    let mut out = MatrixField {
        chart: chart.clone(),
        dim: n_axes,
        values: vec![ComplexMatrix::zeros(n_axes, n_axes); chart.n_nodes()],
    };
    for i in 0..n_axes {
        let s_i = l.wirtinger(i, Wirtinger::Antiholomorphic)?;
        for j in 0..n_axes {
            let d = s_i.wirtinger(j, Wirtinger::Holomorphic)?;
            for (node, v) in d.values.into_iter().enumerate() {
                out.values[node][(i, j)] = -v;
            }
        }
    }
    let mut max_drift: f64 = 0.0;
    for (node, m) in out.values.iter_mut().enumerate() {
        if chart.is_interior(node, 2) {
            max_drift = max_drift.max(m.hermiticity_drift());
        }
        *m = m.symmetrize();
    }
    Ok((out, max_drift))
}

/// Ricci at one node (margin permitting).
pub fn ricci(h: &MetricField, node: usize) -> Result<HermitianMatrix> {
    let (field, _) = ricci_field(h)?;
    HermitianMatrix::with_tol(field.values[node].clone(), 1.0)
}

/// Independent Ricci route following the contraction display
/// R_{īj} = −∂_j ( h^{k̄l} ∂h_{k̄l}/∂x^{i*} ) = −∂_j tr(H⁻¹ ∂_ī H):
/// metric derivatives contracted pointwise, then differentiated. Agrees
/// with `ricci_field` to stencil accuracy; used for two-route checks.
pub fn ricci_field_contraction_route(h: &MetricField) -> Result<MatrixField> {
    let chart = h.chart().clone();
    let n_axes = chart.n_axes();
    let hinv = h.inverse_field()?;
    let mut s_fields = Vec::with_capacity(n_axes);
    for i in 0..n_axes {
        let dh = h.field.wirtinger(i, Wirtinger::Antiholomorphic)?;
        let values: Vec<C64> = (0..chart.n_nodes())
            .into_par_iter()
            .map(|node| hinv.at(node).mul(dh.at(node)).trace())
            .collect();
        s_fields.push(ScalarField { chart: chart.clone(), values });
    }
    let mut out = MatrixField {
        chart: chart.clone(),
        dim: n_axes,
        values: vec![ComplexMatrix::zeros(n_axes, n_axes); chart.n_nodes()],
    };
    for i in 0..n_axes {
        for j in 0..n_axes {
            let d = s_fields[i].wirtinger(j, Wirtinger::Holomorphic)?;
            for (node, v) in d.values.into_iter().enumerate() {
                out.values[node][(i, j)] = -v;
            }
        }
    }
    Ok(out)
}

/// Third route: −∂_j ∂_ī ln det h via direct second-derivative stencils
/// (no nested first derivatives). Feeds the Kähler potential diagnostics.
pub fn ricci_field_direct_second_route(h: &MetricField) -> Result<MatrixField> {
    let chart = h.chart().clone();
    let n_axes = chart.n_axes();
    let l = h.logdet_field()?;
    let mut out = MatrixField {
        chart: chart.clone(),
        dim: n_axes,
        values: vec![ComplexMatrix::zeros(n_axes, n_axes); chart.n_nodes()],
    };
    for i in 0..n_axes {
        for j in 0..n_axes {
            let d = l.second_wirtinger(i, j)?;
            for (node, v) in d.values.into_iter().enumerate() {
                out.values[node][(i, j)] = -v;
            }
        }
    }
    Ok(out)
}

/// Extrinsic curvature data of a metric field over the t-chart.
#[derive(Debug, Clone)]
pub struct ExtrinsicReport {
    /// K_{īj} = ½ ∂h_{īj}/∂t^a, one matrix per t-axis.
    pub k_ext: Vec<ComplexMatrix>,
    /// Scalar contraction K = h^{īj}K_{īj} = tr(H⁻¹K) per t-axis.
    pub k_scalar: Vec<C64>,
    /// K_a = ½ ∂(ln det h)/∂t^a via the log-determinant stencil route.
    pub k_a: Vec<C64>,
    /// max_a |k_scalar[a] − k_a[a]| — the two routes must agree within
    /// the finite-difference tolerance.
    pub identity_gap: f64,
}

pub fn extrinsic(h: &MetricField, node: usize) -> Result<ExtrinsicReport> {
    let n_axes = h.chart().n_axes();
    let hinv = h.field.at(node).inverse().map_err(|_| {
        CoreError::DegenerateMetric("singular metric in extrinsic".into())
    })?;
    let logdet = h.logdet_field()?;
    let mut k_ext = Vec::with_capacity(n_axes);
    let mut k_scalar = Vec::with_capacity(n_axes);
    let mut k_a = Vec::with_capacity(n_axes);
    for a in 0..n_axes {
        let dh = h.field.wirtinger(a, Wirtinger::Holomorphic)?;
        let k = dh.at(node).scale(C64::new(0.5, 0.0));
        k_scalar.push(hinv.mul(&k).trace());
        k_ext.push(k);
        let dl = logdet.wirtinger(a, Wirtinger::Holomorphic)?;
        k_a.push(dl.values[node] * 0.5);
    }
    let identity_gap = k_scalar
        .iter()
        .zip(&k_a)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    Ok(ExtrinsicReport { k_ext, k_scalar, k_a, identity_gap })
}

/// Scalar extrinsic curvature field K_a(t) = ½ tr(H⁻¹ ∂_a H), one scalar
/// field per t-axis (contraction route, no log-determinant stencil).
pub fn k_scalar_fields(h: &MetricField) -> Result<Vec<ScalarField>> {
    let chart = h.chart().clone();
    let hinv = h.inverse_field()?;
    let mut out = Vec::with_capacity(chart.n_axes());
    for a in 0..chart.n_axes() {
        let dh = h.field.wirtinger(a, Wirtinger::Holomorphic)?;
        let values: Vec<C64> = (0..chart.n_nodes())
            .into_par_iter()
            .map(|node| hinv.at(node).mul(dh.at(node)).trace() * 0.5)
            .collect();
        out.push(ScalarField { chart: chart.clone(), values });
    }
    Ok(out)
}

/// A family of basis kets sampled on a chart: values[node][i] is |X_i⟩ at
/// that node (all ambient dimensions equal).
#[derive(Debug, Clone)]
pub struct BasisField {
    pub chart: CoordinateChart,
    pub count: usize,
    pub ambient: usize,
    pub values: Vec<Vec<ComplexVector>>,
}

impl BasisField {
    pub fn from_fn(
        chart: &CoordinateChart,
        count: usize,
        ambient: usize,
        f: impl Fn(&[C64], usize) -> ComplexVector,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(chart.n_nodes());
        for node in 0..chart.n_nodes() {
            let coords = chart.coords(node);
            let mut kets = Vec::with_capacity(count);
            for i in 0..count {
                let v = f(&coords, i);
                if v.dim() != ambient {
                    return Err(CoreError::invalid("basis field ambient mismatch"));
                }
                kets.push(v);
            }
            values.push(kets);
        }
        Ok(Self { chart: chart.clone(), count, ambient, values })
    }

    /// Scalar field of one ambient component of one family member.
    pub fn component_field(&self, member: usize, component: usize) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            values: self
                .values
                .iter()
                .map(|kets| kets[member].entries[component])
                .collect(),
        }
    }

    /// Pointwise Gram matrices of the family.
    pub fn gram_field(&self) -> Result<MetricField> {
        let values: Vec<ComplexMatrix> = self
            .values
            .iter()
            .map(|kets| {
                crate::linalg::gram(kets).map(|g| g.into_matrix())
            })
            .collect::<Result<_>>()?;
        MetricField::new(
            MatrixField { chart: self.chart.clone(), dim: self.count, values },
            MetricKind::H,
        )
    }

    /// Pointwise dual family X^i (Gram-inverse combination, positive
    /// signature; the sign cancels in the relative metric).
    pub fn dual_field(&self) -> Result<BasisField> {
        let mut values = Vec::with_capacity(self.values.len());
        for kets in &self.values {
            let duals = crate::linalg::dual_basis_with_cond(
                kets,
                crate::linalg::Signature::Spacelike,
                tol::COND_MAX,
            )?;
            values.push(duals);
        }
        Ok(BasisField {
            chart: self.chart.clone(),
            count: self.count,
            ambient: self.ambient,
            values,
        })
    }

    /// Wirtinger derivative of every member along an axis.
    pub fn wirtinger(&self, axis: usize, kind: Wirtinger) -> Result<BasisField> {
        let mut out = self.clone();
        for i in 0..self.count {
            for c in 0..self.ambient {
                let d = self.component_field(i, c).wirtinger(axis, kind)?;
                for (node, v) in d.values.into_iter().enumerate() {
                    out.values[node][i].entries[c] = v;
                }
            }
        }
        Ok(out)
    }
}

/// Relative metric and inertial-force data at one node of the t-chart.
#[derive(Debug, Clone)]
pub struct RelativeMetricReport {
    /// g_{āb} = Σ_i ⟨∂X^i/∂t^a | ∂X_i/∂t^b⟩.
    pub g: ComplexMatrix,
    /// Real part: g = G + (i/2)Ω.
    pub g_real: ComplexMatrix,
    /// Imaginary part scaled by 2 (so Ω is real).
    pub omega: ComplexMatrix,
    /// Inertial force F_{āb} = ∂K_b/∂t^{a*}.
    pub f: ComplexMatrix,
    /// Berry curvature B = F − F† (anti-Hermitian by construction).
    pub b: ComplexMatrix,
    /// ‖F − g‖∞: the paper's F = g claim is reported, never assumed.
    pub f_minus_g: f64,
}

/// Relative metric g, inertial force F and Berry curvature B from a basis
/// field on the t-chart.
pub fn relative_metric(basis: &BasisField, node: usize) -> Result<RelativeMetricReport> {
    let n_axes = basis.chart.n_axes();
    let duals = basis.dual_field()?;
    // Derivatives of duals and of kets along every axis.
    let mut d_dual = Vec::with_capacity(n_axes);
    let mut d_ket = Vec::with_capacity(n_axes);
    for a in 0..n_axes {
        d_dual.push(duals.wirtinger(a, Wirtinger::Holomorphic)?);
        d_ket.push(basis.wirtinger(a, Wirtinger::Holomorphic)?);
    }
    let mut g = ComplexMatrix::zeros(n_axes, n_axes);
    for a in 0..n_axes {
        for b in 0..n_axes {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..basis.count {
                acc += d_dual[a].values[node][i].inner(&d_ket[b].values[node][i]);
            }
            g[(a, b)] = acc;
        }
    }
    // F from the scalar extrinsic curvature fields of the family Gram.
    let gram = basis.gram_field()?;
    let k_fields = k_scalar_fields(&gram)?;
    let mut f = ComplexMatrix::zeros(n_axes, n_axes);
    for a in 0..n_axes {
        for b in 0..n_axes {
            let df = k_fields[b].wirtinger(a, Wirtinger::Antiholomorphic)?;
            f[(a, b)] = df.values[node];
        }
    }
    let b_mat = f.sub(&f.adjoint());
    let mut g_real = ComplexMatrix::zeros(n_axes, n_axes);
    let mut omega = ComplexMatrix::zeros(n_axes, n_axes);
    for a in 0..n_axes {
        for b2 in 0..n_axes {
            g_real[(a, b2)] = C64::new(g[(a, b2)].re, 0.0);
            omega[(a, b2)] = C64::new(2.0 * g[(a, b2)].im, 0.0);
        }
    }
    let f_minus_g = f.sub(&g).max_norm();
    Ok(RelativeMetricReport { g, g_real, omega, f: f.clone(), b: b_mat, f_minus_g })
}

/// Kähler diagnostics at one node.
#[derive(Debug, Clone)]
pub struct KahlerReport {
    /// max_{a,b} |F_{āb} − ∂_ā∂_b ln√det h| between the contraction route
    /// and the direct potential (log-determinant) route.
    pub potential_gap: f64,
    /// Closedness obstruction: the anti-Hermitian content of the discrete
    /// plaquette curvature of the K_a connection; ≈ 0 iff K derives from a
    /// real potential (the Kähler case).
    pub closedness_gap: f64,
}

/// Discrete plaquette curvature of a connection field K along one axis:
/// F̂ at the plaquette with lower-left corner `node`, from the closed-loop
/// trapezoid of K around the elementary Re×Im cell divided by 2i·ΔA
/// (∮K dt = 2i ∬(∂K/∂t*) dA exactly in the continuum).
pub fn plaquette_curvature(
    k: &ScalarField,
    axis: usize,
    node: usize,
) -> Result<C64> {
    let chart = &k.chart;
    let slot_re = 2 * axis;
    let slot_im = 2 * axis + 1;
    let n00 = node;
    let n10 = chart
        .shifted(node, slot_re, 1)
        .ok_or_else(|| CoreError::InvalidGrid("plaquette exits grid".into()))?;
    let n11 = chart
        .shifted(n10, slot_im, 1)
        .ok_or_else(|| CoreError::InvalidGrid("plaquette exits grid".into()))?;
    let n01 = chart
        .shifted(node, slot_im, 1)
        .ok_or_else(|| CoreError::InvalidGrid("plaquette exits grid".into()))?;
    let du = chart.spacing(axis, crate::chart::RealDir::Re);
    let dv = chart.spacing(axis, crate::chart::RealDir::Im);
    let i = C64::new(0.0, 1.0);
    let seg = |a: usize, b: usize, dt: C64| (k.values[a] + k.values[b]) * 0.5 * dt;
    let loop_integral = seg(n00, n10, C64::new(du, 0.0))
        + seg(n10, n11, i * dv)
        + seg(n11, n01, C64::new(-du, 0.0))
        + seg(n01, n00, -i * dv);
    Ok(loop_integral / (C64::new(0.0, 2.0) * (du * dv)))
}

pub fn kahler_check(h: &MetricField, node: usize) -> Result<KahlerReport> {
    let chart = h.chart();
    let n_axes = chart.n_axes();
    let k_fields = k_scalar_fields(h)?;
    let logdet = h.logdet_field()?;
    let half_logdet = ScalarField {
        chart: chart.clone(),
        values: logdet.values.iter().map(|&v| v * 0.5).collect(),
    };
    let mut potential_gap: f64 = 0.0;
    for a in 0..n_axes {
        for b in 0..n_axes {
            let f_route = k_fields[b]
                .wirtinger(a, Wirtinger::Antiholomorphic)?
                .values[node];
            let p_route = half_logdet.second_wirtinger(a, b)?.values[node];
            potential_gap = potential_gap.max((f_route - p_route).norm());
        }
    }
    let mut closedness_gap: f64 = 0.0;
    for a in 0..n_axes {
        // Use the plaquette whose corner keeps us on-grid.
        let mut corner = node;
        let mi = chart.multi_index(node);
        if mi[2 * a] + 1 >= chart.axes[a].n_re {
            corner = chart
                .shifted(corner, 2 * a, -1)
                .ok_or_else(|| CoreError::InvalidGrid("degenerate axis".into()))?;
        }
        if mi[2 * a + 1] + 1 >= chart.axes[a].n_im {
            corner = chart
                .shifted(corner, 2 * a + 1, -1)
                .ok_or_else(|| CoreError::InvalidGrid("degenerate axis".into()))?;
        }
        let f_hat = plaquette_curvature(&k_fields[a], a, corner)?;
        closedness_gap = closedness_gap.max((f_hat - f_hat.conj()).norm());
    }
    Ok(KahlerReport { potential_gap, closedness_gap })
}

/// Everything the geometry engine can say about one node.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    pub connection: Option<ConnectionCoefficients>,
    pub ricci: Option<HermitianMatrix>,
    pub ricci_hermiticity_drift: Option<f64>,
    pub extrinsic: Option<ExtrinsicReport>,
    pub relative: Option<RelativeMetricReport>,
    pub kahler: Option<KahlerReport>,
}
