//! Non-integrable phase accumulation along paths and loops, the Re/Im split
//! into norm stretch and geometric phase, Stokes consistency, and the
//! Anandan-Aharonov speed/energy-variance relation.
//!
//! Conventions (fixed by requiring internal Stokes/Green consistency under
//! the Wirtinger convention ∂/∂t = ½(∂_u − i∂_v)):
//!
//! * extrinsic-curvature connections accumulate Θ = ½ ∫ K_a dt^a;
//! * Berry connections A = ⟨ψ|∂ψ⟩ and state-overlap accumulation carry no ½:
//!   Θ = Σ ln⟨ψ_k|ψ_{k+1}⟩;
//! * ∮ K dt = 2i ∬ (∂K/∂t*) du dv exactly in the continuum, which is what
//!   `stokes_check` discretizes on the two routes.
//!
//! Geometric phases are reported both raw (additive) and wrapped to (−π, π].

use crate::chart::{ScalarField, Wirtinger};
use crate::error::{CoreError, Result};
use crate::linalg::{eigh, ComplexMatrix, ComplexVector, C64};

/// A real-parameterized polyline in one complex coordinate.
#[derive(Debug, Clone)]
pub struct Path {
    pub samples: Vec<C64>,
    pub closed: bool,
}

impl Path {
    pub fn new(samples: Vec<C64>, closed: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(CoreError::InvalidPath("need ≥ 2 samples".into()));
        }
        if closed {
            let gap = (samples[0] - samples[samples.len() - 1]).norm();
            if gap > 1e-12 {
                return Err(CoreError::InvalidPath(format!(
                    "closed path must end where it starts (gap {gap:.3e})"
                )));
            }
        }
        Ok(Self { samples, closed })
    }

    /// Circle of radius r around `center`, n segments, counterclockwise.
    pub fn circle(center: C64, r: f64, n: usize) -> Result<Self> {
        let mut samples: Vec<C64> = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + C64::new(r * a.cos(), r * a.sin())
            })
            .collect();
        samples.push(samples[0]);
        Path::new(samples, true)
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self { samples, closed: self.closed }
    }

    /// Concatenation on a shared endpoint.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if (self.samples[self.samples.len() - 1] - other.samples[0]).norm() > 1e-12 {
            return Err(CoreError::InvalidPath(
                "paths do not share an endpoint".into(),
            ));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples[1..]);
        Path::new(samples, false)
    }
}

/// Accumulated complex phase along a path.
#[derive(Debug, Clone)]
pub struct PhaseRecord {
    pub theta: C64,
    /// Re Θ — the norm-stretch log-factor.
    pub re_part: f64,
    /// Im Θ — the geometric phase (raw, additive).
    pub im_part: f64,
    /// Per-segment increments dΘ.
    pub increments: Vec<C64>,
}

impl PhaseRecord {
    fn from_increments(increments: Vec<C64>) -> Self {
        let theta: C64 = increments.iter().sum();
        Self { theta, re_part: theta.re, im_part: theta.im, increments }
    }

    /// Geometric phase wrapped to (−π, π].
    pub fn wrapped_geometric_phase(&self) -> f64 {
        wrap_angle(self.im_part)
    }
}

/// Wrap an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Where the connection values along a path come from.
pub enum ConnectionSource<'a> {
    /// Extrinsic-curvature connection sampled on a single-axis chart,
    /// interpolated bilinearly; accumulates Θ = ½ ∫ K dt.
    ExtrinsicField(&'a ScalarField),
    /// Closed-form extrinsic-curvature connection; Θ = ½ ∫ K dt.
    ExtrinsicFn(&'a dyn Fn(C64) -> C64),
    /// Closed-form Berry connection A = ⟨ψ|∂ψ⟩; Θ = ∫ A dt (no ½).
    BerryFn(&'a dyn Fn(C64) -> C64),
}

/// Trapezoidal line integral of the connection along the path.
pub fn accumulate_phase(source: &ConnectionSource, path: &Path) -> Result<PhaseRecord> {
    let factor = match source {
        ConnectionSource::ExtrinsicField(_) | ConnectionSource::ExtrinsicFn(_) => 0.5,
        ConnectionSource::BerryFn(_) => 1.0,
    };
    let eval = |z: C64| -> Result<C64> {
        match source {
            ConnectionSource::ExtrinsicField(f) => f.interpolate(z),
            ConnectionSource::ExtrinsicFn(f) => Ok(f(z)),
            ConnectionSource::BerryFn(f) => Ok(f(z)),
        }
    };
    let mut increments = Vec::with_capacity(path.samples.len() - 1);
    let mut prev_val = eval(path.samples[0])?;
    for w in path.samples.windows(2) {
        let next_val = eval(w[1])?;
        let dt = w[1] - w[0];
        increments.push((prev_val + next_val) * 0.5 * dt * factor);
        prev_val = next_val;
    }
    Ok(PhaseRecord::from_increments(increments))
}

/// Phase accumulation from a discrete family of states: Θ = Σ ln⟨ψ_k|ψ_k+1⟩.
/// Each per-segment logarithm uses the principal branch; for densely sampled
/// paths the increments are small and the sum is branch-safe.
pub fn accumulate_phase_overlaps(states: &[ComplexVector]) -> Result<PhaseRecord> {
    if states.len() < 2 {
        return Err(CoreError::InvalidPath("need ≥ 2 states".into()));
    }
    let mut increments = Vec::with_capacity(states.len() - 1);
    for w in states.windows(2) {
        let ov = w[0].inner(&w[1]);
        if ov.norm() == 0.0 {
            return Err(CoreError::InvalidPath(
                "orthogonal neighbors: overlap vanishes".into(),
            ));
        }
        increments.push(ov.ln());
    }
    Ok(PhaseRecord::from_increments(increments))
}

/// Pancharatnam phase: arg of the product of forward overlaps (single
/// principal-branch argument of the full product). The gauge-robust oracle
/// route for closed state paths.
pub fn pancharatnam_phase(states: &[ComplexVector]) -> Result<f64> {
    if states.len() < 2 {
        return Err(CoreError::InvalidPath("need ≥ 2 states".into()));
    }
    let mut prod = C64::new(1.0, 0.0);
    for w in states.windows(2) {
        let ov = w[0].inner(&w[1]);
        if ov.norm() == 0.0 {
            return Err(CoreError::InvalidPath(
                "orthogonal neighbors: overlap vanishes".into(),
            ));
        }
        prod *= ov / ov.norm();
    }
    Ok(prod.arg())
}

/// Result of a discrete Stokes comparison over a chart rectangle.
#[derive(Debug, Clone)]
pub struct StokesReport {
    /// ∮ K dt along the rectangle (grid-node trapezoid).
    pub line_integral: C64,
    /// Plaquette sum of the discrete curvature 2-form 2i·F·ΔA with
    /// F = ∂K/∂t* from Wirtinger stencils (the independent route).
    pub surface_integral: C64,
    /// |Im(line) − Im(surface)|.
    pub gap: f64,
}

/// Compare the loop integral of K over an axis-aligned, grid-aligned
/// rectangle against the stencil-route surface integral of its curvature.
pub fn stokes_check(k: &ScalarField, rect: &Path) -> Result<StokesReport> {
    if k.chart.n_axes() != 1 {
        return Err(CoreError::invalid("stokes_check needs a single-axis chart"));
    }
    if !rect.closed || rect.samples.len() != 5 {
        return Err(CoreError::InvalidPath(
            "loop must be a closed rectangle given by 4 corners".into(),
        ));
    }
    let ax = &k.chart.axes[0];
    let to_idx = |z: C64| -> Result<(usize, usize)> {
        let fu = (z.re - ax.re0) / ax.d_re;
        let fv = (z.im - ax.im0) / ax.d_im;
        let iu = fu.round();
        let iv = fv.round();
        if (fu - iu).abs() > 1e-9 || (fv - iv).abs() > 1e-9 {
            return Err(CoreError::InvalidPath(
                "rectangle corners must lie on grid nodes".into(),
            ));
        }
        if iu < 0.0 || iv < 0.0 || iu >= ax.n_re as f64 || iv >= ax.n_im as f64 {
            return Err(CoreError::InvalidPath("corner outside the chart".into()));
        }
        Ok((iu as usize, iv as usize))
    };
    let c00 = to_idx(rect.samples[0])?;
    let c10 = to_idx(rect.samples[1])?;
    let c11 = to_idx(rect.samples[2])?;
    let c01 = to_idx(rect.samples[3])?;
    if !(c00.1 == c10.1 && c10.0 == c11.0 && c11.1 == c01.1 && c01.0 == c00.0) {
        return Err(CoreError::InvalidPath(
            "corners do not form an axis-aligned rectangle".into(),
        ));
    }
    let (iu0, iu1) = (c00.0.min(c10.0), c00.0.max(c10.0));
    let (iv0, iv1) = (c00.1.min(c11.1), c00.1.max(c11.1));
    if iu0 == iu1 || iv0 == iv1 {
        return Err(CoreError::InvalidPath("rectangle is degenerate".into()));
    }
    let at = |iu: usize, iv: usize| k.values[k.chart.flat_index(&[iu, iv])];
    let du = ax.d_re;
    let dv = ax.d_im;
    let i = C64::new(0.0, 1.0);
    // Counterclockwise trapezoid through every grid node on the boundary.
    let mut line = C64::new(0.0, 0.0);
    for iu in iu0..iu1 {
        line += (at(iu, iv0) + at(iu + 1, iv0)) * 0.5 * du;
        line -= (at(iu, iv1) + at(iu + 1, iv1)) * 0.5 * du;
    }
    for iv in iv0..iv1 {
        line += (at(iu1, iv) + at(iu1, iv + 1)) * 0.5 * (i * dv);
        line -= (at(iu0, iv) + at(iu0, iv + 1)) * 0.5 * (i * dv);
    }
    // Surface route: F = ∂K/∂t* by stencils, cell-averaged.
    let f = k.wirtinger(0, Wirtinger::Antiholomorphic)?;
    let fat = |iu: usize, iv: usize| f.values[f.chart.flat_index(&[iu, iv])];
    let mut surface = C64::new(0.0, 0.0);
    for iu in iu0..iu1 {
        for iv in iv0..iv1 {
            let avg = (fat(iu, iv) + fat(iu + 1, iv) + fat(iu, iv + 1)
                + fat(iu + 1, iv + 1))
                * 0.25;
            surface += C64::new(0.0, 2.0) * avg * (du * dv);
        }
    }
    Ok(StokesReport {
        line_integral: line,
        surface_integral: surface,
        gap: (line.im - surface.im).abs(),
    })
}

/// One step of the Fubini-Study-speed vs energy-variance series.
#[derive(Debug, Clone)]
pub struct SpeedVariancePoint {
    pub t: f64,
    /// 2(1 − |⟨ψ(t)|ψ(t+dt)⟩|)/dt².
    pub fs_speed_sq: f64,
    /// ⟨ψ|H²|ψ⟩ − ⟨ψ|H|ψ⟩².
    pub energy_variance: f64,
}

/// Propagate ψ under a Hermitian generator and tabulate Fubini-Study speed
/// squared against energy variance per step. With the 2(1−|⟨·|·⟩|)/dt²
/// normalization the proportionality constant is exactly 1 (fixed by the
/// two-level oracle): fs² = ⟨δE²⟩ + O(dt²‖H‖⁴).
pub fn anandan_aharonov(
    generator: &ComplexMatrix,
    psi0: &ComplexVector,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<SpeedVariancePoint>> {
    if !generator.is_square() || generator.rows != psi0.dim() {
        return Err(CoreError::invalid("generator/state dimension mismatch"));
    }
    if generator.hermiticity_drift() > 1e-10 {
        return Err(CoreError::invalid("generator must be Hermitian"));
    }
    if dt <= 0.0 {
        return Err(CoreError::invalid("dt must be > 0"));
    }
    let (evals, vecs) = eigh(generator);
    let vdag = vecs.adjoint();
    let norm = psi0.norm();
    if norm == 0.0 {
        return Err(CoreError::invalid("zero initial state"));
    }
    let psi0 = psi0.scale(C64::new(1.0 / norm, 0.0));
    // Coefficients in the eigenbasis.
    let coeffs = vdag.mul_vec(&psi0);
    let propagate = |t: f64| -> ComplexVector {
        let mut c = coeffs.clone();
        for (k, e) in evals.iter().enumerate() {
            c.entries[k] *= (C64::new(0.0, -e * t)).exp();
        }
        vecs.mul_vec(&c)
    };
    // Energy variance is conserved; compute once from the eigen expansion.
    let mean: f64 = coeffs
        .entries
        .iter()
        .zip(&evals)
        .map(|(c, &e)| c.norm_sqr() * e)
        .sum();
    let mean_sq: f64 = coeffs
        .entries
        .iter()
        .zip(&evals)
        .map(|(c, &e)| c.norm_sqr() * e * e)
        .sum();
    let var = mean_sq - mean * mean;
    let mut out = Vec::with_capacity(n_steps);
    let mut psi_t = propagate(0.0);
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let psi_next = propagate(t + dt);
        let overlap = psi_t.inner(&psi_next).norm();
        let fs = 2.0 * (1.0 - overlap) / (dt * dt);
        out.push(SpeedVariancePoint { t, fs_speed_sq: fs, energy_variance: var });
        psi_t = psi_next;
    }
    Ok(out)
}

/// Ground state of n̂·σ (spin-½ coherent frame), n̂ from polar angles.
pub fn spin_half_ground(theta: f64, phi: f64) -> ComplexVector {
    ComplexVector::new(vec![
        C64::new((theta / 2.0).sin(), 0.0),
        -C64::new(0.0, phi).exp() * (theta / 2.0).cos(),
    ])
    .unwrap()
}
