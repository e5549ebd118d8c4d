//! Entangled relative states: calibration, conditional projection, relative
//! amplitudes and probabilities, metric-contracted partial trace, and
//! expectation values.
//!
//! An entangled state pairs two basis families one-to-one through a fixed
//! coefficient vector C (the "cross-reference table" written during
//! calibration). C never changes afterwards; all dynamics lives in the
//! relative evolution of the families themselves. Conditioning the state on
//! a reference state of one family yields the relative amplitudes C_i/a_i*
//! of the other family; squared moduli give the relative probabilities
//! |C_i/a_i|² that replace absolute probabilities.

use crate::error::{CoreError, Result};
use crate::linalg::{
    dual_basis_with_cond, gram, ComplexMatrix, ComplexVector, HermitianMatrix,
    Signature, C64,
};
use crate::tol;

/// A family of (possibly non-orthonormal) basis vectors in a common ambient
/// space, with a signature tag for the dual pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFamily {
    pub vectors: Vec<ComplexVector>,
    pub signature: Signature,
    pub label: String,
}

impl BasisFamily {
    pub fn new(
        vectors: Vec<ComplexVector>,
        signature: Signature,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::with_cond(vectors, signature, label, tol::COND_MAX)
    }

    pub fn with_cond(
        vectors: Vec<ComplexVector>,
        signature: Signature,
        label: impl Into<String>,
        cond_max: f64,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(CoreError::invalid("basis family needs ≥ 1 vector"));
        }
        let g = gram(&vectors)?;
        let cond = g.condition_number();
        if !cond.is_finite() || cond >= cond_max {
            return Err(CoreError::DegenerateBasis(format!(
                "family Gram condition number {cond:.3e} exceeds {cond_max:.3e}"
            )));
        }
        Ok(Self { vectors, signature, label: label.into() })
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn gram(&self) -> Result<HermitianMatrix> {
        gram(&self.vectors)
    }

    pub fn duals(&self) -> Result<Vec<ComplexVector>> {
        dual_basis_with_cond(&self.vectors, self.signature, tol::COND_MAX)
    }
}

/// Which probability normalization a distribution carries.
///
/// `Raw` is the paper-literal relative probability |C_i/a_i|², which does not
/// generally sum to one; `Renormalized` divides by the total so downstream
/// averages see a distribution. Expectation values default to `Renormalized`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationMode {
    Raw,
    #[default]
    Renormalized,
}

/// Relative amplitudes and probabilities of one subsystem conditioned on the
/// other. `omitted_indices` records entries skipped because both the
/// coefficient and the condition amplitude vanished.
#[derive(Debug, Clone)]
pub struct RelativeDistribution {
    pub indices: Vec<usize>,
    pub amplitudes: Vec<C64>,
    pub probabilities: Vec<f64>,
    pub normalization_mode: NormalizationMode,
    pub omitted_indices: Vec<usize>,
}

impl RelativeDistribution {
    pub fn probability_at(&self, index: usize) -> Option<f64> {
        self.indices
            .iter()
            .position(|&i| i == index)
            .map(|k| self.probabilities[k])
    }
}

/// A pure state of one subsystem expanded over a basis family.
#[derive(Debug, Clone)]
pub struct SubsystemState {
    pub amplitudes: ComplexVector,
    pub family_label: String,
}

impl SubsystemState {
    pub fn new(amplitudes: ComplexVector, family: &BasisFamily) -> Result<Self> {
        if amplitudes.dim() != family.count() {
            return Err(CoreError::invalid(format!(
                "condition has {} amplitudes but family '{}' has {} vectors",
                amplitudes.dim(),
                family.label,
                family.count()
            )));
        }
        Ok(Self { amplitudes, family_label: family.label.clone() })
    }
}

/// The calibrated entangled state Σ_i C_i |X_i⟩⊗|T_i⟩.
///
/// Coefficients are immutable after construction; the two families must
/// have equal count (one-to-one calibration) and C must be normalized.
#[derive(Debug, Clone)]
pub struct EntangledState {
    coefficients: ComplexVector,
    x_basis: BasisFamily,
    t_basis: BasisFamily,
}

impl EntangledState {
    pub fn new(
        coefficients: ComplexVector,
        x_basis: BasisFamily,
        t_basis: BasisFamily,
    ) -> Result<Self> {
        let n = coefficients.dim();
        if x_basis.count() != n || t_basis.count() != n {
            return Err(CoreError::invalid(format!(
                "coefficients ({n}) and families ({}, {}) must have equal count",
                x_basis.count(),
                t_basis.count()
            )));
        }
        let norm = coefficients.norm_sqr();
        if (norm - 1.0).abs() > tol::NORMALIZATION_TOL {
            return Err(CoreError::invalid(format!(
                "Σ|C_i|² = {norm} is not 1 within {:.0e}",
                tol::NORMALIZATION_TOL
            )));
        }
        Ok(Self { coefficients, x_basis, t_basis })
    }

    pub fn coefficients(&self) -> &ComplexVector {
        &self.coefficients
    }

    pub fn x_basis(&self) -> &BasisFamily {
        &self.x_basis
    }

    pub fn t_basis(&self) -> &BasisFamily {
        &self.t_basis
    }

    pub fn count(&self) -> usize {
        self.coefficients.dim()
    }

    /// The canonical reference expansion of the t-family: real positive
    /// amplitudes a_i = ((G⁻¹)_ii)^{-1/2} with G the family Gram. For this
    /// condition the raw conditional probabilities coincide with the diagonal
    /// of the metric-contracted partial trace.
    pub fn reference_expansion(&self) -> Result<SubsystemState> {
        let g = self.t_basis.gram()?;
        let ginv = g.as_matrix().inverse()?;
        let amps: Vec<C64> = (0..self.count())
            .map(|i| C64::new(1.0 / ginv[(i, i)].re.sqrt(), 0.0))
            .collect();
        SubsystemState::new(ComplexVector::new(amps)?, &self.t_basis)
    }
}

/// Conditional projection ⟨T|X,T⟩: the relative amplitude of |X_i⟩ given the
/// reference state with amplitudes a over the entangled t-family is
/// C_i / a_i*, with raw probability |C_i/a_i|².
pub fn conditional_project(
    state: &EntangledState,
    condition: &SubsystemState,
    mode: NormalizationMode,
) -> Result<RelativeDistribution> {
    if condition.family_label != state.t_basis.label {
        return Err(CoreError::invalid(format!(
            "condition is expanded over '{}', state's t-family is '{}'",
            condition.family_label, state.t_basis.label
        )));
    }
    if condition.amplitudes.dim() != state.count() {
        return Err(CoreError::invalid("condition amplitude count mismatch"));
    }
    let zero = C64::new(0.0, 0.0);
    let mut indices = Vec::new();
    let mut amplitudes = Vec::new();
    let mut omitted = Vec::new();
    for i in 0..state.count() {
        let c = state.coefficients.entries[i];
        let a = condition.amplitudes.entries[i];
        if a == zero {
            if c == zero {
                omitted.push(i);
                continue;
            }
            return Err(CoreError::UndefinedConditional(format!(
                "condition amplitude a_{i} = 0 while C_{i} ≠ 0"
            )));
        }
        indices.push(i);
        amplitudes.push(c / a.conj());
    }
    let mut probabilities: Vec<f64> =
        amplitudes.iter().map(|z| z.norm_sqr()).collect();
    if mode == NormalizationMode::Renormalized {
        let total: f64 = probabilities.iter().sum();
        if total == 0.0 {
            return Err(CoreError::UndefinedConditional(
                "all relative probabilities vanish".into(),
            ));
        }
        for p in &mut probabilities {
            *p /= total;
        }
    }
    Ok(RelativeDistribution {
        indices,
        amplitudes,
        probabilities,
        normalization_mode: mode,
        omitted_indices: omitted,
    })
}

/// Which subsystem a partial trace integrates out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    X,
    T,
}

/// Metric-contracted partial trace of ρ = |X,T⟩⟨X,T| over one family.
///
/// Tracing over T returns the matrix C_i C_j* (G⁻¹)_{ij} in the X family's
/// index space, where G is the Gram of the traced family: the trace
/// contracts with the subspace metric, not with a Kronecker delta. For an
/// orthonormal traced family this reduces to the textbook partial trace.
pub fn partial_trace_metric(
    state: &EntangledState,
    over: Subsystem,
) -> Result<ComplexMatrix> {
    let traced = match over {
        Subsystem::T => &state.t_basis,
        Subsystem::X => &state.x_basis,
    };
    let g = traced.gram()?;
    let cond = g.condition_number();
    if !cond.is_finite() || cond >= tol::COND_MAX {
        return Err(CoreError::DegenerateMetric(format!(
            "traced family Gram condition number {cond:.3e}"
        )));
    }
    let ginv = g.as_matrix().inverse()?;
    let n = state.count();
    let c = &state.coefficients.entries;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = c[i] * c[j].conj() * ginv[(i, j)];
        }
    }
    Ok(out)
}

/// Expectation value Σ_i P(X_i|T)·⟨X_i|O|X_i⟩ of a Hermitian observable given
/// on the X index space, under the conditioned relative probabilities.
pub fn relative_expectation(
    state: &EntangledState,
    observable: &HermitianMatrix,
    condition: &SubsystemState,
    mode: NormalizationMode,
) -> Result<f64> {
    if observable.dim() != state.count() {
        return Err(CoreError::invalid(format!(
            "observable dimension {} ≠ entangled count {}",
            observable.dim(),
            state.count()
        )));
    }
    let dist = conditional_project(state, condition, mode)?;
    let o = observable.as_matrix();
    let mut acc = 0.0;
    for (k, &i) in dist.indices.iter().enumerate() {
        acc += dist.probabilities[k] * o[(i, i)].re;
    }
    Ok(acc)
}

/// Exchange the roles of system and instrument: families swapped, signatures
/// flipped, coefficients untouched. Applying it twice is the identity.
pub fn swap_roles(state: &EntangledState) -> EntangledState {
    let mut x = state.t_basis.clone();
    let mut t = state.x_basis.clone();
    x.signature = x.signature.flipped();
    t.signature = t.signature.flipped();
    EntangledState { coefficients: state.coefficients.clone(), x_basis: x, t_basis: t }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn orthonormal_family(n: usize, dim: usize, sig: Signature, label: &str) -> BasisFamily {
        let vs = (0..n).map(|i| ComplexVector::basis_state(dim, i)).collect();
        BasisFamily::new(vs, sig, label).unwrap()
    }

    fn simple_state(cs: Vec<C64>) -> EntangledState {
        let n = cs.len();
        let x = orthonormal_family(n, n + 1, Signature::Spacelike, "X");
        let t = orthonormal_family(n, n + 2, Signature::Timelike, "T");
        EntangledState::new(ComplexVector::new(cs).unwrap(), x, t).unwrap()
    }

    /// a, b with C = a∘b normalized; returns (C, a, b).
    fn separable(a: &[C64], b: &[C64]) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let cs: Vec<C64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        let norm = cs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let b: Vec<C64> = b.iter().map(|z| z / norm).collect();
        let cs: Vec<C64> = cs.into_iter().map(|z| z / norm).collect();
        (cs, a.to_vec(), b)
    }

    #[test]
    fn separable_limit_recovers_absolute_probabilities() {
        let (cs, a, b) = separable(
            &[c(0.6, 0.2), c(-0.3, 0.5)],
            &[c(0.5, 0.0), c(0.0, 0.5)],
        );
        let state = simple_state(cs);
        let cond = SubsystemState::new(ComplexVector::new(a).unwrap(), state.t_basis())
            .unwrap();
        let dist =
            conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        for (k, &i) in dist.indices.iter().enumerate() {
            assert!((dist.probabilities[k] - b[i].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn paper_ratio_example() {
        // C = (0.8, 0.6), A = (0.6, 0.8) → raw probabilities (16/9, 9/16).
        let state = simple_state(vec![c(0.8, 0.0), c(0.6, 0.0)]);
        let cond = SubsystemState::new(
            ComplexVector::from_reals(&[0.6, 0.8]),
            state.t_basis(),
        )
        .unwrap();
        let dist =
            conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        assert!((dist.probabilities[0] - 16.0 / 9.0).abs() < 1e-14);
        assert!((dist.probabilities[1] - 9.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn zero_amplitude_conditioning_is_an_error() {
        let state = simple_state(vec![c(0.8, 0.0), c(0.6, 0.0)]);
        let cond = SubsystemState::new(
            ComplexVector::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
            state.t_basis(),
        )
        .unwrap();
        assert!(matches!(
            conditional_project(&state, &cond, NormalizationMode::Raw),
            Err(CoreError::UndefinedConditional(_))
        ));
    }

    #[test]
    fn both_zero_entry_is_omitted_with_diagnostic() {
        let state = simple_state(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let cond = SubsystemState::new(
            ComplexVector::new(vec![c(0.0, 0.0), c(0.7, 0.0)]).unwrap(),
            state.t_basis(),
        )
        .unwrap();
        let dist =
            conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        assert_eq!(dist.omitted_indices, vec![0]);
        assert_eq!(dist.indices, vec![1]);
    }

    #[test]
    fn renormalized_mode_sums_to_one() {
        let state = simple_state(vec![c(0.8, 0.0), c(0.6, 0.0)]);
        let cond = SubsystemState::new(
            ComplexVector::from_reals(&[0.3, 0.9]),
            state.t_basis(),
        )
        .unwrap();
        let dist =
            conditional_project(&state, &cond, NormalizationMode::Renormalized)
                .unwrap();
        let sum: f64 = dist.probabilities.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_partial_trace_is_textbook() {
        let state = simple_state(vec![c(0.8, 0.0), c(0.0, 0.6)]);
        let pt = partial_trace_metric(&state, Subsystem::T).unwrap();
        // Orthonormal T-family: Σ_i |C_i|² |X_i⟩⟨X_i| exactly.
        assert!((pt[(0, 0)] - c(0.64, 0.0)).norm() < 1e-12);
        assert!((pt[(1, 1)] - c(0.36, 0.0)).norm() < 1e-12);
        assert!(pt[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn partial_trace_diagonal_matches_reference_conditioning() {
        // Non-orthonormal N=2 t-family: the diagonal equals |C_i/t_i|² for
        // the state's own reference expansion.
        let t_vecs = vec![
            ComplexVector::from_reals(&[1.0, 0.0, 0.0]),
            ComplexVector::new(vec![c(0.4, 0.3), c(0.8, 0.0), c(0.0, 0.0)]).unwrap(),
        ];
        let t = BasisFamily::new(t_vecs, Signature::Timelike, "T").unwrap();
        let x = orthonormal_family(2, 2, Signature::Spacelike, "X");
        let state = EntangledState::new(
            ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap(),
            x,
            t,
        )
        .unwrap();
        let cond = state.reference_expansion().unwrap();
        let dist =
            conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        let pt = partial_trace_metric(&state, Subsystem::T).unwrap();
        for (k, &i) in dist.indices.iter().enumerate() {
            assert!(
                (pt[(i, i)].re - dist.probabilities[k]).abs() < 1e-12,
                "diagonal {i}"
            );
        }
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let state = simple_state(vec![c(0.8, 0.0), c(0.6, 0.0)]);
        let cond = SubsystemState::new(
            ComplexVector::from_reals(&[0.5, 0.5]),
            state.t_basis(),
        )
        .unwrap();
        let o = HermitianMatrix::identity(2);
        let e = relative_expectation(&state, &o, &cond, NormalizationMode::Renormalized)
            .unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_separable_projector() {
        // Separable state with |b|² = (0.25, 0.75); O = diag(0,1) → 0.75.
        let (cs, a, _b) = separable(
            &[c(0.6, 0.0), c(0.8, 0.0)],
            &[c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)],
        );
        let state = simple_state(cs);
        let cond = SubsystemState::new(ComplexVector::new(a).unwrap(), state.t_basis())
            .unwrap();
        let o = HermitianMatrix::new(ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]))
            .unwrap();
        let e = relative_expectation(&state, &o, &cond, NormalizationMode::Renormalized)
            .unwrap();
        assert!((e - 0.75).abs() < 1e-12);
    }

    #[test]
    fn swap_roles_is_an_involution() {
        let state = simple_state(vec![c(0.8, 0.0), c(0.0, 0.6)]);
        let twice = swap_roles(&swap_roles(&state));
        assert_eq!(twice.coefficients(), state.coefficients());
        assert_eq!(twice.x_basis(), state.x_basis());
        assert_eq!(twice.t_basis(), state.t_basis());
    }

    #[test]
    fn swapped_state_gives_instrument_probabilities() {
        // P(T_i|X) = |C_i/x_i|² on the swapped state; separable → |a_i|².
        let (cs, a, b) = separable(
            &[c(0.6, 0.0), c(0.8, 0.0)],
            &[c(0.28, 0.0), c(0.96, 0.0)],
        );
        let state = simple_state(cs);
        let swapped = swap_roles(&state);
        assert_eq!(swapped.t_basis().label, "X");
        let cond = SubsystemState::new(
            ComplexVector::new(b).unwrap(),
            swapped.t_basis(),
        )
        .unwrap();
        let dist =
            conditional_project(&swapped, &cond, NormalizationMode::Raw).unwrap();
        for (k, &i) in dist.indices.iter().enumerate() {
            assert!((dist.probabilities[k] - a[i].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn signature_flip_on_swap() {
        let state = simple_state(vec![c(1.0, 0.0)]);
        let swapped = swap_roles(&state);
        assert_eq!(swapped.x_basis().signature, Signature::Spacelike);
        assert_eq!(swapped.t_basis().signature, Signature::Timelike);
    }
}
