//! Dense complex linear algebra substrate: vectors, matrices, Hermitian
//! eigendecomposition (cyclic Jacobi), LU solves, determinants, Gram matrices
//! and dual bases.
//!
//! Conventions: inner products conjugate the FIRST argument (physics
//! convention), so `gram(b)[i][j] = ⟨b_i|b_j⟩`. Matrices are row-major.
//! Hermitian constructions symmetrize (M + M†)/2 after checking that the
//! drift is below `hermiticity_tol`; drift beyond tolerance is an error so
//! that it stays observable instead of being silently averaged away.

use crate::error::{CoreError, Result};
use crate::tol;
use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Ordered complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    pub entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(CoreError::invalid("vector dimension must be ≥ 1"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::invalid("vector entries must be finite"));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_reals(xs: &[f64]) -> Self {
        Self { entries: xs.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self += s · other
    pub fn axpy(&mut self, s: C64, other: &Self) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += s * b;
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub entries: Vec<C64>,
    pub rows: usize,
    pub cols: usize,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { entries: vec![C64::new(0.0, 0.0); rows * cols], rows, cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(CoreError::invalid("matrix must have ≥ 1 row"));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::invalid("ragged rows"));
        }
        let entries: Vec<C64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::invalid("matrix entries must be finite"));
        }
        Ok(Self { entries, rows: r, cols: c })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matvec dimension mismatch");
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v.entries[j];
            }
            out.entries[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * s).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Max-magnitude entry norm ‖·‖∞ (entrywise).
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖M − M†‖∞.
    pub fn hermiticity_drift(&self) -> f64 {
        assert!(self.is_square());
        let mut drift: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                drift = drift.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        drift
    }

    /// (M + M†)/2.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// LU decomposition with partial pivoting. Returns (LU, pivots, sign).
    fn lu(&self) -> Result<(Self, Vec<usize>, f64)> {
        if !self.is_square() {
            return Err(CoreError::invalid("LU needs a square matrix"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in (k + 1)..n {
                let mag = a[(i, k)].norm();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(CoreError::DegenerateMetric(
                    "singular matrix in LU factorization".into(),
                ));
            }
            if p != k {
                for j in 0..n {
                    a.entries.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in (k + 1)..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                for j in (k + 1)..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= factor * akj;
                }
            }
        }
        Ok((a, piv, sign))
    }

    /// Solve self · x = b.
    pub fn solve_vec(&self, b: &ComplexVector) -> Result<ComplexVector> {
        let (lu, piv, _) = self.lu()?;
        let n = self.rows;
        let mut x = ComplexVector::zeros(n);
        for i in 0..n {
            x.entries[i] = b.entries[piv[i]];
        }
        for i in 0..n {
            for j in 0..i {
                let lij = lu[(i, j)];
                let xj = x.entries[j];
                x.entries[i] -= lij * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let uij = lu[(i, j)];
                let xj = x.entries[j];
                x.entries[i] -= uij * xj;
            }
            x.entries[i] /= lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for j in 0..n {
            let col = self.solve_vec(&ComplexVector::basis_state(n, j))?;
            for i in 0..n {
                out[(i, j)] = col.entries[i];
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<C64> {
        let (lu, _, sign) = self.lu()?;
        let mut d = C64::new(sign, 0.0);
        for i in 0..self.rows {
            d *= lu[(i, i)];
        }
        Ok(d)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        let c = self.cols;
        &mut self.entries[i * c + j]
    }
}

/// A square matrix certified Hermitian: built by checking drift against
/// `hermiticity_tol` and then symmetrizing exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tol(mat, tol::HERMITICITY_TOL)
    }

    pub fn with_tol(mat: ComplexMatrix, hermiticity_tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(CoreError::invalid("Hermitian matrix must be square"));
        }
        let drift = mat.hermiticity_drift();
        if drift > hermiticity_tol {
            return Err(CoreError::invalid(format!(
                "Hermiticity drift {drift:.3e} exceeds tolerance {hermiticity_tol:.3e}"
            )));
        }
        Ok(Self { mat: mat.symmetrize() })
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: ComplexMatrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Eigendecomposition by cyclic Jacobi. Returns (eigenvalues ascending,
    /// unitary whose columns are the matching eigenvectors).
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        eigh(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().0[0]
    }

    /// Condition number |λ|max/|λ|min.
    pub fn condition_number(&self) -> f64 {
        let (evals, _) = self.eigh();
        let max = evals.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let min = evals.iter().fold(f64::INFINITY, |m, &l| m.min(l.abs()));
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.mat.inverse()?;
        // Inverse of Hermitian is Hermitian; symmetrize roundoff away.
        HermitianMatrix::with_tol(inv, 1e-6)
            .map_err(|_| CoreError::DegenerateMetric("inverse lost Hermiticity".into()))
    }

    /// ln det M via the eigenvalue spectrum; the imaginary part is confined
    /// to the branch (−π, π] (0 for positive-definite, π when the number of
    /// negative eigenvalues is odd).
    pub fn logdet(&self) -> Result<C64> {
        let (evals, _) = self.eigh();
        let scale = evals.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let mut re = 0.0;
        let mut negatives = 0usize;
        for &l in &evals {
            if l.abs() <= scale * 1e-300 || l == 0.0 {
                return Err(CoreError::DegenerateMetric(
                    "logdet of a singular matrix".into(),
                ));
            }
            re += l.abs().ln();
            if l < 0.0 {
                negatives += 1;
            }
        }
        let im = if negatives % 2 == 1 { std::f64::consts::PI } else { 0.0 };
        Ok(C64::new(re, im))
    }
}

/// Gram matrix of a basis family: result[i][j] = ⟨basis_i|basis_j⟩.
pub fn gram(basis: &[ComplexVector]) -> Result<HermitianMatrix> {
    if basis.is_empty() {
        return Err(CoreError::invalid("empty basis"));
    }
    let dim = basis[0].dim();
    if basis.iter().any(|v| v.dim() != dim) {
        return Err(CoreError::invalid("basis vectors have mixed dimensions"));
    }
    if dim < basis.len() {
        return Err(CoreError::invalid(
            "ambient dimension smaller than basis count",
        ));
    }
    let n = basis.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = basis[i].inner(&basis[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    // Hermitian by construction.
    HermitianMatrix::new(g)
}

/// Signed pairing convention for a basis family: spacelike pairs to +δ,
/// timelike to −δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Spacelike,
    Timelike,
}

impl Signature {
    pub fn sign(self) -> f64 {
        match self {
            Signature::Spacelike => 1.0,
            Signature::Timelike => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Signature::Spacelike => Signature::Timelike,
            Signature::Timelike => Signature::Spacelike,
        }
    }
}

/// Dual family: ⟨dual_j|basis_i⟩ = sign(signature)·δ_ij.
///
/// dual_j = signature · Σ_k (G⁻¹)_{kj} basis_k with G the Gram matrix.
pub fn dual_basis(
    basis: &[ComplexVector],
    signature: Signature,
) -> Result<Vec<ComplexVector>> {
    dual_basis_with_cond(basis, signature, tol::COND_MAX)
}

pub fn dual_basis_with_cond(
    basis: &[ComplexVector],
    signature: Signature,
    cond_max: f64,
) -> Result<Vec<ComplexVector>> {
    let g = gram(basis)?;
    let cond = g.condition_number();
    if !cond.is_finite() || cond >= cond_max {
        return Err(CoreError::DegenerateBasis(format!(
            "Gram condition number {cond:.3e} exceeds {cond_max:.3e}"
        )));
    }
    let ginv = g.as_matrix().inverse()?;
    let n = basis.len();
    let dim = basis[0].dim();
    let s = signature.sign();
    let mut duals = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = ComplexVector::zeros(dim);
        for k in 0..n {
            d.axpy(ginv[(k, j)] * s, &basis[k]);
        }
        duals.push(d);
    }
    Ok(duals)
}

/// ln det of a Hermitian matrix (free function mirror of the method).
pub fn logdet(m: &HermitianMatrix) -> Result<C64> {
    m.logdet()
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Returns (eigenvalues ascending, unitary with eigenvector columns).
/// Off-diagonal mass is annihilated to ~1e-14·‖A‖_F; sizes up to a few
/// hundred are well inside the intended envelope.
pub fn eigh(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows;
    let mut m = a.symmetrize();
    let mut q = ComplexMatrix::identity(n);
    if n == 1 {
        return (vec![m[(0, 0)].re], q);
    }
    let total: f64 = m.frobenius_norm();
    let stop = (total * 1e-15).max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off += m[(p, r)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apq = m[(p, r)];
                let mag = apq.norm();
                if mag <= stop * 1e-2 / (n as f64) {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(r, r)].re;
                let phase = apq / mag; // e^{iφ}
                // Real 2×2 rotation for [[app, mag],[mag, aqq]].
                let tau = (aqq - app) / (2.0 * mag);
                // Stable small root of t² − 2τt − 1 = 0.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column p ← c·col_p + s·phase·col_q
                // Column q ← −s·conj(phase)·col_p + c·col_q   (unitary U; m ← U† m U)
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, r)];
                    m[(k, p)] = mkp * c + mkq * (phase * s).conj();
                    m[(k, r)] = mkq * c - mkp * phase * s;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(r, k)];
                    m[(p, k)] = mpk * c + mqk * phase * s;
                    m[(r, k)] = mqk * c - mpk * (phase * s).conj();
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkq = q[(k, r)];
                    q[(k, p)] = qkp * c + qkq * (phase * s).conj();
                    q[(k, r)] = qkq * c - qkp * phase * s;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> =
        (0..n).map(|i| (m[(i, i)].re, i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let evals: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new_col)] = q[(k, old_col)];
        }
    }
    (evals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gram_orthonormal_pair_is_identity() {
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[0.0, 1.0]),
        ];
        let g = gram(&b).unwrap();
        assert_eq!(g.as_matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn gram_oblique_pair_matches_hand_value() {
        let th = std::f64::consts::PI / 3.0;
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[th.cos(), th.sin()]),
        ];
        let g = gram(&b).unwrap();
        assert!((g.as_matrix()[(0, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((g.as_matrix()[(1, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((g.as_matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gram_single_unit_vector() {
        let b = vec![ComplexVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap()];
        let g = gram(&b).unwrap();
        assert!((g.as_matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gram_rejects_mixed_dimensions() {
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[0.0, 1.0, 0.0]),
        ];
        assert!(matches!(gram(&b), Err(CoreError::InvalidInput(_))));
    }

    #[test]
    fn dual_of_orthonormal_is_itself() {
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[0.0, 1.0]),
        ];
        let d = dual_basis(&b, Signature::Spacelike).unwrap();
        for (x, y) in d.iter().zip(&b) {
            assert!(x.sub(y).norm() < 1e-14);
        }
    }

    #[test]
    fn dual_of_orthonormal_timelike_is_negated() {
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[0.0, 1.0]),
        ];
        let d = dual_basis(&b, Signature::Timelike).unwrap();
        for (j, dj) in d.iter().enumerate() {
            assert!(dj.add(&b[j]).norm() < 1e-14);
            for (i, bi) in b.iter().enumerate() {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((dj.inner(bi) - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dual_pairing_on_gram_half_overlap() {
        // Gram [[1, 0.5], [0.5, 1]]; duals checked by direct products
        // against the hand 2×2 inverse [ [4/3, -2/3], [-2/3, 4/3] ].
        let th = std::f64::consts::PI / 3.0;
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[th.cos(), th.sin()]),
        ];
        let d = dual_basis(&b, Signature::Spacelike).unwrap();
        for (j, dj) in d.iter().enumerate() {
            for (i, bi) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dj.inner(bi) - c(want, 0.0)).norm() < 1e-12,
                    "pairing ({j},{i})"
                );
            }
        }
        // Hand inverse: dual_0 = 4/3·b0 − 2/3·b1 (real Gram so index order
        // is immaterial here).
        let hand = b[0].scale(c(4.0 / 3.0, 0.0)).add(&b[1].scale(c(-2.0 / 3.0, 0.0)));
        assert!(d[0].sub(&hand).norm() < 1e-12);
    }

    #[test]
    fn dual_basis_rejects_singular_gram() {
        let b = vec![
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[1.0, 1e-15]),
        ];
        assert!(matches!(
            dual_basis(&b, Signature::Spacelike),
            Err(CoreError::DegenerateBasis(_))
        ));
    }

    #[test]
    fn logdet_identity_and_diag() {
        let id = HermitianMatrix::identity(5);
        assert!(id.logdet().unwrap().norm() < 1e-14);
        let d = HermitianMatrix::new(ComplexMatrix::diag(&[c(2.0, 0.0), c(2.0, 0.0)]))
            .unwrap();
        let ld = d.logdet().unwrap();
        assert!((ld.re - 4.0f64.ln()).abs() < 1e-14);
        assert_eq!(ld.im, 0.0);
    }

    #[test]
    fn logdet_negative_eigenvalue_branch() {
        let d = HermitianMatrix::new(ComplexMatrix::diag(&[c(-2.0, 0.0), c(3.0, 0.0)]))
            .unwrap();
        let ld = d.logdet().unwrap();
        assert!((ld.re - 6.0f64.ln()).abs() < 1e-12);
        assert!((ld.im - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn logdet_singular_is_error() {
        let d = HermitianMatrix::new(ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]))
            .unwrap();
        assert!(matches!(d.logdet(), Err(CoreError::DegenerateMetric(_))));
    }

    #[test]
    fn eigh_known_hermitian_2x2() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let (evals, vecs) = eigh(&m);
        assert!((evals[0] - 1.0).abs() < 1e-13);
        assert!((evals[1] - 3.0).abs() < 1e-13);
        // Reconstruction A = V Λ V†.
        let lam = ComplexMatrix::diag(&[c(evals[0], 0.0), c(evals[1], 0.0)]);
        let rec = vecs.mul(&lam).mul(&vecs.adjoint());
        assert!(rec.sub(&m).max_norm() < 1e-13);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        // Deterministic pseudo-random Hermitian from a simple LCG.
        let n = 7;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = c(next(), next());
            }
        }
        let h = a.symmetrize();
        let (evals, vecs) = eigh(&h);
        let lam = ComplexMatrix::diag(
            &evals.iter().map(|&l| c(l, 0.0)).collect::<Vec<_>>(),
        );
        let rec = vecs.mul(&lam).mul(&vecs.adjoint());
        assert!(rec.sub(&h).max_norm() < 1e-12);
        let unit = vecs.adjoint().mul(&vecs);
        assert!(unit.sub(&ComplexMatrix::identity(n)).max_norm() < 1e-12);
        // Sorted ascending.
        assert!(evals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lu_solve_and_det() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 1.0), c(0.0, -1.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let x = m.solve_vec(&b).unwrap();
        let back = m.mul_vec(&x);
        assert!(back.sub(&b).norm() < 1e-13);
        // det([[2+i, -i],[1, 3]]) = (2+i)·3 − (−i·1) = 6+3i+i = 6+4i
        let d = m.det().unwrap();
        assert!((d - c(6.0, 4.0)).norm() < 1e-13);
        let inv = m.inverse().unwrap();
        assert!(inv.mul(&m).sub(&ComplexMatrix::identity(2)).max_norm() < 1e-13);
    }

    #[test]
    fn hermitian_rejects_excess_drift() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1e-6, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
    }
}
