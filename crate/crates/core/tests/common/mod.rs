//! Shared oracle machinery for the integration tests: seeded random basis
//! families and a fully independent ambient-space projection oracle that
//! works with explicit Kronecker-product vectors and its own tiny linear
//! solver (no calls into the library's dual/projection shortcuts).

#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random well-conditioned family of `n` vectors in ambient dimension `d`:
/// an orthonormal frame mixed by (I + 0.3·R) with ‖R‖ ≤ 1.
pub fn random_family(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<C64>> {
    assert!(n <= d);
    // Random Gaussian-ish matrix, Gram-Schmidt to an orthonormal frame.
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v: Vec<C64> = (0..d).map(|_| random_unit_complex(rng)).collect();
        for u in &q {
            let ov = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= ov * y;
            }
        }
        let nrm = norm(&v);
        assert!(nrm > 1e-8, "degenerate draw");
        for x in &mut v {
            *x /= nrm;
        }
        q.push(v);
    }
    // Mix: columns V_j = Σ_k M[k][j] Q_k with M = I + 0.3 R, ‖R‖_F = 1.
    let mut r: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| random_unit_complex(rng)).collect())
        .collect();
    let fro: f64 = r
        .iter()
        .flat_map(|row| row.iter().map(|z| z.norm_sqr()))
        .sum::<f64>()
        .sqrt();
    for row in &mut r {
        for z in row.iter_mut() {
            *z /= fro.max(1e-12);
        }
    }
    (0..n)
        .map(|j| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            for k in 0..n {
                let m = if k == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
                    + r[k][j] * 0.3;
                for (x, y) in v.iter_mut().zip(&q[k]) {
                    *x += m * y;
                }
            }
            v
        })
        .collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense Gaussian elimination with partial pivoting; the oracle's own
/// solver, independent of the library's LU.
pub fn solve_dense(a: &[Vec<C64>], b: &[C64]) -> Vec<C64> {
    let n = b.len();
    let mut m: Vec<Vec<C64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, m[i][k].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        m.swap(k, p);
        rhs.swap(k, p);
        let piv = m[k][k];
        assert!(piv.norm() > 0.0, "singular oracle system");
        for i in (k + 1)..n {
            let f = m[i][k] / piv;
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let v = rhs[k];
            rhs[i] -= f * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    x
}

/// Duals of a family by explicit ambient linear algebra: d_j = Σ_k w_kj v_k
/// with Gram·w_col = e_j solved by the oracle's own elimination.
pub fn ambient_duals(vecs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = vecs.len();
    let d = vecs[0].len();
    let gram: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| inner(&vecs[i], &vecs[j])).collect())
        .collect();
    (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            // ⟨d_j|v_i⟩ = Σ_k conj(w_k) G_ki = δ_ij ⇒ solve Gᵀ·conj(w) = e_j.
            let gt: Vec<Vec<C64>> =
                (0..n).map(|r| (0..n).map(|c| gram[c][r]).collect()).collect();
            let wconj = solve_dense(&gt, &e);
            let mut out = vec![C64::new(0.0, 0.0); d];
            for k in 0..n {
                let w = wconj[k].conj();
                for (x, y) in out.iter_mut().zip(&vecs[k]) {
                    *x += w * y;
                }
            }
            out
        })
        .collect()
}

/// The explicit ambient entangled vector Ψ = Σ_i C_i x_i ⊗ t_i.
pub fn ambient_entangled(
    coeffs: &[C64],
    x_vecs: &[Vec<C64>],
    t_vecs: &[Vec<C64>],
) -> Vec<C64> {
    let dx = x_vecs[0].len();
    let dt = t_vecs[0].len();
    let mut psi = vec![C64::new(0.0, 0.0); dx * dt];
    for (i, &c) in coeffs.iter().enumerate() {
        for (a, &xa) in x_vecs[i].iter().enumerate() {
            for (b, &tb) in t_vecs[i].iter().enumerate() {
                psi[a * dt + b] += c * xa * tb;
            }
        }
    }
    psi
}

/// Full-space conditional projection oracle: assemble the reciprocal-dual
/// projector W = Σ_j (1/a_j)·T^j in ambient space, contract ⟨W| against the
/// T factor of Ψ, then read off X-family amplitudes with explicit X duals.
pub fn ambient_project(
    coeffs: &[C64],
    x_vecs: &[Vec<C64>],
    t_vecs: &[Vec<C64>],
    condition: &[C64],
) -> Vec<C64> {
    let dx = x_vecs[0].len();
    let dt = t_vecs[0].len();
    let psi = ambient_entangled(coeffs, x_vecs, t_vecs);
    let t_duals = ambient_duals(t_vecs);
    let mut w = vec![C64::new(0.0, 0.0); dt];
    for (j, dual) in t_duals.iter().enumerate() {
        let f = C64::new(1.0, 0.0) / condition[j];
        for (x, y) in w.iter_mut().zip(dual) {
            *x += f * y;
        }
    }
    // v[a] = Σ_b conj(W[b]) ψ[a,b]
    let mut v = vec![C64::new(0.0, 0.0); dx];
    for a in 0..dx {
        for b in 0..dt {
            v[a] += w[b].conj() * psi[a * dt + b];
        }
    }
    // amplitudes α_i = ⟨X^i | v⟩
    let x_duals = ambient_duals(x_vecs);
    x_duals.iter().map(|d| inner(d, &v)).collect()
}

/// Metric-contracted partial trace oracle: form the full D²-density matrix,
/// extract its family components by explicit dual contractions, and contract
/// the T index pair with the ambient dual Gram.
pub fn ambient_partial_trace(
    coeffs: &[C64],
    x_vecs: &[Vec<C64>],
    t_vecs: &[Vec<C64>],
) -> Vec<Vec<C64>> {
    let n = coeffs.len();
    let dx = x_vecs[0].len();
    let dt = t_vecs[0].len();
    let psi = ambient_entangled(coeffs, x_vecs, t_vecs);
    // ρ = |Ψ⟩⟨Ψ| held explicitly.
    let dim = dx * dt;
    let mut rho = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for r in 0..dim {
        for s in 0..dim {
            rho[r][s] = psi[r] * psi[s].conj();
        }
    }
    let x_duals = ambient_duals(x_vecs);
    let t_duals = ambient_duals(t_vecs);
    // Components ρ^{(ia),(jb)} = (⟨X^i|⊗⟨T^a|) ρ (|X^j⟩⊗|T^b⟩).
    let comp = |i: usize, a: usize, j: usize, b: usize| -> C64 {
        let mut left = vec![C64::new(0.0, 0.0); dim];
        for (r, l) in left.iter_mut().enumerate() {
            let (xa, tb) = (r / dt, r % dt);
            *l = x_duals[i][xa] * t_duals[a][tb];
        }
        let mut right = vec![C64::new(0.0, 0.0); dim];
        for (s, rr) in right.iter_mut().enumerate() {
            let (xa, tb) = (s / dt, s % dt);
            *rr = x_duals[j][xa] * t_duals[b][tb];
        }
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..dim {
            for s in 0..dim {
                acc += left[r].conj() * rho[r][s] * right[s];
            }
        }
        acc
    };
    // Dual Gram by explicit ambient inner products.
    let w: Vec<Vec<C64>> = (0..n)
        .map(|a| (0..n).map(|b| inner(&t_duals[a], &t_duals[b])).collect())
        .collect();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    acc += comp(i, a, j, b) * w[a][b];
                }
            }
            out[i][j] = acc;
        }
    }
    out
}
