//! Brute-force ambient-space oracles for the relative-state operations:
//! every projection/trace shortcut is checked against explicit Kronecker
//! vectors in the D_x·D_t product space.

mod common;

use common::*;
use relqm_core::linalg::{ComplexVector, HermitianMatrix, Signature};
use relqm_core::relstate::*;
use relqm_core::ComplexMatrix;

fn family(vecs: Vec<Vec<C64>>, sig: Signature, label: &str) -> BasisFamily {
    let vectors = vecs
        .into_iter()
        .map(|v| ComplexVector::new(v).unwrap())
        .collect();
    BasisFamily::new(vectors, sig, label).unwrap()
}

fn random_state(
    rng: &mut rand_chacha::ChaCha8Rng,
    n: usize,
    dx: usize,
    dt: usize,
) -> (EntangledState, Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let x_vecs = random_family(rng, n, dx);
    let t_vecs = random_family(rng, n, dt);
    let mut coeffs: Vec<C64> = (0..n).map(|_| random_unit_complex(rng)).collect();
    let nrm = norm(&coeffs);
    for z in &mut coeffs {
        *z /= nrm;
    }
    let state = EntangledState::new(
        ComplexVector::new(coeffs).unwrap(),
        family(x_vecs.clone(), Signature::Spacelike, "X"),
        family(t_vecs.clone(), Signature::Timelike, "T"),
    )
    .unwrap();
    (state, x_vecs, t_vecs)
}

fn random_condition(
    rng: &mut rand_chacha::ChaCha8Rng,
    state: &EntangledState,
) -> SubsystemState {
    let amps: Vec<C64> = (0..state.count())
        .map(|_| {
            // Away from zero so raw ratios stay tame.
            let mut z = random_unit_complex(rng);
            while z.norm() < 0.2 {
                z = random_unit_complex(rng);
            }
            z
        })
        .collect();
    SubsystemState::new(ComplexVector::new(amps).unwrap(), state.t_basis()).unwrap()
}

#[test]
fn conditional_project_matches_full_space_oracle_n4() {
    // Random N=4 instance in the D = 4·4 = 16 product space.
    let mut r = rng(41);
    for trial in 0..12 {
        let (state, x_vecs, t_vecs) = random_state(&mut r, 4, 4, 4);
        let cond = random_condition(&mut r, &state);
        let dist = conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        let want = ambient_project(
            &state.coefficients().entries,
            &x_vecs,
            &t_vecs,
            &cond.amplitudes.entries,
        );
        for (k, &i) in dist.indices.iter().enumerate() {
            assert!(
                (dist.amplitudes[k] - want[i]).norm() < 1e-10,
                "trial {trial}, index {i}: {} vs {}",
                dist.amplitudes[k],
                want[i]
            );
        }
    }
}

#[test]
fn conditional_project_oracle_across_dimensions() {
    let mut r = rng(97);
    for n in 1..=6usize {
        let (state, x_vecs, t_vecs) = random_state(&mut r, n, n + 1, n + 2);
        let cond = random_condition(&mut r, &state);
        let dist = conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        let want = ambient_project(
            &state.coefficients().entries,
            &x_vecs,
            &t_vecs,
            &cond.amplitudes.entries,
        );
        for (k, &i) in dist.indices.iter().enumerate() {
            assert!((dist.amplitudes[k] - want[i]).norm() < 1e-10, "n = {n}");
        }
    }
}

#[test]
fn partial_trace_matches_explicit_contraction_oracle_n3() {
    let mut r = rng(1234);
    for trial in 0..6 {
        let (state, x_vecs, t_vecs) = random_state(&mut r, 3, 3, 4);
        let pt = partial_trace_metric(&state, Subsystem::T).unwrap();
        let want =
            ambient_partial_trace(&state.coefficients().entries, &x_vecs, &t_vecs);
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (pt[(i, j)] - want[i][j]).norm() < 1e-10,
                    "trial {trial} entry ({i},{j}): {} vs {}",
                    pt[(i, j)],
                    want[i][j]
                );
            }
        }
    }
}

#[test]
fn relative_expectation_matches_full_space_weighting() {
    let mut r = rng(777);
    for _ in 0..6 {
        let (state, x_vecs, t_vecs) = random_state(&mut r, 3, 4, 3);
        let cond = random_condition(&mut r, &state);
        // Random Hermitian observable on X indices.
        let mut o = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                o[(i, j)] = random_unit_complex(&mut r);
            }
        }
        let o = HermitianMatrix::new(o.symmetrize()).unwrap();
        let got = relative_expectation(&state, &o, &cond, NormalizationMode::Renormalized)
            .unwrap();
        // Oracle: probabilities from the ambient projection amplitudes.
        let amp = ambient_project(
            &state.coefficients().entries,
            &x_vecs,
            &t_vecs,
            &cond.amplitudes.entries,
        );
        let probs: Vec<f64> = amp.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = probs.iter().sum();
        let want: f64 = probs
            .iter()
            .enumerate()
            .map(|(i, p)| p / total * o.as_matrix()[(i, i)].re)
            .sum();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn non_factorization_witness() {
    // A fixed seeded non-separable state: the raw relative probabilities
    // differ from |b_i|² of the best product approximation by more than 1e-6.
    let mut r = rng(20240);
    let (state, x_vecs, t_vecs) = random_state(&mut r, 3, 3, 3);
    let psi = ambient_entangled(&state.coefficients().entries, &x_vecs, &t_vecs);
    let (dx, dt) = (3usize, 3usize);
    // Leading singular pair of the reshaped coefficient matrix by power
    // iteration on M†M.
    let m = |a: usize, b: usize| psi[a * dt + b];
    let mut v = vec![C64::new(1.0, 0.3); dt];
    for _ in 0..200 {
        // w = M v; v = M† w; normalize.
        let mut w = vec![C64::new(0.0, 0.0); dx];
        for a in 0..dx {
            for b in 0..dt {
                w[a] += m(a, b) * v[b];
            }
        }
        let mut v2 = vec![C64::new(0.0, 0.0); dt];
        for b in 0..dt {
            for a in 0..dx {
                v2[b] += m(a, b).conj() * w[a];
            }
        }
        let nrm = norm(&v2);
        v = v2.into_iter().map(|z| z / nrm).collect();
    }
    let mut u = vec![C64::new(0.0, 0.0); dx];
    for a in 0..dx {
        for b in 0..dt {
            u[a] += m(a, b) * v[b];
        }
    }
    let sigma = norm(&u);
    for z in &mut u {
        *z /= sigma;
    }
    // Product-state amplitudes over the families via explicit duals; the
    // conjugate on v matches ψ_prod = u ⊗ conj(v) from the SVD pairing.
    let b_amps: Vec<C64> = ambient_duals(&x_vecs).iter().map(|d| inner(d, &u)).collect();
    let a_amps: Vec<C64> = ambient_duals(&t_vecs)
        .iter()
        .map(|d| inner(d, &v).conj())
        .collect();
    let cond = SubsystemState::new(
        ComplexVector::new(a_amps).unwrap(),
        state.t_basis(),
    )
    .unwrap();
    let dist = conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
    let b_norm: f64 = b_amps.iter().map(|z| z.norm_sqr()).sum();
    let mut max_dev = 0.0f64;
    for (k, &i) in dist.indices.iter().enumerate() {
        let dev = (dist.probabilities[k] - b_amps[i].norm_sqr() / b_norm).abs();
        max_dev = max_dev.max(dev);
    }
    assert!(
        max_dev > 1e-6,
        "state unexpectedly factorizes: max deviation {max_dev}"
    );
}

#[test]
fn partial_trace_diagonal_equals_reference_conditioning_random() {
    let mut r = rng(555);
    for n in 2..=5usize {
        let (state, _, _) = random_state(&mut r, n, n + 2, n + 1);
        let cond = state.reference_expansion().unwrap();
        let dist = conditional_project(&state, &cond, NormalizationMode::Raw).unwrap();
        let pt = partial_trace_metric(&state, Subsystem::T).unwrap();
        for (k, &i) in dist.indices.iter().enumerate() {
            assert!(
                (pt[(i, i)].re - dist.probabilities[k]).abs() < 1e-10,
                "n = {n}, index {i}"
            );
        }
    }
}
