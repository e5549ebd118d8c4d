//! Relative-state engine: conditional projection and partial-trace checks
//! against the full ambient-space oracle, plus inline ratio fixtures.

use crate::output::{fmt_f64, EngineOutcome, Table};
use crate::scenario::{RelstateCheck, RelstateConfig};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relqm_core::linalg::{ComplexVector, Signature};
use relqm_core::relstate::{
    conditional_project, partial_trace_metric, BasisFamily, EntangledState,
    NormalizationMode, SubsystemState, Subsystem,
};

type C64 = Complex<f64>;

fn random_unit_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_family(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<C64>> {
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v: Vec<C64> = (0..d).map(|_| random_unit_complex(rng)).collect();
        for u in &q {
            let ov: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= ov * y;
            }
        }
        let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= nrm;
        }
        q.push(v);
    }
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

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn solve_dense(a: &[Vec<C64>], b: &[C64]) -> Vec<C64> {
    let n = b.len();
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, m[i][k].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        m.swap(k, p);
        rhs.swap(k, p);
        let piv = m[k][k];
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

fn ambient_duals(vecs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = vecs.len();
    let d = vecs[0].len();
    let gram: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| inner(&vecs[i], &vecs[j])).collect())
        .collect();
    (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
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

fn ambient_project(
    coeffs: &[C64],
    x_vecs: &[Vec<C64>],
    t_vecs: &[Vec<C64>],
    condition: &[C64],
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
    let t_duals = ambient_duals(t_vecs);
    let mut w = vec![C64::new(0.0, 0.0); dt];
    for (j, dual) in t_duals.iter().enumerate() {
        let f = C64::new(1.0, 0.0) / condition[j];
        for (x, y) in w.iter_mut().zip(dual) {
            *x += f * y;
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); dx];
    for a in 0..dx {
        for b in 0..dt {
            v[a] += w[b].conj() * psi[a * dt + b];
        }
    }
    ambient_duals(x_vecs).iter().map(|d| inner(d, &v)).collect()
}

fn to_family(vecs: Vec<Vec<C64>>, sig: Signature, label: &str) -> Result<BasisFamily, String> {
    let vectors: Result<Vec<_>, _> =
        vecs.into_iter().map(ComplexVector::new).collect();
    BasisFamily::new(vectors.map_err(|e| e.to_string())?, sig, label)
        .map_err(|e| e.to_string())
}

fn random_state(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<(EntangledState, Vec<Vec<C64>>, Vec<Vec<C64>>), String> {
    let x_vecs = random_family(rng, n, n + 1);
    let t_vecs = random_family(rng, n, n + 2);
    let mut coeffs: Vec<C64> = (0..n).map(|_| random_unit_complex(rng)).collect();
    let nrm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut coeffs {
        *z /= nrm;
    }
    let state = EntangledState::new(
        ComplexVector::new(coeffs).map_err(|e| e.to_string())?,
        to_family(x_vecs.clone(), Signature::Spacelike, "X")?,
        to_family(t_vecs.clone(), Signature::Timelike, "T")?,
    )
    .map_err(|e| e.to_string())?;
    Ok((state, x_vecs, t_vecs))
}

fn random_condition(rng: &mut ChaCha8Rng, state: &EntangledState) -> SubsystemState {
    let amps: Vec<C64> = (0..state.count())
        .map(|_| {
            let mut z = random_unit_complex(rng);
            while z.norm() < 0.2 {
                z = random_unit_complex(rng);
            }
            z
        })
        .collect();
    SubsystemState::new(ComplexVector::new(amps).unwrap(), state.t_basis()).unwrap()
}

pub fn run(cfg: &RelstateConfig, seed: u64) -> Result<EngineOutcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut max_dev: f64 = 0.0;
    match cfg.check {
        RelstateCheck::Separable => {
            for trial in 0..cfg.trials {
                let n = 1 + (trial % cfg.n.max(1));
                let a: Vec<C64> = (0..n)
                    .map(|_| {
                        let mut z = random_unit_complex(&mut rng);
                        while z.norm() < 0.2 {
                            z = random_unit_complex(&mut rng);
                        }
                        z
                    })
                    .collect();
                let b: Vec<C64> = (0..n).map(|_| random_unit_complex(&mut rng)).collect();
                let mut c: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
                let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut c {
                    *z /= norm;
                }
                let b_scaled: Vec<C64> = b.iter().map(|z| z / norm).collect();
                let x = to_family(
                    (0..n)
                        .map(|i| {
                            let mut v = vec![C64::new(0.0, 0.0); n];
                            v[i] = C64::new(1.0, 0.0);
                            v
                        })
                        .collect(),
                    Signature::Spacelike,
                    "X",
                )?;
                let t = to_family(
                    (0..n)
                        .map(|i| {
                            let mut v = vec![C64::new(0.0, 0.0); n];
                            v[i] = C64::new(1.0, 0.0);
                            v
                        })
                        .collect(),
                    Signature::Timelike,
                    "T",
                )?;
                let state = EntangledState::new(
                    ComplexVector::new(c).map_err(|e| e.to_string())?,
                    x,
                    t,
                )
                .map_err(|e| e.to_string())?;
                let cond = SubsystemState::new(
                    ComplexVector::new(a).unwrap(),
                    state.t_basis(),
                )
                .unwrap();
                let dist = conditional_project(&state, &cond, NormalizationMode::Raw)
                    .map_err(|e| e.to_string())?;
                for (k, &i) in dist.indices.iter().enumerate() {
                    let dev = (dist.probabilities[k] - b_scaled[i].norm_sqr()).abs();
                    max_dev = max_dev.max(dev);
                    rows.push(vec![
                        trial.to_string(),
                        i.to_string(),
                        fmt_f64(dist.probabilities[k]),
                        fmt_f64(dev),
                    ]);
                }
            }
        }
        RelstateCheck::Oracle => {
            for trial in 0..cfg.trials {
                let n = 1 + (trial % cfg.n.max(1)).min(5);
                let (state, x_vecs, t_vecs) = random_state(&mut rng, n)?;
                let cond = random_condition(&mut rng, &state);
                let dist = conditional_project(&state, &cond, NormalizationMode::Raw)
                    .map_err(|e| e.to_string())?;
                let want = ambient_project(
                    &state.coefficients().entries,
                    &x_vecs,
                    &t_vecs,
                    &cond.amplitudes.entries,
                );
                for (k, &i) in dist.indices.iter().enumerate() {
                    let dev = (dist.amplitudes[k] - want[i]).norm();
                    max_dev = max_dev.max(dev);
                    if trial < 16 {
                        rows.push(vec![
                            trial.to_string(),
                            i.to_string(),
                            fmt_f64(dist.amplitudes[k].re),
                            fmt_f64(dist.amplitudes[k].im),
                            fmt_f64(dev),
                        ]);
                    }
                }
            }
        }
        RelstateCheck::PartialTrace => {
            for trial in 0..cfg.trials {
                let n = 1 + (trial % cfg.n.max(1)).min(5);
                let (state, _, _) = random_state(&mut rng, n)?;
                let pt = partial_trace_metric(&state, Subsystem::T)
                    .map_err(|e| e.to_string())?;
                let cond = state.reference_expansion().map_err(|e| e.to_string())?;
                let dist = conditional_project(&state, &cond, NormalizationMode::Raw)
                    .map_err(|e| e.to_string())?;
                for (k, &i) in dist.indices.iter().enumerate() {
                    let dev = (pt[(i, i)].re - dist.probabilities[k]).abs();
                    max_dev = max_dev.max(dev);
                    if trial < 16 {
                        rows.push(vec![
                            trial.to_string(),
                            i.to_string(),
                            fmt_f64(pt[(i, i)].re),
                            fmt_f64(dev),
                        ]);
                    }
                }
            }
        }
        RelstateCheck::InlineRatio => {
            let coeffs = cfg
                .coefficients
                .as_ref()
                .ok_or("inline_ratio needs coefficients")?;
            let cond = cfg.condition.as_ref().ok_or("inline_ratio needs condition")?;
            let expected = cfg
                .expected_raw_probabilities
                .as_ref()
                .ok_or("inline_ratio needs expected_raw_probabilities")?;
            let n = coeffs.len();
            let c: Vec<C64> = coeffs.iter().map(|p| C64::new(p[0], p[1])).collect();
            let a: Vec<C64> = cond.iter().map(|p| C64::new(p[0], p[1])).collect();
            let x = to_family(
                (0..n)
                    .map(|i| {
                        let mut v = vec![C64::new(0.0, 0.0); n];
                        v[i] = C64::new(1.0, 0.0);
                        v
                    })
                    .collect(),
                Signature::Spacelike,
                "X",
            )?;
            let t = to_family(
                (0..n)
                    .map(|i| {
                        let mut v = vec![C64::new(0.0, 0.0); n];
                        v[i] = C64::new(1.0, 0.0);
                        v
                    })
                    .collect(),
                Signature::Timelike,
                "T",
            )?;
            let state = EntangledState::new(
                ComplexVector::new(c).map_err(|e| e.to_string())?,
                x,
                t,
            )
            .map_err(|e| e.to_string())?;
            let cond = SubsystemState::new(ComplexVector::new(a).unwrap(), state.t_basis())
                .unwrap();
            let dist = conditional_project(&state, &cond, NormalizationMode::Raw)
                .map_err(|e| e.to_string())?;
            for (k, &i) in dist.indices.iter().enumerate() {
                let dev = (dist.probabilities[k] - expected[i]).abs();
                max_dev = max_dev.max(dev);
                rows.push(vec![
                    "0".into(),
                    i.to_string(),
                    fmt_f64(dist.probabilities[k]),
                    fmt_f64(dev),
                ]);
            }
        }
    }
    let pass = max_dev <= cfg.tolerance;
    let mut outcome = EngineOutcome::new(
        format!(
            "{:?}: max deviation {} over {} trial(s), tolerance {}",
            cfg.check,
            fmt_f64(max_dev),
            cfg.trials,
            fmt_f64(cfg.tolerance)
        ),
        pass,
    );
    outcome.metrics.insert("max_deviation".into(), max_dev);
    outcome.metrics.insert("tolerance".into(), cfg.tolerance);
    outcome.tables.push(Table {
        name: "records".into(),
        header: match cfg.check {
            RelstateCheck::Oracle => vec![
                "trial".into(),
                "index".into(),
                "amplitude_re".into(),
                "amplitude_im".into(),
                "deviation".into(),
            ],
            _ => vec![
                "trial".into(),
                "index".into(),
                "probability".into(),
                "deviation".into(),
            ],
        },
        rows,
    });
    Ok(outcome)
}
