//! Gauss-Codazzi evolution engine: closed-form fixtures with measured
//! convergence order, residual monitoring, and trajectory dumps.

use crate::output::{fmt_f64, EngineOutcome, Table};
use crate::scenario::{EvolveConfig, EvolveFixture};
use num_complex::Complex;
use relqm_core::evolution::{evolve, EvolutionState, GaussCodazziRhs, StepOptions};
use relqm_core::linalg::HermitianMatrix;
use relqm_core::ComplexMatrix;

type C64 = Complex<f64>;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

struct Fixture {
    initial_h: ComplexMatrix,
    initial_hdot: ComplexMatrix,
    exact_end: ComplexMatrix,
}

fn build(cfg: &EvolveConfig) -> Fixture {
    match cfg.fixture {
        EvolveFixture::ScalarClosedForm => {
            let cc = cfg.c;
            Fixture {
                initial_h: ComplexMatrix::diag(&[c(1.0)]),
                initial_hdot: ComplexMatrix::diag(&[c(2.0 * cc)]),
                exact_end: ComplexMatrix::diag(&[c((1.0 + cc * cfg.horizon).powi(2))]),
            }
        }
        EvolveFixture::N2ClosedForm => {
            let sigma = cfg.c;
            let (p, q) = (1.5, 0.5);
            let u = ComplexMatrix::from_rows(vec![
                vec![C64::new(0.8, 0.0), C64::new(0.0, 0.6)],
                vec![C64::new(0.0, 0.6), C64::new(0.8, 0.0)],
            ])
            .unwrap();
            let diag = |t: f64, der: u32| {
                let f = |pw: f64| match der {
                    0 => (1.0 + sigma * t).powf(pw),
                    _ => pw * sigma * (1.0 + sigma * t).powf(pw - 1.0),
                };
                u.mul(&ComplexMatrix::diag(&[c(f(p)), c(f(q))])).mul(&u.adjoint())
            };
            Fixture {
                initial_h: diag(0.0, 0),
                initial_hdot: diag(0.0, 1),
                exact_end: diag(cfg.horizon, 0),
            }
        }
    }
}

pub fn run(cfg: &EvolveConfig) -> Result<EngineOutcome, String> {
    let fixture = build(cfg);
    let rhs = GaussCodazziRhs {
        ricci_source: |_t: f64, h: &ComplexMatrix| ComplexMatrix::zeros(h.rows, h.cols),
    };
    let opts = StepOptions::default();
    let mut errors = Vec::new();
    let mut drifts = Vec::new();
    let mut residual_max = 0.0f64;
    let mut trajectory_rows = Vec::new();
    for (pass_idx, n_steps) in [cfg.steps_coarse, cfg.steps_fine].iter().enumerate() {
        let dt = cfg.horizon / *n_steps as f64;
        let h0 = HermitianMatrix::new(fixture.initial_h.clone())
            .map_err(|e| e.to_string())?;
        let state = EvolutionState::new(h0, fixture.initial_hdot.clone(), 0.0, dt)
            .map_err(|e| e.to_string())?;
        let traj = evolve(state, &rhs, *n_steps, &opts).map_err(|e| e.to_string())?;
        let last = traj.states.last().unwrap();
        errors.push(last.h.as_matrix().sub(&fixture.exact_end).max_norm());
        drifts.push(traj.max_hermiticity_drift);
        residual_max = residual_max
            .max(traj.residuals.iter().cloned().fold(0.0f64, f64::max));
        if pass_idx == 1 {
            for (k, s) in traj.states.iter().enumerate() {
                let h = s.h.as_matrix();
                let flat: Vec<String> = h
                    .entries
                    .iter()
                    .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
                    .collect();
                let residual = if k >= 1 && k - 1 < traj.residuals.len() {
                    traj.residuals[k - 1]
                } else {
                    0.0
                };
                let mut row = vec![fmt_f64(s.t)];
                row.extend(flat);
                row.push(fmt_f64(residual));
                row.push(fmt_f64(s.h.min_eigenvalue()));
                trajectory_rows.push(row);
            }
        }
    }
    let order = (errors[0] / errors[1]).log2();
    let [lo, hi] = cfg.order_bounds;
    let drift = drifts.iter().cloned().fold(0.0f64, f64::max);
    let pass = (lo..=hi).contains(&order) && drift <= cfg.hermiticity_tol;
    let mut outcome = EngineOutcome::new(
        format!(
            "{:?}: measured order {} (window [{}, {}]), Hermiticity drift {}, max residual {}",
            cfg.fixture,
            fmt_f64(order),
            fmt_f64(lo),
            fmt_f64(hi),
            fmt_f64(drift),
            fmt_f64(residual_max)
        ),
        pass,
    );
    outcome.metrics.insert("order".into(), order);
    outcome.metrics.insert("error_coarse".into(), errors[0]);
    outcome.metrics.insert("error_fine".into(), errors[1]);
    outcome.metrics.insert("hermiticity_drift".into(), drift);
    outcome.metrics.insert("max_residual".into(), residual_max);
    let dim = fixture.initial_h.rows;
    let mut header = vec!["t".to_string()];
    for i in 0..dim {
        for j in 0..dim {
            header.push(format!("h{}{}_re", i, j));
            header.push(format!("h{}{}_im", i, j));
        }
    }
    header.push("residual".into());
    header.push("min_eigenvalue".into());
    outcome.tables.push(Table {
        name: "trajectory".into(),
        header,
        rows: trajectory_rows,
    });
    Ok(outcome)
}
