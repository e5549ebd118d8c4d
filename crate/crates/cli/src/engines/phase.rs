//! Phase engine: spin-½ cone loops, integrable-loop vanishing, Stokes
//! refinement, and the Anandan-Aharonov speed/variance relation, with the
//! per-segment phase report table.

use crate::output::{fmt_f64, EngineOutcome, Table};
use crate::scenario::{PhaseCheck, PhaseConfig};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relqm_core::chart::{AxisGrid, CoordinateChart, ScalarField};
use relqm_core::linalg::{ComplexVector, ComplexMatrix};
use relqm_core::phase::*;
use std::f64::consts::PI;

type C64 = Complex<f64>;

pub fn run(cfg: &PhaseConfig, seed: u64) -> Result<EngineOutcome, String> {
    match cfg.check {
        PhaseCheck::SpinCone => spin_cone(cfg),
        PhaseCheck::IntegrableLoop => integrable_loop(cfg),
        PhaseCheck::Stokes => stokes(cfg),
        PhaseCheck::Anandan => anandan(cfg, seed),
    }
}

fn segment_table(rec: &PhaseRecord, samples: &[C64]) -> Table {
    let mut rows = Vec::new();
    let mut cum = C64::new(0.0, 0.0);
    let stride = (rec.increments.len() / 512).max(1);
    for (k, inc) in rec.increments.iter().enumerate() {
        cum += inc;
        if k % stride == 0 || k + 1 == rec.increments.len() {
            rows.push(vec![
                k.to_string(),
                fmt_f64(samples[k + 1].re),
                fmt_f64(samples[k + 1].im),
                fmt_f64(inc.re),
                fmt_f64(inc.im),
                fmt_f64(cum.re),
                fmt_f64(cum.im),
            ]);
        }
    }
    Table {
        name: "segments".into(),
        header: vec![
            "segment".into(),
            "t_re".into(),
            "t_im".into(),
            "dtheta_re".into(),
            "dtheta_im".into(),
            "theta_re".into(),
            "theta_im".into(),
        ],
        rows,
    }
}

fn spin_cone(cfg: &PhaseConfig) -> Result<EngineOutcome, String> {
    let theta = cfg.theta.ok_or("spin_cone needs theta")?;
    let n = cfg.samples;
    let states: Vec<ComplexVector> = (0..=n)
        .map(|k| spin_half_ground(theta, 2.0 * PI * k as f64 / n as f64))
        .collect();
    let rec = accumulate_phase_overlaps(&states).map_err(|e| e.to_string())?;
    let got = rec.wrapped_geometric_phase();
    let want = wrap_angle(-PI * (1.0 - theta.cos()));
    let dev = (got - want).abs();
    let oracle = pancharatnam_phase(&states).map_err(|e| e.to_string())?;
    let route_gap = (wrap_angle(oracle) - got).abs();
    let secondary = cfg.secondary_tolerance.unwrap_or(1e-6);
    let pass = dev <= cfg.tolerance && route_gap <= secondary;
    let circle: Vec<C64> = (0..=n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            C64::new(a.cos(), a.sin())
        })
        .collect();
    let mut outcome = EngineOutcome::new(
        format!(
            "spin-½ cone θ={theta}: geometric phase {} vs −Ω/2 = {} (dev {}, route gap {})",
            fmt_f64(got),
            fmt_f64(want),
            fmt_f64(dev),
            fmt_f64(route_gap)
        ),
        pass,
    );
    outcome.metrics.insert("geometric_phase".into(), got);
    outcome.metrics.insert("expected".into(), want);
    outcome.metrics.insert("deviation".into(), dev);
    outcome.metrics.insert("route_gap".into(), route_gap);
    outcome.tables.push(segment_table(&rec, &circle));
    Ok(outcome)
}

fn integrable_loop(cfg: &PhaseConfig) -> Result<EngineOutcome, String> {
    // K = d/dt (t² + 2t) is holomorphic: closed-loop Θ vanishes.
    let k = |z: C64| 2.0 * z + 2.0;
    let path = Path::circle(C64::new(0.1, -0.2), 0.7, cfg.samples)
        .map_err(|e| e.to_string())?;
    let rec = accumulate_phase(&ConnectionSource::ExtrinsicFn(&k), &path)
        .map_err(|e| e.to_string())?;
    let mag = rec.theta.norm();
    let pass = mag <= cfg.tolerance;
    let mut outcome = EngineOutcome::new(
        format!(
            "integrable closed loop: |Θ| = {} (tolerance {})",
            fmt_f64(mag),
            fmt_f64(cfg.tolerance)
        ),
        pass,
    );
    outcome.metrics.insert("theta_norm".into(), mag);
    outcome.tables.push(segment_table(&rec, &path.samples));
    Ok(outcome)
}

fn stokes(cfg: &PhaseConfig) -> Result<EngineOutcome, String> {
    let curved = |z: C64| (z.conj() * 0.9).exp() + C64::new(0.0, 0.5) * z.conj();
    let rect = Path::new(
        vec![
            C64::new(-0.5, -0.5),
            C64::new(0.5, -0.5),
            C64::new(0.5, 0.5),
            C64::new(-0.5, 0.5),
            C64::new(-0.5, -0.5),
        ],
        true,
    )
    .map_err(|e| e.to_string())?;
    let gap_at = |n: usize| -> Result<(f64, f64), String> {
        let chart = CoordinateChart::single(
            AxisGrid::centered_square("t", C64::new(0.0, 0.0), 1.0, n)
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let field = ScalarField::from_fn(&chart, |z| curved(z[0]));
        let rep = stokes_check(&field, &rect).map_err(|e| e.to_string())?;
        Ok((rep.gap, rep.surface_integral.norm()))
    };
    let (g1, s1) = gap_at(cfg.samples)?;
    let (g2, _) = gap_at(cfg.samples * 2 - 1)?;
    let ratio = g1 / g2;
    let [lo, hi] = cfg.ratio_bounds.unwrap_or([2.0, 8.0]);
    let pass = (lo..=hi).contains(&ratio) && g1 <= cfg.tolerance * s1.max(1.0);
    let mut outcome = EngineOutcome::new(
        format!(
            "Stokes gap {} at n={}, refinement ratio {} (window [{}, {}])",
            fmt_f64(g1),
            cfg.samples,
            fmt_f64(ratio),
            fmt_f64(lo),
            fmt_f64(hi)
        ),
        pass,
    );
    outcome.metrics.insert("gap_coarse".into(), g1);
    outcome.metrics.insert("gap_fine".into(), g2);
    outcome.metrics.insert("refinement_ratio".into(), ratio);
    outcome.tables.push(Table {
        name: "stokes".into(),
        header: vec!["n".into(), "gap".into(), "surface_norm".into()],
        rows: vec![
            vec![cfg.samples.to_string(), fmt_f64(g1), fmt_f64(s1)],
            vec![(cfg.samples * 2 - 1).to_string(), fmt_f64(g2), String::new()],
        ],
    });
    Ok(outcome)
}

fn anandan(cfg: &PhaseConfig, seed: u64) -> Result<EngineOutcome, String> {
    let trials = cfg.trials.unwrap_or(100);
    let dt = cfg.dt.unwrap_or(1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for trial in 0..trials {
        let n = 5;
        let mut h = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let mut h = h.symmetrize();
        let scale = h.frobenius_norm();
        h = h.scale(C64::new(1.0 / scale, 0.0));
        let mut psi = ComplexVector::zeros(n);
        for k in 0..n {
            psi.entries[k] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let pts = anandan_aharonov(&h, &psi, dt, 2).map_err(|e| e.to_string())?;
        for p in &pts {
            let dev = (p.fs_speed_sq - p.energy_variance).abs();
            worst = worst.max(dev);
            if trial < 16 {
                rows.push(vec![
                    trial.to_string(),
                    fmt_f64(p.t),
                    fmt_f64(p.fs_speed_sq),
                    fmt_f64(p.energy_variance),
                    fmt_f64(dev),
                ]);
            }
        }
    }
    let pass = worst <= cfg.tolerance;
    let mut outcome = EngineOutcome::new(
        format!(
            "fs² vs ⟨δE²⟩ over {trials} random 5-level generators at dt = {}: worst gap {}",
            fmt_f64(dt),
            fmt_f64(worst)
        ),
        pass,
    );
    outcome.metrics.insert("worst_gap".into(), worst);
    outcome.tables.push(Table {
        name: "speed_variance".into(),
        header: vec![
            "trial".into(),
            "t".into(),
            "fs_speed_sq".into(),
            "energy_variance".into(),
            "gap".into(),
        ],
        rows,
    });
    Ok(outcome)
}
