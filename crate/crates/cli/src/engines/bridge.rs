//! Schrödinger-limit engine: ω sweep of the Gaussian-packet fixture with
//! per-octave gap ratios and the error-report table
//! {omega, horizon, max_L2, slope_vs_omega}.

use crate::output::{fmt_f64, EngineOutcome, Table};
use crate::scenario::BridgeConfig;
use num_complex::Complex;
use relqm_core::bridge::LimitFixture;
use relqm_core::chart::{AxisGrid, CoordinateChart};

type C64 = Complex<f64>;

pub fn run(cfg: &BridgeConfig) -> Result<EngineOutcome, String> {
    if cfg.omegas.len() < 2 {
        return Err("need at least two omegas".into());
    }
    let hw = cfg.grid.halfwidth;
    let d_re = 2.0 * hw / (cfg.grid.n_re as f64 - 1.0);
    let d_im = 2.0 * hw / (cfg.grid.n_im as f64 - 1.0);
    let chart = CoordinateChart::single(
        AxisGrid::new("x", -hw, d_re, cfg.grid.n_re, -hw, d_im, cfg.grid.n_im)
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let fixture = LimitFixture {
        sigma: cfg.sigma,
        k0: cfg.k0,
        center: C64::new(cfg.center[0], cfg.center[1]),
        horizon: cfg.horizon,
        frame_stride: 8,
    };
    let mut gaps = Vec::new();
    let mut slows = Vec::new();
    for &omega in &cfg.omegas {
        let rep = fixture.run(&chart, omega).map_err(|e| e.to_string())?;
        if !rep.slowness_ok {
            return Err(format!(
                "slowness ratio {} at ω = {omega} violates the fast/slow split",
                rep.slowness
            ));
        }
        gaps.push(rep.max_l2);
        slows.push(rep.slowness);
    }
    let mut rows = Vec::new();
    let mut pass = true;
    let [lo, hi] = cfg.ratio_bounds;
    let mut worst_ratio = f64::NAN;
    for (k, &omega) in cfg.omegas.iter().enumerate() {
        let slope = if k > 0 {
            let r = gaps[k] / gaps[k - 1];
            if !(lo..=hi).contains(&r) {
                pass = false;
            }
            if worst_ratio.is_nan() || (r - 0.5).abs() > (worst_ratio - 0.5).abs() {
                worst_ratio = r;
            }
            r
        } else {
            f64::NAN
        };
        rows.push(vec![
            fmt_f64(omega),
            fmt_f64(cfg.horizon),
            fmt_f64(gaps[k]),
            fmt_f64(slope),
            fmt_f64(slows[k]),
        ]);
    }
    let mut outcome = EngineOutcome::new(
        format!(
            "gap halves per octave: worst ratio {} (window [{}, {}]) over ω = {:?}",
            fmt_f64(worst_ratio),
            fmt_f64(lo),
            fmt_f64(hi),
            cfg.omegas
        ),
        pass,
    );
    outcome.metrics.insert("worst_octave_ratio".into(), worst_ratio);
    outcome
        .metrics
        .insert("max_l2_last".into(), *gaps.last().unwrap());
    outcome.tables.push(Table {
        name: "error_report".into(),
        header: vec![
            "omega".into(),
            "horizon".into(),
            "max_L2".into(),
            "slope_vs_omega".into(),
            "slowness".into(),
        ],
        rows,
    });
    Ok(outcome)
}
