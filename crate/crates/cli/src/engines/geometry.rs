//! Geometry engine: curvature sweeps over named metric fixtures with
//! optional grid-refinement ratio measurement and per-node field dumps.

use crate::output::{fmt_f64, EngineOutcome, Table};
use crate::scenario::{GeometryConfig, GeometryFixture};
use num_complex::Complex;
use relqm_core::chart::{AxisGrid, CoordinateChart};
use relqm_core::geometry::{ricci_field, MetricField, MetricKind};
use relqm_core::ComplexMatrix;

type C64 = Complex<f64>;

fn build_field(
    fixture: GeometryFixture,
    n: usize,
    hw: f64,
) -> Result<(CoordinateChart, MetricField), String> {
    let chart = CoordinateChart::single(
        AxisGrid::centered_square("x", C64::new(0.0, 0.0), hw, n)
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let h = match fixture {
        GeometryFixture::FubiniStudy => {
            MetricField::from_fn(&chart, 1, MetricKind::H, |z| {
                ComplexMatrix::diag(&[C64::new((1.0 + z[0].norm_sqr()).powi(-2), 0.0)])
            })
        }
        GeometryFixture::Flat => MetricField::from_fn(&chart, 1, MetricKind::H, |_| {
            ComplexMatrix::diag(&[C64::new(1.0, 0.0)])
        }),
        GeometryFixture::GaussianPotential => {
            MetricField::from_fn(&chart, 1, MetricKind::H, |z| {
                ComplexMatrix::diag(&[C64::new(z[0].norm_sqr().exp(), 0.0)])
            })
        }
    }
    .map_err(|e| e.to_string())?;
    Ok((chart, h))
}

/// Exact curvature of the fixture, for error measurement.
fn exact_ricci(fixture: GeometryFixture, z: C64, h: f64) -> f64 {
    match fixture {
        GeometryFixture::FubiniStudy => 2.0 * h,
        GeometryFixture::Flat => 0.0,
        GeometryFixture::GaussianPotential => {
            let _ = z;
            -1.0
        }
    }
}

fn max_error(fixture: GeometryFixture, n: usize, hw: f64) -> Result<(f64, f64), String> {
    let (chart, h) = build_field(fixture, n, hw)?;
    let (r, drift) = ricci_field(&h).map_err(|e| e.to_string())?;
    let mut emax = 0.0f64;
    for node in 0..chart.n_nodes() {
        if chart.is_interior(node, 2) {
            let z = chart.coords(node)[0];
            let want = exact_ricci(fixture, z, h.field.at(node)[(0, 0)].re);
            emax = emax.max((r.values[node][(0, 0)] - C64::new(want, 0.0)).norm());
        }
    }
    Ok((emax, drift))
}

pub fn run(cfg: &GeometryConfig) -> Result<EngineOutcome, String> {
    let (e_coarse, drift) = max_error(cfg.fixture, cfg.n, cfg.halfwidth)?;
    let mut pass = true;
    let mut notes = Vec::new();
    let mut metrics = std::collections::BTreeMap::new();
    metrics.insert("max_error_coarse".into(), e_coarse);
    metrics.insert("hermiticity_drift".into(), drift);
    if let Some(tol) = cfg.max_norm_tol {
        metrics.insert("max_norm_tol".into(), tol);
        if e_coarse > tol {
            pass = false;
        }
        notes.push(format!("max ‖R − R_exact‖ {} (tol {})", fmt_f64(e_coarse), fmt_f64(tol)));
    }
    let mut ratio = f64::NAN;
    if let Some(rn) = cfg.refined_n {
        let (e_fine, _) = max_error(cfg.fixture, rn, cfg.halfwidth)?;
        ratio = e_coarse / e_fine;
        metrics.insert("max_error_fine".into(), e_fine);
        metrics.insert("refinement_ratio".into(), ratio);
        if let Some([lo, hi]) = cfg.ratio_bounds {
            if !(lo..=hi).contains(&ratio) {
                pass = false;
            }
            notes.push(format!(
                "refinement ratio {} (window [{}, {}])",
                fmt_f64(ratio),
                fmt_f64(lo),
                fmt_f64(hi)
            ));
        }
    }
    let mut outcome = EngineOutcome::new(
        format!("{:?} at {}×{}: {}", cfg.fixture, cfg.n, cfg.n, notes.join("; ")),
        pass,
    );
    outcome.metrics = metrics;
    // Per-node dump: coordinates and flattened matrices.
    if cfg.dump_field {
        let (chart, h) = build_field(cfg.fixture, cfg.n, cfg.halfwidth)?;
        let (r, _) = ricci_field(&h).map_err(|e| e.to_string())?;
        let mut rows = Vec::with_capacity(chart.n_nodes());
        for node in 0..chart.n_nodes() {
            let z = chart.coords(node)[0];
            rows.push(vec![
                node.to_string(),
                fmt_f64(z.re),
                fmt_f64(z.im),
                fmt_f64(h.field.at(node)[(0, 0)].re),
                fmt_f64(h.field.at(node)[(0, 0)].im),
                fmt_f64(r.values[node][(0, 0)].re),
                fmt_f64(r.values[node][(0, 0)].im),
            ]);
        }
        outcome.tables.push(Table {
            name: "field".into(),
            header: vec![
                "node".into(),
                "re_x".into(),
                "im_x".into(),
                "h_re".into(),
                "h_im".into(),
                "ricci_re".into(),
                "ricci_im".into(),
            ],
            rows,
        });
    } else {
        outcome.tables.push(Table {
            name: "summary".into(),
            header: vec!["max_error".into(), "ratio".into(), "hermiticity_drift".into()],
            rows: vec![vec![fmt_f64(e_coarse), fmt_f64(ratio), fmt_f64(drift)]],
        });
    }
    Ok(outcome)
}
