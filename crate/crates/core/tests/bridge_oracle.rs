//! Bridge-module oracles: residual monotonicity under ω-refinement and the
//! unitarity witness for slow vs fast-driven connections.

use num_complex::Complex;
use relqm_core::bridge::*;
use relqm_core::chart::{AxisGrid, CoordinateChart};
use relqm_core::evolution::{step_linearized_ket, KaSource, KetCoupling, KetState};
use relqm_core::geometry::BasisField;
use relqm_core::linalg::ComplexVector;

type C64 = Complex<f64>;

fn chart(n_re: usize, n_im: usize, hw: f64) -> CoordinateChart {
    let d_re = 2.0 * hw / (n_re as f64 - 1.0);
    let d_im = 2.0 * hw / (n_im as f64 - 1.0);
    CoordinateChart::single(AxisGrid::new("x", -hw, d_re, n_re, -hw, d_im, n_im).unwrap())
        .unwrap()
}

/// Run the Gaussian fixture at ω, returning the comparison and slow series.
fn run_fixture(ch: &CoordinateChart, omega: f64) -> (LimitComparison, KetTimeSeries) {
    let fixture = LimitFixture { horizon: 1.0, ..LimitFixture::default() };
    let (rep, slow, _) = fixture.run_with_series(ch, omega).unwrap();
    (rep, slow)
}

#[test]
fn residual_decreases_monotonically_over_three_octaves() {
    let ch = chart(25, 13, 1.8);
    let mut residuals = Vec::new();
    for omega in [8.0, 16.0, 32.0, 64.0] {
        let (_, slow) = run_fixture(&ch, omega);
        let ka = vec![0.0; slow.n_frames()];
        let mid = slow.n_frames() / 2;
        let (_, rms) = schrodinger_residual(&slow, &ka, omega, mid).unwrap();
        residuals.push(rms);
    }
    for w in residuals.windows(2) {
        assert!(
            w[1] < w[0],
            "residual not monotone under ω-refinement: {residuals:?}"
        );
    }
}

#[test]
fn unitarity_witness_slow_vs_fast_driven_connection() {
    // Slow K_a keeps the extracted slow norm within 1e-3 over the horizon;
    // a fast-driven K_a with a bias breaks unitarity beyond 1e-2.
    let ch = chart(21, 11, 1.8);
    let fixture = LimitFixture { horizon: 1.2, ..LimitFixture::default() };
    let omega = 32.0;
    let e0: Vec<C64> = (0..ch.n_nodes())
        .map(|n| fixture.initial_slow(ch.coords(n)[0]))
        .collect();
    let run = |ka: KaSource| -> f64 {
        let f0 = relqm_core::chart::ScalarField { chart: ch.clone(), values: e0.clone() };
        let lap0 = f0.laplacian().unwrap();
        let kets = BasisField {
            chart: ch.clone(),
            count: 1,
            ambient: 1,
            values: e0
                .iter()
                .map(|&v| vec![ComplexVector::new(vec![v]).unwrap()])
                .collect(),
        };
        let kets_dot = BasisField {
            chart: ch.clone(),
            count: 1,
            ambient: 1,
            values: e0
                .iter()
                .zip(&lap0.values)
                .map(|(&e, &l)| {
                    vec![ComplexVector::new(vec![
                        C64::new(0.0, -omega) * e
                            + C64::new(0.0, 1.0) / (2.0 * omega) * l,
                    ])
                    .unwrap()]
                })
                .collect(),
        };
        let ax = &ch.axes[0];
        let k2max = 4.0 / (ax.d_re * ax.d_re) + 4.0 / (ax.d_im * ax.d_im);
        let dt = (1.0 / (omega + (omega * omega + k2max).sqrt()))
            .min(0.5 / omega.powf(1.5));
        let n_steps = (fixture.horizon / dt).ceil() as usize;
        let mut state = KetState { kets, kets_dot, t: 0.0 };
        let norm0: f64 = state
            .kets
            .values
            .iter()
            .map(|k| k[0].norm_sqr())
            .sum::<f64>()
            .sqrt();
        let mut max_drift = 0.0f64;
        for _ in 0..n_steps {
            state = step_linearized_ket(
                &state,
                dt,
                KetCoupling::FastCarrier { omega },
                &ka,
            )
            .unwrap();
            let n: f64 = state
                .kets
                .values
                .iter()
                .map(|k| k[0].norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_drift = max_drift.max((n / norm0 - 1.0).abs());
        }
        max_drift
    };
    // Slow connection: tiny amplitude, slow variation.
    let slow_drift = run(KaSource::External(Box::new(|t| 5e-4 * (0.4 * t).sin())));
    assert!(slow_drift <= 1e-3, "slow-K drift {slow_drift}");
    // Fast-driven connection with a bias: the volume rate never averages
    // away and the evolution is visibly non-unitary.
    let fast_drift = run(KaSource::External(Box::new(move |t| {
        0.04 + 0.15 * (6.0 * 32.0 * t).sin()
    })));
    assert!(fast_drift > 1e-2, "fast-K drift {fast_drift}");
}

#[test]
fn slow_part_norm_is_preserved_without_connection() {
    let ch = chart(21, 11, 1.8);
    let (rep, slow) = run_fixture(&ch, 24.0);
    assert!(rep.slowness_ok);
    let n0 = slow.l2_norm(0);
    let nl = slow.l2_norm(slow.n_frames() - 1);
    assert!((nl / n0 - 1.0).abs() < 5e-3, "net slow-norm drift {}", nl / n0 - 1.0);
}
