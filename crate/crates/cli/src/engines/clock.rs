//! Clock-constraint engine: resonant ideal-clock exactness, Gaussian
//! spreading, finite-width monotonicity, and the tuned massive-clock pair.

use crate::output::{fmt_f64, EngineOutcome, Table};
use crate::scenario::{ClockConfig, ClockFixture};
use num_complex::Complex;
use relqm_core::clockworks::*;
use relqm_core::linalg::ComplexVector;

type C64 = Complex<f64>;

pub fn run(cfg: &ClockConfig) -> Result<EngineOutcome, String> {
    match cfg.fixture {
        ClockFixture::IdealResonant => ideal_resonant(cfg),
        ClockFixture::GaussianSpreading => gaussian_spreading(cfg),
        ClockFixture::WindowMonotonic => window_monotonic(cfg),
        ClockFixture::GenericPair => generic_pair(cfg),
    }
}

fn ideal_resonant(cfg: &ClockConfig) -> Result<EngineOutcome, String> {
    let model = ideal_resonant_two_mode_model(
        cfg.d_x,
        cfg.d_t,
        cfg.m_x,
        cfg.dx,
        cfg.wd_tol.unwrap_or(1e-9),
    )
    .map_err(|e| e.to_string())?;
    let sol = solve_constraint(&model, None).map_err(|e| e.to_string())?;
    let (hx, _) = build_hamiltonians(&model).map_err(|e| e.to_string())?;
    // Conditioned slices against converged implicit-midpoint propagation.
    let substeps_per_node = 64usize;
    let total_sub = cfg.d_t * substeps_per_node;
    let cn = cn_propagate(
        hx.as_matrix(),
        &model.psi0,
        model.t_grid.step / substeps_per_node as f64,
        total_sub - substeps_per_node,
    )
    .map_err(|e| e.to_string())?;
    let mut min_fid = 1.0f64;
    let mut rows = Vec::new();
    for n in 0..cfg.d_t {
        let t = model.t_grid.point(n);
        let cond =
            condition_on_clock(&sol, t, ConditioningWindow::Delta).map_err(|e| e.to_string())?;
        let reference = &cn[n * substeps_per_node];
        let f = fidelity(&cond, reference);
        min_fid = min_fid.min(f);
        rows.push(vec![n.to_string(), fmt_f64(t), fmt_f64(f)]);
    }
    let residual_tol = cfg.residual_tol.unwrap_or(1e-10);
    let expectation_tol = cfg.expectation_tol.unwrap_or(1e-8);
    let fidelity_tol = cfg.fidelity_tol.unwrap_or(1e-6);
    let pass = sol.constraint_residual <= residual_tol
        && sol.energy_expectation.abs() <= expectation_tol
        && min_fid >= 1.0 - fidelity_tol;
    let mut outcome = EngineOutcome::new(
        format!(
            "ideal resonant clock {}×{}: residual {}, ⟨E⟩ {}, min fidelity 1−{}",
            cfg.d_x,
            cfg.d_t,
            fmt_f64(sol.constraint_residual),
            fmt_f64(sol.energy_expectation),
            fmt_f64(1.0 - min_fid)
        ),
        pass,
    );
    outcome
        .metrics
        .insert("constraint_residual".into(), sol.constraint_residual);
    outcome
        .metrics
        .insert("energy_expectation".into(), sol.energy_expectation);
    outcome.metrics.insert("min_fidelity".into(), min_fid);
    outcome.tables.push(Table {
        name: "fidelity".into(),
        header: vec!["clock_node".into(), "t".into(), "fidelity".into()],
        rows,
    });
    Ok(outcome)
}

fn gaussian_model(cfg: &ClockConfig) -> Result<ClockSystemModel, String> {
    let sigma0 = cfg.sigma0.unwrap_or(1.1);
    let horizon = cfg.horizon.unwrap_or(4.0);
    let x0 = -(cfg.d_x as f64 - 1.0) / 2.0 * cfg.dx;
    let x_grid = RealGrid::new(x0, cfg.dx, cfg.d_x).map_err(|e| e.to_string())?;
    let mut psi0 = ComplexVector::zeros(cfg.d_x);
    for (i, x) in x_grid.points().iter().enumerate() {
        psi0.entries[i] = C64::new((-x * x / (4.0 * sigma0 * sigma0)).exp(), 0.0);
    }
    let n = psi0.norm();
    for z in &mut psi0.entries {
        *z /= n;
    }
    let t_step = horizon / (cfg.d_t as f64 - 1.0);
    Ok(ClockSystemModel {
        x_grid,
        t_grid: RealGrid::new(0.0, t_step, cfg.d_t).map_err(|e| e.to_string())?,
        m_x: cfg.m_x,
        clock: ClockMode::Ideal,
        v: vec![0.0; cfg.d_x],
        psi0,
        wd_tol: cfg.wd_tol.unwrap_or(f64::INFINITY),
    })
}

fn gaussian_spreading(cfg: &ClockConfig) -> Result<EngineOutcome, String> {
    let sigma0 = cfg.sigma0.unwrap_or(1.1);
    let model = gaussian_model(cfg)?;
    let sol = solve_constraint(&model, None).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for n in (cfg.d_t / 4..cfg.d_t).step_by((cfg.d_t / 4).max(1)) {
        let t = model.t_grid.point(n);
        let cond =
            condition_on_clock(&sol, t, ConditioningWindow::Delta).map_err(|e| e.to_string())?;
        let total: f64 = cond.entries.iter().map(|z| z.norm_sqr()).sum();
        let mean: f64 = cond
            .entries
            .iter()
            .enumerate()
            .map(|(i, z)| model.x_grid.point(i) * z.norm_sqr())
            .sum::<f64>()
            / total;
        let var: f64 = cond
            .entries
            .iter()
            .enumerate()
            .map(|(i, z)| (model.x_grid.point(i) - mean).powi(2) * z.norm_sqr())
            .sum::<f64>()
            / total;
        let got = var.sqrt();
        let want = (sigma0 * sigma0 + (t / (2.0 * model.m_x * sigma0)).powi(2)).sqrt();
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        rows.push(vec![fmt_f64(t), fmt_f64(got), fmt_f64(want), fmt_f64(rel)]);
    }
    let tol = cfg.width_tol.unwrap_or(0.01);
    let pass = worst <= tol;
    let mut outcome = EngineOutcome::new(
        format!(
            "free-packet spreading: worst relative width error {} (tol {})",
            fmt_f64(worst),
            fmt_f64(tol)
        ),
        pass,
    );
    outcome.metrics.insert("worst_width_error".into(), worst);
    outcome.tables.push(Table {
        name: "widths".into(),
        header: vec!["t".into(), "width".into(), "free_law".into(), "rel_error".into()],
        rows,
    });
    Ok(outcome)
}

fn window_monotonic(cfg: &ClockConfig) -> Result<EngineOutcome, String> {
    let model = gaussian_model(cfg)?;
    let sol = solve_constraint(&model, None).map_err(|e| e.to_string())?;
    let t = model.t_grid.point(cfg.d_t / 2);
    let delta =
        condition_on_clock(&sol, t, ConditioningWindow::Delta).map_err(|e| e.to_string())?;
    let widths = cfg.widths.clone().unwrap_or(vec![1.0, 2.0, 4.0]);
    let mut devs = Vec::new();
    let mut rows = Vec::new();
    for w in &widths {
        let sigma = w * model.t_grid.step;
        let win = condition_on_clock(&sol, t, ConditioningWindow::Gaussian { sigma })
            .map_err(|e| e.to_string())?;
        let dev = win.sub(&delta).norm();
        rows.push(vec![fmt_f64(*w), fmt_f64(sigma), fmt_f64(dev)]);
        devs.push(dev);
    }
    let monotone = devs.windows(2).all(|p| p[0] < p[1]);
    let mut outcome = EngineOutcome::new(
        format!(
            "finite-width conditioning deviations {:?} over widths {:?}: monotone = {monotone}",
            devs.iter().map(|d| fmt_f64(*d)).collect::<Vec<_>>(),
            widths
        ),
        monotone,
    );
    outcome
        .metrics
        .insert("max_deviation".into(), devs.last().cloned().unwrap_or(0.0));
    outcome.tables.push(Table {
        name: "windows".into(),
        header: vec!["width_steps".into(), "sigma_T".into(), "deviation".into()],
        rows,
    });
    Ok(outcome)
}

fn generic_pair(cfg: &ClockConfig) -> Result<EngineOutcome, String> {
    let m_t = cfg.m_t.unwrap_or(2.0);
    let x_grid = RealGrid::new(0.0, cfg.dx, cfg.d_x).map_err(|e| e.to_string())?;
    let t_grid = RealGrid::new(0.0, 0.5, cfg.d_t).map_err(|e| e.to_string())?;
    let base = ClockSystemModel {
        x_grid: x_grid.clone(),
        t_grid: t_grid.clone(),
        m_x: cfg.m_x,
        clock: ClockMode::Massive { m_t },
        v: vec![0.0; cfg.d_x],
        psi0: ComplexVector::basis_state(cfg.d_x, 0),
        wd_tol: f64::INFINITY,
    };
    let (hx, ht) = build_hamiltonians(&base).map_err(|e| e.to_string())?;
    let (ex, _) = hx.eigh();
    let (et, _) = ht.eigh();
    let target = et[cfg.d_t / 2];
    let mut tuned = base.clone();
    tuned.v = vec![-(ex[0] + target); cfg.d_x];
    let sol = solve_constraint(&tuned, None).map_err(|e| e.to_string())?;
    // Detuned guard: push beyond every pairing.
    let spacing = (et[cfg.d_t - 1] - et[0]) / (cfg.d_t as f64 - 1.0);
    let mut detuned = base.clone();
    detuned.v = vec![-(ex[0] + target) + 40.0 * spacing; cfg.d_x];
    let guard = matches!(
        solve_constraint(&detuned, Some(1e-6)),
        Err(relqm_core::CoreError::NoZeroMode(_))
    );
    let tol = cfg.residual_tol.unwrap_or(1e-9);
    let pass = sol.constraint_residual <= tol && guard;
    let mut outcome = EngineOutcome::new(
        format!(
            "tuned ±E pair: residual {}, detuned guard NoZeroMode = {guard}",
            fmt_f64(sol.constraint_residual)
        ),
        pass,
    );
    outcome
        .metrics
        .insert("constraint_residual".into(), sol.constraint_residual);
    outcome.metrics.insert(
        "energy_expectation".into(),
        sol.energy_expectation,
    );
    outcome.tables.push(Table {
        name: "pair".into(),
        header: vec!["residual".into(), "expectation".into(), "guard".into()],
        rows: vec![vec![
            fmt_f64(sol.constraint_residual),
            fmt_f64(sol.energy_expectation),
            guard.to_string(),
        ]],
    });
    Ok(outcome)
}
