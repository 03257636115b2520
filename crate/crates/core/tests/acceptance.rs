//! Acceptance criteria, one line per criterion. Runs as a plain binary so
//! the report is visible in `cargo test` output; exits non-zero if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nematic_core::diagnostics::energy::{tension_residual, total_energy};
use nematic_core::diagnostics::{
    clusters, concentration_scan, local_energy_audit, make_bubble, parabolic_rescale, phi, BubbleSpec, Cutoff,
    EnergyLedger,
};
use nematic_core::fields::spectral::integrate_values;
use nematic_core::initial::{
    random_solenoidal, random_unit_director, Geodesic, InitialCondition, RandomSeeded, TaylorGreen,
};
use nematic_core::io::ledger::LEDGER_HEADER;
use nematic_core::io::snapshot::{read_snapshot, write_snapshot};
use nematic_core::io::{parse_config, serialize_config, write_ledger, SimConfig};
use nematic_core::kernels::stress_power_identity;
use nematic_core::params::{DEFAULT_COND_TOL, DEFAULT_PARODI_TOL};
use nematic_core::scheme::GINZBURG_LANDAU;
use nematic_core::solver::RunHook;
use nematic_core::{Field, FlowState, LeslieCoefficients, Result, Solver, SolverConfig, TorusGrid};

const REFERENCE: [f64; 6] = [0.0, -2.0, 1.0, 4.0, 1.0, 0.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn grid(n: usize) -> Arc<TorusGrid> {
    Arc::new(TorusGrid::periodic(n).unwrap())
}

fn reference() -> LeslieCoefficients {
    LeslieCoefficients::new(REFERENCE).unwrap()
}

fn config(dt: f64, steps: usize) -> SolverConfig {
    SolverConfig {
        dt,
        steps,
        ..SolverConfig::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Trajectory {
    every: usize,
    states: Vec<FlowState>,
}

impl RunHook for Trajectory {
    fn every(&self) -> usize {
        self.every
    }

    fn observe(&mut self, _: usize, state: &FlowState, _: &mut EnergyLedger) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}

fn coefficient_gate() -> Result<Outcome> {
    let check = |mu: [f64; 6]| {
        LeslieCoefficients::new(mu)
            .unwrap()
            .validate(DEFAULT_PARODI_TOL, DEFAULT_COND_TOL)
    };
    let reference_ok = check(REFERENCE).is_valid();
    let parodi = check([0.0, -2.0, 1.0, 4.0, 1.0, 0.5]);
    let viscosity = check([0.0, -2.0, 1.0, 0.0, 1.0, 0.0]);
    let lambda1 = check([0.0, 1.0, 1.0, 4.0, -1.0, 1.0]);
    let alignment = check([-1.0, -2.0, 1.0, 4.0, 1.0, 0.0]);
    let stretching = check([0.0, -2.0, 1.0, 4.0, 0.1, -0.9]);
    let cases = [
        (
            "parodi",
            !parodi.parodi_ok
                && parodi.lambda1_negative
                && parodi.alignment_nonneg
                && parodi.viscosity_positive
                && parodi.stretching_ok,
        ),
        (
            "mu4",
            !viscosity.viscosity_positive
                && viscosity.parodi_ok
                && viscosity.lambda1_negative
                && viscosity.alignment_nonneg
                && viscosity.stretching_ok,
        ),
        (
            "lambda1",
            !lambda1.lambda1_negative && lambda1.parodi_ok && lambda1.viscosity_positive,
        ),
        (
            "alignment",
            !alignment.alignment_nonneg
                && alignment.parodi_ok
                && alignment.lambda1_negative
                && alignment.viscosity_positive
                && alignment.stretching_ok,
        ),
        (
            "stretching",
            !stretching.stretching_ok
                && stretching.parodi_ok
                && stretching.lambda1_negative
                && stretching.viscosity_positive
                && stretching.alignment_nonneg,
        ),
    ];
    let rejected = [&parodi, &viscosity, &lambda1, &alignment, &stretching]
        .iter()
        .all(|r| !r.is_valid());
    let wrong: Vec<&str> = cases.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        reference_ok && rejected && wrong.is_empty(),
        format!("reference accepted: {reference_ok}, five violations rejected: {rejected}, wrong flags: {wrong:?}"),
    )
}

fn stress_power() -> Result<Outcome> {
    let g = grid(32);
    let c = reference();
    let eta = Field::from_fn(&g, 1, |_, _, _| 1.0);
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let u = random_solenoidal(&g, 6, 1.0, 2 * seed);
        let d = random_unit_director(&g, 6, 2 * seed + 1);
        let (lhs, rhs) = stress_power_identity(&u, &d, &c, &eta)?;
        worst = worst.max(rel(rhs, lhs));
    }
    outcome(
        worst <= 1e-9,
        format!("max relative error {worst:.3e} over 100 seeds (tol 1e-9)"),
    )
}

fn taylor_green_error(dt: f64, mu4: f64) -> Result<f64> {
    let g = grid(64);
    let steps = (1.0 / dt).round() as usize;
    let cfg = SolverConfig {
        ledger_every: 0,
        ..config(dt, steps)
    };
    let solver = Solver::new(LeslieCoefficients::newtonian(mu4)?, cfg)?;
    let initial = TaylorGreen { amplitude: 1.0 }.build(&g)?;
    let e0 = integrate_values(&g, &initial.u.pointwise_norm_sq());
    let out = solver.run(initial, &mut []).map_err(|f| f.error)?;
    let e1 = integrate_values(&g, &out.state.u.pointwise_norm_sq());
    let exact = e0 * (-2.0 * mu4 * out.state.t).exp();
    Ok(rel(e1, exact))
}

fn newtonian_reduction() -> Result<Outcome> {
    let mu4 = 0.5;
    let coarse = taylor_green_error(1e-3, mu4)?;
    let fine = taylor_green_error(5e-4, mu4)?;
    let ratio = coarse / fine;
    outcome(
        coarse <= 1e-3 && (1.6..=2.4).contains(&ratio),
        format!("mu4 = {mu4}: relative error {coarse:.3e} at dt = 1e-3 (tol 1e-3), halving ratio {ratio:.3}"),
    )
}

fn geodesic_equilibrium() -> Result<Outcome> {
    let g = grid(32);
    let solver = Solver::new(reference(), config(1e-3, 1000))?;
    let initial = Geodesic { kx: 1, ky: 0 }.build(&g)?;
    let mut state = initial.clone();
    let mut tension: f64 = tension_residual(&state.d)?;
    for _ in 0..1000 {
        state = solver.advance(&state)?;
        tension = tension.max(tension_residual(&state.d)?);
    }
    let du = state.u.max_diff(&initial.u);
    let dd = state.d.max_diff(&initial.d);
    outcome(
        du <= 1e-8 && dd <= 1e-8 && tension <= 1e-10,
        format!("drift |u| {du:.3e}, |d| {dd:.3e} (tol 1e-8); max tension residual {tension:.3e} (tol 1e-10)"),
    )
}

const LAW_N: usize = 32;
const LAW_T: f64 = 0.2;
const LAW_SEED: u64 = 11;

fn law_initial() -> Result<FlowState> {
    RandomSeeded {
        seed: LAW_SEED,
        ..RandomSeeded::default()
    }
    .build(&grid(LAW_N))
}

/// Generic run of the energy-law criterion, optionally keeping every state.
fn law_run(dt: f64, keep: bool) -> Result<(EnergyLedger, Vec<FlowState>)> {
    let steps = (LAW_T / dt).round() as usize;
    let solver = Solver::new(reference(), config(dt, steps))?;
    let mut traj = Trajectory {
        every: usize::from(keep),
        states: Vec::new(),
    };
    let out = solver.run(law_initial()?, &mut [&mut traj]).map_err(|f| f.error)?;
    Ok((out.ledger, traj.states))
}

fn energy_law() -> Result<Outcome> {
    let mut pass = true;
    let mut residuals = Vec::new();
    let mut worst_increase = f64::NEG_INFINITY;
    let mut worst_dissipation = f64::INFINITY;
    for dt in [2e-3, 1e-3, 5e-4] {
        let (ledger, _) = law_run(dt, false)?;
        worst_increase = worst_increase.max(ledger.max_energy_increase());
        for r in ledger.rows() {
            let d = r.dissipation;
            worst_dissipation = worst_dissipation.min(d.visc.min(d.dir).min(d.align1).min(d.align2));
        }
        residuals.push(ledger.cumulative_residual().abs());
    }
    pass &= worst_increase <= 1e-6 && worst_dissipation >= -1e-10;
    let ratios = [residuals[0] / residuals[1], residuals[1] / residuals[2]];
    pass &= ratios.iter().all(|r| (1.6..=2.4).contains(r));
    outcome(
        pass,
        format!(
            "max energy increase {worst_increase:.3e} (tol 1e-6), min dissipation {worst_dissipation:.3e}, \
             residuals {:.3e} / {:.3e} / {:.3e}, ratios {:.3} {:.3}",
            residuals[0], residuals[1], residuals[2], ratios[0], ratios[1]
        ),
    )
}

fn bubble_detector() -> Result<Outcome> {
    let g = grid(256);
    let l = g.length();
    let lambda = l / 100.0;
    let center = (0.5 * l, 0.5 * l);
    let mut s1 = FlowState::at_rest(&g, [0.0, 0.0, 1.0]);
    s1.d = make_bubble(&g, &BubbleSpec::new(center, lambda, 1))?;
    let e1 = total_energy(&s1)?;
    let mut s2 = s1.clone();
    s2.d = make_bubble(&g, &BubbleSpec::new(center, lambda, 2))?;
    let e2 = total_energy(&s2)?;
    let events = concentration_scan(&s1, 10.0 * lambda, 8.0 * PI, 0.01)?;
    let dist = |p: (f64, f64)| {
        let w = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(l);
            d.min(l - d)
        };
        w(p.0, center.0).hypot(w(p.1, center.1))
    };
    let farthest = events.iter().map(|e| dist(e.center)).fold(0.0, f64::max);
    let groups = clusters(&g, &events);
    let flagged_center = groups.iter().any(|c| dist(c.peak.center) <= g.spacing());
    let r1 = rel(e1, 8.0 * PI);
    let r2 = rel(e2, 16.0 * PI);
    outcome(
        r1 <= 0.01 && r2 <= 0.02 && flagged_center && farthest <= 3.0 * lambda,
        format!(
            "degree 1 error {r1:.2e} (tol 1e-2), degree 2 error {r2:.2e} (tol 2e-2), {} flags, \
             farthest {:.2} lambda (tol 3)",
            events.len(),
            farthest / lambda
        ),
    )
}

fn phi_scaling() -> Result<Outcome> {
    let g = grid(32);
    let solver = Solver::new(reference(), config(1e-3, 250))?;
    let mut traj = Trajectory {
        every: 5,
        states: Vec::new(),
    };
    let initial = RandomSeeded {
        seed: 5,
        ..RandomSeeded::default()
    }
    .build(&g)?;
    let out = solver.run(initial, &mut [&mut traj]).map_err(|f| f.error)?;
    let c = reference();
    let x0 = (2.0, 3.5);
    let mut worst: f64 = 0.0;
    let mut states = traj.states;
    if states.last().map(|s| s.t) != Some(out.state.t) {
        states.push(out.state);
    }
    let t_end = states.last().unwrap().t;
    for r in [0.25, 0.5] {
        let original = phi(&states, &c, x0, t_end, r)?;
        let rescaled = parabolic_rescale(&states, r, t_end)?;
        let unit = phi(&rescaled, &c, (x0.0 / r, x0.1 / r), 0.0, 1.0)?;
        worst = worst.max(rel(unit.total(), original.total()));
    }
    outcome(
        worst <= 1e-4,
        format!("max relative mismatch {worst:.3e} for r in {{1/4, 1/2}} (tol 1e-4)"),
    )
}

fn ginzburg_landau() -> Result<Outcome> {
    let g = grid(32);
    let cfg = SolverConfig {
        mode: GINZBURG_LANDAU.to_string(),
        epsilon: 0.1,
        ..config(5e-4, 1000)
    };
    let solver = Solver::new(reference(), cfg)?;
    let initial = RandomSeeded {
        seed: 17,
        ..RandomSeeded::default()
    }
    .build(&g)?;
    let out = solver.run(initial, &mut []).map_err(|f| f.error)?;
    let increase = out.ledger.max_energy_increase();
    let deviation = out
        .ledger
        .rows()
        .iter()
        .map(|r| r.max_unit_violation)
        .fold(0.0, f64::max);
    outcome(
        increase <= 1e-5 && deviation <= 0.05,
        format!("max energy increase {increase:.3e} (tol 1e-5), max ||d|-1| {deviation:.3e} (tol 0.05)"),
    )
}

fn local_audit() -> Result<Outcome> {
    let (ledger, states) = law_run(1e-3, true)?;
    let c = reference();
    let windows = [(0.5, 1.0), (1.0, 2.0), (1.5, 3.0)];
    let interval = 20;
    let mut checked = 0;
    let mut failed = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (inner, outer) in windows {
        let cutoff = Cutoff::annular((3.0, 3.0), inner, outer);
        for start in (0..states.len() - 1).step_by(interval) {
            let end = (start + interval).min(states.len() - 1);
            let a = local_energy_audit(&states[start..=end], &c, &cutoff)?;
            checked += 1;
            if !a.passes(10.0) {
                failed += 1;
            }
            worst = worst.max(a.lhs / a.flux_bound);
        }
    }
    let whole = local_energy_audit(&states, &c, &Cutoff::Whole)?;
    let global = ledger.cumulative_residual();
    let gap = (whole.lhs + whole.alignment - global).abs();
    outcome(
        failed == 0 && gap <= 1e-8,
        format!(
            "{checked} intervals, {failed} failures at C = 10, max lhs/flux {worst:.3e}; \
             whole-domain gap to global residual {gap:.3e} (tol 1e-8)"
        ),
    )
}

fn io_exactness() -> Result<Outcome> {
    let dir = tempfile::tempdir().map_err(nematic_core::Error::Io)?;
    let g = Arc::new(TorusGrid::new(24, 5.0)?);
    let mut state = RandomSeeded {
        seed: 23,
        ..RandomSeeded::default()
    }
    .build(&g)?;
    state.t = 0.1 + 0.2;
    let snap = dir.path().join("s.snap");
    write_snapshot(&state, 0, &snap)?;
    let back = read_snapshot(&snap)?.state;
    let bits = |f: &Field| f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    let snapshot_ok = back.t.to_bits() == state.t.to_bits()
        && bits(&back.u) == bits(&state.u)
        && bits(&back.d) == bits(&state.d)
        && back.grid().length().to_bits() == g.length().to_bits();

    let mut cfg = SimConfig::with_coefficients([0.1, -2.0, 1.0, 4.0, 1.5, 0.5]);
    cfg.time.dt = 1.0 / 3.0 * 1e-3;
    cfg.grid.length = 7.1;
    cfg.diagnostics.concentration_radii = vec![0.3, 0.7];
    let config_ok = parse_config(&serialize_config(&cfg))? == cfg;

    let solver = Solver::new(reference(), config(1e-3, 2))?;
    let out = solver.run(state, &mut []).map_err(|f| f.error)?;
    let ledger_path = dir.path().join("ledger.csv");
    write_ledger(&out.ledger, &ledger_path, dir.path().join("events.csv"))?;
    let text = std::fs::read_to_string(&ledger_path)?;
    let mut lines = text.lines();
    let header_ok = lines.next() == Some(LEDGER_HEADER.join(",").as_str());
    let first: Vec<f64> = lines
        .next()
        .map(|l| l.split(',').filter_map(|v| v.parse().ok()).collect())
        .unwrap_or_default();
    let row = out.ledger.rows()[0];
    let expected = [
        row.t,
        row.energy,
        row.dissipation.visc,
        row.dissipation.dir,
        row.dissipation.align1,
        row.dissipation.align2,
        row.residual,
        row.max_div_u,
        row.max_unit_violation,
    ];
    let columns_ok = header_ok && first == expected;
    outcome(
        snapshot_ok && config_ok && columns_ok,
        format!("snapshot bit-exact: {snapshot_ok}, config round trip: {config_ok}, ledger columns: {columns_ok}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("coefficient gate", Duration::from_millis(1), coefficient_gate),
        ("stress-power identity", Duration::from_secs(10), stress_power),
        ("newtonian reduction", Duration::from_secs(30), newtonian_reduction),
        ("geodesic equilibrium", Duration::from_secs(30), geodesic_equilibrium),
        ("global energy law", Duration::from_secs(120), energy_law),
        ("bubble energy and detector", Duration::from_secs(60), bubble_detector),
        ("phi scaling", Duration::from_secs(60), phi_scaling),
        ("ginzburg-landau mode", Duration::from_secs(60), ginzburg_landau),
        ("local energy audit", Duration::from_secs(60), local_audit),
        ("i/o exactness", Duration::from_secs(1), io_exactness),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  {detail}; {:.3} s (budget {} s)",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
