//! First-order IMEX time stepping.
//!
//! Both stiff Laplacians (`(μ4/2)Δu` in the momentum balance and `Δd/|λ1|`
//! in the director equation) are implicit and diagonal in Fourier space;
//! advection, the Ericksen stress, the non-Newtonian Leslie stress, frame
//! rotation and the constraint reaction are explicit. Every explicit term is
//! evaluated at the old state, the velocity is Leray-projected last and the
//! director scheme then enforces its constraint.

mod pressure;
mod state;

use std::sync::Arc;

use log::warn;
use num_complex::Complex64;

pub use pressure::{recover_pressure, recover_pressure_with};
pub use state::FlowState;

use crate::diagnostics::energy::{EnergyLedger, LedgerRow};
use crate::error::{Error, Result};
use crate::fields::{self, spectral, Field};
use crate::kernels::{self, DirectorGeometry, KinematicTensors};
use crate::params::LeslieCoefficients;
use crate::scheme::{scheme_registry, DirectorScheme, SchemeParams, PROJECTION};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_CFL_GUARD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub steps: usize,
    /// Registered director scheme name.
    pub mode: String,
    /// Penalty width of the Ginzburg–Landau scheme.
    pub epsilon: f64,
    pub dealias: bool,
    /// Largest accepted `max|u|·dt/h`.
    pub cfl_guard: f64,
    /// Ledger cadence in steps; `0` records only the first and last state.
    pub ledger_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            steps: 0,
            mode: PROJECTION.to_string(),
            epsilon: SchemeParams::default().epsilon,
            dealias: true,
            cfl_guard: DEFAULT_CFL_GUARD,
            ledger_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let field = |f: &str, m: String| Error::ConfigField {
            field: f.to_string(),
            message: m,
        };
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(field("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(field("epsilon", format!("{} must be positive", self.epsilon)));
        }
        if !(self.cfl_guard > 0.0) {
            return Err(field("cfl_guard", format!("{} must be positive", self.cfl_guard)));
        }
        Ok(())
    }
}

/// Called by [`Solver::run`] after the initial state and after every
/// `every()`-th accepted step.
pub trait RunHook {
    fn every(&self) -> usize;

    fn observe(&mut self, step: usize, state: &FlowState, ledger: &mut EnergyLedger) -> Result<()>;
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: FlowState,
    pub ledger: EnergyLedger,
    pub steps: usize,
}

/// Aborted run: the error, the last accepted state and everything recorded
/// before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub last_good: FlowState,
    pub ledger: EnergyLedger,
    pub steps: usize,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run aborted after {} steps at t = {}: {}",
            self.steps, self.last_good.t, self.error
        )
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

#[derive(Debug, Clone)]
pub struct Solver {
    coeffs: LeslieCoefficients,
    scheme: Arc<dyn DirectorScheme>,
    config: SolverConfig,
}

impl Solver {
    /// Build a solver, resolving `config.mode` through the scheme registry.
    pub fn new(coeffs: LeslieCoefficients, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        coeffs.require_dissipative_director()?;
        let scheme = scheme_registry().create(
            &config.mode,
            &SchemeParams {
                epsilon: config.epsilon,
            },
        )?;
        if let Some(msg) = scheme.stiffness_advisory(config.dt, &coeffs) {
            warn!("{msg}");
        }
        Ok(Self {
            coeffs,
            scheme: Arc::from(scheme),
            config,
        })
    }

    pub fn with_scheme(
        coeffs: LeslieCoefficients,
        scheme: Arc<dyn DirectorScheme>,
        config: SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        coeffs.require_dissipative_director()?;
        Ok(Self { coeffs, scheme, config })
    }

    pub fn coeffs(&self) -> &LeslieCoefficients {
        &self.coeffs
    }

    pub fn scheme(&self) -> &dyn DirectorScheme {
        self.scheme.as_ref()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Velocity after one step, projected onto solenoidal fields.
    pub fn momentum_step(&self, state: &FlowState, dt: f64) -> Result<Field> {
        let geom = DirectorGeometry::new(&state.d)?;
        let kin = kernels::kinematics_with(&state.u, &state.d, &geom, &self.coeffs, self.scheme())?;
        self.momentum_with(state, &geom, &kin, dt)
    }

    /// Director after one step, with the scheme's constraint applied.
    pub fn director_step(&self, state: &FlowState, dt: f64) -> Result<Field> {
        let geom = DirectorGeometry::new(&state.d)?;
        let kin = kernels::kinematics_with(&state.u, &state.d, &geom, &self.coeffs, self.scheme())?;
        self.director_with(state, &geom, &kin, dt)
    }

    fn momentum_with(
        &self,
        state: &FlowState,
        geom: &DirectorGeometry,
        kin: &KinematicTensors,
        dt: f64,
    ) -> Result<Field> {
        let u = &state.u;
        // S = -u⊗u - ∇d⊙∇d + (σ^L - μ4 A)
        let mut s = kernels::leslie_stress_remainder(kin, &state.d, &self.coeffs);
        s.axpy(-1.0, &kernels::ericksen_from_grad(&geom.grad));
        for i in 0..2 {
            for j in 0..2 {
                let ui = u.component(i).to_vec();
                for (v, (a, b)) in s.component_mut(2 * i + j).iter_mut().zip(ui.iter().zip(u.component(j))) {
                    *v -= a * b;
                }
            }
        }
        let force = spectral::tensor_divergence(&s)?;
        let grid = u.grid();
        let nu = 0.5 * self.coeffs.mu4();
        let mut spec = [Vec::new(), Vec::new()];
        for (c, sp) in spec.iter_mut().enumerate() {
            let mut uh = grid.forward(u.component(c));
            let fh = grid.forward(force.component(c));
            for (idx, z) in uh.iter_mut().enumerate() {
                let f = if self.config.dealias && !grid.retained(idx) {
                    Complex64::new(0.0, 0.0)
                } else {
                    fh[idx]
                };
                *z = (*z + f * dt) / (1.0 + dt * nu * grid.k_squared(idx));
            }
            *sp = uh;
        }
        let [mut sx, mut sy] = spec;
        spectral::leray_in_spectrum(grid, &mut sx, &mut sy);
        Field::from_components(grid, &[&grid.inverse(sx), &grid.inverse(sy)])
    }

    fn director_with(
        &self,
        state: &FlowState,
        geom: &DirectorGeometry,
        kin: &KinematicTensors,
        dt: f64,
    ) -> Result<Field> {
        let d = &state.d;
        let rate = self.coeffs.relaxation_rate();
        // everything except the implicit Δd/|λ1|
        let mut g = kin.n.clone();
        g.axpy(-rate, &geom.laplacian);
        g.axpy(1.0, &kernels::omega_d_field(&kin.omega, d));
        g.axpy(-1.0, &kernels::advection(&state.u, &geom.grad));
        let grid = d.grid();
        let mut out = Field::zeros(grid, 3);
        for c in 0..3 {
            let mut dh = grid.forward(d.component(c));
            let gh = grid.forward(g.component(c));
            for (idx, z) in dh.iter_mut().enumerate() {
                let f = if self.config.dealias && !grid.retained(idx) {
                    Complex64::new(0.0, 0.0)
                } else {
                    gh[idx]
                };
                *z = (*z + f * dt) / (1.0 + dt * rate * grid.k_squared(idx));
            }
            out.component_mut(c).copy_from_slice(&grid.inverse(dh));
        }
        self.scheme.constrain(&mut out);
        Ok(out)
    }

    /// Courant number `max|u|·dt/h`.
    pub fn courant(&self, state: &FlowState) -> f64 {
        let umax = state.u.pointwise_norm().into_iter().fold(0.0, f64::max);
        umax * self.config.dt / state.grid().spacing()
    }

    /// One accepted step of size `config.dt`.
    pub fn advance(&self, state: &FlowState) -> Result<FlowState> {
        let dt = self.config.dt;
        let courant = self.courant(state);
        if courant > self.config.cfl_guard {
            return Err(Error::CflExceeded {
                courant,
                limit: self.config.cfl_guard,
                advisory_dt: dt * self.config.cfl_guard / courant,
            });
        }
        let geom = DirectorGeometry::new(&state.d)?;
        let kin = kernels::kinematics_with(&state.u, &state.d, &geom, &self.coeffs, self.scheme())?;
        let d = self.director_with(state, &geom, &kin, dt)?;
        let u = self.momentum_with(state, &geom, &kin, dt)?;
        let t = state.t + dt;
        for (name, f) in [("velocity", &u), ("director", &d)] {
            if !f.is_finite() {
                return Err(Error::NonFinite { field: name, t });
            }
        }
        Ok(FlowState { u, d, t })
    }

    /// Ledger row for `state` under this solver's scheme.
    pub fn sample(&self, state: &FlowState) -> Result<LedgerRow> {
        LedgerRow::sample(state, &self.coeffs, self.scheme())
    }

    /// `config.steps` steps with the ledger sampled at its cadence and hooks
    /// invoked at theirs.
    pub fn run(
        &self,
        initial: FlowState,
        hooks: &mut [&mut dyn RunHook],
    ) -> std::result::Result<RunOutput, Box<RunFailure>> {
        let mut ledger = EnergyLedger::new();
        let mut state = initial;
        let steps = self.config.steps;
        let fail = |error: Error, last_good: FlowState, ledger: EnergyLedger, steps: usize| {
            Box::new(RunFailure {
                error,
                last_good,
                ledger,
                steps,
            })
        };
        let record =
            |step: usize, state: &FlowState, ledger: &mut EnergyLedger, hooks: &mut [&mut dyn RunHook]| -> Result<()> {
                let every = self.config.ledger_every;
                let due = step == 0 || step == steps || (every > 0 && step.is_multiple_of(every));
                if due {
                    ledger.push(self.sample(state)?)?;
                }
                for h in hooks.iter_mut() {
                    let e = h.every();
                    if e > 0 && step.is_multiple_of(e) {
                        h.observe(step, state, ledger)?;
                    }
                }
                Ok(())
            };
        if let Err(e) = record(0, &state, &mut ledger, hooks) {
            return Err(fail(e, state, ledger, 0));
        }
        for step in 1..=steps {
            let next = match self.advance(&state) {
                Ok(s) => s,
                Err(e) => return Err(fail(e, state, ledger, step - 1)),
            };
            state = next;
            if let Err(e) = record(step, &state, &mut ledger, hooks) {
                return Err(fail(e, state, ledger, step));
            }
        }
        Ok(RunOutput { state, ledger, steps })
    }
}

/// `max |∇·u|` helper for tests and the CLI.
pub fn max_divergence(u: &Field) -> Result<f64> {
    Ok(fields::divergence(u)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::TorusGrid;
    use crate::initial::{Geodesic, InitialCondition, RandomSeeded, TaylorGreen};
    use crate::scheme::GINZBURG_LANDAU;

    fn grid(n: usize) -> Arc<TorusGrid> {
        Arc::new(TorusGrid::periodic(n).unwrap())
    }

    fn reference() -> LeslieCoefficients {
        LeslieCoefficients::new([0.0, -2.0, 1.0, 4.0, 1.0, 0.0]).unwrap()
    }

    fn solver(coeffs: LeslieCoefficients, dt: f64, steps: usize) -> Solver {
        Solver::new(
            coeffs,
            SolverConfig {
                dt,
                steps,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn taylor_green_single_step_decay() {
        let g = grid(32);
        let mu4 = 1.0;
        let dt = 1e-3;
        let s0 = TaylorGreen { amplitude: 1.0 }.build(&g).unwrap();
        let s1 = solver(LeslieCoefficients::newtonian(mu4).unwrap(), dt, 1)
            .advance(&s0)
            .unwrap();
        let want = s0.u.scaled((-mu4 * dt).exp());
        assert!(s1.u.max_diff(&want) < 2.0 * dt * dt, "{}", s1.u.max_diff(&want));
        assert!(s1.d.max_diff(&s0.d) < 1e-15);
    }

    #[test]
    fn rest_is_fixed_point() {
        let g = grid(16);
        let s0 = FlowState::at_rest(&g, [0.6, 0.0, 0.8]);
        let s1 = solver(reference(), 1e-2, 1).advance(&s0).unwrap();
        assert!(s1.u.max_abs() < 1e-15);
        assert!(s1.d.max_diff(&s0.d) < 1e-15);
        assert!((s1.t - 1e-2).abs() < 1e-18);
    }

    #[test]
    fn geodesic_is_fixed_point() {
        let g = grid(32);
        let d = Geodesic { kx: 2, ky: 1 }.director(&g);
        let s0 = FlowState::new(Field::zeros(&g, 2), d, 0.0).unwrap();
        let sv = solver(reference(), 1e-3, 1);
        assert!(sv.momentum_step(&s0, 1e-3).unwrap().max_abs() < 1e-12);
        assert!(sv.director_step(&s0, 1e-3).unwrap().max_diff(&s0.d) < 1e-12);
        let s1 = sv.advance(&s0).unwrap();
        assert!(s1.u.max_abs() < 1e-10);
        assert!(s1.d.max_diff(&s0.d) < 1e-10);
    }

    #[test]
    fn director_heat_flow_lowers_elastic_energy() {
        let g = grid(32);
        let d = RandomSeeded::default().director(&g).unwrap();
        let s0 = FlowState::new(Field::zeros(&g, 2), d, 0.0).unwrap();
        let sv = solver(reference(), 1e-4, 1);
        let d1 = sv.director_step(&s0, 1e-4).unwrap();
        let e = |d: &Field| crate::scheme::kinetic_elastic_energy(&Field::zeros(&g, 2), d).unwrap();
        assert!(e(&d1) <= e(&s0.d));
        let s1 = FlowState::new(Field::zeros(&g, 2), d1, 0.0).unwrap();
        assert!(s1.max_unit_violation() <= 1e-12);
    }

    #[test]
    fn invariants_hold_after_a_coupled_step() {
        let g = grid(32);
        let s0 = RandomSeeded::default().build(&g).unwrap();
        let s1 = solver(reference(), 1e-3, 1).advance(&s0).unwrap();
        assert!(max_divergence(&s1.u).unwrap() <= 1e-10);
        assert!(s1.max_unit_violation() <= 1e-12);
    }

    #[test]
    fn cfl_guard_rejects_with_advisory() {
        let g = grid(32);
        let s0 = TaylorGreen { amplitude: 100.0 }.build(&g).unwrap();
        match solver(reference(), 1e-2, 1).advance(&s0) {
            Err(Error::CflExceeded {
                courant, advisory_dt, ..
            }) => {
                assert!(courant > 0.5);
                assert!(advisory_dt < 1e-2);
            }
            other => panic!("expected CFL rejection, got {other:?}"),
        }
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let g = grid(16);
        let s0 = RandomSeeded::default().build(&g).unwrap();
        let out = solver(reference(), 1e-3, 0).run(s0.clone(), &mut []).unwrap();
        assert_eq!(out.state, s0);
        assert_eq!(out.ledger.rows().len(), 1);
    }

    #[test]
    fn energy_decreases_over_a_short_run() {
        let g = grid(32);
        let s0 = RandomSeeded::default().build(&g).unwrap();
        let out = solver(reference(), 1e-3, 50).run(s0, &mut []).unwrap();
        assert_eq!(out.ledger.rows().len(), 51);
        assert!(out.ledger.max_energy_increase() <= 1e-6);
    }

    #[test]
    fn nan_aborts_with_last_good_state() {
        let g = grid(16);
        let mut s0 = FlowState::at_rest(&g, [0.0, 0.0, 1.0]);
        s0.d.component_mut(0)[3] = f64::NAN;
        let err = solver(reference(), 1e-3, 5).run(s0, &mut []).unwrap_err();
        assert!(matches!(err.error, Error::NonFinite { .. }));
        assert_eq!(err.steps, 0);
    }

    #[test]
    fn gl_mode_keeps_director_near_sphere() {
        let g = grid(32);
        let s0 = RandomSeeded::default().build(&g).unwrap();
        let cfg = SolverConfig {
            dt: 5e-4,
            steps: 40,
            mode: GINZBURG_LANDAU.into(),
            ..Default::default()
        };
        let out = Solver::new(reference(), cfg).unwrap().run(s0, &mut []).unwrap();
        assert!(out.state.is_finite());
        assert!(out.state.max_unit_violation() < 0.05);
        assert!(out.ledger.max_energy_increase() <= 1e-6);
    }

    struct Counter(usize, Vec<usize>);

    impl RunHook for Counter {
        fn every(&self) -> usize {
            self.0
        }

        fn observe(&mut self, step: usize, _: &FlowState, _: &mut EnergyLedger) -> Result<()> {
            self.1.push(step);
            Ok(())
        }
    }

    #[test]
    fn hooks_fire_at_cadence() {
        let g = grid(16);
        let s0 = FlowState::at_rest(&g, [0.0, 0.0, 1.0]);
        let mut h = Counter(3, Vec::new());
        let cfg = SolverConfig {
            steps: 7,
            ledger_every: 5,
            ..Default::default()
        };
        let out = Solver::new(reference(), cfg).unwrap().run(s0, &mut [&mut h]).unwrap();
        assert_eq!(h.1, vec![0, 3, 6]);
        let times: Vec<_> = out.ledger.rows().iter().map(|r| (r.t * 1e3).round() as i64).collect();
        assert_eq!(times, vec![0, 5, 7]);
    }
}
