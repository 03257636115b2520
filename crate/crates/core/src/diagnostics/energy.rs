use crate::error::{Error, Result};
use crate::fields::{self, Field};
use crate::kernels::{self, Dissipation};
use crate::params::LeslieCoefficients;
use crate::scheme::{self, DirectorScheme};
use crate::solver::FlowState;

/// `∫(|u|² + |∇d|²)`.
pub fn total_energy(state: &FlowState) -> Result<f64> {
    scheme::kinetic_elastic_energy(&state.u, &state.d)
}

/// Pointwise `|u|² + |∇d|²`.
pub fn energy_density(state: &FlowState) -> Field {
    let mut e = state.u.pointwise_norm_sq();
    for (v, g) in e.iter_mut().zip(fields::gradient(&state.d).pointwise_norm_sq()) {
        *v += g;
    }
    Field::from_values(state.grid(), 1, e).expect("one scalar per grid point")
}

/// `‖Δd + |∇d|² d‖_{L²}`; zero exactly on harmonic maps.
pub fn tension_residual(d: &Field) -> Result<f64> {
    let tau = kernels::tension(d)?;
    Ok(fields::spectral::integrate_values(d.grid(), &tau.pointwise_norm_sq()).sqrt())
}

/// Grid point whose windowed energy reached the concentration threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationEvent {
    pub t: f64,
    pub center: (f64, f64),
    pub radius: f64,
    pub local_energy: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation: Dissipation,
    /// Energy-law residual against the previous row (zero on the first row).
    pub residual: f64,
    pub max_div_u: f64,
    pub max_unit_violation: f64,
}

impl LedgerRow {
    /// Measure one state. `residual` is left at zero until the row is
    /// appended to a ledger.
    pub fn sample(state: &FlowState, coeffs: &LeslieCoefficients, scheme: &dyn DirectorScheme) -> Result<Self> {
        Ok(Self {
            t: state.t,
            energy: scheme.energy(&state.u, &state.d)?,
            dissipation: scheme.dissipation(&state.u, &state.d, coeffs)?,
            residual: 0.0,
            max_div_u: fields::divergence(&state.u)?.max_abs(),
            max_unit_violation: state.max_unit_violation(),
        })
    }
}

/// `[E(t2) - E(t1)] + ∫_{t1}^{t2} (D_visc + D_dir + D_align1 + D_align2) dt`,
/// trapezoidal in time.
pub fn energy_law_audit(first: &LedgerRow, second: &LedgerRow) -> f64 {
    let dt = second.t - first.t;
    (second.energy - first.energy) + 0.5 * dt * (first.dissipation.total() + second.dissipation.total())
}

/// Time series of energy, dissipation and constraint diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    rows: Vec<LedgerRow>,
    events: Vec<ConcentrationEvent>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn events(&self) -> &[ConcentrationEvent] {
        &self.events
    }

    pub fn last(&self) -> Option<&LedgerRow> {
        self.rows.last()
    }

    /// Append a row, filling its residual from the previous row.
    pub fn push(&mut self, mut row: LedgerRow) -> Result<()> {
        if let Some(prev) = self.rows.last() {
            if row.t <= prev.t {
                return Err(Error::Domain(format!(
                    "ledger times must increase: {} after {}",
                    row.t, prev.t
                )));
            }
            row.residual = energy_law_audit(prev, &row);
        } else {
            row.residual = 0.0;
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn record_event(&mut self, event: ConcentrationEvent) {
        self.events.push(event);
    }

    /// Sum of the per-interval residuals, i.e. the energy-law residual over
    /// the whole run.
    pub fn cumulative_residual(&self) -> f64 {
        self.rows.iter().skip(1).map(|r| r.residual).sum()
    }

    /// Largest energy increase between consecutive rows (negative when the
    /// energy decreased everywhere).
    pub fn max_energy_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
