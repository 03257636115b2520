//! Numerical audits of a simulated trajectory.

pub mod bubble;
pub mod concentration;
pub mod energy;
pub mod local;
pub mod phi;

pub use bubble::{make_bubble, make_bubbles, BubbleSpec};
pub use concentration::{clusters, concentration_scan, local_energy_map, Cluster};
pub use energy::{
    energy_density, energy_law_audit, tension_residual, total_energy, ConcentrationEvent, EnergyLedger, LedgerRow,
};
pub use local::{local_energy_audit, Cutoff, LocalAudit};
pub use phi::{parabolic_rescale, phi, PhiTerms};
