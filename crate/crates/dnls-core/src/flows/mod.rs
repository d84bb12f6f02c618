//! DNLS, H_κ and difference flows with conserved-quantity monitors.

mod conserved;
mod export;
mod integrator;
mod soliton;

pub use conserved::{conserved_report, hamiltonian, hamiltonian2, mass, ConservedReport, ProbeReport};
pub use export::{export_trajectory, monitors_table, MONITOR_BASE_COLUMNS};
pub use integrator::{
    commutator_test, diff_evolve, dnls_evolve, evolve, flow_map, hk_evolve, linear_symbol, step_plan, Flow,
    FlowConfig, Scheme, Stepper, Trajectory, RESOLUTION_LOSS, RESOLVED_START,
};
pub use soliton::{algebraic_soliton, branch_coth, soliton_profile};
