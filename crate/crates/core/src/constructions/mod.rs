//! Explicit constructions: the two-parameter family behind the flux-zero
//! argument, and fragmentation of harmonic isotopies.

mod fragment;
mod twoparam;

pub use fragment::{fragment, fragment_flux_check, FragmentationPlan, PieceFlux, WeightKind};
pub use twoparam::{
    build_z, correction_hamiltonian, gronwall_bound, gronwall_check, osc_bound_check, Correction,
    GronwallReport, OscReport, TwoParamFamily, GRONWALL_MARGIN, GRONWALL_SLACK, OSC_SLACK,
};
