//! Rigidity checks for boundary maps: regular-simplex preservation,
//! reconstruction of an isometry from a map, and conjugacy of representations.

mod checks;
mod pair;

pub use checks::{
    consensus, preserves_regular, reconstruct_isometry, verify_conjugacy, ConsensusConfig, OrientationMode,
    PreservationReport, ReconstructionResult, RigidityTol, DEFAULT_WINDOW,
};
pub use pair::{fit_isometry, isometry_between, isometry_from_simplex_pair, CONGRUENCE_TOL};
