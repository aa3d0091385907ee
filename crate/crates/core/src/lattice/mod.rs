//! Finite-covolume lattices given by an ideal triangulation of a fundamental
//! domain, and sampling of the invariant probability measure on `Γ\G`.

mod preset;
mod sampler;

pub use preset::{
    cells_covolume, list_presets, load_preset, load_preset_from_file, CuspData, FacePairing, LatticePreset,
    PresetFile, PRESET_DIR_ENV,
};
pub use sampler::{
    default_truncation, sample_haar, truncation_error_bound, HaarSample, HaarSampler, BATCH_SIZE,
};
