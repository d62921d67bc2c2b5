//! Quantities read back from spectra and traces: pairwise concurrence,
//! matrix-pencil eigenenergy extraction and the symmetric spectral fit.

mod concurrence;
mod parametrization;
mod pencil;

pub use concurrence::{
    pairwise_concurrence, reduced_two_mode_state, spin_flip_spectrum, wootters_concurrence, DensityMatrix,
    CONCURRENCE_AGREEMENT_TOL,
};
pub use parametrization::{
    fit_symmetric_parametrization, perturbation_ratios, write_extraction_csv, ExtractionRow, PerturbationRatios,
    SymmetricParametrization, DEFAULT_RE_TOL, EXTRACTION_CSV_HEADER,
};
pub use pencil::{
    beat_mismatch, expected_beats, extract_eigenenergies, matrix_pencil, numerical_rank, population_beats,
    PencilComponent, PRUNE_TOL, RANK_TOL,
};
