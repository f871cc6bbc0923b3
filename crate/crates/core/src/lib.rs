//! Ladder-operator construction, cubic symmetry algebras and algebraic
//! spectra for the double singular oscillator and the Kepler–Coulomb system
//! with non-central terms in `N` dimensions, cross-checked by an independent
//! finite-difference radial eigensolver.

pub mod checks;
pub mod error;
pub mod exact;
pub mod grid;
pub mod laguerre;
pub mod lattice;
pub mod mutation;
pub mod oracle;
pub mod oscillator;
pub mod params;

pub use checks::{CheckResult, ModelConfig, SectorInfo, Status, SuiteConfig};
pub use error::{Error, Result};
pub use exact::{Scalar, Surd};
pub use grid::{apply_diff_ladder, hamiltonian_residual, recurrence_residual, DiffLadder, ModeSpec, RadialGrid};
pub use laguerre::{
    laguerre_derivative, laguerre_eval, radial_derivative, radial_eval, radial_second_derivative,
    RadialWavefunction,
};
pub use lattice::{
    commutator, compose, diagonal_action, ladder_action, verify_cubic_algebra, AlgebraReport,
    DiagonalKind, Direction, LadderAlgebra, LatticeOperator, LatticeState, Mode, ModelConstants,
};
pub use mutation::{Mutation, MutationTarget};
pub use oracle::{dso_combined_levels, solve_lowest, CombinedLevel, RadialProblem, Scheme};
pub use oscillator::{
    build_structure_function, ccm_slope_check, dso_spectrum, kc_energy_branch, kc_spectrum,
    phi_closed_form, solve_constraints, Branch, SpectrumEntry, StructureFunction, Unirrep,
};
pub use params::{
    derive_dso_sector, derive_kc_sector, dso_energy, kc_energy_quantum_numbers,
    lattice_multiplicity, DsoParams, DsoSector, KcParams, KcSector, ModelKind, QuantumLevel,
};
