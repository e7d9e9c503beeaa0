//! Fixed-phonon-number Fock sectors and the lifting of mode unitaries to them.
//!
//! A passive network maps `a_j^dag -> sum_i U_ij a_i^dag`. On the sector with `N`
//! phonons in `M` modes this induces the unitary with entries
//! `<nu'|U_F|nu> = Per(U[nu', nu]) / sqrt(prod nu! nu'!)`, where `U[nu', nu]` repeats
//! row `i` `nu'_i` times and column `j` `nu_j` times.

mod expr;
mod lift;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
mod permanent;
mod sector;
mod state;

pub use expr::{parse_state, parse_terms};
pub use lift::{lift_unitary, lift_unitary_with};
pub use permanent::permanent;
pub use sector::{enumerate_basis, sector_size, FockSector, Occupation, MAX_SECTOR_SIZE};
pub use state::{
    forward_probabilities, labeled_probabilities, output_probabilities, DensityMatrix, FockState,
    LabeledProbability,
};
