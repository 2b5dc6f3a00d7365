//! Cylindrical contact homology of subcritical Stein-fillable contact
//! manifolds, computed from handle-decomposition data.

pub mod rational;
pub mod symplectic_index;
pub mod handle_dynamics;
pub mod word_combinatorics;
pub mod morse_complex;
pub mod contact_homology;
