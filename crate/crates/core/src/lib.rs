//! Kernel quadrature on unions of fully symmetric point sets.
//!
//! Weights for a node set made of `J` fully symmetric sets are obtained from a
//! `J × J` linear system instead of the full `n × n` kernel system.

pub mod error;
pub mod experiments;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod node_selection;
pub mod symmetry;
pub mod weights;

pub use error::{Error, Result};
pub use kernels::{
    initial_error_sq, kernel_eval, kernel_mean, GaussianKernel, Kernel, MeasureKind, SymmetricMeasure,
};
pub use node_selection::{
    gauss_hermite_basis, optimal_radial_generator, random_generators, sparse_grid_generators, BasisKind,
    NestedBasis, RandomKind,
};
pub use symmetry::{cardinality, canonicalize_generator, expand, FullySymmetricSet, GeneratorVector};
pub use weights::{
    build_s_matrix, integrate, integrate_values, make_rule, naive_weights, solve_weights, worst_case_error,
    FsQuadratureRule, SymmetricNodeSet, Wce,
};
