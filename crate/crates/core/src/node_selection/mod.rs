//! Choosing generator vectors: sparse grids, random draws and the optimal
//! radial generator.

mod basis;
mod radial;
mod random;
mod smolyak;

pub use basis::{clenshaw_curtis_level, gauss_hermite_basis, hermite_roots, BasisKind, NestedBasis};
pub use radial::{optimal_radial_generator, radial_objective};
pub use random::{random_generators, random_point, RandomKind};
pub use smolyak::{count_nodes, nonincreasing_compositions, sparse_grid_generators, sparse_grid_generators_capped};
