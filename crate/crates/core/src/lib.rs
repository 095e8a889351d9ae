//! Tensor-product and serendipity finite elements on square meshes for the
//! Laplace eigenvalue problem.
//!
//! The pipeline runs from exact rational basis construction
//! ([`basis1d`], [`basis2d`]) through mesh and DOF numbering ([`mesh`]),
//! exact local integration and global assembly ([`assembly`]), dense
//! generalized eigensolves ([`eigensolve`]) and refinement studies
//! ([`studies`]).

pub mod assembly;
pub mod basis1d;
pub mod basis2d;
pub mod eigensolve;
pub mod mesh;
pub mod polynomial;
pub mod studies;
