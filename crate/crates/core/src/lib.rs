//! Ground-state eigenvectors of symmetric matrices with non-positive
//! off-diagonal elements, and their linear relation to row sums.
//!
//! The crate is organised around [`SymMatrix`]:
//!
//! - [`matcore`] builds matrices (random ensembles, transforms, file I/O),
//! - [`eigen`] finds the minimum eigenpair (Lanczos, plus a dense Jacobi oracle),
//! - [`scaling`] measures how well `g_i ≈ -s_i` holds and runs ensemble sweeps,
//! - [`models`] builds the Hubbard and transverse-field Ising Hamiltonians,
//! - [`varmin`] estimates the ground state from the ansatz `g ∝ -s + c·1`.

pub mod eigen;
pub mod matcore;
pub mod models;
pub mod scaling;
pub mod seed;
pub mod varmin;

pub use eigen::{EigenError, EigenPair, LanczosConfig, Method};
pub use matcore::{
    DensityMode, DiagDominantSpec, Distribution, EnsembleSpec, MatrixError, RowScale, Storage,
    SymMatrix,
};
pub use models::{HubbardSpec, IsingSpec, ModelError};
pub use scaling::{ScalingError, ScalingReport};
pub use varmin::{VariationalResult, VarminError};
