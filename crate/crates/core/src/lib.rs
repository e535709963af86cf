//! Direct and inverse spectral problems for `-y'' + q y = lambda y` on `[-S, S]`
//! with a point transfer condition `[y; y'](0+) = M [y; y'](0-)`, and the
//! full-line scattering problem for potentials supported in `[-S, S]`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod forward;
pub mod inverse;
pub mod io;
pub mod problem;
pub mod propagate;
mod roots;
pub mod scattering;
pub mod state;

pub use error::{Error, Result};
pub use forward::{
    delta, delta_derivative, delta_real, eigenvalues, local_spacing, m_function, m_residue,
    norming_constant, norming_constants, proportionality_constant, spectral_data, v_solution,
    w_solution, SpectralDataset,
};
pub use problem::{BoundaryAngles, Potential, Problem, SpectralParameter, TransferMatrix};
pub use propagate::{propagate, Direction};
pub use state::{StateMatrix, Trajectory};
