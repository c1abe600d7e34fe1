pub mod calculus;
pub mod constructions;
pub mod error;
pub mod estimator;
pub mod fd;
pub mod functionals;
pub mod grid;
pub mod hodge;
pub mod interp;
pub mod io;
pub mod isotopy;
pub mod lattice;
pub mod par;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{
    Displacement, HarmonicForm, OneFormField, ScalarField, TorusGrid, VectorFieldField,
};
