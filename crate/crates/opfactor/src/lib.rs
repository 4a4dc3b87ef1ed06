//! Finite-dimensional operator factorization with verifiable certificates.

pub mod certificate;
pub mod cli;
pub mod douglas;
pub mod error;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod partial;
pub mod report;
pub mod reversed;
pub mod sebestyen;
pub mod suite;
pub mod tolerance;

pub use error::{OpfactorError, Result};
pub use linalg::{PencilResult, PsdCheck};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use tolerance::Tolerance;
