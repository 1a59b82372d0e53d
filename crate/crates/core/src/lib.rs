//! Exact and numerical machinery for holomorphic duality on balls in `C^n`:
//! Kelvin-class symbolic algebra, harmonic polynomial bases, sphere
//! quadrature with exact moments, Bochner-Martinelli potentials and the
//! associated duality pairings.

pub mod error;
pub mod harmonics;
pub mod integrals;
pub mod kelvin;
pub mod linalg;
pub mod pairings;
pub mod par;
pub mod potentials;
pub mod quadrature;
pub mod types;

pub use error::{Error, Result};
pub use kelvin::{make_annihilator, EulerDegree, KelvinFunction, KelvinVector, NumericKelvin};
pub use par::Execution;
pub use types::{monomial_eval, norm_sq, CPoint, Complex64, ExactComplex, ExactRational, MultiIndex};
