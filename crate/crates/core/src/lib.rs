//! Numerical periods and computational Hodge theory.

pub mod error;
pub mod gauss_manin;
pub mod griffiths;
pub mod hodge;
pub mod modular;
pub mod numerics;
pub mod periods;
pub mod poincare;

pub use error::{Error, Result};
pub use numerics::Complex;
