//! Complex arithmetic helpers, parameter-space paths, adaptive integration of
//! linear matrix ODEs and quadrature for integrands with inverse square-root
//! endpoint singularities.

pub mod linalg;
pub mod ode;
pub mod path;
pub mod quad;

pub use num_complex::Complex64 as Complex;

pub use ode::{integrate_linear_ode, integrate_linear_ode_fixed, FnSystem, LinearSystem, OdeStats};
pub use path::ParamPath;
pub use quad::{quad_endpoint_weighted, quad_sqrt_singular};

/// Default absolute tolerance used throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const I: Complex = Complex::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `2 pi i`
pub fn two_pi_i() -> Complex {
    Complex::new(0.0, 2.0 * std::f64::consts::PI)
}
