//! Eisenstein series as lattice sums and as q-expansions, Weierstrass
//! invariants and the `j`-function.

pub mod lattice;
pub mod qseries;

pub use lattice::{eisenstein_lattice, full_modular_weight_check, j_normalized, weierstrass_g, Lattice, WeightReport, G6_SIGN};
pub use qseries::{eisenstein_q, j_classical, j_q_expansion, normalized_eisenstein_series, Coefficient, QSeries};
