//! Periodic trigonometric matrix fields on the unit torus, exact quadrature of
//! polynomial integrands, and the defect `∫F(B) dx − F(∫B dx)`.

mod defect;
mod field;
mod quadrature;
mod random;

pub use defect::{
    choose_epsilon, defect_of, moments, sq_defect, DefectReport, Moments, DEFAULT_NODES,
};
pub use field::{build_b3, build_bn, check_div_free, Mode, TrigMatField};
pub use quadrature::{integrate_composed, required_nodes, Quadrature};
pub use random::random_solenoidal;
