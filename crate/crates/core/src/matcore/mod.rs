//! Matrices, the generator construction for every `(n, m)`, the subspace `L`
//! with its orthogonal projection, and the quartic extension `F`.

mod basis;
mod extension;
mod mat;

pub use basis::{
    build_base_4x3, build_base_n, CoordTriple, DiagRule, DiagSlot, SpanBasis, MAX_GRAM_CONDITION,
};
pub use extension::{f_l, Extension, ExtensionParams};
pub use mat::Mat;
