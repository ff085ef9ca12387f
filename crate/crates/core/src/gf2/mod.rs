//! Exact linear algebra over GF(2).
//!
//! Matrices are stored sparsely (sorted column supports per row) because the
//! codes of interest have bounded row and column degrees; elimination copies
//! the matrix into packed dense rows, which is exact and fast at the sizes the
//! exhaustive codecs can handle anyway.

mod bitvec;
mod dense;
mod sparse;

pub use bitvec::BitVector;
pub use sparse::SparseBitMatrix;

pub(crate) use dense::Echelon;
