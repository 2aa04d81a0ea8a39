//! Quantitative compactness toolkit: covering and entropy numbers of point
//! clouds, box-counting dimension, closed-form entropy bounds for diagonal
//! models, Jacobian corank of homogeneous polynomial families, and Cauchy
//! integral extraction of Taylor parts with covering-net transfer.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boxdim;
pub mod covering;
pub mod diagonal;
pub mod error;
pub mod metric;
pub mod poly;
pub mod taylor;

pub use error::{Error, Result};
pub use metric::{distance, grid_segment, sample_ball, BallSpec, ComplexVector, NormKind, PointCloud};
