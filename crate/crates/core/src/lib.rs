// Negated comparisons below deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod state;
pub mod distillation;
pub mod certify;
pub mod report;
pub mod thresholds;
pub mod coincidence;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use num_complex::{self, Complex64};
pub use state::{DensityMatrix, Party, PureState, Sign, SubsystemPartition};
