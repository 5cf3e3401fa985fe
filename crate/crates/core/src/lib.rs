//! Symmetry and symmetry breaking for Caffarelli-Kohn-Nirenberg and
//! weighted logarithmic Hardy inequalities.
//!
//! Closed-form optimal constants, the symmetry/breaking region classifier and
//! a finite-difference/spectral minimizer on the cylinder `R x S^{d-1}`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod cylinder;
pub mod error;
pub mod params;
pub mod regions;
pub mod specfun;

pub use constants::{ConstantValue, FormulaId};
pub use error::{Error, Result, Sign};
pub use params::{Admissibility, CknParams, Violation, WlhParams};
pub use regions::{Mechanism, RegionVerdict, Verdict};
