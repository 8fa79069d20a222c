//! Information geometry of parameterized pure states.
//!
//! The crate is `no_std` with `alloc`. IO, the command-line front end and
//! parallel drivers live in the `qgeo` crate.

#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod completeness;
pub mod error;
pub mod estimation;
pub mod exec;
pub mod linalg;
pub mod numeric;
pub mod optim;
pub mod qcri;
pub mod rng;
pub mod state_model;
pub mod statistical;
pub mod vertex;

pub use exec::{Executor, Sequential};
pub use error::{Error, Result, Warning};
pub use linalg::{CMatrix, CVector, RMatrix};
pub use num_complex::Complex64;
pub use state_model::{ParamPoint, QgTensor, StateModel, StateVector};
pub use statistical::{MetricKind, MetricMatrix, Povm, SimplexPoint};
