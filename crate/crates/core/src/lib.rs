pub mod error;
pub mod experiments;
pub mod commutator;
pub mod fundsol;
pub mod geometry;
pub mod kernels;
pub mod layers;
pub mod operator;
pub mod par;
pub mod schauder;
pub mod specfun;

pub use error::{Error, Result};
pub use operator::{OperatorCoefficients, ReducedForm};
