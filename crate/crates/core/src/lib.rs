pub mod arith;
pub mod basic;
pub mod cli;
pub mod cone;
pub mod error;
pub mod finiteness;
pub mod ghost;
pub mod io;
pub mod lp;
pub mod monoid;
pub mod normal_form;
pub mod tropical;
pub mod tropicalization;

pub use error::{Error, Result};
