//! Exact swapping Poisson algebra on pairs of circle points, its multi
//! fraction subalgebra, and two numeric backends for evaluating fractions:
//! matrix representations ([`repval`]) and periodic opers ([`operlab`]).

pub mod error;
pub mod fractions;
pub mod linking;
pub mod operlab;
pub mod parse;
pub mod repval;
pub mod swapalg;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
