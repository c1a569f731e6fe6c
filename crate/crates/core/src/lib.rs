//! Certified computations on real binary forms: exact real-root counting,
//! the normalized gradient circle maps and their winding numbers, and
//! apolarity-based Waring ranks.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod form;
pub mod geometry;
pub mod linalg;
pub mod parser;
pub mod poly;
pub mod rank;
pub mod roots;
pub mod theorem;

pub use error::{Error, Result};
pub use form::{BinaryForm, LinearForm, Substitution};
pub use parser::{format_form, parse_form};
