//! Front end for `jetcalc-core`: concrete syntax, `.setup` files, the
//! shipped corpus, assumption validation and the `jetcalc` command.

pub mod assess;
pub mod cli;
pub mod corpus;
pub mod parse;
pub mod report;
pub mod sampling;
pub mod setup;
pub mod validate;

pub use parse::{parse_expression, parse_operator, ParseError, ParseErrorKind};
pub use setup::{load_setup, parse_setup, Setup, SetupError};
