//! Error type for data-level failures.
//!
//! Programmer errors — bundle mismatches and out-of-range indices fed to the
//! algebra layer — panic via assertions instead; `Error` covers the
//! contracts a caller can legitimately trip over: parsing, shape and
//! precondition checks, and solver bounds.

use thiserror::Error;

use crate::homotopy::InfeasibleReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("expected a form of pure bidegree ({expected_contact}, {expected_horizontal})")]
    WrongBidegree {
        expected_contact: usize,
        expected_horizontal: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}")]
    NotFoundWithinBounds(Box<InfeasibleReport>),

    #[error("cannot generate a form of bidegree ({contact}, {horizontal}) on this bundle")]
    ImpossibleBidegree { contact: usize, horizontal: usize },

    #[error("internal consistency check failed: {0}")]
    SelfCheck(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            col,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
