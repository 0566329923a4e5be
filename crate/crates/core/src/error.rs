use crate::symbols::SymbolId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("symbol {0} does not appear in the set")]
    UnknownSymbol(SymbolId),

    #[error("reduction order {order} too small: at least {required} symbols must be kept")]
    ReductionOrder { order: usize, required: usize },

    #[error("invalid interval [{lo}, {hi}]: lower bound must be below upper bound")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("quadratic relu abstraction requires l < 0 < u, got [{lo}, {hi}]")]
    NotStraddling { lo: f64, hi: f64 },

    #[error("primitive `{name}` is undefined on [{lo}, {hi}]")]
    OutsideDomain { name: String, lo: f64, hi: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid network: {0}")]
    Network(String),

    #[error("invalid problem: {0}")]
    Problem(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no initial symbol can be split")]
    NothingToSplit,
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }
}

pub(crate) fn check_dim(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            op,
            expected,
            found,
        })
    }
}
