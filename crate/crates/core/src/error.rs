use thiserror::Error;

use crate::rational::{format_rational, Rational};

/// Hypotheses the destabilizing-polarization construction needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    StructurallyValid(String),
    PicardRankAtLeastThree { rank: usize },
    PairwiseIntersectionAtMostOne { i: usize, j: usize, value: Rational },
    DeterminantAmple { witness: String },
    PositiveRank,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hypothesis::StructurallyValid(check) => write!(f, "surface data invalid: {check}"),
            Hypothesis::PicardRankAtLeastThree { rank } => {
                write!(f, "Picard rank {rank} is below 3")
            }
            Hypothesis::PairwiseIntersectionAtMostOne { i, j, value } => write!(
                f,
                "generators C{} and C{} intersect in {} > 1",
                i + 1,
                j + 1,
                format_rational(value)
            ),
            Hypothesis::DeterminantAmple { witness } => {
                write!(f, "det(E) is not ample ({witness})")
            }
            Hypothesis::PositiveRank => write!(f, "bundle rank must be at least 1"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {class}: expected {expected} coordinates, found {found}")]
    DimensionMismatch {
        class: String,
        expected: usize,
        found: usize,
    },

    #[error("slope of the syzygy bundle of {bundle} is undefined: h0 - r = {} <= 0", format_rational(.denominator))]
    SlopeUndefined {
        bundle: String,
        denominator: Rational,
    },

    #[error("nef ray unbounded: no generator meets C{} positively", .generator + 1)]
    NefRayUnbounded { generator: usize },

    #[error("class is not nef: it pairs negatively with C{}", .witness + 1)]
    NotNef { witness: usize },

    #[error("no epsilon in 1/2 .. 2^-32 works; last tried {}, failing: {condition}", format_rational(.last_epsilon))]
    EpsilonExhausted {
        last_epsilon: Rational,
        condition: String,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(Hypothesis),

    #[error("inequality chain failed: (D^2)(S.A) - 2(D.A)(D.S) = {} < 0", format_rational(.value))]
    ChainViolated { value: Rational },

    #[error("invalid bundle {name}: {reason}")]
    InvalidBundle { name: String, reason: String },

    #[error("unknown bundle {0:?}")]
    UnknownBundle(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Parse and IO failures map to a different exit code than
    /// mathematical failures in the CLI.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
