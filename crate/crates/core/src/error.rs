use std::fmt;

/// Errors produced by validation, parsing and the ε-subdifferential routines.
///
/// Row and piece indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyInput,
    /// A coefficient is NaN, or a finite-only field holds an infinity.
    NonFinite {
        row: usize,
    },
    NotSorted {
        row: usize,
    },
    NonConvexPiece {
        row: usize,
    },
    SlopeDecreasing {
        row: usize,
    },
    Discontinuous {
        row: usize,
    },
    BadInfinityConvention {
        row: usize,
    },
    OutOfDomain {
        x: f64,
    },
    InfiniteBreakpoint {
        row: usize,
    },
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    NonPositiveEpsilon {
        eps: f64,
    },
    /// The bracketed search found no crossing between the conjugate and the support line.
    NoCrossing,
    /// The tangency equation has no real root (or is degenerate, e.g. parallel lines).
    NoRoot,
    RootOutsidePiece {
        root: f64,
        piece: usize,
    },
    UnsortedInput {
        position: usize,
    },
    /// The requested tangency piece is linear, so the tangency point is not unique.
    LinearTangentPiece {
        piece: usize,
    },
    Parse {
        line: usize,
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "a PLQ function needs at least one row"),
            Error::NonFinite { row } => write!(f, "row {row}: invalid non-finite coefficient"),
            Error::NotSorted { row } => {
                write!(f, "row {row}: breakpoints must be strictly increasing")
            }
            Error::NonConvexPiece { row } => {
                write!(f, "row {row}: quadratic coefficient must be nonnegative")
            }
            Error::SlopeDecreasing { row } => {
                write!(f, "row {row}: slope decreases across the breakpoint")
            }
            Error::Discontinuous { row } => {
                write!(f, "row {row}: pieces disagree at the breakpoint")
            }
            Error::BadInfinityConvention { row } => {
                write!(
                    f,
                    "row {row}: infinite breakpoint or constant in an invalid position"
                )
            }
            Error::OutOfDomain { x } => write!(f, "{x} is outside the domain"),
            Error::InfiniteBreakpoint { row } => write!(f, "row {row}: breakpoint is infinite"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::NonPositiveEpsilon { eps } => write!(f, "epsilon must be positive, got {eps}"),
            Error::NoCrossing => write!(f, "no crossing between conjugate and support line"),
            Error::NoRoot => write!(f, "tangency equation has no root"),
            Error::RootOutsidePiece { root, piece } => {
                write!(f, "root {root} lies outside piece {piece}")
            }
            Error::UnsortedInput { position } => {
                write!(f, "input not sorted at position {position}")
            }
            Error::LinearTangentPiece { piece } => {
                write!(f, "piece {piece} is linear; tangency point is not unique")
            }
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
