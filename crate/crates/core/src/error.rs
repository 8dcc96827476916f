//! Error type shared by every module of the crate.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which accounting identity of an input-output table failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// Intermediate sales plus final demand plus exports equal output.
    Row,
    /// Intermediate purchases plus primary inputs equal output.
    Column,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identity::Row => f.write_str("row"),
            Identity::Column => f.write_str("column"),
        }
    }
}

/// Position inside an input file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub file: PathBuf,
    pub line: u64,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("sector set is invalid: {0}")]
    InvalidSectorSet(String),

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{what}[{index}] = {value} is outside its admissible range")]
    InvalidValue {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("gross output of sector {sector} (index {index}) is {value}, must be > 0")]
    ZeroOutput {
        sector: String,
        index: usize,
        value: f64,
    },

    #[error("{identity} balance fails for sector {sector}: relative residual {residual:e} exceeds {tolerance:e}")]
    Unbalanced {
        sector: String,
        index: usize,
        identity: Identity,
        residual: f64,
        tolerance: f64,
    },

    #[error("coefficient matrix is not productive (spectral radius {spectral_radius})")]
    NonProductive { spectral_radius: f64 },

    #[error("matrix is numerically singular")]
    Singular,

    #[error(
        "normalized price {value} of sector index {index} is not strictly positive and finite"
    )]
    InvalidPrice { index: usize, value: f64 },

    #[error("expenditure basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("household group {0} has no expenditure")]
    EmptyGroup(String),

    #[error("base value {0} must be strictly positive")]
    NonPositiveBase(f64),

    #[error("unknown base group {0}")]
    UnknownBaseGroup(String),

    #[error("sector {sector} has zero value added")]
    ZeroValueAdded { sector: String },

    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("groups or items are not aligned: {0}")]
    Misaligned(String),

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Schema(String),

    #[error("unknown sector {0}")]
    UnknownSector(String),

    #[error("standard-rated share {0} is outside [0, 1]")]
    InvalidShare(f64),

    #[error("invalid concordance weight: {0}")]
    InvalidWeight(String),

    #[error("items without a concordance entry: {}", .0.join(", "))]
    UnmappedItem(Vec<String>),

    #[error("codes without a reporting category: {}", .0.join(", "))]
    UnmappedCategory(Vec<String>),

    #[error("{location}: {source}")]
    At {
        location: Location,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at(self, file: impl Into<PathBuf>, line: u64, column: usize) -> Self {
        Error::At {
            location: Location {
                file: file.into(),
                line,
                column,
            },
            source: Box::new(self),
        }
    }

    /// Innermost error, with any file location stripped.
    pub fn kind(&self) -> &Error {
        match self {
            Error::At { source, .. } => source.kind(),
            other => other,
        }
    }

    pub fn location(&self) -> Option<&Location> {
        match self {
            Error::At { location, .. } => Some(location),
            _ => None,
        }
    }

    /// Stable machine-readable code, e.g. `UNBALANCED`.
    pub fn code(&self) -> &'static str {
        match self.kind() {
            Error::InvalidSectorSet(_) => "INVALID_SECTOR_SET",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::InvalidValue { .. } => "INVALID_VALUE",
            Error::ZeroOutput { .. } => "ZERO_OUTPUT",
            Error::Unbalanced { .. } => "UNBALANCED",
            Error::NonProductive { .. } => "NON_PRODUCTIVE",
            Error::Singular => "SINGULAR",
            Error::InvalidPrice { .. } => "INVALID_PRICE",
            Error::BasisMismatch(_) => "BASIS_MISMATCH",
            Error::EmptyGroup(_) => "EMPTY_GROUP",
            Error::NonPositiveBase(_) => "NON_POSITIVE_BASE",
            Error::UnknownBaseGroup(_) => "UNKNOWN_BASE_GROUP",
            Error::ZeroValueAdded { .. } => "ZERO_VALUE_ADDED",
            Error::ShapeMismatch { .. } => "SHAPE_MISMATCH",
            Error::Misaligned(_) => "MISALIGNED",
            Error::Parse(_) => "PARSE",
            Error::Schema(_) => "SCHEMA",
            Error::UnknownSector(_) => "UNKNOWN_SECTOR",
            Error::InvalidShare(_) => "INVALID_SHARE",
            Error::InvalidWeight(_) => "INVALID_WEIGHT",
            Error::UnmappedItem(_) => "UNMAPPED_ITEM",
            Error::UnmappedCategory(_) => "UNMAPPED_CATEGORY",
            Error::Io { .. } => "IO",
            Error::At { .. } => unreachable!("kind() strips locations"),
        }
    }

    /// True for failures of the linear algebra rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.kind(),
            Error::NonProductive { .. } | Error::Singular | Error::InvalidPrice { .. }
        )
    }
}
