use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input line, 1-based line number.
    Parse { line: usize, message: String },
    /// Head structure is not a single-rooted tree.
    Structure { sent_id: String, message: String },
    /// A prediction points at a sentence or token that does not exist.
    UnknownReference { sent_id: String, message: String },
    /// Operation needs gold labels but the data is unlabeled.
    Unlabeled(String),
    /// Labeled data lacks one of the two classes.
    MissingClass(String),
    /// Candidate type has no attested occurrence.
    NoOccurrences { type_id: u32 },
    /// Encoded vector does not fit the model's column dictionary.
    DictionaryMismatch { column: u32, n_cols: usize },
    /// Argument outside of its valid range.
    InvalidArgument(String),
    /// Inputs of mismatched length.
    LengthMismatch { left: usize, right: usize },
    Empty(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::Structure { sent_id, message } => {
                write!(f, "sentence {sent_id}: {message}")
            }
            Error::UnknownReference { sent_id, message } => {
                write!(f, "sentence {sent_id}: {message}")
            }
            Error::Unlabeled(what) => write!(
                f,
                "{what} requires gold labels; the corpus is unlabeled (use unknown-label mode)"
            ),
            Error::MissingClass(what) => write!(f, "{what}: labels contain a single class"),
            Error::NoOccurrences { type_id } => {
                write!(f, "type {type_id} has no attested occurrence")
            }
            Error::DictionaryMismatch { column, n_cols } => write!(
                f,
                "column {column} outside of the model dictionary ({n_cols} columns)"
            ),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::Empty(what) => write!(f, "{what} is empty"),
        }
    }
}

impl core::error::Error for Error {}
