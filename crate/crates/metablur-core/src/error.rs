use alloc::string::String;
use core::fmt;

/// Error type shared by all pipeline operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two inputs that must agree in shape do not.
    ShapeMismatch { expected: String, got: String },
    /// An image is below the minimum size an operation supports.
    ImageTooSmall { min: usize, height: usize, width: usize },
    /// A patch location or index falls outside its container.
    OutOfBounds(String),
    /// An argument violates a precondition.
    InvalidInput(String),
    /// An operation that needs sharp ground truth was given a clip without it.
    MissingGroundTruth,
    /// An operation was given an empty collection where at least one item is required.
    EmptyInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            Error::ImageTooSmall { min, height, width } => {
                write!(f, "image {height}x{width} is below the {min}x{min} minimum")
            }
            Error::OutOfBounds(what) => write!(f, "out of bounds: {what}"),
            Error::InvalidInput(what) => write!(f, "invalid input: {what}"),
            Error::MissingGroundTruth => write!(f, "video clip has no sharp ground-truth frames"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
