use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} is out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    /// The grid pitch is too coarse to represent an element.
    #[error("under-resolved {element}: pitch {pitch:.3e} m exceeds limit {limit:.3e} m")]
    Resolution {
        element: &'static str,
        pitch: f64,
        limit: f64,
    },

    #[error("sampling criterion violated: {0}")]
    Sampling(String),

    #[error("visibility undefined: maximum intensity is zero")]
    UndefinedVisibility,

    #[error("which-way information undefined: detector count is zero")]
    UndefinedWhichWay,

    #[error("insufficient fringes: found {maxima} maxima and {minima} minima")]
    InsufficientFringes { maxima: usize, minima: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("cannot normalize a field with zero total power")]
    CannotNormalize,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
