use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: files, dimensions, parameters.
    Input,
    /// A structural or sampling-period hypothesis of a theorem does not hold.
    Hypothesis,
    /// The numerics broke down.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown topology id `{0}`")]
    UnknownTopology(String),

    #[error("graph is directed; connectivity is only defined here for undirected graphs")]
    NotUndirected,

    #[error("graph is not connected (components: {components:?})")]
    NotConnected { components: Vec<Vec<usize>> },

    #[error("graph has no directed spanning tree (source components: {sources:?})")]
    NoSpanningTree { sources: Vec<Vec<usize>> },

    #[error("zero eigenvalue has multiplicity {multiplicity} although a directed spanning tree exists")]
    ZeroMultiplicity { multiplicity: usize },

    #[error("spectrum has complex eigenvalue {re}+{im}i where a real spectrum is required")]
    ComplexSpectrum { re: f64, im: f64 },

    #[error("nonzero eigenvalue {re}+{im}i has nonpositive real part")]
    NonPositiveRealPart { re: f64, im: f64 },

    #[error("empty topology set")]
    EmptyTopologySet,

    #[error("sampling period h = {h} is not strictly inside (0, {bound})")]
    SamplingPeriod { h: f64, bound: f64 },

    #[error("sector constants must satisfy 0 < gamma1 < gamma2 (got {gamma1}, {gamma2})")]
    SectorOrder { gamma1: f64, gamma2: f64 },

    #[error("coupling function rejected: {0}")]
    CouplingRejected(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("non-finite value in {context}{}", .time.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    NonFinite { context: String, time: Option<f64> },

    #[error("need at least {needed} usable samples, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("segment {index}: {source}")]
    Segment {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidGraph(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::Parse { .. }
            | Error::UnknownTopology(_)
            | Error::EmptyTopologySet
            | Error::SectorOrder { .. }
            | Error::InsufficientData { .. }
            | Error::Io(_) => ErrorKind::Input,
            Error::NotUndirected
            | Error::NotConnected { .. }
            | Error::NoSpanningTree { .. }
            | Error::SamplingPeriod { .. }
            | Error::CouplingRejected(_)
            | Error::Unsupported(_) => ErrorKind::Hypothesis,
            Error::ZeroMultiplicity { .. }
            | Error::ComplexSpectrum { .. }
            | Error::NonPositiveRealPart { .. }
            | Error::NoConvergence { .. }
            | Error::NonFinite { .. } => ErrorKind::Numerical,
            Error::Segment { source, .. } => source.kind(),
        }
    }
}
