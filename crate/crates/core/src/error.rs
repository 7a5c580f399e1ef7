use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sets of a CI triple overlap: {0}")]
    Overlap(String),
    #[error("CI triple has an empty side: {0}")]
    EmptySide(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable universe must not be empty")]
    EmptyUniverse,
    #[error("variable universe has {0} variables, at most 64 are supported")]
    UniverseTooLarge(usize),
    #[error("status of {0} is unknown")]
    UnknownStatus(String),
    #[error("{what}: size {size} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("edge {0} is not present")]
    EdgeAbsent(String),
    #[error("graph contains a directed cycle")]
    Cycle,
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("partial correlation recursion hit |rho| = 1")]
    Singularity,
    #[error("sample size {n} too small for conditioning set of size {cond}")]
    SampleSize { n: usize, cond: usize },
    #[error("every stratum of the chi-square test is degenerate")]
    DegenerateStratum,
    #[error("sample is empty")]
    EmptySample,
    #[error("table shape mismatch: {0}")]
    TableShape(String),
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
