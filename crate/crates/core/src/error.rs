use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid exponent {0}: must be >= 1")]
    InvalidExponent(f64),

    #[error("window is identically zero")]
    ZeroWindow,

    #[error("degenerate window pair: |<psi, phi>| = {overlap:e} is below {threshold:e}")]
    DegenerateWindowPair { overlap: f64, threshold: f64 },

    #[error("same-equation window evolution requires a potential")]
    MissingPotential,

    #[error("flow diverged at s = {time}")]
    FlowDiverged { time: f64 },

    #[error("flow horizon |s - t| = {span} exceeds {limit}")]
    HorizonExceeded { span: f64, limit: f64 },

    #[error("picard iteration is not contracting; increments {increments:?}")]
    NoContraction { increments: Vec<f64> },

    #[error("picard iteration did not converge in {iterations} iterations; increments {increments:?}")]
    NotConverged {
        iterations: usize,
        increments: Vec<f64>,
    },

    #[error("potential does not satisfy the required class: {0}")]
    PotentialClass(String),

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("no experiments found in {0}")]
    NoExperiments(String),

    #[error("experiment `{name}` failed: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
