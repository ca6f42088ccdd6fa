use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("epsilon {0} is not a value of the grid")]
    NotOnGrid(f64),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("insufficient data: {available} tail points, at least {required} required")]
    InsufficientData { available: usize, required: usize },

    #[error("trajectory left the safety box at epsilon = {eps:e}, t = {t}")]
    BlowUp { eps: f64, t: f64 },

    #[error("vector field is not G-complete: {0}")]
    NotComplete(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction insufficient: {0}")]
    ConstructionInsufficient(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown gallery item `{0}`")]
    UnknownGalleryItem(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("scenario error at line {line}, column {column}: {message}")]
    Scenario {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("task {task} failed: {source}")]
    Task {
        task: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
