use thiserror::Error;

/// Every failure the toolkit reports. Numeric payloads are stored as `f64`
/// regardless of the scalar the computation ran in.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Lorentz: |MᵀJM − J| = {drift:e}")]
    NotLorentz { drift: f64 },
    #[error("matrix reverses time orientation (M[n][n] = {entry})")]
    TimeReversing { entry: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not on the {model} model: {detail}")]
    OutOfModel { model: &'static str, detail: String },

    #[error("at most {max} points span a hyperplane, got {got}")]
    TooManyPoints { max: usize, got: usize },
    #[error("points are linearly dependent; the hyperplane is not determined")]
    DegenerateConfiguration,
    #[error("barycentric coordinates out of range: {0}")]
    BarycentricOutOfRange(String),
    #[error("barycentric weight 1 on ideal vertex {0}")]
    IdealFullWeight(usize),

    #[error("quadrature budget of {max_evals} evaluations exhausted (error estimate {error:e})")]
    QuadratureBudgetExceeded { max_evals: usize, error: f64 },
    #[error("simplex has coincident vertices {0} and {1}")]
    DegenerateSimplex(usize, usize),
    #[error("face {0} of the simplex is degenerate")]
    DegenerateFace(usize),
    #[error("enumeration budget of {0} elements exceeded")]
    BudgetExceeded(usize),

    #[error("measure has an atom of mass {mass} ≥ 1/2")]
    DominantAtom { mass: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid boundary measure: {0}")]
    InvalidMeasure(String),
    #[error("no tabulated sample within radius {radius} (nearest at {nearest})")]
    OutOfTable { radius: f64, nearest: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{name}` failed verification: {reason}")]
    PresetCorrupt { name: String, reason: String },
    #[error("truncation height {height} is not above the cusp floor {floor}")]
    BadTruncation { height: f64, floor: f64 },

    #[error("no test simplex reached the volume floor after {attempts} draws")]
    IllConditioned { attempts: usize },

    #[error("simplex is not regular (worst cross-ratio deviation {deviation:e})")]
    NotRegular { deviation: f64 },
    #[error("simplices are not congruent (residual {residual:e})")]
    NoExactSolve { residual: f64 },
    #[error("boundary map image of the seed simplex is not regular (deviation {deviation:e})")]
    ImageNotRegular { deviation: f64 },
    #[error("orbit point at word {word:?} deviates by {mismatch:e}")]
    OrbitMismatch { word: Vec<usize>, mismatch: f64 },
    #[error("reconstructed isometries disagree (spread {spread:e})")]
    NoConsensus { spread: f64, isometries: Vec<Vec<Vec<f64>>> },
    #[error("expected {expected} generator images, got {got}")]
    GeneratorCountMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotLorentz { .. } => "NotLorentz",
            Error::TimeReversing { .. } => "TimeReversing",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::OutOfModel { .. } => "OutOfModel",
            Error::TooManyPoints { .. } => "TooManyPoints",
            Error::DegenerateConfiguration => "DegenerateConfiguration",
            Error::BarycentricOutOfRange(_) => "BarycentricOutOfRange",
            Error::IdealFullWeight(_) => "IdealFullWeight",
            Error::QuadratureBudgetExceeded { .. } => "QuadratureBudgetExceeded",
            Error::DegenerateSimplex(..) => "DegenerateSimplex",
            Error::DegenerateFace(_) => "DegenerateFace",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::DominantAtom { .. } => "DominantAtom",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::OutOfTable { .. } => "OutOfTable",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::PresetCorrupt { .. } => "PresetCorrupt",
            Error::BadTruncation { .. } => "BadTruncation",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NotRegular { .. } => "NotRegular",
            Error::NoExactSolve { .. } => "NoExactSolve",
            Error::ImageNotRegular { .. } => "ImageNotRegular",
            Error::OrbitMismatch { .. } => "OrbitMismatch",
            Error::NoConsensus { .. } => "NoConsensus",
            Error::GeneratorCountMismatch { .. } => "GeneratorCountMismatch",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
