use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("open surface: {0}")]
    OpenSurface(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("scaling point is off the affine hull (distance {0:e})")]
    OffHull(f64),
    #[error("polyhedron is not convex")]
    Nonconvex,
    #[error("unsupported moment (i, j) = ({0}, {1})")]
    UnsupportedMoment(u32, u32),
    #[error("exponent p = {0} out of range")]
    POutOfRange(i32),
    #[error("h must be positive")]
    HZero,
    #[error("point lies in the plane of the polygon")]
    CoplanarPoint,
    #[error("segments are not skew")]
    NotSkew,
    #[error("domains are not parallel and separated")]
    NotParallel,
    #[error("no overlap support")]
    NoOverlapSupport,
    #[error("missing irreducible value `{0}`")]
    MissingIrreducible(String),
    #[error("unknown solid `{0}`")]
    UnknownSolid(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("quadrature tolerance not met (estimate {estimate}, error {error:e})")]
    ToleranceNotMet { estimate: f64, error: f64 },
    #[error("Monte Carlo budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("zero measure domain")]
    ZeroMeasure,
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
