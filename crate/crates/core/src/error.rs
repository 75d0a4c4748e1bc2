use thiserror::Error;

/// Errors raised by the geometry, construction and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is not on the unit sphere (|p| = {norm})")]
    NotOnSphere { norm: f64 },

    #[error("vector is not tangent to S^3 at the base point (<X,p> = {inner})")]
    NotTangent { inner: f64 },

    #[error("frame index {0} out of range (expected 1, 2 or 3)")]
    IndexOutOfRange(usize),

    #[error("invalid epsilon {0}: must be finite and > 0")]
    InvalidEpsilon(f64),

    #[error(
        "invalid angle theta = {0}: must lie in the open interval (0, pi/2); \
         theta = pi/2 is the Hopf-tube case and theta = 0 cannot occur"
    )]
    InvalidAngle(f64),

    #[error("tan argument {arg} is within 1e-6 of a pole; lambda blows up")]
    NearPole { arg: f64 },

    #[error("parameter {value} outside of domain [{min}, {max}]")]
    OutOfDomain { value: f64, min: f64, max: f64 },

    #[error("|sin xi1| = {value} < 1e-6 at v = {v}; supply xi3 explicitly")]
    DegenerateXi1 { v: f64, value: f64 },

    #[error("tangent plane is degenerate (Gram determinant {gram})")]
    DegenerateTangentPlane { gram: f64 },

    #[error("derivative order {0} not supported (expected 1..=4)")]
    BadOrder(u32),

    #[error("first fundamental form is singular (EG - F^2 = {0})")]
    SingularMetric(f64),

    #[error("point is at the projection pole")]
    AtPole,

    #[error("grid is empty")]
    EmptyGrid,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
