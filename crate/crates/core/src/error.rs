use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of Φ_b at distance {distance:.3e} from z = {z}")]
    Pole { z: String, distance: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("angle polytope is empty")]
    Infeasible,
    #[error("{what} did not converge after {iters} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iters: usize,
        residual: f64,
    },
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole { .. } => "pole",
            Error::NonFinite(_) => "non_finite",
            Error::UnknownEdge(_) => "unknown_edge",
            Error::InvalidTriangulation(_) => "invalid_triangulation",
            Error::Infeasible => "infeasible",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Quadrature(_) => "quadrature",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
