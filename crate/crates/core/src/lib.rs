//! Trinary digitization of r-regular planar shapes, legal pixel
//! configuration catalogues, and smooth boundary reconstruction with
//! Hausdorff-distance checks.

use thiserror::Error;

pub mod configs;
pub mod digitizer;
pub mod geom;
pub mod metrics;
pub mod par;
pub mod reconstruct;
pub mod shapes;
pub mod suite;

pub use par::Exec;

/// Any failure along digitize → validate → reconstruct → evaluate.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Digitize(#[from] digitizer::DigitizeError),
    #[error(transparent)]
    Shape(#[from] shapes::ShapeError),
    #[error("{} invalid configuration(s); first: {}", .0.len(), .0[0])]
    InvalidConfiguration(Vec<configs::Violation>),
    #[error(transparent)]
    Reconstruct(#[from] reconstruct::ReconstructError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Config(#[from] configs::ConfigError),
    #[error("{0}")]
    Other(String),
}

impl PipelineError {
    /// 2 resolution, 3 corner degeneracy, 4 invalid configuration,
    /// 5 topology degeneracy, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use digitizer::DigitizeError as D;
        use reconstruct::ReconstructError as R;
        match self {
            PipelineError::Digitize(D::Resolution { .. }) => 2,
            PipelineError::Digitize(D::CornerDegeneracy { .. }) => 3,
            PipelineError::InvalidConfiguration(_) => 4,
            PipelineError::Reconstruct(R::Topology { .. }) => 5,
            _ => 1,
        }
    }
}
