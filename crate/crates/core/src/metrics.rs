//! Reconstruction quality: Hausdorff distances, component counts and
//! black/white separation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digitizer::TrinaryImage;
use crate::geom::{self, GeomError};
use crate::reconstruct::{self, ReconstructedCurve};
use crate::shapes::{Shape, ShapeError};

/// Default boundary sampling step as a fraction of the pixel side.
pub const DEFAULT_SPACING_REL: f64 = 1.0 / 50.0;

/// Coarsest allowed boundary sampling step as a fraction of the pixel side.
pub const MAX_SPACING_REL: f64 = 1.0 / 20.0;

pub const SCOPE_NOTE: &str = "certifies the boundary Hausdorff bound, component counts and black/white separation; \
the existence of a homeomorphism (weak similarity) is not computed";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub d: f64,
    /// Boundary of the shape to the curve.
    pub hausdorff_xy: f64,
    /// Curve to the boundary of the shape.
    pub hausdorff_yx: f64,
    pub hausdorff_sym: f64,
    pub components_shape: usize,
    pub components_curve: usize,
    pub separation_ok: bool,
    pub bound_ratio: f64,
    pub sample_spacing: f64,
    /// Allowance for measuring sampled rather than continuous curves.
    pub slack: f64,
    /// `d + slack`.
    pub bound: f64,
    pub within_bound: bool,
    pub scope: String,
}

impl EvalReport {
    /// Hausdorff bound, component equality and separation all hold.
    pub fn passes(&self) -> bool {
        self.within_bound && self.components_shape == self.components_curve && self.separation_ok
    }
}

pub fn default_spacing(d: f64) -> f64 {
    d * DEFAULT_SPACING_REL
}

/// `(#boundary components of the shape, #curve components)`.
pub fn component_counts(s: &Shape, curve: &ReconstructedCurve) -> (usize, usize) {
    (s.boundary_components(), curve.components.len())
}

pub fn separation_check(img: &TrinaryImage, curve: &ReconstructedCurve) -> bool {
    reconstruct::separates(img, curve)
}

/// Compares the reconstruction of `img` with the shape it was digitized from.
pub fn evaluate(s: &Shape, img: &TrinaryImage, curve: &ReconstructedCurve, sample_spacing: f64) -> Result<EvalReport, MetricsError> {
    let d = img.grid.d;
    if curve.grid != img.grid {
        return Err(MetricsError::InvalidInput("curve and image use different grids".into()));
    }
    if !(sample_spacing > 0.0) || sample_spacing > d * MAX_SPACING_REL * (1.0 + 1e-12) {
        return Err(MetricsError::InvalidInput(format!(
            "sample spacing {sample_spacing} must be positive and at most d/20 = {}",
            d * MAX_SPACING_REL
        )));
    }
    let (components_shape, components_curve) = component_counts(s, curve);
    let separation_ok = separation_check(img, curve);
    let boundary = s.boundary_sample(sample_spacing)?;
    let lines = curve.world_polylines();
    let (hausdorff_xy, hausdorff_yx, hausdorff_sym) = if lines.is_empty() {
        (f64::INFINITY, 0.0, f64::INFINITY)
    } else {
        geom::hausdorff_sets(&boundary, &lines)?
    };
    let slack = 2.0 * sample_spacing;
    Ok(EvalReport {
        d,
        hausdorff_xy,
        hausdorff_yx,
        hausdorff_sym,
        components_shape,
        components_curve,
        separation_ok,
        bound_ratio: hausdorff_sym / d,
        sample_spacing,
        slack,
        bound: d + slack,
        within_bound: hausdorff_sym <= d + slack,
        scope: SCOPE_NOTE.to_string(),
    })
}
