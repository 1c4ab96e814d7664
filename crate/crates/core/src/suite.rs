//! Batch evaluation over a corpus of shapes, resolutions and grid offsets.

use serde::{Deserialize, Serialize};

use crate::configs::validate_image;
use crate::digitizer::{
    self, digitize_trinary_with, ensure_corner_clear, fit_grid, halton_offset, Grid, IntensityMap, TrinaryImage,
    CORNER_EPS_REL, DEFAULT_JITTER_ATTEMPTS,
};
use crate::geom::Point;
use crate::metrics::{self, EvalReport};
use crate::par::{self, Exec};
use crate::reconstruct::{self, grey_components, Bump, ReconstructOptions, DEFAULT_SAMPLES};
use crate::shapes::{parse_shape_spec_with, Family, Shape, ShapeError};
use crate::PipelineError;

/// Resolutions of the default suite: `d·√2 = f·r`.
pub const DEFAULT_D_FACTORS: [f64; 3] = [0.4, 0.7, 0.95];

/// Sub-pixel shifted grids per (shape, d) besides the fitted one.
pub const DEFAULT_OFFSETS: usize = 2;

pub const DEFAULT_MARGIN: usize = 2;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteCase {
    pub name: String,
    pub shape: Shape,
    pub d: f64,
    pub d_factor: Option<f64>,
    /// 0 for the fitted grid, k ≥ 1 for the k-th shifted grid.
    pub variant: usize,
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub bump: Bump,
    pub samples: usize,
    /// Boundary sampling step relative to `d`.
    pub spacing_rel: f64,
    pub margin: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            bump: Bump::Paper,
            samples: DEFAULT_SAMPLES,
            spacing_rel: metrics::DEFAULT_SPACING_REL,
            margin: DEFAULT_MARGIN,
            seed: DEFAULT_SEED,
            exec: Exec::default(),
        }
    }
}

/// One line of the JSON-lines suite report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub name: String,
    pub family: String,
    pub declared_r: f64,
    pub d: f64,
    pub d_factor: Option<f64>,
    pub variant: usize,
    pub width: usize,
    pub height: usize,
    pub violations: usize,
    pub aux_points: usize,
    /// 8-connected Grey components, for diagnostics only.
    pub grey_components: usize,
    pub strict_containment_misses: usize,
    pub report: Option<EvalReport>,
    pub error: Option<String>,
    pub exit_code: i32,
}

impl CaseRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.violations == 0 && self.report.as_ref().is_some_and(EvalReport::passes)
    }
}

fn shape(f: Family, r: f64) -> Shape {
    Shape::new(f, r).expect("built-in suite shapes are regular")
}

/// Six shapes per family, including the tightest admissible parameters
/// (radius = r, disk gap = 2r, corner radius = r, annulus hole = r and width = 2r).
pub fn default_shapes() -> Vec<(String, Shape)> {
    let p = Point::new;
    let mut v = Vec::new();
    let mut add = |name: &str, s: Shape| v.push((name.to_string(), s));
    add("disk_tight", shape(Family::Disk { center: p(0.13, -0.21), radius: 1.0 }, 1.0));
    add("disk_small", shape(Family::Disk { center: p(0.0, 0.0), radius: 1.7 }, 1.2));
    add("disk_mid", shape(Family::Disk { center: p(1.37, 2.91), radius: 3.3 }, 1.0));
    add("disk_large", shape(Family::Disk { center: p(-0.41, 0.77), radius: 6.2 }, 2.0));
    add("disk_wide_r", shape(Family::Disk { center: p(0.5, 0.5), radius: 2.5 }, 2.5));
    add("disk_thin_r", shape(Family::Disk { center: p(0.29, 0.61), radius: 4.1 }, 0.9));

    add(
        "disks_tight_gap",
        shape(Family::DisjointDisks { centers: vec![p(0.0, 0.0), p(4.0, 0.0)], radii: vec![1.0, 1.0] }, 1.0),
    );
    add(
        "disks_diagonal",
        shape(Family::DisjointDisks { centers: vec![p(0.11, 0.07), p(3.9, 3.3)], radii: vec![1.3, 1.1] }, 1.0),
    );
    add(
        "disks_three",
        shape(
            Family::DisjointDisks { centers: vec![p(0.0, 0.0), p(5.2, 0.4), p(2.3, 4.9)], radii: vec![1.5, 1.2, 1.8] },
            1.0,
        ),
    );
    add(
        "disks_unequal",
        shape(Family::DisjointDisks { centers: vec![p(-2.0, 0.3), p(4.5, -0.2)], radii: vec![3.0, 1.0] }, 1.0),
    );
    add(
        "disks_vertical",
        shape(Family::DisjointDisks { centers: vec![p(0.3, -3.1), p(0.2, 3.2)], radii: vec![1.9, 2.1] }, 1.1),
    );
    add(
        "disks_four",
        shape(
            Family::DisjointDisks {
                centers: vec![p(0.0, 0.0), p(5.0, 0.0), p(0.0, 5.0), p(5.0, 5.0)],
                radii: vec![1.2, 1.4, 1.1, 1.3],
            },
            1.0,
        ),
    );

    let rr = |c: Point, w: f64, h: f64, cr: f64, r: f64| {
        shape(Family::RoundedRectangle { center: c, width: w, height: h, corner_radius: cr }, r)
    };
    add("rect_tight", rr(p(0.07, 0.03), 3.0, 2.0, 1.0, 1.0));
    add("rect_square", rr(p(0.0, 0.0), 4.0, 4.0, 1.5, 1.2));
    add("rect_thin", rr(p(0.33, -0.19), 6.0, 0.0, 1.0, 1.0));
    add("rect_tall", rr(p(-1.1, 0.4), 1.2, 5.5, 1.3, 1.0));
    add("rect_round", rr(p(0.5, 0.5), 0.5, 0.5, 2.0, 1.4));
    add("rect_large", rr(p(0.21, 0.42), 8.0, 3.0, 2.0, 2.0));

    let an = |c: Point, o: f64, i: f64, r: f64| shape(Family::Annulus { center: c, outer: o, inner: i }, r);
    add("annulus_tight", an(p(0.17, -0.09), 3.0, 1.0, 1.0));
    add("annulus_wide", an(p(0.0, 0.0), 5.0, 1.5, 1.0));
    add("annulus_big_hole", an(p(0.4, 0.3), 6.0, 3.5, 1.1));
    add("annulus_thick_r", an(p(-0.3, 0.8), 4.75, 1.75, 1.5));
    add("annulus_offset", an(p(2.71, -1.41), 3.75, 1.45, 1.15));
    add("annulus_large", an(p(0.05, 0.05), 8.0, 4.0, 2.0));
    v
}

/// d values `f·r/√2` for each factor.
pub fn d_for_factor(s: &Shape, f: f64) -> f64 {
    f * s.declared_r() / std::f64::consts::SQRT_2
}

pub fn default_suite() -> Vec<SuiteCase> {
    let mut out = Vec::new();
    for (name, s) in default_shapes() {
        for f in DEFAULT_D_FACTORS {
            for variant in 0..=DEFAULT_OFFSETS {
                out.push(SuiteCase { name: name.clone(), shape: s.clone(), d: d_for_factor(&s, f), d_factor: Some(f), variant });
            }
        }
    }
    out
}

/// Blocks separated by lines of `---`. Each block is a shape spec plus
/// optional `name=`, `d=` (comma list), `d_factor=` (comma list) and
/// `offsets=` (shifted grids per d, default 0). Without `d` or `d_factor`
/// the default factors are used.
pub fn parse_suite_config(text: &str) -> Result<Vec<SuiteCase>, PipelineError> {
    let mut out = Vec::new();
    let mut blocks: Vec<String> = vec![String::new()];
    for line in text.lines() {
        if line.trim() == "---" {
            blocks.push(String::new());
        } else {
            let b = blocks.last_mut().expect("non-empty");
            b.push_str(line);
            b.push('\n');
        }
    }
    for (bi, block) in blocks.iter().enumerate() {
        if block.lines().all(|l| l.split('#').next().unwrap_or("").trim().is_empty()) {
            continue;
        }
        let (s, extras) = parse_shape_spec_with(block, &["name", "d", "d_factor", "offsets"])?;
        let get = |k: &str| extras.iter().find(|(kk, _)| kk == k).map(|(_, v)| v.as_str());
        let list = |v: &str| -> Result<Vec<f64>, PipelineError> {
            v.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| PipelineError::Shape(ShapeError::Parse { line: 0, msg: format!("bad number {x:?} in block {}", bi + 1) }))
                })
                .collect()
        };
        let name = get("name").map_or_else(|| format!("case{}", bi + 1), str::to_string);
        let offsets = match get("offsets") {
            Some(v) => v.trim().parse::<usize>().map_err(|_| PipelineError::Other(format!("bad offsets {v:?}")))?,
            None => 0,
        };
        let mut ds: Vec<(f64, Option<f64>)> = Vec::new();
        if let Some(v) = get("d") {
            ds.extend(list(v)?.into_iter().map(|d| (d, None)));
        }
        if let Some(v) = get("d_factor") {
            ds.extend(list(v)?.into_iter().map(|f| (d_for_factor(&s, f), Some(f))));
        }
        if ds.is_empty() {
            ds.extend(DEFAULT_D_FACTORS.iter().map(|&f| (d_for_factor(&s, f), Some(f))));
        }
        for (d, f) in ds {
            for variant in 0..=offsets {
                out.push(SuiteCase { name: name.clone(), shape: s.clone(), d, d_factor: f, variant });
            }
        }
    }
    Ok(out)
}

/// Fitted grid for variant 0; variant k shifts the origin down-left by the
/// k-th seeded sub-pixel offset and grows the grid by one pixel.
pub fn case_grid(c: &SuiteCase, margin: usize, seed: u64) -> Result<Grid, PipelineError> {
    let g = fit_grid(&c.shape, c.d, margin)?;
    let g = if c.variant == 0 {
        g
    } else {
        // Offsets 1..=64 are reserved for corner-clearing jitter.
        let (u, v) = halton_offset(seed, 1000 + c.variant as u64);
        Grid::new(g.origin - Point::new(u * g.d, v * g.d), g.d, g.width + 1, g.height + 1)?
    };
    Ok(ensure_corner_clear(&c.shape, &g, CORNER_EPS_REL * c.d, DEFAULT_JITTER_ATTEMPTS, seed)?)
}

/// Digitizes, validates, reconstructs and evaluates one case.
pub fn run_case_full(c: &SuiteCase, o: &SuiteOptions, inner: Exec) -> Result<(TrinaryImage, CaseRecord), PipelineError> {
    let g = case_grid(c, o.margin, o.seed)?;
    let img = digitize_trinary_with(&c.shape, &g, inner)?;
    let mut rec = CaseRecord {
        name: c.name.clone(),
        family: c.shape.family_name().to_string(),
        declared_r: c.shape.declared_r(),
        d: c.d,
        d_factor: c.d_factor,
        variant: c.variant,
        width: g.width,
        height: g.height,
        violations: validate_image(&img).len(),
        aux_points: 0,
        grey_components: grey_components(&img),
        strict_containment_misses: 0,
        report: None,
        error: None,
        exit_code: 0,
    };
    let opts = ReconstructOptions { bump: o.bump.clone(), samples: o.samples, exec: inner };
    let (graph, curve) = reconstruct::reconstruct(&img, &opts)?;
    rec.aux_points = graph.points.len();
    rec.strict_containment_misses = curve.strict_containment_misses;
    rec.report = Some(metrics::evaluate(&c.shape, &img, &curve, o.spacing_rel * c.d)?);
    Ok((img, rec))
}

pub fn run_case(c: &SuiteCase, o: &SuiteOptions, inner: Exec) -> CaseRecord {
    match run_case_full(c, o, inner) {
        Ok((_, rec)) => rec,
        Err(e) => CaseRecord {
            name: c.name.clone(),
            family: c.shape.family_name().to_string(),
            declared_r: c.shape.declared_r(),
            d: c.d,
            d_factor: c.d_factor,
            variant: c.variant,
            width: 0,
            height: 0,
            violations: 0,
            aux_points: 0,
            grey_components: 0,
            strict_containment_misses: 0,
            report: None,
            error: Some(e.to_string()),
            exit_code: e.exit_code(),
        },
    }
}

/// Records in case order. Cases run in parallel under `Exec::Parallel`,
/// each case itself sequentially.
pub fn run_suite(cases: &[SuiteCase], o: &SuiteOptions) -> Vec<CaseRecord> {
    par::map_slice(o.exec, cases, |c| run_case(c, o, Exec::Sequential))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub cases: usize,
    pub failures: usize,
    pub max_bound_ratio: f64,
    pub strict_containment_misses: usize,
}

pub fn summarize(records: &[CaseRecord]) -> SuiteSummary {
    SuiteSummary {
        cases: records.len(),
        failures: records.iter().filter(|r| !r.ok()).count(),
        max_bound_ratio: records.iter().filter_map(|r| r.report.as_ref()).map(|r| r.bound_ratio).fold(0.0, f64::max),
        strict_containment_misses: records.iter().map(|r| r.strict_containment_misses).sum(),
    }
}

/// The trinary image is the same whether intensities come from the
/// identity map or from squaring.
pub fn trinary_invariant(s: &Shape, g: &Grid, exec: Exec) -> Result<bool, PipelineError> {
    let direct = digitize_trinary_with(s, g, exec)?;
    let id = digitizer::digitize_grey_with(s, g, &IntensityMap::Identity, exec)?;
    let sq = digitizer::digitize_grey_with(s, g, &IntensityMap::Square, exec)?;
    Ok(digitizer::quantize(&id, &IntensityMap::Identity) == direct && digitizer::quantize(&sq, &IntensityMap::Square) == direct)
}
