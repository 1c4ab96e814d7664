//! Boundary reconstruction from a trinary image.
//!
//! Grey pixels get auxiliary points on shared edges or at the centres of
//! all-Grey 2×2 blocks. After pruning, each point has exactly two neighbours,
//! and each neighbouring pair is joined inside its pixel by a blend of two
//! circle arcs. All geometry here is in grid units: pixel `(c, r)` is the
//! square `[c, c+1] × [r, r+1]`; [`ReconstructedCurve::grid`] maps back to
//! the world.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digitizer::{Cell, Grid, TrinaryImage};
use crate::geom::{self, circumcurve, ChordGraph, CurvePiece, GeomError, Point, Polyline, COLLINEAR_TOL};
use crate::par::{self, Exec};

pub const DEFAULT_SAMPLES: usize = 32;

/// Sandwich check tolerance, relative to the chord length.
const SANDWICH_TOL: f64 = 1e-9;

/// Slack for the strict single-pixel containment diagnostic.
const CONTAIN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructError {
    #[error("topology degeneracy at pixel ({col}, {row}): {msg}")]
    Topology { col: usize, row: usize, msg: String },
    #[error("reconstructed curve crosses itself between pixels ({}, {}) and ({}, {})", .a.0, .a.1, .b.0, .b.1)]
    Crossing { a: (usize, usize), b: (usize, usize) },
    #[error("curve of pixel ({}, {}) leaves the pixel's one-pixel neighbourhood", .pixel.0, .pixel.1)]
    Containment { pixel: (usize, usize) },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreyClass {
    Simple,
    Complex,
}

fn is_grey(img: &TrinaryImage, c: isize, r: isize) -> bool {
    img.get_padded(c, r) == Cell::Grey
}

/// Whether the 2×2 block with lower-left pixel `(c, r)` is all Grey.
fn grey_block(img: &TrinaryImage, c: isize, r: isize) -> bool {
    is_grey(img, c, r) && is_grey(img, c + 1, r) && is_grey(img, c, r + 1) && is_grey(img, c + 1, r + 1)
}

/// Tag per pixel (row-major); `None` for non-Grey pixels.
pub fn classify_grey(img: &TrinaryImage) -> Vec<Option<GreyClass>> {
    let w = img.width();
    (0..img.cells().len())
        .map(|i| {
            let (c, r) = ((i % w) as isize, (i / w) as isize);
            if !is_grey(img, c, r) {
                return None;
            }
            let complex = [(-1, -1), (0, -1), (-1, 0), (0, 0)].iter().any(|&(dc, dr)| grey_block(img, c + dc, r + dr));
            Some(if complex { GreyClass::Complex } else { GreyClass::Simple })
        })
        .collect()
}

/// Number of 8-connected components of Grey pixels.
pub fn grey_components(img: &TrinaryImage) -> usize {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if seen[start] || img.cells()[start] != Cell::Grey {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (c, r) = ((i % w) as isize, (i / w) as isize);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (cc, rr) = (c + dc, r + dr);
                    if cc < 0 || rr < 0 || cc >= w as isize || rr >= h as isize {
                        continue;
                    }
                    let j = rr as usize * w + cc as usize;
                    if !seen[j] && img.cells()[j] == Cell::Grey {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxKind {
    EdgeMidpoint,
    BlockCentre,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxPoint {
    /// Grid coordinates.
    pub position: Point,
    pub kind: AuxKind,
    /// Row-major indices of the pixels whose closed square contains the point.
    pub owners: Vec<usize>,
}

/// Places points for every edge-adjacent Grey pair, sorted by `(x, y)`.
pub fn place_aux_points(img: &TrinaryImage) -> Vec<AuxPoint> {
    let w = img.width();
    let idx = |c: isize, r: isize| r as usize * w + c as usize;
    // Keyed by doubled coordinates, which are integers.
    let mut pts: BTreeMap<(i64, i64), AuxPoint> = BTreeMap::new();
    let centre = |c: isize, r: isize, pts: &mut BTreeMap<(i64, i64), AuxPoint>| {
        // Block with lower-left pixel (c, r); centre at grid vertex (c+1, r+1).
        pts.entry((2 * (c as i64 + 1), 2 * (r as i64 + 1))).or_insert_with(|| {
            let mut owners = vec![idx(c, r), idx(c + 1, r), idx(c, r + 1), idx(c + 1, r + 1)];
            owners.sort_unstable();
            AuxPoint { position: Point::new((c + 1) as f64, (r + 1) as f64), kind: AuxKind::BlockCentre, owners }
        });
    };
    for r in 0..img.height() as isize {
        for c in 0..w as isize {
            if !is_grey(img, c, r) {
                continue;
            }
            // Right neighbour: candidate blocks below and above the shared edge.
            if c + 1 < w as isize && is_grey(img, c + 1, r) {
                let blocks: Vec<(isize, isize)> = [(c, r - 1), (c, r)].into_iter().filter(|&(bc, br)| grey_block(img, bc, br)).collect();
                if blocks.is_empty() {
                    pts.entry((2 * (c as i64 + 1), 2 * r as i64 + 1)).or_insert_with(|| AuxPoint {
                        position: Point::new((c + 1) as f64, r as f64 + 0.5),
                        kind: AuxKind::EdgeMidpoint,
                        owners: vec![idx(c, r), idx(c + 1, r)],
                    });
                }
                for (bc, br) in blocks {
                    centre(bc, br, &mut pts);
                }
            }
            if r + 1 < img.height() as isize && is_grey(img, c, r + 1) {
                let blocks: Vec<(isize, isize)> = [(c - 1, r), (c, r)].into_iter().filter(|&(bc, br)| grey_block(img, bc, br)).collect();
                if blocks.is_empty() {
                    pts.entry((2 * c as i64 + 1, 2 * (r as i64 + 1))).or_insert_with(|| AuxPoint {
                        position: Point::new(c as f64 + 0.5, (r + 1) as f64),
                        kind: AuxKind::EdgeMidpoint,
                        owners: vec![idx(c, r), idx(c, r + 1)],
                    });
                }
                for (bc, br) in blocks {
                    centre(bc, br, &mut pts);
                }
            }
        }
    }
    pts.into_values().collect()
}

fn points_per_pixel(points: &[AuxPoint], n: usize) -> Vec<Vec<usize>> {
    let mut per = vec![Vec::new(); n];
    for (i, p) in points.iter().enumerate() {
        for &o in &p.owners {
            per[o].push(i);
        }
    }
    per
}

/// Drops the point of every Simple pixel that holds exactly one, then checks
/// that Simple pixels hold 0 or 2 points and Complex pixels 1 or 2.
pub fn prune_aux_points(points: Vec<AuxPoint>, img: &TrinaryImage) -> Result<Vec<AuxPoint>, ReconstructError> {
    let classes = classify_grey(img);
    let per = points_per_pixel(&points, img.cells().len());
    let mut drop = vec![false; points.len()];
    for (pix, pts) in per.iter().enumerate() {
        if classes[pix] == Some(GreyClass::Simple) && pts.len() == 1 {
            drop[pts[0]] = true;
        }
    }
    let kept: Vec<AuxPoint> = points.into_iter().zip(drop).filter(|(_, d)| !d).map(|(p, _)| p).collect();
    let per = points_per_pixel(&kept, img.cells().len());
    let w = img.width();
    for (pix, class) in classes.iter().enumerate() {
        let n = per[pix].len();
        let ok = match class {
            None => true,
            Some(GreyClass::Simple) => n == 0 || n == 2,
            Some(GreyClass::Complex) => n == 1 || n == 2,
        };
        if !ok {
            return Err(ReconstructError::Topology {
                col: pix % w,
                row: pix / w,
                msg: format!("{:?} pixel holds {n} auxiliary points after pruning", class.unwrap()),
            });
        }
    }
    Ok(kept)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxEdge {
    pub u: usize,
    pub v: usize,
    /// Carrying pixel (row-major index).
    pub pixel: usize,
    /// Second pixel holding the same pair, when the pair sits on a shared edge.
    pub also: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxGraph {
    pub points: Vec<AuxPoint>,
    pub edges: Vec<AuxEdge>,
}

impl AuxGraph {
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.points.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }
}

pub fn build_aux_graph(points: Vec<AuxPoint>, img: &TrinaryImage) -> Result<AuxGraph, ReconstructError> {
    let per = points_per_pixel(&points, img.cells().len());
    let mut edges: BTreeMap<(usize, usize), AuxEdge> = BTreeMap::new();
    for (pix, pts) in per.iter().enumerate() {
        if pts.len() != 2 {
            continue;
        }
        let (u, v) = (pts[0].min(pts[1]), pts[0].max(pts[1]));
        edges
            .entry((u, v))
            .and_modify(|e| e.also = Some(pix))
            .or_insert(AuxEdge { u, v, pixel: pix, also: None });
    }
    let graph = AuxGraph { points, edges: edges.into_values().collect() };
    let w = img.width();
    for (i, nb) in graph.neighbours().iter().enumerate() {
        if nb.len() != 2 {
            let pix = graph.points[i].owners[0];
            return Err(ReconstructError::Topology {
                col: pix % w,
                row: pix / w,
                msg: format!(
                    "auxiliary point ({}, {}) has {} neighbours",
                    graph.points[i].position.x,
                    graph.points[i].position.y,
                    nb.len()
                ),
            });
        }
    }
    Ok(graph)
}

/// Weight of the first arc along a chord: 1 at the start, 0 at the end.
#[derive(Clone, Debug, PartialEq)]
pub enum Bump {
    /// Logistic bump with exponent `6/(7t) − 6/(7 − 7t)`, flat to all orders
    /// at both ends.
    Paper,
    /// `1 − (3t² − 2t³)`, only C¹ at the ends.
    Smoothstep,
    /// Uniform samples over `[0, 1]`, linearly interpolated.
    Tabulated(Vec<f64>),
}

impl Bump {
    pub fn tabulated(values: Vec<f64>) -> Result<Self, ReconstructError> {
        let ok = values.len() >= 2
            && values[0] == 1.0
            && *values.last().unwrap() == 0.0
            && values.iter().all(|v| (0.0..=1.0).contains(v))
            && values.windows(2).all(|w| w[1] <= w[0]);
        if !ok {
            return Err(ReconstructError::InvalidParameter(
                "tabulated bump must start at 1, end at 0 and be non-increasing".into(),
            ));
        }
        Ok(Bump::Tabulated(values))
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "paper" => Some(Bump::Paper),
            "smoothstep" => Some(Bump::Smoothstep),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        match self {
            Bump::Paper => {
                let z = 6.0 / (7.0 * t) - 6.0 / (7.0 - 7.0 * t);
                1.0 / (1.0 + (-z).exp())
            }
            Bump::Smoothstep => 1.0 - t * t * (3.0 - 2.0 * t),
            Bump::Tabulated(v) => {
                let x = t * (v.len() - 1) as f64;
                let i = (x.floor() as usize).min(v.len() - 2);
                let f = x - i as f64;
                v[i] * (1.0 - f) + v[i + 1] * f
            }
        }
    }
}

/// The curve inside one pixel, from `a` to `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelCurve {
    /// `(col, row)` of the carrying pixel.
    pub pixel: (usize, usize),
    pub a: Point,
    pub b: Point,
    /// Circle (or line) through the previous point, `a` and `b`.
    pub arc1: CurvePiece,
    /// Circle (or line) through `a`, `b` and the next point.
    pub arc2: CurvePiece,
    pub samples: Vec<Point>,
}

/// Per-sample offsets of a blended chord curve, for invariant checks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlendProfile {
    pub t: Vec<f64>,
    pub offset1: Vec<f64>,
    pub offset2: Vec<f64>,
    pub offset: Vec<f64>,
}

/// Blends the arc through `(prev, a, b)` with the arc through `(a, b, next)`
/// over the chord `a`–`b`. The first arc has weight `φ(t/|L|)`, so adjacent
/// pixel curves meet on the same circle and join smoothly.
pub fn pixel_curve(
    a: Point,
    b: Point,
    prev: Point,
    next: Point,
    bump: &Bump,
    samples: usize,
) -> Result<(PixelCurve, BlendProfile), ReconstructError> {
    if samples < 2 {
        return Err(ReconstructError::InvalidParameter("need at least 2 samples per pixel".into()));
    }
    let arc1 = circumcurve(prev, a, b, COLLINEAR_TOL)?;
    let arc2 = circumcurve(a, b, next, COLLINEAR_TOL)?;
    let g1 = ChordGraph::new(&arc1, a, b)?;
    let g2 = ChordGraph::new(&arc2, a, b)?;
    let n = samples - 1;
    let mut prof = BlendProfile { t: Vec::new(), offset1: Vec::new(), offset2: Vec::new(), offset: Vec::new() };
    let mut pts = Vec::with_capacity(samples);
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let t = s * g1.len;
        let (o1, o2) = (g1.offset(t), g2.offset(t));
        let phi = bump.eval(s);
        let o = phi * o1 + (1.0 - phi) * o2;
        pts.push(match k {
            0 => a,
            _ if k == n => b,
            _ => g1.point(t, o),
        });
        prof.t.push(t);
        prof.offset1.push(o1);
        prof.offset2.push(o2);
        prof.offset.push(o);
    }
    Ok((PixelCurve { pixel: (0, 0), a, b, arc1, arc2, samples: pts }, prof))
}

/// Whether every blended offset lies between the two arc offsets.
pub fn sandwich_holds(p: &BlendProfile, chord_len: f64) -> bool {
    let tol = SANDWICH_TOL * chord_len.max(1.0);
    p.offset.iter().zip(p.offset1.iter().zip(&p.offset2)).all(|(&o, (&o1, &o2))| o >= o1.min(o2) - tol && o <= o1.max(o2) + tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub pieces: Vec<PixelCurve>,
}

impl Component {
    /// Closed polyline in grid coordinates; each junction appears once.
    pub fn polyline(&self) -> Polyline {
        let mut v = Vec::new();
        for p in &self.pieces {
            v.extend_from_slice(&p.samples[..p.samples.len() - 1]);
        }
        Polyline::new(v, true).expect("pieces have finite samples")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedCurve {
    pub grid: Grid,
    pub samples_per_pixel: usize,
    pub components: Vec<Component>,
    /// Sampled points outside their carrying pixel (or pixel pair). Informational.
    #[serde(default)]
    pub strict_containment_misses: usize,
}

impl ReconstructedCurve {
    pub fn polylines(&self) -> Vec<Polyline> {
        self.components.iter().map(Component::polyline).collect()
    }

    pub fn world_polylines(&self) -> Vec<Polyline> {
        self.polylines()
            .into_iter()
            .map(|p| Polyline::new(p.vertices.iter().map(|&q| self.grid.to_world(q)).collect(), true).expect("finite"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Vertex cycles of a 2-regular graph: each starts at its smallest index and
/// continues to the smaller of that vertex's neighbours.
pub fn cycles(g: &AuxGraph) -> Vec<Vec<usize>> {
    let adj = g.neighbours();
    let mut seen = vec![false; g.points.len()];
    let mut out = Vec::new();
    for s in 0..g.points.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = vec![s];
        seen[s] = true;
        let (mut prev, mut cur) = (s, adj[s][0].min(adj[s][1]));
        while cur != s {
            seen[cur] = true;
            cyc.push(cur);
            let nxt = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            prev = cur;
            cur = nxt;
        }
        out.push(cyc);
    }
    out
}

fn in_square(p: Point, x0: f64, y0: f64, x1: f64, y1: f64, tol: f64) -> bool {
    p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol
}

/// Builds and checks the closed curve through all graph cycles.
pub fn assemble(g: &AuxGraph, img: &TrinaryImage, bump: &Bump, samples: usize, exec: Exec) -> Result<ReconstructedCurve, ReconstructError> {
    let w = img.width();
    let edge_of: BTreeMap<(usize, usize), &AuxEdge> = g.edges.iter().map(|e| ((e.u, e.v), e)).collect();
    let mut components = Vec::new();
    let mut misses = 0;
    for cyc in cycles(g) {
        let n = cyc.len();
        if n < 3 {
            let pix = g.points[cyc[0]].owners[0];
            return Err(ReconstructError::Topology { col: pix % w, row: pix / w, msg: format!("cycle of length {n}") });
        }
        let idx: Vec<usize> = (0..n).collect();
        let pieces = par::map_slice(exec, &idx, |&i| {
            let (u, v) = (cyc[i], cyc[(i + 1) % n]);
            let e = edge_of[&(u.min(v), u.max(v))];
            let pos = |k: usize| g.points[cyc[k % n]].position;
            let (mut pc, _) = pixel_curve(pos(i), pos(i + 1), pos(i + n - 1), pos(i + 2), bump, samples)?;
            pc.pixel = (e.pixel % w, e.pixel / w);
            let (c, r) = (pc.pixel.0 as f64, pc.pixel.1 as f64);
            if !pc.samples.iter().all(|&p| in_square(p, c - 1.0, r - 1.0, c + 2.0, r + 2.0, 0.0)) {
                return Err(ReconstructError::Containment { pixel: pc.pixel });
            }
            // Strict check: the carrying pixel, or the union with the pixel sharing the chord.
            let (mut x0, mut y0, mut x1, mut y1) = (c, r, c + 1.0, r + 1.0);
            if let Some(o) = e.also {
                let (oc, or) = ((o % w) as f64, (o / w) as f64);
                x0 = x0.min(oc);
                y0 = y0.min(or);
                x1 = x1.max(oc + 1.0);
                y1 = y1.max(or + 1.0);
            }
            let miss = pc.samples.iter().filter(|&&p| !in_square(p, x0, y0, x1, y1, CONTAIN_TOL)).count();
            Ok((pc, miss))
        });
        let mut comp = Vec::with_capacity(n);
        for p in pieces {
            let (pc, miss) = p?;
            misses += miss;
            comp.push(pc);
        }
        debug_assert_eq!(comp.last().unwrap().b, comp[0].a);
        components.push(Component { pieces: comp });
    }
    let curve = ReconstructedCurve { grid: img.grid, samples_per_pixel: samples, components, strict_containment_misses: misses };
    if let Some((la, sa, lb, sb)) = geom::first_crossing(&curve.polylines()) {
        let spp = samples - 1;
        let pa = curve.components[la].pieces[sa / spp].pixel;
        let pb = curve.components[lb].pieces[sb / spp].pixel;
        return Err(ReconstructError::Crossing { a: pa, b: pb });
    }
    Ok(curve)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructOptions {
    pub bump: Bump,
    pub samples: usize,
    pub exec: Exec,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { bump: Bump::Paper, samples: DEFAULT_SAMPLES, exec: Exec::default() }
    }
}

/// Full pipeline: place, prune, link, blend and check.
pub fn reconstruct(img: &TrinaryImage, opts: &ReconstructOptions) -> Result<(AuxGraph, ReconstructedCurve), ReconstructError> {
    let pts = prune_aux_points(place_aux_points(img), img)?;
    let g = build_aux_graph(pts, img)?;
    let curve = assemble(&g, img, &opts.bump, opts.samples, opts.exec)?;
    Ok((g, curve))
}

/// Even-odd membership of a grid-coordinate point in the region bounded by the curve.
pub fn region_contains(curve: &ReconstructedCurve, p: Point) -> Result<bool, GeomError> {
    let mut inside = false;
    for pl in curve.polylines() {
        if geom::winding_number(p, &pl)? % 2 != 0 {
            inside = !inside;
        }
    }
    Ok(inside)
}

/// True iff every Black pixel centre is inside and every White one outside.
pub fn separates(img: &TrinaryImage, curve: &ReconstructedCurve) -> bool {
    let w = img.width();
    img.cells().iter().enumerate().all(|(i, &cell)| {
        let p = Point::new((i % w) as f64 + 0.5, (i / w) as f64 + 0.5);
        match cell {
            Cell::Grey => true,
            Cell::Black => region_contains(curve, p) == Ok(true),
            Cell::White => region_contains(curve, p) == Ok(false),
        }
    })
}
