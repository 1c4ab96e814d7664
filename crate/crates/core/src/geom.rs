//! Planar primitives: points, circle arcs through point triples, spindles,
//! polyline Hausdorff distance, intersection and winding tests.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance on normalized triangle area below which three points
/// are treated as collinear.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Absolute tolerance used by [`hausdorff`].
pub const HAUSDORFF_TOL: f64 = 1e-9;

/// Distance below which a query point counts as lying on a curve.
pub const ON_CURVE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("chord length {chord} is not below 2r = {two_r}")]
    Domain { chord: f64, two_r: f64 },
    #[error("point ({x}, {y}) lies on the curve, membership is ambiguous")]
    AmbiguousMembership { x: f64, y: f64 },
    #[error("arc between ({ax}, {ay}) and ({bx}, {by}) is not a graph over its chord")]
    ArcNotGraph { ax: f64, ay: f64, bx: f64, by: f64 },
}

/// Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Twice the signed area of the triangle (a, b, c); positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Circle through three points, or the segment joining them when they are
/// (numerically) collinear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurvePiece {
    /// Traversed from `start_angle` to `end_angle`; the signed sweep is
    /// positive for counter-clockwise arcs and its magnitude is below 2π.
    Arc {
        center: Point,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    Segment { start: Point, end: Point },
}

impl CurvePiece {
    pub fn radius(&self) -> Option<f64> {
        match self {
            CurvePiece::Arc { radius, .. } => Some(*radius),
            CurvePiece::Segment { .. } => None,
        }
    }

    /// Point at parameter `s ∈ [0, 1]` along the piece.
    pub fn point_at(&self, s: f64) -> Point {
        match *self {
            CurvePiece::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let th = start_angle + (end_angle - start_angle) * s;
                center + Point::new(th.cos(), th.sin()) * radius
            }
            CurvePiece::Segment { start, end } => start.lerp(end, s),
        }
    }
}

/// Arc from `p1` to `p3` through `p2`, or a segment `p1`–`p3` when the
/// triangle's area divided by its longest side squared is below `collinear_tol`.
pub fn circumcurve(p1: Point, p2: Point, p3: Point, collinear_tol: f64) -> Result<CurvePiece, GeomError> {
    if !(p1.is_finite() && p2.is_finite() && p3.is_finite()) {
        return Err(GeomError::InvalidInput("non-finite point".into()));
    }
    if p1 == p2 || p2 == p3 || p1 == p3 {
        return Err(GeomError::InvalidInput("circumcurve needs three distinct points".into()));
    }
    // Work relative to p1 so conditioning does not depend on absolute position.
    let b = p2 - p1;
    let c = p3 - p1;
    let cr = b.cross(c);
    let longest = b.norm().max(c.norm()).max((p3 - p2).norm());
    if (0.5 * cr).abs() / (longest * longest) < collinear_tol {
        return Ok(CurvePiece::Segment { start: p1, end: p3 });
    }
    let bb = b.dot(b);
    let cc = c.dot(c);
    let ux = (c.y * bb - b.y * cc) / (2.0 * cr);
    let uy = (b.x * cc - c.x * bb) / (2.0 * cr);
    let center = p1 + Point::new(ux, uy);
    let radius = Point::new(ux, uy).norm();
    let a1 = (p1 - center).y.atan2((p1 - center).x);
    let a3 = (p3 - center).y.atan2((p3 - center).x);
    let tau = std::f64::consts::TAU;
    let mut sweep = (a3 - a1).rem_euclid(tau);
    if cr < 0.0 {
        sweep -= tau;
    }
    Ok(CurvePiece::Arc {
        center,
        radius,
        start_angle: a1,
        end_angle: a1 + sweep,
    })
}

/// A curve piece restricted to the chord `a`–`b` and written as a height
/// function over that chord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordGraph {
    pub a: Point,
    pub b: Point,
    pub len: f64,
    dir: Point,
    normal: Point,
    shape: GraphShape,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum GraphShape {
    Flat,
    Circle { cu: f64, cv: f64, r2: f64, side: f64 },
}

impl ChordGraph {
    /// `a` and `b` must be consecutive among the three defining points of
    /// `piece` (so the piece passes through both).
    pub fn new(piece: &CurvePiece, a: Point, b: Point) -> Result<Self, GeomError> {
        let len = a.dist(b);
        if len == 0.0 {
            return Err(GeomError::InvalidInput("chord endpoints coincide".into()));
        }
        let dir = (b - a) * (1.0 / len);
        let normal = dir.perp();
        let shape = match *piece {
            CurvePiece::Segment { .. } => GraphShape::Flat,
            CurvePiece::Arc { center, radius, start_angle, end_angle } => {
                let rel = center - a;
                let cu = rel.dot(dir);
                let cv = rel.dot(normal);
                // Pick the side of the chord on which the piece runs between a and b.
                let ang = |p: Point| (p - center).y.atan2((p - center).x);
                let sweep = end_angle - start_angle;
                let along = |p: Point| {
                    let mut s = if sweep >= 0.0 {
                        (ang(p) - start_angle).rem_euclid(std::f64::consts::TAU)
                    } else {
                        (start_angle - ang(p)).rem_euclid(std::f64::consts::TAU)
                    };
                    // The start point may land just below a full turn after rounding.
                    if s > sweep.abs() + 1e-7 {
                        s = 0.0;
                    }
                    s * sweep.signum()
                };
                let mid_angle = start_angle + 0.5 * (along(a) + along(b));
                let mid = center + Point::new(mid_angle.cos(), mid_angle.sin()) * radius;
                let side = if (mid - a).dot(normal) >= 0.0 { 1.0 } else { -1.0 };
                if side * cv > 1e-9 * radius {
                    return Err(GeomError::ArcNotGraph { ax: a.x, ay: a.y, bx: b.x, by: b.y });
                }
                GraphShape::Circle { cu, cv, r2: radius * radius, side }
            }
        };
        Ok(ChordGraph { a, b, len, dir, normal, shape })
    }

    /// Signed height above the chord at arc-length parameter `t ∈ [0, len]`,
    /// positive on the left of `a → b`.
    pub fn offset(&self, t: f64) -> f64 {
        match self.shape {
            GraphShape::Flat => 0.0,
            GraphShape::Circle { cu, cv, r2, side } => {
                let du = t - cu;
                cv + side * (r2 - du * du).max(0.0).sqrt()
            }
        }
    }

    pub fn point(&self, t: f64, offset: f64) -> Point {
        self.a + self.dir * t + self.normal * offset
    }

    pub fn direction(&self) -> Point {
        self.dir
    }

    pub fn normal(&self) -> Point {
        self.normal
    }
}

/// Maximal distance from the chord of a point of the spindle `S(L, r)`.
pub fn spindle_width(chord_len: f64, r: f64) -> Result<f64, GeomError> {
    if !(chord_len >= 0.0) || !(r > 0.0) || chord_len >= 2.0 * r {
        return Err(GeomError::Domain { chord: chord_len, two_r: 2.0 * r });
    }
    let h2 = chord_len * chord_len / 4.0;
    // r − √(r² − h²) rewritten to avoid cancellation for short chords.
    Ok(h2 / (r + (r * r - h2).sqrt()))
}

/// Intersection of all closed r-balls containing a chord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spindle {
    pub a: Point,
    pub b: Point,
    pub r: f64,
}

impl Spindle {
    pub fn new(a: Point, b: Point, r: f64) -> Result<Self, GeomError> {
        let l = a.dist(b);
        if !(r > 0.0) || l >= 2.0 * r {
            return Err(GeomError::Domain { chord: l, two_r: 2.0 * r });
        }
        Ok(Spindle { a, b, r })
    }

    /// Centres of the two r-disks whose boundary circles pass through both
    /// chord endpoints.
    pub fn extreme_centres(&self) -> (Point, Point) {
        let m = self.a.lerp(self.b, 0.5);
        let l = self.a.dist(self.b);
        if l == 0.0 {
            return (m, m);
        }
        let n = (self.b - self.a).perp() * (1.0 / l);
        let h = (self.r * self.r - l * l / 4.0).sqrt();
        (m + n * h, m - n * h)
    }
}

pub fn in_spindle(p: Point, s: &Spindle) -> bool {
    let (c1, c2) = s.extreme_centres();
    let slack = 1e-12 * s.r;
    p.dist(c1) <= s.r + slack && p.dist(c2) <= s.r + slack
}

/// Ordered vertex list; a closed polyline implicitly joins its last vertex
/// back to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    /// A single vertex is accepted and treated as a degenerate segment.
    /// A duplicated terminal vertex of a closed polyline is dropped.
    pub fn new(mut vertices: Vec<Point>, closed: bool) -> Result<Self, GeomError> {
        if vertices.is_empty() {
            return Err(GeomError::InvalidInput("empty polyline".into()));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite polyline vertex".into()));
        }
        if closed && vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Ok(Polyline { vertices, closed })
    }

    pub fn segment_count(&self) -> usize {
        let n = self.vertices.len();
        match (n, self.closed) {
            (1, _) => 1,
            (_, true) => n,
            (_, false) => n - 1,
        }
    }

    pub fn segment(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    pub fn length(&self) -> f64 {
        if self.vertices.len() == 1 {
            return 0.0;
        }
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }
}

/// Distance from `p` to the segment `a`–`b`.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let l2 = ab.dot(ab);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Uniform-grid bucket index over a segment soup.
struct SegmentIndex {
    segs: Vec<(Point, Point)>,
    min: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    fn new(segs: Vec<(Point, Point)>) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut total = 0.0;
        for &(a, b) in &segs {
            lo = Point::new(lo.x.min(a.x).min(b.x), lo.y.min(a.y).min(b.y));
            hi = Point::new(hi.x.max(a.x).max(b.x), hi.y.max(a.y).max(b.y));
            total += a.dist(b);
        }
        let ext = (hi.x - lo.x).max(hi.y - lo.y);
        let n = segs.len().max(1) as f64;
        let mut cell = (total / n).max(ext / n.sqrt().ceil().max(1.0));
        if !(cell > 0.0) {
            cell = 1.0;
        }
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).min(4096);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).min(4096);
        let cell = cell.max((hi.x - lo.x) / nx as f64).max((hi.y - lo.y) / ny as f64);
        let mut idx = SegmentIndex {
            segs,
            min: lo,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for i in 0..idx.segs.len() {
            let (a, b) = idx.segs[i];
            let (x0, y0) = idx.cell_of(Point::new(a.x.min(b.x), a.y.min(b.y)));
            let (x1, y1) = idx.cell_of(Point::new(a.x.max(b.x), a.y.max(b.y)));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    idx.buckets[y * idx.nx + x].push(i as u32);
                }
            }
        }
        idx
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x - self.min.x) / self.cell).floor();
        let cy = ((p.y - self.min.y) / self.cell).floor();
        (
            (cx.max(0.0) as usize).min(self.nx - 1),
            (cy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    /// Distance to the nearest segment and that segment's index.
    fn nearest(&self, p: Point) -> (f64, usize) {
        let (cx, cy) = self.cell_of(p);
        let mut best = (f64::INFINITY, 0usize);
        let max_ring = self.nx.max(self.ny);
        for k in 0..=max_ring {
            let x0 = cx as isize - k as isize;
            let x1 = cx as isize + k as isize;
            let y0 = cy as isize - k as isize;
            let y1 = cy as isize + k as isize;
            for y in y0..=y1 {
                if y < 0 || y >= self.ny as isize {
                    continue;
                }
                let on_edge_row = y == y0 || y == y1;
                let mut x = x0;
                while x <= x1 {
                    if x >= 0 && x < self.nx as isize {
                        for &s in &self.buckets[y as usize * self.nx + x as usize] {
                            let (a, b) = self.segs[s as usize];
                            let d = point_segment_dist(p, a, b);
                            if d < best.0 {
                                best = (d, s as usize);
                            }
                        }
                    }
                    x += if on_edge_row || x == x1 { 1 } else { x1 - x0 };
                }
            }
            if best.0 <= k as f64 * self.cell {
                break;
            }
        }
        best
    }
}

#[derive(PartialEq)]
struct Interval {
    ub: f64,
    p: Point,
    q: Point,
    fp: (f64, usize),
    fq: (f64, usize),
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Interval {
    fn cmp(&self, o: &Self) -> Ordering {
        self.ub.total_cmp(&o.ub)
    }
}

/// Upper bound of the distance to the indexed set over the segment `p`–`q`.
/// Distance to a fixed segment is convex along a line, so the larger endpoint
/// distance to any single candidate segment bounds the whole interval.
fn interval_bound(idx: &SegmentIndex, p: Point, q: Point, fp: (f64, usize), fq: (f64, usize)) -> f64 {
    let lip = 0.5 * (fp.0 + fq.0 + p.dist(q));
    let mut ub = lip;
    for s in [fp.1, fq.1] {
        let (a, b) = idx.segs[s];
        ub = ub.min(point_segment_dist(p, a, b).max(point_segment_dist(q, a, b)));
    }
    ub
}

fn directed(from: &[Polyline], idx: &SegmentIndex, tol: f64) -> f64 {
    let mut lb: f64 = 0.0;
    let mut heap = BinaryHeap::new();
    for pl in from {
        for (p, q) in pl.segments() {
            let fp = idx.nearest(p);
            let fq = idx.nearest(q);
            lb = lb.max(fp.0).max(fq.0);
            let ub = interval_bound(idx, p, q, fp, fq);
            heap.push(Interval { ub, p, q, fp, fq });
        }
    }
    while let Some(iv) = heap.pop() {
        if iv.ub <= lb + tol {
            break;
        }
        let m = iv.p.lerp(iv.q, 0.5);
        let fm = idx.nearest(m);
        lb = lb.max(fm.0);
        for (p, q, fp, fq) in [(iv.p, m, iv.fp, fm), (m, iv.q, fm, iv.fq)] {
            let ub = interval_bound(idx, p, q, fp, fq);
            if ub > lb + tol {
                heap.push(Interval { ub, p, q, fp, fq });
            }
        }
    }
    lb
}

/// Directed and symmetric Hausdorff distances between two sets of polylines,
/// treated as the geometric union of their segments.
pub fn hausdorff_sets(a: &[Polyline], b: &[Polyline]) -> Result<(f64, f64, f64), GeomError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeomError::InvalidInput("hausdorff needs non-empty inputs".into()));
    }
    let ia = SegmentIndex::new(a.iter().flat_map(|p| p.segments()).collect());
    let ib = SegmentIndex::new(b.iter().flat_map(|p| p.segments()).collect());
    let dab = directed(a, &ib, HAUSDORFF_TOL);
    let dba = directed(b, &ia, HAUSDORFF_TOL);
    Ok((dab, dba, dab.max(dba)))
}

pub fn hausdorff(a: &Polyline, b: &Polyline) -> Result<(f64, f64, f64), GeomError> {
    hausdorff_sets(std::slice::from_ref(a), std::slice::from_ref(b))
}

/// True iff `p` is within `r` of every vertex of the convex polygon `poly`,
/// which equals membership in the intersection of all r-balls centred in it.
pub fn vertex_ball_cover(p: Point, poly: &[Point], r: f64) -> Result<bool, GeomError> {
    if poly.is_empty() {
        return Err(GeomError::InvalidInput("empty polygon".into()));
    }
    if !(r > 0.0) {
        return Err(GeomError::InvalidInput(format!("radius must be positive, got {r}")));
    }
    if !is_convex(poly) {
        return Err(GeomError::InvalidInput("polygon is not convex".into()));
    }
    Ok(poly.iter().all(|&v| p.dist(v) <= r))
}

/// Convexity with either orientation; collinear vertices are allowed.
pub fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return true;
    }
    let scale = poly.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut sign = 0.0;
    let mut turning = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let cr = orient(a, b, c);
        if cr.abs() > eps {
            if sign == 0.0 {
                sign = cr.signum();
            } else if cr.signum() != sign {
                return false;
            }
        }
        let u = b - a;
        let v = c - b;
        if u.norm() > 0.0 && v.norm() > 0.0 {
            turning += u.cross(v).atan2(u.dot(v));
        }
    }
    // Rejects star-shaped polygons that wind around twice.
    turning.abs() < std::f64::consts::TAU + 1e-6
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segments intersect (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

/// A crossing between two polylines of a family (possibly the same one):
/// `(polyline, segment, polyline, segment)`.
pub type Crossing = (usize, usize, usize, usize);

/// First intersection between non-adjacent segments of the given polylines.
/// Consecutive segments of one polyline (including the closing pair of a
/// closed polyline) share an endpoint and are skipped.
pub fn first_crossing(lines: &[Polyline]) -> Option<Crossing> {
    let mut owner = Vec::new();
    let mut segs = Vec::new();
    for (li, pl) in lines.iter().enumerate() {
        for si in 0..pl.segment_count() {
            owner.push((li, si));
            segs.push(pl.segment(si));
        }
    }
    let adjacent = |i: usize, j: usize| {
        let (li, si) = owner[i];
        let (lj, sj) = owner[j];
        if li != lj {
            return false;
        }
        let n = lines[li].segment_count();
        let diff = si.abs_diff(sj);
        diff == 0 || diff == 1 || (lines[li].closed && diff == n - 1)
    };
    let idx = SegmentIndex::new(segs);
    let mut stamp = vec![usize::MAX; idx.segs.len()];
    for i in 0..idx.segs.len() {
        let (a, b) = idx.segs[i];
        let (x0, y0) = idx.cell_of(Point::new(a.x.min(b.x), a.y.min(b.y)));
        let (x1, y1) = idx.cell_of(Point::new(a.x.max(b.x), a.y.max(b.y)));
        for y in y0..=y1 {
            for x in x0..=x1 {
                for &j in &idx.buckets[y * idx.nx + x] {
                    let j = j as usize;
                    if j <= i || stamp[j] == i || adjacent(i, j) {
                        continue;
                    }
                    stamp[j] = i;
                    let (c, d) = idx.segs[j];
                    if segments_intersect(a, b, c, d) {
                        let (li, si) = owner[i];
                        let (lj, sj) = owner[j];
                        return Some((li, si, lj, sj));
                    }
                }
            }
        }
    }
    None
}

pub fn self_intersects(a: &Polyline) -> bool {
    first_crossing(std::slice::from_ref(a)).is_some()
}

/// Signed winding number of a closed polyline around `p`.
pub fn winding_number(p: Point, a: &Polyline) -> Result<i32, GeomError> {
    if !a.closed {
        return Err(GeomError::InvalidInput("winding number needs a closed polyline".into()));
    }
    let mut w = 0;
    for (u, v) in a.segments() {
        if point_segment_dist(p, u, v) <= ON_CURVE_TOL {
            return Err(GeomError::AmbiguousMembership { x: p.x, y: p.y });
        }
        if u.y <= p.y {
            if v.y > p.y && orient(u, v, p) > 0.0 {
                w += 1;
            }
        } else if v.y <= p.y && orient(u, v, p) < 0.0 {
            w -= 1;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(off: Point) -> Polyline {
        let v = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        Polyline::new(v.iter().map(|&(x, y)| Point::new(x, y) + off).collect(), true).unwrap()
    }

    #[test]
    fn circumcurve_examples() {
        let arc = circumcurve(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.5), COLLINEAR_TOL).unwrap();
        match arc {
            CurvePiece::Arc { center, radius, .. } => {
                assert!(center.dist(Point::new(0.5, 0.0)) < 1e-15);
                assert!((radius - 0.5).abs() < 1e-15);
            }
            _ => panic!("expected arc"),
        }
        let seg = circumcurve(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0), COLLINEAR_TOL).unwrap();
        assert_eq!(seg, CurvePiece::Segment { start: Point::new(0.0, 0.0), end: Point::new(2.0, 0.0) });
        let r = circumcurve(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.5, 0.5), COLLINEAR_TOL)
            .unwrap()
            .radius()
            .unwrap();
        assert!((r - 1.25f64.sqrt()).abs() < 1e-12);
        assert!(circumcurve(Point::new(0.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0), COLLINEAR_TOL).is_err());
    }

    #[test]
    fn arc_passes_through_middle_point() {
        let (p1, p2, p3) = (Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 0.5));
        let arc = circumcurve(p1, p2, p3, COLLINEAR_TOL).unwrap();
        assert!(arc.point_at(0.0).dist(p1) < 1e-12);
        assert!(arc.point_at(1.0).dist(p3) < 1e-12);
        let hit = (0..=10000).map(|i| arc.point_at(i as f64 / 1e4).dist(p2)).fold(f64::INFINITY, f64::min);
        assert!(hit < 1e-3);
    }

    #[test]
    fn spindle_examples() {
        assert_eq!(spindle_width(0.0, 3.0).unwrap(), 0.0);
        let s2 = 2f64.sqrt();
        assert!((spindle_width(2.0, s2).unwrap() - (s2 - 1.0)).abs() < 1e-15);
        let w = spindle_width(1.0, 65f64.sqrt() / 8.0).unwrap();
        assert!((w - 0.1328).abs() < 5e-5);
        assert!(spindle_width(4.0, 2.0).is_err());

        let s = Spindle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 1.0).unwrap();
        assert!(in_spindle(Point::new(0.5, 0.0), &s));
        assert!(in_spindle(Point::new(1.0, 0.0), &s));
        let w = spindle_width(1.0, 1.0).unwrap();
        assert!(in_spindle(Point::new(0.5, w - 1e-9), &s));
        assert!(!in_spindle(Point::new(0.5, w + 1e-6), &s));
    }

    #[test]
    fn hausdorff_examples() {
        let a = square(Point::default());
        assert_eq!(hausdorff(&a, &a).unwrap(), (0.0, 0.0, 0.0));
        let (_, _, d) = hausdorff(&a, &square(Point::new(0.3, 0.0))).unwrap();
        assert!((d - 0.3).abs() < 1e-9);
        let p = Polyline::new(vec![Point::new(0.0, 0.0)], false).unwrap();
        let s = Polyline::new(vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0)], false).unwrap();
        let (ab, ba, _) = hausdorff(&p, &s).unwrap();
        assert!((ab - 1.0).abs() < 1e-12 && (ba - 2.0).abs() < 1e-12);
        assert!(hausdorff_sets(&[], &[a]).is_err());
    }

    #[test]
    fn hausdorff_finds_interior_maximum() {
        // The farthest point of the long segment from the two short ones is its
        // midpoint, not a vertex.
        let a = Polyline::new(vec![Point::new(0.0, 1.0), Point::new(10.0, 1.0)], false).unwrap();
        let b = Polyline::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], false).unwrap();
        let c = Polyline::new(vec![Point::new(9.0, 0.0), Point::new(10.0, 0.0)], false).unwrap();
        let (ab, _, _) = hausdorff_sets(&[a], &[b, c]).unwrap();
        assert!((ab - 17f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn ball_cover_examples() {
        let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        assert!(vertex_ball_cover(Point::new(0.5, 0.5), &sq, 1.0).unwrap());
        assert!(!vertex_ball_cover(Point::new(2.0, 0.0), &sq, 1.0).unwrap());
        let dart = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 0.3), Point::new(1.0, 2.0)];
        assert!(vertex_ball_cover(Point::new(0.5, 0.5), &dart, 1.0).is_err());
    }

    #[test]
    fn intersection_and_winding() {
        let sq = square(Point::default());
        assert!(!self_intersects(&sq));
        assert_eq!(winding_number(Point::new(0.5, 0.5), &sq).unwrap().abs(), 1);
        assert_eq!(winding_number(Point::new(10.0, 10.0), &sq).unwrap(), 0);
        assert!(winding_number(Point::new(1.0, 0.5), &sq).is_err());
        let eight = Polyline::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            true,
        )
        .unwrap();
        assert!(self_intersects(&eight));
    }
}
