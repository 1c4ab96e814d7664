//! Closed-form families of r-regular planar shapes.
//!
//! Each family carries a sufficient inequality for `declared_r`-regularity,
//! checked once at construction. Coverage fractions are computed exactly by
//! splitting the shape into disjoint disk∩rectangle and rectangle pieces.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Point, Polyline};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("regularity violated: {0}")]
    Regularity(String),
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({x}, {y}) is not within declared_r of the boundary, projection undefined")]
    ProjectionUndefined { x: f64, y: f64 },
    #[error("shape spec line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Disk { center: Point, radius: f64 },
    DisjointDisks { centers: Vec<Point>, radii: Vec<f64> },
    /// Minkowski sum of the axis-aligned `width × height` core rectangle
    /// centred at `center` with a disk of radius `corner_radius`.
    RoundedRectangle { center: Point, width: f64, height: f64, corner_radius: f64 },
    Annulus { center: Point, outer: f64, inner: f64 },
}

/// Axis-aligned pixel square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelSquare {
    pub lower_left: Point,
    pub side: f64,
}

impl PixelSquare {
    pub fn new(lower_left: Point, side: f64) -> Self {
        PixelSquare { lower_left, side }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let p = self.lower_left;
        (p.x, p.x + self.side, p.y, p.y + self.side)
    }
}

/// A validated shape. Construct with [`Shape::new`] or [`validate_regularity`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    family: Family,
    declared_r: f64,
}

/// Checks the family inequality that guarantees `declared_r`-regularity.
pub fn validate_regularity(family: Family, declared_r: f64) -> Result<Shape, ShapeError> {
    let finite = |v: f64, name: &str| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(ShapeError::InvalidParameter(format!("{name} must be finite")))
        }
    };
    let pt = |p: Point, name: &str| {
        if p.is_finite() {
            Ok(())
        } else {
            Err(ShapeError::InvalidParameter(format!("{name} must be finite")))
        }
    };
    finite(declared_r, "declared_r")?;
    if declared_r <= 0.0 {
        return Err(ShapeError::InvalidParameter("declared_r must be positive".into()));
    }
    let r = declared_r;
    match &family {
        Family::Disk { center, radius } => {
            pt(*center, "center")?;
            finite(*radius, "radius")?;
            if *radius < r {
                return Err(ShapeError::Regularity(format!("radius {radius} < declared_r {r}")));
            }
        }
        Family::DisjointDisks { centers, radii } => {
            if centers.is_empty() || centers.len() != radii.len() {
                return Err(ShapeError::InvalidParameter(
                    "disjoint_disks needs matching non-empty centers and radii".into(),
                ));
            }
            for (i, (&c, &rad)) in centers.iter().zip(radii).enumerate() {
                pt(c, "center")?;
                finite(rad, "radius")?;
                if rad < r {
                    return Err(ShapeError::Regularity(format!("radius[{i}] = {rad} < declared_r {r}")));
                }
            }
            for i in 0..centers.len() {
                for j in i + 1..centers.len() {
                    let gap = centers[i].dist(centers[j]) - radii[i] - radii[j];
                    if gap < 2.0 * r {
                        return Err(ShapeError::Regularity(format!(
                            "gap between disks {i} and {j} is {gap} < 2·declared_r = {}",
                            2.0 * r
                        )));
                    }
                }
            }
        }
        Family::RoundedRectangle { center, width, height, corner_radius } => {
            pt(*center, "center")?;
            for (v, n) in [(*width, "width"), (*height, "height"), (*corner_radius, "corner_radius")] {
                finite(v, n)?;
            }
            if *width < 0.0 || *height < 0.0 {
                return Err(ShapeError::Regularity(format!("core size {width}×{height} has a negative side")));
            }
            if *corner_radius < r {
                return Err(ShapeError::Regularity(format!("corner_radius {corner_radius} < declared_r {r}")));
            }
        }
        Family::Annulus { center, outer, inner } => {
            pt(*center, "center")?;
            finite(*outer, "outer")?;
            finite(*inner, "inner")?;
            if *inner < r {
                return Err(ShapeError::Regularity(format!("inner radius {inner} < declared_r {r}")));
            }
            if outer - inner < 2.0 * r {
                return Err(ShapeError::Regularity(format!(
                    "annulus width {} < 2·declared_r = {}",
                    outer - inner,
                    2.0 * r
                )));
            }
        }
    }
    Ok(Shape { family, declared_r })
}

impl Shape {
    pub fn new(family: Family, declared_r: f64) -> Result<Self, ShapeError> {
        validate_regularity(family, declared_r)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn declared_r(&self) -> f64 {
        self.declared_r
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Disk { .. } => "disk",
            Family::DisjointDisks { .. } => "disjoint_disks",
            Family::RoundedRectangle { .. } => "rounded_rectangle",
            Family::Annulus { .. } => "annulus",
        }
    }

    /// Signed Euclidean distance to the boundary, negative inside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        match &self.family {
            Family::Disk { center, radius } => p.dist(*center) - radius,
            Family::DisjointDisks { centers, radii } => centers
                .iter()
                .zip(radii)
                .map(|(c, r)| p.dist(*c) - r)
                .fold(f64::INFINITY, f64::min),
            Family::RoundedRectangle { center, width, height, corner_radius } => {
                let qx = (p.x - center.x).abs() - width / 2.0;
                let qy = (p.y - center.y).abs() - height / 2.0;
                let outside = qx.max(0.0).hypot(qy.max(0.0));
                let inside = qx.max(qy).min(0.0);
                outside + inside - corner_radius
            }
            Family::Annulus { center, outer, inner } => {
                let rho = p.dist(*center);
                (rho - outer).max(inner - rho)
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.signed_distance(p) <= 0.0
    }

    /// Number of connected components of the boundary.
    pub fn boundary_components(&self) -> usize {
        match &self.family {
            Family::Disk { .. } | Family::RoundedRectangle { .. } => 1,
            Family::DisjointDisks { centers, .. } => centers.len(),
            Family::Annulus { .. } => 2,
        }
    }

    /// Number of connected components of the shape itself.
    pub fn components(&self) -> usize {
        match &self.family {
            Family::DisjointDisks { centers, .. } => centers.len(),
            _ => 1,
        }
    }

    /// Axis-aligned bounding box `(lower_left, upper_right)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let disk_box = |c: Point, r: f64| (Point::new(c.x - r, c.y - r), Point::new(c.x + r, c.y + r));
        match &self.family {
            Family::Disk { center, radius } => disk_box(*center, *radius),
            Family::Annulus { center, outer, .. } => disk_box(*center, *outer),
            Family::DisjointDisks { centers, radii } => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for (&c, &r) in centers.iter().zip(radii) {
                    let (a, b) = disk_box(c, r);
                    lo = Point::new(lo.x.min(a.x), lo.y.min(a.y));
                    hi = Point::new(hi.x.max(b.x), hi.y.max(b.y));
                }
                (lo, hi)
            }
            Family::RoundedRectangle { center, width, height, corner_radius } => {
                let hx = width / 2.0 + corner_radius;
                let hy = height / 2.0 + corner_radius;
                (Point::new(center.x - hx, center.y - hy), Point::new(center.x + hx, center.y + hy))
            }
        }
    }

    /// Area of the shape inside the square divided by the square's area.
    /// Exact up to floating-point rounding; `tol` is accepted for interface
    /// parity with [`coverage_quadtree`] and is not needed here.
    pub fn coverage(&self, c: &PixelSquare, _tol: f64) -> f64 {
        let (x0, x1, y0, y1) = c.bounds();
        let area = match &self.family {
            Family::Disk { center, radius } => disk_rect_area(*center, *radius, x0, x1, y0, y1),
            Family::DisjointDisks { centers, radii } => centers
                .iter()
                .zip(radii)
                .map(|(&ctr, &r)| disk_rect_area(ctr, r, x0, x1, y0, y1))
                .sum(),
            Family::Annulus { center, outer, inner } => {
                disk_rect_area(*center, *outer, x0, x1, y0, y1) - disk_rect_area(*center, *inner, x0, x1, y0, y1)
            }
            Family::RoundedRectangle { center, width, height, corner_radius } => {
                let (cx0, cx1) = (center.x - width / 2.0, center.x + width / 2.0);
                let (cy0, cy1) = (center.y - height / 2.0, center.y + height / 2.0);
                let rho = *corner_radius;
                let mut a = rect_rect_area((cx0 - rho, cx1 + rho, cy0, cy1), (x0, x1, y0, y1));
                a += rect_rect_area((cx0, cx1, cy1, cy1 + rho), (x0, x1, y0, y1));
                a += rect_rect_area((cx0, cx1, cy0 - rho, cy0), (x0, x1, y0, y1));
                // Quarter disks in the four corner quadrants.
                for (qx, qy, sx, sy) in [(cx1, cy1, 1.0, 1.0), (cx0, cy1, -1.0, 1.0), (cx0, cy0, -1.0, -1.0), (cx1, cy0, 1.0, -1.0)] {
                    let (rx0, rx1) = if sx > 0.0 { (x0.max(qx), x1) } else { (x0, x1.min(qx)) };
                    let (ry0, ry1) = if sy > 0.0 { (y0.max(qy), y1) } else { (y0, y1.min(qy)) };
                    if rx1 > rx0 && ry1 > ry0 {
                        a += disk_rect_area(Point::new(qx, qy), rho, rx0, rx1, ry0, ry1);
                    }
                }
                a
            }
        };
        (area / (c.side * c.side)).clamp(0.0, 1.0)
    }

    /// Closed polylines, one per boundary component, with consecutive
    /// samples at most `spacing` apart in arc length. Outer boundaries run
    /// counter-clockwise and holes clockwise, so the shape lies on the left.
    pub fn boundary_sample(&self, spacing: f64) -> Result<Vec<Polyline>, ShapeError> {
        if !(spacing > 0.0) {
            return Err(ShapeError::InvalidParameter("spacing must be positive".into()));
        }
        let circle = |c: Point, r: f64, ccw: bool| {
            let n = ((TAU * r / spacing).ceil() as usize).max(3);
            let pts = (0..n)
                .map(|i| {
                    let th = TAU * i as f64 / n as f64;
                    let th = if ccw { th } else { -th };
                    c + Point::new(th.cos(), th.sin()) * r
                })
                .collect();
            Polyline::new(pts, true).expect("non-empty")
        };
        Ok(match &self.family {
            Family::Disk { center, radius } => vec![circle(*center, *radius, true)],
            Family::DisjointDisks { centers, radii } => {
                centers.iter().zip(radii).map(|(&c, &r)| circle(c, r, true)).collect()
            }
            Family::Annulus { center, outer, inner } => {
                vec![circle(*center, *outer, true), circle(*center, *inner, false)]
            }
            Family::RoundedRectangle { center, width, height, corner_radius } => {
                let perim = 2.0 * width + 2.0 * height + TAU * corner_radius;
                let n = ((perim / spacing).ceil() as usize).max(4);
                let pts = (0..n)
                    .map(|i| rounded_rect_point(*center, *width, *height, *corner_radius, perim * i as f64 / n as f64))
                    .collect();
                vec![Polyline::new(pts, true).expect("non-empty")]
            }
        })
    }

    /// Unique closest boundary point, defined when `p` is closer than
    /// `declared_r` to the boundary.
    pub fn nearest_boundary_point(&self, p: Point) -> Result<Point, ShapeError> {
        let sd = self.signed_distance(p);
        if !(sd.abs() < self.declared_r) {
            return Err(ShapeError::ProjectionUndefined { x: p.x, y: p.y });
        }
        let radial = |c: Point, r: f64| {
            let v = p - c;
            c + v * (r / v.norm())
        };
        Ok(match &self.family {
            Family::Disk { center, radius } => radial(*center, *radius),
            Family::DisjointDisks { centers, radii } => {
                let (c, r) = centers
                    .iter()
                    .zip(radii)
                    .min_by(|a, b| (p.dist(*a.0) - a.1).abs().total_cmp(&(p.dist(*b.0) - b.1).abs()))
                    .expect("non-empty");
                radial(*c, *r)
            }
            Family::Annulus { center, outer, inner } => {
                let rho = p.dist(*center);
                if (rho - outer).abs() <= (rho - inner).abs() {
                    radial(*center, *outer)
                } else {
                    radial(*center, *inner)
                }
            }
            Family::RoundedRectangle { center, width, height, corner_radius } => {
                // Inside the uniqueness zone p is never inside the core rectangle.
                let q = Point::new(
                    p.x.clamp(center.x - width / 2.0, center.x + width / 2.0),
                    p.y.clamp(center.y - height / 2.0, center.y + height / 2.0),
                );
                radial(q, *corner_radius)
            }
        })
    }

    /// Line-oriented spec text understood by [`parse_shape_spec`].
    pub fn to_spec(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "family={}", self.family_name());
        match &self.family {
            Family::Disk { center, radius } => {
                let _ = writeln!(s, "center={},{}", center.x, center.y);
                let _ = writeln!(s, "radius={radius}");
            }
            Family::DisjointDisks { centers, radii } => {
                let cs: Vec<String> = centers.iter().map(|c| format!("{},{}", c.x, c.y)).collect();
                let rs: Vec<String> = radii.iter().map(|r| r.to_string()).collect();
                let _ = writeln!(s, "centers={}", cs.join(";"));
                let _ = writeln!(s, "radii={}", rs.join(","));
            }
            Family::RoundedRectangle { center, width, height, corner_radius } => {
                let _ = writeln!(s, "center={},{}", center.x, center.y);
                let _ = writeln!(s, "size={width},{height}");
                let _ = writeln!(s, "corner_radius={corner_radius}");
            }
            Family::Annulus { center, outer, inner } => {
                let _ = writeln!(s, "center={},{}", center.x, center.y);
                let _ = writeln!(s, "outer={outer}");
                let _ = writeln!(s, "inner={inner}");
            }
        }
        let _ = writeln!(s, "declared_r={}", self.declared_r);
        s
    }
}

/// Point at arc length `s` along the boundary of a rounded rectangle,
/// starting at the bottom of the right edge and running counter-clockwise.
fn rounded_rect_point(c: Point, w: f64, h: f64, rho: f64, s: f64) -> Point {
    let (hx, hy) = (w / 2.0, h / 2.0);
    let quarter = PI / 2.0 * rho;
    let mut s = s;
    // Edge, then corner, four times: right, top, left, bottom.
    let corners = [(hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy)];
    let edges = [h, w, h, w];
    for k in 0..4 {
        let start_angle = k as f64 * PI / 2.0;
        let dir = Point::new(start_angle.cos(), start_angle.sin());
        let along = dir.perp();
        let (px, py) = corners[(k + 3) % 4];
        let edge_start = c + Point::new(px, py) + dir * rho;
        if s <= edges[k] {
            return edge_start + along * s;
        }
        s -= edges[k];
        if s <= quarter || k == 3 {
            let th = start_angle + s.min(quarter) / rho;
            let (qx, qy) = corners[k];
            return c + Point::new(qx, qy) + Point::new(th.cos(), th.sin()) * rho;
        }
        s -= quarter;
    }
    unreachable!()
}

fn rect_rect_area(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> f64 {
    let w = a.1.min(b.1) - a.0.max(b.0);
    let h = a.3.min(b.3) - a.2.max(b.2);
    if w > 0.0 && h > 0.0 {
        w * h
    } else {
        0.0
    }
}

/// Exact area of the disk `|p − c| ≤ r` inside the rectangle `[x0,x1]×[y0,y1]`.
pub fn disk_rect_area(c: Point, r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (a, b, lo, hi) = (x0 - c.x, x1 - c.x, y0 - c.y, y1 - c.y);
    if b <= a || hi <= lo {
        return 0.0;
    }
    let nx = 0f64.clamp(a, b);
    let ny = 0f64.clamp(lo, hi);
    if nx.hypot(ny) >= r {
        return 0.0;
    }
    let far_x = a.abs().max(b.abs());
    let far_y = lo.abs().max(hi.abs());
    if far_x.hypot(far_y) <= r {
        return (b - a) * (hi - lo);
    }
    let r2 = r * r;
    let h = |x: f64| (r2 - x * x).max(0.0).sqrt();
    // Antiderivative of h.
    let s = |x: f64| 0.5 * (x * h(x) + r2 * (x / r).clamp(-1.0, 1.0).asin());
    let u0 = a.max(-r);
    let u1 = b.min(r);
    let mut cuts = vec![u0, u1];
    for y in [lo, hi] {
        if y.abs() < r {
            let w = (r2 - y * y).sqrt();
            cuts.extend([-w, w]);
        }
    }
    cuts.retain(|&x| x >= u0 && x <= u1);
    cuts.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for win in cuts.windows(2) {
        let (u, v) = (win[0], win[1]);
        if v <= u {
            continue;
        }
        let hm = h(0.5 * (u + v));
        let upper_is_h = hi >= hm;
        let lower_is_h = lo <= -hm;
        let top = if upper_is_h { hm } else { hi };
        let bottom = if lower_is_h { -hm } else { lo };
        if top <= bottom {
            continue;
        }
        let int_h = s(v) - s(u);
        let up = if upper_is_h { int_h } else { hi * (v - u) };
        let down = if lower_is_h { -int_h } else { lo * (v - u) };
        area += up - down;
    }
    area.max(0.0)
}

/// Coverage by adaptive quadtree subdivision using signed-distance interval
/// classification; usable with any shape and independent of the exact path.
/// Cells whose centre lies farther from the boundary than their
/// circumradius are resolved; at `max_depth` ambiguous cells count by the
/// sign at their centre. Refinement stops early once the total area of the
/// still-ambiguous cells is below `tol` (relative to the square's area).
pub fn coverage_quadtree(s: &Shape, c: &PixelSquare, tol: f64, max_depth: u32) -> f64 {
    let total = c.side * c.side;
    let mut level = vec![(c.lower_left, c.side)];
    let mut inside = 0.0;
    for depth in 0..=max_depth {
        let mut ambiguous = Vec::new();
        let mut ambiguous_area = 0.0;
        for (p, side) in level {
            let sd = s.signed_distance(p + Point::new(side / 2.0, side / 2.0));
            let circ = side * std::f64::consts::FRAC_1_SQRT_2;
            if sd <= -circ {
                inside += side * side;
            } else if sd < circ {
                ambiguous_area += side * side;
                ambiguous.push((p, side, sd));
            }
        }
        if ambiguous_area / total <= tol || depth == max_depth {
            inside += ambiguous
                .iter()
                .filter(|(_, _, sd)| *sd <= 0.0)
                .map(|(_, side, _)| side * side)
                .sum::<f64>();
            break;
        }
        level = Vec::with_capacity(ambiguous.len() * 4);
        for (p, side, _) in ambiguous {
            let h = side / 2.0;
            for (dx, dy) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
                level.push((p + Point::new(dx, dy), h));
            }
        }
    }
    (inside / total).clamp(0.0, 1.0)
}

fn parse_f64(v: &str, line: usize) -> Result<f64, ShapeError> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| ShapeError::Parse { line, msg: format!("not a number: {v:?}") })
}

fn parse_point(v: &str, line: usize) -> Result<Point, ShapeError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(ShapeError::Parse { line, msg: format!("expected x,y but got {v:?}") });
    }
    Ok(Point::new(parse_f64(parts[0], line)?, parse_f64(parts[1], line)?))
}

/// Parses the line-oriented shape spec:
///
/// ```text
/// family=annulus
/// center=0,0
/// outer=5
/// inner=2
/// declared_r=1.5
/// ```
///
/// Keys per family: `disk` (center, radius), `disjoint_disks` (centers as
/// `x,y;x,y;…`, radii as `r,r,…`), `rounded_rectangle` (center, size as
/// `w,h`, corner_radius), `annulus` (center, outer, inner). `declared_r` is
/// required. Blank lines and `#` comments are ignored; unknown keys are
/// rejected unless listed in `extra_keys`, in which case they are returned.
pub fn parse_shape_spec_with(text: &str, extra_keys: &[&str]) -> Result<(Shape, Vec<(String, String)>), ShapeError> {
    let mut kv: Vec<(usize, String, String)> = Vec::new();
    let mut extras = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ShapeError::Parse { line: i + 1, msg: format!("expected key=value, got {line:?}") })?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if extra_keys.contains(&k.as_str()) {
            extras.push((k, v));
            continue;
        }
        if kv.iter().any(|(_, kk, _)| *kk == k) {
            return Err(ShapeError::Parse { line: i + 1, msg: format!("duplicate key {k}") });
        }
        kv.push((i + 1, k, v));
    }
    let get = |key: &str| kv.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()));
    let need = |key: &str| get(key).ok_or_else(|| ShapeError::Parse { line: 0, msg: format!("missing key {key}") });
    let (fl, family) = need("family")?;
    let allowed: &[&str] = match family {
        "disk" => &["center", "radius"],
        "disjoint_disks" => &["centers", "radii"],
        "rounded_rectangle" => &["center", "size", "corner_radius"],
        "annulus" => &["center", "outer", "inner"],
        other => return Err(ShapeError::Parse { line: fl, msg: format!("unknown family {other:?}") }),
    };
    for (l, k, _) in &kv {
        if k != "family" && k != "declared_r" && !allowed.contains(&k.as_str()) {
            return Err(ShapeError::Parse { line: *l, msg: format!("unexpected key {k} for family {family}") });
        }
    }
    let num = |key: &str| need(key).and_then(|(l, v)| parse_f64(v, l));
    let point = |key: &str| need(key).and_then(|(l, v)| parse_point(v, l));
    let fam = match family {
        "disk" => Family::Disk { center: point("center")?, radius: num("radius")? },
        "disjoint_disks" => {
            let (lc, cs) = need("centers")?;
            let (lr, rs) = need("radii")?;
            Family::DisjointDisks {
                centers: cs.split(';').map(|c| parse_point(c, lc)).collect::<Result<_, _>>()?,
                radii: rs.split(',').map(|r| parse_f64(r, lr)).collect::<Result<_, _>>()?,
            }
        }
        "rounded_rectangle" => {
            let size = point("size")?;
            Family::RoundedRectangle {
                center: point("center")?,
                width: size.x,
                height: size.y,
                corner_radius: num("corner_radius")?,
            }
        }
        _ => Family::Annulus { center: point("center")?, outer: num("outer")?, inner: num("inner")? },
    };
    Ok((Shape::new(fam, num("declared_r")?)?, extras))
}

pub fn parse_shape_spec(text: &str) -> Result<Shape, ShapeError> {
    parse_shape_spec_with(text, &[]).map(|(s, _)| s)
}
