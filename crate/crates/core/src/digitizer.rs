//! Grid placement, grey-level digitization and trinary quantization.
//!
//! Pixels are indexed `(col, row)` with row 0 at the bottom; storage is
//! row-major from the lower-left corner.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::par::{self, Exec};
use crate::shapes::{PixelSquare, Shape};

/// Coverage tolerance separating Black/White from Grey.
pub const EPS_COV: f64 = 1e-9;

/// Corner clearance relative to the pixel side.
pub const CORNER_EPS_REL: f64 = 1e-6;

pub const DEFAULT_JITTER_ATTEMPTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DigitizeError {
    #[error("resolution violated: d·√2 = {} is not below declared_r = {r}", d * std::f64::consts::SQRT_2)]
    Resolution { d: f64, r: f64 },
    #[error("no corner-clear grid found after {attempts} attempts")]
    CornerDegeneracy { attempts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("image parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Lower-left corner of pixel (0, 0).
    pub origin: Point,
    pub d: f64,
    pub width: usize,
    pub height: usize,
}

impl Grid {
    pub fn new(origin: Point, d: f64, width: usize, height: usize) -> Result<Self, DigitizeError> {
        if !(d > 0.0 && d.is_finite()) || !origin.is_finite() {
            return Err(DigitizeError::InvalidParameter(format!("bad grid geometry d={d}")));
        }
        if width == 0 || height == 0 {
            return Err(DigitizeError::InvalidParameter("grid must be at least 1×1".into()));
        }
        Ok(Grid { origin, d, width, height })
    }

    pub fn pixel_square(&self, col: usize, row: usize) -> PixelSquare {
        PixelSquare::new(self.corner(col, row), self.d)
    }

    /// World position of the grid vertex `(i, j)`, `0 ≤ i ≤ width`.
    pub fn corner(&self, i: usize, j: usize) -> Point {
        self.origin + Point::new(i as f64 * self.d, j as f64 * self.d)
    }

    pub fn to_world(&self, p: Point) -> Point {
        self.origin + p * self.d
    }

    pub fn to_grid(&self, p: Point) -> Point {
        (p - self.origin) * (1.0 / self.d)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Enforces the resolution convention d·√2 < r.
pub fn check_resolution(s: &Shape, d: f64) -> Result<(), DigitizeError> {
    if !(d > 0.0) {
        return Err(DigitizeError::InvalidParameter(format!("d must be positive, got {d}")));
    }
    if d * std::f64::consts::SQRT_2 >= s.declared_r() {
        return Err(DigitizeError::Resolution { d, r: s.declared_r() });
    }
    Ok(())
}

/// Grid covering the shape's bounding box plus `margin` pixels on every side.
pub fn fit_grid(s: &Shape, d: f64, margin: usize) -> Result<Grid, DigitizeError> {
    check_resolution(s, d)?;
    let (lo, hi) = s.bounding_box();
    let m = margin as f64 * d;
    let origin = Point::new(lo.x - m, lo.y - m);
    let w = ((hi.x - lo.x) / d).ceil().max(1.0) as usize + 2 * margin;
    let h = ((hi.y - lo.y) / d).ceil().max(1.0) as usize + 2 * margin;
    Grid::new(origin, d, w, h)
}

/// Radical-inverse (van der Corput) sequence in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Sub-pixel offset number `k` (≥ 1) of the jitter sequence for `seed`.
pub fn halton_offset(seed: u64, k: u64) -> (f64, f64) {
    let i = seed.wrapping_mul(7919).wrapping_add(k) % (1 << 40);
    (radical_inverse(i, 2), radical_inverse(i, 3))
}

/// True iff every grid vertex is farther than `eps` from the boundary.
pub fn corners_clear(s: &Shape, g: &Grid, eps: f64) -> bool {
    (0..=g.height).all(|j| (0..=g.width).all(|i| s.signed_distance(g.corner(i, j)).abs() > eps))
}

/// Returns `g` if no grid vertex lies within `eps` of the boundary, otherwise
/// the first grid of the seeded Halton jitter sequence that passes. Jittered
/// grids shift the origin down-left by a sub-pixel offset and grow by one
/// pixel in each direction so the covered area never shrinks.
pub fn ensure_corner_clear(s: &Shape, g: &Grid, eps: f64, max_attempts: usize, seed: u64) -> Result<Grid, DigitizeError> {
    if corners_clear(s, g, eps) {
        return Ok(*g);
    }
    for k in 1..=max_attempts as u64 {
        let (u, v) = halton_offset(seed, k);
        let cand = Grid {
            origin: g.origin - Point::new(u * g.d, v * g.d),
            width: g.width + 1,
            height: g.height + 1,
            ..*g
        };
        if corners_clear(s, &cand, eps) {
            return Ok(cand);
        }
    }
    Err(DigitizeError::CornerDegeneracy { attempts: max_attempts })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cell {
    Black,
    Grey,
    White,
}

impl Cell {
    pub fn to_char(self) -> char {
        match self {
            Cell::Black => 'B',
            Cell::Grey => 'G',
            Cell::White => 'W',
        }
    }

    pub fn from_char(c: char) -> Option<Cell> {
        match c {
            'B' => Some(Cell::Black),
            'G' => Some(Cell::Grey),
            'W' => Some(Cell::White),
            _ => None,
        }
    }

    /// Black↔White swap; Grey is fixed.
    pub fn swapped(self) -> Cell {
        match self {
            Cell::Black => Cell::White,
            Cell::Grey => Cell::Grey,
            Cell::White => Cell::Black,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Cell {
        match i {
            0 => Cell::Black,
            1 => Cell::Grey,
            _ => Cell::White,
        }
    }
}

/// Monotone intensity map φ with φ(0) = 0 and φ(1) = 1.
#[derive(Clone, Debug, PartialEq)]
pub enum IntensityMap {
    Identity,
    Square,
    Sqrt,
    /// Values at `n` equally spaced nodes of [0, 1], linearly interpolated.
    Tabulated(Vec<f64>),
}

impl IntensityMap {
    pub fn tabulated(values: Vec<f64>) -> Result<Self, DigitizeError> {
        let n = values.len();
        if n < 2 {
            return Err(DigitizeError::InvalidParameter("tabulated map needs at least two nodes".into()));
        }
        if values[0] != 0.0 || values[n - 1] != 1.0 {
            return Err(DigitizeError::InvalidParameter("tabulated map must start at 0 and end at 1".into()));
        }
        if values[1..n - 1].iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(DigitizeError::InvalidParameter("interior tabulated values must lie in (0, 1)".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(DigitizeError::InvalidParameter("tabulated map must be monotone".into()));
        }
        Ok(IntensityMap::Tabulated(values))
    }

    pub fn apply(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            IntensityMap::Identity => x,
            IntensityMap::Square => x * x,
            IntensityMap::Sqrt => x.sqrt(),
            IntensityMap::Tabulated(v) => {
                let n = v.len() - 1;
                let pos = x * n as f64;
                let i = (pos.floor() as usize).min(n - 1);
                let f = pos - i as f64;
                v[i] + (v[i + 1] - v[i]) * f
            }
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(IntensityMap::Identity),
            "square" => Some(IntensityMap::Square),
            "sqrt" => Some(IntensityMap::Sqrt),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreyImage {
    pub grid: Grid,
    pub intensities: Vec<f64>,
}

impl GreyImage {
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.intensities[row * self.grid.width + col]
    }

    /// Plain PGM (P2), maxval 65535, top row first, with the grid geometry
    /// in comment lines.
    pub fn to_pgm(&self) -> String {
        let g = &self.grid;
        let mut s = String::new();
        let _ = writeln!(s, "P2");
        let _ = writeln!(s, "# d {}", g.d);
        let _ = writeln!(s, "# origin {} {}", g.origin.x, g.origin.y);
        let _ = writeln!(s, "{} {}", g.width, g.height);
        let _ = writeln!(s, "65535");
        for row in (0..g.height).rev() {
            let line: Vec<String> = (0..g.width)
                .map(|col| ((self.get(col, row) * 65535.0 + 0.5).floor() as u32).to_string())
                .collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrinaryImage {
    pub grid: Grid,
    cells: Vec<Cell>,
}

impl TrinaryImage {
    pub fn new(grid: Grid, cells: Vec<Cell>) -> Result<Self, DigitizeError> {
        if cells.len() != grid.len() {
            return Err(DigitizeError::InvalidParameter(format!(
                "expected {} cells, got {}",
                grid.len(),
                cells.len()
            )));
        }
        Ok(TrinaryImage { grid, cells })
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn get(&self, col: usize, row: usize) -> Cell {
        self.cells[row * self.grid.width + col]
    }

    /// Cell lookup that treats everything outside the frame as White.
    pub fn get_padded(&self, col: isize, row: isize) -> Cell {
        if col < 0 || row < 0 || col >= self.grid.width as isize || row >= self.grid.height as isize {
            Cell::White
        } else {
            self.get(col as usize, row as usize)
        }
    }

    pub fn set(&mut self, col: usize, row: usize, c: Cell) {
        let w = self.grid.width;
        self.cells[row * w + col] = c;
    }

    pub fn count(&self, c: Cell) -> usize {
        self.cells.iter().filter(|&&x| x == c).count()
    }

    /// Parses the TRINARY text format.
    pub fn parse(text: &str) -> Result<Self, DigitizeError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| DigitizeError::Parse("empty input".into()))?;
        let f: Vec<&str> = header.split(' ').collect();
        if f.len() != 6 || f[0] != "TRINARY" {
            return Err(DigitizeError::Parse(format!("bad header {header:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| DigitizeError::Parse(format!("bad number {s:?}")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| DigitizeError::Parse(format!("bad size {s:?}")));
        let grid = Grid::new(Point::new(num(f[4])?, num(f[5])?), num(f[3])?, int(f[1])?, int(f[2])?)
            .map_err(|e| DigitizeError::Parse(e.to_string()))?;
        let mut cells = vec![Cell::White; grid.len()];
        for k in 0..grid.height {
            let line = lines
                .next()
                .ok_or_else(|| DigitizeError::Parse(format!("expected {} rows, got {k}", grid.height)))?;
            if line.chars().count() != grid.width {
                return Err(DigitizeError::Parse(format!("row {k} has wrong length")));
            }
            let row = grid.height - 1 - k;
            for (col, ch) in line.chars().enumerate() {
                cells[row * grid.width + col] =
                    Cell::from_char(ch).ok_or_else(|| DigitizeError::Parse(format!("bad cell {ch:?}")))?;
            }
        }
        if lines.any(|l| !l.is_empty()) {
            return Err(DigitizeError::Parse("trailing content after image rows".into()));
        }
        TrinaryImage::new(grid, cells)
    }
}

impl fmt::Display for TrinaryImage {
    /// The TRINARY text format: header, then rows top first, newline-terminated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.grid;
        writeln!(f, "TRINARY {} {} {} {} {}", g.width, g.height, g.d, g.origin.x, g.origin.y)?;
        for row in (0..g.height).rev() {
            let line: String = (0..g.width).map(|col| self.get(col, row).to_char()).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn check_grid(s: &Shape, g: &Grid) -> Result<(), DigitizeError> {
    check_resolution(s, g.d)?;
    if !corners_clear(s, g, CORNER_EPS_REL * g.d) {
        return Err(DigitizeError::CornerDegeneracy { attempts: 0 });
    }
    Ok(())
}

pub fn coverage_map(s: &Shape, g: &Grid, exec: Exec) -> Vec<f64> {
    par::map_range(exec, g.len(), |i| {
        s.coverage(&g.pixel_square(i % g.width, i / g.width), EPS_COV * g.d * g.d)
    })
}

pub fn digitize_grey_with(s: &Shape, g: &Grid, m: &IntensityMap, exec: Exec) -> Result<GreyImage, DigitizeError> {
    check_grid(s, g)?;
    let intensities = coverage_map(s, g, exec).into_iter().map(|c| m.apply(c)).collect();
    Ok(GreyImage { grid: *g, intensities })
}

pub fn digitize_grey(s: &Shape, g: &Grid, m: &IntensityMap) -> Result<GreyImage, DigitizeError> {
    digitize_grey_with(s, g, m, Exec::default())
}

/// Trinary quantization of an intensity under map `m`. A pixel is Black or
/// White only when its coverage is within `EPS_COV` of 1 or 0; since φ fixes
/// 0 and 1 and maps (0, 1) into (0, 1) this is decided on coverage directly.
pub fn classify_coverage(c: f64) -> Cell {
    if c >= 1.0 - EPS_COV {
        Cell::Black
    } else if c <= EPS_COV {
        Cell::White
    } else {
        Cell::Grey
    }
}

pub fn digitize_trinary_with(s: &Shape, g: &Grid, exec: Exec) -> Result<TrinaryImage, DigitizeError> {
    check_grid(s, g)?;
    let cells = coverage_map(s, g, exec).into_iter().map(classify_coverage).collect();
    TrinaryImage::new(*g, cells)
}

pub fn digitize_trinary(s: &Shape, g: &Grid) -> Result<TrinaryImage, DigitizeError> {
    digitize_trinary_with(s, g, Exec::default())
}

/// Quantizes a grey image whose intensities came from a known map. Used to
/// check that the trinary image does not depend on the map.
pub fn quantize(img: &GreyImage, m: &IntensityMap) -> TrinaryImage {
    let lo = m.apply(EPS_COV);
    let hi = m.apply(1.0 - EPS_COV);
    let cells = img
        .intensities
        .iter()
        .map(|&v| {
            if v >= hi {
                Cell::Black
            } else if v <= lo {
                Cell::White
            } else {
                Cell::Grey
            }
        })
        .collect();
    TrinaryImage { grid: img.grid, cells }
}

/// Indices `(col, row)` of the Black pixels.
pub fn black_pixels(img: &TrinaryImage) -> Vec<(usize, usize)> {
    let w = img.width();
    img.cells
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == Cell::Black)
        .map(|(i, _)| (i % w, i / w))
        .collect()
}

/// Fits a grid, then clears pixel corners off the boundary.
pub fn prepare_grid(s: &Shape, d: f64, margin: usize, seed: u64) -> Result<Grid, DigitizeError> {
    let g = fit_grid(s, d, margin)?;
    ensure_corner_clear(s, &g, CORNER_EPS_REL * d, DEFAULT_JITTER_ATTEMPTS, seed)
}
