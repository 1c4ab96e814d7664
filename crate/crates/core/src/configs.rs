//! Legal pixel-window configurations of trinary images of r-regular sets.
//!
//! Catalogues are derived, not transcribed: every colouring of a window is
//! generated, windows whose smaller sub-windows are illegal are dropped, and
//! the survivors are filtered by the window rules in [`rules`]. Classes are
//! taken up to the 16-element group of rotations, reflections and the
//! black↔white swap.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::digitizer::{Cell, TrinaryImage};
use crate::par::{self, Exec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid window: {0}")]
    InvalidInput(String),
    #[error("no catalogue for {0}×{0} windows")]
    UnknownSize(usize),
}

/// Rectangular colour window, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Cell>,
}

impl Window {
    pub fn new(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self, ConfigError> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(ConfigError::InvalidInput(format!("{rows}×{cols} window with {} cells", cells.len())));
        }
        Ok(Window { rows, cols, cells })
    }

    /// Square window from a row-major `B`/`G`/`W` string (`/` separators allowed).
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let cells: Vec<Cell> = s
            .chars()
            .filter(|&c| c != '/')
            .map(|c| Cell::from_char(c).ok_or_else(|| ConfigError::InvalidInput(format!("bad cell {c:?}"))))
            .collect::<Result<_, _>>()?;
        let k = (cells.len() as f64).sqrt().round() as usize;
        if k * k != cells.len() {
            return Err(ConfigError::InvalidInput(format!("{s:?} is not a square window")));
        }
        Window::new(k, k, cells)
    }

    pub fn get(&self, r: usize, c: usize) -> Cell {
        self.cells[r * self.cols + c]
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            write!(f, "{}", c.to_char())?;
        }
        Ok(())
    }
}

/// A canonical representative together with the size of its orbit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigClass {
    pub canonical: Vec<Cell>,
    pub size: usize,
    pub orbit_size: usize,
}

impl ConfigClass {
    pub fn window(&self) -> Window {
        Window { rows: self.size, cols: self.size, cells: self.canonical.clone() }
    }
}

impl fmt::Display for ConfigClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.window().fmt(f)
    }
}

/// Index maps of the 8 symmetries of a k×k square: `image[i] = w[map[i]]`.
fn dihedral_maps(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(8);
    let mut cur: Vec<usize> = (0..k * k).collect();
    for _ in 0..4 {
        let transposed: Vec<usize> = (0..k * k).map(|i| cur[(i % k) * k + i / k]).collect();
        out.push(cur.clone());
        out.push(transposed);
        // Rotate a quarter turn.
        cur = (0..k * k).map(|i| cur[(i % k) * k + (k - 1 - i / k)]).collect();
    }
    out
}

fn maps_for(k: usize) -> &'static [Vec<usize>] {
    static MAPS: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    &MAPS.get_or_init(|| (0..=4).map(dihedral_maps).collect())[k]
}

fn swap_idx(v: u8) -> u8 {
    2 - v
}

/// All distinct images of a k×k colouring (as colour indices) under the group.
fn orbit_codes(w: &[u8], k: usize) -> BTreeSet<Vec<u8>> {
    let mut s = BTreeSet::new();
    for m in maps_for(k) {
        let img: Vec<u8> = m.iter().map(|&i| w[i]).collect();
        s.insert(img.iter().map(|&v| swap_idx(v)).collect());
        s.insert(img);
    }
    s
}

fn canonical_codes(w: &[u8], k: usize) -> Vec<u8> {
    let mut best: Option<Vec<u8>> = None;
    for m in maps_for(k) {
        for swap in [false, true] {
            let img: Vec<u8> = m.iter().map(|&i| if swap { swap_idx(w[i]) } else { w[i] }).collect();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.expect("group is non-empty")
}

fn to_codes(cells: &[Cell]) -> Vec<u8> {
    cells.iter().map(|c| c.index()).collect()
}

fn from_codes(codes: &[u8]) -> Vec<Cell> {
    codes.iter().map(|&i| Cell::from_index(i)).collect()
}

/// Lexicographic minimum (B < G < W, row-major) over the 16 symmetry images.
pub fn canonicalize(w: &Window) -> Result<ConfigClass, ConfigError> {
    if w.rows != w.cols || w.rows > 4 {
        return Err(ConfigError::InvalidInput(format!(
            "canonical forms need a square window of side at most 4, got {}×{}",
            w.rows, w.cols
        )));
    }
    let codes = to_codes(&w.cells);
    Ok(ConfigClass {
        canonical: from_codes(&canonical_codes(&codes, w.rows)),
        size: w.rows,
        orbit_size: orbit_codes(&codes, w.rows).len(),
    })
}

/// One cell of a rule pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pat {
    Is(Cell),
    Any,
    /// Named cell whose colour the conclusion constrains.
    Label(u8),
}

type Conclusion = fn(&[Cell; 26]) -> bool;

#[derive(Clone, Debug)]
struct Pattern {
    rows: &'static [&'static str],
    swap: bool,
    conclusion: Option<(&'static str, Conclusion)>,
    /// Symmetry images, each flagged with whether colours were swapped.
    images: Vec<(Vec<Vec<Pat>>, bool)>,
}

fn parse_pattern(rows: &[&str]) -> Vec<Vec<Pat>> {
    rows.iter()
        .map(|r| {
            r.chars()
                .map(|c| match c {
                    '.' => Pat::Any,
                    'a'..='z' => Pat::Label(c as u8 - b'a'),
                    _ => Pat::Is(Cell::from_char(c).expect("pattern literal")),
                })
                .collect()
        })
        .collect()
}

fn pattern_images(p: &[Vec<Pat>], swap: bool) -> Vec<(Vec<Vec<Pat>>, bool)> {
    let rot = |a: &Vec<Vec<Pat>>| -> Vec<Vec<Pat>> {
        let (h, w) = (a.len(), a[0].len());
        (0..w).map(|i| (0..h).map(|j| a[j][w - 1 - i]).collect()).collect()
    };
    let transpose = |a: &Vec<Vec<Pat>>| -> Vec<Vec<Pat>> {
        let (h, w) = (a.len(), a[0].len());
        (0..w).map(|i| (0..h).map(|j| a[j][i]).collect()).collect()
    };
    let swapped = |a: &Vec<Vec<Pat>>| -> Vec<Vec<Pat>> {
        a.iter()
            .map(|r| {
                r.iter()
                    .map(|&c| match c {
                        Pat::Is(x) => Pat::Is(x.swapped()),
                        other => other,
                    })
                    .collect()
            })
            .collect()
    };
    let mut out: Vec<(Vec<Vec<Pat>>, bool)> = Vec::new();
    let mut cur = p.to_vec();
    for _ in 0..4 {
        for img in [cur.clone(), transpose(&cur)] {
            if swap {
                out.push((swapped(&img), true));
            }
            out.push((img, false));
        }
        cur = rot(&cur);
    }
    out.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
    out.dedup();
    out
}

impl Pattern {
    fn new(rows: &'static [&'static str], swap: bool, conclusion: Option<(&'static str, Conclusion)>) -> Self {
        let images = pattern_images(&parse_pattern(rows), swap);
        Pattern { rows, swap, conclusion, images }
    }

    /// Whether some placement of some image contradicts the pattern. A
    /// placement may stick out of the window as long as every premise cell
    /// (a fixed colour) is inside; labelled cells outside the window are
    /// unknown and the placement only counts if no colouring of them
    /// satisfies the conclusion.
    fn violated(&self, w: &Window) -> bool {
        let (hh, ww) = (w.rows as isize, w.cols as isize);
        for (img, swapped) in &self.images {
            let (h, wd) = (img.len() as isize, img[0].len() as isize);
            for i0 in (1 - h)..hh {
                'place: for j0 in (1 - wd)..ww {
                    let mut labels: [Option<Option<Cell>>; 26] = [None; 26];
                    for (i, row) in img.iter().enumerate() {
                        for (j, &p) in row.iter().enumerate() {
                            let (ii, jj) = (i0 + i as isize, j0 + j as isize);
                            let inside = ii >= 0 && ii < hh && jj >= 0 && jj < ww;
                            let here = || w.get(ii as usize, jj as usize);
                            match p {
                                Pat::Any => {}
                                Pat::Is(c) => {
                                    if !inside || here() != c {
                                        continue 'place;
                                    }
                                }
                                Pat::Label(l) => labels[l as usize] = Some(inside.then(here)),
                            }
                        }
                    }
                    match self.conclusion {
                        None => return true,
                        Some((_, concl)) => {
                            if !satisfiable(&labels, *swapped, concl) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// Whether some completion of the unknown labels satisfies the conclusion.
/// For colour-swapped images the conclusion is read in swapped colours.
fn satisfiable(labels: &[Option<Option<Cell>>; 26], swapped: bool, concl: Conclusion) -> bool {
    let unknown: Vec<usize> = (0..26).filter(|&i| matches!(labels[i], Some(None))).collect();
    let mut vals = [Cell::Grey; 26];
    for i in 0..26 {
        if let Some(Some(c)) = labels[i] {
            vals[i] = if swapped { c.swapped() } else { c };
        }
    }
    let combos = 3usize.pow(unknown.len() as u32);
    (0..combos).any(|mut code| {
        let mut v = vals;
        for &u in &unknown {
            v[u] = Cell::from_index((code % 3) as u8);
            code /= 3;
        }
        concl(&v)
    })
}

/// Which enumeration stage applies a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Both the 2×2 base filter and the 3×3 filter.
    Base,
    Window3,
    Window4,
}

pub struct Rule {
    pub id: &'static str,
    pub stage: Stage,
    pub summary: &'static str,
    patterns: Vec<Pattern>,
    predicate: Option<(&'static str, fn(&Window) -> bool)>,
}

impl Rule {
    pub fn violated(&self, w: &Window) -> bool {
        self.patterns.iter().any(|p| p.violated(w)) || self.predicate.is_some_and(|(_, f)| f(w))
    }

    fn describe(&self) -> String {
        let mut s = format!("{}|{:?}", self.id, self.stage);
        for p in &self.patterns {
            s += &format!("|{}|swap={}|{}", p.rows.join("/"), p.swap, p.conclusion.map_or("impossible", |c| c.0));
        }
        if let Some((text, _)) = self.predicate {
            s += &format!("|predicate:{text}");
        }
        s
    }
}

const B: Cell = Cell::Black;
const W: Cell = Cell::White;

fn opposite(x: Cell, y: Cell) -> bool {
    (x == B && y == W) || (x == W && y == B)
}

/// Colour of the grid vertex between rows `i-1, i` and columns `j-1, j`
/// of a window, read off any non-grey pixel touching it.
fn vertex_colour(w: &Window, i: usize, j: usize) -> Option<Cell> {
    let mut found = None;
    for a in [i.wrapping_sub(1), i] {
        for b in [j.wrapping_sub(1), j] {
            if a < w.rows && b < w.cols && w.get(a, b) != Cell::Grey {
                found = Some(w.get(a, b));
            }
        }
    }
    found
}

/// The outer corners of the centre 2×2 of a 4×4 window alternate Black and
/// White, so the boundary would have to cross all four edges of the block.
fn alternating_block_corners(w: &Window) -> bool {
    if w.rows != 4 || w.cols != 4 {
        return false;
    }
    let corners = [vertex_colour(w, 1, 1), vertex_colour(w, 1, 3), vertex_colour(w, 3, 3), vertex_colour(w, 3, 1)];
    match corners {
        [Some(tl), Some(tr), Some(br), Some(bl)] => tl == br && tr == bl && opposite(tl, tr),
        _ => false,
    }
}

fn build_rules() -> Vec<Rule> {
    let pat = Pattern::new;
    vec![
        Rule {
            id: "R1",
            stage: Stage::Base,
            summary: "no Black pixel shares an edge or a corner with a White pixel",
            patterns: vec![pat(&["BW"], true, None), pat(&["B.", ".W"], true, None)],
            predicate: None,
        },
        Rule {
            id: "R4b",
            stage: Stage::Base,
            summary: "Black, Grey over x, Black (2×2): x is Black",
            patterns: vec![pat(&["BG", "aB"], true, Some(("a=B", |v| v[0] == B)))],
            predicate: None,
        },
        Rule {
            id: "R2",
            stage: Stage::Window3,
            summary: "no 3×3 block is entirely Grey",
            patterns: vec![pat(&["GGG", "GGG", "GGG"], false, None)],
            predicate: None,
        },
        Rule {
            id: "R3",
            stage: Stage::Window3,
            summary: "a Grey pixel with four Grey edge-neighbours has a diagonally opposed Black/White pair",
            patterns: vec![pat(
                &["aGb", "GGG", "cGd"],
                false,
                Some(("{a,d}={B,W} or {b,c}={B,W}", |v| opposite(v[0], v[3]) || opposite(v[1], v[2]))),
            )],
            predicate: None,
        },
        Rule {
            id: "R4a",
            stage: Stage::Window3,
            summary: "Black, Grey in one row and Black two columns over in the next: the cells between are Black",
            patterns: vec![pat(&["BG.", "abB"], true, Some(("a=B and b=B", |v| v[0] == B && v[1] == B)))],
            predicate: None,
        },
        Rule {
            id: "R4c",
            stage: Stage::Window3,
            summary: "Grey between diagonally opposite Blacks: one side of the diagonal is all Black",
            patterns: vec![pat(
                &["Bab", "cGd", "efB"],
                true,
                Some(("a,b,d all B or c,e,f all B", |v| {
                    (v[0] == B && v[1] == B && v[3] == B) || (v[2] == B && v[4] == B && v[5] == B)
                })),
            )],
            predicate: None,
        },
        Rule {
            id: "R5",
            stage: Stage::Window3,
            summary: "Black, Grey, Black over a Grey: the cell above is Black and the one below the Grey is White",
            patterns: vec![pat(
                &[".x.", "BGB", ".G.", ".y."],
                true,
                Some(("x=B and y=W", |v| v[(b'x' - b'a') as usize] == B && v[(b'y' - b'a') as usize] == W)),
            )],
            predicate: None,
        },
        Rule {
            id: "R7",
            stage: Stage::Window3,
            summary: "Black and White at the ends of a Grey column flanked by Grey cannot occur",
            patterns: vec![pat(&["BG", "GG", "WG"], false, None)],
            predicate: None,
        },
        Rule {
            id: "R8",
            stage: Stage::Window3,
            summary: "eight Grey cells around a White, and a Grey pixel enclosed by Black, cannot occur",
            patterns: vec![pat(&["GGG", "GGG", "GWG"], true, None), pat(&["BBB", "BGB", "BBB"], true, None)],
            predicate: None,
        },
        Rule {
            id: "R6",
            stage: Stage::Window4,
            summary: "the cells abutting the middle of a 2×3 Grey block are one Black and one White",
            patterns: vec![pat(&[".a.", "GGG", "GGG", ".b."], true, Some(("{a,b}={B,W}", |v| opposite(v[0], v[1]))))],
            predicate: None,
        },
        Rule {
            id: "R9",
            stage: Stage::Window4,
            summary: "Grey staircase between a Black and a White corner cannot occur",
            patterns: vec![pat(&["BBGG", "BGGG", "GGGW", "GGWW"], true, None)],
            predicate: None,
        },
        Rule {
            id: "R10",
            stage: Stage::Window4,
            summary: "Black and White at the ends of a Grey column of length four flanked by Grey cannot occur",
            patterns: vec![pat(&["BG", "GG", "GG", "WG"], false, None)],
            predicate: None,
        },
        Rule {
            id: "R11",
            stage: Stage::Window4,
            summary: "the outer corners of a Grey 2×2 centre cannot alternate Black and White",
            patterns: vec![],
            predicate: Some(("outer corners of the centre 2x2 alternate B/W", alternating_block_corners)),
        },
        Rule {
            id: "R12",
            stage: Stage::Window4,
            summary: "a Grey 2×2 enclosed by Black cannot occur",
            patterns: vec![pat(&["BBBB", "BGGB", "BGGB", "BBBB"], true, None)],
            predicate: None,
        },
    ]
}

/// The encoded rule set.
pub fn rules() -> &'static [Rule] {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    RULES.get_or_init(build_rules)
}

fn rules_for(stages: &[Stage]) -> Vec<&'static Rule> {
    rules().iter().filter(|r| stages.contains(&r.stage)).collect()
}

/// SHA-256 over a textual dump of every rule pattern and conclusion.
pub fn rule_set_hash() -> String {
    let mut h = Sha256::new();
    for r in rules() {
        h.update(r.describe().as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn first_violation(w: &Window, rules: &[&'static Rule]) -> Option<&'static str> {
    rules.iter().find(|r| r.violated(w)).map(|r| r.id)
}

fn decode(mut code: usize, n: usize) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let v = (code % 3) as u8;
            code /= 3;
            v
        })
        .collect()
}

fn encode(codes: &[u8]) -> usize {
    codes.iter().rev().fold(0, |acc, &v| acc * 3 + v as usize)
}

fn window_of(codes: &[u8], k: usize) -> Window {
    Window { rows: k, cols: k, cells: from_codes(codes) }
}

fn class_of(codes: &[u8], k: usize) -> ConfigClass {
    ConfigClass {
        canonical: from_codes(codes),
        size: k,
        orbit_size: orbit_codes(codes, k).len(),
    }
}

/// Keeps the canonical classes that no rule in `rules` flags.
fn filter(cands: &BTreeSet<Vec<u8>>, k: usize, rules: &[&'static Rule], exec: Exec) -> Vec<ConfigClass> {
    let v: Vec<&Vec<u8>> = cands.iter().collect();
    let keep = par::map_slice(exec, &v, |c| first_violation(&window_of(c, k), rules).is_none());
    v.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| class_of(c, k)).collect()
}

/// Table over all base-3 codes of k×k windows: true for members of `classes`' orbits.
fn membership_table(classes: &[ConfigClass], k: usize) -> Vec<bool> {
    let mut t = vec![false; 3usize.pow((k * k) as u32)];
    for c in classes {
        for m in orbit_codes(&to_codes(&c.canonical), k) {
            t[encode(&m)] = true;
        }
    }
    t
}

pub fn enumerate_2x2() -> Vec<ConfigClass> {
    let cands: BTreeSet<Vec<u8>> = (0..81).map(|c| canonical_codes(&decode(c, 4), 2)).collect();
    filter(&cands, 2, &rules_for(&[Stage::Base]), Exec::Sequential)
}

/// Canonical 3×3 classes whose four 2×2 sub-windows are all legal.
pub fn candidates_3x3() -> BTreeSet<Vec<u8>> {
    let legal2 = membership_table(&enumerate_2x2(), 2);
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(9) {
        let w = decode(code, 9);
        let ok = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().all(|&(i, j)| {
            let sub = [w[i * 3 + j], w[i * 3 + j + 1], w[(i + 1) * 3 + j], w[(i + 1) * 3 + j + 1]];
            legal2[encode(&sub)]
        });
        if ok {
            out.insert(canonical_codes(&w, 3));
        }
    }
    out
}

pub fn enumerate_3x3() -> Vec<ConfigClass> {
    enumerate_3x3_with(Exec::default())
}

pub fn enumerate_3x3_with(exec: Exec) -> Vec<ConfigClass> {
    filter(&candidates_3x3(), 3, &rules_for(&[Stage::Base, Stage::Window3]), exec)
}

/// Filters the 3×3 candidates with an arbitrary subset of rules.
pub fn enumerate_3x3_with_rules(ids: &[&str]) -> Vec<ConfigClass> {
    let rs: Vec<&'static Rule> = rules().iter().filter(|r| ids.contains(&r.id)).collect();
    filter(&candidates_3x3(), 3, &rs, Exec::Sequential)
}

/// Canonical 4×4 classes with an all-Grey centre whose four 3×3 sub-windows are legal.
pub fn candidates_4x4_grey_center(exec: Exec) -> BTreeSet<Vec<u8>> {
    let legal3 = membership_table(catalogue(3).classes(), 3);
    let outer: Vec<usize> = (0..16).filter(|&i| !matches!(i, 5 | 6 | 9 | 10)).collect();
    let chunk = 3usize.pow(6);
    let parts = par::map_range(exec, chunk, |hi| {
        let mut found = BTreeSet::new();
        for lo in 0..chunk {
            let ring = decode(hi * chunk + lo, 12);
            let mut w = [1u8; 16];
            for (&pos, &v) in outer.iter().zip(&ring) {
                w[pos] = v;
            }
            let ok = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().all(|&(i, j)| {
                let sub: Vec<u8> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| w[(i + a) * 4 + j + b]).collect();
                legal3[encode(&sub)]
            });
            if ok {
                found.insert(canonical_codes(&w, 4));
            }
        }
        found
    });
    parts.into_iter().flatten().collect()
}

pub fn enumerate_4x4_grey_center() -> Vec<ConfigClass> {
    enumerate_4x4_grey_center_with(Exec::default())
}

pub fn enumerate_4x4_grey_center_with(exec: Exec) -> Vec<ConfigClass> {
    filter(&candidates_4x4_grey_center(exec), 4, &rules_for(&[Stage::Window4]), exec)
}

/// A frozen set of legal classes of one window size.
pub struct Catalogue {
    size: usize,
    classes: Vec<ConfigClass>,
    members: HashSet<usize>,
}

impl Catalogue {
    pub fn new(size: usize, mut classes: Vec<ConfigClass>) -> Self {
        classes.sort();
        let mut members = HashSet::new();
        for c in &classes {
            for m in orbit_codes(&to_codes(&c.canonical), size) {
                members.insert(encode(&m));
            }
        }
        Catalogue { size, classes, members }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn classes(&self) -> &[ConfigClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Membership of a raw (not necessarily canonical) window.
    pub fn contains(&self, w: &Window) -> bool {
        w.rows == self.size && w.cols == self.size && self.members.contains(&encode(&to_codes(&w.cells)))
    }

    /// Header with the rule-set hash, then `<cells> <orbit size>` per class,
    /// sorted lexicographically.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = self.classes.iter().map(|c| format!("{} {}", c, c.orbit_size)).collect();
        lines.sort();
        let mut s = format!("# regurec catalogue {0}x{0} rules sha256:{1}\n", self.size, rule_set_hash());
        for l in lines {
            s.push_str(&l);
            s.push('\n');
        }
        s
    }
}

/// Lazily enumerated catalogue for window side 2, 3 or 4 (4 = grey centre).
pub fn catalogue(size: usize) -> &'static Catalogue {
    static C2: OnceLock<Catalogue> = OnceLock::new();
    static C3: OnceLock<Catalogue> = OnceLock::new();
    static C4: OnceLock<Catalogue> = OnceLock::new();
    match size {
        2 => C2.get_or_init(|| Catalogue::new(2, enumerate_2x2())),
        3 => C3.get_or_init(|| Catalogue::new(3, enumerate_3x3())),
        4 => C4.get_or_init(|| Catalogue::new(4, enumerate_4x4_grey_center())),
        _ => panic!("no catalogue for {size}×{size} windows"),
    }
}

pub fn try_catalogue(size: usize) -> Result<&'static Catalogue, ConfigError> {
    match size {
        2..=4 => Ok(catalogue(size)),
        _ => Err(ConfigError::UnknownSize(size)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Lower-left pixel of the window; negative when it overlaps the padding.
    pub col: isize,
    pub row: isize,
    pub size: usize,
    pub class: String,
    /// First rule that flags the window, or `"catalogue"` if only the
    /// sub-window check rejects it.
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{0}x{0} window at ({1}, {2}) class {3} violates {4}",
            self.size, self.col, self.row, self.class, self.rule
        )
    }
}

/// Window of side `k` with lower-left pixel `(c0, r0)`, top row first,
/// White outside the image.
pub fn image_window(img: &TrinaryImage, c0: isize, r0: isize, k: usize) -> Window {
    let mut cells = Vec::with_capacity(k * k);
    for i in 0..k as isize {
        for j in 0..k as isize {
            cells.push(img.get_padded(c0 + j, r0 + k as isize - 1 - i));
        }
    }
    Window { rows: k, cols: k, cells }
}

/// Every 3×3 window must be in the 3×3 catalogue and every 4×4 window with
/// an all-Grey centre in the 4×4 catalogue. The frame is padded with White.
pub fn validate_image(img: &TrinaryImage) -> Vec<Violation> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let c3 = catalogue(3);
    let c4 = catalogue(4);
    let r3 = rules_for(&[Stage::Base, Stage::Window3]);
    let r4 = rules_for(&[Stage::Window4]);
    let mut out = Vec::new();
    for r0 in -2..h {
        for c0 in -2..w {
            let win = image_window(img, c0, r0, 3);
            if !c3.contains(&win) {
                out.push(Violation {
                    col: c0,
                    row: r0,
                    size: 3,
                    class: canonicalize(&win).expect("square").to_string(),
                    rule: first_violation(&win, &r3).unwrap_or("catalogue"),
                });
            }
        }
    }
    for r0 in -1..h - 2 {
        for c0 in -1..w - 2 {
            let centre_grey = [(1, 1), (2, 1), (1, 2), (2, 2)]
                .iter()
                .all(|&(dc, dr)| img.get_padded(c0 + dc, r0 + dr) == Cell::Grey);
            if !centre_grey {
                continue;
            }
            let win = image_window(img, c0, r0, 4);
            if !c4.contains(&win) {
                out.push(Violation {
                    col: c0,
                    row: r0,
                    size: 4,
                    class: canonicalize(&win).expect("square").to_string(),
                    rule: first_violation(&win, &r4).unwrap_or("catalogue"),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win(s: &str) -> Window {
        Window::parse(s).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let g = canonicalize(&win("GGGGGGGGG")).unwrap();
        assert_eq!(g.to_string(), "GGGGGGGGG");
        assert_eq!(g.orbit_size, 1);
        assert_eq!(canonicalize(&win("BBBBBBBBB")).unwrap(), canonicalize(&win("WWWWWWWWW")).unwrap());
        let c = canonicalize(&win("GGGGGGGGB")).unwrap();
        assert_eq!(c.to_string(), "BGGGGGGGG");
        assert_eq!(c.orbit_size, 8);
        assert!(canonicalize(&Window::new(2, 3, vec![Cell::Grey; 6]).unwrap()).is_err());
    }

    #[test]
    fn base_catalogue() {
        let two: Vec<String> = enumerate_2x2().iter().map(|c| c.to_string()).collect();
        assert_eq!(two, ["BBBB", "BBBG", "BBGG", "BGGG", "GGGG"]);
        assert!(!catalogue(2).contains(&win("BWGG")));
        // Black on a diagonal with Grey between forces the fourth cell Black.
        assert!(!catalogue(2).contains(&win("BGGB")));
    }

    #[test]
    fn window3_examples() {
        let c = catalogue(3);
        assert!(!c.contains(&win("GGGGGGGGG")));
        assert!(c.contains(&win("BBBBBBBBB")));
        // Grey centre with four Grey edge-neighbours and no opposed B/W diagonal pair.
        assert!(!c.contains(&win("BGBGGGBGB")));
        assert!(rules().iter().find(|r| r.id == "R3").unwrap().violated(&win("BGBGGGBGB")));
    }

    #[test]
    fn window4_count() {
        assert_eq!(catalogue(4).len(), 33);
        assert!(!catalogue(4).contains(&win("GGGGGGGGGGGGGGGG")));
        assert!(!catalogue(4).contains(&win("BBBBBGGBBGGBBBBB")));
    }

    #[test]
    fn validate_flags_adjacency() {
        use crate::digitizer::Grid;
        use crate::geom::Point;
        let g = Grid::new(Point::default(), 1.0, 4, 4).unwrap();
        let mut img = TrinaryImage::new(g, vec![Cell::White; 16]).unwrap();
        img.set(1, 1, Cell::Black);
        let v = validate_image(&img);
        assert!(!v.is_empty());
        assert!(v.iter().any(|x| x.rule == "R1" || x.rule == "R8"));
        let mut grey = TrinaryImage::new(Grid::new(Point::default(), 1.0, 5, 5).unwrap(), vec![Cell::White; 25]).unwrap();
        for r in 1..4 {
            for c in 1..4 {
                grey.set(c, r, Cell::Grey);
            }
        }
        assert!(validate_image(&grey).iter().any(|x| x.rule == "R2"));
    }
}
