use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use regurec::digitizer::TrinaryImage;
use regurec::reconstruct::ReconstructedCurve;
use tempfile::TempDir;

const DISK: &str = "family=disk\ncenter=0.3,-0.2\nradius=3\ndeclared_r=3\n";
const ANNULUS: &str = "family=annulus\ncenter=0.1,0.2\nouter=4.75\ninner=1.75\ndeclared_r=1.5\n";

fn regurec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regurec"))
        .args(args)
        .current_dir(dir)
        .env_remove("REGUREC_SEED")
        .output()
        .expect("spawn regurec")
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("disk.txt"), DISK).unwrap();
    fs::write(dir.path().join("annulus.txt"), ANNULUS).unwrap();
    dir
}

fn digitize(dir: &Path, shape: &str, d: &str, out: &str) {
    let o = regurec(dir, &["digitize", shape, "--d", d, "-o", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn digitize_header_and_round_trip() {
    let dir = setup();
    digitize(dir.path(), "disk.txt", "1", "a.tri");
    let text = fs::read_to_string(dir.path().join("a.tri")).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
    assert_eq!(header[0], "TRINARY");
    assert_eq!(header[3], "1");
    let img = TrinaryImage::parse(&text).unwrap();
    assert_eq!(img.to_string(), text);
    assert_eq!(text.lines().count(), img.height() + 1);
}

#[test]
fn digitize_is_deterministic() {
    let dir = setup();
    digitize(dir.path(), "annulus.txt", "0.5", "a.tri");
    digitize(dir.path(), "annulus.txt", "0.5", "b.tri");
    assert_eq!(fs::read(dir.path().join("a.tri")).unwrap(), fs::read(dir.path().join("b.tri")).unwrap());
}

#[test]
fn digitize_writes_pgm() {
    let dir = setup();
    let o = regurec(dir.path(), &["digitize", "disk.txt", "--d", "1", "--pgm", "a.pgm", "--intensity", "square"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("TRINARY "));
    assert!(fs::read_to_string(dir.path().join("a.pgm")).unwrap().starts_with("P2"));
}

#[test]
fn exit_codes() {
    let dir = setup();
    let o = regurec(dir.path(), &["digitize", "disk.txt", "--d", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution"));
    assert_eq!(regurec(dir.path(), &["digitize", "missing.txt", "--d", "1"]).status.code(), Some(1));
    fs::write(dir.path().join("bad.txt"), "family=disk\nradius=1\n").unwrap();
    assert_eq!(regurec(dir.path(), &["digitize", "bad.txt", "--d", "0.5"]).status.code(), Some(1));
}

#[test]
fn enumerate_4x4_is_stable() {
    let dir = setup();
    let a = regurec(dir.path(), &["enumerate", "4x4"]);
    let b = regurec(dir.path(), &["enumerate", "4x4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# regurec catalogue 4x4 rules sha256:"));
    assert_eq!(lines.count(), 33);
}

#[test]
fn enumerate_2x2_matches_golden() {
    let dir = setup();
    let o = regurec(dir.path(), &["enumerate", "2x2", "-o", "c2.txt"]);
    assert!(o.status.success());
    let golden = include_str!("../../core/tests/golden/catalogue_2x2.txt");
    assert_eq!(fs::read_to_string(dir.path().join("c2.txt")).unwrap(), golden);
}

#[test]
fn reconstruct_disk_with_svg() {
    let dir = setup();
    digitize(dir.path(), "disk.txt", "1", "a.tri");
    let o = regurec(dir.path(), &["reconstruct", "a.tri", "-o", "c.json", "--svg", "c.svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = ReconstructedCurve::from_json(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(curve.components.len(), 1);
    let svg = fs::read_to_string(dir.path().join("c.svg")).unwrap();
    assert!(svg.starts_with("<svg ") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<path ").count(), 1);
}

#[test]
fn annulus_svg_has_two_paths() {
    let dir = setup();
    digitize(dir.path(), "annulus.txt", "0.5", "a.tri");
    let o = regurec(dir.path(), &["reconstruct", "a.tri", "-o", "c.json", "--svg", "c.svg", "--bump", "smoothstep"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("c.svg")).unwrap().matches("<path ").count(), 2);
}

#[test]
fn corrupted_image_is_rejected() {
    let dir = setup();
    digitize(dir.path(), "disk.txt", "1", "a.tri");
    let text = fs::read_to_string(dir.path().join("a.tri")).unwrap();
    // Turn the first grey pixel next to a black one white.
    let mut img = TrinaryImage::parse(&text).unwrap();
    let (w, h) = (img.width(), img.height());
    let target = (0..h)
        .flat_map(|r| (0..w).map(move |c| (c, r)))
        .find(|&(c, r)| img.get(c, r).to_char() == 'G' && c + 1 < w && img.get(c + 1, r).to_char() == 'B')
        .unwrap();
    img.set(target.0, target.1, regurec::digitizer::Cell::White);
    fs::write(dir.path().join("bad.tri"), img.to_string()).unwrap();

    let o = regurec(dir.path(), &["validate", "bad.tri"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).contains("violates"));
    assert_eq!(regurec(dir.path(), &["reconstruct", "bad.tri"]).status.code(), Some(4));
    let forced = regurec(dir.path(), &["reconstruct", "bad.tri", "--force"]).status.code();
    assert_ne!(forced, Some(4));
    assert!(regurec(dir.path(), &["validate", "a.tri"]).status.success());
}

#[test]
fn evaluate_report() {
    let dir = setup();
    digitize(dir.path(), "disk.txt", "1", "a.tri");
    let o = regurec(dir.path(), &["evaluate", "disk.txt", "a.tri"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["bound_ratio"].as_f64().unwrap() < 1.0);
    assert_eq!(v["components_curve"], 1);
    assert_eq!(regurec(dir.path(), &["evaluate", "disk.txt", "a.tri", "--spacing", "0.2"]).status.code(), Some(1));
}

#[test]
fn suite_reports() {
    let dir = setup();
    fs::write(dir.path().join("empty.cfg"), "# nothing\n").unwrap();
    let o = regurec(dir.path(), &["suite", "empty.cfg", "-o", "r.jsonl"]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("r.jsonl")).unwrap(), "");

    let cfg = format!("name=disk\nd=0.5,3\n{DISK}---\nname=ring\nd_factor=0.7\noffsets=1\n{ANNULUS}");
    fs::write(dir.path().join("s.cfg"), cfg).unwrap();
    let o = regurec(dir.path(), &["suite", "s.cfg", "-o", "r.jsonl"]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<serde_json::Value> = fs::read_to_string(dir.path().join("r.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    let codes: Vec<i64> = lines.iter().map(|l| l["exit_code"].as_i64().unwrap()).collect();
    assert_eq!(codes, [0, 2, 0, 0]);
    assert_eq!(lines[2]["variant"], 0);
    assert_eq!(lines[3]["variant"], 1);
}
