//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always appear in the output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regurec::configs::{catalogue, validate_image};
use regurec::digitizer::digitize_trinary_with;
use regurec::geom::{circumcurve, hausdorff, spindle_width, vertex_ball_cover, Point, Polyline, COLLINEAR_TOL};
use regurec::metrics::{evaluate, DEFAULT_SPACING_REL};
use regurec::reconstruct::{pixel_curve, reconstruct, sandwich_holds, Bump, ReconstructOptions};
use regurec::suite::{case_grid, default_suite, trinary_invariant, SuiteCase, DEFAULT_MARGIN, DEFAULT_SEED};
use regurec::{par, Exec};

const CRITERION_1_BUDGET: Duration = Duration::from_secs(60);
const CRITERION_3_BUDGET: Duration = Duration::from_secs(30);
const MIN_SUITE_SHAPES: usize = 20;
const MIN_SOUNDNESS_IMAGES: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Everything the suite-level criteria need from one case.
struct CaseResult {
    name: String,
    d: f64,
    hausdorff_sym: f64,
    bound: f64,
    bound_ratio: f64,
    components: (usize, usize),
    separation_ok: bool,
    closed: bool,
    simple: bool,
    degree_ok: bool,
    error: Option<String>,
}

fn run_case(c: &SuiteCase) -> CaseResult {
    let mut res = CaseResult {
        name: format!("{} d={:.4} v{}", c.name, c.d, c.variant),
        d: c.d,
        hausdorff_sym: f64::NAN,
        bound: f64::NAN,
        bound_ratio: f64::NAN,
        components: (0, 0),
        separation_ok: false,
        closed: false,
        simple: false,
        degree_ok: false,
        error: None,
    };
    let mut run = || -> Result<(), String> {
        let g = case_grid(c, DEFAULT_MARGIN, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let img = digitize_trinary_with(&c.shape, &g, Exec::Sequential).map_err(|e| e.to_string())?;
        let opts = ReconstructOptions { exec: Exec::Sequential, ..Default::default() };
        let (graph, curve) = reconstruct(&img, &opts).map_err(|e| e.to_string())?;
        res.degree_ok = graph.neighbours().iter().all(|n| n.len() == 2);
        res.closed = curve.components.iter().all(|comp| {
            let p = &comp.pieces;
            p.last().unwrap().b == p[0].a
                && p.windows(2).all(|w| w[0].b == w[1].a)
                && p.iter().all(|pc| pc.samples[0] == pc.a && *pc.samples.last().unwrap() == pc.b)
        });
        res.simple = curve.polylines().iter().all(|pl| !regurec::geom::self_intersects(pl))
            && regurec::geom::first_crossing(&curve.polylines()).is_none();
        let rep = evaluate(&c.shape, &img, &curve, DEFAULT_SPACING_REL * c.d).map_err(|e| e.to_string())?;
        res.hausdorff_sym = rep.hausdorff_sym;
        res.bound = rep.bound;
        res.bound_ratio = rep.bound_ratio;
        res.components = (rep.components_shape, rep.components_curve);
        res.separation_ok = rep.separation_ok;
        Ok(())
    };
    if let Err(e) = run() {
        res.error = Some(e);
    }
    res
}

fn first_failure(results: &[CaseResult], bad: impl Fn(&CaseResult) -> bool) -> Option<&CaseResult> {
    results.iter().find(|r| r.error.is_some() || bad(r))
}

fn describe(r: &CaseResult) -> String {
    match &r.error {
        Some(e) => format!("{}: {e}", r.name),
        None => format!(
            "{}: hausdorff {:.5} bound {:.5} components {:?} separation {} closed {} simple {} degree {}",
            r.name, r.hausdorff_sym, r.bound, r.components, r.separation_ok, r.closed, r.simple, r.degree_ok
        ),
    }
}

fn criterion_1(results: &[CaseResult], elapsed: Duration, shapes: usize, factors: &[f64]) -> Outcome {
    let fail = first_failure(results, |r| !(r.hausdorff_sym <= r.bound));
    let max_ratio = results.iter().map(|r| r.bound_ratio).fold(0.0, f64::max);
    let max_over_d = results.iter().map(|r| r.hausdorff_sym - r.d).fold(f64::NEG_INFINITY, f64::max);
    let pass = fail.is_none() && elapsed < CRITERION_1_BUDGET && shapes >= MIN_SUITE_SHAPES && factors.len() == 3;
    let mut detail = format!(
        "{} runs over {shapes} shapes, d·√2/r in {factors:?}; max bound_ratio {max_ratio:.4}; max (hausdorff − d) {max_over_d:.4}; {:.1?} (budget {:?})",
        results.len(),
        elapsed,
        CRITERION_1_BUDGET
    );
    if let Some(f) = fail {
        detail += &format!("; first failure {}", describe(f));
    }
    outcome(pass, detail)
}

fn criterion_2() -> Outcome {
    let c = catalogue(4);
    let pass = c.len() == 33;
    let mut detail = format!("{} canonical 4×4 grey-centre classes (expected 33)", c.len());
    if !pass {
        detail += &format!("; classes:\n{}", c.to_text());
    }
    outcome(pass, detail)
}

fn criterion_3(cases: &[SuiteCase]) -> Outcome {
    let t = Instant::now();
    let per = par::map_slice(Exec::default(), cases, |c| -> Result<Vec<String>, String> {
        let g = case_grid(c, DEFAULT_MARGIN, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let img = digitize_trinary_with(&c.shape, &g, Exec::Sequential).map_err(|e| e.to_string())?;
        Ok(validate_image(&img)
            .iter()
            .map(|v| format!("{} d={} variant {} grid {:?}: {v}", c.name, c.d, c.variant, g))
            .collect())
    });
    let elapsed = t.elapsed();
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    for r in per {
        match r {
            Ok(v) => violations.extend(v),
            Err(e) => errors.push(e),
        }
    }
    let jittered = cases.iter().filter(|c| c.variant > 0).count();
    let pass = violations.is_empty() && errors.is_empty() && cases.len() >= MIN_SOUNDNESS_IMAGES && elapsed < CRITERION_3_BUDGET;
    let mut detail = format!(
        "{} images ({jittered} on shifted grids), {} violations, {} errors; {elapsed:.1?} (budget {:?})",
        cases.len(),
        violations.len(),
        errors.len(),
        CRITERION_3_BUDGET
    );
    if let Some(v) = violations.first().or(errors.first()) {
        detail += &format!("; first: {v}");
    }
    outcome(pass, detail)
}

fn criterion_4(results: &[CaseResult]) -> Outcome {
    let fail = first_failure(results, |r| r.components.0 != r.components.1 || !r.closed || !r.simple || !r.degree_ok);
    let mut detail = format!("{} runs: component counts, closure, simplicity and aux-graph degree", results.len());
    if let Some(f) = fail {
        detail += &format!("; first failure {}", describe(f));
    }
    outcome(fail.is_none(), detail)
}

fn criterion_5(results: &[CaseResult]) -> Outcome {
    let fail = first_failure(results, |r| !r.separation_ok);
    let mut detail = format!("{} runs: Black centres inside, White centres outside", results.len());
    if let Some(f) = fail {
        detail += &format!("; first failure {}", describe(f));
    }
    outcome(fail.is_none(), detail)
}

/// Largest height above the chord of the intersection of the two disks of
/// radius r through both chord endpoints, by sampling one disk's boundary.
fn spindle_width_brute(l: f64, r: f64) -> f64 {
    let h = (r * r - l * l / 4.0).sqrt();
    let (c1, c2) = (Point::new(0.0, h), Point::new(0.0, -h));
    let n = 100_000;
    let mut best: f64 = 0.0;
    for k in 0..n {
        let th = std::f64::consts::TAU * k as f64 / n as f64;
        let p = c1 + Point::new(th.cos(), th.sin()) * r;
        if p.dist(c2) <= r {
            best = best.max(p.y.abs());
        }
    }
    best
}

fn dist_to_polyline(p: Point, pl: &Polyline) -> f64 {
    pl.segments().map(|(a, b)| regurec::geom::point_segment_dist(p, a, b)).fold(f64::INFINITY, f64::min)
}

fn densify(pl: &Polyline, step: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in pl.segments() {
        let n = ((a.dist(b) / step).ceil() as usize).max(1);
        out.extend((0..n).map(|k| a.lerp(b, k as f64 / n as f64)));
    }
    out.push(*pl.vertices.last().unwrap());
    out
}

fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut notes = Vec::new();
    let mut pass = true;

    // Spindle width.
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = rng.gen_range(0.1..10.0);
        let l = rng.gen_range(0.0..1.99) * r;
        let w = spindle_width(l, r).expect("L < 2r");
        worst = worst.max((w - spindle_width_brute(l, r)).abs());
    }
    pass &= worst <= 1e-6;
    notes.push(format!("spindle max err {worst:.2e}"));

    // Hausdorff against densely sampled point-to-polyline distances.
    let step = 2e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut poly = || {
            let n = rng.gen_range(2..8);
            let closed = rng.gen_bool(0.5) && n >= 3;
            let v = (0..n).map(|_| Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
            Polyline::new(v, closed).unwrap()
        };
        let (a, b) = (poly(), poly());
        let (ab, ba, sym) = hausdorff(&a, &b).unwrap();
        let bf_ab = densify(&a, step).iter().map(|&p| dist_to_polyline(p, &b)).fold(0.0, f64::max);
        let bf_ba = densify(&b, step).iter().map(|&p| dist_to_polyline(p, &a)).fold(0.0, f64::max);
        worst = worst.max((ab - bf_ab).abs()).max((ba - bf_ba).abs()).max((sym - bf_ab.max(bf_ba)).abs());
    }
    pass &= worst <= 2.0 * step;
    notes.push(format!("hausdorff max err {worst:.2e} (allowed {:.0e})", 2.0 * step));

    // Ball cover against dense centres sampled in the polygon.
    let (mut agree, mut skipped) = (0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(3..9);
        let hull = convex_hull((0..n).map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
        if hull.len() < 3 {
            skipped += 1;
            continue;
        }
        let p = Point::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let r = rng.gen_range(0.2..3.0);
        // Centres: interior convex combinations plus edge points, vertices excluded.
        let mut centres = Vec::new();
        for k in 0..hull.len() {
            let (a, b) = (hull[k], hull[(k + 1) % hull.len()]);
            centres.extend((1..1000).map(|j| a.lerp(b, j as f64 / 1000.0)));
        }
        for _ in 0..500 {
            let w: Vec<f64> = hull.iter().map(|_| rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            centres.push(hull.iter().zip(&w).fold(Point::default(), |acc, (&v, &wi)| acc + v * (wi / s)));
        }
        let far = centres.iter().map(|c| p.dist(*c)).fold(0.0, f64::max);
        if (far - r).abs() < 5e-3 {
            skipped += 1;
            continue;
        }
        if vertex_ball_cover(p, &hull, r).unwrap() == (far <= r) {
            agree += 1;
        } else {
            pass = false;
        }
    }
    notes.push(format!("ball cover {agree} agree, {skipped} ambiguous or degenerate skipped"));
    pass &= skipped < 100;

    // Circumradius against abc / 4K.
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 1000 {
        let mut pt = || Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let (p, q, s) = (pt(), pt(), pt());
        let k = 0.5 * ((q - p).cross(s - p)).abs();
        if k < 0.5 {
            continue;
        }
        done += 1;
        let expect = p.dist(q) * q.dist(s) * s.dist(p) / (4.0 * k);
        let got = circumcurve(p, q, s, COLLINEAR_TOL).unwrap().radius().expect("non-collinear");
        worst = worst.max((got - expect).abs());
    }
    pass &= worst <= 1e-9;
    notes.push(format!("circumradius max err {worst:.2e}"));
    outcome(pass, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples = 33;
    let (mut endpoints, mut sandwich, mut mid_err, mut errors) = (0, 0, 0.0f64, 0);
    for _ in 0..1000 {
        // A chord followed and preceded by turns of at most 60°.
        let a = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let len = rng.gen_range(0.3..1.5);
        let dir = |th: f64| Point::new(th.cos(), th.sin());
        let b = a + dir(heading) * len;
        let t1: f64 = rng.gen_range(-1.0..1.0) * 60f64.to_radians();
        let t2: f64 = rng.gen_range(-1.0..1.0) * 60f64.to_radians();
        let prev = a - dir(heading + t1) * rng.gen_range(0.3..1.5);
        let next = b + dir(heading + t2) * rng.gen_range(0.3..1.5);
        match pixel_curve(a, b, prev, next, &Bump::Paper, samples) {
            Ok((pc, prof)) => {
                if pc.samples[0] == a && pc.samples[samples - 1] == b {
                    endpoints += 1;
                }
                if sandwich_holds(&prof, len) {
                    sandwich += 1;
                }
                let m = samples / 2;
                mid_err = mid_err.max((prof.offset[m] - 0.5 * (prof.offset1[m] + prof.offset2[m])).abs());
            }
            Err(_) => errors += 1,
        }
    }
    let pass = endpoints == 1000 && sandwich == 1000 && mid_err <= 1e-9 && errors == 0;
    outcome(
        pass,
        format!("1000 quadruples: exact endpoints {endpoints}, sandwich {sandwich}, midpoint blend err {mid_err:.2e}, errors {errors}"),
    )
}

fn criterion_8(cases: &[SuiteCase]) -> Outcome {
    let res = par::map_slice(Exec::default(), cases, |c| -> Result<bool, String> {
        let g = case_grid(c, DEFAULT_MARGIN, DEFAULT_SEED).map_err(|e| e.to_string())?;
        trinary_invariant(&c.shape, &g, Exec::Sequential).map_err(|e| e.to_string())
    });
    let bad: Vec<String> = cases
        .iter()
        .zip(&res)
        .filter(|(_, r)| !matches!(r, Ok(true)))
        .map(|(c, r)| format!("{} d={} v{}: {r:?}", c.name, c.d, c.variant))
        .collect();
    let mut detail = format!("{} suite images identical under identity and square intensity maps", cases.len() - bad.len());
    if let Some(b) = bad.first() {
        detail += &format!("; {} differ, first {b}", bad.len());
    }
    outcome(bad.is_empty(), detail)
}

fn main() -> ExitCode {
    let cases = default_suite();
    let mut shapes: Vec<&str> = cases.iter().map(|c| c.name.as_str()).collect();
    shapes.dedup();
    let mut factors: Vec<f64> = cases.iter().filter_map(|c| c.d_factor).collect();
    factors.sort_by(f64::total_cmp);
    factors.dedup();

    let t = Instant::now();
    let results = par::map_slice(Exec::default(), &cases, run_case);
    let elapsed = t.elapsed();

    let outcomes = [
        ("hausdorff bound", criterion_1(&results, elapsed, shapes.len(), &factors)),
        ("catalogue count", criterion_2()),
        ("catalogue soundness", criterion_3(&cases)),
        ("topology", criterion_4(&results)),
        ("separation", criterion_5(&results)),
        ("geometry oracles", criterion_6()),
        ("blend contract", criterion_7()),
        ("trinary invariance", criterion_8(&cases)),
    ];
    let mut all = true;
    for (i, (name, o)) in outcomes.iter().enumerate() {
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
