use proptest::prelude::*;

use regurec::configs::{
    candidates_3x3, canonicalize, catalogue, enumerate_3x3, enumerate_3x3_with_rules, rules, Stage, Window,
};
use regurec::digitizer::Cell;

fn window(k: usize) -> impl Strategy<Value = Window> {
    prop::collection::vec(0u8..3, k * k).prop_map(move |v| Window::new(k, k, v.into_iter().map(Cell::from_index).collect()).unwrap())
}

/// Independent implementation of the 16 group elements.
fn apply(w: &Window, g: usize) -> Window {
    let k = w.rows;
    let mut cells = vec![Cell::Grey; k * k];
    for r in 0..k {
        for c in 0..k {
            let (mut rr, mut cc) = (r, c);
            for _ in 0..(g % 4) {
                (rr, cc) = (cc, k - 1 - rr);
            }
            if (g / 4) % 2 == 1 {
                cc = k - 1 - cc;
            }
            let mut v = w.get(r, c);
            if g >= 8 {
                v = v.swapped();
            }
            cells[rr * k + cc] = v;
        }
    }
    Window::new(k, k, cells).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5000))]

    #[test]
    fn canonical_constant_on_orbits_3(w in window(3), g in 0usize..16) {
        let c = canonicalize(&w).unwrap();
        prop_assert_eq!(&canonicalize(&apply(&w, g)).unwrap(), &c);
        prop_assert_eq!(&canonicalize(&c.window()).unwrap(), &c);
        prop_assert!(c.canonical <= w.cells);
    }

    #[test]
    fn canonical_constant_on_orbits_4(w in window(4), g in 0usize..16) {
        let c = canonicalize(&w).unwrap();
        prop_assert_eq!(&canonicalize(&apply(&w, g)).unwrap(), &c);
        prop_assert_eq!(&canonicalize(&c.window()).unwrap(), &c);
        prop_assert!(16 % c.orbit_size == 0);
    }

    #[test]
    fn catalogue_membership_is_symmetric(w in window(3), g in 0usize..16) {
        prop_assert_eq!(catalogue(3).contains(&w), catalogue(3).contains(&apply(&w, g)));
    }
}

#[test]
fn orbit_sizes_match_brute_force() {
    for c in catalogue(4).classes() {
        let w = c.window();
        let mut imgs: Vec<Vec<Cell>> = (0..16).map(|g| apply(&w, g).cells).collect();
        imgs.sort();
        imgs.dedup();
        assert_eq!(imgs.len(), c.orbit_size, "{c}");
    }
}

#[test]
fn three_by_three_within_candidates() {
    let cands = candidates_3x3();
    let c2 = catalogue(2);
    for c in enumerate_3x3() {
        let codes: Vec<u8> = c.canonical.iter().map(|x| x.index()).collect();
        assert!(cands.contains(&codes));
        let w = c.window();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let sub = Window::new(2, 2, vec![w.get(i, j), w.get(i, j + 1), w.get(i + 1, j), w.get(i + 1, j + 1)]).unwrap();
            assert!(c2.contains(&sub), "{c}");
        }
    }
}

#[test]
fn removing_rules_never_removes_classes() {
    let ids: Vec<&str> = rules().iter().filter(|r| r.stage != Stage::Window4).map(|r| r.id).collect();
    let full = enumerate_3x3_with_rules(&ids);
    assert_eq!(full, enumerate_3x3());
    for skip in 0..ids.len() {
        let fewer: Vec<&str> = ids.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &id)| id).collect();
        let more = enumerate_3x3_with_rules(&fewer);
        assert!(full.iter().all(|c| more.contains(c)), "dropping {} lost a class", ids[skip]);
    }
    assert_eq!(enumerate_3x3_with_rules(&[]).len(), candidates_3x3().len());
}
