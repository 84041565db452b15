mod common;

use std::collections::BTreeSet;

use common::*;
use rand::Rng;
use torusvc::extraction::{check_extraction, superdiagonal_matrix, CheckMode};
use torusvc::lifting::LiftInstance;
use torusvc::shatter::{
    growth_count, realizable_by_box, realizable_by_cube, verify_witness, Family, Mask,
};
use torusvc::torus::rat;
use torusvc::Shape;

fn engine_masks(ps: &torusvc::PointSet, family: Family) -> BTreeSet<u64> {
    (0..1u64 << ps.len())
        .filter(|&m| {
            let w = match family {
                Family::Boxes => realizable_by_box(ps, Mask(m)).unwrap().map(Shape::Box),
                Family::Cubes => realizable_by_cube(ps, Mask(m)).unwrap().map(Shape::Cube),
                _ => unreachable!(),
            };
            if let Some(w) = &w {
                assert!(
                    verify_witness(ps, Mask(m), w).unwrap(),
                    "bad witness for {m:x}"
                );
            }
            w.is_some()
        })
        .collect()
}

#[test]
fn box_oracle_matches_brute_force() {
    let mut r = rng(11);
    for _ in 0..300 {
        let (n, d, denom) = (r.gen_range(1..=5), r.gen_range(1..=3), r.gen_range(1..=8));
        let ps = random_points(&mut r, n, d, denom);
        assert_eq!(engine_masks(&ps, Family::Boxes), box_brute(&ps), "{ps:?}");
    }
}

#[test]
fn box_oracle_all_small_one_dimensional_sets() {
    for denom in 1..=4u64 {
        for n in 1..=3usize {
            for code in 0..denom.pow(n as u32) {
                let numers = (0..n)
                    .map(|i| vec![code / denom.pow(i as u32) % denom])
                    .collect();
                let ps = torusvc::PointSet::new(1, denom, numers).unwrap();
                assert_eq!(engine_masks(&ps, Family::Boxes), box_brute(&ps));
            }
        }
    }
}

#[test]
fn cube_oracle_matches_brute_force() {
    let mut r = rng(12);
    for _ in 0..300 {
        let (n, d, denom) = (r.gen_range(1..=4), r.gen_range(1..=2), r.gen_range(1..=6));
        let ps = random_points(&mut r, n, d, denom);
        assert_eq!(engine_masks(&ps, Family::Cubes), cube_brute(&ps), "{ps:?}");
    }
}

#[test]
fn growth_within_counting_bounds() {
    let mut r = rng(13);
    for _ in 0..100 {
        let (n, d, denom) = (r.gen_range(1..=7), r.gen_range(1..=3), r.gen_range(2..=9));
        let ps = random_points(&mut r, n, d, denom);
        let nn = n as u64 + 1;
        let boxes = growth_count(&ps, Family::Boxes).unwrap();
        assert!(boxes <= nn.pow(2 * d as u32));
        for fam in [Family::StripesAny, Family::StripesFixed(rat(1, 3))] {
            assert!(growth_count(&ps, fam).unwrap() <= d as u64 * nn * nn);
        }
        assert!(growth_count(&ps, Family::Cubes).unwrap() <= boxes);
    }
}

#[test]
fn lifted_cubes_are_complements_of_stripes() {
    let m = superdiagonal_matrix(2).unwrap();
    assert!(check_extraction(&m, CheckMode::Exhaustive).unwrap().holds);
    let inst = LiftInstance::from_construction(1, rat(1, 2), &m).unwrap();
    for s in 0..1u64 << inst.lifted().len() {
        let stripes = inst.stripe_cover(Mask(s)).unwrap();
        let cube = inst.cube_witness(Mask(s)).unwrap();
        for pt in inst.lifted().points() {
            let in_stripe = stripes.iter().any(|st| st.contains(&pt).unwrap());
            assert_eq!(cube.contains(&pt).unwrap(), !in_stripe);
        }
    }
}

#[test]
fn extraction_modes_match_brute_force() {
    let mut r = rng(14);
    for _ in 0..150 {
        let (c, d, k) = (r.gen_range(1..=5), r.gen_range(1..=8), r.gen_range(1..=3));
        let m = random_matrix(&mut r, c, d, k);
        let truth = extraction_brute(&m);
        for mode in [CheckMode::Exhaustive, CheckMode::Witness] {
            assert_eq!(check_extraction(&m, mode).unwrap().holds, truth);
        }
    }
}

#[test]
fn adding_a_column_keeps_the_property() {
    let mut r = rng(15);
    for _ in 0..100 {
        let (c, d, k) = (r.gen_range(1..=4), r.gen_range(1..=7), r.gen_range(1..=3));
        let m = random_matrix(&mut r, c, d, k);
        if check_extraction(&m, CheckMode::Witness).unwrap().holds {
            let col: Vec<u32> = (0..c).map(|_| r.gen_range(0..k as u32)).collect();
            let bigger = m.with_column(&col).unwrap();
            assert!(check_extraction(&bigger, CheckMode::Witness).unwrap().holds);
        }
    }
}
