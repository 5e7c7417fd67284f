mod common;

use std::sync::Arc;

use afem::mesh::initial_lshape;
use afem::{Mesh, RefineMode};
use common::{check_conformity, check_refinement_step, l_shape_boundary};
use proptest::prelude::*;

fn modes() -> impl Strategy<Value = RefineMode> {
    prop_oneof![Just(RefineMode::Bisec3), Just(RefineMode::Bisec5)]
}

/// Random refinement sequence: each step marks elements selected by a seed mask.
fn refine_randomly(mode: RefineMode, steps: &[Vec<bool>]) -> Result<(), TestCaseError> {
    let mut mesh = initial_lshape();
    for step in steps {
        let n = mesh.num_triangles();
        let marked: Vec<usize> = (0..n).filter(|&t| step[t % step.len()]).collect();
        let fine = mesh.refine(&marked, mode).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check_conformity(&fine, l_shape_boundary).map_err(TestCaseError::fail)?;
        let stats = check_refinement_step(&mesh, &fine, &marked, mode).map_err(TestCaseError::fail)?;
        prop_assert!(stats.max_sons_unmarked <= 4);
        prop_assert!((fine.total_area() - 3.0).abs() < 1e-12);
        prop_assert_eq!(fine.child_map(&mesh).unwrap().len(), n);
        mesh = fine;
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_refinements_stay_conforming_and_nested(
        mode in modes(),
        steps in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..9), 1..6),
    ) {
        refine_randomly(mode, &steps)?;
    }

    #[test]
    fn marking_order_and_duplicates_do_not_matter(
        mode in modes(),
        picks in prop::collection::vec(0usize..48, 1..20),
    ) {
        let mesh = initial_lshape().uniform_refine(RefineMode::Bisec3);
        let a = mesh.refine(&picks, mode).unwrap();
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.reverse();
        let b = mesh.refine(&sorted, mode).unwrap();
        prop_assert_eq!(a.to_text(), b.to_text());
    }
}

#[test]
fn refinement_is_deterministic() {
    let run = || {
        let mut m = initial_lshape();
        for k in 0..5 {
            let marked: Vec<usize> = (0..m.num_triangles()).filter(|t| (t * 7 + k) % 5 == 0).collect();
            m = m.refine(&marked, RefineMode::Bisec5).unwrap();
        }
        m.to_text()
    };
    assert_eq!(run(), run());
}

#[test]
fn text_roundtrip_preserves_geometry() {
    let mut m = initial_lshape();
    for _ in 0..3 {
        m = m.refine(&[0, 3], RefineMode::Bisec3).unwrap();
    }
    let back = Mesh::from_text(&m.to_text()).unwrap();
    assert_eq!(back.triangles(), m.triangles());
    assert_eq!(back.vertices(), m.vertices());
    assert_eq!(back.num_edges(), m.num_edges());
}

#[test]
fn file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.txt");
    let m = initial_lshape().uniform_refine(RefineMode::Bisec5);
    m.write_file(&path).unwrap();
    assert_eq!(Mesh::read_file(&path).unwrap().to_text(), m.to_text());
}

#[test]
fn marking_one_element_does_not_refine_its_neighbours_beyond_closure() {
    // the sons of an unmarked element must match a uniform refinement of that
    // element restricted to the bisected edges, which check_refinement_step verifies
    let m = initial_lshape().uniform_refine(RefineMode::Bisec3);
    for t in [0, 10, 47] {
        for mode in [RefineMode::Bisec3, RefineMode::Bisec5] {
            let fine = m.refine(&[t], mode).unwrap();
            let stats = check_refinement_step(&m, &fine, &[t], mode).unwrap();
            assert_eq!(stats.marked, 1);
            assert_eq!(stats.max_sons_marked, mode.sons());
            assert!(fine.num_triangles() < 48 + 3 * mode.sons() + 12);
        }
    }
}

#[test]
fn shape_regularity_stabilises_under_uniform_refinement() {
    for mode in [RefineMode::Bisec3, RefineMode::Bisec5] {
        let mut m = initial_lshape();
        let mut ratios = vec![m.shape_regularity()];
        for _ in 0..6 {
            m = m.uniform_refine(mode);
            ratios.push(m.shape_regularity());
        }
        let tail = &ratios[2..];
        let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(max - min < 1e-12, "{mode:?}: {ratios:?}");
    }
}

#[test]
fn lineage_links_every_generation() {
    let t0 = Arc::new(initial_lshape());
    let t1 = t0.refine(&[1, 2], RefineMode::Bisec3).unwrap();
    let t2 = t1.refine(&[0], RefineMode::Bisec5).unwrap();
    let anc = t2.ancestors_in(&t0).unwrap();
    assert_eq!(anc.len(), t2.num_triangles());
    for (c, &a) in anc.iter().enumerate() {
        assert_eq!(t2.origin(c), a);
    }
    assert!(t0.child_map(&t2).is_err());
}
