mod common;

use asg1_core::asg1::{global_project, patch_project, patch_space, AsgError};
use asg1_core::fields::Manufactured;
use asg1_core::geometry::{builtin, load_geometry};
use asg1_core::gluing::{EdgeGluing, GluingError, GluingSet, DEFAULT_TOL};
use asg1_core::harness::{solve, GluingMode, HarnessError};
use asg1_core::splines::{Partition, UniSplineSpace};
use asg1_core::tensor::TensorSplineSpace;

#[test]
fn boundary_gluing_breaks_conformity_on_skew_geometry() {
    let m = builtin("two_patch_skew", 8).unwrap();
    let wrong = GluingSet::boundary(m.patches.len());
    let g = global_project(&m, &wrong, &Manufactured::ExpXY, 3, 1, true).unwrap();
    assert!(!g.report.pass);
    assert!(g.report.interfaces[0].d_derivative_jump > 1e-6);
    let right = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
    let g = global_project(&m, &right, &Manufactured::ExpXY, 3, 1, false).unwrap();
    assert!(g.report.pass);
}

#[test]
fn uncertified_gluing_refused_unless_forced() {
    let m = builtin("two_patch_skew", 8).unwrap();
    let mut set = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
    set.interfaces[0].report.pass = false;
    let err = global_project(&m, &set, &Manufactured::SinSin, 3, 1, false).unwrap_err();
    assert!(matches!(err, AsgError::NotCertified { index: 0, .. }));
    assert!(global_project(&m, &set, &Manufactured::SinSin, 3, 1, true).is_ok());
}

#[test]
fn non_asg1_geometry_is_a_tolerance_failure() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/not_asg1.json");
    let m = load_geometry(path).unwrap();
    let err = GluingSet::recover(&m, DEFAULT_TOL).unwrap_err();
    assert!(matches!(err, GluingError::AlphaSign { index: 0 }));
    let err = solve(&m, "sinsin", 3, 1, GluingMode::default(), false)
        .err()
        .unwrap();
    assert!(matches!(err, HarnessError::Gluing(_)) && err.is_tolerance());
}

#[test]
fn generic_smoother_splines_are_not_reproduced() {
    // normal traces of S_{p,k+1} ⊗ S_{p,k+1} are not in S_{p-1,k}
    let mut r = common::rng(3);
    let (p, k) = (4, 2);
    let z = Partition::uniform(8).unwrap();
    let parts = [z.clone(), z.clone()];
    let fine = UniSplineSpace::new(p, k + 1, z).unwrap();
    let u = common::random_tensor(&TensorSplineSpace::new(fine.clone(), fine), &mut r)
        .embed(&patch_space(&parts, p, k).unwrap())
        .unwrap();
    let pp = patch_project(0, &parts, &u, &[EdgeGluing::boundary(); 4], p, k).unwrap();
    assert!(common::tensor_gap(&pp.result, &u) > 1e-6);
    // the tangential traces are still reproduced
    for c in pp.corrections.iter().filter(|c| c.sigma == 0) {
        assert!(c.edge.max_abs_coef() <= 1e-10);
    }
}
