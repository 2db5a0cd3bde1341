use asg1_core::asg1::global_project;
use asg1_core::fields::{Manufactured, ScalarField2D};
use asg1_core::geometry::{builtin, BUILTIN_NAMES};
use asg1_core::gluing::{GluingSet, DEFAULT_TOL};

#[test]
fn builtins_are_conforming() {
    for name in BUILTIN_NAMES {
        for (p, k) in [(3, 1), (4, 2), (5, 2)] {
            let n = if p == 5 { 6 } else { 5 };
            let m = builtin(name, n).unwrap();
            let set = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
            for f in ["sinsin", "expxy", "linear"] {
                let u = Manufactured::by_name(f).unwrap();
                let g = global_project(&m, &set, &u, p, k, false).unwrap();
                assert!(g.report.pass, "{name} p={p} k={k} {f}: {:#?}", g.report);
            }
        }
    }
}

#[test]
fn constant_reproduced_globally() {
    let u = Manufactured::by_name("constant").unwrap();
    for name in BUILTIN_NAMES {
        let m = builtin(name, 4).unwrap();
        let set = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
        let g = global_project(&m, &set, &u, 3, 1, false).unwrap();
        for pp in &g.patches {
            for &(x, y) in &[(0.1, 0.9), (0.5, 0.5), (1.0, 1.0)] {
                assert!((pp.result.partial(x, y, 0, 0) - 5.0).abs() <= 1e-10);
            }
        }
    }
}
