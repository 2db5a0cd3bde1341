mod common;

use asg1_core::asg1::{extend, patch_project, patch_space};
use asg1_core::geometry::{builtin, parse_geometry, to_json, GeometryMap, Side, BUILTIN_NAMES};
use asg1_core::gluing::{EdgeGluing, GluingSet, DEFAULT_TOL};
use asg1_core::ritz1d::{pi_star, ritz_project};
use asg1_core::splines::{Partition, UniSpline, UniSplineSpace};
use asg1_core::tensor::{tensor_project_q, TensorSpline, TensorSplineSpace};
use proptest::prelude::*;

fn space_strategy() -> impl Strategy<Value = (usize, i32, usize)> {
    (3usize..=6, 5usize..=10).prop_flat_map(|(p, n)| (Just(p), 1..=(p as i32 - 1), Just(n)))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ritz_reproduces_and_is_idempotent(
        (p, k, n) in space_strategy(),
        r_pick in 0usize..4,
        coefs in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let space = UniSplineSpace::new(p, k, Partition::uniform(n).unwrap()).unwrap();
        let r = r_pick.min(k as usize + 1).min(p);
        let f = UniSpline::new(space.clone(), coefs[..space.dim()].to_vec()).unwrap();
        let g = ritz_project(&space, r, &f).unwrap();
        prop_assert!(max_gap(f.coefs(), g.coefs()) <= 1e-11);
        let again = ritz_project(&space, r, &g).unwrap();
        prop_assert!(max_gap(g.coefs(), again.coefs()) <= 1e-11);
    }

    #[test]
    fn pi_star_reproduces_its_range(
        p in 3usize..=6,
        k_off in 0i32..3,
        coefs in prop::collection::vec(-1.0f64..1.0, 80),
    ) {
        let k = (1 + k_off).min(p as i32 - 2);
        let z = Partition::uniform(p + 3).unwrap();
        let space = UniSplineSpace::new(p, k + 1, z.clone()).unwrap();
        let f = UniSpline::new(space.clone(), coefs[..space.dim()].to_vec()).unwrap();
        let g = pi_star(p, k, &z, &f).unwrap();
        prop_assert!(max_gap(f.coefs(), g.coefs()) <= 1e-10);
    }

    #[test]
    fn q_reproduces_tensor_splines(seed in any::<u64>(), p in 3usize..=5, n in 4usize..=7) {
        let mut r = common::rng(seed);
        let s = UniSplineSpace::new(p, 1, Partition::uniform(n).unwrap()).unwrap();
        let t = UniSplineSpace::new(p, p as i32 - 2, common::graded_partition(n, &mut r)).unwrap();
        let space = TensorSplineSpace::new(s, t);
        let u = common::random_tensor(&space, &mut r);
        let q = tensor_project_q(&space, &u).unwrap();
        prop_assert!(common::tensor_gap(&q, &u) <= 1e-10);
    }

    #[test]
    fn extensions_do_not_interfere(seed in any::<u64>(), p in 3usize..=5, sigma in 0usize..2, side_i in 1usize..=4) {
        let mut r = common::rng(seed);
        let k = p as i32 - 2;
        let n = 2 * (p + 1);
        let parts = [Partition::uniform(n).unwrap(), common::graded_partition(n, &mut r)];
        let side = Side::from_index(side_i).unwrap();
        let es = UniSplineSpace::new(p, k, parts[side.edge_dir()].clone()).unwrap();
        // edge data vanishing to second order at both ends, like the corrections
        let mut c = common::random_spline(&es, &mut r).coefs().to_vec();
        let m = c.len();
        for i in [0, 1, 2, m - 3, m - 2, m - 1] {
            c[i] = 0.0;
        }
        let g = UniSpline::new(es.clone(), c).unwrap();
        let e = extend(side, sigma, &g, &parts, p, k).unwrap();
        let scale = g.max_abs_coef();
        for other in Side::ALL {
            let (v, d) = (e.trace(other), e.normal_derivative_trace(other));
            if other == side {
                let (on, off) = if sigma == 0 { (&v, &d) } else { (&d, &v) };
                for x in common::samples(20) {
                    prop_assert!((on.eval_clamped(x, 0) - g.eval_clamped(x, 0)).abs() <= 1e-10 * scale);
                    prop_assert!(off.eval_clamped(x, 0).abs() <= 1e-10 * scale);
                }
            } else {
                prop_assert!(v.max_abs_coef() <= 1e-10 * scale);
                prop_assert!(d.max_abs_coef() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn compatible_elements_reproduced(seed in any::<u64>(), pk in prop::sample::select(vec![(3usize, 1i32), (4, 2), (5, 2), (5, 3), (6, 3)])) {
        let (p, k) = pk;
        let mut r = common::rng(seed);
        let z = Partition::uniform(p + 3).unwrap();
        let parts = [z.clone(), z.clone()];
        let target = patch_space(&parts, p, k).unwrap();
        let fine = UniSplineSpace::new(p, k + 1, z.clone()).unwrap();
        // zero normal derivative on every side
        let flat = |r: &mut rand::rngs::StdRng| {
            let mut c = common::random_spline(&fine, r).coefs().to_vec();
            let m = c.len();
            c[1] = c[0];
            c[m - 2] = c[m - 1];
            UniSpline::new(fine.clone(), c).unwrap()
        };
        let u = TensorSpline::outer(&flat(&mut r), &flat(&mut r)).embed(&target).unwrap();
        let pp = patch_project(0, &parts, &u, &[EdgeGluing::boundary(); 4], p, k).unwrap();
        prop_assert!(common::tensor_gap(&pp.result, &u) <= 1e-10);
    }

    #[test]
    fn gluing_invariant_under_similarity(
        s in 0.2f64..5.0,
        theta in -3.1f64..3.1,
        tx in -10.0f64..10.0,
        ty in -10.0f64..10.0,
        name in prop::sample::select(vec!["two_patch_skew", "three_patch_L"]),
    ) {
        let m = builtin(name, 8).unwrap();
        let mut moved = m.clone();
        let (c, sn) = (theta.cos(), theta.sin());
        for patch in &mut moved.patches {
            if let GeometryMap::Bilinear { corners } = &mut patch.map {
                for q in corners.iter_mut() {
                    *q = [s * (c * q[0] - sn * q[1]) + tx, s * (sn * q[0] + c * q[1]) + ty];
                }
            }
        }
        let a = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
        let b = GluingSet::recover(&moved, DEFAULT_TOL).unwrap();
        prop_assert!(b.certified(), "{:?}", b.interfaces.iter().map(|g| g.report).collect::<Vec<_>>());
        for (x, y) in a.interfaces.iter().zip(&b.interfaces) {
            for (g, h) in [(x.left, y.left), (x.right, y.right)] {
                for t in [0.0, 0.5, 1.0] {
                    prop_assert!((g.alpha.at(t) - h.alpha.at(t)).abs() <= 1e-8);
                    prop_assert!((g.beta.at(t) - h.beta.at(t)).abs() <= 1e-8, "{:?} {:?}", g.beta, h.beta);
                }
            }
        }
    }

    #[test]
    fn geometry_json_round_trip(
        name in prop::sample::select(BUILTIN_NAMES.to_vec()),
        n in 1usize..12,
        seed in any::<u64>(),
    ) {
        let mut m = builtin(name, n).unwrap();
        let mut r = common::rng(seed);
        if m.interfaces.is_empty() {
            let patch = &mut m.patches[0];
            patch.partitions = [common::graded_partition(n + 1, &mut r), common::graded_partition(n + 2, &mut r)];
            if let GeometryMap::Bilinear { corners } = &mut patch.map {
                for q in corners.iter_mut().flatten() {
                    *q += 0.05 * rand::RngExt::random_range(&mut r, -1.0..1.0);
                }
            }
        }
        let text = to_json(&m);
        let back = parse_geometry(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(to_json(&back), text);
    }
}
