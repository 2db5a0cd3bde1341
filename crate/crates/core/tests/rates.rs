mod common;

use asg1_core::asg1::edge_projector_p0;
use asg1_core::fields::{pullback, restrict_to_edge, Fn1D, Manufactured, ScalarField1D};
use asg1_core::geometry::{builtin, Side};
use asg1_core::norms::{observed_order, parametric_error_norms};
use asg1_core::ritz1d::{ritz_project, BoundaryBubble};
use asg1_core::splines::{Partition, UniSplineSpace};
use asg1_core::tensor::{tensor_project_q, TensorSplineSpace};
use common::seminorm;

fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2)
        .map(|w| observed_order(w[0], w[1]).unwrap())
        .collect()
}

#[test]
fn ritz_l2_error_order_four() {
    let u = Fn1D(|x: f64, d: usize| {
        3f64.powi(d as i32) * (3.0 * x + d as f64 * std::f64::consts::FRAC_PI_2).sin()
    });
    let errs: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| {
            let z = Partition::uniform(n).unwrap();
            let s = UniSplineSpace::new(3, 1, z.clone()).unwrap();
            let f = ritz_project(&s, 2, &u).unwrap();
            seminorm(&|x| u.deriv(x, 0) - f.eval_clamped(x, 0), &z, 12)
        })
        .collect();
    for r in orders(&errs) {
        assert!((3.7..=4.3).contains(&r), "{errs:?}");
    }
}

#[test]
fn q_l2_error_order_four() {
    let errs: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| {
            let z = Partition::uniform(n).unwrap();
            let s = UniSplineSpace::new(3, 1, z.clone()).unwrap();
            let space = TensorSplineSpace::new(s.clone(), s);
            let q = tensor_project_q(&space, &Manufactured::SinSin).unwrap();
            parametric_error_norms(&[z.clone(), z], &Manufactured::SinSin, &q, 10).l2
        })
        .collect();
    for r in orders(&errs) {
        assert!((3.7..=4.3).contains(&r), "{errs:?}");
    }
}

#[test]
fn edge_projector_error_order_four() {
    let u = Manufactured::SinSin;
    let mut errs = Vec::new();
    for n in [8, 16, 32] {
        let m = builtin("two_patch_skew", n).unwrap();
        let patch = &m.patches[1];
        let pb = pullback(&u, &patch.map).unwrap();
        let z = patch.edge_partition(Side::S1);
        let f = edge_projector_p0(&pb, Side::S1, 3, 1, z).unwrap();
        let tr = restrict_to_edge(&pb, Side::S1);
        errs.push(seminorm(&|x| tr.deriv(x, 0) - f.eval_clamped(x, 0), z, 12));
    }
    // at least fourth order; the finer levels run ahead of it
    for r in orders(&errs) {
        assert!(r >= 3.7, "{errs:?}");
    }
}

#[test]
fn bubble_l2_scaling() {
    let ratios: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let z = Partition::uniform(n).unwrap();
            let b = BoundaryBubble::new(3, &z, 2).unwrap().spline;
            seminorm(&|x| b.eval_clamped(x, 0), &z, 6).powi(2) / z.h().powi(5)
        })
        .collect();
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(hi / lo <= 4.0, "{ratios:?}");
}
