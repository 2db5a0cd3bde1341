#![allow(dead_code)]

use asg1_core::quadrature::GaussRule;
use asg1_core::splines::{Partition, UniSpline, UniSplineSpace};
use asg1_core::tensor::{TensorSpline, TensorSplineSpace};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_spline(space: &UniSplineSpace, rng: &mut StdRng) -> UniSpline {
    let coefs = (0..space.dim())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    UniSpline::new(space.clone(), coefs).unwrap()
}

pub fn random_tensor(space: &TensorSplineSpace, rng: &mut StdRng) -> TensorSpline {
    let (n1, n2) = space.dims();
    let coefs = DMatrix::from_fn(n1, n2, |_, _| rng.random_range(-1.0..1.0));
    TensorSpline::new(space.clone(), coefs).unwrap()
}

/// `n` elements with widths varying by up to ±25%.
pub fn graded_partition(n: usize, rng: &mut StdRng) -> Partition {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.75..1.25)).collect();
    let total: f64 = w.iter().sum();
    let mut b = vec![0.0];
    let mut acc = 0.0;
    for wi in &w[..n - 1] {
        acc += wi / total;
        b.push(acc);
    }
    b.push(1.0);
    Partition::new(b).unwrap()
}

/// `|f|_{H^t}` by Gauss quadrature with `nq` nodes per element.
pub fn seminorm(f: &dyn Fn(f64) -> f64, z: &Partition, nq: usize) -> f64 {
    let rule = GaussRule::new(nq);
    let mut s = 0.0;
    for e in 0..z.n_elements() {
        let (a, b) = z.element(e);
        for (x, w) in rule.on(a, b) {
            s += w * f(x).powi(2);
        }
    }
    s.sqrt()
}

pub fn samples(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

/// Max coefficient difference after embedding both into `space`.
pub fn tensor_gap(a: &TensorSpline, b: &TensorSpline) -> f64 {
    (a.coefs() - b.coefs()).amax()
}
