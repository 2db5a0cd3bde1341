//! Physical Sobolev error norms by element-wise Gauss quadrature.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;
use thiserror::Error;

use crate::fields::ScalarField2D;
use crate::geometry::{GeometryMap, Patch};
use crate::quadrature::{nodes_for_degree, GaussRule};
use crate::splines::Partition;
use crate::tensor::TensorSpline;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("singular Jacobian at parameter ({x}, {y}): det = {det:e}")]
    SingularJacobian { x: f64, y: f64, det: f64 },
}

/// `‖e‖_{L²}`, `|e|_{H¹}` and `|e|_{H²}` of one patch or of the union.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
    pub h2_semi: f64,
}

impl ErrorNorms {
    pub fn h1(&self) -> f64 {
        (self.l2 * self.l2 + self.h1_semi * self.h1_semi).sqrt()
    }

    pub fn h2(&self) -> f64 {
        (self.l2 * self.l2 + self.h1_semi * self.h1_semi + self.h2_semi * self.h2_semi).sqrt()
    }

    /// `[‖e‖_{L²}, ‖e‖_{H¹}, ‖e‖_{H²}]`.
    pub fn full(&self) -> [f64; 3] {
        [self.l2, self.h1(), self.h2()]
    }

    /// Root-sum-square over patches.
    pub fn combine(parts: &[ErrorNorms]) -> ErrorNorms {
        let rss =
            |f: fn(&ErrorNorms) -> f64| parts.iter().map(|p| f(p).powi(2)).sum::<f64>().sqrt();
        ErrorNorms {
            l2: rss(|p| p.l2),
            h1_semi: rss(|p| p.h1_semi),
            h2_semi: rss(|p| p.h2_semi),
        }
    }
}

/// Per-patch norms and their root-sum-square.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub patches: Vec<ErrorNorms>,
    pub global: ErrorNorms,
}

impl ErrorTable {
    pub fn new(patches: Vec<ErrorNorms>) -> Self {
        let global = ErrorNorms::combine(&patches);
        ErrorTable { patches, global }
    }
}

const ORDERS: [(usize, usize); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

fn hess(v: &[f64; 6]) -> Matrix2<f64> {
    Matrix2::new(v[3], v[4], v[4], v[5])
}

fn integrate(
    partitions: &[Partition; 2],
    nq: usize,
    mut f: impl FnMut(f64, f64) -> Result<[f64; 3], NormError>,
) -> Result<ErrorNorms, NormError> {
    let rule = GaussRule::new(nq);
    let mut acc = [0.0; 3];
    for e1 in 0..partitions[0].n_elements() {
        let (a1, b1) = partitions[0].element(e1);
        for e2 in 0..partitions[1].n_elements() {
            let (a2, b2) = partitions[1].element(e2);
            for (x, wx) in rule.on(a1, b1) {
                for (y, wy) in rule.on(a2, b2) {
                    let v = f(x, y)?;
                    for (s, t) in acc.iter_mut().zip(v) {
                        *s += wx * wy * t;
                    }
                }
            }
        }
    }
    Ok(ErrorNorms {
        l2: acc[0].sqrt(),
        h1_semi: acc[1].sqrt(),
        h2_semi: acc[2].sqrt(),
    })
}

/// Squared physical errors at one parameter point, already weighted by `|det J|`.
fn physical_point(
    map: &GeometryMap,
    u: &dyn ScalarField2D,
    f: &dyn ScalarField2D,
    x: f64,
    y: f64,
) -> Result<[f64; 3], NormError> {
    let jets = map.jet(x, y);
    let j = Matrix2::new(
        jets[0].partial(1, 0),
        jets[0].partial(0, 1),
        jets[1].partial(1, 0),
        jets[1].partial(0, 1),
    );
    let det = j.determinant();
    let jinv = j
        .try_inverse()
        .filter(|_| det.abs() > 1e-14)
        .ok_or(NormError::SingularJacobian { x, y, det })?;
    let mut fv = [0.0; 6];
    f.partials(x, y, &ORDERS, &mut fv);
    let g = Vector2::new(fv[1], fv[2]);
    let grad_f = jinv.transpose() * g;
    let mut hh = hess(&fv);
    for (c, jet) in jets.iter().enumerate() {
        hh -= Matrix2::new(
            jet.partial(2, 0),
            jet.partial(1, 1),
            jet.partial(1, 1),
            jet.partial(0, 2),
        ) * grad_f[c];
    }
    let hess_f = jinv.transpose() * hh * jinv;
    let (px, py) = (jets[0].value(), jets[1].value());
    let mut uv = [0.0; 6];
    u.partials(px, py, &ORDERS, &mut uv);
    let w = det.abs();
    Ok([
        w * (uv[0] - fv[0]).powi(2),
        w * (Vector2::new(uv[1], uv[2]) - grad_f).norm_squared(),
        w * (hess(&uv) - hess_f).norm_squared(),
    ])
}

/// Errors of `u ∘ G - f_h` in physical norms over one patch.
///
/// `nq` defaults to `p + 2` Gauss nodes per element and direction.
pub fn physical_error_norms(
    patch: &Patch,
    u: &dyn ScalarField2D,
    f: &TensorSpline,
    nq: Option<usize>,
) -> Result<ErrorNorms, NormError> {
    let nq = nq.unwrap_or_else(|| {
        nodes_for_degree(
            f.space().spaces[0]
                .degree()
                .max(f.space().spaces[1].degree()),
        )
    });
    integrate(&patch.partitions, nq, |x, y| {
        physical_point(&patch.map, u, f, x, y)
    })
}

/// Errors of `û - f` in parametric norms on the unit square.
pub fn parametric_error_norms(
    partitions: &[Partition; 2],
    u: &dyn ScalarField2D,
    f: &dyn ScalarField2D,
    nq: usize,
) -> ErrorNorms {
    integrate(partitions, nq, |x, y| {
        let (mut a, mut b) = ([0.0; 6], [0.0; 6]);
        u.partials(x, y, &ORDERS, &mut a);
        f.partials(x, y, &ORDERS, &mut b);
        let d: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
        Ok([
            d[0] * d[0],
            d[1] * d[1] + d[2] * d[2],
            d[3] * d[3] + 2.0 * d[4] * d[4] + d[5] * d[5],
        ])
    })
    .expect("parametric integrand has no failure mode")
}

/// `log₂(e_h / e_{h/2})`; `None` unless both errors are positive and finite.
pub fn observed_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse > 0.0 && fine > 0.0 && coarse.is_finite() && fine.is_finite() {
        Some((coarse / fine).log2())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Fn2D, Manufactured};
    use crate::splines::UniSplineSpace;
    use crate::tensor::{tensor_project_q, TensorSplineSpace};
    use approx::assert_abs_diff_eq;

    fn setup(n: usize) -> ([Partition; 2], TensorSplineSpace) {
        let z = Partition::uniform(n).unwrap();
        let s = UniSplineSpace::new(3, 1, z.clone()).unwrap();
        ([z.clone(), z], TensorSplineSpace::new(s.clone(), s))
    }

    #[test]
    fn observed_order_examples() {
        assert_abs_diff_eq!(observed_order(0.16, 0.01).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(observed_order(1e-3, 1.25e-4).unwrap(), 3.0, epsilon = 1e-12);
        assert_eq!(observed_order(0.5, 0.5), Some(0.0));
        assert_eq!(observed_order(0.0, 0.1), None);
    }

    #[test]
    fn spline_input_has_zero_error() {
        let (parts, space) = setup(4);
        let f = tensor_project_q(&space, &Manufactured::SinSin).unwrap();
        let patch = Patch::new(GeometryMap::identity(), parts.clone());
        let e = physical_error_norms(&patch, &f, &f, None).unwrap();
        assert!(e.l2 <= 1e-12 && e.h1_semi <= 1e-12 && e.h2_semi <= 1e-12);
        let pe = parametric_error_norms(&parts, &Manufactured::SinSin, &f, 5);
        let ph = physical_error_norms(&patch, &Manufactured::SinSin, &f, Some(5)).unwrap();
        assert_abs_diff_eq!(pe.l2, ph.l2, epsilon = 1e-14);
        assert_abs_diff_eq!(pe.h1_semi, ph.h1_semi, epsilon = 1e-13);
        assert_abs_diff_eq!(pe.h2_semi, ph.h2_semi, epsilon = 1e-12);
    }

    #[test]
    fn constant_over_affine_patch() {
        // G(ξ) = (2ξ1 + 0.5ξ2, 3ξ2): det J = 6
        let (parts, space) = setup(2);
        let map = GeometryMap::Bilinear {
            corners: [[0.0, 0.0], [2.0, 0.0], [0.5, 3.0], [2.5, 3.0]],
        };
        let patch = Patch::new(map, parts);
        let zero = crate::tensor::TensorSpline::zero(&space);
        let c = Fn2D(|_x: f64, _y: f64, a: usize, b: usize| if a + b == 0 { 1.5 } else { 0.0 });
        let e = physical_error_norms(&patch, &c, &zero, None).unwrap();
        assert_abs_diff_eq!(e.l2, 1.5 * 6f64.sqrt(), epsilon = 1e-12);
        assert_eq!(e.h1_semi, 0.0);
    }

    #[test]
    fn combine_is_root_sum_square() {
        let a = ErrorNorms {
            l2: 3.0,
            h1_semi: 1.0,
            h2_semi: 0.0,
        };
        let b = ErrorNorms {
            l2: 4.0,
            h1_semi: 1.0,
            h2_semi: 2.0,
        };
        let t = ErrorTable::new(vec![a, b]);
        assert_eq!(t.global.l2, 5.0);
        assert_abs_diff_eq!(t.global.h1_semi, 2f64.sqrt());
        assert_eq!(t.global.h2_semi, 2.0);
    }
}
