//! Tensor-product splines, directional projectors and `Q = Π̂^{(2,2)}`.

use nalgebra::DMatrix;

use crate::fields::{ScalarField1D, ScalarField2D};
use crate::geometry::Side;
use crate::ritz1d::{LinearProjector, RitzError, RitzProjector, Site};
use crate::splines::{SplineError, UniSpline, UniSplineSpace};

/// `S₁ ⊗ S₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSplineSpace {
    pub spaces: [UniSplineSpace; 2],
}

impl TensorSplineSpace {
    pub fn new(s1: UniSplineSpace, s2: UniSplineSpace) -> Self {
        TensorSplineSpace { spaces: [s1, s2] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.spaces[0].dim(), self.spaces[1].dim())
    }

    /// Space of the traces on `side`.
    pub fn edge_space(&self, side: Side) -> &UniSplineSpace {
        &self.spaces[side.edge_dir()]
    }

    /// Space of the crossing direction of `side`.
    pub fn cross_space(&self, side: Side) -> &UniSplineSpace {
        &self.spaces[1 - side.edge_dir()]
    }
}

/// `Σ c_{ab} B_a(ξ1) B_b(ξ2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpline {
    space: TensorSplineSpace,
    coefs: DMatrix<f64>,
}

impl TensorSpline {
    pub fn new(space: TensorSplineSpace, coefs: DMatrix<f64>) -> Result<Self, SplineError> {
        let (n1, n2) = space.dims();
        if coefs.shape() != (n1, n2) {
            return Err(SplineError::CoefficientCount {
                got: coefs.len(),
                want: n1 * n2,
            });
        }
        Ok(TensorSpline { space, coefs })
    }

    pub fn zero(space: &TensorSplineSpace) -> Self {
        let (n1, n2) = space.dims();
        TensorSpline {
            space: space.clone(),
            coefs: DMatrix::zeros(n1, n2),
        }
    }

    /// `f(ξ1, ξ2) = g(ξ1) h(ξ2)`.
    pub fn outer(g: &UniSpline, h: &UniSpline) -> Self {
        let coefs = DMatrix::from_fn(g.coefs().len(), h.coefs().len(), |a, b| {
            g.coefs()[a] * h.coefs()[b]
        });
        TensorSpline {
            space: TensorSplineSpace::new(g.space().clone(), h.space().clone()),
            coefs,
        }
    }

    pub fn space(&self) -> &TensorSplineSpace {
        &self.space
    }

    pub fn coefs(&self) -> &DMatrix<f64> {
        &self.coefs
    }

    /// `∂₁^a ∂₂^b f(ξ1, ξ2)`; points are clamped to the unit square.
    pub fn eval(&self, x: f64, y: f64, a: usize, b: usize) -> f64 {
        let (f1, v1) = self.space.spaces[0].basis(x.clamp(0.0, 1.0), a);
        let (f2, v2) = self.space.spaces[1].basis(y.clamp(0.0, 1.0), b);
        let mut s = 0.0;
        for (i, bi) in v1.iter().enumerate() {
            let mut row = 0.0;
            for (j, bj) in v2.iter().enumerate() {
                row += bj * self.coefs[(f1 + i, f2 + j)];
            }
            s += bi * row;
        }
        s
    }

    /// Same function represented in a finer tensor space.
    pub fn embed(&self, target: &TensorSplineSpace) -> Result<TensorSpline, SplineError> {
        let (n1, _) = self.space.dims();
        let (m1, m2) = target.dims();
        let mut mid = DMatrix::zeros(n1, m2);
        for a in 0..n1 {
            let row: Vec<f64> = self.coefs.row(a).iter().copied().collect();
            let e = UniSpline::new(self.space.spaces[1].clone(), row)?.embed(&target.spaces[1])?;
            for (b, c) in e.coefs().iter().enumerate() {
                mid[(a, b)] = *c;
            }
        }
        let mut out = DMatrix::zeros(m1, m2);
        for b in 0..m2 {
            let col: Vec<f64> = mid.column(b).iter().copied().collect();
            let e = UniSpline::new(self.space.spaces[0].clone(), col)?.embed(&target.spaces[0])?;
            for (a, c) in e.coefs().iter().enumerate() {
                out[(a, b)] = *c;
            }
        }
        Ok(TensorSpline {
            space: target.clone(),
            coefs: out,
        })
    }

    /// `self += s · other`, both in the same space.
    pub fn axpy(&mut self, s: f64, other: &TensorSpline) -> Result<(), SplineError> {
        if self.space != other.space {
            return Err(SplineError::SpaceMismatch);
        }
        self.coefs += &other.coefs * s;
        Ok(())
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.coefs.amax()
    }

    /// `(n_j·∇)^σ f` on `side`, as a spline in the edge space.
    pub fn edge_derivative_trace(&self, side: Side, sigma: usize) -> UniSpline {
        let cross = self.space.cross_space(side);
        let at = if side.is_far() { 1.0 } else { 0.0 };
        let sign: f64 = if side.is_far() { 1.0 } else { -1.0 };
        let w: Vec<f64> = cross
            .basis_vector(at, sigma)
            .iter()
            .map(|b| b * sign.powi(sigma as i32))
            .collect();
        let coefs = if side.along_first() {
            &self.coefs * nalgebra::DVector::from_vec(w)
        } else {
            self.coefs.transpose() * nalgebra::DVector::from_vec(w)
        };
        UniSpline::new(
            self.space.edge_space(side).clone(),
            coefs.iter().copied().collect(),
        )
        .expect("trace matches edge space")
    }

    /// Restriction to `side` in that side's edge coordinate.
    pub fn trace(&self, side: Side) -> UniSpline {
        self.edge_derivative_trace(side, 0)
    }

    /// Outward normal derivative on `side`.
    pub fn normal_derivative_trace(&self, side: Side) -> UniSpline {
        self.edge_derivative_trace(side, 1)
    }
}

impl ScalarField2D for TensorSpline {
    fn partial(&self, x: f64, y: f64, a: usize, b: usize) -> f64 {
        self.eval(x, y, a, b)
    }
}

/// One-directional projector `Π̂^{(r)}_{…,j}` realized by its functionals:
/// coefficient `m` is `λ_m` applied along the edge direction of `j`.
pub struct DirectionalProjection<'a> {
    projector: LinearProjector,
    dir: usize,
    u: &'a dyn ScalarField2D,
}

/// `ξ ↦ λ_m(u(·, ξ))` (or with roles swapped) with derivatives.
pub struct CoefficientFn<'a> {
    proj: &'a DirectionalProjection<'a>,
    m: usize,
}

impl<'a> DirectionalProjection<'a> {
    pub fn projector(&self) -> &LinearProjector {
        &self.projector
    }

    /// Projected direction: 0 for `ξ1`, 1 for `ξ2`.
    pub fn dir(&self) -> usize {
        self.dir
    }

    fn sample(&self, s: &Site, at: f64, e: usize) -> f64 {
        if self.dir == 0 {
            self.u.partial(s.x, at, s.d, e)
        } else {
            self.u.partial(at, s.x, e, s.d)
        }
    }

    /// The projected fiber at crossing coordinate `at`.
    pub fn fiber(&self, at: f64) -> UniSpline {
        let samples: Vec<f64> = self
            .projector
            .sites()
            .iter()
            .map(|s| self.sample(s, at, 0))
            .collect();
        self.projector.apply_samples(&samples)
    }

    pub fn coefficient(&'a self, m: usize) -> CoefficientFn<'a> {
        CoefficientFn { proj: self, m }
    }
}

impl ScalarField1D for CoefficientFn<'_> {
    fn deriv(&self, x: f64, d: usize) -> f64 {
        let p = self.proj;
        p.projector
            .sites()
            .iter()
            .enumerate()
            .map(|(s, site)| p.projector.matrix()[(self.m, s)] * p.sample(site, x, d))
            .sum()
    }
}

/// `Π̂^{(r)}` along the edge direction of `side`; opposite sides share the operator.
pub fn directional_project<'a>(
    space: &TensorSplineSpace,
    side: Side,
    r: usize,
    u: &'a dyn ScalarField2D,
) -> Result<DirectionalProjection<'a>, RitzError> {
    let dir = side.edge_dir();
    let projector = RitzProjector::new(&space.spaces[dir], r)?.linear().clone();
    Ok(DirectionalProjection { projector, dir, u })
}

/// Distinct abscissae with the site indices that use them.
fn group_sites(sites: &[Site]) -> Vec<(f64, Vec<usize>)> {
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        match groups.iter_mut().find(|g| g.0 == s.x) {
            Some(g) => g.1.push(i),
            None => groups.push((s.x, vec![i])),
        }
    }
    groups
}

/// Site value grid `S[m₁][m₂] = ∂₁^{d₁}∂₂^{d₂} u(x₁, x₂)`.
fn sample_grid(s1: &[Site], s2: &[Site], u: &dyn ScalarField2D) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(s1.len(), s2.len());
    let (g1, g2) = (group_sites(s1), group_sites(s2));
    let mut orders = Vec::new();
    let mut idx = Vec::new();
    let mut vals = Vec::new();
    for (x, i1) in &g1 {
        for (y, i2) in &g2 {
            orders.clear();
            idx.clear();
            for &a in i1 {
                for &b in i2 {
                    orders.push((s1[a].d, s2[b].d));
                    idx.push((a, b));
                }
            }
            vals.resize(orders.len(), 0.0);
            u.partials(*x, *y, &orders, &mut vals);
            for (&(a, b), v) in idx.iter().zip(&vals) {
                out[(a, b)] = *v;
            }
        }
    }
    out
}

/// `Π̂^{(r,r)} u` with coefficients `λ¹_{m₁}(λ²_{m₂}(u))`.
pub fn tensor_project(
    space: &TensorSplineSpace,
    r: usize,
    u: &dyn ScalarField2D,
) -> Result<TensorSpline, RitzError> {
    let p1 = RitzProjector::new(&space.spaces[0], r)?;
    let p2 = RitzProjector::new(&space.spaces[1], r)?;
    let (l1, l2) = (p1.linear(), p2.linear());
    let s = sample_grid(l1.sites(), l2.sites(), u);
    let coefs = l1.matrix() * s * l2.matrix().transpose();
    Ok(TensorSpline {
        space: space.clone(),
        coefs,
    })
}

/// The projector `Q = Π̂^{(2,2)}`.
pub fn tensor_project_q(
    space: &TensorSplineSpace,
    u: &dyn ScalarField2D,
) -> Result<TensorSpline, RitzError> {
    tensor_project(space, 2, u)
}

/// `Π̂^{(r,r)} u` composed fiber-wise: first along direction `first`, then
/// the remaining direction applied to each coefficient function.
pub fn tensor_project_ordered(
    space: &TensorSplineSpace,
    r: usize,
    u: &dyn ScalarField2D,
    first: usize,
) -> Result<TensorSpline, RitzError> {
    let side = if first == 0 { Side::S1 } else { Side::S4 };
    let inner = directional_project(space, side, r, u)?;
    let outer = RitzProjector::new(&space.spaces[1 - first], r)?;
    let (n1, n2) = space.dims();
    let mut coefs = DMatrix::zeros(n1, n2);
    for m in 0..space.spaces[first].dim() {
        let c = outer.project(&inner.coefficient(m));
        for (k, v) in c.coefs().iter().enumerate() {
            if first == 0 {
                coefs[(m, k)] = *v;
            } else {
                coefs[(k, m)] = *v;
            }
        }
    }
    Ok(TensorSpline {
        space: space.clone(),
        coefs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Fn2D, Manufactured};
    use crate::ritz1d::ritz_project;
    use crate::splines::Partition;
    use approx::assert_abs_diff_eq;

    fn tspace(p: usize, k: i32, n: usize) -> TensorSplineSpace {
        let s = UniSplineSpace::new(p, k, Partition::uniform(n).unwrap()).unwrap();
        TensorSplineSpace::new(s.clone(), s)
    }

    fn xy() -> Fn2D<impl Fn(f64, f64, usize, usize) -> f64> {
        Fn2D(|x: f64, y: f64, a: usize, b: usize| {
            let f = |t: f64, d: usize| match d {
                0 => t,
                1 => 1.0,
                _ => 0.0,
            };
            f(x, a) * f(y, b)
        })
    }

    #[test]
    fn constant_and_bilinear_evaluation() {
        let s = tspace(3, 1, 4);
        let (n1, n2) = s.dims();
        let one = TensorSpline::new(s.clone(), DMatrix::from_element(n1, n2, 1.0)).unwrap();
        assert_abs_diff_eq!(one.eval(0.3, 0.7, 0, 0), 1.0, epsilon = 1e-14);
        let q = tensor_project_q(&s, &xy()).unwrap();
        assert_abs_diff_eq!(q.eval(0.41, 0.93, 1, 1), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.eval(0.41, 0.93, 0, 0), 0.41 * 0.93, epsilon = 1e-13);
    }

    #[test]
    fn traces_of_coordinates() {
        let s = tspace(3, 1, 4);
        let q = tensor_project_q(&s, &xy()).unwrap();
        let y = tensor_project_q(
            &s,
            &Fn2D(|_x: f64, y: f64, a: usize, b: usize| match (a, b) {
                (0, 0) => y,
                (0, 1) => 1.0,
                _ => 0.0,
            }),
        )
        .unwrap();
        assert!(y.trace(Side::S1).max_abs_coef() < 1e-13);
        for c in y.normal_derivative_trace(Side::S1).coefs() {
            assert_abs_diff_eq!(*c, -1.0, epsilon = 1e-12);
        }
        // ξ1ξ2 on side 2 is ξ2
        let t = q.trace(Side::S2);
        assert_abs_diff_eq!(t.eval(0.6, 0).unwrap(), 0.6, epsilon = 1e-13);
    }

    #[test]
    fn fiber_matches_univariate_projection() {
        let s = tspace(3, 1, 4);
        let u = Manufactured::SinSin;
        let dp = directional_project(&s, Side::S1, 2, &u).unwrap();
        let fiber = dp.fiber(0.37);
        let restricted = Fn1D(|x: f64, d: usize| u.partial(x, 0.37, d, 0));
        let direct = ritz_project(&s.spaces[0], 2, &restricted).unwrap();
        for (a, b) in fiber.coefs().iter().zip(direct.coefs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    use crate::fields::Fn1D;

    #[test]
    fn both_orderings_agree() {
        let s = tspace(3, 1, 4);
        let u = Manufactured::ExpXY;
        let a = tensor_project_ordered(&s, 2, &u, 0).unwrap();
        let b = tensor_project_ordered(&s, 2, &u, 1).unwrap();
        let c = tensor_project_q(&s, &u).unwrap();
        let scale = c.max_abs_coef();
        assert!((a.coefs() - b.coefs()).amax() <= 1e-11 * scale);
        assert!((a.coefs() - c.coefs()).amax() <= 1e-11 * scale);
    }

    #[test]
    fn corner_interpolation() {
        let s = tspace(4, 2, 5);
        let u = Manufactured::SinSin;
        let q = tensor_project_q(&s, &u).unwrap();
        for (x, y) in crate::geometry::CORNERS {
            for a in 0..2 {
                for b in 0..2 {
                    assert_abs_diff_eq!(q.eval(x, y, a, b), u.partial(x, y, a, b), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn embed_preserves_values() {
        let s = tspace(3, 1, 4);
        let q = tensor_project_q(&s, &Manufactured::ExpXY).unwrap();
        let fine = tspace(4, 1, 8);
        let e = q.embed(&fine).unwrap();
        for &(x, y) in &[(0.1, 0.2), (0.55, 0.9), (1.0, 0.0)] {
            assert_abs_diff_eq!(e.eval(x, y, 0, 0), q.eval(x, y, 0, 0), epsilon = 1e-12);
            assert_abs_diff_eq!(e.eval(x, y, 1, 1), q.eval(x, y, 1, 1), epsilon = 1e-10);
        }
    }
}
