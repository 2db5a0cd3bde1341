//! Univariate Ritz projectors `Π^(r)`, boundary bubbles `φ^(s)` and the
//! endpoint-interpolating projector `Π^(*)`.
//!
//! Every projector here is linear and depends on finitely many samples of
//! `u` (point values of derivatives at fixed sites), so it is stored as a
//! [`LinearProjector`]: a list of sites and the matrix mapping samples to
//! coefficients.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::fields::ScalarField1D;
use crate::linalg::{LinalgError, SymBand};
use crate::quadrature::{nodes_for_degree, GaussRule};
use crate::splines::{Partition, SplineError, UniSpline, UniSplineSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RitzError {
    #[error("order r = {r} exceeds k + 1 = {kp1}")]
    OrderAboveSmoothness { r: usize, kp1: i32 },
    #[error("order r = {r} exceeds degree p = {p}")]
    OrderAboveDegree { r: usize, p: usize },
    #[error("bubbles need degree p >= 3, got {0}")]
    BubbleDegree(usize),
    #[error("grid size h = {h} exceeds 1/(p+1) = {limit}")]
    GridTooCoarse { h: f64, limit: f64 },
    #[error("bubble breakpoints coincide: {0:?}")]
    CoincidentEta([f64; 3]),
    #[error("bubble order s = {0} not in 0..=2")]
    BubbleOrder(usize),
    #[error("endpoint projector needs 3 <= k + 2 <= p, got p = {p}, k = {k}")]
    StarPrecondition { p: usize, k: i32 },
    #[error("constrained system is singular")]
    Singular,
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A point functional `u ↦ u^{(d)}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub x: f64,
    pub d: usize,
}

/// Linear map from samples `u^{(d_m)}(x_m)` to spline coefficients.
#[derive(Debug, Clone)]
pub struct LinearProjector {
    space: UniSplineSpace,
    sites: Vec<Site>,
    matrix: DMatrix<f64>,
}

impl LinearProjector {
    pub fn space(&self) -> &UniSplineSpace {
        &self.space
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// `dim × n_sites` coefficient map.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn sample(&self, u: &dyn ScalarField1D) -> Vec<f64> {
        self.sites.iter().map(|s| u.deriv(s.x, s.d)).collect()
    }

    pub fn apply_samples(&self, samples: &[f64]) -> UniSpline {
        assert_eq!(samples.len(), self.sites.len());
        let coefs = (0..self.matrix.nrows())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .zip(samples)
                    .map(|(m, s)| m * s)
                    .sum()
            })
            .collect();
        UniSpline::new(self.space.clone(), coefs).expect("projector matrix matches its space")
    }

    pub fn apply(&self, u: &dyn ScalarField1D) -> UniSpline {
        self.apply_samples(&self.sample(u))
    }

    /// Row vector `w` with `(Π u)^{(d)}(x) = w · samples`.
    fn derivative_functional(&self, x: f64, d: usize) -> Vec<f64> {
        let b = self.space.basis_vector(x, d);
        (0..self.matrix.ncols())
            .map(|j| {
                b.iter()
                    .enumerate()
                    .map(|(i, bi)| bi * self.matrix[(i, j)])
                    .sum()
            })
            .collect()
    }
}

/// L² projection onto `space` using `nq` Gauss nodes per element.
pub fn l2_projector(space: &UniSplineSpace, nq: usize) -> Result<LinearProjector, RitzError> {
    let p = space.degree();
    let n = space.dim();
    let rule = GaussRule::new(nq);
    let z = space.partition();
    let mut gram = SymBand::zeros(n, p);
    let mut sites = Vec::new();
    let mut cols: Vec<(usize, Vec<f64>)> = Vec::new();
    for e in 0..z.n_elements() {
        let (a, b) = z.element(e);
        for (x, w) in rule.on(a, b) {
            let (first, vals) = space.basis(x, 0);
            for (i, bi) in vals.iter().enumerate() {
                for (j, bj) in vals.iter().enumerate().take(i + 1) {
                    gram.add(first + i, first + j, w * bi * bj);
                }
            }
            sites.push(Site { x, d: 0 });
            let mut rhs = vec![0.0; n];
            for (i, bi) in vals.iter().enumerate() {
                rhs[first + i] = w * bi;
            }
            cols.push((first, rhs));
        }
    }
    let chol = gram.cholesky()?;
    let mut matrix = DMatrix::zeros(n, sites.len());
    for (j, (_, mut rhs)) in cols.into_iter().enumerate() {
        chol.solve_in_place(&mut rhs);
        for i in 0..n {
            matrix[(i, j)] = rhs[i];
        }
    }
    Ok(LinearProjector {
        space: space.clone(),
        sites,
        matrix,
    })
}

/// One-shot L² projection with the default quadrature.
pub fn l2_project(space: &UniSplineSpace, u: &dyn ScalarField1D) -> Result<UniSpline, RitzError> {
    Ok(l2_projector(space, nodes_for_degree(space.degree()))?.apply(u))
}

/// `Π^{(r)}_{p,k,Z}`: H^r-orthogonal projection pinned by `u^{(s)}(0)`, `s < r`.
#[derive(Debug, Clone)]
pub struct RitzProjector {
    order: usize,
    inner: LinearProjector,
}

impl RitzProjector {
    /// Builds `Π^{(r)}` on `space` with `p + 2` Gauss nodes per element.
    pub fn new(space: &UniSplineSpace, r: usize) -> Result<Self, RitzError> {
        Self::with_nodes(space, r, nodes_for_degree(space.degree()))
    }

    pub fn with_nodes(space: &UniSplineSpace, r: usize, nq: usize) -> Result<Self, RitzError> {
        let p = space.degree();
        let k = space.smoothness();
        if r > p {
            return Err(RitzError::OrderAboveDegree { r, p });
        }
        if r as i32 > k + 1 {
            return Err(RitzError::OrderAboveSmoothness { r, kp1: k + 1 });
        }
        let inner = if r == 0 {
            l2_projector(space, nq)?
        } else {
            let lower = space.with(p - 1, k - 1)?;
            let base = Self::with_nodes(&lower, r - 1, nq)?.inner;
            lift(space, &base)
        };
        Ok(RitzProjector { order: r, inner })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn space(&self) -> &UniSplineSpace {
        &self.inner.space
    }

    pub fn linear(&self) -> &LinearProjector {
        &self.inner
    }

    pub fn project(&self, u: &dyn ScalarField1D) -> UniSpline {
        self.inner.apply(u)
    }
}

/// `u ↦ u(0) + ∫₀ Π_lower(u')`.
fn lift(space: &UniSplineSpace, lower: &LinearProjector) -> LinearProjector {
    let p = space.degree();
    let t = space.knots().knots();
    let n = space.dim();
    let m = lower.sites.len();
    let mut sites = Vec::with_capacity(m + 1);
    sites.push(Site { x: 0.0, d: 0 });
    sites.extend(lower.sites.iter().map(|s| Site { x: s.x, d: s.d + 1 }));
    let mut matrix = DMatrix::zeros(n, m + 1);
    for i in 0..n {
        matrix[(i, 0)] = 1.0;
    }
    let pf = p as f64;
    for i in 1..n {
        let step = (t[i + p] - t[i]) / pf;
        for j in 0..m {
            matrix[(i, j + 1)] = matrix[(i - 1, j + 1)] + step * lower.matrix[(i - 1, j)];
        }
    }
    LinearProjector {
        space: space.clone(),
        sites,
        matrix,
    }
}

/// `Π^{(r)}` applied once.
pub fn ritz_project(
    space: &UniSplineSpace,
    r: usize,
    u: &dyn ScalarField1D,
) -> Result<UniSpline, RitzError> {
    Ok(RitzProjector::new(space, r)?.project(u))
}

/// H²-seminorm projection pinned by value and first derivative at both ends.
///
/// Coincides with `Π^{(2)}` when the degree is at least 3.
pub fn hermite_h2_projector(
    space: &UniSplineSpace,
    nq: usize,
) -> Result<LinearProjector, RitzError> {
    hermite_projector(space, nq, 2)
}

/// L² projection pinned by value and first derivative at both ends.
///
/// Used for the crossing derivatives when their degree is 2: there the
/// H²-seminorm projection is only `O(h²)` accurate in L².
pub fn hermite_l2_projector(
    space: &UniSplineSpace,
    nq: usize,
) -> Result<LinearProjector, RitzError> {
    hermite_projector(space, nq, 0)
}

/// Minimizes `|u - v|_{H^order}` over `v` with matching value and first
/// derivative at 0 and 1.
fn hermite_projector(
    space: &UniSplineSpace,
    nq: usize,
    order: usize,
) -> Result<LinearProjector, RitzError> {
    let n = space.dim();
    if space.degree() < 2 || space.smoothness() < 1 || n < 4 {
        return Err(RitzError::OrderAboveSmoothness {
            r: 2,
            kp1: space.smoothness() + 1,
        });
    }
    let rule = GaussRule::new(nq);
    let z = space.partition();
    let mut sites = vec![
        Site { x: 0.0, d: 0 },
        Site { x: 0.0, d: 1 },
        Site { x: 1.0, d: 0 },
        Site { x: 1.0, d: 1 },
    ];
    let mut kkt = DMatrix::zeros(n + 4, n + 4);
    let mut rhs_cols: Vec<(usize, Vec<f64>)> = Vec::new();
    for e in 0..z.n_elements() {
        let (a, b) = z.element(e);
        for (x, w) in rule.on(a, b) {
            let (first, vals) = space.basis(x, order);
            for (i, bi) in vals.iter().enumerate() {
                for (j, bj) in vals.iter().enumerate() {
                    kkt[(first + i, first + j)] += w * bi * bj;
                }
            }
            sites.push(Site { x, d: order });
            rhs_cols.push((first, vals.iter().map(|v| w * v).collect()));
        }
    }
    for (c, s) in sites[..4].iter().enumerate() {
        let row = space.basis_vector(s.x, s.d);
        for (i, v) in row.iter().enumerate() {
            kkt[(n + c, i)] = *v;
            kkt[(i, n + c)] = *v;
        }
    }
    let mut rhs = DMatrix::zeros(n + 4, sites.len());
    for c in 0..4 {
        rhs[(n + c, c)] = 1.0;
    }
    for (j, (first, vals)) in rhs_cols.iter().enumerate() {
        for (i, v) in vals.iter().enumerate() {
            rhs[(first + i, j + 4)] = *v;
        }
    }
    let sol = kkt.lu().solve(&rhs).ok_or(RitzError::Singular)?;
    let matrix = sol.rows(0, n).into_owned();
    Ok(LinearProjector {
        space: space.clone(),
        sites,
        matrix,
    })
}

/// Projector onto `S_{p-1,k,Z}` used for crossing derivatives: `Π^{(2)}` when
/// its degree allows two-sided interpolation, else [`hermite_l2_projector`].
pub fn crossing_projector(space: &UniSplineSpace) -> Result<LinearProjector, RitzError> {
    let nq = nodes_for_degree(space.degree() + 1);
    if space.degree() >= 3 {
        Ok(RitzProjector::with_nodes(space, 2, nq)?.inner)
    } else {
        hermite_l2_projector(space, nq)
    }
}

/// `φ^{(s)}_{p,Z}`: a spline in `S_{p,p-1,Z}` with `∂^t φ(0) = δ_{st}` and
/// vanishing data at 1 for `t <= 2`.
#[derive(Debug, Clone)]
pub struct BoundaryBubble {
    pub s: usize,
    pub eta: [f64; 3],
    pub spline: UniSpline,
}

/// The snapped breakpoints `η_ℓ = min{z ∈ Z : z >= 4ℓph/9}` (threshold clipped at 1).
pub fn bubble_etas(p: usize, z: &Partition) -> Result<[f64; 3], RitzError> {
    if p < 3 {
        return Err(RitzError::BubbleDegree(p));
    }
    let h = z.h();
    let limit = 1.0 / (p as f64 + 1.0);
    if h > limit * (1.0 + 1e-12) {
        return Err(RitzError::GridTooCoarse { h, limit });
    }
    let mut eta = [0.0; 3];
    for (l, e) in eta.iter_mut().enumerate() {
        let thr = (4.0 * (l + 1) as f64 * p as f64 * h / 9.0).min(1.0);
        *e = *z
            .breakpoints()
            .iter()
            .find(|&&b| b >= thr * (1.0 - 1e-12))
            .expect("threshold is at most 1");
    }
    if eta[0] >= eta[1] || eta[1] >= eta[2] {
        return Err(RitzError::CoincidentEta(eta));
    }
    Ok(eta)
}

impl BoundaryBubble {
    pub fn new(p: usize, z: &Partition, s: usize) -> Result<Self, RitzError> {
        if s > 2 {
            return Err(RitzError::BubbleOrder(s));
        }
        let eta = bubble_etas(p, z)?;
        let [e1, e2, e3] = eta;
        let (d12, d13, d23) = (e1 - e2, e1 - e3, e2 - e3);
        let pf = p as f64;
        let w = match s {
            0 => [
                e1 * e1 / (d12 * d13),
                -e2 * e2 / (d12 * d23),
                e3 * e3 / (d13 * d23),
            ],
            1 => [
                e1 * e1 * (e2 + e3) / (d12 * d13) / pf,
                -e2 * e2 * (e1 + e3) / (d12 * d23) / pf,
                e3 * e3 * (e1 + e2) / (d13 * d23) / pf,
            ],
            _ => {
                let c = e1 * e2 * e3 / (pf * (pf - 1.0));
                [
                    c * e1 / (d12 * d13),
                    -c * e2 / (d12 * d23),
                    c * e3 / (d13 * d23),
                ]
            }
        };
        let space = UniSplineSpace::new(p, p as i32 - 1, z.clone())?;
        let spline = space.from_blossoms(|e, u| {
            let (_, hi) = z.element(e);
            eta.iter()
                .zip(&w)
                .filter(|(&et, _)| hi <= et * (1.0 + 1e-14))
                .map(|(&et, &wl)| wl * u.iter().map(|x| 1.0 - x / et).product::<f64>())
                .sum()
        });
        Ok(BoundaryBubble { s, eta, spline })
    }
}

/// `ψ_{p,η}(ξ) = max(0, 1 - ξ/η)^p` and its derivatives.
pub fn psi(p: usize, eta: f64, x: f64, d: usize) -> f64 {
    if x >= eta || d > p {
        return 0.0;
    }
    let base = 1.0 - x / eta;
    let fall: f64 = (0..d).map(|i| (p - i) as f64).product();
    fall * (-1.0 / eta).powi(d as i32) * base.powi((p - d) as i32)
}

/// `Π^{(*)}_{p,k+1,Z}` as a linear projector onto `S_{p,k+1,Z}`.
pub fn star_projector(p: usize, k: i32, z: &Partition) -> Result<LinearProjector, RitzError> {
    if k < 1 || k + 2 > p as i32 {
        return Err(RitzError::StarPrecondition { p, k });
    }
    let limit = 1.0 / (p as f64 + 1.0);
    if z.h() > limit * (1.0 + 1e-12) {
        return Err(RitzError::GridTooCoarse { h: z.h(), limit });
    }
    let space = UniSplineSpace::new(p, k + 1, z.clone())?;
    if p >= 5 {
        return Ok(RitzProjector::new(&space, 3)?.inner);
    }
    let base = RitzProjector::new(&space, 2)?.inner;
    let left = BoundaryBubble::new(p, z, 2)?.spline.embed(&space)?;
    let right = BoundaryBubble::new(p, &z.reverse(), 2)?
        .spline
        .reverse()
        .embed(&space)?;
    let m = base.sites.len();
    let mut sites = base.sites.clone();
    sites.push(Site { x: 0.0, d: 2 });
    sites.push(Site { x: 1.0, d: 2 });
    let r0 = base.derivative_functional(0.0, 2);
    let r1 = base.derivative_functional(1.0, 2);
    let n = space.dim();
    let mut matrix = DMatrix::zeros(n, m + 2);
    for i in 0..n {
        let (l, r) = (left.coefs()[i], right.coefs()[i]);
        for j in 0..m {
            matrix[(i, j)] = base.matrix[(i, j)] - l * r0[j] - r * r1[j];
        }
        matrix[(i, m)] = l;
        matrix[(i, m + 1)] = r;
    }
    Ok(LinearProjector {
        space,
        sites,
        matrix,
    })
}

/// One-shot `Π^{(*)}`.
pub fn pi_star(
    p: usize,
    k: i32,
    z: &Partition,
    u: &dyn ScalarField1D,
) -> Result<UniSpline, RitzError> {
    Ok(star_projector(p, k, z)?.apply(u))
}
