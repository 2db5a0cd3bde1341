//! Gluing data for AS-G¹ interfaces.
//!
//! Along an interface with left edge `(i, j)` and right edge `(Î, Ĵ)`, let
//! `N = n·∇G` be the cross derivative of each patch and
//!
//! - `D₁ = det ∇G^(i)` on the left edge,
//! - `D₂ = det ∇G^(Î)` at the matching point `e(ξ)`,
//! - `D₃ = -det[N_i, N_Î]`.
//!
//! With right-side functions read in the left edge coordinate, the geometry
//! is AS-G¹ iff linear `α₁, α₂ > 0` and `β₁, β₂` exist with
//! `D₁α₂ = D₂α₁` and `D₁β₂ - D₂β₁ = D₃`. Then `d_j = (n_j + β t_j)/α`
//! satisfies `d_i·∇G^(i) + (d_Î·∇G^(Î))∘e = 0`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Interface, MultiPatch, Side};
use crate::quadrature::GaussRule;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_LAMBDA_BETA: f64 = 1e-6;
const N_SAMPLES: usize = 64;
const N_CERTIFY: usize = 257;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GluingError {
    #[error("interface {index}: determinant D{which} is not positive ({value:e} at {xi})")]
    NonPositiveDeterminant {
        index: usize,
        which: usize,
        value: f64,
        xi: f64,
    },
    #[error("interface {index}: recovered alpha is not positive on [0, 1]")]
    AlphaSign { index: usize },
    #[error("interface {index}: constrained least-squares system is singular")]
    Singular { index: usize },
}

/// `c0 + c1 ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFn {
    pub c0: f64,
    pub c1: f64,
}

impl LinearFn {
    pub fn new(c0: f64, c1: f64) -> Self {
        LinearFn { c0, c1 }
    }

    pub fn constant(c: f64) -> Self {
        LinearFn { c0: c, c1: 0.0 }
    }

    /// Linear function with values `v0` at 0 and `v1` at 1.
    pub fn from_endpoints(v0: f64, v1: f64) -> Self {
        LinearFn {
            c0: v0,
            c1: v1 - v0,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.c0 + self.c1 * x
    }

    /// `ξ ↦ f(1 - ξ)`.
    pub fn reflected(&self) -> Self {
        LinearFn {
            c0: self.c0 + self.c1,
            c1: -self.c1,
        }
    }

    fn scale(&self, s: f64) -> Self {
        LinearFn {
            c0: s * self.c0,
            c1: s * self.c1,
        }
    }
}

/// Gluing functions of one edge, in that edge's own coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeGluing {
    pub alpha: LinearFn,
    pub beta: LinearFn,
}

impl EdgeGluing {
    /// `α ≡ 1`, `β ≡ 0`.
    pub fn boundary() -> Self {
        EdgeGluing {
            alpha: LinearFn::constant(1.0),
            beta: LinearFn::constant(0.0),
        }
    }
}

/// `d_j(ξ) = (n_j + β(ξ) t_j) / α(ξ)`.
pub fn crossing_direction(g: &EdgeGluing, side: Side, x: f64) -> [f64; 2] {
    let n = side.normal();
    let t = side.tangent();
    let (a, b) = (g.alpha.at(x), g.beta.at(x));
    [(n[0] + b * t[0]) / a, (n[1] + b * t[1]) / a]
}

/// Sampled AS-G¹ residuals of one interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsG1Report {
    /// `sup |D₁α₂ - D₂α₁|`, relative to `sup|D| · sup α`.
    pub residual_alpha: f64,
    /// `sup |D₁β₂ - D₂β₁ - D₃|`, relative to `sup|D| · max(1, sup|β|)`.
    pub residual_beta: f64,
    pub alpha_positive: bool,
    pub tol: f64,
    pub pass: bool,
}

/// Gluing data of one interface with its certification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterfaceGluing {
    pub left: EdgeGluing,
    pub right: EdgeGluing,
    pub report: AsG1Report,
}

/// `(D₁, D₂, D₃)` at left edge coordinate `ξ`.
pub fn interface_determinants(m: &MultiPatch, iface: &Interface, x: f64) -> (f64, f64, f64) {
    let gl = &m.patches[iface.left.patch].map;
    let gr = &m.patches[iface.right.patch].map;
    let (a, b) = iface.left.side.point(x);
    let (c, d) = iface.right.side.point(iface.edge_parameter_map(x));
    let jl = gl.jacobian(a, b);
    let jr = gr.jacobian(c, d);
    let nl = jl * Vector2::from(iface.left.side.normal());
    let nr = jr * Vector2::from(iface.right.side.normal());
    let d3 = -(nl[0] * nr[1] - nl[1] * nr[0]);
    (jl.determinant(), jr.determinant(), d3)
}

fn chebyshev(n: usize) -> Vec<f64> {
    (0..n)
        .map(|m| 0.5 * (1.0 - (std::f64::consts::PI * (m as f64 + 0.5) / n as f64).cos()))
        .collect()
}

/// Residuals of `(α₁, α̃₂, β₁, β̃₂)` (right functions in left coordinate).
pub fn certify(
    d: &dyn Fn(f64) -> (f64, f64, f64),
    a1: LinearFn,
    a2: LinearFn,
    b1: LinearFn,
    b2: LinearFn,
    tol: f64,
) -> AsG1Report {
    let mut xs = chebyshev(N_SAMPLES);
    xs.extend((0..N_CERTIFY).map(|i| i as f64 / (N_CERTIFY - 1) as f64));
    let (mut ra, mut rb, mut sd) = (0.0f64, 0.0f64, 0.0f64);
    for &x in &xs {
        let (d1, d2, d3) = d(x);
        ra = ra.max((d1 * a2.at(x) - d2 * a1.at(x)).abs());
        rb = rb.max((d1 * b2.at(x) - d2 * b1.at(x) - d3).abs());
        sd = sd.max(d1.abs()).max(d2.abs()).max(d3.abs());
    }
    let ends = |f: &LinearFn| f.at(0.0).abs().max(f.at(1.0).abs());
    let sa = ends(&a1).max(ends(&a2));
    let sb = ends(&b1).max(ends(&b2)).max(1.0);
    let alpha_positive = [a1, a2].iter().all(|f| f.at(0.0) > 0.0 && f.at(1.0) > 0.0);
    let residual_alpha = ra / (sd * sa).max(f64::MIN_POSITIVE);
    let residual_beta = rb / (sd * sb).max(f64::MIN_POSITIVE);
    AsG1Report {
        residual_alpha,
        residual_beta,
        alpha_positive,
        tol,
        pass: alpha_positive && residual_alpha <= tol && residual_beta <= tol,
    }
}

fn smallest_right_singular(a: &DMatrix<f64>) -> DVector<f64> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let (imin, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
            );
    vt.row(imin).transpose()
}

/// `argmin_t max_i |c_i + s_i t|` for lines `(c_i, s_i)`.
///
/// The objective is convex and piecewise linear, so a minimizer lies at a zero
/// of one line or where two lines meet in absolute value. Ties go to smaller `|t|`.
fn minimax_shift(lines: &[(f64, f64)]) -> f64 {
    let obj = |t: f64| {
        lines
            .iter()
            .fold(0.0f64, |m, &(c, s)| m.max((c + s * t).abs()))
    };
    let mut cands = vec![0.0];
    for (i, &(ci, si)) in lines.iter().enumerate() {
        if si != 0.0 {
            cands.push(-ci / si);
        }
        for &(cj, sj) in &lines[i + 1..] {
            if si != sj {
                cands.push((cj - ci) / (si - sj));
            }
            if si + sj != 0.0 {
                cands.push(-(ci + cj) / (si + sj));
            }
        }
    }
    let mut best = (obj(0.0), 0.0f64);
    for t in cands {
        let v = obj(t);
        let tol = 1e-14 * best.0.max(1e-300);
        if v < best.0 - tol || (v <= best.0 + tol && t.abs() < best.1.abs()) {
            best = (v, t);
        }
    }
    best.1
}

/// Normalized gluing data from sampled determinants, in left coordinates.
///
/// Returns `(α₁, α̃₂, β₁, β̃₂, report)`.
pub fn recover_from(
    d: &dyn Fn(f64) -> (f64, f64, f64),
    tol: f64,
    index: usize,
) -> Result<(LinearFn, LinearFn, LinearFn, LinearFn, AsG1Report), GluingError> {
    let xs = chebyshev(N_SAMPLES);
    let ds: Vec<(f64, f64, f64)> = xs.iter().map(|&x| d(x)).collect();
    for (&x, &(d1, d2, _)) in xs.iter().zip(&ds) {
        for (which, value) in [(1, d1), (2, d2)] {
            if !(value > 0.0) {
                return Err(GluingError::NonPositiveDeterminant {
                    index,
                    which,
                    value,
                    xi: x,
                });
            }
        }
    }
    let sd = ds
        .iter()
        .fold(0.0f64, |m, &(a, b, c)| m.max(a).max(b).max(c.abs()));
    let mut a = DMatrix::zeros(N_SAMPLES, 4);
    let mut rhs = DVector::zeros(N_SAMPLES);
    for (r, (&x, &(d1, d2, d3))) in xs.iter().zip(&ds).enumerate() {
        a[(r, 0)] = -d2 / sd;
        a[(r, 1)] = -d2 * x / sd;
        a[(r, 2)] = d1 / sd;
        a[(r, 3)] = d1 * x / sd;
        rhs[r] = d3 / sd;
    }
    let ratios: Vec<f64> = ds.iter().map(|&(d1, d2, _)| d1 / d2).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let constant_ratio = ratios.iter().all(|r| (r - mean).abs() <= tol * mean);

    let (a1, a2) = if constant_ratio {
        let f = 1.0 / mean.min(1.0);
        (LinearFn::constant(mean * f), LinearFn::constant(f))
    } else {
        let v = smallest_right_singular(&a);
        let mut a1 = LinearFn::new(v[0], v[1]);
        let mut a2 = LinearFn::new(v[2], v[3]);
        if a1.at(0.5) < 0.0 {
            a1 = a1.scale(-1.0);
            a2 = a2.scale(-1.0);
        }
        let ends = [a1.at(0.0), a1.at(1.0), a2.at(0.0), a2.at(1.0)];
        if ends.iter().any(|&e| !(e > 0.0)) {
            return Err(GluingError::AlphaSign { index });
        }
        let m = ends.iter().copied().fold(f64::INFINITY, f64::min);
        (a1.scale(1.0 / m), a2.scale(1.0 / m))
    };

    let (b1, b2) = if constant_ratio {
        // D₁ = m D₂ reduces the β relation to m β₂ - β₁ = D₃ / D₂ =: q, with
        // β₂ free; the two endpoints then decouple.
        let mut g = Matrix2::zeros();
        let mut r = Vector2::zeros();
        for (&x, &(_, d2, d3)) in xs.iter().zip(&ds) {
            let row = Vector2::new(1.0, x);
            g += row * row.transpose();
            r += row * (d3 / d2);
        }
        let q = g.lu().solve(&r).ok_or(GluingError::Singular { index })?;
        let (q0, q1) = (q[0], q[0] + q[1]);
        let a = minimax_shift(&[(-q0, mean), (0.0, 1.0)]);
        let b = minimax_shift(&[(-q1, mean), (0.0, 1.0)]);
        (
            LinearFn::from_endpoints(mean * a - q0, mean * b - q1),
            LinearFn::from_endpoints(a, b),
        )
    } else {
        let svd = a.svd(true, true);
        let cutoff = 1e-10 * svd.singular_values.max();
        let part = svd
            .solve(&rhs, cutoff)
            .map_err(|_| GluingError::Singular { index })?;
        let ends = [part[0], part[0] + part[1], part[2], part[2] + part[3]];
        let slopes = [a1.at(0.0), a1.at(1.0), a2.at(0.0), a2.at(1.0)];
        let lines: Vec<(f64, f64)> = ends.iter().copied().zip(slopes).collect();
        let l = minimax_shift(&lines);
        (
            LinearFn::from_endpoints(ends[0] + l * slopes[0], ends[1] + l * slopes[1]),
            LinearFn::from_endpoints(ends[2] + l * slopes[2], ends[3] + l * slopes[3]),
        )
    };
    let report = certify(d, a1, a2, b1, b2, tol);
    Ok((a1, a2, b1, b2, report))
}

fn to_interface_gluing(
    iface: &Interface,
    a1: LinearFn,
    a2: LinearFn,
    b1: LinearFn,
    b2: LinearFn,
    report: AsG1Report,
) -> InterfaceGluing {
    let own = |f: LinearFn| if iface.reversed { f.reflected() } else { f };
    InterfaceGluing {
        left: EdgeGluing {
            alpha: a1,
            beta: b1,
        },
        right: EdgeGluing {
            alpha: own(a2),
            beta: own(b2),
        },
        report,
    }
}

/// Normalized gluing data of interface `index` of `m`.
pub fn recover_gluing(
    m: &MultiPatch,
    index: usize,
    tol: f64,
) -> Result<InterfaceGluing, GluingError> {
    let iface = &m.interfaces[index];
    let d = |x: f64| interface_determinants(m, iface, x);
    let (a1, a2, b1, b2, report) = recover_from(&d, tol, index)?;
    Ok(to_interface_gluing(iface, a1, a2, b1, b2, report))
}

/// Interpolated `α`'s and regularized least-squares `β`'s from sampled
/// determinants, in left coordinates.
pub fn fit_from(
    d: &dyn Fn(f64) -> (f64, f64, f64),
    breaks: &[f64],
    lambda: f64,
    tol: f64,
    index: usize,
) -> Result<(LinearFn, LinearFn, LinearFn, LinearFn, AsG1Report), GluingError> {
    let (d10, d20, d30) = d(0.0);
    let (d11, d21, d31) = d(1.0);
    for (which, value, xi) in [(1, d10, 0.0), (1, d11, 1.0), (2, d20, 0.0), (2, d21, 1.0)] {
        if !(value > 0.0) {
            return Err(GluingError::NonPositiveDeterminant {
                index,
                which,
                value,
                xi,
            });
        }
    }
    let a1 = LinearFn::from_endpoints(d10, d11);
    let a2 = LinearFn::from_endpoints(d20, d21);
    // unknowns (b1⁰, b1¹, b2⁰, b2¹) in endpoint form; B = α₁β₂ - α₂β₁
    let phi = |x: f64| -> [f64; 4] {
        let (l0, l1) = (1.0 - x, x);
        [-a2.at(x) * l0, -a2.at(x) * l1, a1.at(x) * l0, a1.at(x) * l1]
    };
    let rule = GaussRule::new(8);
    let mut h = DMatrix::zeros(6, 6);
    let mut g = DVector::zeros(6);
    for w in breaks.windows(2) {
        for (x, wt) in rule.on(w[0], w[1]) {
            let f = phi(x);
            let (_, _, d3) = d(x);
            let hat = [1.0 - x, x];
            for i in 0..4 {
                g[i] += wt * d3 * f[i];
                for j in 0..4 {
                    h[(i, j)] += wt * f[i] * f[j];
                }
            }
            for blk in [0, 2] {
                for i in 0..2 {
                    for j in 0..2 {
                        h[(blk + i, blk + j)] += lambda * wt * hat[i] * hat[j];
                    }
                }
            }
        }
    }
    let (c0, c1) = (phi(0.0), phi(1.0));
    for k in 0..4 {
        h[(4, k)] = c0[k];
        h[(k, 4)] = c0[k];
        h[(5, k)] = c1[k];
        h[(k, 5)] = c1[k];
    }
    g[4] = d30;
    g[5] = d31;
    let sol = h.lu().solve(&g).ok_or(GluingError::Singular { index })?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(GluingError::Singular { index });
    }
    let b1 = LinearFn::from_endpoints(sol[0], sol[1]);
    let b2 = LinearFn::from_endpoints(sol[2], sol[3]);
    let report = certify(d, a1, a2, b1, b2, tol);
    Ok((a1, a2, b1, b2, report))
}

/// Data-fit term `∫ |D₃ - (α₁β₂ - α₂β₁)|²` of a fitted solution.
pub fn fit_misfit(
    d: &dyn Fn(f64) -> (f64, f64, f64),
    breaks: &[f64],
    a1: LinearFn,
    a2: LinearFn,
    b1: LinearFn,
    b2: LinearFn,
) -> f64 {
    let rule = GaussRule::new(8);
    breaks
        .windows(2)
        .flat_map(|w| rule.on(w[0], w[1]).collect::<Vec<_>>())
        .map(|(x, wt)| {
            let (_, _, d3) = d(x);
            wt * (d3 - (a1.at(x) * b2.at(x) - a2.at(x) * b1.at(x))).powi(2)
        })
        .sum()
}

/// Linear gluing data for a general interface by interpolation and
/// regularized least squares.
pub fn fit_linear_gluing(
    m: &MultiPatch,
    index: usize,
    lambda: f64,
) -> Result<InterfaceGluing, GluingError> {
    let iface = &m.interfaces[index];
    let d = |x: f64| interface_determinants(m, iface, x);
    let breaks = m.patches[iface.left.patch]
        .edge_partition(iface.left.side)
        .breakpoints()
        .to_vec();
    let (a1, a2, b1, b2, report) = fit_from(&d, &breaks, lambda, DEFAULT_TOL, index)?;
    Ok(to_interface_gluing(iface, a1, a2, b1, b2, report))
}

/// Gluing data of every edge of a multi-patch geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingSet {
    edges: Vec<[EdgeGluing; 4]>,
    pub interfaces: Vec<InterfaceGluing>,
}

impl GluingSet {
    /// Boundary defaults everywhere.
    pub fn boundary(n_patches: usize) -> Self {
        GluingSet {
            edges: vec![[EdgeGluing::boundary(); 4]; n_patches],
            interfaces: vec![],
        }
    }

    pub fn get(&self, patch: usize, side: Side) -> EdgeGluing {
        self.edges[patch][side.index() - 1]
    }

    pub fn n_patches(&self) -> usize {
        self.edges.len()
    }

    pub fn patch(&self, patch: usize) -> [EdgeGluing; 4] {
        self.edges[patch]
    }

    fn from_interfaces(m: &MultiPatch, list: Vec<InterfaceGluing>) -> Self {
        let mut s = GluingSet::boundary(m.patches.len());
        for (iface, g) in m.interfaces.iter().zip(&list) {
            s.edges[iface.left.patch][iface.left.side.index() - 1] = g.left;
            s.edges[iface.right.patch][iface.right.side.index() - 1] = g.right;
        }
        s.interfaces = list;
        s
    }

    /// Recovered data for every interface.
    pub fn recover(m: &MultiPatch, tol: f64) -> Result<Self, GluingError> {
        let list = (0..m.interfaces.len())
            .map(|i| recover_gluing(m, i, tol))
            .collect::<Result<_, _>>()?;
        Ok(Self::from_interfaces(m, list))
    }

    /// Least-squares fitted data for every interface.
    pub fn fit(m: &MultiPatch, lambda: f64) -> Result<Self, GluingError> {
        let list = (0..m.interfaces.len())
            .map(|i| fit_linear_gluing(m, i, lambda))
            .collect::<Result<_, _>>()?;
        Ok(Self::from_interfaces(m, list))
    }

    /// Whether every interface passed certification.
    pub fn certified(&self) -> bool {
        self.interfaces.iter().all(|g| g.report.pass)
    }
}

/// `max |d_i·∇G^(i) + (d_Î·∇G^(Î))∘e|` over `n` samples, relative to `max ‖∇G‖`.
pub fn g1_defect(m: &MultiPatch, index: usize, set: &GluingSet, n: usize) -> f64 {
    let iface = &m.interfaces[index];
    let gl = &m.patches[iface.left.patch].map;
    let gr = &m.patches[iface.right.patch].map;
    let el = set.get(iface.left.patch, iface.left.side);
    let er = set.get(iface.right.patch, iface.right.side);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let y = iface.edge_parameter_map(x);
        let (a, b) = iface.left.side.point(x);
        let (c, d) = iface.right.side.point(y);
        let jl = gl.jacobian(a, b);
        let jr = gr.jacobian(c, d);
        let vl = jl * Vector2::from(crossing_direction(&el, iface.left.side, x));
        let vr = jr * Vector2::from(crossing_direction(&er, iface.right.side, y));
        worst = worst.max((vl + vr).norm());
        scale = scale.max(jl.norm()).max(jr.norm());
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin, EdgeRef, GeometryMap, Patch};
    use crate::splines::Partition;
    use approx::assert_abs_diff_eq;

    fn pair(left: GeometryMap, right: GeometryMap) -> MultiPatch {
        let z = Partition::uniform(2).unwrap();
        MultiPatch::from_parts_unchecked(
            vec![
                Patch::new(left, [z.clone(), z.clone()]),
                Patch::new(right, [z.clone(), z]),
            ],
            vec![Interface {
                left: EdgeRef {
                    patch: 0,
                    side: Side::S2,
                },
                right: EdgeRef {
                    patch: 1,
                    side: Side::S4,
                },
                reversed: false,
            }],
        )
    }

    #[test]
    fn determinants_of_unit_squares() {
        let m = pair(
            GeometryMap::rectangle(0.0, 1.0, 0.0, 1.0),
            GeometryMap::rectangle(1.0, 2.0, 0.0, 1.0),
        );
        for i in 0..5 {
            let (d1, d2, d3) = interface_determinants(&m, &m.interfaces[0], i as f64 / 4.0);
            assert_abs_diff_eq!(d1, 1.0);
            assert_abs_diff_eq!(d2, 1.0);
            assert_abs_diff_eq!(d3, 0.0);
        }
        let m = pair(
            GeometryMap::rectangle(-1.0, 1.0, 0.0, 2.0),
            GeometryMap::rectangle(1.0, 2.0, 0.0, 1.0),
        );
        let (d1, d2, d3) = interface_determinants(&m, &m.interfaces[0], 0.3);
        assert_abs_diff_eq!(d1, 4.0);
        assert_abs_diff_eq!(d2, 1.0);
        assert_abs_diff_eq!(d3, 0.0);
    }

    #[test]
    fn recover_unit_squares() {
        let m = builtin("two_patch_square", 4).unwrap();
        let g = recover_gluing(&m, 0, DEFAULT_TOL).unwrap();
        for e in [g.left, g.right] {
            assert_abs_diff_eq!(e.alpha.at(0.0), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(e.alpha.at(1.0), 1.0, epsilon = 1e-14);
            assert!(e.beta.at(0.0).abs() < 1e-12 && e.beta.at(1.0).abs() < 1e-12);
        }
        assert!(g.report.residual_alpha <= 1e-12 && g.report.residual_beta <= 1e-12);
        assert!(g.report.pass);
    }

    #[test]
    fn recover_constant_ratio_two() {
        let d = |_x: f64| (2.0, 1.0, 0.0);
        let (a1, a2, _, _, rep) = recover_from(&d, DEFAULT_TOL, 0).unwrap();
        assert_eq!(a1, LinearFn::constant(2.0));
        assert_eq!(a2, LinearFn::constant(1.0));
        assert!(rep.pass);
    }

    #[test]
    fn crossing_direction_examples() {
        let unit = EdgeGluing::boundary();
        assert_eq!(crossing_direction(&unit, Side::S1, 0.3), [0.0, -1.0]);
        let two = EdgeGluing {
            alpha: LinearFn::constant(2.0),
            beta: LinearFn::constant(0.0),
        };
        assert_eq!(crossing_direction(&two, Side::S2, 0.6), [0.5, 0.0]);
        let g = EdgeGluing {
            alpha: LinearFn::new(1.0, 1.0),
            beta: LinearFn::new(0.0, 1.0),
        };
        assert_eq!(crossing_direction(&g, Side::S1, 1.0), [-0.5, -0.5]);
    }

    #[test]
    fn fit_on_squares_gives_zero_beta() {
        let m = pair(
            GeometryMap::rectangle(0.0, 1.0, 0.0, 1.0),
            GeometryMap::rectangle(1.0, 2.0, 0.0, 1.0),
        );
        for lambda in [1e-2, 1e-6] {
            let g = fit_linear_gluing(&m, 0, lambda).unwrap();
            assert_abs_diff_eq!(g.left.alpha.at(0.3), 1.0, epsilon = 1e-14);
            assert!(g.left.beta.at(0.0).abs() < 1e-14 && g.right.beta.at(1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fit_constant_d3_splits_symmetrically() {
        // D₁ = D₂ = 1, D₃ = c: β₂ - β₁ = c with minimal norm
        let c = 0.8;
        let d = move |_x: f64| (1.0, 1.0, c);
        let (_, _, b1, b2, _) = fit_from(&d, &[0.0, 1.0], 1e-6, DEFAULT_TOL, 0).unwrap();
        assert_abs_diff_eq!(b1.at(0.2), -c / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b2.at(0.7), c / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn boundary_defaults() {
        let m = builtin("two_patch_square", 4).unwrap();
        let s = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
        for e in m.boundary_edges() {
            let g = s.get(e.patch, e.side);
            assert_eq!(g, EdgeGluing::boundary());
            assert_eq!(crossing_direction(&g, e.side, 0.4), e.side.normal());
        }
    }

    #[test]
    fn builtin_interfaces_certify() {
        for name in ["two_patch_skew", "three_patch_L"] {
            let m = builtin(name, 4).unwrap();
            let s = GluingSet::recover(&m, DEFAULT_TOL).unwrap();
            assert!(s.certified(), "{name}: {:?}", s.interfaces);
            for i in 0..m.interfaces.len() {
                let e = g1_defect(&m, i, &s, 50);
                assert!(e <= 1e-9, "{name} {i}: {e:e}");
            }
        }
        let m = builtin("two_patch_skew", 4).unwrap();
        let g = recover_gluing(&m, 0, DEFAULT_TOL).unwrap();
        assert!(g.left.beta.at(0.0).abs() > 1e-3 || g.left.beta.at(1.0).abs() > 1e-3);
    }
}
