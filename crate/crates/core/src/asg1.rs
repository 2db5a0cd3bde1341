//! The patch-local projector `Π̂_AS` and the global projector `Π_AS`.
//!
//! On a patch with spaces `S_{p,k,𝐙}`,
//!
//! ```text
//! Π̂_AS u = Q u + Σ_{σ=0,1} Σ_{j=1..4} E_j^(σ) (P_j^(σ) u - (n_j·∇)^σ Q u)
//! ```
//!
//! where `P_j^(0)` interpolates the trace with `Π^(*)`, `P_j^(1)` recombines
//! the projected crossing derivative with the tangential derivative of
//! `P_j^(0) u`, and `E_j^(σ)` extends an edge spline by a boundary bubble.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;
use thiserror::Error;

use crate::fields::{
    directional_edge_field, pullback, restrict_to_edge, FieldError, ScalarField2D,
};
use crate::geometry::{GeometryError, MultiPatch, Patch, Side};
use crate::gluing::{crossing_direction, EdgeGluing, GluingSet};
use crate::ritz1d::{crossing_projector, star_projector, BoundaryBubble, RitzError};
use crate::splines::{Partition, SplineError, UniSpline, UniSplineSpace};
use crate::tensor::{tensor_project_q, TensorSpline, TensorSplineSpace};

pub const VALUE_TOL: f64 = 1e-10;
pub const D_TOL: f64 = 1e-9;
pub const C2_TOL: f64 = 1e-8;
const ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AsgError {
    #[error(transparent)]
    Ritz(#[from] RitzError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("degree {p} with smoothness {k} outside 3 <= k+2 <= p")]
    Space { p: usize, k: i32 },
    #[error("sigma must be 0 or 1, got {0}")]
    Sigma(usize),
    #[error("interface {index} is not certified AS-G1 (residuals {alpha:e}, {beta:e}); use force to override")]
    NotCertified { index: usize, alpha: f64, beta: f64 },
    #[error("gluing set has {got} patches, geometry has {want}")]
    GluingCount { got: usize, want: usize },
}

/// `E_j^(σ) g`: `g` along side `j` times the inward bubble `φ^(σ)`.
///
/// Sides 2 and 3 use the bubble of the reversed crossing partition.
pub fn extend(
    side: Side,
    sigma: usize,
    g: &UniSpline,
    partitions: &[Partition; 2],
    p: usize,
    k: i32,
) -> Result<TensorSpline, AsgError> {
    if sigma > 1 {
        return Err(AsgError::Sigma(sigma));
    }
    let dir = side.edge_dir();
    let edge_space = UniSplineSpace::new(p, k, partitions[dir].clone())?;
    let cross_space = UniSplineSpace::new(p, k, partitions[1 - dir].clone())?;
    let zc = &partitions[1 - dir];
    let bubble = if side.is_far() {
        BoundaryBubble::new(p, &zc.reverse(), sigma)?
            .spline
            .reverse()
    } else {
        BoundaryBubble::new(p, zc, sigma)?.spline
    };
    let sign = if sigma == 0 { 1.0 } else { -1.0 };
    let phi = bubble.embed(&cross_space)?.scale(sign);
    let g = g.embed(&edge_space)?;
    Ok(if side.along_first() {
        TensorSpline::outer(&g, &phi)
    } else {
        TensorSpline::outer(&phi, &g)
    })
}

/// `P_j^(0) u = Π^(*)_{p,k+1}` of the trace of `u` on side `j`.
pub fn edge_projector_p0(
    u: &dyn ScalarField2D,
    side: Side,
    p: usize,
    k: i32,
    z: &Partition,
) -> Result<UniSpline, AsgError> {
    Ok(star_projector(p, k, z)?.apply(&restrict_to_edge(u, side)))
}

/// `P_j^(1) u = α Π_{p-1,k}(d_j·∇u) - β t_j·∇P_j^(0) u`, in `S_{p,k}`.
pub fn edge_projector_p1(
    u: &dyn ScalarField2D,
    side: Side,
    gluing: EdgeGluing,
    p0: &UniSpline,
    p: usize,
    k: i32,
    z: &Partition,
) -> Result<UniSpline, AsgError> {
    let target = UniSplineSpace::new(p, k, z.clone())?;
    let crossing = crossing_projector(&UniSplineSpace::new(p - 1, k, z.clone())?)?;
    let dfield = directional_edge_field(u, side, gluing)?;
    let (a, b) = (gluing.alpha, gluing.beta);
    let first = crossing
        .apply(&dfield)
        .multiply_by_linear(a.c0, a.c1)?
        .embed(&target)?;
    let tangential = p0.derivative()?.scale(side.tangent_sign());
    let second = tangential.multiply_by_linear(b.c0, b.c1)?.embed(&target)?;
    Ok(first.axpy(-1.0, &second)?)
}

/// One term `E_j^(σ) f_j^(σ)` of the assembly.
#[derive(Debug, Clone)]
pub struct EdgeCorrection {
    pub side: Side,
    pub sigma: usize,
    /// `P_j^(σ) u`.
    pub target: UniSpline,
    /// `f_j^(σ) = P_j^(σ) u - (n_j·∇)^σ Q u`.
    pub edge: UniSpline,
    pub extension: TensorSpline,
}

#[derive(Debug, Clone)]
pub struct PatchProjection {
    pub patch: usize,
    pub q: TensorSpline,
    pub result: TensorSpline,
    pub corrections: Vec<EdgeCorrection>,
}

impl PatchProjection {
    /// `max |f_j^(σ)|` coefficient per correction, in assembly order.
    pub fn correction_norms(&self) -> Vec<f64> {
        self.corrections
            .iter()
            .map(|c| c.edge.max_abs_coef())
            .collect()
    }
}

/// `S_{p,k,𝐙}` of a patch.
pub fn patch_space(
    partitions: &[Partition; 2],
    p: usize,
    k: i32,
) -> Result<TensorSplineSpace, AsgError> {
    Ok(TensorSplineSpace::new(
        UniSplineSpace::new(p, k, partitions[0].clone())?,
        UniSplineSpace::new(p, k, partitions[1].clone())?,
    ))
}

/// `Π̂_AS u` of a parametric field on one patch.
pub fn patch_project(
    index: usize,
    partitions: &[Partition; 2],
    u: &dyn ScalarField2D,
    gluing: &[EdgeGluing; 4],
    p: usize,
    k: i32,
) -> Result<PatchProjection, AsgError> {
    if k < 1 || k + 2 > p as i32 {
        return Err(AsgError::Space { p, k });
    }
    let space = patch_space(partitions, p, k)?;
    let q = tensor_project_q(&space, u)?;
    let mut p0s = Vec::with_capacity(4);
    let mut corrections = Vec::with_capacity(8);
    for side in Side::ALL {
        let z = &partitions[side.edge_dir()];
        let p0 = edge_projector_p0(u, side, p, k, z)?;
        let edge = p0
            .embed(space.edge_space(side))?
            .axpy(-1.0, &q.trace(side))?;
        let extension = extend(side, 0, &edge, partitions, p, k)?;
        corrections.push(EdgeCorrection {
            side,
            sigma: 0,
            target: p0.clone(),
            edge,
            extension,
        });
        p0s.push(p0);
    }
    for side in Side::ALL {
        let z = &partitions[side.edge_dir()];
        let g = gluing[side.index() - 1];
        let p1 = edge_projector_p1(u, side, g, &p0s[side.index() - 1], p, k, z)?;
        let edge = p1.axpy(-1.0, &q.normal_derivative_trace(side))?;
        let extension = extend(side, 1, &edge, partitions, p, k)?;
        corrections.push(EdgeCorrection {
            side,
            sigma: 1,
            target: p1,
            edge,
            extension,
        });
    }
    let mut result = q.clone();
    for c in &corrections {
        result.axpy(1.0, &c.extension)?;
    }
    Ok(PatchProjection {
        patch: index,
        q,
        result,
        corrections,
    })
}

/// Value jump and `𝔡`-derivative jump on one interface.
#[derive(Debug, Clone, Serialize)]
pub struct InterfaceConformity {
    pub interface: usize,
    pub value_jump: f64,
    pub d_derivative_jump: f64,
    pub value_scale: f64,
    pub d_scale: f64,
    pub pass: bool,
}

/// Spread of physical value, gradient and Hessian over the patches at a vertex.
#[derive(Debug, Clone, Serialize)]
pub struct VertexConformity {
    pub point: [f64; 2],
    pub valence: usize,
    pub c2_defect: f64,
    pub pass: bool,
}

/// Boundary edge where the input vanishes (with or without its derivative).
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryConformity {
    pub patch: usize,
    pub side: usize,
    pub u_vanishes: bool,
    pub du_vanishes: bool,
    pub trace_sup: f64,
    pub d_trace_sup: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformityReport {
    pub interfaces: Vec<InterfaceConformity>,
    pub vertices: Vec<VertexConformity>,
    pub boundary: Vec<BoundaryConformity>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct GlobalProjection {
    pub p: usize,
    pub k: i32,
    pub patches: Vec<PatchProjection>,
    pub report: ConformityReport,
}

/// `Π_AS u` on every patch, with the conformity report at 50 samples per edge.
pub fn global_project(
    m: &MultiPatch,
    gluing: &GluingSet,
    u: &dyn ScalarField2D,
    p: usize,
    k: i32,
    force: bool,
) -> Result<GlobalProjection, AsgError> {
    if !force {
        if let Some((index, g)) = gluing
            .interfaces
            .iter()
            .enumerate()
            .find(|(_, g)| !g.report.pass)
        {
            return Err(AsgError::NotCertified {
                index,
                alpha: g.report.residual_alpha,
                beta: g.report.residual_beta,
            });
        }
    }
    let n = m.patches.len();
    if gluing.n_patches() != n {
        return Err(AsgError::GluingCount {
            got: gluing.n_patches(),
            want: n,
        });
    }
    let mut patches = Vec::with_capacity(n);
    for (i, patch) in m.patches.iter().enumerate() {
        let pb = pullback(u, &patch.map)?;
        patches.push(patch_project(
            i,
            &patch.partitions,
            &pb,
            &gluing.patch(i),
            p,
            k,
        )?);
    }
    let report = check_conformity(m, gluing, &patches, u, 50);
    Ok(GlobalProjection {
        p,
        k,
        patches,
        report,
    })
}

fn physical_gradient(patch: &Patch, f: &dyn ScalarField2D, x: f64, y: f64) -> Vector2<f64> {
    let j = patch.map.jacobian(x, y);
    let g = Vector2::new(f.partial(x, y, 1, 0), f.partial(x, y, 0, 1));
    j.transpose().try_inverse().map(|jt| jt * g).unwrap_or(g)
}

/// Physical value, gradient and Hessian of `f ∘ G⁻¹` at a parameter point.
fn physical_c2(
    patch: &Patch,
    f: &dyn ScalarField2D,
    x: f64,
    y: f64,
) -> (f64, Vector2<f64>, Matrix2<f64>) {
    let jets = patch.map.jet(x, y);
    let j = patch.map.jacobian(x, y);
    let jinv = j.try_inverse().unwrap_or_else(Matrix2::identity);
    let gh = Vector2::new(f.partial(x, y, 1, 0), f.partial(x, y, 0, 1));
    let grad = jinv.transpose() * gh;
    let mut h = Matrix2::new(
        f.partial(x, y, 2, 0),
        f.partial(x, y, 1, 1),
        f.partial(x, y, 1, 1),
        f.partial(x, y, 0, 2),
    );
    for (c, jet) in jets.iter().enumerate() {
        let hc = Matrix2::new(
            jet.partial(2, 0),
            jet.partial(1, 1),
            jet.partial(1, 1),
            jet.partial(0, 2),
        );
        h -= hc * grad[c];
    }
    (f.partial(x, y, 0, 0), grad, jinv.transpose() * h * jinv)
}

fn samples(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

/// Interface jumps, vertex `C²` agreement and boundary behavior of a projection.
pub fn check_conformity(
    m: &MultiPatch,
    gluing: &GluingSet,
    patches: &[PatchProjection],
    u: &dyn ScalarField2D,
    n: usize,
) -> ConformityReport {
    let mut interfaces = Vec::new();
    for (index, iface) in m.interfaces.iter().enumerate() {
        let (l, r) = (iface.left, iface.right);
        let (fl, fr) = (&patches[l.patch].result, &patches[r.patch].result);
        let (gl, gr) = (gluing.get(l.patch, l.side), gluing.get(r.patch, r.side));
        let (mut vj, mut dj, mut vs, mut ds) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for x in samples(n) {
            let y = iface.edge_parameter_map(x);
            let (a, b) = l.side.point(x);
            let (c, d) = r.side.point(y);
            let va = fl.eval(a, b, 0, 0);
            vj = vj.max((va - fr.eval(c, d, 0, 0)).abs());
            vs = vs.max(va.abs());
            let dl = crossing_direction(&gl, l.side, x);
            let dr = crossing_direction(&gr, r.side, y);
            let da = dl[0] * fl.eval(a, b, 1, 0) + dl[1] * fl.eval(a, b, 0, 1);
            let db = dr[0] * fr.eval(c, d, 1, 0) + dr[1] * fr.eval(c, d, 0, 1);
            dj = dj.max((da + db).abs());
            let phys_d = m.patches[l.patch].map.jacobian(a, b) * Vector2::from(dl);
            ds = ds.max(physical_gradient(&m.patches[l.patch], fl, a, b).norm() * phys_d.norm());
        }
        let pass = vj <= (VALUE_TOL * vs).max(ABS_FLOOR) && dj <= (D_TOL * ds).max(ABS_FLOOR);
        interfaces.push(InterfaceConformity {
            interface: index,
            value_jump: vj,
            d_derivative_jump: dj,
            value_scale: vs,
            d_scale: ds,
            pass,
        });
    }

    let mut vertices = Vec::new();
    for v in m.vertices() {
        let data: Vec<_> = v
            .corners
            .iter()
            .map(|&(pi, (x, y))| physical_c2(&m.patches[pi], &patches[pi].result, x, y))
            .collect();
        let (v0, g0, h0) = data[0];
        let scale = 1f64.max(v0.abs()).max(g0.norm()).max(h0.norm());
        let defect = data
            .iter()
            .map(|(vv, g, h)| (vv - v0).abs().max((g - g0).norm()).max((h - h0).norm()))
            .fold(0.0, f64::max)
            / scale;
        vertices.push(VertexConformity {
            point: v.point,
            valence: v.corners.len(),
            c2_defect: defect,
            pass: defect <= C2_TOL,
        });
    }

    let mut boundary = Vec::new();
    for e in m.boundary_edges() {
        let patch = &m.patches[e.patch];
        let f = &patches[e.patch].result;
        let nrm = e.side.normal();
        let (mut us, mut dus, mut ts, mut dts, mut scale) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for x in samples(n) {
            let (a, b) = e.side.point(x);
            let pt = patch.map.point(a, b);
            let j = patch.map.jacobian(a, b);
            let gu = Vector2::new(u.partial(pt[0], pt[1], 1, 0), u.partial(pt[0], pt[1], 0, 1));
            let uval = u.partial(pt[0], pt[1], 0, 0);
            us = us.max(uval.abs());
            dus = dus.max((j.transpose() * gu).dot(&Vector2::from(nrm)).abs());
            scale = scale.max(uval.abs()).max(gu.norm());
            ts = ts.max(f.eval(a, b, 0, 0).abs());
            dts = dts.max((nrm[0] * f.eval(a, b, 1, 0) + nrm[1] * f.eval(a, b, 0, 1)).abs());
        }
        let floor = ABS_FLOOR * scale.max(1.0);
        let u_vanishes = us <= floor;
        let du_vanishes = u_vanishes && dus <= floor;
        if !u_vanishes {
            continue;
        }
        let pass = ts <= VALUE_TOL.max(ABS_FLOOR) && (!du_vanishes || dts <= D_TOL);
        boundary.push(BoundaryConformity {
            patch: e.patch,
            side: e.side.index(),
            u_vanishes,
            du_vanishes,
            trace_sup: ts,
            d_trace_sup: dts,
            pass,
        });
    }
    let pass = interfaces.iter().all(|i| i.pass)
        && vertices.iter().all(|v| v.pass)
        && boundary.iter().all(|b| b.pass);
    ConformityReport {
        interfaces,
        vertices,
        boundary,
        pass,
    }
}
