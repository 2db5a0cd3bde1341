//! Multi-patch planar geometry: patch maps `G^(i)` on the unit square, edge
//! frames, interfaces with their edge maps, and regularity checks.

mod catalog;
mod io;

pub use catalog::{builtin, BUILTIN_NAMES};
pub use io::{load_geometry, parse_geometry, save_geometry, to_json};

use nalgebra::Matrix2;
use thiserror::Error;

use crate::fields::Jet;
use crate::splines::{KnotVector, Partition, SplineError};

const JN: usize = crate::fields::JET_ORDER + 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{field}: {msg}")]
    Schema { field: String, msg: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("cannot access {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("non-positive Jacobian determinant {det:e} at ({x}, {y})")]
    SingularJacobian { x: f64, y: f64, det: f64 },
    #[error("interface {index}: edges do not match (gap {gap:e})")]
    NonMatching { index: usize, gap: f64 },
    #[error("interface {index}: edge partitions do not match")]
    PartitionMismatch { index: usize },
    #[error("interface {index}: orientation puts both patches on the same side of the edge")]
    Orientation { index: usize },
    #[error("interface {index}: patch index {patch} out of range")]
    PatchIndex { index: usize, patch: usize },
    #[error("edge ({patch}, {side}) appears in more than one interface")]
    DuplicateEdge { patch: usize, side: usize },
    #[error("patch {patch}: knots of direction {dir} are not breakpoints of the partition")]
    IncompatiblePartition { patch: usize, dir: usize },
    #[error("unknown geometry {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Sides of the parameter square: 1 bottom, 2 right, 3 top, 4 left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    S1 = 1,
    S2 = 2,
    S3 = 3,
    S4 = 4,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::S1, Side::S2, Side::S3, Side::S4];

    pub fn from_index(j: usize) -> Option<Side> {
        match j {
            1 => Some(Side::S1),
            2 => Some(Side::S2),
            3 => Some(Side::S3),
            4 => Some(Side::S4),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Outward unit normal `n_j`.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::S1 => [0.0, -1.0],
            Side::S2 => [1.0, 0.0],
            Side::S3 => [0.0, 1.0],
            Side::S4 => [-1.0, 0.0],
        }
    }

    /// `t_j = (n_{j,2}, -n_{j,1})`.
    pub fn tangent(self) -> [f64; 2] {
        let n = self.normal();
        [n[1], -n[0]]
    }

    /// Whether the edge parameter is `ξ1` (sides 1 and 3).
    pub fn along_first(self) -> bool {
        matches!(self, Side::S1 | Side::S3)
    }

    /// Parameter direction of the edge coordinate: 0 for `ξ1`, 1 for `ξ2`.
    pub fn edge_dir(self) -> usize {
        if self.along_first() {
            0
        } else {
            1
        }
    }

    /// `s_j` with `t_j·∇ = s_j ∂_edge`.
    pub fn tangent_sign(self) -> f64 {
        match self {
            Side::S1 | Side::S2 => -1.0,
            Side::S3 | Side::S4 => 1.0,
        }
    }

    /// Whether the side lies at parameter value 1 of the crossing direction.
    pub fn is_far(self) -> bool {
        matches!(self, Side::S2 | Side::S3)
    }

    /// Point of the parameter square at edge coordinate `x`.
    pub fn point(self, x: f64) -> (f64, f64) {
        match self {
            Side::S1 => (x, 0.0),
            Side::S2 => (1.0, x),
            Side::S3 => (x, 1.0),
            Side::S4 => (0.0, x),
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Tensor-product B-spline or NURBS map; control points are ordered with
/// `ξ1` running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMap {
    pub bases: [KnotVector; 2],
    pub control: Vec<[f64; 2]>,
    pub weights: Option<Vec<f64>>,
}

/// A patch parameterization `G : [0,1]² → ℝ²`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryMap {
    /// Corners `G(0,0), G(1,0), G(0,1), G(1,1)`.
    Bilinear {
        corners: [[f64; 2]; 4],
    },
    Tensor(TensorMap),
}

impl GeometryMap {
    pub fn identity() -> Self {
        GeometryMap::Bilinear {
            corners: [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
        }
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        GeometryMap::Bilinear {
            corners: [[x0, y0], [x1, y0], [x0, y1], [x1, y1]],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GeometryMap::Bilinear { .. } => "bilinear",
            GeometryMap::Tensor(t) if t.weights.is_some() => "nurbs",
            GeometryMap::Tensor(_) => "spline",
        }
    }

    /// Taylor jets of both components at `(x, y)`.
    pub fn jet(&self, x: f64, y: f64) -> [Jet; 2] {
        match self {
            GeometryMap::Bilinear { corners: c } => {
                let mut out = [Jet::zero(), Jet::zero()];
                for (k, o) in out.iter_mut().enumerate() {
                    let (c00, c10, c01, c11) = (c[0][k], c[1][k], c[2][k], c[3][k]);
                    let tw = c00 - c10 - c01 + c11;
                    o.c[0][0] = c00 * (1.0 - x) * (1.0 - y)
                        + c10 * x * (1.0 - y)
                        + c01 * (1.0 - x) * y
                        + c11 * x * y;
                    o.c[1][0] = (c10 - c00) + tw * y;
                    o.c[0][1] = (c01 - c00) + tw * x;
                    o.c[1][1] = tw;
                }
                out
            }
            GeometryMap::Tensor(t) => t.jet(x, y),
        }
    }

    pub fn point(&self, x: f64, y: f64) -> [f64; 2] {
        let j = self.jet(x, y);
        [j[0].value(), j[1].value()]
    }

    /// `∂₁^a ∂₂^b G`.
    pub fn derivative(&self, x: f64, y: f64, a: usize, b: usize) -> [f64; 2] {
        let j = self.jet(x, y);
        [j[0].partial(a, b), j[1].partial(a, b)]
    }

    /// Jacobian with columns `∂₁G` and `∂₂G`.
    pub fn jacobian(&self, x: f64, y: f64) -> Matrix2<f64> {
        let j = self.jet(x, y);
        Matrix2::new(j[0].c[1][0], j[0].c[0][1], j[1].c[1][0], j[1].c[0][1])
    }

    pub fn det(&self, x: f64, y: f64) -> f64 {
        self.jacobian(x, y).determinant()
    }

    /// Minimum Jacobian determinant over an `n × n` grid, failing at the
    /// first non-positive sample.
    pub fn check_2regular(&self, n: usize) -> Result<f64, GeometryError> {
        let n = n.max(2);
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
                let det = self.det(x, y);
                if !(det > 0.0) {
                    return Err(GeometryError::SingularJacobian { x, y, det });
                }
                min = min.min(det);
            }
        }
        Ok(min)
    }

    /// Breakpoints of the map in each direction (`[0, 1]` for bilinear maps).
    pub fn breakpoints(&self) -> [Vec<f64>; 2] {
        match self {
            GeometryMap::Bilinear { .. } => [vec![0.0, 1.0], vec![0.0, 1.0]],
            GeometryMap::Tensor(t) => [t.bases[0].breakpoints(), t.bases[1].breakpoints()],
        }
    }
}

impl TensorMap {
    pub fn new(
        bases: [KnotVector; 2],
        control: Vec<[f64; 2]>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self, GeometryError> {
        let want = bases[0].dim() * bases[1].dim();
        if control.len() != want {
            return Err(GeometryError::Schema {
                field: "control_points".into(),
                msg: format!("expected {want} points, got {}", control.len()),
            });
        }
        if let Some(w) = &weights {
            if w.len() != want {
                return Err(GeometryError::Schema {
                    field: "weights".into(),
                    msg: format!("expected {want} weights, got {}", w.len()),
                });
            }
            if w.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(GeometryError::Schema {
                    field: "weights".into(),
                    msg: "weights must be positive".into(),
                });
            }
        }
        Ok(TensorMap {
            bases,
            control,
            weights,
        })
    }

    fn jet(&self, x: f64, y: f64) -> [Jet; 2] {
        let (b1, b2) = (&self.bases[0], &self.bases[1]);
        let (p1, p2) = (b1.degree(), b2.degree());
        let (m1, m2) = (b1.span(x), b2.span(y));
        let d1 = b1.basis_ders(m1, x, JN - 1);
        let d2 = b2.basis_ders(m2, y, JN - 1);
        let n1 = b1.dim();
        let mut num = [Jet::zero(), Jet::zero()];
        let mut wj = Jet::zero();
        let fact = |n: usize| crate::fields::factorial(n);
        for a in 0..JN {
            for b in 0..JN - a {
                let mut s = [0.0; 3];
                for (i, da) in d1[a].iter().enumerate() {
                    for (j, db) in d2[b].iter().enumerate() {
                        let idx = (m2 - p2 + j) * n1 + (m1 - p1 + i);
                        let w = self.weights.as_ref().map_or(1.0, |w| w[idx]);
                        let f = da * db * w;
                        s[0] += f * self.control[idx][0];
                        s[1] += f * self.control[idx][1];
                        s[2] += f;
                    }
                }
                let scale = fact(a) * fact(b);
                num[0].c[a][b] = s[0] / scale;
                num[1].c[a][b] = s[1] / scale;
                wj.c[a][b] = s[2] / scale;
            }
        }
        if self.weights.is_some() {
            [num[0].div(&wj), num[1].div(&wj)]
        } else {
            num
        }
    }
}

/// A patch: map plus the partitions `(Z₁, Z₂)` of its spline space.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub map: GeometryMap,
    pub partitions: [Partition; 2],
}

impl Patch {
    pub fn new(map: GeometryMap, partitions: [Partition; 2]) -> Self {
        Patch { map, partitions }
    }

    /// `Z_j`: `Z₁` for sides 1 and 3, `Z₂` for sides 2 and 4.
    pub fn edge_partition(&self, side: Side) -> &Partition {
        &self.partitions[side.edge_dir()]
    }

    pub fn refined(&self) -> Patch {
        Patch {
            map: self.map.clone(),
            partitions: [self.partitions[0].refine(), self.partitions[1].refine()],
        }
    }

    /// Largest parametric element size.
    pub fn h(&self) -> f64 {
        self.partitions[0].h().max(self.partitions[1].h())
    }
}

/// `(patch, side)` reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub patch: usize,
    pub side: Side,
}

/// Identification of edge `left` with edge `right`; `reversed` flips the
/// edge coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub left: EdgeRef,
    pub right: EdgeRef,
    pub reversed: bool,
}

impl Interface {
    /// `e(ξ)`: neighbour edge coordinate of the left edge coordinate `ξ`.
    pub fn edge_parameter_map(&self, x: f64) -> f64 {
        if self.reversed {
            1.0 - x
        } else {
            x
        }
    }

    /// `±1` orientation factor of the edge map.
    pub fn rho(&self) -> f64 {
        if self.reversed {
            -1.0
        } else {
            1.0
        }
    }
}

/// Patches glued along interfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPatch {
    pub patches: Vec<Patch>,
    pub interfaces: Vec<Interface>,
}

/// Corners of the parameter square in counter-clockwise order.
pub const CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];

/// Patch corners sharing one physical point.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: [f64; 2],
    /// `(patch, parameter corner)` pairs.
    pub corners: Vec<(usize, (f64, f64))>,
}

impl MultiPatch {
    /// Validated multi-patch geometry.
    pub fn new(patches: Vec<Patch>, interfaces: Vec<Interface>) -> Result<Self, GeometryError> {
        let m = MultiPatch {
            patches,
            interfaces,
        };
        m.validate()?;
        Ok(m)
    }

    /// No validation; for constructing deliberately invalid configurations.
    pub fn from_parts_unchecked(patches: Vec<Patch>, interfaces: Vec<Interface>) -> Self {
        MultiPatch {
            patches,
            interfaces,
        }
    }

    pub fn single(patch: Patch) -> Self {
        MultiPatch {
            patches: vec![patch],
            interfaces: vec![],
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (pi, patch) in self.patches.iter().enumerate() {
            let bps = patch.map.breakpoints();
            for dir in 0..2 {
                if !bps[dir]
                    .iter()
                    .all(|z| patch.partitions[dir].has_breakpoint(*z))
                {
                    return Err(GeometryError::IncompatiblePartition {
                        patch: pi,
                        dir: dir + 1,
                    });
                }
            }
            patch.map.check_2regular(33)?;
        }
        let mut seen = std::collections::BTreeSet::new();
        let diam = self.diameter();
        for (index, iface) in self.interfaces.iter().enumerate() {
            for e in [iface.left, iface.right] {
                if e.patch >= self.patches.len() {
                    return Err(GeometryError::PatchIndex {
                        index,
                        patch: e.patch,
                    });
                }
                if !seen.insert(e) {
                    return Err(GeometryError::DuplicateEdge {
                        patch: e.patch,
                        side: e.side.index(),
                    });
                }
            }
            let gap = self.interface_gap(iface, 50);
            if !(gap <= 1e-10 * diam) {
                return Err(GeometryError::NonMatching { index, gap });
            }
            let zl = self.patches[iface.left.patch].edge_partition(iface.left.side);
            let zr = self.patches[iface.right.patch].edge_partition(iface.right.side);
            let zr = if iface.reversed {
                zr.reverse()
            } else {
                zr.clone()
            };
            if !zl.approx_eq(&zr) {
                return Err(GeometryError::PartitionMismatch { index });
            }
            let kappa =
                iface.left.side.tangent_sign() * iface.right.side.tangent_sign() * iface.rho();
            if kappa > 0.0 {
                return Err(GeometryError::Orientation { index });
            }
        }
        Ok(())
    }

    /// Largest distance between the two edge curves over `n` samples.
    pub fn interface_gap(&self, iface: &Interface, n: usize) -> f64 {
        let gl = &self.patches[iface.left.patch].map;
        let gr = &self.patches[iface.right.patch].map;
        (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                let (a, b) = iface.left.side.point(x);
                let (c, d) = iface.right.side.point(iface.edge_parameter_map(x));
                let p = gl.point(a, b);
                let q = gr.point(c, d);
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Edges not part of any interface.
    pub fn boundary_edges(&self) -> Vec<EdgeRef> {
        let used: std::collections::BTreeSet<EdgeRef> = self
            .interfaces
            .iter()
            .flat_map(|i| [i.left, i.right])
            .collect();
        (0..self.patches.len())
            .flat_map(|patch| Side::ALL.map(|side| EdgeRef { patch, side }))
            .filter(|e| !used.contains(e))
            .collect()
    }

    /// Diagonal of the bounding box of all patch boundaries.
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.patches {
            for side in Side::ALL {
                for i in 0..=32 {
                    let (x, y) = side.point(i as f64 / 32.0);
                    let q = p.map.point(x, y);
                    for k in 0..2 {
                        lo[k] = lo[k].min(q[k]);
                        hi[k] = hi[k].max(q[k]);
                    }
                }
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// Physical mesh size: max over mapped elements of the largest pairwise
    /// distance among 4 corners and 4 edge midpoints.
    pub fn physical_mesh_size(&self) -> f64 {
        let mut h: f64 = 0.0;
        for p in &self.patches {
            let (z1, z2) = (&p.partitions[0], &p.partitions[1]);
            for e1 in 0..z1.n_elements() {
                let (a1, b1) = z1.element(e1);
                for e2 in 0..z2.n_elements() {
                    let (a2, b2) = z2.element(e2);
                    let (m1, m2) = (0.5 * (a1 + b1), 0.5 * (a2 + b2));
                    let pts: Vec<[f64; 2]> = [
                        (a1, a2),
                        (b1, a2),
                        (b1, b2),
                        (a1, b2),
                        (m1, a2),
                        (b1, m2),
                        (m1, b2),
                        (a1, m2),
                    ]
                    .iter()
                    .map(|&(x, y)| p.map.point(x, y))
                    .collect();
                    for i in 0..pts.len() {
                        for j in 0..i {
                            let d = ((pts[i][0] - pts[j][0]).powi(2)
                                + (pts[i][1] - pts[j][1]).powi(2))
                            .sqrt();
                            h = h.max(d);
                        }
                    }
                }
            }
        }
        h
    }

    /// Dyadic refinement of every partition.
    pub fn refined(&self) -> MultiPatch {
        MultiPatch {
            patches: self.patches.iter().map(Patch::refined).collect(),
            interfaces: self.interfaces.clone(),
        }
    }

    /// Same geometry with uniform `n × n` partitions on every patch.
    pub fn with_uniform_partitions(&self, n: usize) -> Result<MultiPatch, GeometryError> {
        let z = Partition::uniform(n)?;
        let m = MultiPatch {
            patches: self
                .patches
                .iter()
                .map(|p| Patch::new(p.map.clone(), [z.clone(), z.clone()]))
                .collect(),
            interfaces: self.interfaces.clone(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Patch corners grouped by physical location.
    pub fn vertices(&self) -> Vec<Vertex> {
        let tol = 1e-9 * self.diameter().max(1e-300);
        let mut out: Vec<Vertex> = Vec::new();
        for (pi, p) in self.patches.iter().enumerate() {
            for c in CORNERS {
                let q = p.map.point(c.0, c.1);
                match out
                    .iter_mut()
                    .find(|v| (v.point[0] - q[0]).abs() <= tol && (v.point[1] - q[1]).abs() <= tol)
                {
                    Some(v) => v.corners.push((pi, c)),
                    None => out.push(Vertex {
                        point: q,
                        corners: vec![(pi, c)],
                    }),
                }
            }
        }
        out
    }

    /// Largest parametric element size over all patches.
    pub fn parametric_h(&self) -> f64 {
        self.patches.iter().map(Patch::h).fold(0.0, f64::max)
    }
}
