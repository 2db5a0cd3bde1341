//! Target functions with mixed partial derivatives, their restrictions to
//! parameter edges, and pullbacks through geometry maps.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{GeometryError, GeometryMap, Side};
use crate::gluing::EdgeGluing;
use crate::splines::UniSpline;

/// Highest total derivative order carried by a [`Jet`].
pub const JET_ORDER: usize = 4;
const JN: usize = JET_ORDER + 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("side index {0} is not in 1..=4")]
    InvalidSide(usize),
    #[error("gluing function alpha vanishes or changes sign on [0, 1] (alpha(0) = {a0}, alpha(1) = {a1})")]
    AlphaNotPositive { a0: f64, a1: f64 },
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Truncated bivariate Taylor polynomial: `c[i][j] = ∂₁^i ∂₂^j f / (i! j!)`
/// for `i + j <= JET_ORDER`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [[f64; JN]; JN],
}

impl Jet {
    pub fn zero() -> Self {
        Jet { c: [[0.0; JN]; JN] }
    }

    pub fn constant(v: f64) -> Self {
        let mut j = Jet::zero();
        j.c[0][0] = v;
        j
    }

    /// Builds a jet from partial derivatives `f(a, b) = ∂₁^a ∂₂^b`.
    pub fn from_partials(f: impl Fn(usize, usize) -> f64) -> Self {
        let mut j = Jet::zero();
        for a in 0..JN {
            for b in 0..JN - a {
                j.c[a][b] = f(a, b) / (factorial(a) * factorial(b));
            }
        }
        j
    }

    /// `∂₁^a ∂₂^b` at the expansion point.
    pub fn partial(&self, a: usize, b: usize) -> f64 {
        assert!(
            a + b <= JET_ORDER,
            "jet carries derivatives up to total order {JET_ORDER}"
        );
        self.c[a][b] * factorial(a) * factorial(b)
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for a in 0..JN {
            for b in 0..JN - a {
                r.c[a][b] += o.c[a][b];
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut r = *self;
        for a in 0..JN {
            for b in 0..JN - a {
                r.c[a][b] *= s;
            }
        }
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = Jet::zero();
        for a in 0..JN {
            for b in 0..JN - a {
                let x = self.c[a][b];
                if x == 0.0 {
                    continue;
                }
                for c in 0..JN - a - b {
                    for d in 0..JN - a - b - c {
                        r.c[a + c][b + d] += x * o.c[c][d];
                    }
                }
            }
        }
        r
    }

    /// `self / o`; `o` must have a non-zero value.
    pub fn div(&self, o: &Jet) -> Jet {
        let mut q = Jet::zero();
        let o0 = o.c[0][0];
        for deg in 0..JN {
            for a in 0..=deg {
                let b = deg - a;
                let mut s = self.c[a][b];
                for i in 0..=a {
                    for j in 0..=b {
                        if i + j == 0 {
                            continue;
                        }
                        s -= o.c[i][j] * q.c[a - i][b - j];
                    }
                }
                q.c[a][b] = s / o0;
            }
        }
        q
    }

    /// Same jet with the constant term removed.
    pub fn increment(&self) -> Jet {
        let mut r = *self;
        r.c[0][0] = 0.0;
        r
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// A function of one variable with derivatives.
pub trait ScalarField1D: Sync {
    /// `d`-th derivative at `x`.
    fn deriv(&self, x: f64, d: usize) -> f64;
}

/// A function of two variables with mixed partial derivatives.
pub trait ScalarField2D: Sync {
    /// `∂₁^a ∂₂^b` at `(x, y)`.
    fn partial(&self, x: f64, y: f64, a: usize, b: usize) -> f64;

    /// All partials of total order up to [`JET_ORDER`] at once.
    fn jet(&self, x: f64, y: f64) -> Jet {
        Jet::from_partials(|a, b| self.partial(x, y, a, b))
    }

    /// Several partials at one point.
    fn partials(&self, x: f64, y: f64, orders: &[(usize, usize)], out: &mut [f64]) {
        for (o, &(a, b)) in out.iter_mut().zip(orders) {
            *o = self.partial(x, y, a, b);
        }
    }
}

/// Adapter turning a closure `(x, d) -> f^{(d)}(x)` into a field.
pub struct Fn1D<F>(pub F);

impl<F: Fn(f64, usize) -> f64 + Sync> ScalarField1D for Fn1D<F> {
    fn deriv(&self, x: f64, d: usize) -> f64 {
        (self.0)(x, d)
    }
}

/// Adapter turning a closure `(x, y, a, b) -> ∂₁^a ∂₂^b f` into a field.
pub struct Fn2D<F>(pub F);

impl<F: Fn(f64, f64, usize, usize) -> f64 + Sync> ScalarField2D for Fn2D<F> {
    fn partial(&self, x: f64, y: f64, a: usize, b: usize) -> f64 {
        (self.0)(x, y, a, b)
    }
}

impl ScalarField1D for UniSpline {
    fn deriv(&self, x: f64, d: usize) -> f64 {
        self.eval_clamped(x, d)
    }
}

/// Polynomial `sum c[i][j] x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial2D {
    pub c: Vec<Vec<f64>>,
}

impl Polynomial2D {
    pub fn new(c: Vec<Vec<f64>>) -> Self {
        Polynomial2D { c }
    }
}

impl ScalarField2D for Polynomial2D {
    fn partial(&self, x: f64, y: f64, a: usize, b: usize) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.c.iter().enumerate() {
            if i < a {
                continue;
            }
            let fx = falling(i, a) * x.powi((i - a) as i32);
            for (j, &cij) in row.iter().enumerate() {
                if j < b || cij == 0.0 {
                    continue;
                }
                s += cij * fx * falling(j, b) * y.powi((j - b) as i32);
            }
        }
        s
    }
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

/// Closed-form test functions on the physical domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Manufactured {
    /// `sin(πx) sin(πy)`
    SinSin,
    /// `(x² + y²)²`
    Poly4,
    /// `exp(x + 2y)`
    ExpXY,
    Polynomial(Polynomial2D),
}

impl Manufactured {
    /// Registry names accepted by [`Manufactured::by_name`].
    pub const NAMES: [&'static str; 6] =
        ["sinsin", "poly4", "expxy", "constant", "linear", "cubic"];

    pub fn by_name(name: &str) -> Result<Self, FieldError> {
        Ok(match name {
            "sinsin" => Manufactured::SinSin,
            "poly4" => Manufactured::Poly4,
            "expxy" => Manufactured::ExpXY,
            "constant" => Manufactured::Polynomial(Polynomial2D::new(vec![vec![5.0]])),
            "linear" => {
                Manufactured::Polynomial(Polynomial2D::new(vec![vec![1.0, -0.5], vec![2.0]]))
            }
            "cubic" => Manufactured::Polynomial(Polynomial2D::new(vec![
                vec![1.0, -2.0, 0.5, -1.0],
                vec![1.0, 3.0, -1.0],
                vec![0.25, 1.0],
                vec![0.5],
            ])),
            _ => return Err(FieldError::UnknownFunction(name.to_string())),
        })
    }
}

fn sin_deriv(w: f64, x: f64, d: usize) -> f64 {
    w.powi(d as i32) * (w * x + d as f64 * PI / 2.0).sin()
}

impl ScalarField2D for Manufactured {
    fn partial(&self, x: f64, y: f64, a: usize, b: usize) -> f64 {
        match self {
            Manufactured::SinSin => sin_deriv(PI, x, a) * sin_deriv(PI, y, b),
            Manufactured::Poly4 => {
                let p = Polynomial2D::new(vec![
                    vec![0.0, 0.0, 0.0, 0.0, 1.0],
                    vec![],
                    vec![0.0, 0.0, 2.0],
                    vec![],
                    vec![1.0],
                ]);
                p.partial(x, y, a, b)
            }
            Manufactured::ExpXY => 2f64.powi(b as i32) * (x + 2.0 * y).exp(),
            Manufactured::Polynomial(p) => p.partial(x, y, a, b),
        }
    }
}

/// Trace of a field on side `j`, parameterized by the side's edge coordinate.
pub struct EdgeTrace<'a> {
    u: &'a dyn ScalarField2D,
    side: Side,
}

/// `u` restricted to side `j`, with tangential derivatives.
pub fn restrict_to_edge(u: &dyn ScalarField2D, side: Side) -> EdgeTrace<'_> {
    EdgeTrace { u, side }
}

/// Like [`restrict_to_edge`] with a numeric side index.
pub fn restrict_to_edge_index(
    u: &dyn ScalarField2D,
    j: usize,
) -> Result<EdgeTrace<'_>, FieldError> {
    let side = Side::from_index(j).ok_or(FieldError::InvalidSide(j))?;
    Ok(EdgeTrace { u, side })
}

impl ScalarField1D for EdgeTrace<'_> {
    fn deriv(&self, x: f64, d: usize) -> f64 {
        let (p, q) = self.side.point(x);
        let (a, b) = if self.side.along_first() {
            (d, 0)
        } else {
            (0, d)
        };
        self.u.partial(p, q, a, b)
    }
}

/// `(1/α)(n_j + β t_j)·∇u` along side `j`.
pub struct DirectionalEdgeField<'a> {
    u: &'a dyn ScalarField2D,
    side: Side,
    gluing: EdgeGluing,
}

pub fn directional_edge_field(
    u: &dyn ScalarField2D,
    side: Side,
    gluing: EdgeGluing,
) -> Result<DirectionalEdgeField<'_>, FieldError> {
    let (a0, a1) = (gluing.alpha.at(0.0), gluing.alpha.at(1.0));
    if !(a0 > 0.0 && a1 > 0.0) {
        return Err(FieldError::AlphaNotPositive { a0, a1 });
    }
    Ok(DirectionalEdgeField { u, side, gluing })
}

impl ScalarField1D for DirectionalEdgeField<'_> {
    fn deriv(&self, x: f64, d: usize) -> f64 {
        let (p, q) = self.side.point(x);
        let n = self.side.normal();
        let t = self.side.tangent();
        let first = self.side.along_first();
        let mut orders = Vec::with_capacity(2 * (d + 1));
        for m in 0..=d {
            let (a, b) = if first { (m, 0) } else { (0, m) };
            orders.push((a + 1, b));
            orders.push((a, b + 1));
        }
        let mut vals = vec![0.0; orders.len()];
        self.u.partials(p, q, &orders, &mut vals);
        let normal: Vec<f64> = (0..=d)
            .map(|m| n[0] * vals[2 * m] + n[1] * vals[2 * m + 1])
            .collect();
        let tang: Vec<f64> = (0..=d)
            .map(|m| t[0] * vals[2 * m] + t[1] * vals[2 * m + 1])
            .collect();
        let (alpha, beta) = (&self.gluing.alpha, &self.gluing.beta);
        let al = alpha.at(x);
        let be = beta.at(x);
        // numerator N = A + βT; then g α = N by the Leibniz rule for linear α
        let mut g = vec![0.0; d + 1];
        for m in 0..=d {
            let mut num = normal[m] + be * tang[m];
            if m >= 1 {
                num += m as f64 * beta.c1 * tang[m - 1];
                num -= m as f64 * alpha.c1 * g[m - 1];
            }
            g[m] = num / al;
        }
        g[d]
    }
}

/// `u ∘ G`: a physical field seen on the parameter square.
pub struct Pullback<'a> {
    u: &'a dyn ScalarField2D,
    map: &'a GeometryMap,
}

/// Pulls `u` back through `map`; the map must pass the 2-regularity sample check.
pub fn pullback<'a>(
    u: &'a dyn ScalarField2D,
    map: &'a GeometryMap,
) -> Result<Pullback<'a>, FieldError> {
    map.check_2regular(17)?;
    Ok(Pullback { u, map })
}

impl Pullback<'_> {
    pub fn map(&self) -> &GeometryMap {
        self.map
    }
}

impl ScalarField2D for Pullback<'_> {
    fn partial(&self, x: f64, y: f64, a: usize, b: usize) -> f64 {
        self.jet(x, y).partial(a, b)
    }

    fn jet(&self, x: f64, y: f64) -> Jet {
        let [gx, gy] = self.map.jet(x, y);
        let (px, py) = (gx.value(), gy.value());
        let uj = self.u.jet(px, py);
        let dx = gx.increment();
        let dy = gy.increment();
        let mut xp = [Jet::constant(1.0); JN];
        let mut yp = [Jet::constant(1.0); JN];
        for m in 1..JN {
            xp[m] = xp[m - 1].mul(&dx);
            yp[m] = yp[m - 1].mul(&dy);
        }
        let mut out = Jet::zero();
        for m in 0..JN {
            for n in 0..JN - m {
                let c = uj.c[m][n];
                if c != 0.0 {
                    out = out.add(&xp[m].mul(&yp[n]).scale(c));
                }
            }
        }
        out
    }

    fn partials(&self, x: f64, y: f64, orders: &[(usize, usize)], out: &mut [f64]) {
        let j = self.jet(x, y);
        for (o, &(a, b)) in out.iter_mut().zip(orders) {
            *o = j.partial(a, b);
        }
    }
}
