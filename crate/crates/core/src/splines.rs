//! Univariate B-spline spaces `S_{p,k,Z}` over breakpoint partitions and the
//! exact spline algebra used by the projectors.
//!
//! Algebraic operations (products with linear polynomials, degree raising,
//! refinement) go through polar forms: every target coefficient is the blossom
//! of a polynomial piece evaluated at the target knots, so no fitting is
//! involved.

use thiserror::Error;

const BREAK_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("a partition needs at least one element")]
    EmptyPartition,
    #[error("breakpoints must start at 0, end at 1 and increase strictly")]
    BadBreakpoints,
    #[error("invalid spline space: degree {p}, smoothness {k}")]
    BadSpace { p: usize, k: i32 },
    #[error("invalid knot vector: {0}")]
    BadKnots(String),
    #[error("evaluation point {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error("coefficient count {got} does not match dimension {want}")]
    CoefficientCount { got: usize, want: usize },
    #[error("degree 0 splines have no derivative in the space family")]
    ZeroDegree,
    #[error("discontinuous splines (k = -1) cannot be differentiated")]
    Discontinuous,
    #[error("source space is not contained in the target space")]
    NotNested,
    #[error("spaces differ")]
    SpaceMismatch,
    #[error("polynomial degree {deg} exceeds spline degree {p}")]
    PolynomialDegree { deg: usize, p: usize },
}

/// Strictly increasing breakpoints `0 = z_0 < ... < z_n = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breaks: Vec<f64>,
}

impl Partition {
    pub fn new(breaks: Vec<f64>) -> Result<Self, SplineError> {
        if breaks.len() < 2 {
            return Err(SplineError::EmptyPartition);
        }
        let ok = breaks[0] == 0.0
            && *breaks.last().unwrap() == 1.0
            && breaks.windows(2).all(|w| w[1] > w[0])
            && breaks.iter().all(|z| z.is_finite());
        if !ok {
            return Err(SplineError::BadBreakpoints);
        }
        Ok(Partition { breaks })
    }

    /// `n` equal elements.
    pub fn uniform(n: usize) -> Result<Self, SplineError> {
        if n == 0 {
            return Err(SplineError::EmptyPartition);
        }
        let mut b: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        b[n] = 1.0;
        Ok(Partition { breaks: b })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn n_elements(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Grid size `h_Z`: the longest element.
    pub fn h(&self) -> f64 {
        self.breaks
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.breaks[e], self.breaks[e + 1])
    }

    /// `(1 - z_n, ..., 1 - z_0)`.
    pub fn reverse(&self) -> Partition {
        let mut b: Vec<f64> = self.breaks.iter().rev().map(|z| 1.0 - z).collect();
        b[0] = 0.0;
        let n = b.len() - 1;
        b[n] = 1.0;
        Partition { breaks: b }
    }

    /// Dyadic refinement: every element is halved.
    pub fn refine(&self) -> Partition {
        let mut b = Vec::with_capacity(2 * self.breaks.len() - 1);
        for w in self.breaks.windows(2) {
            b.push(w[0]);
            b.push(0.5 * (w[0] + w[1]));
        }
        b.push(1.0);
        Partition { breaks: b }
    }

    /// Element containing `x`, right-continuous; `x = 1` maps to the last element.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n_elements();
        if x >= 1.0 {
            return n - 1;
        }
        match self.breaks.binary_search_by(|z| z.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Whether every breakpoint of `self` is (up to 1e-12) a breakpoint of `other`.
    pub fn is_coarsening_of(&self, other: &Partition) -> bool {
        self.breaks.iter().all(|z| other.has_breakpoint(*z))
    }

    pub fn has_breakpoint(&self, z: f64) -> bool {
        self.breaks.iter().any(|w| (w - z).abs() <= BREAK_TOL)
    }

    /// Equal up to 1e-12 per breakpoint.
    pub fn approx_eq(&self, other: &Partition) -> bool {
        self.breaks.len() == other.breaks.len()
            && self
                .breaks
                .iter()
                .zip(&other.breaks)
                .all(|(a, b)| (a - b).abs() <= BREAK_TOL)
    }
}

/// Open knot vector on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Validates an open (clamped) non-decreasing knot vector on [0, 1].
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self, SplineError> {
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(SplineError::BadKnots(format!(
                "need at least {} knots for degree {p}, got {}",
                2 * (p + 1),
                knots.len()
            )));
        }
        if knots.iter().any(|t| !t.is_finite()) || knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(SplineError::BadKnots(
                "knots must be finite and non-decreasing".into(),
            ));
        }
        let m = knots.len();
        if knots[..=p].iter().any(|&t| t != 0.0) || knots[m - p - 1..].iter().any(|&t| t != 1.0) {
            return Err(SplineError::BadKnots(format!(
                "knot vector must start with {} zeros and end with {} ones",
                p + 1,
                p + 1
            )));
        }
        let interior = &knots[p + 1..m - p - 1];
        if interior.iter().any(|&t| t <= 0.0 || t >= 1.0) {
            return Err(SplineError::BadKnots(
                "interior knots must lie in (0, 1)".into(),
            ));
        }
        let mut i = 0;
        while i < interior.len() {
            let mut j = i;
            while j < interior.len() && interior[j] == interior[i] {
                j += 1;
            }
            if j - i > p + 1 {
                return Err(SplineError::BadKnots(
                    "interior multiplicity exceeds degree + 1".into(),
                ));
            }
            i = j;
        }
        Ok(KnotVector { degree, knots })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.knots.clone();
        b.dedup();
        b
    }

    /// Span index `mu` with `t_mu <= x < t_{mu+1}` (right limit), or the last
    /// non-empty span at `x = 1`.
    pub fn span(&self, x: f64) -> usize {
        let p = self.degree;
        let n = self.dim();
        if x >= self.knots[n] {
            let mut mu = n - 1;
            while self.knots[mu] >= self.knots[mu + 1] {
                mu -= 1;
            }
            return mu;
        }
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Derivatives `0..=nd` of the `p + 1` non-zero basis functions at `x`
    /// in span `mu`; entry `[d][j]` belongs to basis function `mu - p + j`.
    pub fn basis_ders(&self, mu: usize, x: f64, nd: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let t = &self.knots;
        let mut ders = vec![vec![0.0; p + 1]; nd + 1];
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[mu + 1 - j];
            right[j] = t[mu + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let top = nd.min(p);
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=top {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    let rk = rk as usize;
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                    d = a[s2][0] * ndu[rk][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize {
                    k - 1
                } else {
                    p - r
                };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut f = p as f64;
        for (k, row) in ders.iter_mut().enumerate().take(top + 1).skip(1) {
            for v in row.iter_mut() {
                *v *= f;
            }
            f *= (p - k) as f64;
        }
        ders
    }
}

/// `dim S_{p,k,Z} = (p+1) + (n-1)(p-k)`.
pub fn dimension(p: usize, k: i32, n_elements: usize) -> usize {
    (p + 1) + (n_elements - 1) * (p as i32 - k) as usize
}

/// The space `S_{p,k,Z}`: degree `p`, `C^k` at interior breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct UniSplineSpace {
    smoothness: i32,
    partition: Partition,
    knots: KnotVector,
}

impl UniSplineSpace {
    pub fn new(p: usize, k: i32, partition: Partition) -> Result<Self, SplineError> {
        if k < -1 || k >= p as i32 {
            return Err(SplineError::BadSpace { p, k });
        }
        let mult = (p as i32 - k) as usize;
        let mut t = vec![0.0; p + 1];
        for &z in &partition.breaks[1..partition.breaks.len() - 1] {
            t.extend(std::iter::repeat_n(z, mult));
        }
        t.extend(std::iter::repeat_n(1.0, p + 1));
        Ok(UniSplineSpace {
            smoothness: k,
            partition,
            knots: KnotVector {
                degree: p,
                knots: t,
            },
        })
    }

    pub fn degree(&self) -> usize {
        self.knots.degree
    }

    pub fn smoothness(&self) -> i32 {
        self.smoothness
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.knots.dim()
    }

    /// Index of the first non-zero basis function at `x` and the values of
    /// the `p + 1` non-zero basis derivatives of order `d`.
    pub fn basis(&self, x: f64, d: usize) -> (usize, Vec<f64>) {
        let p = self.degree();
        let mu = self.knots.span(x);
        if d > p {
            return (mu - p, vec![0.0; p + 1]);
        }
        let mut ders = self.knots.basis_ders(mu, x, d);
        (mu - p, ders.swap_remove(d))
    }

    /// Full basis vector of order-`d` derivatives at `x`.
    pub fn basis_vector(&self, x: f64, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        let (first, vals) = self.basis(x, d);
        v[first..first + vals.len()].copy_from_slice(&vals);
        v
    }

    /// Same space on the reversed partition.
    pub fn reversed(&self) -> UniSplineSpace {
        UniSplineSpace::new(self.degree(), self.smoothness, self.partition.reverse()).unwrap()
    }

    /// `S_{p',k',Z}` on the same partition.
    pub fn with(&self, p: usize, k: i32) -> Result<UniSplineSpace, SplineError> {
        UniSplineSpace::new(p, k, self.partition.clone())
    }

    /// Whether every element of `self` lies in `target`.
    pub fn is_subspace_of(&self, target: &UniSplineSpace) -> bool {
        if target.degree() < self.degree() || !self.partition.is_coarsening_of(&target.partition) {
            return false;
        }
        let interior = &self.partition.breaks[1..self.partition.breaks.len() - 1];
        interior.is_empty() || target.smoothness <= self.smoothness
    }

    /// Support `[t_i, t_{i+p+1}]` of basis function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        let t = &self.knots.knots;
        (t[i], t[i + self.degree() + 1])
    }

    /// Builds the spline whose coefficient `i` is `blossom(e, args)`, where
    /// `e` is an element inside the support of basis function `i` and `args`
    /// are the knots `t_{i+1}, ..., t_{i+p}`. Exact when the per-element
    /// polar forms describe a member of the space.
    pub fn from_blossoms(&self, blossom: impl Fn(usize, &[f64]) -> f64) -> UniSpline {
        let p = self.degree();
        let t = &self.knots.knots;
        let n = self.dim();
        let coefs = (0..n)
            .map(|i| {
                let mu = (i.max(p)..=(i + p).min(n - 1))
                    .find(|&mu| t[mu] < t[mu + 1])
                    .expect("every basis function has a non-empty span");
                let e = self.partition.locate(0.5 * (t[mu] + t[mu + 1]));
                blossom(e, &t[i + 1..i + p + 1])
            })
            .collect();
        UniSpline {
            space: self.clone(),
            coefs,
        }
    }

    /// Exact representation of the polynomial `sum_m mono[m] x^m`.
    pub fn polynomial(&self, mono: &[f64]) -> Result<UniSpline, SplineError> {
        let p = self.degree();
        let deg = mono.len().saturating_sub(1);
        if deg > p {
            return Err(SplineError::PolynomialDegree { deg, p });
        }
        Ok(self.from_blossoms(|_, u| {
            let e = elementary_symmetric(u);
            mono.iter()
                .enumerate()
                .map(|(m, a)| a * e[m] / binomial(p, m))
                .sum()
        }))
    }
}

fn elementary_symmetric(u: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; u.len() + 1];
    e[0] = 1.0;
    for (j, &x) in u.iter().enumerate() {
        for m in (1..=j + 1).rev() {
            e[m] += x * e[m - 1];
        }
    }
    e
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Polar form of a Bernstein polynomial on `[a, b]`.
fn bernstein_blossom(c: &[f64], a: f64, b: f64, args: &[f64]) -> f64 {
    debug_assert_eq!(c.len(), args.len() + 1);
    let mut w = c.to_vec();
    let len = b - a;
    for (r, u) in args.iter().enumerate() {
        let lam = (u - a) / len;
        for i in 0..w.len() - 1 - r {
            w[i] = (1.0 - lam) * w[i] + lam * w[i + 1];
        }
    }
    w[0]
}

fn elevate(c: &[f64]) -> Vec<f64> {
    let p = c.len() - 1;
    let q = (p + 1) as f64;
    (0..=p + 1)
        .map(|i| {
            let fi = i as f64;
            let lo = if i > 0 { fi / q * c[i - 1] } else { 0.0 };
            let hi = if i <= p { (q - fi) / q * c[i] } else { 0.0 };
            lo + hi
        })
        .collect()
}

/// An element of a [`UniSplineSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct UniSpline {
    space: UniSplineSpace,
    coefs: Vec<f64>,
}

impl UniSpline {
    pub fn new(space: UniSplineSpace, coefs: Vec<f64>) -> Result<Self, SplineError> {
        if coefs.len() != space.dim() {
            return Err(SplineError::CoefficientCount {
                got: coefs.len(),
                want: space.dim(),
            });
        }
        Ok(UniSpline { space, coefs })
    }

    pub fn zero(space: &UniSplineSpace) -> Self {
        UniSpline {
            coefs: vec![0.0; space.dim()],
            space: space.clone(),
        }
    }

    pub fn constant(space: &UniSplineSpace, c: f64) -> Self {
        UniSpline {
            coefs: vec![c; space.dim()],
            space: space.clone(),
        }
    }

    pub fn space(&self) -> &UniSplineSpace {
        &self.space
    }

    pub fn coefs(&self) -> &[f64] {
        &self.coefs
    }

    pub fn into_coefs(self) -> Vec<f64> {
        self.coefs
    }

    /// `d`-th derivative at `x`; right limits at breakpoints, left limit at 1.
    pub fn eval(&self, x: f64, d: usize) -> Result<f64, SplineError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(SplineError::OutOfDomain(x));
        }
        Ok(self.eval_clamped(x, d))
    }

    /// Like [`UniSpline::eval`] with `x` clamped into [0, 1].
    pub fn eval_clamped(&self, x: f64, d: usize) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let (first, vals) = self.space.basis(x, d);
        vals.iter()
            .zip(&self.coefs[first..])
            .map(|(b, c)| b * c)
            .sum()
    }

    /// Bernstein coefficients on the sub-interval `[a, b]` of one element.
    pub fn bernstein_on(&self, a: f64, b: f64) -> Vec<f64> {
        let p = self.space.degree();
        let mu = self.space.knots.span(0.5 * (a + b));
        (0..=p)
            .map(|l| {
                let mut args = vec![a; p - l];
                args.extend(std::iter::repeat_n(b, l));
                self.blossom(mu, &args)
            })
            .collect()
    }

    /// Polar form of the polynomial piece on span `mu`.
    fn blossom(&self, mu: usize, args: &[f64]) -> f64 {
        let p = self.space.degree();
        let t = &self.space.knots.knots;
        let mut d: Vec<f64> = self.coefs[mu - p..=mu].to_vec();
        for (r, &u) in args.iter().enumerate() {
            let r = r + 1;
            for j in (r..=p).rev() {
                let i = mu - p + j;
                let a = (u - t[i]) / (t[i + p + 1 - r] - t[i]);
                d[j] = (1.0 - a) * d[j - 1] + a * d[j];
            }
        }
        d[p]
    }

    /// Derivative in `S_{p-1,k-1,Z}`.
    pub fn derivative(&self) -> Result<UniSpline, SplineError> {
        let p = self.space.degree();
        if p == 0 {
            return Err(SplineError::ZeroDegree);
        }
        if self.space.smoothness < 0 {
            return Err(SplineError::Discontinuous);
        }
        let target = self.space.with(p - 1, self.space.smoothness - 1)?;
        let t = &self.space.knots.knots;
        let pf = p as f64;
        let coefs = (0..self.coefs.len() - 1)
            .map(|i| pf * (self.coefs[i + 1] - self.coefs[i]) / (t[i + p + 1] - t[i + 1]))
            .collect();
        Ok(UniSpline {
            space: target,
            coefs,
        })
    }

    /// The antiderivative in `S_{p+1,k+1,Z}` with value `c0` at 0.
    pub fn antiderivative(&self, c0: f64) -> Result<UniSpline, SplineError> {
        let p = self.space.degree() + 1;
        let target = self.space.with(p, self.space.smoothness + 1)?;
        let t = &target.knots.knots;
        let pf = p as f64;
        let mut coefs = Vec::with_capacity(target.dim());
        coefs.push(c0);
        for (i, g) in self.coefs.iter().enumerate() {
            let prev = coefs[i];
            coefs.push(prev + g * (t[i + p + 1] - t[i + 1]) / pf);
        }
        Ok(UniSpline {
            space: target,
            coefs,
        })
    }

    /// `(a + b ξ) f(ξ)` in `S_{p+1,k,Z}`.
    pub fn multiply_by_linear(&self, a: f64, b: f64) -> Result<UniSpline, SplineError> {
        let p = self.space.degree();
        let target = self.space.with(p + 1, self.space.smoothness)?;
        let pieces = self.pieces_on(&target.partition, |c, lo, hi| {
            let l0 = a + b * lo;
            let l1 = a + b * hi;
            let q = (p + 1) as f64;
            (0..=p + 1)
                .map(|i| {
                    let fi = i as f64;
                    let left = if i <= p {
                        (q - fi) / q * l0 * c[i]
                    } else {
                        0.0
                    };
                    let right = if i > 0 { fi / q * l1 * c[i - 1] } else { 0.0 };
                    left + right
                })
                .collect()
        });
        Ok(target.from_blossoms(|e, u| {
            let (lo, hi) = target.partition.element(e);
            bernstein_blossom(&pieces[e], lo, hi, u)
        }))
    }

    /// The same function represented in a superspace.
    pub fn embed(&self, target: &UniSplineSpace) -> Result<UniSpline, SplineError> {
        if !self.space.is_subspace_of(target) {
            return Err(SplineError::NotNested);
        }
        if self.space == *target {
            return Ok(self.clone());
        }
        let q = target.degree();
        let pieces = self.pieces_on(&target.partition, |c, _, _| {
            let mut c = c.to_vec();
            while c.len() < q + 1 {
                c = elevate(&c);
            }
            c
        });
        Ok(target.from_blossoms(|e, u| {
            let (lo, hi) = target.partition.element(e);
            bernstein_blossom(&pieces[e], lo, hi, u)
        }))
    }

    fn pieces_on(
        &self,
        partition: &Partition,
        map: impl Fn(&[f64], f64, f64) -> Vec<f64>,
    ) -> Vec<Vec<f64>> {
        (0..partition.n_elements())
            .map(|e| {
                let (lo, hi) = partition.element(e);
                map(&self.bernstein_on(lo, hi), lo, hi)
            })
            .collect()
    }

    /// `ξ ↦ f(1 - ξ)` on the reversed partition.
    pub fn reverse(&self) -> UniSpline {
        UniSpline {
            space: self.space.reversed(),
            coefs: self.coefs.iter().rev().copied().collect(),
        }
    }

    pub fn scale(&self, s: f64) -> UniSpline {
        UniSpline {
            space: self.space.clone(),
            coefs: self.coefs.iter().map(|c| s * c).collect(),
        }
    }

    /// `self + s * other` for splines in the same space.
    pub fn axpy(&self, s: f64, other: &UniSpline) -> Result<UniSpline, SplineError> {
        if self.space != other.space {
            return Err(SplineError::SpaceMismatch);
        }
        let coefs = self
            .coefs
            .iter()
            .zip(&other.coefs)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(UniSpline {
            space: self.space.clone(),
            coefs,
        })
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.coefs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
