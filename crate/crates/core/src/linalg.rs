//! Small direct solvers.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix is singular")]
    Singular,
}

/// Symmetric banded matrix stored by lower band.
#[derive(Debug, Clone)]
pub struct SymBand {
    n: usize,
    bw: usize,
    // row i holds entries (i, i - bw ..= i)
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBand {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Adds `v` to entry `(i, j)`; the symmetric partner is implied.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Banded Cholesky factorization `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<BandCholesky, LinalgError> {
        let (n, bw) = (self.n, self.bw);
        let mut l = SymBand::zeros(n, bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = self.get(i, j);
                let kk = lo.max(j.saturating_sub(bw));
                for k in kk..j {
                    s -= l.data[l.idx(i, k)] * l.data[l.idx(j, k)];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite { pivot: i, value: s });
                    }
                    let ii = l.idx(i, i);
                    l.data[ii] = s.sqrt();
                } else {
                    let ij = l.idx(i, j);
                    l.data[ij] = s / l.data[l.idx(j, j)];
                }
            }
        }
        Ok(BandCholesky { l })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    l: SymBand,
}

impl BandCholesky {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let l = &self.l;
        let (n, bw) = (l.n, l.bw);
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= l.data[l.idx(i, k)] * b[k];
            }
            b[i] = s / l.data[l.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n.min(i + bw + 1) {
                s -= l.data[l.idx(k, i)] * b[k];
            }
            b[i] = s / l.data[l.idx(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn banded_matches_dense() {
        let n = 9;
        let bw = 3;
        let mut a = SymBand::zeros(n, bw);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v = if i == j {
                    10.0 + i as f64
                } else {
                    1.0 / (1.0 + (i + 2 * j) as f64)
                };
                a.add(i, j, v);
                dense[(i, j)] = v;
                dense[(j, i)] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = b.clone();
        a.cholesky().unwrap().solve_in_place(&mut x);
        let want = dense.lu().solve(&DVector::from_vec(b)).unwrap();
        for i in 0..n {
            assert_abs_diff_eq!(x[i], want[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let mut a = SymBand::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 0, 2.0);
        a.add(1, 1, 1.0);
        assert!(matches!(
            a.cholesky(),
            Err(LinalgError::NotPositiveDefinite { pivot: 1, .. })
        ));
    }
}
