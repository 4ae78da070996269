//! Dense storage for small symmetric matrices, square matrices and
//! symmetric third-order tensors (dimensions up to 16).

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 16;

/// Real symmetric n x n matrix with upper-triangle storage, so symmetry
/// holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    // row-major upper triangle: (i, j) with i <= j at i*n - i*(i-1)/2 + (j - i)
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Dimension(n));
        }
        Ok(Self {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    /// Builds from the upper triangle in row-major order (length n(n+1)/2).
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        if upper.len() != m.data.len() {
            return Err(Error::InvalidArgument(format!(
                "upper triangle needs {} entries, got {}",
                m.data.len(),
                upper.len()
            )));
        }
        m.data.copy_from_slice(upper);
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m.check_finite()?;
        Ok(m)
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in i..self.n {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - (i * i.saturating_sub(1)) / 2 + (j - i)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.data[self.offset(a, b)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let k = self.offset(a, b);
        self.data[k] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_offdiag(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn to_square(&self) -> SquareMat {
        let mut out = SquareMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }
}

/// Plain dense square matrix; used for eigenvector rotations and products.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMat {
    n: usize,
    data: Vec<f64>, // row-major
}

impl SquareMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &SquareMat) -> SquareMat {
        assert_eq!(self.n, other.n);
        let mut out = SquareMat::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SquareMat {
        let mut out = SquareMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Max absolute entry of (self - identity).
    pub fn distance_from_identity(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let t = if i == j { 1.0 } else { 0.0 };
                m = m.max((self.get(i, j) - t).abs());
            }
        }
        m
    }
}

/// Fully symmetric third-order tensor T[i][j][k] = T[perm(i,j,k)],
/// stored once per sorted index triple.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    n: usize,
    data: Vec<f64>,
}

impl SymTensor3 {
    pub fn zeros(n: usize) -> Self {
        let len = n * (n + 1) * (n + 2) / 6;
        Self {
            n,
            data: vec![0.0; len],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        let mut idx = [i, j, k];
        idx.sort_unstable();
        let [a, b, c] = idx;
        debug_assert!(c < self.n);
        // triples starting with a' < a, then pairs (b', k') within the block
        let tri = |m: usize| m * (m + 1) / 2;
        let mut off = 0;
        for ap in 0..a {
            off += tri(self.n - ap);
        }
        for bp in a..b {
            off += self.n - bp;
        }
        off + (c - b)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_matrix_symmetry_is_structural() {
        let mut m = SymMatrix::zeros(4).unwrap();
        m.set(1, 3, 2.5);
        assert_eq!(m.get(3, 1), 2.5);
        m.set(3, 1, -1.0);
        assert_eq!(m.get(1, 3), -1.0);
    }

    #[test]
    fn sym_matrix_upper_layout_round_trips() {
        for n in 2..=7 {
            let len = n * (n + 1) / 2;
            let upper: Vec<f64> = (0..len).map(|k| k as f64 + 1.0).collect();
            let m = SymMatrix::from_upper(n, &upper).unwrap();
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    assert_eq!(m.get(i, j), upper[k], "({i},{j}) in n={n}");
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn sym_matrix_rejects_bad_dims() {
        assert!(SymMatrix::zeros(1).is_err());
        assert!(SymMatrix::zeros(17).is_err());
        assert!(SymMatrix::zeros(2).is_ok());
        assert!(SymMatrix::zeros(16).is_ok());
    }

    #[test]
    fn sym_matrix_rejects_non_finite() {
        let r = SymMatrix::from_fn(3, |i, j| if (i, j) == (0, 2) { f64::NAN } else { 1.0 });
        assert!(matches!(r, Err(Error::NonFinite(0, 2))));
    }

    #[test]
    fn tensor_offsets_cover_all_triples_once() {
        for n in 2..=6 {
            let mut t = SymTensor3::zeros(n);
            let mut count = 0;
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        t.set(i, j, k, (count + 1) as f64);
                        count += 1;
                    }
                }
            }
            assert_eq!(count, n * (n + 1) * (n + 2) / 6);
            // every permutation reads the same slot
            assert_eq!(t.get(1, 0, 1), t.get(0, 1, 1));
            let mut seen = std::collections::HashSet::new();
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let v = t.get(i, j, k) as i64;
                        assert!(v > 0);
                        assert!(seen.insert(v), "slot reused for ({i},{j},{k})");
                    }
                }
            }
        }
    }

    #[test]
    fn square_mat_products() {
        let mut a = SquareMat::zeros(2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 3.0);
        a.set(1, 1, 4.0);
        let i = SquareMat::identity(2);
        assert_eq!(a.matmul(&i), a);
        assert!(i.distance_from_identity() == 0.0);
    }
}
