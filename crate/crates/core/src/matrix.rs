//! Dense complex matrices in column-major storage.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SeedSpec;

/// An `n x n` complex Hermitian matrix with exactly real diagonal.
///
/// Hermitian symmetry is enforced at construction, so every value of this
/// type satisfies `h[i][j] == conj(h[j][i])` bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
    seed: Option<SeedSpec>,
}

impl HermitianMatrix {
    /// Builds the matrix from its lower triangle; `f(i, j)` is queried for
    /// `i >= j` and the upper triangle is filled by conjugation. The
    /// imaginary part of diagonal values is discarded.
    pub fn from_lower<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            data[j * n + j] = Complex64::new(f(j, j).re, 0.0);
            for i in j + 1..n {
                let v = f(i, j);
                data[j * n + i] = v;
                data[i * n + j] = v.conj();
            }
        }
        Ok(Self { n, data, seed: None })
    }

    /// Validates a dense row-major array of rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotHermitian(format!("row {i} has length {}", row.len())));
            }
            if row[i].im != 0.0 {
                return Err(Error::NotHermitian(format!("diagonal entry {i} is not real")));
            }
            for j in 0..i {
                if row[j] != rows[j][i].conj() {
                    return Err(Error::NotHermitian(format!("entries ({i},{j}) and ({j},{i})")));
                }
            }
        }
        Self::from_lower(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_lower(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn with_seed(mut self, seed: SeedSpec) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn seed(&self) -> Option<SeedSpec> {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.n + i]
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Maximum of `|h[i][j] - conj(h[j][i])|` together with the largest
    /// `|Im h[i][i]|`; zero for every value of this type.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            worst = worst.max(self.get(i, i).im.abs());
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (j, &vj) in v.iter().enumerate() {
            for (o, &h) in out.iter_mut().zip(self.column(j)) {
                *o += h * vj;
            }
        }
        out
    }

    /// The principal submatrix with row and column `k` removed.
    pub fn remove(&self, k: usize) -> Result<Self> {
        if self.n == 1 {
            return Err(Error::NoMinor);
        }
        if k >= self.n {
            return Err(Error::IndexOutOfRange { index: k, n: self.n });
        }
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k).collect();
        Self::from_lower(self.n - 1, |i, j| self.get(keep[i], keep[j]))
    }

    /// Column `k` with the diagonal entry dropped.
    pub fn stripped_column(&self, k: usize) -> Vec<Complex64> {
        self.column(k)
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &v)| v)
            .collect()
    }

    /// The same matrix with `delta` added to entry `(i, j)` and its mirror.
    pub fn perturbed(&self, i: usize, j: usize, delta: Complex64) -> Self {
        let mut out = self.clone();
        let n = self.n;
        if i == j {
            out.data[j * n + i] += Complex64::new(delta.re, 0.0);
        } else {
            out.data[j * n + i] += delta;
            out.data[i * n + j] += delta.conj();
        }
        out.seed = None;
        out
    }

    /// Rectangular block `rows x cols` copied out of the matrix.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> ComplexMatrix {
        let (r0, c0) = (rows.start, cols.start);
        ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j))
    }

    pub(crate) fn to_vec(&self) -> Vec<Complex64> {
        self.data.clone()
    }
}

/// General rectangular complex matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// The Gram matrix `X* X` (cols x cols).
    pub fn gram(&self) -> HermitianMatrix {
        HermitianMatrix::from_lower(self.cols.max(1), |i, j| {
            if self.cols == 0 {
                return Complex64::new(0.0, 0.0);
            }
            self.column(i)
                .iter()
                .zip(self.column(j))
                .map(|(a, b)| a.conj() * b)
                .sum()
        })
        .expect("non-empty gram")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_rows_rejects_non_hermitian() {
        let ok = vec![vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(2.0, -1.0), c(0.0, 0.0)]];
        assert!(HermitianMatrix::from_rows(&ok).is_ok());
        let bad = vec![vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(2.0, 1.0), c(0.0, 0.0)]];
        assert!(matches!(HermitianMatrix::from_rows(&bad), Err(Error::NotHermitian(_))));
        let bad_diag = vec![vec![c(1.0, 0.1)]];
        assert!(HermitianMatrix::from_rows(&bad_diag).is_err());
        assert_eq!(HermitianMatrix::from_rows(&[]), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn minor_and_stripped_column() {
        let h = HermitianMatrix::from_lower(3, |i, j| c((10 * i + j) as f64, if i == j { 0.0 } else { 1.0 })).unwrap();
        let b = h.remove(1).unwrap();
        assert_eq!(b.n(), 2);
        assert_eq!(b.get(1, 0), h.get(2, 0));
        assert_eq!(h.stripped_column(1), vec![h.get(0, 1), h.get(2, 1)]);
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert_eq!(
            HermitianMatrix::diagonal(&[1.0]).unwrap().remove(0),
            Err(Error::NoMinor)
        );
    }

    #[test]
    fn gram_of_orthonormal_columns_is_identity() {
        let x = ComplexMatrix::from_fn(3, 2, |i, j| if i == j { c(0.0, 1.0) } else { c(0.0, 0.0) });
        let g = x.gram();
        assert_eq!(g.get(0, 0), c(1.0, 0.0));
        assert_eq!(g.get(1, 0), c(0.0, 0.0));
    }
}
