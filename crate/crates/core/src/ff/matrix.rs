//! Dense matrices over a [`Field`] with exact Gaussian elimination.

use super::field::Field;

/// Row-major dense matrix of field elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: FMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl FMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer does not match {rows}x{cols}");
        Self { rows, cols, data }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Self { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul<F: Field>(&self, other: &FMatrix, f: &F) -> FMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = FMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0 {
                    f.axpy(out.row_mut(i), other.row(k), a);
                }
            }
        }
        out
    }

    pub fn mul_vec<F: Field>(&self, v: &[u32], f: &F) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &FMatrix) -> FMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &FMatrix) -> FMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        FMatrix { rows: self.rows, cols, data }
    }

    pub fn rref<F: Field>(&self, f: &F) -> Rref {
        let mut data = self.data.clone();
        let pivots = f.rref_in_place(&mut data, self.rows, self.cols);
        Rref { matrix: FMatrix { rows: self.rows, cols: self.cols, data }, pivots }
    }

    pub fn rank<F: Field>(&self, f: &F) -> usize {
        // eliminate along the shorter side
        if self.rows > self.cols {
            self.transpose().rref(f).rank()
        } else {
            self.rref(f).rank()
        }
    }

    /// Basis of the right null space `{v : M v = 0}`, one vector per free column.
    pub fn kernel_basis<F: Field>(&self, f: &F) -> Vec<Vec<u32>> {
        let r = self.rref(f);
        kernel_from_rref(&r, f)
    }

    /// A particular solution of `M x = b`, or `None` if the system is inconsistent.
    pub fn solve<F: Field>(&self, b: &[u32], f: &F) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let aug = self.hstack(&FMatrix::from_vec(self.rows, 1, b.to_vec()));
        let r = aug.rref(f);
        if r.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &c) in r.pivots.iter().enumerate() {
            x[c] = r.matrix.get(i, self.cols);
        }
        Some(x)
    }
}

pub(crate) fn kernel_from_rref<F: Field>(r: &Rref, f: &F) -> Vec<Vec<u32>> {
    let cols = r.matrix.cols;
    let mut is_pivot = vec![false; cols];
    for &c in &r.pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0; cols];
        v[free] = 1;
        for (i, &c) in r.pivots.iter().enumerate() {
            v[c] = f.neg(r.matrix.get(i, free));
        }
        basis.push(v);
    }
    basis
}

/// Incrementally maintained echelon basis of a subspace of `F^n`.
///
/// Vectors are kept fully reduced against each other, so membership tests and
/// extensions are a single reduction pass.
#[derive(Clone, Debug)]
pub struct EchelonSpace {
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonSpace {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` modulo the span; the result is zero iff `v` lies in it.
    pub fn reduce<F: Field>(&self, v: &mut [u32], f: &F) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let a = v[c];
            if a != 0 {
                f.axpy(v, row, f.neg(a));
            }
        }
    }

    pub fn contains<F: Field>(&self, v: &[u32], f: &F) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w, f);
        w.iter().all(|&x| x == 0)
    }

    /// Add `v` to the span; returns true if the rank grew.
    pub fn insert<F: Field>(&mut self, v: &[u32], f: &F) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w, f);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[c]);
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let a = row[c];
            if a != 0 {
                f.axpy(row, &w, f.neg(a));
            }
        }
        let pos = self.pivots.partition_point(|&p| p < c);
        self.pivots.insert(pos, c);
        self.rows.insert(pos, w);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn identity_is_its_own_rref() {
        let f = f5();
        let r = FMatrix::identity(3).rref(&f);
        assert_eq!(r.matrix, FMatrix::identity(3));
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn zero_matrix_has_no_pivots() {
        let f = f5();
        let r = FMatrix::zeros(2, 4).rref(&f);
        assert!(r.pivots.is_empty());
        assert!(r.matrix.is_zero());
        assert_eq!(FMatrix::zeros(2, 4).kernel_basis(&f).len(), 4);
    }

    #[test]
    fn identity_kernel_is_empty() {
        assert!(FMatrix::identity(4).kernel_basis(&f5()).is_empty());
    }

    #[test]
    fn solve_identity_and_zero() {
        let f = f5();
        let b = vec![1, 4, 2];
        assert_eq!(FMatrix::identity(3).solve(&b, &f), Some(b.clone()));
        assert_eq!(FMatrix::zeros(2, 3).solve(&[0, 0], &f), Some(vec![0, 0, 0]));
        assert_eq!(FMatrix::zeros(2, 3).solve(&[0, 1], &f), None);
    }

    #[test]
    fn solve_two_by_two_by_substitution() {
        // 2x + 3y = 1, x + y = 2 over F_5 (determinant -1)
        let f = f5();
        let m = FMatrix::from_rows(2, &[vec![2, 3], vec![1, 1]]);
        let x = m.solve(&[1, 2], &f).unwrap();
        assert_eq!(m.mul_vec(&x, &f), vec![1, 2]);
    }

    #[test]
    fn echelon_space_tracks_rank() {
        let f = f5();
        let mut s = EchelonSpace::new(3);
        assert!(s.insert(&[1, 2, 0], &f));
        assert!(s.insert(&[0, 1, 1], &f));
        assert!(!s.insert(&[1, 3, 1], &f));
        assert!(s.contains(&[2, 4, 0], &f));
        assert_eq!(s.rank(), 2);
    }
}
