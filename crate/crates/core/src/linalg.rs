//! Dense matrices over a [`FieldSpec`] and the subspace bookkeeping used by
//! every per-degree computation.

use crate::error::{Error, Result};
use crate::scalar::{FieldElem, FieldSpec};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<FieldElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(field: FieldSpec, rows: usize, cols: &[Vec<FieldElem>]) -> Self {
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElem::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let sub = &factor * m.get(r, j);
                    if !sub.is_zero() {
                        let v = m.get(i, j) - &sub;
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : self * x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<FieldElem>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Some `x` with `self * x = b` and whether it is the only one.
    pub fn solve(&self, b: &[FieldElem]) -> Option<(Vec<FieldElem>, bool)> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let mut aug = Matrix::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some((x, pivots.len() == self.cols))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn scale(&self, c: &FieldElem) -> Matrix {
        let mut m = self.clone();
        for v in &mut m.data {
            *v = &*v * c;
        }
        m
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v = &*v + w;
        }
        m
    }
}

/// A subspace of `field^dim` kept in reduced echelon form, used for
/// membership tests and for normal forms in quotient spaces.
#[derive(Debug, Clone)]
pub struct Subspace {
    field: FieldSpec,
    dim: usize,
    rows: Vec<Vec<FieldElem>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, dim: usize) -> Self {
        Subspace {
            field,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by(field: FieldSpec, dim: usize, vectors: &[Vec<FieldElem>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(field, dim);
        }
        let m = Matrix::from_rows(field, vectors.to_vec());
        let (r, pivots) = m.rref();
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace {
            field,
            dim,
            rows,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    /// Coordinates that are not pivots; they index a basis of the quotient.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The canonical representative of `v` modulo the subspace: all pivot
    /// coordinates are cleared.
    pub fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o = &*o - &(&c * r);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        self.reduce(v).iter().all(FieldElem::is_zero)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f13() -> FieldSpec {
        FieldSpec::PrimeField { p: 13 }
    }

    fn mat(field: FieldSpec, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_nullspace() {
        let q = FieldSpec::Rationals;
        let m = mat(q, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(FieldElem::is_zero));
    }

    #[test]
    fn solve_reports_uniqueness() {
        let q = FieldSpec::Rationals;
        let m = mat(q, &[&[1, 1], &[1, -1]]);
        let (x, unique) = m.solve(&[q.from_i64(3), q.from_i64(1)]).unwrap();
        assert!(unique);
        assert_eq!(x, vec![q.from_i64(2), q.from_i64(1)]);
        let m = mat(q, &[&[1, 1]]);
        let (_, unique) = m.solve(&[q.from_i64(1)]).unwrap();
        assert!(!unique);
        let m = mat(q, &[&[0, 0]]);
        assert!(m.solve(&[q.from_i64(1)]).is_none());
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = mat(f13(), &[&[1, 2], &[2, 4]]);
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn subspace_reduction() {
        let q = FieldSpec::Rationals;
        let s = Subspace::spanned_by(q, 3, &[vec![q.from_i64(1), q.from_i64(1), q.zero()]]);
        assert_eq!(s.complement(), vec![1, 2]);
        let r = s.reduce(&[q.from_i64(2), q.zero(), q.from_i64(5)]);
        assert_eq!(r, vec![q.zero(), q.from_i64(-2), q.from_i64(5)]);
        assert!(s.contains(&[q.from_i64(3), q.from_i64(3), q.zero()]));
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(entries in proptest::collection::vec(0i64..13, 9)) {
            let f = f13();
            let m = Matrix::from_rows(f, entries.chunks(3).map(|r| r.iter().map(|&v| f.from_i64(v)).collect()).collect());
            match m.inverse() {
                Ok(inv) => {
                    prop_assert_eq!(m.mul(&inv), Matrix::identity(f, 3));
                    prop_assert_eq!(inv.mul(&m), Matrix::identity(f, 3));
                }
                Err(_) => prop_assert!(m.rank() < 3),
            }
        }

        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..4, 12)) {
            let q = FieldSpec::Rationals;
            let m = Matrix::from_rows(q, entries.chunks(4).map(|r| r.iter().map(|&v| q.from_i64(v)).collect()).collect());
            prop_assert_eq!(m.rank() + m.nullspace().len(), 4);
        }
    }
}
