//! Dense matrices and row-vector subspaces over a [`GaloisField`].
//!
//! Vectors are rows and matrices act on the right, so the image of `1 - g` is the
//! row space of `I - g` and its kernel is the left null space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldAuto, GaloisField, SubfieldEmbedding};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Elem::ONE;
        }
        m
    }

    pub fn scalar(n: usize, c: Elem) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds from small integers reduced into the prime field.
    pub fn from_ints(field: &GaloisField, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| field.from_int(v)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diagonal(entries: &[Elem]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Elem::ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn to_u32_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.0).collect())
            .collect()
    }

    pub fn from_u32_rows(field: &GaloisField, rows: &[Vec<u32>]) -> Result<Self> {
        let m = Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Elem(v)).collect())
                .collect(),
        );
        if m.data.iter().any(|&e| !field.contains(e)) {
            return Err(Error::Invalid("matrix entry outside the field".into()));
        }
        Ok(m)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn map(&self, mut f: impl FnMut(Elem) -> Elem) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    /// Entrywise field automorphism.
    pub fn conj(&self, field: &GaloisField, eta: FieldAuto) -> Self {
        if eta.is_identity(field) {
            return self.clone();
        }
        self.map(|e| eta.apply(field, e))
    }

    /// `(M^t)^eta`.
    pub fn conj_transpose(&self, field: &GaloisField, eta: FieldAuto) -> Self {
        self.transpose().conj(field, eta)
    }

    pub fn add(&self, other: &Self, field: &GaloisField) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self, field: &GaloisField) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| field.sub(a, b))
                .collect(),
        }
    }

    pub fn neg(&self, field: &GaloisField) -> Self {
        self.map(|e| field.neg(e))
    }

    pub fn scale(&self, c: Elem, field: &GaloisField) -> Self {
        self.map(|e| field.mul(c, e))
    }

    pub fn mul(&self, other: &Self, field: &GaloisField) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    if !b.is_zero() {
                        let cur = out.data[base + j];
                        out.data[base + j] = field.add(cur, field.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// `A += c * B` in place.
    pub fn add_scaled(&mut self, c: Elem, other: &Self, field: &GaloisField) {
        if c.is_zero() {
            return;
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a = field.add(*a, field.mul(c, b));
            }
        }
    }

    pub fn pow(&self, mut e: u64, field: &GaloisField) -> Self {
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, field);
            }
        }
        acc
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Elem], field: &GaloisField) -> Vec<Elem> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Elem::ZERO; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if !b.is_zero() {
                    *o = field.add(*o, field.mul(a, b));
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self, field: &GaloisField) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            field.mul(
                self.get(i / other.rows, j / other.cols),
                other.get(i % other.rows, j % other.cols),
            )
        })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Self::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j)
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols)
            } else {
                Elem::ZERO
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows.start + i, cols.start + j)
        })
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, field: &GaloisField) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, piv);
            let inv = field.inv(m.get(row, col)).expect("pivot nonzero");
            for j in 0..m.cols {
                let v = m.get(row, j);
                m.set(row, j, field.mul(inv, v));
            }
            for i in 0..m.rows {
                if i != row {
                    let c = m.get(i, col);
                    if !c.is_zero() {
                        let nc = field.neg(c);
                        for j in 0..m.cols {
                            let v = field.add(m.get(i, j), field.mul(nc, m.get(row, j)));
                            m.set(i, j, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
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

    pub fn rank(&self, field: &GaloisField) -> usize {
        self.rref(field).1.len()
    }

    pub fn det(&self, field: &GaloisField) -> Elem {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Elem::ONE;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&i| !m.get(i, col).is_zero()) else {
                return Elem::ZERO;
            };
            if piv != col {
                m.swap_rows(piv, col);
                det = field.neg(det);
            }
            let p = m.get(col, col);
            det = field.mul(det, p);
            let inv = field.inv(p).expect("nonzero");
            for i in col + 1..n {
                let c = field.mul(m.get(i, col), inv);
                if !c.is_zero() {
                    let nc = field.neg(c);
                    for j in col..n {
                        let v = field.add(m.get(i, j), field.mul(nc, m.get(col, j)));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self, field: &GaloisField) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Elem::ONE
            } else {
                Elem::ZERO
            }
        });
        let (r, piv) = aug.rref(field);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    pub fn is_invertible(&self, field: &GaloisField) -> bool {
        self.is_square() && self.rank(field) == self.rows
    }

    /// Basis (as rows) of `{x : x M = 0}`.
    pub fn left_kernel(&self, field: &GaloisField) -> Matrix {
        self.transpose().right_kernel(field)
    }

    /// Basis (as rows) of `{y : M y^t = 0}`.
    pub fn right_kernel(&self, field: &GaloisField) -> Matrix {
        let (r, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, Elem::ONE);
            for (pi, &pc) in pivots.iter().enumerate() {
                out.set(k, pc, field.neg(r.get(pi, fc)));
            }
        }
        out
    }

    /// Some `x` with `x M = b`, if one exists.
    pub fn solve_left(&self, b: &[Elem], field: &GaloisField) -> Option<Vec<Elem>> {
        // Solve M^t x^t = b^t by eliminating the augmented system.
        let mt = self.transpose();
        let n = mt.cols;
        let aug = Matrix::from_fn(
            mt.rows,
            n + 1,
            |i, j| if j < n { mt.get(i, j) } else { b[i] },
        );
        let (r, pivots) = aug.rref(field);
        if pivots.last() == Some(&n) {
            return None;
        }
        let mut x = vec![Elem::ZERO; n];
        for (pi, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(pi, n);
        }
        Some(x)
    }

    /// Whether all entries lie in the prime field.
    pub fn is_over_prime_field(&self, field: &GaloisField) -> bool {
        self.data.iter().all(|&e| e.0 < field.p())
    }

    /// Replaces each entry by its `r x r` regular representation over the prime field,
    /// using the power basis `1, t, ..., t^{r-1}` in coordinate-major order.
    pub fn restrict_to_prime(&self, field: &GaloisField) -> Matrix {
        let r = field.r() as usize;
        if r == 1 {
            return self.clone();
        }
        let basis: Vec<Elem> = (0..r).map(|k| Elem((field.p()).pow(k as u32))).collect();
        let mut out = Matrix::zeros(self.rows * r, self.cols * r);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for (k, &b) in basis.iter().enumerate() {
                    let c = field.coeffs(field.mul(b, a));
                    for (l, &cl) in c.iter().enumerate() {
                        out.set(i * r + k, j * r + l, Elem(cl));
                    }
                }
            }
        }
        out
    }
}

impl Matrix {
    /// Replaces each entry by its regular-representation block over a subfield
    /// (row `k` of the block holds the coordinates of `t^k a`).
    pub fn restrict_to_subfield(&self, emb: &SubfieldEmbedding) -> Matrix {
        let big = emb.big();
        let m = emb.degree();
        let mut out = Matrix::zeros(self.rows * m, self.cols * m);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for (k, &b) in emb.basis().iter().enumerate() {
                    for (l, &c) in emb.coordinates(big.mul(b, a)).iter().enumerate() {
                        out.set(i * m + k, j * m + l, c);
                    }
                }
            }
        }
        out
    }
}

impl Matrix {
    /// Entries as coefficient lists (low-to-high), the JSON element encoding.
    pub fn to_coeff_rows(&self, field: &GaloisField) -> Vec<Vec<Vec<u32>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&e| field.coeffs(e)).collect())
            .collect()
    }

    pub fn from_coeff_rows(field: &GaloisField, rows: &[Vec<Vec<u32>>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged matrix".into()));
        }
        let data: Result<Vec<Vec<Elem>>> = rows
            .iter()
            .map(|r| r.iter().map(|c| field.from_coeffs(c)).collect())
            .collect();
        Ok(Matrix::from_rows(data?))
    }

    /// `Some(c)` when the matrix is `c I`.
    pub fn as_scalar(&self) -> Option<Elem> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0);
        (*self == Matrix::scalar(self.rows, c)).then_some(c)
    }
}

/// Expands a vector over `F_{p^r}` into prime-field coordinates (coordinate-major).
pub fn restrict_vector(v: &[Elem], field: &GaloisField) -> Vec<Elem> {
    v.iter()
        .flat_map(|&e| field.coeffs(e).into_iter().map(Elem))
        .collect()
}

/// Inverse of [`restrict_vector`].
pub fn extend_vector(v: &[Elem], field: &GaloisField) -> Vec<Elem> {
    let r = field.r() as usize;
    v.chunks(r)
        .map(|c| {
            field
                .from_coeffs(&c.iter().map(|e| e.0).collect::<Vec<_>>())
                .expect("prime-field digits")
        })
        .collect()
}

/// Encodes a prime-field vector as an integer index `sum v_i p^i`.
pub fn vector_index(v: &[Elem], p: u32) -> usize {
    v.iter()
        .rev()
        .fold(0usize, |acc, e| acc * p as usize + e.0 as usize)
}

/// Inverse of [`vector_index`].
pub fn index_vector(mut idx: usize, len: usize, p: u32) -> Vec<Elem> {
    (0..len)
        .map(|_| {
            let d = idx % p as usize;
            idx /= p as usize;
            Elem(d as u32)
        })
        .collect()
}

pub fn dot(u: &[Elem], v: &[Elem], field: &GaloisField) -> Elem {
    u.iter()
        .zip(v)
        .fold(Elem::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

pub fn vec_add(u: &[Elem], v: &[Elem], field: &GaloisField) -> Vec<Elem> {
    u.iter().zip(v).map(|(&a, &b)| field.add(a, b)).collect()
}

pub fn vec_sub(u: &[Elem], v: &[Elem], field: &GaloisField) -> Vec<Elem> {
    u.iter().zip(v).map(|(&a, &b)| field.sub(a, b)).collect()
}

pub fn vec_scale(c: Elem, v: &[Elem], field: &GaloisField) -> Vec<Elem> {
    v.iter().map(|&a| field.mul(c, a)).collect()
}

/// A subspace of row vectors, stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    /// Row space of `m`.
    pub fn row_space(m: &Matrix, field: &GaloisField) -> Self {
        let (r, piv) = m.rref(field);
        Subspace {
            ambient: m.cols(),
            basis: r.submatrix(0..piv.len(), 0..m.cols()),
        }
    }

    pub fn span(vectors: &[Vec<Elem>], ambient: usize, field: &GaloisField) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        Self::row_space(&Matrix::from_rows(vectors.to_vec()), field)
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Elem>> {
        self.basis.row_vecs()
    }

    pub fn contains(&self, v: &[Elem], field: &GaloisField) -> bool {
        if self.dim() == 0 {
            return v.iter().all(|e| e.is_zero());
        }
        self.basis.solve_left(v, field).is_some()
    }

    /// Coordinates of `v` in the echelon basis.
    pub fn coordinates(&self, v: &[Elem], field: &GaloisField) -> Option<Vec<Elem>> {
        if self.dim() == 0 {
            return v.iter().all(|e| e.is_zero()).then(Vec::new);
        }
        self.basis.solve_left(v, field)
    }

    pub fn sum(&self, other: &Self, field: &GaloisField) -> Self {
        Self::row_space(&self.basis.vstack(&other.basis), field)
    }

    pub fn intersect(&self, other: &Self, field: &GaloisField) -> Self {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.ambient);
        }
        let stacked = self.basis.vstack(&other.basis.neg(field));
        let kernel = stacked.left_kernel(field);
        let coeffs = kernel.submatrix(0..kernel.rows(), 0..self.dim());
        Self::row_space(&coeffs.mul(&self.basis, field), field)
    }

    pub fn image(&self, m: &Matrix, field: &GaloisField) -> Self {
        Self::row_space(&self.basis.mul(m, field), field)
    }

    /// All `q^dim` vectors of the subspace, in coefficient order.
    pub fn elements(&self, field: &GaloisField) -> Vec<Vec<Elem>> {
        combinations(&self.basis_vectors(), self.ambient, field)
    }
}

/// Every linear combination of `basis`, ordered by the coefficient vector's encoding.
pub fn combinations(basis: &[Vec<Elem>], ambient: usize, field: &GaloisField) -> Vec<Vec<Elem>> {
    let q = field.order() as usize;
    let total = q.pow(basis.len() as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut v = vec![Elem::ZERO; ambient];
        let mut c = idx;
        for b in basis {
            let a = Elem((c % q) as u32);
            c /= q;
            if !a.is_zero() {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = field.add(*x, field.mul(a, y));
                }
            }
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn f3() -> Arc<GaloisField> {
        GaloisField::prime(3).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let f = f3();
        let m = Matrix::from_ints(&f, &[&[1, 1], &[0, 1]]);
        let inv = m.inverse(&f).unwrap();
        assert!(m.mul(&inv, &f).is_identity());
        assert_eq!(m.det(&f), Elem::ONE);
        let s = Matrix::from_ints(&f, &[&[1, 2], &[2, 1]]);
        assert_eq!(s.det(&f), Elem(0));
        assert_eq!(s.inverse(&f), Err(Error::Singular));
    }

    #[test]
    fn kernels_and_rank_nullity() {
        let f = f3();
        let m = Matrix::from_ints(&f, &[&[1, 2, 0], &[2, 1, 0], &[0, 0, 1]]);
        let k = m.left_kernel(&f);
        assert_eq!(k.rows() + m.rank(&f), 3);
        for v in k.row_vecs() {
            assert!(m.apply_row(&v, &f).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn solve_left_finds_preimage() {
        let f = GaloisField::new(2, 2).unwrap();
        let m = Matrix::from_rows(vec![vec![Elem(2), Elem(1)], vec![Elem(0), Elem(3)]]);
        let b = vec![Elem(1), Elem(2)];
        let x = m.solve_left(&b, &f).unwrap();
        assert_eq!(m.apply_row(&x, &f), b);
    }

    #[test]
    fn subspace_intersection_and_sum() {
        let f = f3();
        let u = Subspace::span(
            &[
                vec![Elem(1), Elem(0), Elem(0)],
                vec![Elem(0), Elem(1), Elem(0)],
            ],
            3,
            &f,
        );
        let w = Subspace::span(
            &[
                vec![Elem(0), Elem(1), Elem(0)],
                vec![Elem(0), Elem(0), Elem(1)],
            ],
            3,
            &f,
        );
        let i = u.intersect(&w, &f);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[Elem(0), Elem(2), Elem(0)], &f));
        assert_eq!(u.sum(&w, &f).dim(), 3);
        assert_eq!(u.elements(&f).len(), 9);
    }

    #[test]
    fn restriction_is_multiplicative() {
        let f = GaloisField::new(2, 2).unwrap();
        let a = Matrix::from_rows(vec![vec![Elem(2), Elem(1)], vec![Elem(3), Elem(0)]]);
        let b = Matrix::from_rows(vec![vec![Elem(1), Elem(3)], vec![Elem(2), Elem(2)]]);
        let ab = a.mul(&b, &f).restrict_to_prime(&f);
        let f2 = GaloisField::prime(2).unwrap();
        assert_eq!(
            ab,
            a.restrict_to_prime(&f).mul(&b.restrict_to_prime(&f), &f2)
        );
        let v = vec![Elem(3), Elem(2)];
        let lhs = restrict_vector(&a.apply_row(&v, &f), &f);
        let rhs = a
            .restrict_to_prime(&f)
            .apply_row(&restrict_vector(&v, &f), &f2);
        assert_eq!(lhs, rhs);
        assert_eq!(extend_vector(&restrict_vector(&v, &f), &f), v);
    }

    #[test]
    fn vector_index_round_trip() {
        for idx in 0..81 {
            assert_eq!(vector_index(&index_vector(idx, 4, 3), 3), idx);
        }
    }
}

/// A monomial matrix: row `i` has the single nonzero entry `vals[i]` in column `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub perm: Vec<usize>,
    pub vals: Vec<Elem>,
}

impl Monomial {
    pub fn identity(n: usize) -> Self {
        Monomial {
            perm: (0..n).collect(),
            vals: vec![Elem::ONE; n],
        }
    }

    /// Recognises a monomial matrix.
    pub fn from_matrix(m: &Matrix) -> Option<Self> {
        if !m.is_square() {
            return None;
        }
        let n = m.rows();
        let mut perm = Vec::with_capacity(n);
        let mut vals = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for i in 0..n {
            let mut nz = (0..n).filter(|&j| !m.get(i, j).is_zero());
            let j = nz.next()?;
            if nz.next().is_some() || seen[j] {
                return None;
            }
            seen[j] = true;
            perm.push(j);
            vals.push(m.get(i, j));
        }
        Some(Monomial { perm, vals })
    }

    pub fn mul(&self, other: &Self, field: &GaloisField) -> Self {
        let perm = self.perm.iter().map(|&j| other.perm[j]).collect();
        let vals = self
            .perm
            .iter()
            .zip(&self.vals)
            .map(|(&j, &a)| field.mul(a, other.vals[j]))
            .collect();
        Monomial { perm, vals }
    }

    pub fn scale(&self, c: Elem, field: &GaloisField) -> Self {
        Monomial {
            perm: self.perm.clone(),
            vals: self.vals.iter().map(|&a| field.mul(a, c)).collect(),
        }
    }

    /// Adds `c * self` into the dense square matrix `acc`.
    pub fn add_scaled_into(&self, acc: &mut Matrix, c: Elem, field: &GaloisField) {
        for (i, (&j, &a)) in self.perm.iter().zip(&self.vals).enumerate() {
            let cur = acc.get(i, j);
            acc.set(i, j, field.add(cur, field.mul(a, c)));
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.perm.len();
        let mut m = Matrix::zeros(n, n);
        for (i, (&j, &a)) in self.perm.iter().zip(&self.vals).enumerate() {
            m.set(i, j, a);
        }
        m
    }
}

#[cfg(test)]
mod monomial_tests {
    use super::*;

    #[test]
    fn monomial_product_matches_dense() {
        let f = GaloisField::new(2, 2).unwrap();
        let a = Matrix::from_rows(vec![
            vec![Elem::ZERO, Elem(2), Elem::ZERO],
            vec![Elem::ZERO, Elem::ZERO, Elem(3)],
            vec![Elem::ONE, Elem::ZERO, Elem::ZERO],
        ]);
        let b = Matrix::from_rows(vec![
            vec![Elem(3), Elem::ZERO, Elem::ZERO],
            vec![Elem::ZERO, Elem::ZERO, Elem::ONE],
            vec![Elem::ZERO, Elem(2), Elem::ZERO],
        ]);
        let (ma, mb) = (
            Monomial::from_matrix(&a).unwrap(),
            Monomial::from_matrix(&b).unwrap(),
        );
        assert_eq!(ma.mul(&mb, &f).to_matrix(), a.mul(&b, &f));
        assert!(Monomial::from_matrix(&Matrix::from_ints(&f, &[&[1, 1], &[0, 1]])).is_none());
        let mut acc = Matrix::zeros(3, 3);
        ma.add_scaled_into(&mut acc, Elem(2), &f);
        assert_eq!(acc, a.scale(Elem(2), &f));
    }
}
