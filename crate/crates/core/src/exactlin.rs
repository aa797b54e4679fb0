//! Exact linear algebra over a field of fractions: dense matrices, reduced row
//! echelon forms, kernels, and the lattice of subspaces.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Num, NumAssign, NumAssignRef, NumRef, Signed};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Field elements the linear algebra runs over.
///
/// Intended for exact types such as `BigRational`; floating point types satisfy
/// the bounds but zero tests on them are meaningless.
pub trait Scalar:
    Num + NumRef + NumAssign + NumAssignRef + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display
{
}

impl<T> Scalar for T where
    T: Num + NumRef + NumAssign + NumAssignRef + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display
{
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn diag(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in entries.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Row-major flat data of length `rows * cols`.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<T> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "vector length does not match column count");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a.clone() * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self.to_rows(), self.cols).1.len()
    }

    /// Null space `{x : M x = 0}`.
    pub fn kernel(&self) -> Subspace<T> {
        let (r, pivots) = rref(self.to_rows(), self.cols);
        Subspace::from_rref_nullspace(&r, &pivots, self.cols)
    }

    /// Span of the columns.
    pub fn column_space(&self) -> Subspace<T> {
        self.transpose().row_space()
    }

    /// Span of the rows.
    pub fn row_space(&self) -> Subspace<T> {
        Subspace::span(self.cols, self.to_rows())
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug: Vec<Vec<T>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
                row
            })
            .collect();
        let (r, pivots) = rref(aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let data = r.into_iter().flat_map(|row| row.into_iter().skip(n)).collect();
        Some(Matrix { rows: n, cols: n, data })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, |a, b| a.clone() + b)
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, |a, b| a.clone() - b)
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a.clone() * b;
                    }
                }
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Row-reduces `rows` (each of length `ncols`) to reduced row echelon form.
/// Zero rows are dropped; returns the nonzero rows and their pivot columns.
pub fn rref<T: Scalar>(mut rows: Vec<Vec<T>>, ncols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for col in 0..ncols {
        if pr >= rows.len() {
            break;
        }
        let Some(found) = (pr..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pr, found);
        let inv = T::one() / rows[pr][col].clone();
        if !inv.is_one() {
            for x in rows[pr][col..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let sparse: Vec<(usize, T)> = rows[pr]
            .iter()
            .enumerate()
            .skip(col)
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (j, x.clone()))
            .collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pr || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (j, x) in &sparse {
                row[*j] -= factor.clone() * x;
            }
        }
        pivots.push(col);
        pr += 1;
    }
    rows.truncate(pr);
    (rows, pivots)
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x.clone() * y;
        }
    }
    acc
}

/// `a + c * b`, elementwise.
pub fn axpy<T: Scalar>(a: &[T], c: &T, b: &[T]) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| if y.is_zero() { x.clone() } else { x.clone() + c.clone() * y })
        .collect()
}

pub fn is_zero_vec<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// A linear subspace of `T^d`, stored by its RREF basis. Two subspaces are
/// equal exactly when their stored forms are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: Scalar> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::coordinate(ambient, 0..ambient)
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(ambient: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        let basis = idx
            .iter()
            .map(|&i| {
                let mut v = vec![T::zero(); ambient];
                v[i] = T::one();
                v
            })
            .collect();
        Subspace { ambient, basis, pivots: idx }
    }

    /// Span of arbitrary vectors of length `ambient`.
    ///
    /// # Panics
    /// If a vector has the wrong length.
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vec<T>>) -> Self {
        let rows: Vec<Vec<T>> = vectors.into_iter().collect();
        assert!(rows.iter().all(|v| v.len() == ambient), "vector length differs from ambient dimension");
        let (basis, pivots) = rref(rows, ambient);
        Subspace { ambient, basis, pivots }
    }

    fn from_rref_nullspace(r: &[Vec<T>], pivots: &[usize], ncols: usize) -> Self {
        let mut is_pivot = vec![false; ncols];
        for &p in pivots {
            is_pivot[p] = true;
        }
        let vectors = (0..ncols).filter(|&c| !is_pivot[c]).map(|free| {
            let mut v = vec![T::zero(); ncols];
            v[free] = T::one();
            for (row, &p) in r.iter().zip(pivots) {
                if !row[free].is_zero() {
                    v[p] = -row[free].clone();
                }
            }
            v
        });
        Self::span(ncols, vectors)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after reduction against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        let mut w = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let c = -w[p].clone();
                for (x, y) in w.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x += c.clone() * y;
                    }
                }
            }
        }
        w
    }

    /// # Panics
    /// If `v` has the wrong length.
    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length differs from ambient dimension");
        is_zero_vec(&self.reduce(v))
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.dim() <= other.dim() && self.basis.iter().all(|b| other.contains(b))
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if other.is_zero() || other.is_subspace_of(self) {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        Ok(Self::span(self.ambient, self.basis.iter().chain(&other.basis).cloned()))
    }

    /// Adds the given vectors to the span.
    pub fn extend(&self, vectors: impl IntoIterator<Item = Vec<T>>) -> Self {
        Self::span(self.ambient, self.basis.iter().cloned().chain(vectors))
    }

    /// `{x : <b, x> = 0 for every basis vector b}` under the standard dot product.
    pub fn annihilator(&self) -> Self {
        if self.is_zero() {
            return Self::full(self.ambient);
        }
        Self::from_rref_nullspace(&self.basis, &self.pivots, self.ambient)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        if self.is_subspace_of(other) {
            return Ok(self.clone());
        }
        if other.is_subspace_of(self) {
            return Ok(other.clone());
        }
        let a = self.annihilator();
        let b = other.annihilator();
        let (r, p) = rref(a.basis.into_iter().chain(b.basis).collect(), self.ambient);
        Ok(Self::from_rref_nullspace(&r, &p, self.ambient))
    }

    /// Image under the matrix `m` (which must have `ambient` columns).
    pub fn image(&self, m: &Matrix<T>) -> Self {
        assert_eq!(m.cols(), self.ambient, "matrix columns differ from ambient dimension");
        Self::span(m.rows(), self.basis.iter().map(|b| m.mul_vec(b)))
    }

    /// Vectors of `self`'s basis that extend a basis of `sub` to a basis of
    /// `self + sub`, chosen greedily in basis order.
    pub fn complement_basis(&self, sub: &Self) -> Vec<Vec<T>> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for b in &self.basis {
            if !acc.contains(b) {
                acc = acc.extend([b.clone()]);
                out.push(b.clone());
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Debug for Subspace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) [", self.dim(), self.ambient)?;
        for b in &self.basis {
            let cells: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            write!(f, " [{}]", cells.join(","))?;
        }
        write!(f, " ]")
    }
}

impl<T: Scalar> Serialize for Subspace<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let basis: Vec<Vec<String>> =
            self.basis.iter().map(|b| b.iter().map(|x| x.to_string()).collect()).collect();
        let mut st = s.serialize_struct("Subspace", 2)?;
        st.serialize_field("ambient", &self.ambient)?;
        st.serialize_field("basis", &basis)?;
        st.end()
    }
}

/// Row rank of `m`.
pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    m.rank()
}

/// Null space of `m`.
pub fn kernel<T: Scalar>(m: &Matrix<T>) -> Subspace<T> {
    m.kernel()
}

/// Ranks of `N^0, N^1, ..., N^n`.
pub fn rank_sequence<T: Scalar>(n: &Matrix<T>) -> Vec<usize> {
    let size = n.rows();
    let mut out = Vec::with_capacity(size + 1);
    let mut p = Matrix::identity(size);
    out.push(size);
    for _ in 0..size {
        p = &p * n;
        out.push(p.rank());
    }
    out
}

/// Jordan type of a nilpotent matrix, read off the rank sequence of its powers.
pub fn jordan_type<T: Scalar>(n: &Matrix<T>) -> Result<Partition> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch("Jordan type of a non-square matrix".into()));
    }
    let ranks = rank_sequence(n);
    if ranks[n.rows()] != 0 {
        return Err(Error::NotNilpotent);
    }
    // at_least[j] = number of blocks of size >= j
    let at_least: Vec<usize> = (1..ranks.len()).map(|j| ranks[j - 1] - ranks[j]).collect();
    let mut parts = Vec::new();
    for j in (1..=at_least.len()).rev() {
        let exact = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
        parts.extend(std::iter::repeat_n(j, exact));
    }
    Partition::new(parts)
}
