//! Dense matrices over `Fp<M>` with exact Gaussian elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};

/// Dimension from which square products switch to Strassen's recursion.
pub const STRASSEN_THRESHOLD: usize = 128;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix<M: Modulus = P998> {
    rows: usize,
    cols: usize,
    data: Vec<Fp<M>>,
}

impl<M: Modulus> fmt::Debug for DenseMatrix<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<M: Modulus> Index<(usize, usize)> for DenseMatrix<M> {
    type Output = Fp<M>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Fp<M> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<M: Modulus> IndexMut<(usize, usize)> for DenseMatrix<M> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fp<M> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Particular solution plus a basis of the right kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome<M: Modulus = P998> {
    pub particular: Vec<Fp<M>>,
    pub kernel: Vec<Vec<Fp<M>>>,
}

impl<M: Modulus> DenseMatrix<M> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Fp::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = Fp::ONE;
        }
        a
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fp<M>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fp<M>>) -> Self {
        assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from signed integer rows (reduced mod p).
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| Fp::from_i64(rows[i][j]))
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<Fp<M>>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| Fp::new(rng.gen_range(0..M::P)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Fp<M>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Fp<M>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fp<M>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Fp<M>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Fp<M>]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: Fp<M>) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-Fp::ONE)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Columns `c0..c1`.
    pub fn col_range(&self, c0: usize, c1: usize) -> Self {
        self.submatrix(0, self.rows, c0, c1)
    }

    /// Rows `r0..r1`.
    pub fn row_range(&self, r0: usize, r1: usize) -> Self {
        self.submatrix(r0, r1, 0, self.cols)
    }

    /// Horizontal concatenation; all parts must have `rows` rows.
    pub fn hcat(rows: usize, parts: &[&Self]) -> Self {
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hcat row mismatch");
            for i in 0..rows {
                for j in 0..p.cols {
                    out[(i, c0 + j)] = p[(i, j)];
                }
            }
            c0 += p.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must have `cols` columns.
    pub fn vcat(cols: usize, parts: &[&Self]) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vcat column mismatch");
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        DenseMatrix { rows, cols, data }
    }

    /// Copy padded with zero rows/columns (or truncated) to `rows x cols`.
    pub fn resized(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else {
                Fp::ZERO
            }
        })
    }

    pub fn mul_vec(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `self^t v`.
    pub fn tmul_vec(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Fp::ZERO; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn mul_classical(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Product, using Strassen's recursion when all dimensions reach the threshold.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product dimension mismatch");
        if self.rows.min(self.cols).min(other.cols) >= STRASSEN_THRESHOLD {
            strassen(self, other)
        } else {
            self.mul_classical(other)
        }
    }

    /// Reduced row echelon form in place; returns pivot columns.
    /// Pivots are the first nonzero entry scanning down each column.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self[(r, c)].inv().unwrap();
            for j in c..self.cols {
                self[(r, j)] *= inv;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = self[(r, j)];
                    self[(i, j)] -= f * v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut aug = Self::hcat(n, &[self, &Self::identity(n)]);
        let piv = aug.rref_in_place();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(aug.submatrix(0, n, n, 2 * n))
    }

    /// All solutions of `self x = b`.
    pub fn solve(&self, b: &[Fp<M>]) -> Result<SolveOutcome<M>> {
        assert_eq!(b.len(), self.rows);
        let n = self.cols;
        let bm = Self::from_columns(self.rows, &[b.to_vec()]);
        let mut aug = Self::hcat(self.rows, &[self, &bm]);
        let piv = aug.rref_in_place();
        if piv.last() == Some(&n) {
            return Err(Error::NoSolution);
        }
        let mut particular = vec![Fp::ZERO; n];
        for (r, &c) in piv.iter().enumerate() {
            particular[c] = aug[(r, n)];
        }
        let mut kernel = Vec::new();
        for free in (0..n).filter(|c| !piv.contains(c)) {
            let mut v = vec![Fp::ZERO; n];
            v[free] = Fp::ONE;
            for (r, &c) in piv.iter().enumerate() {
                v[c] = -aug[(r, free)];
            }
            kernel.push(v);
        }
        Ok(SolveOutcome { particular, kernel })
    }

    /// Largest `l` such that all leading principal minors of orders `1..=l` are nonzero.
    pub fn leading_regular_order(&self) -> usize {
        let mut a = self.clone();
        let k = self.rows.min(self.cols);
        for c in 0..k {
            let p = a[(c, c)];
            if p.is_zero() {
                return c;
            }
            let inv = p.inv().unwrap();
            for i in c + 1..a.rows {
                let f = a[(i, c)] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..a.cols {
                    let v = a[(c, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        k
    }
}

fn strassen<M: Modulus>(a: &DenseMatrix<M>, b: &DenseMatrix<M>) -> DenseMatrix<M> {
    let (m, k, n) = (a.rows, a.cols, b.cols);
    if m.min(k).min(n) < STRASSEN_THRESHOLD {
        return a.mul_classical(b);
    }
    let (m2, k2, n2) = (m.div_ceil(2), k.div_ceil(2), n.div_ceil(2));
    let a = a.resized(2 * m2, 2 * k2);
    let b = b.resized(2 * k2, 2 * n2);
    let q = |x: &DenseMatrix<M>, r: usize, c: usize, h: usize, w: usize| {
        x.submatrix(r * h, (r + 1) * h, c * w, (c + 1) * w)
    };
    let (a11, a12, a21, a22) = (
        q(&a, 0, 0, m2, k2),
        q(&a, 0, 1, m2, k2),
        q(&a, 1, 0, m2, k2),
        q(&a, 1, 1, m2, k2),
    );
    let (b11, b12, b21, b22) = (
        q(&b, 0, 0, k2, n2),
        q(&b, 0, 1, k2, n2),
        q(&b, 1, 0, k2, n2),
        q(&b, 1, 1, k2, n2),
    );
    let p1 = strassen(&a11.add(&a22), &b11.add(&b22));
    let p2 = strassen(&a21.add(&a22), &b11);
    let p3 = strassen(&a11, &b12.sub(&b22));
    let p4 = strassen(&a22, &b21.sub(&b11));
    let p5 = strassen(&a11.add(&a12), &b22);
    let p6 = strassen(&a21.sub(&a11), &b11.add(&b12));
    let p7 = strassen(&a12.sub(&a22), &b21.add(&b22));
    let c11 = p1.add(&p4).sub(&p5).add(&p7);
    let c12 = p3.add(&p5);
    let c21 = p2.add(&p4);
    let c22 = p1.sub(&p2).add(&p3).add(&p6);
    let top = DenseMatrix::hcat(m2, &[&c11, &c12]);
    let bot = DenseMatrix::hcat(m2, &[&c21, &c22]);
    DenseMatrix::vcat(2 * n2, &[&top, &bot]).submatrix(0, m, 0, n)
}
