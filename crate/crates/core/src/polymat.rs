//! Matrices of polynomials and their product by evaluation and interpolation.

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};
use crate::matrix::{DenseMatrix, STRASSEN_THRESHOLD};
use crate::poly::{mul_slices, ntt, Poly};

/// A `rows x cols` matrix with entries in `F[x]_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix<M: Modulus = P998> {
    rows: usize,
    cols: usize,
    entries: Vec<Poly<M>>,
    degree_bound: usize,
}

impl<M: Modulus> PolyMatrix<M> {
    pub fn new(
        rows: usize,
        cols: usize,
        entries: Vec<Poly<M>>,
        degree_bound: usize,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        if let Some(p) = entries.iter().find(|p| p.len() > degree_bound) {
            return Err(Error::BoundTooSmall {
                deg: p.len() - 1,
                bound: degree_bound,
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            entries,
            degree_bound,
        })
    }

    pub fn zeros(rows: usize, cols: usize, degree_bound: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
            degree_bound,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(
            n,
            n,
            1,
            |i, j| if i == j { Poly::one() } else { Poly::zero() },
        )
    }

    /// Builds entry `(i, j)` from `f`; panics if an entry exceeds the bound.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        degree_bound: usize,
        mut f: impl FnMut(usize, usize) -> Poly<M>,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                assert!(
                    p.len() <= degree_bound,
                    "entry ({i}, {j}) exceeds the degree bound"
                );
                entries.push(p);
            }
        }
        PolyMatrix {
            rows,
            cols,
            entries,
            degree_bound,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn entries(&self) -> &[Poly<M>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<M> {
        &self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.degree_bound, |i, j| {
            self.get(j, i).clone()
        })
    }
}

/// `A B`; the result lies in `F[x]_{dA + dB - 1}`.
pub fn pm_mul<M: Modulus>(a: &PolyMatrix<M>, b: &PolyMatrix<M>) -> Result<PolyMatrix<M>> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let d = (a.degree_bound + b.degree_bound).saturating_sub(1);
    if a.rows == 0 || b.cols == 0 || d == 0 {
        return Ok(PolyMatrix::zeros(a.rows, b.cols, d));
    }
    let size = d.next_power_of_two();
    if size > ntt::max_len::<M>() || d <= 8 {
        return Ok(pm_mul_schoolbook(a, b, d));
    }
    let ea = Evaluated::new(a.rows, a.cols, size, a.entries.iter().map(|p| p.coeffs()));
    let eb = Evaluated::new(b.rows, b.cols, size, b.entries.iter().map(|p| p.coeffs()));
    let ec = ea.mul(&eb);
    let entries = ec.interpolate(d).into_iter().map(Poly::new).collect();
    Ok(PolyMatrix {
        rows: a.rows,
        cols: b.cols,
        entries,
        degree_bound: d,
    })
}

/// Entrywise expansion `sum_k A_ik B_kj`.
pub fn pm_mul_schoolbook<M: Modulus>(
    a: &PolyMatrix<M>,
    b: &PolyMatrix<M>,
    d: usize,
) -> PolyMatrix<M> {
    PolyMatrix::from_fn(a.rows, b.cols, d, |i, j| {
        let mut acc = vec![Fp::ZERO; d];
        for k in 0..a.cols {
            for (x, y) in acc
                .iter_mut()
                .zip(mul_slices(a.get(i, k).coeffs(), b.get(k, j).coeffs()))
            {
                *x += y;
            }
        }
        Poly::new(acc)
    })
}

/// A polynomial matrix evaluated at the `size` roots of unity, stored point by point.
#[derive(Debug, Clone)]
pub(crate) struct Evaluated<M: Modulus> {
    rows: usize,
    cols: usize,
    size: usize,
    /// `data[pt * rows * cols + i * cols + j]`.
    data: Vec<Fp<M>>,
}

impl<M: Modulus> Evaluated<M> {
    /// Evaluates row-major entries given as coefficient slices.
    pub(crate) fn new<'a>(
        rows: usize,
        cols: usize,
        size: usize,
        entries: impl Iterator<Item = &'a [Fp<M>]>,
    ) -> Self {
        let rc = rows * cols;
        let mut data = vec![Fp::ZERO; size * rc];
        let mut buf = vec![Fp::ZERO; size];
        for (idx, c) in entries.enumerate() {
            if c.iter().all(|x| x.is_zero()) {
                continue;
            }
            buf.iter_mut().for_each(|x| *x = Fp::ZERO);
            buf[..c.len()].copy_from_slice(c);
            ntt::forward(&mut buf);
            for (pt, &v) in buf.iter().enumerate() {
                data[pt * rc + idx] = v;
            }
        }
        Evaluated {
            rows,
            cols,
            size,
            data,
        }
    }

    /// Pointwise matrix product.
    pub(crate) fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.size, other.size);
        let (r, k, c) = (self.rows, self.cols, other.cols);
        let mut data = vec![Fp::ZERO; self.size * r * c];
        let big = r.min(k).min(c) >= STRASSEN_THRESHOLD;
        for pt in 0..self.size {
            let a = &self.data[pt * r * k..(pt + 1) * r * k];
            let b = &other.data[pt * k * c..(pt + 1) * k * c];
            let out = &mut data[pt * r * c..(pt + 1) * r * c];
            if big {
                let prod = DenseMatrix::from_vec(r, k, a.to_vec()).mul(&DenseMatrix::from_vec(
                    k,
                    c,
                    b.to_vec(),
                ));
                out.copy_from_slice(prod.data());
                continue;
            }
            for i in 0..r {
                for l in 0..k {
                    let x = a[i * k + l];
                    if x.is_zero() {
                        continue;
                    }
                    let brow = &b[l * c..(l + 1) * c];
                    let orow = &mut out[i * c..(i + 1) * c];
                    for (o, &y) in orow.iter_mut().zip(brow) {
                        *o += x * y;
                    }
                }
            }
        }
        Evaluated {
            rows: r,
            cols: c,
            size: self.size,
            data,
        }
    }

    /// Pointwise product with the transpose of `other`.
    pub(crate) fn mul_transposed(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.size, other.size);
        let (r, k, c) = (self.rows, self.cols, other.rows);
        let mut data = vec![Fp::ZERO; self.size * r * c];
        for pt in 0..self.size {
            let a = &self.data[pt * r * k..(pt + 1) * r * k];
            let b = &other.data[pt * c * k..(pt + 1) * c * k];
            let out = &mut data[pt * r * c..(pt + 1) * r * c];
            for i in 0..r {
                let arow = &a[i * k..(i + 1) * k];
                for j in 0..c {
                    let brow = &b[j * k..(j + 1) * k];
                    out[i * c + j] = arow.iter().zip(brow).map(|(&x, &y)| x * y).sum();
                }
            }
        }
        Evaluated {
            rows: r,
            cols: c,
            size: self.size,
            data,
        }
    }

    /// Row-major coefficient vectors of length `len` (at most `size`).
    pub(crate) fn interpolate(&self, len: usize) -> Vec<Vec<Fp<M>>> {
        assert!(len <= self.size);
        let rc = self.rows * self.cols;
        let mut out = Vec::with_capacity(rc);
        let mut buf = vec![Fp::ZERO; self.size];
        for idx in 0..rc {
            for (pt, b) in buf.iter_mut().enumerate() {
                *b = self.data[pt * rc + idx];
            }
            ntt::inverse(&mut buf);
            out.push(buf[..len].to_vec());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type P = Poly<P998>;

    fn random_pm(rng: &mut ChaCha8Rng, r: usize, c: usize, d: usize) -> PolyMatrix<P998> {
        PolyMatrix::from_fn(r, c, d, |_, _| {
            P::new((0..d).map(|_| Fp::new(rng.gen())).collect())
        })
    }

    #[test]
    fn small_examples() {
        let x = P::x();
        let a = PolyMatrix::new(2, 2, vec![P::one(), x.clone(), P::zero(), P::one()], 2).unwrap();
        let b = PolyMatrix::new(2, 2, vec![P::one(), P::zero(), x.clone(), P::one()], 2).unwrap();
        let c = pm_mul(&a, &b).unwrap();
        assert_eq!(c.get(0, 0), &P::from_i64s(&[1, 0, 1]));
        assert_eq!(c.get(0, 1), &x);
        assert_eq!(c.get(1, 0), &x);
        assert_eq!(c.get(1, 1), &P::one());
        assert_eq!(c.degree_bound(), 3);
        let id = pm_mul(&a, &PolyMatrix::identity(2)).unwrap();
        assert_eq!(id.entries(), a.entries());
        assert!(pm_mul(&a, &PolyMatrix::identity(3)).is_err());
    }

    #[test]
    fn evaluation_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let (r, k, c) = (
                rng.gen_range(1..=8),
                rng.gen_range(1..=8),
                rng.gen_range(1..=8),
            );
            let (da, db) = (rng.gen_range(1..=16), rng.gen_range(1..=16));
            let a = random_pm(&mut rng, r, k, da);
            let b = random_pm(&mut rng, k, c, db);
            let d = da + db - 1;
            assert_eq!(pm_mul(&a, &b).unwrap(), pm_mul_schoolbook(&a, &b, d));
        }
    }

    #[test]
    fn associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_pm(&mut rng, 3, 4, 12);
        let b = random_pm(&mut rng, 4, 2, 9);
        let c = random_pm(&mut rng, 2, 5, 20);
        let left = pm_mul(&pm_mul(&a, &b).unwrap(), &c).unwrap();
        let right = pm_mul(&a, &pm_mul(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}
