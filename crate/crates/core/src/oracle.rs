//! Dense brute-force ground truth: displacement operators applied to explicit
//! matrices and the vectorized displacement equation solved by elimination.

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus};
use crate::matrix::DenseMatrix;
use crate::operators::{DisplacementOperator, OperatorKind};

/// Largest `m n` accepted by [`dense_solve_displacement`].
pub const ORACLE_LIMIT: usize = 1 << 16;

pub fn dense_mul<M: Modulus>(a: &DenseMatrix<M>, b: &DenseMatrix<M>) -> DenseMatrix<M> {
    a.mul(b)
}

pub fn dense_rank<M: Modulus>(a: &DenseMatrix<M>) -> usize {
    a.rank()
}

pub fn dense_inv<M: Modulus>(a: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
    a.inv()
}

/// `M A - A N` or `A - M A N` with `M`, `N` densified from the descriptor.
pub fn dense_apply_operator<M: Modulus>(
    op: &DisplacementOperator<M>,
    a: &DenseMatrix<M>,
) -> Result<DenseMatrix<M>> {
    if a.rows() != op.m() || a.cols() != op.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for a {}x{} operator",
            a.rows(),
            a.cols(),
            op.m(),
            op.n()
        )));
    }
    let mm = op.dense_m();
    let nn = op.dense_n();
    Ok(match op.kind {
        OperatorKind::Sylvester => mm.mul(a).sub(&a.mul(&nn)),
        OperatorKind::Stein => a.sub(&mm.mul(a).mul(&nn)),
    })
}

/// The unique `A` with `L(A) = rhs`, from the `mn x mn` Kronecker system on
/// the column-major vectorization of `A`.
pub fn dense_solve_displacement<M: Modulus>(
    op: &DisplacementOperator<M>,
    rhs: &DenseMatrix<M>,
) -> Result<DenseMatrix<M>> {
    let (m, n) = (op.m(), op.n());
    if rhs.rows() != m || rhs.cols() != n {
        return Err(Error::DimensionMismatch("right-hand side shape".into()));
    }
    if m * n > ORACLE_LIMIT {
        return Err(Error::SizeLimit(m * n));
    }
    let k = kronecker_system(op);
    let b: Vec<Fp<M>> = (0..n)
        .flat_map(|j| (0..m).map(move |i| (i, j)))
        .map(|ij| rhs[ij])
        .collect();
    let sol = k.solve(&b).map_err(|_| Error::SingularOperator)?;
    if !sol.kernel.is_empty() {
        return Err(Error::SingularOperator);
    }
    Ok(DenseMatrix::from_fn(m, n, |i, j| sol.particular[j * m + i]))
}

/// True iff the vectorized operator has full rank.
pub fn dense_operator_invertible<M: Modulus>(op: &DisplacementOperator<M>) -> Result<bool> {
    let mn = op.m() * op.n();
    if mn > ORACLE_LIMIT {
        return Err(Error::SizeLimit(mn));
    }
    Ok(kronecker_system(op).rank() == mn)
}

fn kronecker_system<M: Modulus>(op: &DisplacementOperator<M>) -> DenseMatrix<M> {
    let (m, n) = (op.m(), op.n());
    let mm = op.dense_m();
    let nn = op.dense_n();
    // vec(M A) = (I kron M) vec A, vec(A N) = (N^t kron I) vec A, vec(M A N) = (N^t kron M) vec A
    let mut k = DenseMatrix::zeros(m * n, m * n);
    for j in 0..n {
        for jj in 0..n {
            let njj = nn[(jj, j)];
            for i in 0..m {
                for ii in 0..m {
                    let row = j * m + i;
                    let col = jj * m + ii;
                    let v = match op.kind {
                        OperatorKind::Sylvester => {
                            let mut v = -if ii == i { njj } else { Fp::ZERO };
                            if jj == j {
                                v += mm[(i, ii)];
                            }
                            v
                        }
                        OperatorKind::Stein => {
                            let id = if ii == i && jj == j {
                                Fp::ONE
                            } else {
                                Fp::ZERO
                            };
                            id - njj * mm[(i, ii)]
                        }
                    };
                    k[(row, col)] = v;
                }
            }
        }
    }
    k
}

/// Densifies `A` from `Z_{m,0} A - A Z_{n,0}^t = G H^t` and its last row `u`,
/// via `a_{i-1,j} = d_{i,j} + a_{i,j-1}`.
pub fn densify_partly_regular<M: Modulus>(
    g: &DenseMatrix<M>,
    h: &DenseMatrix<M>,
    u: &[Fp<M>],
) -> DenseMatrix<M> {
    let (m, n) = (g.rows(), h.rows());
    assert_eq!(u.len(), n);
    let d = g.mul(&h.transpose());
    let mut a = DenseMatrix::zeros(m, n);
    if m == 0 {
        return a;
    }
    for j in 0..n {
        a[(m - 1, j)] = u[j];
    }
    for i in (1..m).rev() {
        for j in 0..n {
            let left = if j == 0 { Fp::ZERO } else { a[(i, j - 1)] };
            a[(i - 1, j)] = d[(i, j)] + left;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{P7, P998};
    use crate::poly::family::{FlavorHint, PolyFamily};
    use crate::poly::Poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn lin_family(roots: &[i64]) -> Arc<PolyFamily<P7>> {
        Arc::new(
            PolyFamily::new(
                roots.iter().map(|&r| Poly::from_i64s(&[-r, 1])).collect(),
                FlavorHint::General,
            )
            .unwrap(),
        )
    }

    fn cauchy_op() -> DisplacementOperator<P7> {
        DisplacementOperator::basic(
            OperatorKind::Sylvester,
            lin_family(&[2, 3]),
            lin_family(&[0, 1]),
        )
    }

    #[test]
    fn cauchy_displacement_is_all_ones() {
        let a = DenseMatrix::<P7>::from_i64_rows(&[vec![4, 1], vec![5, 4]]);
        let d = dense_apply_operator(&cauchy_op(), &a).unwrap();
        assert_eq!(d, DenseMatrix::from_i64_rows(&[vec![1, 1], vec![1, 1]]));
        let back = dense_solve_displacement(&cauchy_op(), &d).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn zero_and_commuting_cases() {
        let op = cauchy_op();
        assert!(dense_apply_operator(&op, &DenseMatrix::zeros(2, 2))
            .unwrap()
            .is_zero());
        assert!(dense_solve_displacement(&op, &DenseMatrix::zeros(2, 2))
            .unwrap()
            .is_zero());
        let p = lin_family(&[2, 3]);
        let same = DisplacementOperator::new(OperatorKind::Sylvester, p.clone(), p, false, false);
        assert!(dense_apply_operator(&same, &DenseMatrix::identity(2))
            .unwrap()
            .is_zero());
        assert_eq!(
            dense_solve_displacement(&same, &DenseMatrix::zeros(2, 2)),
            Err(Error::SingularOperator)
        );
    }

    #[test]
    fn solve_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = rng.gen_range(1..=8);
            let n = rng.gen_range(1..=8);
            let kind = if rng.gen() {
                OperatorKind::Sylvester
            } else {
                OperatorKind::Stein
            };
            let op = DisplacementOperator::<P998>::new(
                kind,
                Arc::new(PolyFamily::single_power(m, Fp::new(rng.gen_range(0..5)))),
                Arc::new(PolyFamily::single_power(n, Fp::new(rng.gen_range(0..5)))),
                rng.gen(),
                rng.gen(),
            );
            let a = DenseMatrix::random(m, n, &mut rng);
            let d = dense_apply_operator(&op, &a).unwrap();
            match dense_solve_displacement(&op, &d) {
                Ok(b) => {
                    assert!(op.is_invertible());
                    assert_eq!(b, a);
                }
                Err(e) => {
                    assert_eq!(e, Error::SingularOperator);
                    assert!(!op.is_invertible());
                }
            }
        }
    }

    #[test]
    fn partly_regular_densify() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = DenseMatrix::<P998>::random(5, 4, &mut rng);
        let z = |k: usize| {
            DenseMatrix::<P998>::from_fn(k, k, |i, j| if i == j + 1 { Fp::ONE } else { Fp::ZERO })
        };
        let d = z(5).mul(&a).sub(&a.mul(&z(4).transpose()));
        let back = densify_partly_regular(&d, &DenseMatrix::identity(4), a.row(4));
        assert_eq!(back, a);
    }

    #[test]
    fn size_limit_enforced() {
        let op = DisplacementOperator::<P998>::binomial(
            OperatorKind::Sylvester,
            300,
            Fp::ZERO,
            300,
            Fp::ONE,
            false,
            true,
        );
        assert_eq!(
            dense_solve_displacement(&op, &DenseMatrix::zeros(300, 300)),
            Err(Error::SizeLimit(90000))
        );
    }
}
