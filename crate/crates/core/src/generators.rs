//! Generators `(G, H)` with `L(A) = G H^t`: reconstruction, matrix-vector
//! products, transposition, compression, and the reductions to basic and
//! Toeplitz-like operators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};
use crate::matrix::DenseMatrix;
use crate::operators::{companion_apply, unit, y_apply_family, DisplacementOperator, OperatorKind};
use crate::poly::family::PolyFamily;
use crate::poly::Poly;

/// A generator of a structured `m x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator<M: Modulus = P998> {
    pub g: DenseMatrix<M>,
    pub h: DenseMatrix<M>,
    pub op: DisplacementOperator<M>,
    /// Last row of the matrix, for partly regular operators.
    pub last_row: Option<Vec<Fp<M>>>,
}

impl<M: Modulus> Generator<M> {
    pub fn new(op: DisplacementOperator<M>, g: DenseMatrix<M>, h: DenseMatrix<M>) -> Result<Self> {
        if g.rows() != op.m() || h.rows() != op.n() || g.cols() != h.cols() {
            return Err(Error::DimensionMismatch(format!(
                "G is {}x{}, H is {}x{}, operator format is {}x{}",
                g.rows(),
                g.cols(),
                h.rows(),
                h.cols(),
                op.m(),
                op.n()
            )));
        }
        Ok(Generator {
            g,
            h,
            op,
            last_row: None,
        })
    }

    /// The length-zero generator of the zero matrix.
    pub fn zero(op: DisplacementOperator<M>) -> Self {
        let (m, n) = (op.m(), op.n());
        Generator {
            g: DenseMatrix::zeros(m, 0),
            h: DenseMatrix::zeros(n, 0),
            op,
            last_row: None,
        }
    }

    pub fn with_last_row(mut self, u: Vec<Fp<M>>) -> Self {
        assert_eq!(u.len(), self.n());
        self.last_row = Some(u);
        self
    }

    /// Generator length `alpha`.
    pub fn len(&self) -> usize {
        self.g.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn m(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.h.rows()
    }

    /// `G H^t`.
    pub fn displacement(&self) -> DenseMatrix<M> {
        self.g.mul(&self.h.transpose())
    }
}

/// Exponents of the symmetrizers relating `A` to its basic form
/// `A_b = Y_P^{e1} A Y_Q^{e2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasicTransform {
    pub e1: bool,
    pub e2: bool,
}

impl BasicTransform {
    pub fn is_identity(&self) -> bool {
        !self.e1 && !self.e2
    }
}

/// Generator of `A_b = Y_P^{e1} A Y_Q^{e2}` for the basic operator of the same kind.
pub fn to_basic<M: Modulus>(gen: &Generator<M>) -> (Generator<M>, BasicTransform) {
    let op = &gen.op;
    let tf = BasicTransform {
        e1: op.transpose_p,
        e2: !op.transpose_q,
    };
    if tf.is_identity() {
        return (gen.clone(), tf);
    }
    let g = if tf.e1 {
        map_columns(&gen.g, |c| y_apply_family(&op.p, c, false))
    } else {
        gen.g.clone()
    };
    let h = if tf.e2 {
        map_columns(&gen.h, |c| y_apply_family(&op.q, c, false))
    } else {
        gen.h.clone()
    };
    let basic = Generator {
        g,
        h,
        op: op.with_flags(false, true),
        last_row: None,
    };
    (basic, tf)
}

/// Maps a generator of `A_b^{-1}` (for `(Q, P)` with flags `(true, false)`)
/// back to a generator of `A^{-1}` for `op.inverse_operator()`.
pub fn from_basic_inverse<M: Modulus>(
    op: &DisplacementOperator<M>,
    tf: BasicTransform,
    inv_basic: &Generator<M>,
) -> Generator<M> {
    let g = if tf.e2 {
        map_columns(&inv_basic.g, |c| y_apply_family(&op.q, c, false))
    } else {
        inv_basic.g.clone()
    };
    let h = if tf.e1 {
        map_columns(&inv_basic.h, |c| y_apply_family(&op.p, c, false))
    } else {
        inv_basic.h.clone()
    };
    Generator {
        g,
        h,
        op: op.inverse_operator(),
        last_row: None,
    }
}

/// Applies `f` to every column.
pub fn map_columns<M: Modulus>(
    a: &DenseMatrix<M>,
    f: impl Fn(&[Fp<M>]) -> Vec<Fp<M>>,
) -> DenseMatrix<M> {
    let cols: Vec<Vec<Fp<M>>> = a.columns().iter().map(|c| f(c)).collect();
    let rows = cols.first().map_or(a.rows(), |c| c.len());
    DenseMatrix::from_columns(rows, &cols)
}

/// Precomputed data for repeated products `A u`.
#[derive(Debug, Clone)]
pub struct MatvecPlan<M: Modulus = P998> {
    kind: OperatorKind,
    p: Arc<PolyFamily<M>>,
    q: Arc<PolyFamily<M>>,
    tf: BasicTransform,
    gammas: Vec<Poly<M>>,
    etas: Vec<Poly<M>>,
    qinv: Vec<Poly<M>>,
}

impl<M: Modulus> MatvecPlan<M> {
    pub fn new(gen: &Generator<M>) -> Result<Self> {
        let op = &gen.op;
        let qinv = op.q_inverses().ok_or(Error::SingularOperator)?.to_vec();
        let (basic, tf) = to_basic(gen);
        let gammas = basic
            .g
            .columns()
            .iter()
            .map(|c| op.p.crt(&op.p.unstack(c)))
            .collect::<Result<_>>()?;
        let etas = basic
            .h
            .columns()
            .iter()
            .map(|c| op.q.crt(&op.q.unstack(c)))
            .collect::<Result<_>>()?;
        Ok(MatvecPlan {
            kind: op.kind,
            p: op.p.clone(),
            q: op.q.clone(),
            tf,
            gammas,
            etas,
            qinv,
        })
    }

    pub fn m(&self) -> usize {
        self.p.total_degree()
    }

    pub fn n(&self) -> usize {
        self.q.total_degree()
    }

    /// `A u`.
    pub fn apply(&self, u: &[Fp<M>]) -> Result<Vec<Fp<M>>> {
        let n = self.n();
        if u.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                u.len(),
                n
            )));
        }
        let ub = if self.tf.e2 {
            y_apply_family(&self.q, u, true)
        } else {
            u.to_vec()
        };
        let v = self.apply_basic(&ub);
        Ok(if self.tf.e1 {
            y_apply_family(&self.p, &v, true)
        } else {
            v
        })
    }

    fn apply_basic(&self, b: &[Fp<M>]) -> Vec<Fp<M>> {
        let (m, n) = (self.m(), self.n());
        if self.gammas.is_empty() || b.iter().all(|x| x.is_zero()) {
            return vec![Fp::ZERO; m];
        }
        let y = y_apply_family(&self.q, b, false);
        let bp = self.q.comb(&self.q.unstack(&y)).expect("blocks fit");
        let qred = self.q.product_reducer();
        let mut acc = vec![Fp::ZERO; m + n];
        for (gamma, eta) in self.gammas.iter().zip(&self.etas) {
            if gamma.is_zero() || eta.is_zero() {
                continue;
            }
            let mut c = qred.reduce((eta * &bp).coeffs()).to_vec(n);
            if self.kind == OperatorKind::Stein {
                c.reverse();
            }
            let prod = gamma * &Poly::new(c);
            for (a, &x) in acc.iter_mut().zip(prod.coeffs()) {
                *a += x;
            }
        }
        let res = self.p.red(&Poly::new(acc));
        let mut out = Vec::with_capacity(m);
        for (i, r) in res.iter().enumerate() {
            out.extend(
                self.p
                    .mulmod_factor(i, r, &self.qinv[i])
                    .to_vec(self.p.degree(i)),
            );
        }
        out
    }

    /// `A B` column by column.
    pub fn apply_matrix(&self, b: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
        if b.rows() != self.n() {
            return Err(Error::DimensionMismatch(
                "matrix rows do not match operator columns".into(),
            ));
        }
        let cols = b
            .columns()
            .iter()
            .map(|c| self.apply(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix::from_columns(self.m(), &cols))
    }
}

/// `A u` without materializing `A`.
pub fn gen_matvec<M: Modulus>(gen: &Generator<M>, u: &[Fp<M>]) -> Result<Vec<Fp<M>>> {
    MatvecPlan::new(gen)?.apply(u)
}

/// `A^t u`.
pub fn gen_matvec_transposed<M: Modulus>(gen: &Generator<M>, u: &[Fp<M>]) -> Result<Vec<Fp<M>>> {
    MatvecPlan::new(&gen_transpose(gen))?.apply(u)
}

/// The dense matrix represented by `gen`, one basis vector at a time.
pub fn reconstruct_dense<M: Modulus>(gen: &Generator<M>) -> Result<DenseMatrix<M>> {
    let plan = MatvecPlan::new(gen)?;
    plan.apply_matrix(&DenseMatrix::identity(gen.n()))
}

/// Generator of `A^t` for the operator with `M' = N^t`, `N' = M^t`.
pub fn gen_transpose<M: Modulus>(gen: &Generator<M>) -> Generator<M> {
    let g = match gen.op.kind {
        OperatorKind::Sylvester => gen.h.neg(),
        OperatorKind::Stein => gen.h.clone(),
    };
    Generator {
        g,
        h: gen.g.clone(),
        op: gen.op.transposed(),
        last_row: None,
    }
}

/// Factors `X = C R` with `C` a set of columns of `X` forming a basis of its
/// column space; returns `(C, R)`.
pub fn column_basis<M: Modulus>(x: &DenseMatrix<M>) -> (DenseMatrix<M>, DenseMatrix<M>) {
    let mut r = x.clone();
    let piv = r.rref_in_place();
    let cols: Vec<Vec<Fp<M>>> = piv.iter().map(|&j| x.column(j)).collect();
    (
        DenseMatrix::from_columns(x.rows(), &cols),
        r.row_range(0, piv.len()),
    )
}

/// A generator of the same matrix whose length is `rank(G H^t)`.
pub fn gen_compress<M: Modulus>(gen: &Generator<M>) -> Generator<M> {
    if gen.is_empty() {
        return gen.clone();
    }
    let (g1, t) = column_basis(&gen.g);
    let h1 = gen.h.mul(&t.transpose());
    let (h2, s) = column_basis(&h1);
    let g2 = g1.mul(&s.transpose());
    Generator {
        g: g2,
        h: h2,
        op: gen.op.clone(),
        last_row: gen.last_row.clone(),
    }
}

/// Multiplies by the `k x k` lower shift `Z_{k,phi}` (companion of `x^k - phi`).
pub fn z_apply<M: Modulus>(v: &[Fp<M>], phi: Fp<M>, transposed: bool) -> Vec<Fp<M>> {
    let k = v.len();
    if k == 0 {
        return Vec::new();
    }
    let mut out = vec![Fp::ZERO; k];
    if transposed {
        out[..k - 1].copy_from_slice(&v[1..]);
        out[k - 1] = phi * v[0];
    } else {
        out[1..].copy_from_slice(&v[..k - 1]);
        out[0] = phi * v[k - 1];
    }
    out
}

fn reversed<M: Modulus>(v: &[Fp<M>]) -> Vec<Fp<M>> {
    v.iter().rev().copied().collect()
}

/// Operator `∇_{Z_{m,0}, Z_{n,1}^t}` targeted by [`to_hankel`].
pub fn toeplitz_operator<M: Modulus>(m: usize, n: usize) -> DisplacementOperator<M> {
    DisplacementOperator::binomial(
        OperatorKind::Sylvester,
        m,
        Fp::ZERO,
        n,
        Fp::ONE,
        false,
        true,
    )
}

/// Operator `∇_{Z_{n,1}^t, Z_{m,0}}` of the inverse of a [`toeplitz_operator`] matrix.
pub fn toeplitz_inverse_operator<M: Modulus>(m: usize, n: usize) -> DisplacementOperator<M> {
    DisplacementOperator::binomial(
        OperatorKind::Sylvester,
        n,
        Fp::ONE,
        m,
        Fp::ZERO,
        true,
        false,
    )
}

/// Context of the change of operator `A' = L A R` with
/// `L = J_m W_P^t Y_P^{-1}` and `R = Y_Q^{-1} W_Q J_n`.
#[derive(Debug, Clone)]
pub struct HankelContext<M: Modulus = P998> {
    pub kind: OperatorKind,
    pub p: Arc<PolyFamily<M>>,
    pub q: Arc<PolyFamily<M>>,
    pub t: Vec<Fp<M>>,
    pub u: Vec<Fp<M>>,
    pub r: Vec<Fp<M>>,
    pub s: Vec<Fp<M>>,
}

impl<M: Modulus> HankelContext<M> {
    pub fn m(&self) -> usize {
        self.p.total_degree()
    }

    pub fn n(&self) -> usize {
        self.q.total_degree()
    }

    /// `L v`.
    pub fn apply_l(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        let y = y_apply_family(&self.p, v, true);
        reversed(&self.p.red_transposed(&y, false))
    }

    /// `L^t v`.
    pub fn apply_lt(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        let w = self.p.stack(&self.p.red(&Poly::new(reversed(v))));
        y_apply_family(&self.p, &w, true)
    }

    /// `R v`.
    pub fn apply_r(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        let w = self.q.stack(&self.q.red(&Poly::new(reversed(v))));
        y_apply_family(&self.q, &w, true)
    }

    /// `R^t v`.
    pub fn apply_rt(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        let y = y_apply_family(&self.q, v, true);
        reversed(&self.q.red_transposed(&y, false))
    }
}

/// Turns a basic generator of `A` into a `∇_{Z_{m,0}, Z_{n,1}^t}` generator of
/// length `alpha + 2` for `A' = L A R` (Sylvester) or `A' J_n` (Stein).
pub fn to_hankel<M: Modulus>(gen: &Generator<M>) -> Result<(Generator<M>, HankelContext<M>)> {
    let op = &gen.op;
    if !op.is_basic() {
        return Err(Error::PreconditionViolated(
            "to_hankel expects a basic operator".into(),
        ));
    }
    if !op.is_invertible() {
        return Err(Error::SingularOperator);
    }
    let (m, n) = (op.m(), op.n());
    let (p, q) = (op.p.clone(), op.q.clone());
    let pvec = p.product().to_vec(m + 1)[..m].to_vec();
    let u = y_apply_family(&p, &p.stack(&p.red(&Poly::new(pvec))), true);
    let mut nvec = q.product().to_vec(n + 1)[..n].to_vec();
    nvec[0] += Fp::ONE;
    let r: Vec<Fp<M>> = y_apply_family(&q, &q.stack(&q.red(&Poly::new(nvec))), true)
        .into_iter()
        .map(|x| -x)
        .collect();
    let t = unit(m, 0);
    let s = unit(n, 0);
    let ctx = HankelContext {
        kind: op.kind,
        p,
        q,
        t,
        u,
        r,
        s,
    };

    let plan = MatvecPlan::new(gen)?;
    let plan_t = MatvecPlan::new(&gen_transpose(gen))?;
    let ar = plan.apply(&ctx.r)?;
    let atu = plan_t.apply(&ctx.u)?;
    let lg = map_columns(&gen.g, |c| ctx.apply_l(c));
    let rh = map_columns(&gen.h, |c| ctx.apply_rt(c));
    let (g, h) = match op.kind {
        OperatorKind::Sylvester => {
            let lar = ctx.apply_l(&ar);
            let rau = ctx.apply_rt(&atu);
            (
                DenseMatrix::hcat(m, &[&col(&ctx.t), &lg, &col(&lar)]),
                DenseMatrix::hcat(n, &[&col(&rau), &rh, &col(&ctx.s)]),
            )
        }
        OperatorKind::Stein => {
            // Δ_{Z0,Z1^t}(A') = [-t | LG | Z0 L A r] [R^t M_Q A^t u | R^t H | s]^t,
            // then ∇_{Z0,Z1^t}(A' J) = -Δ(A') Z1 J.
            let zlar = z_apply(&ctx.apply_l(&ar), Fp::ZERO, false);
            let mq = companion_apply(&ctx.q, &atu, false)?;
            let rmau = ctx.apply_rt(&mq);
            let neg_t: Vec<Fp<M>> = ctx.t.iter().map(|&x| -x).collect();
            let gd = DenseMatrix::hcat(m, &[&col(&neg_t), &lg, &col(&zlar)]);
            let hd = DenseMatrix::hcat(n, &[&col(&rmau), &rh, &col(&ctx.s)]);
            (
                gd.neg(),
                map_columns(&hd, |c| reversed(&z_apply(c, Fp::ONE, true))),
            )
        }
    };
    let hank = Generator::new(toeplitz_operator(m, n), g, h)?;
    Ok((hank, ctx))
}

fn col<M: Modulus>(v: &[Fp<M>]) -> DenseMatrix<M> {
    DenseMatrix::from_columns(v.len(), &[v.to_vec()])
}

/// Maps a `∇_{Z_{n,1}^t, Z_{m,0}}` generator of the inverse of the matrix
/// produced by [`to_hankel`] to a compressed generator of `A^{-1}` for the
/// operator `(Q, P)` with flags `(true, false)`.
pub fn from_hankel_inverse<M: Modulus>(
    ctx: &HankelContext<M>,
    inv: &Generator<M>,
) -> Result<Generator<M>> {
    let (m, n) = (ctx.m(), ctx.n());
    if m != n || inv.m() != n || inv.n() != m {
        return Err(Error::DimensionMismatch("inverse generator shape".into()));
    }
    let plan = MatvecPlan::new(inv)?;
    let plan_t = MatvecPlan::new(&gen_transpose(inv))?;
    let ry = |y: &DenseMatrix<M>| map_columns(y, |c| ctx.apply_r(c));
    let lz = map_columns(&inv.h, |c| ctx.apply_lt(c));
    let (g, h) = match ctx.kind {
        OperatorKind::Sylvester => {
            let rat = ctx.apply_r(&plan.apply(&ctx.t)?);
            let las = ctx.apply_lt(&plan_t.apply(&ctx.s)?);
            (
                DenseMatrix::hcat(n, &[&col(&ctx.r), &ry(&inv.g), &col(&rat)]),
                DenseMatrix::hcat(m, &[&col(&las), &lz, &col(&ctx.u)]),
            )
        }
        OperatorKind::Stein => {
            // B = A'^{-1} = J (A'J)^{-1}, with Δ_{Z1^t,Z0}(B) = Z1^t J Y Z^t.
            let bt = reversed(&plan.apply(&ctx.t)?);
            let bts = plan_t.apply(&reversed(&ctx.s))?;
            let mrbt = companion_apply(&ctx.q, &ctx.apply_r(&bt), true)?;
            let lzbs = ctx.apply_lt(&z_apply(&bts, Fp::ZERO, true));
            let zjy = map_columns(&inv.g, |c| {
                ctx.apply_r(&z_apply(&reversed(c), Fp::ONE, true))
            });
            let neg_r: Vec<Fp<M>> = ctx.r.iter().map(|&x| -x).collect();
            (
                DenseMatrix::hcat(n, &[&col(&neg_r), &zjy, &col(&mrbt)]),
                DenseMatrix::hcat(m, &[&col(&lzbs), &lz, &col(&ctx.u)]),
            )
        }
    };
    let op = DisplacementOperator::new(ctx.kind, ctx.q.clone(), ctx.p.clone(), true, false);
    Ok(gen_compress(&Generator::new(op, g, h)?))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::{P7, P998};
    use crate::operators::{dense_of, dense_y_family};
    use crate::oracle::{dense_apply_operator, dense_solve_displacement};
    use crate::poly::family::FlavorHint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F = Fp<P998>;

    fn lin_family(roots: &[i64]) -> Arc<PolyFamily<P7>> {
        Arc::new(
            PolyFamily::new(
                roots.iter().map(|&r| Poly::from_i64s(&[-r, 1])).collect(),
                FlavorHint::General,
            )
            .unwrap(),
        )
    }

    fn cauchy() -> Generator<P7> {
        let op = DisplacementOperator::basic(
            OperatorKind::Sylvester,
            lin_family(&[2, 3]),
            lin_family(&[0, 1]),
        );
        let ones = DenseMatrix::from_i64_rows(&[vec![1], vec![1]]);
        Generator::new(op, ones.clone(), ones).unwrap()
    }

    pub(crate) fn random_family(rng: &mut ChaCha8Rng, m: usize) -> Arc<PolyFamily<P998>> {
        match rng.gen_range(0..3) {
            0 => Arc::new(PolyFamily::single_power(m, F::new(rng.gen_range(0..4)))),
            1 => Arc::new(
                PolyFamily::geometric(
                    F::new(rng.gen_range(1..100)),
                    F::new(rng.gen_range(2..100)),
                    m,
                )
                .unwrap(),
            ),
            _ => loop {
                let mut polys = Vec::new();
                let mut left = m;
                while left > 0 {
                    let d = rng.gen_range(1..=left.min(4));
                    let mut c: Vec<F> = (0..d).map(|_| F::new(rng.gen())).collect();
                    c.push(F::ONE);
                    polys.push(Poly::new(c));
                    left -= d;
                }
                if let Ok(f) = PolyFamily::new(polys, FlavorHint::General) {
                    break Arc::new(f);
                }
            },
        }
    }

    pub(crate) fn random_invertible_op(
        rng: &mut ChaCha8Rng,
        m: usize,
        n: usize,
        kind: OperatorKind,
        tp: bool,
        tq: bool,
    ) -> DisplacementOperator<P998> {
        loop {
            let op = DisplacementOperator::new(
                kind,
                random_family(rng, m),
                random_family(rng, n),
                tp,
                tq,
            );
            if op.is_invertible() {
                return op;
            }
        }
    }

    fn random_gen(
        rng: &mut ChaCha8Rng,
        op: DisplacementOperator<P998>,
        alpha: usize,
    ) -> Generator<P998> {
        let g = DenseMatrix::random(op.m(), alpha, rng);
        let h = DenseMatrix::random(op.n(), alpha, rng);
        Generator::new(op, g, h).unwrap()
    }

    #[test]
    fn cauchy_reconstruction_and_matvec() {
        let gen = cauchy();
        assert_eq!(
            reconstruct_dense(&gen).unwrap(),
            DenseMatrix::from_i64_rows(&[vec![4, 1], vec![5, 4]])
        );
        let one = Fp::<P7>::ONE;
        assert_eq!(
            gen_matvec(&gen, &[one, one]).unwrap(),
            vec![Fp::new(5), Fp::new(2)]
        );
        assert_eq!(
            gen_matvec(&gen, &[Fp::ZERO, Fp::ZERO]).unwrap(),
            vec![Fp::ZERO; 2]
        );
        let t = gen_transpose(&gen);
        assert_eq!(
            reconstruct_dense(&t).unwrap(),
            reconstruct_dense(&gen).unwrap().transpose()
        );
    }

    #[test]
    fn zero_length_is_zero_matrix() {
        let gen = Generator::zero(cauchy().op);
        assert!(reconstruct_dense(&gen).unwrap().is_zero());
    }

    #[test]
    fn reconstruction_all_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..64 {
            let kind = if trial % 2 == 0 {
                OperatorKind::Sylvester
            } else {
                OperatorKind::Stein
            };
            let (tp, tq) = ((trial / 2) % 2 == 1, (trial / 4) % 2 == 1);
            let m = rng.gen_range(1..=9);
            let n = rng.gen_range(1..=9);
            let alpha = rng.gen_range(0..=3);
            let op = random_invertible_op(&mut rng, m, n, kind, tp, tq);
            let gen = random_gen(&mut rng, op, alpha);
            let a = reconstruct_dense(&gen).unwrap();
            assert_eq!(
                dense_apply_operator(&gen.op, &a).unwrap(),
                gen.displacement(),
                "trial {trial}"
            );
            assert_eq!(
                a,
                dense_solve_displacement(&gen.op, &gen.displacement()).unwrap()
            );
            let at = reconstruct_dense(&gen_transpose(&gen)).unwrap();
            assert_eq!(at, a.transpose());
            let tt = reconstruct_dense(&gen_transpose(&gen_transpose(&gen))).unwrap();
            assert_eq!(tt, a);
        }
    }

    #[test]
    fn to_basic_table_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in [OperatorKind::Sylvester, OperatorKind::Stein] {
            for (tp, tq) in [(false, false), (true, true), (true, false), (false, true)] {
                let op = random_invertible_op(&mut rng, 6, 5, kind, tp, tq);
                let gen = random_gen(&mut rng, op.clone(), 2);
                let (b, tf) = to_basic(&gen);
                assert!(b.op.is_basic());
                assert_eq!(tf.is_identity(), op.is_basic());
                let a = reconstruct_dense(&gen).unwrap();
                let yp = dense_y_family(&op.p);
                let yq = dense_y_family(&op.q);
                let mut expect = a.clone();
                if tf.e1 {
                    expect = yp.mul(&expect);
                }
                if tf.e2 {
                    expect = expect.mul(&yq);
                }
                assert_eq!(reconstruct_dense(&b).unwrap(), expect);
                assert_eq!(
                    dense_apply_operator(&b.op, &expect).unwrap(),
                    b.displacement()
                );
            }
        }
    }

    #[test]
    fn compression() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let op = random_invertible_op(&mut rng, 7, 6, OperatorKind::Sylvester, false, true);
        let gen = random_gen(&mut rng, op, 3);
        let a = reconstruct_dense(&gen).unwrap();
        let dup_g = DenseMatrix::hcat(7, &[&gen.g, &gen.g.col_range(0, 1)]);
        let dup_h = DenseMatrix::hcat(6, &[&gen.h, &DenseMatrix::random(6, 1, &mut rng)]);
        let dup = Generator::new(gen.op.clone(), dup_g, dup_h).unwrap();
        let c = gen_compress(&dup);
        assert!(c.len() < dup.len());
        assert_eq!(c.len(), dup.displacement().rank());
        assert_eq!(c.displacement(), dup.displacement());
        assert_eq!(gen_compress(&gen).len(), 3);
        assert_eq!(reconstruct_dense(&gen_compress(&gen)).unwrap(), a);
        let empty = Generator::zero(gen.op.clone());
        assert_eq!(gen_compress(&empty), empty);
    }

    fn dense_l(ctx: &HankelContext<P998>) -> DenseMatrix<P998> {
        dense_of(ctx.m(), |v| ctx.apply_l(v))
    }

    fn dense_r(ctx: &HankelContext<P998>) -> DenseMatrix<P998> {
        dense_of(ctx.n(), |v| ctx.apply_r(v))
    }

    #[test]
    fn hankel_transform_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..24 {
            let kind = if trial % 2 == 0 {
                OperatorKind::Sylvester
            } else {
                OperatorKind::Stein
            };
            let m = rng.gen_range(1..=10);
            let n = rng.gen_range(1..=10);
            let op = random_invertible_op(&mut rng, m, n, kind, false, true);
            let alpha = rng.gen_range(0..=3);
            let gen = random_gen(&mut rng, op.clone(), alpha);
            let (hank, ctx) = to_hankel(&gen).unwrap();
            let (l, r) = (dense_l(&ctx), dense_r(&ctx));
            assert_eq!(dense_of(m, |v| ctx.apply_lt(v)), l.transpose());
            assert_eq!(dense_of(n, |v| ctx.apply_rt(v)), r.transpose());
            let zm = dense_of(m, |v| z_apply(v, F::ZERO, false));
            let zn1t = dense_of(n, |v| z_apply(v, F::ONE, true));
            let pm = op.dense_m();
            let qmt = crate::operators::dense_companion(&op.q, true);
            let tu = col(&ctx.t).mul(&col(&ctx.u).transpose());
            assert_eq!(zm.mul(&l).sub(&l.mul(&pm)), tu);
            let rs = col(&ctx.r).mul(&col(&ctx.s).transpose());
            assert_eq!(qmt.mul(&r).sub(&r.mul(&zn1t)), rs);
            let a = reconstruct_dense(&gen).unwrap();
            let mut ap = l.mul(&a).mul(&r);
            if kind == OperatorKind::Stein {
                ap = dense_of(n, |v| ap.mul_vec(&reversed(v)));
            }
            assert_eq!(hank.len(), gen.len() + 2);
            assert_eq!(reconstruct_dense(&hank).unwrap(), ap, "trial {trial}");
            assert_eq!(
                dense_apply_operator(&hank.op, &ap).unwrap(),
                hank.displacement()
            );
        }
    }

    #[test]
    fn hankel_inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        let mut trial = 0;
        while done < 16 {
            trial += 1;
            let kind = if trial % 2 == 0 {
                OperatorKind::Sylvester
            } else {
                OperatorKind::Stein
            };
            let m = rng.gen_range(1..=9);
            let op = random_invertible_op(&mut rng, m, m, kind, false, true);
            let alpha = rng.gen_range(1..=3);
            let gen = random_gen(&mut rng, op, alpha);
            let a = reconstruct_dense(&gen).unwrap();
            let Ok(ainv) = a.inv() else { continue };
            let (hank, ctx) = to_hankel(&gen).unwrap();
            let hd = reconstruct_dense(&hank).unwrap();
            let hinv = hd.inv().unwrap();
            let iop = toeplitz_inverse_operator(m, m);
            let (y, z) = (hinv.mul(&hank.g).neg(), hinv.transpose().mul(&hank.h));
            let ig = Generator::new(iop, y, z).unwrap();
            assert_eq!(reconstruct_dense(&ig).unwrap(), hinv);
            let back = from_hankel_inverse(&ctx, &ig).unwrap();
            assert!(back.len() <= alpha, "trial {trial}");
            assert_eq!(reconstruct_dense(&back).unwrap(), ainv, "trial {trial}");
            done += 1;
        }
    }
}
