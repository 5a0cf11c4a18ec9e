//! Las Vegas inversion and system solving for structured matrices.
//!
//! The core works on matrices with `∇_{Z_{m,0}, Z_{n,1}^t}` generators: a
//! random unit triangular Toeplitz preconditioning gives generic rank profile
//! with high probability, and a divide-and-conquer on leading principal
//! blocks inverts the leading regular part. Other invertible operators are
//! reduced to this case first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};
use crate::generators::{
    column_basis, from_basic_inverse, from_hankel_inverse, gen_compress, gen_transpose,
    map_columns, to_basic, to_hankel, toeplitz_inverse_operator, z_apply, Generator,
};
use crate::matrix::DenseMatrix;
use crate::operators::{unit, y_apply_family, DisplacementOperator, OperatorKind};
use crate::oracle::densify_partly_regular;
use crate::poly::Poly;
use crate::structmul::apply_matrix;

/// Dimension at or below which [`largest_rec`] switches to dense elimination.
pub const DEFAULT_BASE_CUTOFF: usize = 16;

/// Options for [`inv`] and [`solve`].
/// Preconditioner vectors `(v1, v2)`.
pub type Preconditioners<M> = (Vec<Fp<M>>, Vec<Fp<M>>);

/// Partly regular generator `(G, H, u)`.
pub type PartlyRegularGenerator<M> = (DenseMatrix<M>, DenseMatrix<M>, Vec<Fp<M>>);

#[derive(Debug, Clone)]
pub struct SolverConfig<M: Modulus = P998> {
    /// Seed of the random preconditioners.
    pub seed: u64,
    /// Size of the sampling set `{0, ..., s - 1}`; `None` selects `2 p (p + 1)`
    /// with `p = max(m, n)`.
    pub sample_size: Option<u64>,
    /// Dense base case threshold of the recursion.
    pub base_cutoff: usize,
    /// Caller-supplied `(v1, v2)`, bypassing the random draw.
    pub preconditioners: Option<Preconditioners<M>>,
}

impl<M: Modulus> Default for SolverConfig<M> {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            sample_size: None,
            base_cutoff: DEFAULT_BASE_CUTOFF,
            preconditioners: None,
        }
    }
}

impl<M: Modulus> SolverConfig<M> {
    /// Default configuration with the given seed.
    pub fn seeded(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Self::default()
        }
    }

    /// Draws `v1 in F^m`, `v2 in F^n` with leading entry 1 and other entries in the sampling set.
    pub fn draw_preconditioners(&self, m: usize, n: usize) -> Result<Preconditioners<M>> {
        if let Some((v1, v2)) = &self.preconditioners {
            if v1.len() != m || v2.len() != n {
                return Err(Error::DimensionMismatch("preconditioner lengths".into()));
            }
            if (m > 0 && v1[0] != Fp::ONE) || (n > 0 && v2[0] != Fp::ONE) {
                return Err(Error::PreconditionViolated(
                    "preconditioners must start with 1".into(),
                ));
            }
            return Ok((v1.clone(), v2.clone()));
        }
        let p = m.max(n) as u64;
        let s = self.sample_size.unwrap_or(2 * p * (p + 1)).max(1);
        if s > M::P {
            return Err(Error::PreconditionViolated(format!(
                "sampling set of size {s} exceeds the field"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = |k: usize| -> Vec<Fp<M>> {
            (0..k)
                .map(|i| {
                    if i == 0 {
                        Fp::ONE
                    } else {
                        Fp::new(rng.gen_range(0..s))
                    }
                })
                .collect()
        };
        let v1 = draw(m);
        let v2 = draw(n);
        Ok((v1, v2))
    }
}

/// Outcome of [`inv`].
#[derive(Debug, Clone)]
pub enum InvOutcome<M: Modulus = P998> {
    /// Generator of `A^{-1}` for the inverse operator.
    Inverse(Generator<M>),
    /// `A` is singular (certified).
    Singular,
    /// The preconditioners did not give generic rank profile.
    Failure,
}

/// Outcome of [`solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome<M: Modulus = P998> {
    /// A solution; nonzero whenever `A` lacks full column rank.
    Solution(Vec<Fp<M>>),
    /// The system is inconsistent (certified).
    NoSolution,
    /// The preconditioners did not give generic rank profile.
    Failure,
}

/// Leading principal inverse: `ell` and `(Y, Z, v) = (-A_ell^{-1} G_ell, A_ell^{-t} H_ell, A_ell^{-t} e_1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingInverse<M: Modulus = P998> {
    pub ell: usize,
    pub y: DenseMatrix<M>,
    pub z: DenseMatrix<M>,
    pub v: Vec<Fp<M>>,
}

impl<M: Modulus> LeadingInverse<M> {
    fn empty(alpha: usize) -> Self {
        LeadingInverse {
            ell: 0,
            y: DenseMatrix::zeros(0, alpha),
            z: DenseMatrix::zeros(0, alpha),
            v: Vec::new(),
        }
    }

    /// Generator `([Y | e_ell], [Z | v])` of `A_ell^{-1}` for `∇_{Z_{ell,1}^t, Z_{ell,0}}`.
    pub fn generator(&self) -> Result<Generator<M>> {
        let l = self.ell;
        let op = DisplacementOperator::binomial(
            OperatorKind::Sylvester,
            l,
            Fp::ONE,
            l,
            Fp::ZERO,
            true,
            false,
        );
        let g = DenseMatrix::hcat(l, &[&self.y, &col(&unit(l, l - 1))]);
        let h = DenseMatrix::hcat(l, &[&self.z, &col(&self.v)]);
        Generator::new(op, g, h)
    }
}

/// Outcome of [`lp_inv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpInvResult<M: Modulus = P998> {
    /// `A` has generic rank profile and rank `r = inverse.ell`.
    Success(LeadingInverse<M>),
    /// Some leading principal minor of order at most the rank vanishes.
    Failure,
}

fn col<M: Modulus>(v: &[Fp<M>]) -> DenseMatrix<M> {
    DenseMatrix::from_columns(v.len(), &[v.to_vec()])
}

fn embed<M: Modulus>(x: &DenseMatrix<M>, total: usize, offset: usize) -> DenseMatrix<M> {
    let c = x.cols();
    let below = DenseMatrix::zeros(total - offset - x.rows(), c);
    DenseMatrix::vcat(c, &[&DenseMatrix::zeros(offset, c), x, &below])
}

fn product<M: Modulus>(gen: &Generator<M>, x: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
    if x.cols() == 0 || gen.m() == 0 || gen.n() == 0 {
        return Ok(DenseMatrix::zeros(gen.m(), x.cols()));
    }
    apply_matrix(gen, x)
}

/// A matrix given by `Z_{m,0} A - A Z_{n,0}^t = G H^t` and its last row `u`,
/// stored as the equivalent `∇_{Z_{m,1}, Z_{n,0}^t}` generator `([G | e_1], [H | u])`.
struct PartlyRegular<M: Modulus> {
    fwd: Generator<M>,
    bwd: Generator<M>,
}

impl<M: Modulus> PartlyRegular<M> {
    fn new(g: &DenseMatrix<M>, h: &DenseMatrix<M>, u: &[Fp<M>]) -> Result<Self> {
        let (m, n) = (g.rows(), h.rows());
        let op = DisplacementOperator::binomial(
            OperatorKind::Sylvester,
            m,
            Fp::ONE,
            n,
            Fp::ZERO,
            false,
            true,
        );
        let fwd = Generator::new(
            op,
            DenseMatrix::hcat(m, &[g, &col(&unit(m, 0))]),
            DenseMatrix::hcat(n, &[h, &col(u)]),
        )?;
        let bwd = gen_transpose(&fwd);
        Ok(PartlyRegular { fwd, bwd })
    }

    fn mul(&self, x: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
        product(&self.fwd, x)
    }

    fn tmul(&self, x: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
        product(&self.bwd, x)
    }
}

fn dense_leading<M: Modulus>(
    g: &DenseMatrix<M>,
    h: &DenseMatrix<M>,
    u: &[Fp<M>],
) -> Result<LeadingInverse<M>> {
    let a = densify_partly_regular(g, h, u);
    let ell = a.leading_regular_order();
    if ell == 0 {
        return Ok(LeadingInverse::empty(g.cols()));
    }
    let b = a.submatrix(0, ell, 0, ell).inv()?;
    let bt = b.transpose();
    Ok(LeadingInverse {
        ell,
        y: b.mul(&g.row_range(0, ell)).neg(),
        z: bt.mul(&h.row_range(0, ell)),
        v: b.row(0).to_vec(),
    })
}

/// Leading principal inverse of a square `p x p` partly regular matrix, `p` a power of two.
pub fn largest_rec<M: Modulus>(
    g: &DenseMatrix<M>,
    h: &DenseMatrix<M>,
    u: &[Fp<M>],
    cutoff: usize,
) -> Result<LeadingInverse<M>> {
    let p = g.rows();
    if h.rows() != p || u.len() != p || g.cols() != h.cols() {
        return Err(Error::DimensionMismatch(
            "largest_rec expects a square generator".into(),
        ));
    }
    if !p.is_power_of_two() {
        return Err(Error::PreconditionViolated(format!(
            "dimension {p} is not a power of two"
        )));
    }
    if p <= cutoff.max(1) {
        return dense_leading(g, h, u);
    }
    let alpha = g.cols();
    let p1 = p / 2;
    let pr = PartlyRegular::new(g, h, u)?;
    let u11 = pr.tmul(&col(&unit(p, p1 - 1)))?.column(0)[..p1].to_vec();
    let left = largest_rec(&g.row_range(0, p1), &h.row_range(0, p1), &u11, cutoff)?;
    if left.ell < p1 {
        return Ok(left);
    }
    let inv11 = left.generator()?;
    let inv11_t = gen_transpose(&inv11);

    // Schur complement S = A22 - A21 A11^{-1} A12
    let a = product(&inv11_t, &col(&u[..p1]))?;
    let zav = DenseMatrix::hcat(p1, &[&left.z, &a, &col(&left.v)]);
    let t1 = pr.tmul(&embed(&zav, p, 0))?.row_range(p1, p);
    let hs = h.row_range(p1, p).sub(&t1.col_range(0, alpha));
    let us: Vec<Fp<M>> = u[p1..]
        .iter()
        .zip(t1.column(alpha))
        .map(|(&x, y)| x - y)
        .collect();
    let tv = t1.column(alpha + 1);
    let gs = g
        .row_range(p1, p)
        .add(&pr.mul(&embed(&left.y, p, 0))?.row_range(p1, p));
    let right = largest_rec(&gs, &hs, &us, cutoff)?;
    let ls = right.ell;
    if ls == 0 {
        return Ok(LeadingInverse { ell: p1, ..left });
    }

    let invs_t = gen_transpose(&right.generator()?);
    let w: Vec<Fp<M>> = product(&invs_t, &col(&tv[..ls]))?
        .column(0)
        .into_iter()
        .map(|x| -x)
        .collect();
    let a12y = pr.mul(&embed(&right.y, p, p1))?.row_range(0, p1);
    let ytop = left.y.sub(&product(&inv11, &a12y)?);
    let zw = DenseMatrix::hcat(ls, &[&right.z, &col(&w)]);
    let a21zw = pr.tmul(&embed(&zw, p, p1))?.row_range(0, p1);
    let zvtop = DenseMatrix::hcat(p1, &[&left.z, &col(&left.v)]).sub(&product(&inv11_t, &a21zw)?);
    let mut v = zvtop.column(alpha);
    v.extend(w);
    Ok(LeadingInverse {
        ell: p1 + ls,
        y: DenseMatrix::vcat(alpha, &[&ytop, &right.y]),
        z: DenseMatrix::vcat(alpha, &[&zvtop.col_range(0, alpha), &right.z]),
        v,
    })
}

/// Leading principal inverse of an `m x n` partly regular matrix, through
/// zero padding to a power-of-two square.
pub fn largest<M: Modulus>(
    g: &DenseMatrix<M>,
    h: &DenseMatrix<M>,
    u: &[Fp<M>],
    cutoff: usize,
) -> Result<LeadingInverse<M>> {
    let (m, n, alpha) = (g.rows(), h.rows(), g.cols());
    if h.cols() != alpha || u.len() != n {
        return Err(Error::DimensionMismatch(
            "partly regular generator shape".into(),
        ));
    }
    if m == 0 || n == 0 {
        return Ok(LeadingInverse::empty(alpha));
    }
    let pbar = m.max(n).next_power_of_two();
    if pbar == m && pbar == n {
        return largest_rec(g, h, u, cutoff);
    }
    let mut gparts = vec![g.resized(pbar, alpha)];
    let mut hparts = vec![h.resized(pbar, alpha)];
    if pbar > m {
        gparts.push(col(&unit(pbar, m)));
        let mut uu = u.to_vec();
        uu.resize(pbar, Fp::ZERO);
        hparts.push(col(&uu));
    }
    if pbar > n {
        let pr = PartlyRegular::new(g, h, u)?;
        let mut last: Vec<Fp<M>> = pr
            .mul(&col(&unit(n, n - 1)))?
            .column(0)
            .into_iter()
            .map(|x| -x)
            .collect();
        last.resize(pbar, Fp::ZERO);
        gparts.push(col(&last));
        hparts.push(col(&unit(pbar, n)));
    }
    let gbar = DenseMatrix::hcat(pbar, &gparts.iter().collect::<Vec<_>>());
    let hbar = DenseMatrix::hcat(pbar, &hparts.iter().collect::<Vec<_>>());
    let mut ubar = if pbar > m { Vec::new() } else { u.to_vec() };
    ubar.resize(pbar, Fp::ZERO);
    let r = largest_rec(&gbar, &hbar, &ubar, cutoff)?;
    Ok(LeadingInverse {
        ell: r.ell,
        y: r.y.col_range(0, alpha),
        z: r.z.col_range(0, alpha),
        v: r.v,
    })
}

/// Leading principal inverse of order `rank(A)` when `A` has generic rank profile.
pub fn lp_inv<M: Modulus>(
    g: &DenseMatrix<M>,
    h: &DenseMatrix<M>,
    u: &[Fp<M>],
    cutoff: usize,
) -> Result<LpInvResult<M>> {
    let lead = largest(g, h, u, cutoff)?;
    let (m, n, alpha) = (g.rows(), h.rows(), g.cols());
    let ell = lead.ell;
    if ell == m.min(n) {
        return Ok(LpInvResult::Success(lead));
    }
    let (gs, hs, us) = if ell == 0 {
        (g.clone(), h.clone(), u.to_vec())
    } else {
        let pr = PartlyRegular::new(g, h, u)?;
        let inv_t = gen_transpose(&lead.generator()?);
        let a = product(&inv_t, &col(&u[..ell]))?;
        let za = DenseMatrix::hcat(ell, &[&lead.z, &a]);
        let t1 = pr.tmul(&embed(&za, m, 0))?.row_range(ell, n);
        let hs = h.row_range(ell, n).sub(&t1.col_range(0, alpha));
        let us: Vec<Fp<M>> = u[ell..]
            .iter()
            .zip(t1.column(alpha))
            .map(|(&x, y)| x - y)
            .collect();
        let gs = g
            .row_range(ell, m)
            .add(&pr.mul(&embed(&lead.y, n, 0))?.row_range(ell, m));
        (gs, hs, us)
    };
    let gx = DenseMatrix::hcat(m - ell, &[&gs, &col(&unit(m - ell, 0))]);
    let hx = DenseMatrix::hcat(n - ell, &[&hs, &col(&us)]);
    let (_, r) = column_basis(&gx);
    if r.mul(&hx.transpose()).rank() == 0 {
        Ok(LpInvResult::Success(lead))
    } else {
        Ok(LpInvResult::Failure)
    }
}

/// `U(v) x` for the unit upper triangular Toeplitz matrix with first row `v`.
pub fn toeplitz_upper_apply<M: Modulus>(v: &[Fp<M>], x: &[Fp<M>]) -> Vec<Fp<M>> {
    let n = x.len();
    let rx: Vec<Fp<M>> = x.iter().rev().copied().collect();
    let mut y = Poly::new(v.to_vec()).mul_trunc(&Poly::new(rx), n).to_vec(n);
    y.reverse();
    y
}

/// `U(v)^t x`, a truncated product `v x mod x^n`.
pub fn toeplitz_upper_apply_transposed<M: Modulus>(v: &[Fp<M>], x: &[Fp<M>]) -> Vec<Fp<M>> {
    let n = x.len();
    Poly::new(v.to_vec())
        .mul_trunc(&Poly::new(x.to_vec()), n)
        .to_vec(n)
}

fn check_toeplitz_operator<M: Modulus>(op: &DisplacementOperator<M>) -> Result<()> {
    let single = |f: &crate::poly::family::PolyFamily<M>, phi: Fp<M>| {
        f.polys().len() == 1 && f.polys()[0].as_binomial() == Some(phi)
    };
    if op.kind == OperatorKind::Sylvester
        && !op.transpose_p
        && op.transpose_q
        && single(&op.p, Fp::ZERO)
        && single(&op.q, Fp::ONE)
    {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(
            "expected the operator ∇_{Z_{m,0}, Z_{n,1}^t}".into(),
        ))
    }
}

/// Partly regular generator `(G~, H~, u~)` of `A~ = U(v1) A U(v2)^t` for the
/// operator `∇_{Z_{m,0}, Z_{n,0}^t}`, with `G~` and `H~` of length `alpha + 4`.
pub fn precond<M: Modulus>(
    gen: &Generator<M>,
    v1: &[Fp<M>],
    v2: &[Fp<M>],
) -> Result<PartlyRegularGenerator<M>> {
    check_toeplitz_operator(&gen.op)?;
    let (m, n) = (gen.m(), gen.n());
    if v1.len() != m || v2.len() != n {
        return Err(Error::DimensionMismatch("preconditioner lengths".into()));
    }
    if v1[0] != Fp::ONE || v2[0] != Fp::ONE {
        return Err(Error::PreconditionViolated(
            "preconditioners must start with 1".into(),
        ));
    }
    let gen_t = gen_transpose(gen);
    let rev = |v: &[Fp<M>]| v.iter().rev().copied().collect::<Vec<_>>();
    let neg = |v: Vec<Fp<M>>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
    let g1 = DenseMatrix::hcat(
        m,
        &[
            &col(&z_apply(&rev(v1), Fp::ZERO, false)),
            &col(&neg(unit(m, 0))),
        ],
    );
    let h1 = DenseMatrix::hcat(
        m,
        &[&col(&unit(m, m - 1)), &col(&z_apply(v1, Fp::ZERO, true))],
    );
    let g2 = DenseMatrix::hcat(
        n,
        &[
            &col(&z_apply(v2, Fp::ONE, true)),
            &col(&neg(unit(n, n - 1))),
        ],
    );
    let h2 = DenseMatrix::hcat(
        n,
        &[&col(&unit(n, 0)), &col(&z_apply(&rev(v2), Fp::ZERO, false))],
    );
    let u1 = |c: &[Fp<M>]| toeplitz_upper_apply(v1, c);
    let u2 = |c: &[Fp<M>]| toeplitz_upper_apply(v2, c);
    let ag2 = product(gen, &g2)?;
    let e_m = toeplitz_upper_apply_transposed(v1, &unit(m, m - 1));
    let ath = product(&gen_t, &DenseMatrix::hcat(m, &[&h1, &col(&e_m)]))?;
    let gt = DenseMatrix::hcat(m, &[&map_columns(&gen.g, u1), &g1, &map_columns(&ag2, u1)]);
    let ht = DenseMatrix::hcat(
        n,
        &[
            &map_columns(&gen.h, u2),
            &map_columns(&ath.col_range(0, 2), u2),
            &h2,
        ],
    );
    let ut = u2(&ath.column(2));
    Ok((gt, ht, ut))
}

/// Inverse of a square matrix given by a `∇_{Z_{m,0}, Z_{m,1}^t}` generator.
/// On success the generator is for `∇_{Z_{m,1}^t, Z_{m,0}}`.
pub fn hankel_inv<M: Modulus>(gen: &Generator<M>, cfg: &SolverConfig<M>) -> Result<InvOutcome<M>> {
    check_toeplitz_operator(&gen.op)?;
    let (m, alpha) = (gen.m(), gen.len());
    if gen.n() != m {
        return Err(Error::DimensionMismatch(
            "inversion needs a square matrix".into(),
        ));
    }
    if alpha > m {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds m = {m}"
        )));
    }
    if m == 0 {
        return Ok(InvOutcome::Inverse(gen.clone()));
    }
    let (v1, v2) = cfg.draw_preconditioners(m, m)?;
    let (gt, ht, ut) = precond(gen, &v1, &v2)?;
    let lead = match lp_inv(&gt, &ht, &ut, cfg.base_cutoff)? {
        LpInvResult::Failure => return Ok(InvOutcome::Failure),
        LpInvResult::Success(l) if l.ell < m => return Ok(InvOutcome::Singular),
        LpInvResult::Success(l) => l,
    };
    let y = map_columns(&lead.y.col_range(0, alpha), |c| {
        toeplitz_upper_apply_transposed(&v2, c)
    });
    let z = map_columns(&lead.z.col_range(0, alpha), |c| {
        toeplitz_upper_apply_transposed(&v1, c)
    });
    Ok(InvOutcome::Inverse(Generator::new(
        toeplitz_inverse_operator(m, m),
        y,
        z,
    )?))
}

/// Solves `A x = b` for a `∇_{Z_{m,0}, Z_{n,1}^t}` generator of `A`.
pub fn hankel_solve<M: Modulus>(
    gen: &Generator<M>,
    b: &[Fp<M>],
    cfg: &SolverConfig<M>,
) -> Result<SolveOutcome<M>> {
    check_toeplitz_operator(&gen.op)?;
    let (m, n, alpha) = (gen.m(), gen.n(), gen.len());
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, expected {m}",
            b.len()
        )));
    }
    if alpha > m.min(n) {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds min(m, n)"
        )));
    }
    if n == 0 {
        return Ok(if b.iter().all(|x| x.is_zero()) {
            SolveOutcome::Solution(Vec::new())
        } else {
            SolveOutcome::NoSolution
        });
    }
    if m == 0 {
        let mut x = vec![Fp::ZERO; n];
        x[0] = Fp::ONE;
        return Ok(SolveOutcome::Solution(x));
    }
    let (v1, v2) = cfg.draw_preconditioners(m, n)?;
    let (gt, ht, ut) = precond(gen, &v1, &v2)?;
    let lead = match lp_inv(&gt, &ht, &ut, cfg.base_cutoff)? {
        LpInvResult::Failure => return Ok(SolveOutcome::Failure),
        LpInvResult::Success(l) => l,
    };
    let r = lead.ell;
    let bt = toeplitz_upper_apply(&v1, b);
    let inv = if r > 0 { Some(lead.generator()?) } else { None };
    let mut xt = vec![Fp::ZERO; n];
    if let Some(inv) = &inv {
        xt[..r].copy_from_slice(&product(inv, &col(&bt[..r]))?.column(0));
    }
    let at = PartlyRegular::new(&gt, &ht, &ut)?;
    let mut probes = vec![xt.clone()];
    if r < n {
        probes.push(unit(n, r));
    }
    let ax = at.mul(&DenseMatrix::from_columns(n, &probes))?;
    if ax.column(0)[r..] != bt[r..] {
        return Ok(SolveOutcome::NoSolution);
    }
    if r < n {
        if let Some(inv) = &inv {
            let k = product(inv, &col(&ax.column(1)[..r]))?.column(0);
            for (x, y) in xt.iter_mut().zip(k) {
                *x += y;
            }
        }
        xt[r] = -Fp::ONE;
    }
    Ok(SolveOutcome::Solution(toeplitz_upper_apply_transposed(
        &v2, &xt,
    )))
}

fn is_toeplitz<M: Modulus>(op: &DisplacementOperator<M>) -> bool {
    check_toeplitz_operator(op).is_ok()
}

/// Inverse of a square matrix given by a generator for any invertible operator.
/// On success the generator is for `gen.op.inverse_operator()` and has length at most `alpha`.
pub fn inv<M: Modulus>(gen: &Generator<M>, cfg: &SolverConfig<M>) -> Result<InvOutcome<M>> {
    if gen.m() != gen.n() {
        return Err(Error::DimensionMismatch(
            "inversion needs a square matrix".into(),
        ));
    }
    if !gen.op.is_invertible() {
        return Err(Error::SingularOperator);
    }
    if gen.len() > gen.m() {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {} exceeds m = {}",
            gen.len(),
            gen.m()
        )));
    }
    if is_toeplitz(&gen.op) {
        return hankel_inv(gen, cfg);
    }
    let (basic, tf) = to_basic(gen);
    let (hank, ctx) = to_hankel(&basic)?;
    let hank = gen_compress(&hank);
    match hankel_inv(&hank, cfg)? {
        InvOutcome::Inverse(ig) => {
            let ib = from_hankel_inverse(&ctx, &ig)?;
            Ok(InvOutcome::Inverse(from_basic_inverse(&gen.op, tf, &ib)))
        }
        other => Ok(other),
    }
}

/// Solves `A x = b` for a generator of `A` for any invertible operator.
pub fn solve<M: Modulus>(
    gen: &Generator<M>,
    b: &[Fp<M>],
    cfg: &SolverConfig<M>,
) -> Result<SolveOutcome<M>> {
    let (m, n) = (gen.m(), gen.n());
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, expected {m}",
            b.len()
        )));
    }
    if !gen.op.is_invertible() {
        return Err(Error::SingularOperator);
    }
    if gen.len() > m.min(n) {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {} exceeds min(m, n)",
            gen.len()
        )));
    }
    if is_toeplitz(&gen.op) {
        return hankel_solve(gen, b, cfg);
    }
    let (basic, tf) = to_basic(gen);
    let bb = if tf.e1 {
        y_apply_family(&gen.op.p, b, false)
    } else {
        b.to_vec()
    };
    let (hank, ctx) = to_hankel(&basic)?;
    let hank = gen_compress(&hank);
    let y = match hankel_solve(&hank, &ctx.apply_l(&bb), cfg)? {
        SolveOutcome::Solution(y) => y,
        other => return Ok(other),
    };
    let xb = match ctx.kind {
        OperatorKind::Sylvester => ctx.apply_r(&y),
        OperatorKind::Stein => ctx.apply_r(&y.iter().rev().copied().collect::<Vec<_>>()),
    };
    let x = if tf.e2 {
        y_apply_family(&gen.op.q, &xb, false)
    } else {
        xb
    };
    Ok(SolveOutcome::Solution(x))
}
