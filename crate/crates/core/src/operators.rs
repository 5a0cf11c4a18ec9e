//! Block companion matrices, modular multiplication matrices, symmetrizers,
//! and displacement operator descriptors. Everything is applied matrix-free.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};
use crate::matrix::DenseMatrix;
use crate::poly::family::{Flavor, PolyFamily};
use crate::poly::{self, Poly};

/// `M_P v` (or `M_P^t v`) for the block companion matrix of a family.
pub fn companion_apply<M: Modulus>(
    fam: &PolyFamily<M>,
    v: &[Fp<M>],
    transposed: bool,
) -> Result<Vec<Fp<M>>> {
    if v.len() != fam.total_degree() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a family of degree {}",
            v.len(),
            fam.total_degree()
        )));
    }
    let mut out = Vec::with_capacity(v.len());
    for (p, blk) in fam.polys().iter().zip(fam.split(v)) {
        let k = blk.len();
        let c = p.coeffs();
        if transposed {
            out.extend_from_slice(&blk[1..]);
            let s: Fp<M> = c[..k].iter().zip(blk).map(|(&a, &b)| a * b).sum();
            out.push(-s);
        } else {
            let last = blk[k - 1];
            out.push(-c[0] * last);
            for j in 1..k {
                out.push(blk[j - 1] - c[j] * last);
            }
        }
    }
    Ok(out)
}

/// Coefficients of `F pol(v) mod P`, for `v` of any length.
pub fn modmul_apply<M: Modulus>(f: &Poly<M>, p: &Poly<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    poly::modmul(f, p, v)
}

/// `M_{F,P}^t v` via conjugation by the symmetrizer `Y_P`.
pub fn modmul_apply_transposed<M: Modulus>(f: &Poly<M>, p: &Poly<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    poly::modmul_transposed(f, p, v)
}

/// `Y_P v` or `Y_P^{-1} v` for a single monic polynomial.
pub fn y_apply<M: Modulus>(p: &Poly<M>, v: &[Fp<M>], inverse: bool) -> Vec<Fp<M>> {
    poly::y_apply(p, v, inverse)
}

/// Block-diagonal `Y_P` (or inverse) of a family applied to a stacked vector.
pub fn y_apply_family<M: Modulus>(fam: &PolyFamily<M>, v: &[Fp<M>], inverse: bool) -> Vec<Fp<M>> {
    let ri = if inverse {
        Some(fam.rev_inverses())
    } else {
        None
    };
    let mut out = Vec::with_capacity(v.len());
    for (i, (p, blk)) in fam.polys().iter().zip(fam.split(v)).enumerate() {
        out.extend(poly::y_apply_with(p, blk, inverse, ri.map(|r| &r[i])));
    }
    out
}

/// `W_P v`: residues of `pol(v)` stacked.
pub fn w_apply<M: Modulus>(fam: &PolyFamily<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    fam.stack(&fam.red(&Poly::new(v.to_vec())))
}

/// `W_P^{-1} v`: Chinese remaindering of the blocks of `v`.
pub fn w_inv_apply<M: Modulus>(fam: &PolyFamily<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    fam.crt(&fam.unstack(v)).unwrap().to_vec(fam.total_degree())
}

/// `X_P v`: linear recombination of the blocks of `v`.
pub fn x_apply<M: Modulus>(fam: &PolyFamily<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    fam.comb(&fam.unstack(v))
        .unwrap()
        .to_vec(fam.total_degree())
}

/// Dense block companion matrix.
pub fn dense_companion<M: Modulus>(fam: &PolyFamily<M>, transposed: bool) -> DenseMatrix<M> {
    dense_of(fam.total_degree(), |v| {
        companion_apply(fam, v, transposed).unwrap()
    })
}

/// Dense `M_{F,P,l}` (columns are `F x^j mod P`, `j < l`).
pub fn dense_modmul<M: Modulus>(f: &Poly<M>, p: &Poly<M>, l: usize) -> DenseMatrix<M> {
    let m = p.len() - 1;
    let cols: Vec<Vec<Fp<M>>> = (0..l).map(|j| modmul_apply(f, p, &unit(l, j))).collect();
    DenseMatrix::from_columns(m, &cols)
}

/// Dense `Y_P`: entry `(i, j)` is `p_{i+j+1}` (0-based) with `p_m = 1`.
pub fn dense_y<M: Modulus>(p: &Poly<M>) -> DenseMatrix<M> {
    let m = p.len() - 1;
    DenseMatrix::from_fn(m, m, |i, j| p.coeff(i + j + 1))
}

/// Dense block-diagonal `Y_P` of a family.
pub fn dense_y_family<M: Modulus>(fam: &PolyFamily<M>) -> DenseMatrix<M> {
    dense_of(fam.total_degree(), |v| y_apply_family(fam, v, false))
}

/// Dense `W_P` on `F[x]_m`.
pub fn dense_w<M: Modulus>(fam: &PolyFamily<M>) -> DenseMatrix<M> {
    dense_of(fam.total_degree(), |v| w_apply(fam, v))
}

/// Densifies a linear map on `F^n` by applying it to unit vectors.
pub fn dense_of<M: Modulus>(n: usize, f: impl Fn(&[Fp<M>]) -> Vec<Fp<M>>) -> DenseMatrix<M> {
    let cols: Vec<Vec<Fp<M>>> = (0..n).map(|j| f(&unit(n, j))).collect();
    let rows = cols.first().map_or(0, |c| c.len());
    DenseMatrix::from_columns(rows, &cols)
}

pub(crate) fn unit<M: Modulus>(n: usize, j: usize) -> Vec<Fp<M>> {
    let mut v = vec![Fp::ZERO; n];
    v[j] = Fp::ONE;
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `A -> M A - A N`.
    Sylvester,
    /// `A -> A - M A N`.
    Stein,
}

/// A displacement operator `L` with `M` in `{M_P, M_P^t}` and `N` in `{M_Q, M_Q^t}`.
#[derive(Clone)]
pub struct DisplacementOperator<M: Modulus = P998> {
    pub kind: OperatorKind,
    pub p: Arc<PolyFamily<M>>,
    pub q: Arc<PolyFamily<M>>,
    pub transpose_p: bool,
    pub transpose_q: bool,
    inverses: Arc<OnceLock<Option<Vec<Poly<M>>>>>,
}

impl<M: Modulus> std::fmt::Debug for DisplacementOperator<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DisplacementOperator")
            .field("kind", &self.kind)
            .field("p", &self.p.polys())
            .field("q", &self.q.polys())
            .field("transpose_p", &self.transpose_p)
            .field("transpose_q", &self.transpose_q)
            .finish()
    }
}

impl<M: Modulus> PartialEq for DisplacementOperator<M> {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind
            && self.transpose_p == o.transpose_p
            && self.transpose_q == o.transpose_q
            && self.p == o.p
            && self.q == o.q
    }
}

impl<M: Modulus> DisplacementOperator<M> {
    pub fn new(
        kind: OperatorKind,
        p: Arc<PolyFamily<M>>,
        q: Arc<PolyFamily<M>>,
        transpose_p: bool,
        transpose_q: bool,
    ) -> Self {
        DisplacementOperator {
            kind,
            p,
            q,
            transpose_p,
            transpose_q,
            inverses: Arc::new(OnceLock::new()),
        }
    }

    /// The basic operator of the given kind for `(P, Q)`.
    pub fn basic(kind: OperatorKind, p: Arc<PolyFamily<M>>, q: Arc<PolyFamily<M>>) -> Self {
        Self::new(kind, p, q, false, true)
    }

    /// `∇_{Z_{m,φ}, Z_{n,ψ}^t}`-style operators built from single binomials.
    pub fn binomial(
        kind: OperatorKind,
        m: usize,
        phi: Fp<M>,
        n: usize,
        psi: Fp<M>,
        tp: bool,
        tq: bool,
    ) -> Self {
        Self::new(
            kind,
            Arc::new(PolyFamily::single_power(m, phi)),
            Arc::new(PolyFamily::single_power(n, psi)),
            tp,
            tq,
        )
    }

    pub fn m(&self) -> usize {
        self.p.total_degree()
    }

    pub fn n(&self) -> usize {
        self.q.total_degree()
    }

    pub fn is_basic(&self) -> bool {
        !self.transpose_p && self.transpose_q
    }

    /// Same kind and families with other transpose flags.
    pub fn with_flags(&self, transpose_p: bool, transpose_q: bool) -> Self {
        let mut op = self.clone();
        op.transpose_p = transpose_p;
        op.transpose_q = transpose_q;
        op
    }

    /// Operator satisfied by `A^t`: `M' = N^t`, `N' = M^t`.
    pub fn transposed(&self) -> Self {
        DisplacementOperator {
            kind: self.kind,
            p: self.q.clone(),
            q: self.p.clone(),
            transpose_p: !self.transpose_q,
            transpose_q: !self.transpose_p,
            inverses: Arc::new(OnceLock::new()),
        }
    }

    /// Operator satisfied by `A^{-1}`: `M' = N`, `N' = M`.
    pub fn inverse_operator(&self) -> Self {
        DisplacementOperator {
            kind: self.kind,
            p: self.q.clone(),
            q: self.p.clone(),
            transpose_p: self.transpose_q,
            transpose_q: self.transpose_p,
            inverses: Arc::new(OnceLock::new()),
        }
    }

    /// `M v`.
    pub fn apply_m(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        companion_apply(&self.p, v, self.transpose_p).unwrap()
    }

    /// `N v`.
    pub fn apply_n(&self, v: &[Fp<M>]) -> Vec<Fp<M>> {
        companion_apply(&self.q, v, self.transpose_q).unwrap()
    }

    pub fn dense_m(&self) -> DenseMatrix<M> {
        dense_companion(&self.p, self.transpose_p)
    }

    pub fn dense_n(&self) -> DenseMatrix<M> {
        dense_companion(&self.q, self.transpose_q)
    }

    /// `Q^{-1} mod P_i` (Sylvester) or `rev(Q, n)^{-1} mod P_i` (Stein), computed once.
    /// `None` when the operator is not invertible.
    pub fn q_inverses(&self) -> Option<&[Poly<M>]> {
        self.inverses
            .get_or_init(|| match self.kind {
                OperatorKind::Sylvester => inverses_mod_family(&self.p, &self.q, false),
                OperatorKind::Stein => inverses_mod_family(&self.p, &self.q, true),
            })
            .as_deref()
    }

    pub fn is_invertible(&self) -> bool {
        self.q_inverses().is_some()
    }
}

/// True iff the operator is a bijection on `F^{m x n}`.
pub fn op_invertible<M: Modulus>(op: &DisplacementOperator<M>) -> bool {
    op.is_invertible()
}

/// Inverse of `c x^r + b` modulo `x^k - phi` (with `0 < r < k`), in `O(k)`.
fn binomial_inverse<M: Modulus>(
    c: Fp<M>,
    r: usize,
    b: Fp<M>,
    k: usize,
    phi: Fp<M>,
) -> Option<Poly<M>> {
    // with y = c x^r, y^t is the scalar s = c^t phi^(r/g) where t = k/g
    let g = gcd(r, k);
    let t = k / g;
    let s = c.pow(t as u64) * phi.pow((r / g) as u64);
    let nb = -b;
    let denom = s - nb.pow(t as u64);
    let dinv = denom.inv().ok()?;
    // (y - nb) * sum_{i<t} nb^(t-1-i) y^i = y^t - nb^t
    let mut out = vec![Fp::ZERO; k];
    let nb_pows: Vec<Fp<M>> = {
        let mut v = Vec::with_capacity(t);
        let mut cur = Fp::ONE;
        for _ in 0..t {
            v.push(cur);
            cur *= nb;
        }
        v
    };
    let mut coef = Fp::ONE;
    let mut e = 0usize;
    for i in 0..t {
        out[e] += coef * nb_pows[t - 1 - i];
        coef *= c;
        e += r;
        if e >= k {
            e -= k;
            coef *= phi;
        }
    }
    Some(Poly::new(out).scale(dinv))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `T^{-1} mod P_i` where `T = Q` or `T = rev(Q, n)`.
fn inverses_mod_family<M: Modulus>(
    p: &PolyFamily<M>,
    q: &PolyFamily<M>,
    reversed: bool,
) -> Option<Vec<Poly<M>>> {
    let n = q.total_degree();
    let qprod = q.product();
    let target = if reversed {
        qprod.rev(n).unwrap()
    } else {
        qprod.clone()
    };
    if let (Flavor::SinglePower { phi }, Flavor::SinglePower { phi: psi }) =
        (p.flavor(), q.flavor())
    {
        let k = p.total_degree();
        // target = a x^e + b with e in {0, n}
        let (a, e, b) = if reversed {
            (-psi, n, Fp::ONE)
        } else {
            (Fp::ONE, n, -psi)
        };
        if a.is_zero() || e == 0 {
            return Some(vec![Poly::constant(b.inv().ok()?)]);
        }
        let c = a * phi.pow((e / k) as u64);
        let r = e % k;
        if r == 0 || c.is_zero() {
            return Some(vec![Poly::constant((c + b).inv().ok()?)]);
        }
        return binomial_inverse(c, r, b, k, phi).map(|x| vec![x]);
    }
    if let (Flavor::SinglePower { .. }, false) = (p.flavor(), reversed) {
        // S = P^{-1} mod Q by remaindering, then Q^{-1} mod P = (1 - S P) / Q
        let pp = p.product();
        let mut parts = Vec::with_capacity(q.len());
        for (j, qj) in q.polys().iter().enumerate() {
            let r = q.factor_reducer(j).reduce(pp.coeffs());
            parts.push(r.inv_mod(qj)?);
        }
        let s = q.crt(&parts).ok()?;
        let one_minus = &Poly::one() - &(&s * pp);
        let (t, rem) = one_minus.divrem(qprod).ok()?;
        debug_assert!(rem.is_zero());
        return Some(vec![t]);
    }
    let res = p.red(&target);
    res.iter()
        .zip(p.polys())
        .map(|(r, pi)| r.inv_mod(pi))
        .collect()
}
