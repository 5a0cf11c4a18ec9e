//! Structured times dense products `A B` for a generator of `A`, through the
//! polynomial problem `R_i = sum_k U_k (V_k W_i mod Q)` and its
//! divide-and-conquer solution when `Q = x^n`.

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus};
use crate::generators::{gen_compress, map_columns, to_basic, Generator, MatvecPlan};
use crate::matrix::DenseMatrix;
use crate::operators::{y_apply_family, OperatorKind};
use crate::poly::{mul_slices, ntt, Poly};
use crate::polymat::Evaluated;

/// Degree bound at or below which [`mul_rec`] stops recursing and expands directly.
pub const MUL_REC_CUTOFF: usize = 16;

/// Splits each `U_k` into `g` chunks of length `c`: entry `(j, k)` is
/// `(U_k div x^{jc}) mod x^c`.
fn chunk_matrix<M: Modulus>(u: &[Poly<M>], g: usize, c: usize) -> Vec<Vec<Fp<M>>> {
    let mut out = Vec::with_capacity(g * u.len());
    for j in 0..g {
        for uk in u {
            out.push(uk.slice(j * c, (j + 1) * c).into_coeffs());
        }
    }
    out
}

/// `sum_j x^{jc} E_{j,i}` for a `g x a` matrix of coefficient vectors.
fn assemble<M: Modulus>(
    e: &[Vec<Fp<M>>],
    g: usize,
    a: usize,
    c: usize,
    len: usize,
) -> Vec<Vec<Fp<M>>> {
    let mut out = vec![vec![Fp::ZERO; len]; a];
    for j in 0..g {
        for (i, o) in out.iter_mut().enumerate() {
            for (t, &v) in e[j * a + i].iter().enumerate() {
                if !v.is_zero() {
                    o[j * c + t] += v;
                }
            }
        }
    }
    out
}

/// `U^t (V W^t mod x^nu)` for `abar x gamma` matrices `V`, `W` over `F[x]_nu`
/// (row-major coefficient vectors) and `U` in `F[x]_m^{abar}`.
/// Returns `abar` polynomials of length `m + nu - 1`.
pub fn mul_rec<M: Modulus>(
    u: &[Poly<M>],
    v: &[Vec<Fp<M>>],
    w: &[Vec<Fp<M>>],
    m: usize,
    nu: usize,
    abar: usize,
    gamma: usize,
) -> Vec<Vec<Fp<M>>> {
    assert!(abar.is_power_of_two() && gamma.is_power_of_two() && nu.is_power_of_two());
    assert!(gamma <= abar && u.len() == abar && v.len() == abar * gamma && w.len() == abar * gamma);
    let len = m + nu - 1;
    if gamma == abar || nu <= MUL_REC_CUTOFF {
        let r1 = vw_mod(v, w, abar, gamma, nu);
        return u_times(u, &r1, abar, m, nu, len);
    }
    let h = nu / 2;
    let mut v1 = Vec::with_capacity(2 * abar * gamma);
    let mut w1 = Vec::with_capacity(2 * abar * gamma);
    let mut v0 = Vec::with_capacity(abar * gamma);
    let mut w0 = Vec::with_capacity(abar * gamma);
    for k in 0..abar {
        let (vr, wr) = (
            &v[k * gamma..(k + 1) * gamma],
            &w[k * gamma..(k + 1) * gamma],
        );
        let lo = |x: &Vec<Fp<M>>| x[..x.len().min(h)].to_vec();
        let hi = |x: &Vec<Fp<M>>| {
            if x.len() > h {
                x[h..].to_vec()
            } else {
                Vec::new()
            }
        };
        v1.extend(vr.iter().map(lo));
        v1.extend(vr.iter().map(hi));
        w1.extend(wr.iter().map(hi));
        w1.extend(wr.iter().map(lo));
        v0.extend(vr.iter().map(lo));
        w0.extend(wr.iter().map(lo));
    }
    let r1 = mul_rec(u, &v1, &w1, m, h, abar, 2 * gamma);
    // Q = U^t V0 W0^t evaluated as [1, x^c, ...] (U' V0) W0^t
    let c = m.div_ceil(gamma);
    let qlen = c + 2 * h - 2;
    let mut out = vec![vec![Fp::ZERO; len]; abar];
    if qlen > 0 && fits::<M>(qlen) {
        let size = qlen.next_power_of_two();
        let uc = chunk_matrix(u, gamma, c);
        let eu = Evaluated::new(gamma, abar, size, uc.iter().map(|x| x.as_slice()));
        let ev = Evaluated::new(abar, gamma, size, v0.iter().map(|x| x.as_slice()));
        let ew = Evaluated::new(abar, gamma, size, w0.iter().map(|x| x.as_slice()));
        let e = eu.mul(&ev).mul_transposed(&ew).interpolate(qlen);
        out = assemble(&e, gamma, abar, c, len);
    } else {
        let r0 = vw_mod(&v0, &w0, abar, gamma, 2 * h);
        out = u_times_naive(u, &r0, abar, len, out);
    }
    for (o, r) in out.iter_mut().zip(&r1) {
        for (t, &x) in r.iter().enumerate() {
            if h + t < len {
                o[h + t] += x;
            } else {
                debug_assert!(x.is_zero());
            }
        }
    }
    out
}

fn fits<M: Modulus>(len: usize) -> bool {
    len.next_power_of_two() <= ntt::max_len::<M>()
}

/// `V W^t mod x^nu` as an `abar x abar` matrix of coefficient vectors.
fn vw_mod<M: Modulus>(
    v: &[Vec<Fp<M>>],
    w: &[Vec<Fp<M>>],
    abar: usize,
    gamma: usize,
    nu: usize,
) -> Vec<Vec<Fp<M>>> {
    let plen = 2 * nu - 1;
    if nu > MUL_REC_CUTOFF && fits::<M>(plen) {
        let size = plen.next_power_of_two();
        let ev = Evaluated::new(abar, gamma, size, v.iter().map(|x| x.as_slice()));
        let ew = Evaluated::new(abar, gamma, size, w.iter().map(|x| x.as_slice()));
        return ev.mul_transposed(&ew).interpolate(nu);
    }
    let mut out = Vec::with_capacity(abar * abar);
    for k in 0..abar {
        for i in 0..abar {
            let mut acc = vec![Fp::ZERO; nu];
            for j in 0..gamma {
                let (a, b) = (&v[k * gamma + j], &w[i * gamma + j]);
                for (s, &x) in a.iter().enumerate().take(nu) {
                    if x.is_zero() {
                        continue;
                    }
                    for (t, &y) in b.iter().enumerate().take(nu - s) {
                        acc[s + t] += x * y;
                    }
                }
            }
            out.push(acc);
        }
    }
    out
}

/// `U^t R'` for `R'` an `abar x abar` matrix over `F[x]_nu`, through the
/// chunked rewrite `U^t = [1, x^c, ...] U'`.
fn u_times<M: Modulus>(
    u: &[Poly<M>],
    r1: &[Vec<Fp<M>>],
    abar: usize,
    m: usize,
    nu: usize,
    len: usize,
) -> Vec<Vec<Fp<M>>> {
    let c = m.div_ceil(abar).max(1);
    let qlen = c + nu - 1;
    if !fits::<M>(qlen) || qlen <= 8 {
        return u_times_naive(u, r1, abar, len, vec![vec![Fp::ZERO; len]; abar]);
    }
    let size = qlen.next_power_of_two();
    let uc = chunk_matrix(u, abar, c);
    let eu = Evaluated::new(abar, abar, size, uc.iter().map(|x| x.as_slice()));
    let er = Evaluated::new(abar, abar, size, r1.iter().map(|x| x.as_slice()));
    let e = eu.mul(&er).interpolate(qlen);
    let mut out = assemble(&e, abar, abar, c, len.max(abar * c + nu));
    for o in &mut out {
        debug_assert!(o[len..].iter().all(|x| x.is_zero()));
        o.truncate(len);
    }
    out
}

fn u_times_naive<M: Modulus>(
    u: &[Poly<M>],
    r1: &[Vec<Fp<M>>],
    abar: usize,
    len: usize,
    mut out: Vec<Vec<Fp<M>>>,
) -> Vec<Vec<Fp<M>>> {
    for (k, uk) in u.iter().enumerate() {
        for (i, o) in out.iter_mut().enumerate() {
            for (t, x) in mul_slices(uk.coeffs(), &r1[k * abar + i])
                .into_iter()
                .enumerate()
            {
                if t < len {
                    o[t] += x;
                }
            }
        }
    }
    out
}

/// `R = U^t (V W^t mod x^n)` for `alpha = |U| = |V| = |W| <= n`.
pub fn mul<M: Modulus>(
    u: &[Poly<M>],
    v: &[Poly<M>],
    w: &[Poly<M>],
    m: usize,
    n: usize,
) -> Result<Vec<Poly<M>>> {
    let alpha = u.len();
    if v.len() != alpha || w.len() != alpha {
        return Err(Error::DimensionMismatch(
            "U, V and W must have the same length".into(),
        ));
    }
    if alpha > n {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds n = {n}"
        )));
    }
    check_bounds(u, m)?;
    check_bounds(v, n)?;
    check_bounds(w, n)?;
    if alpha == 0 {
        return Ok(Vec::new());
    }
    let nbar = n.next_power_of_two();
    let delta = nbar - n;
    let abar = alpha.next_power_of_two();
    let mut ub = u.to_vec();
    ub.resize(abar, Poly::zero());
    let mut vb: Vec<Vec<Fp<M>>> = v.iter().map(|p| p.coeffs().to_vec()).collect();
    vb.resize(abar, Vec::new());
    let mut wb: Vec<Vec<Fp<M>>> = w.iter().map(|p| p.shift(delta).into_coeffs()).collect();
    wb.resize(abar, Vec::new());
    let r = mul_rec(&ub, &vb, &wb, m.max(1), nbar, abar, 1);
    Ok(r.into_iter()
        .take(alpha)
        .map(|x| {
            debug_assert!(x[..delta.min(x.len())].iter().all(|c| c.is_zero()));
            Poly::new(x[delta.min(x.len())..].to_vec())
        })
        .collect())
}

fn check_bounds<M: Modulus>(ps: &[Poly<M>], bound: usize) -> Result<()> {
    match ps.iter().find(|p| p.len() > bound) {
        Some(p) => Err(Error::BoundTooSmall {
            deg: p.len() - 1,
            bound,
        }),
        None => Ok(()),
    }
}

/// `R_i = sum_k U_k (V_k W_i mod x^n)` for `i < beta`, any `beta`, `alpha <= n`.
pub fn mul_unbalanced<M: Modulus>(
    u: &[Poly<M>],
    v: &[Poly<M>],
    w: &[Poly<M>],
    m: usize,
    n: usize,
) -> Result<Vec<Poly<M>>> {
    let (alpha, beta) = (u.len(), w.len());
    if v.len() != alpha {
        return Err(Error::DimensionMismatch(
            "U and V must have the same length".into(),
        ));
    }
    if alpha > n {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds n = {n}"
        )));
    }
    if alpha == 0 || beta == 0 {
        return Ok(vec![Poly::zero(); beta]);
    }
    if alpha <= beta {
        let mut out = Vec::with_capacity(beta);
        for chunk in w.chunks(alpha) {
            let mut wc = chunk.to_vec();
            wc.resize(alpha, Poly::zero());
            out.extend(mul(u, v, &wc, m, n)?.into_iter().take(chunk.len()));
        }
        Ok(out)
    } else {
        let mut out = vec![Poly::zero(); beta];
        for (uc, vc) in u.chunks(beta).zip(v.chunks(beta)) {
            let mut uc = uc.to_vec();
            let mut vc = vc.to_vec();
            uc.resize(beta, Poly::zero());
            vc.resize(beta, Poly::zero());
            for (o, r) in out.iter_mut().zip(mul(&uc, &vc, w, m, n)?) {
                *o = &*o + &r;
            }
        }
        Ok(out)
    }
}

/// `R_i = sum_k U_k (V_k W_i mod Q)` for a monic `Q` of degree `n` and `alpha <= n`.
/// The `R_i` are not reduced further and have degree below `m + n - 1`.
pub fn mulq<M: Modulus>(
    u: &[Poly<M>],
    v: &[Poly<M>],
    w: &[Poly<M>],
    m: usize,
    q: &Poly<M>,
) -> Result<Vec<Poly<M>>> {
    if !q.is_monic() || q.len() < 2 {
        return Err(Error::NotMonic(0));
    }
    let n = q.len() - 1;
    let (alpha, beta) = (u.len(), w.len());
    if v.len() != alpha {
        return Err(Error::DimensionMismatch(
            "U and V must have the same length".into(),
        ));
    }
    if alpha > n {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds n = {n}"
        )));
    }
    check_bounds(u, m)?;
    check_bounds(v, n)?;
    check_bounds(w, n)?;
    if alpha == 0 || beta == 0 {
        return Ok(vec![Poly::zero(); beta]);
    }
    if q.coeffs()[..n].iter().all(|c| c.is_zero()) {
        return mul_unbalanced(u, v, w, m, n);
    }
    let sum_uv = || {
        u.iter()
            .zip(v)
            .fold(Poly::zero(), |acc, (uk, vk)| &acc + &(uk * vk))
    };
    if n == 1 {
        let t = sum_uv();
        return Ok(w.iter().map(|wi| t.scale(wi.coeff(0))).collect());
    }
    // rev(S_i, m+n-3) = sum_k rev(U_k, m-1) (rev(V_k, n-1) / rev(Q, n) mod x^{n-1}) rev(W_i, n-1)
    let n1 = n - 1;
    let rq_inv = q.rev(n)?.series_inv(n1)?;
    let ut: Vec<Poly<M>> = u.iter().map(|x| x.rev(m - 1)).collect::<Result<_>>()?;
    let vt: Vec<Poly<M>> = v
        .iter()
        .map(|x| Ok(x.rev(n1)?.mul_trunc(&rq_inv, n1)))
        .collect::<Result<_>>()?;
    let wt: Vec<Poly<M>> = w
        .iter()
        .map(|x| Ok(x.rev(n1)?.truncate(n1)))
        .collect::<Result<_>>()?;
    let mut st = vec![Poly::zero(); beta];
    for (uc, vc) in ut.chunks(n1).zip(vt.chunks(n1)) {
        for (s, r) in st.iter_mut().zip(mul_unbalanced(uc, vc, &wt, m, n1)?) {
            *s = &*s + &r;
        }
    }
    let slen = m + n - 2;
    let s: Vec<Poly<M>> = st.iter().map(|x| x.rev(slen - 1)).collect::<Result<_>>()?;
    // R_i = T W_i - Q S_i, computed modulo x^N - 1 with N >= m + n - 1
    let rlen = m + n - 1;
    let size = rlen.max(n + 1).next_power_of_two();
    let sparse_q = q.coeffs().iter().filter(|c| !c.is_zero()).count() <= 4;
    if !fits::<M>(size) {
        let t = sum_uv();
        return Ok(w
            .iter()
            .zip(&s)
            .map(|(wi, si)| &(&t * wi) - &(q * si))
            .collect());
    }
    let mut tf = vec![Fp::ZERO; size];
    for (uk, vk) in u.iter().zip(v) {
        let (a, b) = (
            ntt::transform(uk.coeffs(), size),
            ntt::transform(vk.coeffs(), size),
        );
        for ((t, x), y) in tf.iter_mut().zip(a).zip(b) {
            *t += x * y;
        }
    }
    let qf = if sparse_q {
        Vec::new()
    } else {
        ntt::transform(q.coeffs(), size)
    };
    let mut out = Vec::with_capacity(beta);
    for (wi, si) in w.iter().zip(&s) {
        let mut acc = ntt::transform(wi.coeffs(), size);
        for (a, &b) in acc.iter_mut().zip(&tf) {
            *a *= b;
        }
        if !sparse_q {
            let sf = ntt::transform(si.coeffs(), size);
            for ((a, &b), &c) in acc.iter_mut().zip(&qf).zip(&sf) {
                *a -= b * c;
            }
        }
        ntt::inverse(&mut acc);
        if sparse_q {
            for (e, &qc) in q.coeffs().iter().enumerate() {
                if qc.is_zero() {
                    continue;
                }
                for (t, &sc) in si.coeffs().iter().enumerate() {
                    acc[(e + t) % size] -= qc * sc;
                }
            }
        }
        acc.truncate(rlen);
        out.push(Poly::new(acc));
    }
    Ok(out)
}

/// `A B` for a generator of `A` under an invertible operator, with `alpha <= n`.
pub fn struct_mul<M: Modulus>(gen: &Generator<M>, b: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
    let op = &gen.op;
    let (m, n) = (op.m(), op.n());
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "B has {} rows, A has {} columns",
            b.rows(),
            n
        )));
    }
    let qinv = op.q_inverses().ok_or(Error::SingularOperator)?;
    let alpha = gen.len();
    if alpha > n {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds n = {n}"
        )));
    }
    let beta = b.cols();
    if alpha == 0 || beta == 0 {
        return Ok(DenseMatrix::zeros(m, beta));
    }
    let (basic, tf) = to_basic(gen);
    let (p, q) = (&op.p, &op.q);
    let bb = if tf.e2 {
        map_columns(b, |c| y_apply_family(q, c, true))
    } else {
        b.clone()
    };
    let gammas: Vec<Poly<M>> = basic
        .g
        .columns()
        .iter()
        .map(|c| p.crt(&p.unstack(c)))
        .collect::<Result<_>>()?;
    let etas: Vec<Poly<M>> = basic
        .h
        .columns()
        .iter()
        .map(|c| q.crt(&q.unstack(c)))
        .collect::<Result<_>>()?;
    let ws: Vec<Poly<M>> = bb
        .columns()
        .iter()
        .map(|c| q.comb(&q.unstack(&y_apply_family(q, c, false))))
        .collect::<Result<_>>()?;
    let rs = match op.kind {
        OperatorKind::Sylvester => mulq(&gammas, &etas, &ws, m, q.product())?,
        OperatorKind::Stein => {
            let ut: Vec<Poly<M>> = gammas.iter().map(|x| x.rev(m - 1)).collect::<Result<_>>()?;
            mulq(&ut, &etas, &ws, m, q.product())?
                .into_iter()
                .map(|r| r.rev(m + n - 2))
                .collect::<Result<_>>()?
        }
    };
    let cols: Vec<Vec<Fp<M>>> = rs
        .iter()
        .map(|r| {
            let res = p.red(r);
            let mut c = Vec::with_capacity(m);
            for (i, x) in res.iter().enumerate() {
                c.extend(p.mulmod_factor(i, x, &qinv[i]).to_vec(p.degree(i)));
            }
            if tf.e1 {
                y_apply_family(p, &c, true)
            } else {
                c
            }
        })
        .collect();
    Ok(DenseMatrix::from_columns(m, &cols))
}

/// `A B` for any length: compresses when `alpha > n` and falls back to
/// column-wise products if the compressed length still exceeds `n`.
pub fn apply_matrix<M: Modulus>(gen: &Generator<M>, b: &DenseMatrix<M>) -> Result<DenseMatrix<M>> {
    if gen.len() <= gen.n() {
        return struct_mul(gen, b);
    }
    let c = gen_compress(gen);
    if c.len() <= c.n() {
        return struct_mul(&c, b);
    }
    MatvecPlan::new(&c)?.apply_matrix(b)
}
