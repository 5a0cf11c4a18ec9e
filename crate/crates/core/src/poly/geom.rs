//! Evaluation and interpolation at geometric progressions `u * q^i`.

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus};

use super::{mul_slices, ntt, Poly};

/// `q^(k(k-1)/2)` for `k < n`.
fn chirp<M: Modulus>(q: Fp<M>, n: usize) -> Vec<Fp<M>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = Fp::ONE;
    let mut step = Fp::ONE;
    for _ in 0..n {
        out.push(cur);
        cur *= step;
        step *= q;
    }
    out
}

fn is_full_root_of_unity<M: Modulus>(q: Fp<M>, n: usize) -> bool {
    n.is_power_of_two()
        && n >= 2
        && (n.trailing_zeros()) <= M::TWO_ADICITY
        && Fp::<M>::root_of_unity(n.trailing_zeros()) == Some(q)
}

/// Values `a(u q^i)` for `i < n`.
pub fn geom_eval<M: Modulus>(u: Fp<M>, q: Fp<M>, a: &Poly<M>, n: usize) -> Result<Vec<Fp<M>>> {
    if q.is_zero() {
        return Err(Error::DegeneratePoints);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.is_zero() {
        return Ok(vec![Fp::ZERO; n]);
    }
    // scale by u^j, then evaluate at powers of q
    let mut b: Vec<Fp<M>> = Vec::with_capacity(a.len());
    let mut up = Fp::ONE;
    for &c in a.coeffs() {
        b.push(c * up);
        up *= u;
    }
    if is_full_root_of_unity(q, n) {
        let mut folded = vec![Fp::ZERO; n];
        for (j, c) in b.into_iter().enumerate() {
            folded[j % n] += c;
        }
        ntt::forward(&mut folded);
        ntt::bit_reverse_permute(&mut folded);
        return Ok(folded);
    }
    let l = b.len();
    let c = chirp(q, l + n - 1);
    let ci = chirp(q.inv()?, l.max(n));
    let rb: Vec<Fp<M>> = (0..l).rev().map(|j| b[j] * ci[j]).collect();
    let prod = mul_slices(&rb, &c);
    Ok((0..n).map(|i| prod[l - 1 + i] * ci[i]).collect())
}

/// Checks that `u q^i`, `i < n`, are pairwise distinct.
pub fn check_distinct<M: Modulus>(u: Fp<M>, q: Fp<M>, n: usize) -> Result<()> {
    if n <= 1 {
        return Ok(());
    }
    if u.is_zero() || q.is_zero() {
        return Err(Error::DegeneratePoints);
    }
    let mut qi = q;
    for _ in 1..n {
        if qi == Fp::ONE {
            return Err(Error::DegeneratePoints);
        }
        qi *= q;
    }
    Ok(())
}

/// `prod_{i<n} (x - u q^i)` by a balanced product tree.
pub fn geom_product<M: Modulus>(u: Fp<M>, q: Fp<M>, n: usize) -> Poly<M> {
    let mut level: Vec<Poly<M>> = Vec::with_capacity(n);
    let mut pt = u;
    for _ in 0..n {
        level.push(Poly::new(vec![-pt, Fp::ONE]));
        pt *= q;
    }
    product_tree_root(level)
}

pub(crate) fn product_tree_root<M: Modulus>(mut level: Vec<Poly<M>>) -> Poly<M> {
    if level.is_empty() {
        return Poly::one();
    }
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(&a * &b),
                None => next.push(a),
            }
        }
        level = next;
    }
    level.pop().unwrap()
}

/// The unique polynomial of degree `< n` taking `values[i]` at `u q^i`.
pub fn geom_interp<M: Modulus>(u: Fp<M>, q: Fp<M>, values: &[Fp<M>]) -> Result<Poly<M>> {
    let n = values.len();
    check_distinct(u, q, n)?;
    let p = geom_product(u, q, n);
    geom_interp_with_product(u, q, values, &p)
}

/// Interpolation with a precomputed `P = prod (x - u q^i)`.
pub(crate) fn geom_interp_with_product<M: Modulus>(
    u: Fp<M>,
    q: Fp<M>,
    values: &[Fp<M>],
    p: &Poly<M>,
) -> Result<Poly<M>> {
    let n = values.len();
    if n == 0 {
        return Ok(Poly::zero());
    }
    if n == 1 {
        return Ok(Poly::constant(values[0]));
    }
    // P'(u q^i) = u^(n-1) q^(C(i,2) + i(n-1-i)) (-1)^(n-1-i) pi_i pi_(n-1-i),
    // with pi_k = prod_{t=1..k} (q^t - 1).
    let mut pi = Vec::with_capacity(n);
    pi.push(Fp::ONE);
    let mut qt = q;
    for _ in 1..n {
        let last = *pi.last().unwrap();
        pi.push(last * (qt - Fp::ONE));
        qt *= q;
    }
    let ch = chirp(q, n);
    let un1 = u.pow((n - 1) as u64);
    let mut deriv = Vec::with_capacity(n);
    for i in 0..n {
        let e = (i * (n - 1 - i)) as u64;
        let mut d = un1 * ch[i] * q.pow(e) * pi[i] * pi[n - 1 - i];
        if (n - 1 - i) % 2 == 1 {
            d = -d;
        }
        deriv.push(d);
    }
    let dinv = Fp::batch_inv(&deriv).map_err(|_| Error::DegeneratePoints)?;
    let w: Vec<Fp<M>> = values.iter().zip(&dinv).map(|(&y, &d)| y * d).collect();
    // s_k = sum_i w_i (u q^i)^k = u^k W(q^k)
    let s_raw = geom_eval(Fp::ONE, q, &Poly::new(w), n)?;
    let mut s = Vec::with_capacity(n);
    let mut uk = Fp::ONE;
    for v in s_raw {
        s.push(v * uk);
        uk *= u;
    }
    let revp = p.rev(n)?;
    let revn = revp.mul_trunc(&Poly::new(s), n);
    revn.rev(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F;
    use rand::{Rng, SeedableRng};

    #[test]
    fn small_examples() {
        let v = geom_eval(F::ONE, F::new(2), &Poly::x(), 3).unwrap();
        assert_eq!(v, vec![F::new(1), F::new(2), F::new(4)]);
        let c = Poly::constant(F::new(9));
        assert_eq!(
            geom_eval(F::new(3), F::new(5), &c, 3).unwrap(),
            vec![F::new(9); 3]
        );
    }

    #[test]
    fn eval_matches_horner_and_interp_inverts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 5, 16, 33, 70] {
            let a = Poly::new((0..n).map(|_| F::new(rng.gen())).collect());
            let (u, q) = (
                F::new(rng.gen_range(1..1000)),
                F::new(rng.gen_range(2..1000)),
            );
            let vals = geom_eval(u, q, &a, n).unwrap();
            for (i, v) in vals.iter().enumerate() {
                assert_eq!(*v, a.eval(u * q.pow(i as u64)));
            }
            assert_eq!(geom_interp(u, q, &vals).unwrap(), a);
        }
    }

    #[test]
    fn root_of_unity_fast_path() {
        let w = F::root_of_unity(4).unwrap();
        let a = Poly::new((0..40).map(F::new).collect());
        let vals = geom_eval(F::ONE, w, &a, 16).unwrap();
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(*v, a.eval(w.pow(i as u64)));
        }
    }

    #[test]
    fn degenerate_points() {
        assert_eq!(
            geom_interp(F::ONE, F::ONE, &[F::ONE, F::ONE]),
            Err(Error::DegeneratePoints)
        );
        assert_eq!(
            geom_interp(F::ZERO, F::new(2), &[F::ONE, F::ONE]),
            Err(Error::DegeneratePoints)
        );
        let w = F::root_of_unity(2).unwrap();
        assert!(geom_interp(F::ONE, w, &[F::ONE; 5]).is_err());
    }
}
