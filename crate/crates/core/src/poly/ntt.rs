//! Number theoretic transform over `Fp<M>`.
//!
//! The forward transform is decimation in frequency and leaves its output in
//! bit-reversed order; the inverse transform expects that order. Pointwise
//! products do not care about the order, so the permutation is skipped.

use crate::field::{Fp, Modulus};

/// Largest supported transform length for the modulus.
pub fn max_len<M: Modulus>() -> usize {
    let k = M::TWO_ADICITY.min(usize::BITS - 2);
    1usize << k
}

fn twiddles<M: Modulus>(n: usize, inverse: bool) -> Vec<Fp<M>> {
    let k = n.trailing_zeros();
    let mut w = Fp::<M>::root_of_unity(k).expect("transform length exceeds capacity");
    if inverse {
        w = w.inv().unwrap();
    }
    let half = n / 2;
    let mut t = Vec::with_capacity(half);
    let mut cur = Fp::ONE;
    for _ in 0..half {
        t.push(cur);
        cur *= w;
    }
    t
}

/// In-place forward transform; output in bit-reversed order.
pub fn forward<M: Modulus>(a: &mut [Fp<M>]) {
    let n = a.len();
    assert!(n.is_power_of_two());
    if n == 1 {
        return;
    }
    let tw = twiddles::<M>(n, false);
    let mut len = n;
    while len >= 2 {
        let half = len / 2;
        let stride = n / len;
        for block in a.chunks_exact_mut(len) {
            let (lo, hi) = block.split_at_mut(half);
            for j in 0..half {
                let u = lo[j];
                let v = hi[j];
                lo[j] = u + v;
                hi[j] = (u - v) * tw[j * stride];
            }
        }
        len = half;
    }
}

/// In-place inverse transform of a bit-reversed input, including the 1/n scaling.
pub fn inverse<M: Modulus>(a: &mut [Fp<M>]) {
    let n = a.len();
    assert!(n.is_power_of_two());
    if n == 1 {
        return;
    }
    let tw = twiddles::<M>(n, true);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for block in a.chunks_exact_mut(len) {
            let (lo, hi) = block.split_at_mut(half);
            for j in 0..half {
                let u = lo[j];
                let v = hi[j] * tw[j * stride];
                lo[j] = u + v;
                hi[j] = u - v;
            }
        }
        len *= 2;
    }
    let ninv = Fp::<M>::new(n as u64).inv().unwrap();
    for x in a.iter_mut() {
        *x *= ninv;
    }
}

/// Index map from bit-reversed transform slots to natural order.
pub fn bit_reverse_permute<T: Copy>(a: &mut [T]) {
    let n = a.len();
    let bits = n.trailing_zeros();
    if n <= 2 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            a.swap(i, j);
        }
    }
}

/// Zero-pads `a` to length `n` and transforms it.
pub fn transform<M: Modulus>(a: &[Fp<M>], n: usize) -> Vec<Fp<M>> {
    let mut v = Vec::with_capacity(n);
    v.extend_from_slice(&a[..a.len().min(n)]);
    v.resize(n, Fp::ZERO);
    forward(&mut v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F, P62};

    #[test]
    fn forward_is_evaluation_at_powers_of_root() {
        let n = 8;
        let a: Vec<F> = (1..=5).map(F::new).collect();
        let mut t = transform(&a, n);
        bit_reverse_permute(&mut t);
        let w = F::root_of_unity(3).unwrap();
        for (i, ti) in t.iter().enumerate() {
            let x = w.pow(i as u64);
            let mut acc = F::ZERO;
            for c in a.iter().rev() {
                acc = acc * x + *c;
            }
            assert_eq!(*ti, acc);
        }
    }

    #[test]
    fn roundtrip_both_primes() {
        let a: Vec<F> = (0..64).map(|i| F::new(i * i + 3)).collect();
        let mut t = a.clone();
        forward(&mut t);
        inverse(&mut t);
        assert_eq!(t, a);
        let b: Vec<Fp<P62>> = (0..32).map(|i| Fp::new(i * 1_000_000_007)).collect();
        let mut t = b.clone();
        forward(&mut t);
        inverse(&mut t);
        assert_eq!(t, b);
    }
}
