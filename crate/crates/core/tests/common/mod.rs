//! Shared instance builders for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use structmat::generators::column_basis;
use structmat::oracle::dense_apply_operator;
use structmat::{
    DenseMatrix, DisplacementOperator, FlavorHint, Fp, Generator, OperatorKind, Poly, PolyFamily,
    P998,
};

pub type F = Fp<P998>;
pub type P = Poly<P998>;
pub type Mat = DenseMatrix<P998>;
pub type Op = DisplacementOperator<P998>;
pub type Gen = Generator<P998>;

pub const KINDS: [OperatorKind; 2] = [OperatorKind::Sylvester, OperatorKind::Stein];

pub fn elem(rng: &mut ChaCha8Rng) -> F {
    F::new(rng.gen())
}

pub fn vec_of(rng: &mut ChaCha8Rng, n: usize) -> Vec<F> {
    (0..n).map(|_| elem(rng)).collect()
}

pub fn poly_of(rng: &mut ChaCha8Rng, len: usize) -> P {
    P::new(vec_of(rng, len))
}

pub fn monic(rng: &mut ChaCha8Rng, deg: usize) -> P {
    let mut c = vec_of(rng, deg);
    c.push(F::ONE);
    P::new(c)
}

/// Random family of total degree `m` whose factors have degree at most `max_factor`.
pub fn general_family(rng: &mut ChaCha8Rng, m: usize, max_factor: usize) -> PolyFamily<P998> {
    loop {
        let mut polys = Vec::new();
        let mut left = m;
        while left > 0 {
            let d = rng.gen_range(1..=left.min(max_factor));
            polys.push(monic(rng, d));
            left -= d;
        }
        if let Ok(f) = PolyFamily::new(polys, FlavorHint::General) {
            return f;
        }
    }
}

/// Random family of one of the three flavors.
pub fn random_family(rng: &mut ChaCha8Rng, m: usize) -> Arc<PolyFamily<P998>> {
    Arc::new(match rng.gen_range(0..3) {
        0 => PolyFamily::single_power(m, F::new(rng.gen_range(0..4))),
        1 => PolyFamily::geometric(
            F::new(rng.gen_range(1..1000)),
            F::new(rng.gen_range(2..1000)),
            m,
        )
        .unwrap(),
        _ => general_family(rng, m, 4),
    })
}

pub fn random_invertible_op(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    kind: OperatorKind,
    tp: bool,
    tq: bool,
) -> Op {
    loop {
        let op =
            DisplacementOperator::new(kind, random_family(rng, m), random_family(rng, n), tp, tq);
        if op.is_invertible() {
            return op;
        }
    }
}

/// Operator variant `i mod 8`: kind, then the two transpose flags.
pub fn variant(i: usize) -> (OperatorKind, bool, bool) {
    (KINDS[i % 2], (i / 2) % 2 == 1, (i / 4) % 2 == 1)
}

pub fn random_gen(rng: &mut ChaCha8Rng, op: Op, alpha: usize) -> Gen {
    let (m, n) = (op.m(), op.n());
    Generator::new(op, Mat::random(m, alpha, rng), Mat::random(n, alpha, rng)).unwrap()
}

/// Compressed generator of a dense matrix.
pub fn generator_of(op: Op, a: &Mat) -> Gen {
    let (c, r) = column_basis(&dense_apply_operator(&op, a).unwrap());
    Generator::new(op, c, r.transpose()).unwrap()
}

/// Random `m x n` matrix of rank `r`.
pub fn low_rank(rng: &mut ChaCha8Rng, m: usize, n: usize, r: usize) -> Mat {
    Mat::random(m, r, rng).mul(&Mat::random(r, n, rng))
}

/// `m x n` Hankel matrix of a sequence obeying a random linear recurrence of order `k`;
/// its rank is `min(k, m, n)` for generic choices.
pub fn recurrent_hankel(rng: &mut ChaCha8Rng, m: usize, n: usize, k: usize) -> Mat {
    let rec = vec_of(rng, k);
    let mut s = vec_of(rng, k);
    while s.len() < m + n - 1 {
        let t = s.len();
        let next = (0..k).fold(F::ZERO, |acc, i| acc + rec[i] * s[t - k + i]);
        s.push(next);
    }
    Mat::from_fn(m, n, |i, j| s[i + j])
}

/// `sum_k U_k (V_k W_i mod Q)` by schoolbook products and long division.
pub fn naive_mulq(u: &[P], v: &[P], w: &[P], q: &P) -> Vec<P> {
    w.iter()
        .map(|wi| {
            let mut acc = P::zero();
            for (uk, vk) in u.iter().zip(v) {
                let r = (vk * wi).rem(q).unwrap();
                acc = &acc + &(uk * &r);
            }
            acc
        })
        .collect()
}
