//! Dense univariate polynomials over `Fp<M>`.
//!
//! A [`Poly`] is a trimmed coefficient vector in ascending degree; the zero
//! polynomial is the empty vector.

pub mod family;
pub mod geom;
pub mod ntt;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};

/// Divisor degree above which division switches to Newton iteration.
pub const DIV_NEWTON_THRESHOLD: usize = 32;

/// Operand length below which products use the schoolbook method.
pub const SCHOOLBOOK_THRESHOLD: usize = 32;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<M: Modulus = P998> {
    coeffs: Vec<Fp<M>>,
}

impl<M: Modulus> fmt::Debug for Poly<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

fn trim<M: Modulus>(v: &mut Vec<Fp<M>>) {
    while let Some(c) = v.last() {
        if c.is_zero() {
            v.pop();
        } else {
            break;
        }
    }
}

impl<M: Modulus> Poly<M> {
    pub fn new(mut coeffs: Vec<Fp<M>>) -> Self {
        trim(&mut coeffs);
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Fp::ONE)
    }

    pub fn constant(c: Fp<M>) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: Fp<M>, k: usize) -> Self {
        let mut v = vec![Fp::ZERO; k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(Fp::ONE, 1)
    }

    pub fn from_u64s(v: &[u64]) -> Self {
        Self::new(v.iter().map(|&c| Fp::new(c)).collect())
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&c| Fp::from_i64(c)).collect())
    }

    /// `x^k - phi`.
    pub fn binomial(k: usize, phi: Fp<M>) -> Self {
        let mut v = vec![Fp::ZERO; k + 1];
        v[0] = -phi;
        v[k] = Fp::ONE;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Fp<M>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fp<M>> {
        self.coeffs
    }

    /// Number of stored coefficients (degree + 1, or 0 for zero).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True for the zero polynomial, which stores no coefficients.
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Fp<M> {
        self.coeffs.get(i).copied().unwrap_or(Fp::ZERO)
    }

    pub fn lead(&self) -> Fp<M> {
        self.coeffs.last().copied().unwrap_or(Fp::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fp::ONE
    }

    pub fn eval(&self, x: Fp<M>) -> Fp<M> {
        self.coeffs
            .iter()
            .rev()
            .fold(Fp::ZERO, |acc, &c| acc * x + c)
    }

    /// Coefficient vector padded with zeros to length `n`.
    pub fn to_vec(&self, n: usize) -> Vec<Fp<M>> {
        assert!(
            self.len() <= n,
            "degree {} does not fit length {}",
            self.len(),
            n
        );
        let mut v = self.coeffs.clone();
        v.resize(n, Fp::ZERO);
        v
    }

    pub fn scale(&self, c: Fp<M>) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// `x^k * self`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Fp::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    /// `self mod x^k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs[..self.len().min(k)].to_vec())
    }

    /// `(self div x^lo) mod x^(hi - lo)`.
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        let hi = hi.min(self.len());
        if lo >= hi {
            return Self::zero();
        }
        Self::new(self.coeffs[lo..hi].to_vec())
    }

    pub fn make_monic(&self) -> Self {
        match self.lead().inv() {
            Ok(l) => self.scale(l),
            Err(_) => Self::zero(),
        }
    }

    pub fn mul_strict(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let n = self.len() + other.len() - 1;
        if self.len().min(other.len()) > SCHOOLBOOK_THRESHOLD && n > ntt::max_len::<M>() {
            return Err(Error::DegreeOverflow(n));
        }
        Ok(self * other)
    }

    /// `self * other mod x^n`.
    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        let a = &self.coeffs[..self.len().min(n)];
        let b = &other.coeffs[..other.len().min(n)];
        let mut v = mul_slices(a, b);
        v.truncate(n);
        Self::new(v)
    }

    pub fn divrem(&self, b: &Self) -> Result<(Self, Self)> {
        self.divrem_with_threshold(b, DIV_NEWTON_THRESHOLD)
    }

    /// Euclidean division; Newton iteration is used once `deg b` exceeds `threshold`.
    pub fn divrem_with_threshold(&self, b: &Self, threshold: usize) -> Result<(Self, Self)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lc = b.lead();
        if lc != Fp::ONE {
            let li = lc.inv()?;
            let (q, r) = self.divrem_with_threshold(&b.scale(li), threshold)?;
            return Ok((q.scale(li), r));
        }
        let k = b.len() - 1;
        if self.len() <= k {
            return Ok((Self::zero(), self.clone()));
        }
        let lq = self.len() - k;
        if k <= threshold || lq <= threshold {
            let (q, r) = divrem_schoolbook(&self.coeffs, &b.coeffs);
            return Ok((Self::new(q), Self::new(r)));
        }
        let inv = b.rev_unchecked(k).series_inv(lq)?;
        let q = newton_quotient(&self.coeffs, k, inv.coeffs());
        let r = self - &(&q * b);
        Ok((q, r))
    }

    pub fn rem(&self, b: &Self) -> Result<Self> {
        Ok(self.divrem(b)?.1)
    }

    /// `x^d * self(1/x)`.
    pub fn rev(&self, d: usize) -> Result<Self> {
        if self.len() > d + 1 {
            return Err(Error::BoundTooSmall {
                deg: self.len() - 1,
                bound: d,
            });
        }
        Ok(self.rev_unchecked(d))
    }

    fn rev_unchecked(&self, d: usize) -> Self {
        let mut v = self.to_vec(d + 1);
        v.reverse();
        Self::new(v)
    }

    /// Power series inverse modulo `x^k`.
    pub fn series_inv(&self, k: usize) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::NonUnitConstantTerm);
        }
        if k == 0 {
            return Ok(Self::zero());
        }
        let mut g = Self::constant(c0.inv()?);
        let mut prec = 1;
        while prec < k {
            prec = (2 * prec).min(k);
            // g <- g + g (1 - a g)
            let e = self.mul_trunc(&g, prec);
            let mut err = (-&e).coeffs;
            if err.is_empty() {
                err.push(Fp::ZERO);
            }
            err[0] += Fp::ONE;
            let corr = g.mul_trunc(&Self::new(err), prec);
            g = &g + &corr;
        }
        Ok(g)
    }

    /// Extended Euclid: `s*a + t*b = g` with `g` monic (or all zero if `a = b = 0`).
    pub fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lead().inv() {
            Ok(li) => (r0.scale(li), s0.scale(li), t0.scale(li)),
            Err(_) => (Self::zero(), Self::zero(), Self::zero()),
        }
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        Self::xgcd(a, b).0
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let a = self.rem(m).ok()?;
        let (g, s, _) = Self::xgcd(&a, m);
        if g == Self::one() {
            Some(s.rem(m).ok()?)
        } else {
            None
        }
    }

    /// Returns `phi` if `self = x^k - phi` with `k >= 1`.
    pub fn as_binomial(&self) -> Option<Fp<M>> {
        let k = self.len().checked_sub(1)?;
        if k == 0 || !self.is_monic() {
            return None;
        }
        if self.coeffs[1..k].iter().all(|c| c.is_zero()) {
            Some(-self.coeffs[0])
        } else {
            None
        }
    }
}

fn divrem_schoolbook<M: Modulus>(a: &[Fp<M>], b: &[Fp<M>]) -> (Vec<Fp<M>>, Vec<Fp<M>>) {
    let k = b.len() - 1;
    let mut r = a.to_vec();
    let lq = a.len() - k;
    let mut q = vec![Fp::ZERO; lq];
    for i in (0..lq).rev() {
        let c = r[i + k];
        if c.is_zero() {
            continue;
        }
        q[i] = c;
        for j in 0..k {
            r[i + j] -= c * b[j];
        }
        r[i + k] = Fp::ZERO;
    }
    r.truncate(k);
    (q, r)
}

/// Quotient of `a` by a monic degree-`k` divisor whose reversal has inverse `inv`
/// (valid to precision at least `a.len() - k`).
fn newton_quotient<M: Modulus>(a: &[Fp<M>], k: usize, inv: &[Fp<M>]) -> Poly<M> {
    let lq = a.len() - k;
    let ra: Vec<Fp<M>> = a[k..].iter().rev().copied().collect();
    let mut q = mul_slices(&ra, &inv[..inv.len().min(lq)]);
    q.resize(lq, Fp::ZERO);
    q.reverse();
    Poly::new(q)
}

/// Product of two coefficient slices (untrimmed length `a.len() + b.len() - 1`).
pub fn mul_slices<M: Modulus>(a: &[Fp<M>], b: &[Fp<M>]) -> Vec<Fp<M>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= SCHOOLBOOK_THRESHOLD || n > ntt::max_len::<M>() {
        return mul_schoolbook(a, b);
    }
    let size = n.next_power_of_two();
    let mut fa = ntt::transform(a, size);
    let fb = ntt::transform(b, size);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    ntt::inverse(&mut fa);
    fa.truncate(n);
    fa
}

pub fn mul_schoolbook<M: Modulus>(a: &[Fp<M>], b: &[Fp<M>]) -> Vec<Fp<M>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Fp::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reduction modulo a fixed monic polynomial with a cached reversed inverse.
#[derive(Clone, Debug)]
pub struct Reducer<M: Modulus = P998> {
    modulus: Poly<M>,
    binomial: Option<Fp<M>>,
    inv_rev: Vec<Fp<M>>,
}

impl<M: Modulus> Reducer<M> {
    /// Prepares reduction of inputs of length up to `max_len`.
    pub fn new(modulus: &Poly<M>, max_len: usize) -> Self {
        assert!(
            modulus.is_monic() && modulus.len() >= 2,
            "reducer needs a monic nonconstant modulus"
        );
        let k = modulus.len() - 1;
        let binomial = modulus.as_binomial();
        let inv_rev = if binomial.is_none() && k > DIV_NEWTON_THRESHOLD {
            let prec = max_len.saturating_sub(k).max(1);
            modulus
                .rev_unchecked(k)
                .series_inv(prec)
                .unwrap()
                .into_coeffs()
        } else {
            Vec::new()
        };
        Reducer {
            modulus: modulus.clone(),
            binomial,
            inv_rev,
        }
    }

    pub fn modulus(&self) -> &Poly<M> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, a: &[Fp<M>]) -> Poly<M> {
        let k = self.degree();
        if a.len() <= k {
            return Poly::new(a.to_vec());
        }
        if let Some(phi) = self.binomial {
            let mut v = a.to_vec();
            for i in (k..v.len()).rev() {
                let c = v[i];
                if !c.is_zero() {
                    v[i - k] += phi * c;
                }
            }
            v.truncate(k);
            return Poly::new(v);
        }
        let lq = a.len() - k;
        if k <= DIV_NEWTON_THRESHOLD || lq <= DIV_NEWTON_THRESHOLD {
            let (_, r) = divrem_schoolbook(a, self.modulus.coeffs());
            return Poly::new(r);
        }
        let q = if self.inv_rev.len() >= lq {
            newton_quotient(a, k, &self.inv_rev)
        } else {
            let inv = self.modulus.rev_unchecked(k).series_inv(lq).unwrap();
            newton_quotient(a, k, inv.coeffs())
        };
        let qb = mul_slices(q.coeffs(), self.modulus.coeffs());
        let mut r: Vec<Fp<M>> = a[..k].to_vec();
        for (x, y) in r.iter_mut().zip(&qb) {
            *x -= *y;
        }
        Poly::new(r)
    }
}

/// Product with the triangular Hankel symmetrizer `Y_P` of a monic `P`, or its inverse.
///
/// `J Y_P` is the lower triangular Toeplitz matrix of `rev(P)`, so both
/// directions are truncated products. `rev_inv` may carry a cached inverse of
/// `rev(P)` modulo `x^m`.
pub fn y_apply_with<M: Modulus>(
    p: &Poly<M>,
    v: &[Fp<M>],
    inverse: bool,
    rev_inv: Option<&Poly<M>>,
) -> Vec<Fp<M>> {
    let m = p.len() - 1;
    assert_eq!(v.len(), m, "vector length must equal deg P");
    if inverse {
        let jv: Vec<Fp<M>> = v.iter().rev().copied().collect();
        let owned;
        let inv = match rev_inv {
            Some(r) => r,
            None => {
                owned = p.rev_unchecked(m).series_inv(m).unwrap();
                &owned
            }
        };
        Poly::new(jv).mul_trunc(inv, m).to_vec(m)
    } else {
        let prod = p.rev_unchecked(m).mul_trunc(&Poly::new(v.to_vec()), m);
        let mut out = prod.to_vec(m);
        out.reverse();
        out
    }
}

/// `Y_P v` (or `Y_P^{-1} v`).
pub fn y_apply<M: Modulus>(p: &Poly<M>, v: &[Fp<M>], inverse: bool) -> Vec<Fp<M>> {
    y_apply_with(p, v, inverse, None)
}

/// Coefficients of `f * pol(v) mod P`, padded to `deg P`.
pub fn modmul<M: Modulus>(f: &Poly<M>, p: &Poly<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    let m = p.len() - 1;
    let prod = f * &Poly::new(v.to_vec());
    prod.rem(p).unwrap().to_vec(m)
}

/// `M_{F,P}^t v`, computed as `Y_P^{-1} M_{F,P} Y_P v`.
pub fn modmul_transposed<M: Modulus>(f: &Poly<M>, p: &Poly<M>, v: &[Fp<M>]) -> Vec<Fp<M>> {
    let yv = y_apply(p, v, false);
    let w = modmul(f, p, &yv);
    y_apply(p, &w, true)
}

impl<M: Modulus> Add for &Poly<M> {
    type Output = Poly<M>;
    fn add(self, rhs: Self) -> Poly<M> {
        let (long, short) = if self.len() >= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut v = long.coeffs.clone();
        for (x, &y) in v.iter_mut().zip(&short.coeffs) {
            *x += y;
        }
        Poly::new(v)
    }
}

impl<M: Modulus> Sub for &Poly<M> {
    type Output = Poly<M>;
    fn sub(self, rhs: Self) -> Poly<M> {
        let mut v = self.coeffs.clone();
        if v.len() < rhs.len() {
            v.resize(rhs.len(), Fp::ZERO);
        }
        for (x, &y) in v.iter_mut().zip(&rhs.coeffs) {
            *x -= y;
        }
        Poly::new(v)
    }
}

impl<M: Modulus> Neg for &Poly<M> {
    type Output = Poly<M>;
    fn neg(self) -> Poly<M> {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl<M: Modulus> Mul for &Poly<M> {
    type Output = Poly<M>;
    fn mul(self, rhs: Self) -> Poly<M> {
        Poly::new(mul_slices(&self.coeffs, &rhs.coeffs))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<M: Modulus> $tr for Poly<M> {
            type Output = Poly<M>;
            fn $f(self, rhs: Self) -> Poly<M> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
