//! Prime field arithmetic.
//!
//! Elements are stored in canonical form `0 <= v < p`. The modulus is a type
//! parameter so that the reduction constant is known at compile time; two
//! NTT-friendly primes are provided.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// A prime modulus of the form `c * 2^k + 1`.
pub trait Modulus: Copy + Clone + Default + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    const P: u64;
    /// A primitive root modulo `P`.
    const ROOT: u64;
    /// Largest `k` with `2^k | P - 1`.
    const TWO_ADICITY: u32;
    const NAME: &'static str;
}

/// p = 998244353 = 119 * 2^23 + 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct P998;

impl Modulus for P998 {
    const P: u64 = 998_244_353;
    const ROOT: u64 = 3;
    const TWO_ADICITY: u32 = 23;
    const NAME: &'static str = "998244353";
}

/// p = 4179340454199820289 = 29 * 2^57 + 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct P62;

impl Modulus for P62 {
    const P: u64 = 4_179_340_454_199_820_289;
    const ROOT: u64 = 3;
    const TWO_ADICITY: u32 = 57;
    const NAME: &'static str = "4179340454199820289";
}

/// p = 7, a tiny field for hand-checkable examples (transforms up to length 2).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct P7;

impl Modulus for P7 {
    const P: u64 = 7;
    const ROOT: u64 = 3;
    const TWO_ADICITY: u32 = 1;
    const NAME: &'static str = "7";
}

/// An element of F_p.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Fp<M: Modulus>(u64, PhantomData<M>);

/// Element of the default field.
pub type F = Fp<P998>;

impl<M: Modulus> Fp<M> {
    pub const ZERO: Self = Fp(0, PhantomData);
    pub const ONE: Self = Fp(1, PhantomData);

    /// Builds an element from an already reduced value.
    #[inline(always)]
    pub const fn from_canonical(v: u64) -> Self {
        Fp(v, PhantomData)
    }

    #[inline]
    pub fn new(v: u64) -> Self {
        Fp(v % M::P, PhantomData)
    }

    pub fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Self::new(v as u64)
        } else {
            -Self::new(v.unsigned_abs())
        }
    }

    #[inline(always)]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline(always)]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn modulus() -> u64 {
        M::P
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Self, FieldError> {
        if self.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(M::P - 2))
    }

    /// A primitive `2^k`-th root of unity, if the field has one.
    pub fn root_of_unity(k: u32) -> Option<Self> {
        if k > M::TWO_ADICITY {
            return None;
        }
        Some(Self::new(M::ROOT).pow((M::P - 1) >> k))
    }

    /// Inverts every entry of `xs` with a single field inversion.
    pub fn batch_inv(xs: &[Self]) -> Result<Vec<Self>, FieldError> {
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = Self::ONE;
        for &x in xs {
            if x.is_zero() {
                return Err(FieldError::ZeroInverse);
            }
            prefix.push(acc);
            acc *= x;
        }
        let mut inv = acc.inv()?;
        let mut out = vec![Self::ZERO; xs.len()];
        for i in (0..xs.len()).rev() {
            out[i] = prefix[i] * inv;
            inv *= xs[i];
        }
        Ok(out)
    }
}

impl<M: Modulus> fmt::Debug for Fp<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<M: Modulus> fmt::Display for Fp<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<M: Modulus> From<u64> for Fp<M> {
    fn from(v: u64) -> Self {
        Self::new(v)
    }
}

impl<M: Modulus> Add for Fp<M> {
    type Output = Self;
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= M::P { s - M::P } else { s }, PhantomData)
    }
}

impl<M: Modulus> Sub for Fp<M> {
    type Output = Self;
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        Fp(
            if self.0 >= rhs.0 {
                self.0 - rhs.0
            } else {
                self.0 + M::P - rhs.0
            },
            PhantomData,
        )
    }
}

impl<M: Modulus> Neg for Fp<M> {
    type Output = Self;
    #[inline(always)]
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { M::P - self.0 }, PhantomData)
    }
}

impl<M: Modulus> Mul for Fp<M> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        let v = if M::P < (1 << 32) {
            (self.0 * rhs.0) % M::P
        } else {
            ((self.0 as u128 * rhs.0 as u128) % M::P as u128) as u64
        };
        Fp(v, PhantomData)
    }
}

impl<M: Modulus> AddAssign for Fp<M> {
    #[inline(always)]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<M: Modulus> SubAssign for Fp<M> {
    #[inline(always)]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<M: Modulus> MulAssign for Fp<M> {
    #[inline(always)]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<M: Modulus> std::iter::Sum for Fp<M> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}
