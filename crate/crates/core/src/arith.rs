//! Exact arithmetic kernels.
//!
//! Three scalar domains are used throughout the crate:
//!
//! * [`Rational`] — arbitrary-precision rationals, the ground truth for every
//!   certification decision;
//! * [`GfElem`] over a [`GfPrime`] — prime fields with a 31-bit modulus, the
//!   randomized fast path for rank computations (a modular rank can only
//!   under-estimate the rational one, so a modular rank that meets an a-priori
//!   cap is already exact);
//! * `Complex64` — floating point, confined to the numeric extraction of
//!   witness points and never consulted for a certification verdict.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// Arbitrary-precision rational scalar. Always reduced, denominator positive.
pub type Rational = BigRational;

/// Arbitrary-precision integer.
pub type Integer = BigInt;

/// Complex double, used only by the `extract` module.
pub type Complex64 = num_complex::Complex<f64>;

/// Errors raised by scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not an odd prime above 2^30")]
    BadModulus(u64),
}

/// Convenience constructors for rationals.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact rational inverse; zero input is an error, never a panic.
pub fn rat_inverse(a: &Rational) -> Result<Rational, ArithError> {
    if a.is_zero() {
        Err(ArithError::DivisionByZero)
    } else {
        Ok(a.recip())
    }
}

/// Decimal-digit height of a rational (max of numerator/denominator digits),
/// used to steer multimodular reconstruction.
pub fn rat_height_digits(a: &Rational) -> usize {
    let n = a.numer().abs().to_string().len();
    let d = a.denom().to_string().len();
    n.max(d)
}

/// Lossy conversion to f64, with a fallback through a quotient of scaled
/// integers when the parts individually overflow.
pub fn rat_to_f64(a: &Rational) -> f64 {
    a.to_f64().unwrap_or_else(|| {
        let bits_n = a.numer().bits() as i64;
        let bits_d = a.denom().bits() as i64;
        let shift = (bits_n.max(bits_d) - 500).max(0) as u64;
        let n = a.numer() >> shift;
        let d = a.denom() >> shift;
        match (n.to_f64(), d.to_f64()) {
            (Some(nf), Some(df)) if df != 0.0 => nf / df,
            _ => f64::NAN,
        }
    })
}

// ---------------------------------------------------------------------------
// Prime fields
// ---------------------------------------------------------------------------

/// The fixed default certification prime (2^31 - 1, a Mersenne prime).
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// A prime modulus with a precomputed Barrett constant.
///
/// Residues live in `[0, p)` with `p < 2^31`, so a product of two residues
/// fits in a `u64` and one Barrett step reduces it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GfPrime {
    p: u64,
    // floor(2^64 / p)
    barrett: u64,
}

impl GfPrime {
    /// Build a prime field; the modulus must be an odd prime in (2^30, 2^31].
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p <= (1 << 30) || p > (1 << 31) || !is_prime_u64(p) {
            return Err(ArithError::BadModulus(p));
        }
        // floor(2^64 / p); for odd p this equals (2^64 - 1) / p.
        Ok(Self {
            p,
            barrett: u64::MAX / p,
        })
    }

    /// The default certification field.
    pub fn default_field() -> Self {
        Self::new(DEFAULT_PRIME).expect("default prime is valid")
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduce a u64 < 2^63 into [0, p).
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        // q under-estimates x / p by at most 1 for x < 2^63.
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    /// Fused `acc + a*b` reduction; `acc, a, b` are reduced residues.
    #[inline(always)]
    pub fn mul_add(&self, acc: u64, a: u64, b: u64) -> u64 {
        self.reduce(acc + a * b)
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; zero is an error.
    pub fn inv(&self, a: u64) -> Result<u64, ArithError> {
        if a == 0 {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, ArithError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Image of a signed machine integer.
    pub fn from_i64(&self, x: i64) -> u64 {
        let m = x.rem_euclid(self.p as i64);
        m as u64
    }

    /// Image of a big integer.
    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        let m = x.mod_floor_u64(self.p);
        m
    }

    /// Image of a rational; `None` when the denominator vanishes mod p
    /// (the caller should move to the next prime).
    pub fn from_rational(&self, x: &Rational) -> Option<u64> {
        let d = self.from_bigint(x.denom());
        if d == 0 {
            return None;
        }
        let n = self.from_bigint(x.numer());
        Some(self.mul(n, self.inv(d).expect("nonzero denominator")))
    }

    /// Field element wrapper, mostly for tests exercising the field axioms.
    pub fn elem(&self, x: i64) -> GfElem {
        GfElem {
            residue: self.from_i64(x),
            field: *self,
        }
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer as _;
        let m = self.mod_floor(&BigInt::from(p));
        m.to_u64().expect("reduced residue fits u64")
    }
}

/// A prime-field element paired with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GfElem {
    pub residue: u64,
    pub field: GfPrime,
}

impl GfElem {
    pub fn add(self, other: Self) -> Self {
        Self {
            residue: self.field.add(self.residue, other.residue),
            ..self
        }
    }
    pub fn sub(self, other: Self) -> Self {
        Self {
            residue: self.field.sub(self.residue, other.residue),
            ..self
        }
    }
    pub fn mul(self, other: Self) -> Self {
        Self {
            residue: self.field.mul(self.residue, other.residue),
            ..self
        }
    }
    pub fn div(self, other: Self) -> Result<Self, ArithError> {
        Ok(Self {
            residue: self.field.div(self.residue, other.residue)?,
            ..self
        })
    }
    pub fn inverse(self) -> Result<Self, ArithError> {
        Ok(Self {
            residue: self.field.inv(self.residue)?,
            ..self
        })
    }
}

impl fmt::Display for GfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.field.p)
    }
}

// ---------------------------------------------------------------------------
// Prime sequence for modular certification
// ---------------------------------------------------------------------------

/// Deterministic Miller-Rabin for u64 (the base set is exact below 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// The fixed, deterministic certification prime sequence: 31-bit primes in
/// descending order starting from 2^31 - 1. Index 0 is [`DEFAULT_PRIME`].
pub fn certification_prime(index: usize) -> u64 {
    use std::sync::Mutex;
    use std::sync::OnceLock;
    static CACHE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![DEFAULT_PRIME]));
    let mut cache = cache.lock().expect("prime cache");
    while cache.len() <= index {
        let mut candidate = cache.last().copied().expect("nonempty") - 2;
        while !is_prime_u64(candidate) {
            candidate -= 2;
        }
        cache.push(candidate);
    }
    cache[index]
}

/// Field over the `index`-th certification prime.
pub fn certification_field(index: usize) -> GfPrime {
    GfPrime::new(certification_prime(index)).expect("certification primes are valid moduli")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn rational_basics() {
        assert_eq!(rat(1, 2) + rat(1, 3), rat(5, 6));
        assert_eq!(rat_inverse(&rat_int(0)), Err(ArithError::DivisionByZero));
        // reduced form, positive denominator
        let x = rat(-4, -6);
        assert_eq!(x, rat(2, 3));
        assert!(x.denom().is_positive());
    }

    #[test]
    fn prime_field_basics() {
        let f = GfPrime::new(2_147_483_647).unwrap();
        // 7 * 29 = 203 = 1 mod 101 is the spec's toy example; scaled here to
        // the real modulus: check against direct arithmetic.
        assert_eq!(f.mul(7, 29), 203);
        assert_eq!(f.mul(f.p - 1, f.p - 1), 1);
        assert_eq!(f.inv(0), Err(ArithError::DivisionByZero));
        let a = 123_456_789u64;
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    #[test]
    fn toy_modulus_rejected() {
        // p = 101 is prime but below 2^30, so the constructor refuses it.
        assert!(GfPrime::new(101).is_err());
        assert_eq!(7 * 29 % 101, 1);
    }

    #[test]
    fn certification_primes_are_distinct_and_prime() {
        let ps: Vec<u64> = (0..20).map(certification_prime).collect();
        assert_eq!(ps[0], DEFAULT_PRIME);
        for w in ps.windows(2) {
            assert!(w[0] > w[1]);
            assert!(is_prime_u64(w[1]));
        }
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in -2000i64..2000, b in -2000i64..2000, c in -2000i64..2000) {
            let (x, y, z) = (rat(a, 7), rat(b, 11), rat(c, 13));
            prop_assert_eq!((x.clone() + y.clone()) + z.clone(), x.clone() + (y.clone() + z.clone()));
            prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z);
            if !x.is_zero() {
                prop_assert_eq!(x.clone() * rat_inverse(&x).unwrap(), Rational::one());
            }
        }

        #[test]
        fn gf_field_axioms(a in 0i64..i64::MAX, b in 0i64..i64::MAX, c in 0i64..i64::MAX) {
            let f = GfPrime::default_field();
            let (x, y, z) = (f.elem(a), f.elem(b), f.elem(c));
            prop_assert_eq!(x.add(y).add(z), x.add(y.add(z)));
            prop_assert_eq!(x.mul(y.add(z)), x.mul(y).add(x.mul(z)));
            if x.residue != 0 {
                prop_assert_eq!(x.mul(x.inverse().unwrap()).residue, 1);
            }
        }

        #[test]
        fn rational_order_independence(vals in proptest::collection::vec((-100i64..100, 1i64..40), 1..8)) {
            // exactness: a sum is the same under any evaluation order
            let xs: Vec<Rational> = vals.iter().map(|&(n, d)| rat(n, d)).collect();
            let forward: Rational = xs.iter().cloned().fold(Rational::zero(), |a, b| a + b);
            let backward: Rational = xs.iter().rev().cloned().fold(Rational::zero(), |a, b| a + b);
            prop_assert_eq!(forward, backward);
        }
    }
}
