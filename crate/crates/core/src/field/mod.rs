//! Exact arithmetic in a prime field `F_p` backed by arbitrary-precision
//! integers, plus polynomials and a parametric linear-system solver.
//!
//! Every [`FieldElement`] carries a handle to its [`FieldCtx`]. Checked
//! operations (`checked_add`, `inverse`, ...) report a modulus mismatch as an
//! error; the operator impls on references assume matching fields and panic
//! otherwise, which is how the rest of the crate uses them after validating
//! its inputs once at the boundary.

mod linalg;
mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use thiserror::Error;

pub use linalg::{solve_parametric, solve_parametric_ordered, LinearExpr, Matrix, ParametricSolution, UnknownRow};
pub use poly::{lagrange_eval, lagrange_interpolate, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(BigUint),
    #[error("modulus must be an odd prime greater than 2, got {0}")]
    ModulusTooSmall(BigUint),
    #[error("operands belong to different fields")]
    ModulusMismatch,
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("interpolation needs at least one point")]
    NoPoints,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("value {0} is not reduced modulo the field prime")]
    NotReduced(String),
    #[error("randomness source failed: {0}")]
    Rng(String),
}

#[derive(Debug)]
struct Modulus {
    p: BigUint,
    bits: u64,
}

/// Handle to a prime field. Cheap to clone; two handles are equal iff their
/// moduli are equal.
#[derive(Clone)]
pub struct FieldCtx(Arc<Modulus>);

impl FieldCtx {
    /// Builds a field for the prime `p`. Primality is checked probabilistically.
    pub fn new(p: BigUint) -> Result<Self, FieldError> {
        if p <= BigUint::from(2u32) {
            return Err(FieldError::ModulusTooSmall(p));
        }
        if !num_prime::nt_funcs::is_prime(&p, None).probably() {
            return Err(FieldError::NotPrime(p));
        }
        let bits = p.bits();
        Ok(FieldCtx(Arc::new(Modulus { p, bits })))
    }

    pub fn from_u64(p: u64) -> Result<Self, FieldError> {
        Self::new(BigUint::from(p))
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.p
    }

    /// Bit length of the modulus.
    pub fn bits(&self) -> u64 {
        self.0.bits
    }

    /// Modulus as `u64` when it fits.
    pub fn modulus_u64(&self) -> Option<u64> {
        self.0.p.to_u64()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: BigUint::zero(), ctx: self.clone() }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: BigUint::one(), ctx: self.clone() }
    }

    /// Reduces an unsigned integer into the field.
    pub fn elem(&self, v: u64) -> FieldElement {
        self.reduce(BigUint::from(v))
    }

    /// Reduces a signed integer into the field.
    pub fn elem_i64(&self, v: i64) -> FieldElement {
        let mag = self.elem(v.unsigned_abs());
        if v < 0 {
            -&mag
        } else {
            mag
        }
    }

    pub fn reduce(&self, v: BigUint) -> FieldElement {
        let value = if v < self.0.p { v } else { v % &self.0.p };
        FieldElement { value, ctx: self.clone() }
    }

    /// Accepts only an already-reduced residue.
    pub fn from_biguint(&self, v: BigUint) -> Result<FieldElement, FieldError> {
        if v >= self.0.p {
            return Err(FieldError::NotReduced(v.to_str_radix(16)));
        }
        Ok(FieldElement { value: v, ctx: self.clone() })
    }

    /// Parses the canonical hex encoding (see [`FieldElement::to_hex`]).
    /// Upper-case digits and odd lengths are accepted on input.
    pub fn from_hex(&self, s: &str) -> Result<FieldElement, FieldError> {
        let v = parse_hex(s)?;
        self.from_biguint(v)
    }

    /// Minimal big-endian bytes of `p`.
    pub fn modulus_bytes(&self) -> Vec<u8> {
        minimal_be_bytes(&self.0.p)
    }

    pub fn modulus_hex(&self) -> String {
        biguint_to_hex(&self.0.p)
    }

    /// Draws a uniform element by rejection sampling on `bits()`-bit strings.
    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<FieldElement, FieldError> {
        let nbytes = self.0.bits.div_ceil(8) as usize;
        let excess = (nbytes as u64) * 8 - self.0.bits;
        let mut buf = vec![0u8; nbytes];
        loop {
            rng.try_fill_bytes(&mut buf).map_err(|e| FieldError::Rng(e.to_string()))?;
            buf[0] &= 0xffu8 >> excess;
            let v = BigUint::from_bytes_be(&buf);
            if v < self.0.p {
                return Ok(FieldElement { value: v, ctx: self.clone() });
            }
        }
    }

    /// All elements `0..p`, in order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let p = self.modulus_u64().expect("enumeration requires a word-sized modulus");
        (0..p).map(move |v| self.elem(v))
    }

    pub(crate) fn check(&self, other: &FieldCtx) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::ModulusMismatch)
        }
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.p == other.0.p
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.p)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: BigUint,
    ctx: FieldCtx,
}

impl FieldElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn checked_add(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self + rhs)
    }

    pub fn checked_sub(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self - rhs)
    }

    pub fn checked_mul(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.ctx.check(&rhs.ctx)?;
        Ok(self * rhs)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::InverseOfZero);
        }
        let p = num_bigint::BigInt::from(self.ctx.modulus().clone());
        let a = num_bigint::BigInt::from(self.value.clone());
        let egcd = a.extended_gcd(&p);
        debug_assert!(egcd.gcd.is_one());
        let inv = egcd.x.mod_floor(&p);
        Ok(FieldElement {
            value: inv.to_biguint().expect("mod_floor is non-negative"),
            ctx: self.ctx.clone(),
        })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> FieldElement {
        FieldElement { value: self.value.modpow(e, self.ctx.modulus()), ctx: self.ctx.clone() }
    }

    /// Minimal big-endian bytes; zero encodes as the empty string.
    pub fn to_bytes_be(&self) -> Vec<u8> {
        minimal_be_bytes(&self.value)
    }

    /// Big-endian, left-padded to the byte length of the modulus.
    pub fn to_bytes_fixed(&self) -> Vec<u8> {
        let width = self.ctx.modulus_bytes().len();
        let raw = self.to_bytes_be();
        let mut out = vec![0u8; width - raw.len()];
        out.extend(raw);
        out
    }

    /// Lowercase big-endian hex of the minimal byte encoding; zero is `"0"`.
    pub fn to_hex(&self) -> String {
        biguint_to_hex(&self.value)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        assert!(self.ctx == rhs.ctx, "field element modulus mismatch");
        let mut v = &self.value + &rhs.value;
        if v >= *self.ctx.modulus() {
            v -= self.ctx.modulus();
        }
        FieldElement { value: v, ctx: self.ctx.clone() }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        assert!(self.ctx == rhs.ctx, "field element modulus mismatch");
        let v = if self.value >= rhs.value {
            &self.value - &rhs.value
        } else {
            self.ctx.modulus() - &rhs.value + &self.value
        };
        FieldElement { value: v, ctx: self.ctx.clone() }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        assert!(self.ctx == rhs.ctx, "field element modulus mismatch");
        FieldElement { value: (&self.value * &rhs.value) % self.ctx.modulus(), ctx: self.ctx.clone() }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        if self.value.is_zero() {
            return self.clone();
        }
        FieldElement { value: self.ctx.modulus() - &self.value, ctx: self.ctx.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

pub(crate) fn minimal_be_bytes(v: &BigUint) -> Vec<u8> {
    if v.is_zero() {
        Vec::new()
    } else {
        v.to_bytes_be()
    }
}

pub(crate) fn biguint_to_hex(v: &BigUint) -> String {
    if v.is_zero() {
        return "0".to_owned();
    }
    let mut s = String::with_capacity(2 * v.bits().div_ceil(8) as usize);
    for b in v.to_bytes_be() {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Parses a modulus given as decimal digits or as `0x`-prefixed hex.
pub fn parse_modulus(s: &str) -> Result<BigUint, FieldError> {
    let t = s.trim();
    if t.starts_with("0x") {
        return parse_hex(t);
    }
    if t.is_empty() || !t.bytes().all(|c| c.is_ascii_digit()) {
        return Err(FieldError::InvalidNumber(s.to_owned()));
    }
    BigUint::parse_bytes(t.as_bytes(), 10).ok_or_else(|| FieldError::InvalidNumber(s.to_owned()))
}

pub(crate) fn parse_hex(s: &str) -> Result<BigUint, FieldError> {
    let t = s.strip_prefix("0x").unwrap_or(s);
    if t.is_empty() || !t.bytes().all(|c| c.is_ascii_hexdigit()) {
        return Err(FieldError::InvalidNumber(s.to_owned()));
    }
    BigUint::parse_bytes(t.as_bytes(), 16).ok_or_else(|| FieldError::InvalidNumber(s.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::from_u64(p).unwrap()
    }

    #[test]
    fn rejects_composite_and_tiny_moduli() {
        assert!(matches!(FieldCtx::from_u64(2), Err(FieldError::ModulusTooSmall(_))));
        assert!(matches!(FieldCtx::from_u64(1), Err(FieldError::ModulusTooSmall(_))));
        assert!(matches!(FieldCtx::from_u64(91), Err(FieldError::NotPrime(_))));
        assert!(FieldCtx::from_u64(3).is_ok());
        assert!(FieldCtx::from_u64((1 << 61) - 1).is_ok());
    }

    #[test]
    fn arith_examples() {
        let f71 = f(71);
        let x = f71.elem(42);
        assert_eq!(f71.zero().checked_add(&x).unwrap(), x);
        assert_eq!(f71.elem(2).checked_mul(&f71.elem(36)).unwrap(), f71.one());
        let f7 = f(7);
        assert_eq!(f7.elem(3).checked_sub(&f7.elem(5)).unwrap(), f7.elem(5));
        assert_eq!(f7.elem_i64(-2), f7.elem(5));
    }

    #[test]
    fn mismatched_moduli_are_rejected() {
        let a = f(7).elem(1);
        let b = f(11).elem(1);
        assert_eq!(a.checked_add(&b), Err(FieldError::ModulusMismatch));
        assert_eq!(a.checked_sub(&b), Err(FieldError::ModulusMismatch));
        assert_eq!(a.checked_mul(&b), Err(FieldError::ModulusMismatch));
    }

    #[test]
    fn inverse_examples() {
        let f71 = f(71);
        assert_eq!(f71.one().inverse().unwrap(), f71.one());
        assert_eq!(f71.elem(2).inverse().unwrap(), f71.elem(36));
        assert_eq!(f71.zero().inverse(), Err(FieldError::InverseOfZero));
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101] {
            let ctx = f(p);
            for a in 1..p {
                let a = ctx.elem(a);
                assert_eq!(&a.inverse().unwrap() * &a, ctx.one(), "p={p} a={a}");
            }
        }
    }

    #[test]
    fn hex_encoding() {
        let ctx = f(65537);
        assert_eq!(ctx.zero().to_hex(), "0");
        assert_eq!(ctx.elem(15).to_hex(), "0f");
        assert_eq!(ctx.elem(0x1234).to_hex(), "1234");
        assert_eq!(ctx.elem(0x10000).to_hex(), "010000");
        assert_eq!(ctx.from_hex("0f").unwrap(), ctx.elem(15));
        assert_eq!(ctx.from_hex("F").unwrap(), ctx.elem(15));
        assert_eq!(ctx.from_hex("0").unwrap(), ctx.zero());
        assert!(matches!(ctx.from_hex("10001"), Err(FieldError::NotReduced(_))));
        assert!(matches!(ctx.from_hex("zz"), Err(FieldError::InvalidNumber(_))));
        assert!(matches!(ctx.from_hex(""), Err(FieldError::InvalidNumber(_))));
        assert!(ctx.zero().to_bytes_be().is_empty());
        assert_eq!(ctx.elem(15).to_bytes_fixed(), vec![0, 0, 15]);
        assert_eq!(ctx.zero().to_bytes_fixed(), vec![0, 0, 0]);
    }

    #[test]
    fn modulus_parsing() {
        assert_eq!(parse_modulus("71").unwrap(), BigUint::from(71u8));
        assert_eq!(parse_modulus("0x47").unwrap(), BigUint::from(71u8));
        assert!(parse_modulus("47h").is_err());
        assert!(parse_modulus("").is_err());
    }

    #[test]
    fn random_is_reduced() {
        use rand::SeedableRng;
        let ctx = f(13);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        let mut seen = [false; 13];
        for _ in 0..500 {
            let v = ctx.random(&mut rng).unwrap().to_u64().unwrap();
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let ctx = f(101);
        let a = ctx.elem(17);
        let mut acc = ctx.one();
        for e in 0..30 {
            assert_eq!(a.pow(e), acc);
            acc = &acc * &a;
        }
    }
}
