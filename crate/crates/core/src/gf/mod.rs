//! Arithmetic in `GF(2^v)` in polynomial basis.
//!
//! Elements are bit vectors with the constant coefficient in the least
//! significant bit. The modulus is always a primitive polynomial, so the
//! residue class of `x` (returned by [`FieldSpec::generator`]) generates the
//! multiplicative group and plays the role of the Singer cycle: multiplying
//! a subspace of `GF(2)^v` by `x` is one application of the cycle.
//!
//! Multiplication is carry-less shift-and-reduce. For small fields an
//! optional log/antilog (Zech) backend can be attached with
//! [`FieldSpec::accelerated`]; both backends produce identical results.

mod bsgs;
mod modulus;
pub mod zech;

use std::fmt;
use std::ops::Add;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use self::bsgs::BabySteps;
pub use self::modulus::Modulus;
pub use self::zech::LogTables;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 128;
/// Largest degree for which [`FieldSpec::dlog`] runs baby-step/giant-step.
pub const DLOG_MAX_DEGREE: u32 = 48;
/// Largest degree for which log/antilog tables may be built.
pub const TABLE_MAX_DEGREE: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("modulus {0} is not a primitive polynomial")]
    NotPrimitive(String),
    #[error("modulus has degree {found}, expected {expected}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("extension degree {0} is outside 2..=128")]
    UnsupportedDegree(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to the power zero")]
    ZeroToZeroPower,
    #[error("discrete logarithm of zero")]
    ZeroElement,
    #[error("GF(2^{degree}) exceeds the limit of {limit} for this operation")]
    FieldTooLarge { degree: u32, limit: u32 },
    #[error("value {value:#x} is not an element of GF(2^{degree})")]
    ElementOutOfRange { value: u128, degree: u32 },
    #[error("invalid hex string {0:?}")]
    InvalidHex(String),
}

/// An element of `GF(2^v)`: coefficient bits in polynomial basis.
///
/// Elements do not carry their field; every operation goes through a
/// [`FieldSpec`]. Bits at or above position `v` must be zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u128);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps raw coefficient bits. The caller is responsible for the range;
    /// use [`FieldSpec::element`] for a checked constructor.
    pub const fn from_bits(bits: u128) -> Self {
        FieldElement(bits)
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Field addition (XOR).
impl Add for FieldElement {
    type Output = FieldElement;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// A validated description of `GF(2^v)`.
///
/// Cheap to clone; the heavy state (discrete-log tables) is shared and built
/// lazily on first use.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

struct Inner {
    modulus: Modulus,
    mask: u128,
    order: u128,
    order_factors: Vec<u128>,
    tables: Option<Arc<LogTables>>,
    baby_steps: OnceLock<BabySteps>,
}

impl FieldSpec {
    /// Builds `GF(2^v)`. Without an explicit modulus the numerically
    /// smallest primitive polynomial of degree `v` is used.
    pub fn new(degree: u32, modulus: Option<Modulus>) -> Result<Self, GfError> {
        if !(2..=MAX_DEGREE).contains(&degree) {
            return Err(GfError::UnsupportedDegree(degree));
        }
        let order_factors = modulus::order_prime_factors(degree);
        let modulus = match modulus {
            Some(m) => {
                if m.degree() != degree {
                    return Err(GfError::DegreeMismatch {
                        expected: degree,
                        found: m.degree(),
                    });
                }
                if !m.is_primitive_with(&order_factors) {
                    return Err(GfError::NotPrimitive(m.to_string()));
                }
                m
            }
            None => Modulus::smallest_primitive_with(degree, &order_factors),
        };
        Ok(Self::from_parts(modulus, order_factors, None))
    }

    /// Parses the modulus from its hex serialization and builds the field.
    pub fn from_hex(degree: u32, hex: &str) -> Result<Self, GfError> {
        Self::new(degree, Some(Modulus::from_hex(hex)?))
    }

    fn from_parts(modulus: Modulus, order_factors: Vec<u128>, tables: Option<Arc<LogTables>>) -> Self {
        let degree = modulus.degree();
        let mask = mask_for(degree);
        FieldSpec {
            inner: Arc::new(Inner {
                modulus,
                mask,
                order: mask,
                order_factors,
                tables,
                baby_steps: OnceLock::new(),
            }),
        }
    }

    /// Returns a copy of this field backed by log/antilog tables
    /// (`v <= 20`).
    pub fn accelerated(&self) -> Result<Self, GfError> {
        let tables = LogTables::new(self)?;
        Ok(Self::from_parts(
            self.inner.modulus,
            self.inner.order_factors.clone(),
            Some(Arc::new(tables)),
        ))
    }

    pub fn is_accelerated(&self) -> bool {
        self.inner.tables.is_some()
    }

    pub fn degree(&self) -> u32 {
        self.inner.modulus.degree()
    }

    pub fn modulus(&self) -> Modulus {
        self.inner.modulus
    }

    /// Order of the multiplicative group, `2^v - 1`.
    pub fn order(&self) -> u128 {
        self.inner.order
    }

    /// Distinct prime factors of [`order`](Self::order), ascending.
    pub fn order_prime_factors(&self) -> &[u128] {
        &self.inner.order_factors
    }

    /// The primitive element `ω` (residue class of `x`).
    pub fn generator(&self) -> FieldElement {
        FieldElement(2)
    }

    /// Checked constructor for an element of this field.
    pub fn element(&self, bits: u128) -> Result<FieldElement, GfError> {
        if bits & !self.inner.mask != 0 {
            return Err(GfError::ElementOutOfRange {
                value: bits,
                degree: self.degree(),
            });
        }
        Ok(FieldElement(bits))
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 & !self.inner.mask == 0
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a + b
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if let Some(t) = &self.inner.tables {
            return t.mul(a, b);
        }
        FieldElement(mul_mod(a.0, b.0, self.inner.modulus))
    }

    /// Multiplies by `ω`: one step of the Singer cycle.
    pub fn mul_by_generator(&self, a: FieldElement) -> FieldElement {
        FieldElement(times_x(a.0, self.inner.modulus))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if let Some(t) = &self.inner.tables {
            return t.div(FieldElement::ONE, a);
        }
        self.pow(a, self.inner.order - 1)
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        if b.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if let Some(t) = &self.inner.tables {
            return t.div(a, b);
        }
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with the exponent reduced modulo the group order.
    pub fn pow(&self, a: FieldElement, e: u128) -> Result<FieldElement, GfError> {
        if a.is_zero() {
            return if e == 0 {
                Err(GfError::ZeroToZeroPower)
            } else {
                Ok(FieldElement::ZERO)
            };
        }
        let mut e = e % self.inner.order;
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e != 0 {
                base = self.mul(base, base);
            }
        }
        Ok(acc)
    }

    /// `ω^e`.
    pub fn exp(&self, e: u128) -> FieldElement {
        if let Some(t) = &self.inner.tables {
            return t.exp(e);
        }
        self.pow(self.generator(), e).expect("generator is nonzero")
    }

    pub fn has_dlog(&self) -> bool {
        self.degree() <= DLOG_MAX_DEGREE
    }

    /// Discrete logarithm to base `ω`: the unique `e` in `[0, L)` with
    /// `ω^e = a`. Baby-step/giant-step, capped at `v <= 48`.
    pub fn dlog(&self, a: FieldElement) -> Result<u128, GfError> {
        if a.is_zero() {
            return Err(GfError::ZeroElement);
        }
        if let Some(t) = &self.inner.tables {
            return t.dlog(a);
        }
        if !self.has_dlog() {
            return Err(GfError::FieldTooLarge {
                degree: self.degree(),
                limit: DLOG_MAX_DEGREE,
            });
        }
        let steps = self.inner.baby_steps.get_or_init(|| BabySteps::new(self));
        Ok(steps.solve(self, a))
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("v", &self.degree())
            .field("modulus", &self.inner.modulus.to_string())
            .field("accelerated", &self.is_accelerated())
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {}", self.degree(), self.inner.modulus)
    }
}

pub(crate) fn mask_for(degree: u32) -> u128 {
    if degree >= 128 {
        u128::MAX
    } else {
        (1u128 << degree) - 1
    }
}

#[inline]
fn times_x(a: u128, modulus: Modulus) -> u128 {
    let degree = modulus.degree();
    let carry = (a >> (degree - 1)) & 1 == 1;
    let shifted = (a << 1) & mask_for(degree);
    if carry {
        shifted ^ modulus.low()
    } else {
        shifted
    }
}

/// Carry-less product of `a` and `b` reduced modulo `modulus`.
#[inline]
pub(crate) fn mul_mod(a: u128, b: u128, modulus: Modulus) -> u128 {
    let (mut a, mut b) = if a < b { (b, a) } else { (a, b) };
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        if b != 0 {
            a = times_x(a, modulus);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(v: u32) -> FieldSpec {
        FieldSpec::new(v, None).unwrap()
    }

    #[test]
    fn default_modulus_for_v5() {
        let f = gf(5);
        assert_eq!(f.order(), 31);
        assert_eq!(f.modulus().to_string(), "25");
    }

    #[test]
    fn known_primitive_accepted() {
        let f = FieldSpec::from_hex(5, "25").unwrap();
        // exhaustive: ω^1..ω^31 hits every nonzero element exactly once
        let mut seen = std::collections::HashSet::new();
        let mut x = FieldElement::ONE;
        for _ in 1..=31 {
            x = f.mul_by_generator(x);
            assert!(seen.insert(x));
        }
        assert_eq!(x, FieldElement::ONE);
        assert_eq!(seen.len(), 31);
    }

    #[test]
    fn irreducible_but_not_primitive_rejected() {
        // x^4+x^3+x^2+x+1 divides x^5 - 1
        let err = FieldSpec::from_hex(4, "1f").unwrap_err();
        assert!(matches!(err, GfError::NotPrimitive(_)));
        // reducible: x^4+x^2+1 = (x^2+x+1)^2
        assert!(matches!(FieldSpec::from_hex(4, "15"), Err(GfError::NotPrimitive(_))));
    }

    #[test]
    fn degree_checks() {
        assert_eq!(
            FieldSpec::from_hex(6, "25").unwrap_err(),
            GfError::DegreeMismatch { expected: 6, found: 5 }
        );
        assert_eq!(FieldSpec::new(1, None).unwrap_err(), GfError::UnsupportedDegree(1));
        assert_eq!(FieldSpec::new(129, None).unwrap_err(), GfError::UnsupportedDegree(129));
    }

    #[test]
    fn reduction_by_hand() {
        // x^4 * x = x^5 = x^2 + 1 mod x^5+x^2+1
        let f = gf(5);
        assert_eq!(f.mul(FieldElement(0b10000), FieldElement(0b10)), FieldElement(0b101));
    }

    #[test]
    fn identities() {
        let f = gf(13);
        let w = f.generator();
        let a = FieldElement(0x1abc);
        assert_eq!(f.mul(a, FieldElement::ONE), a);
        assert_eq!(f.mul(w, f.exp(f.order() - 1)), FieldElement::ONE);
        assert_eq!(f.div(a, a).unwrap(), FieldElement::ONE);
        assert_eq!(f.div(FieldElement::ONE, w).unwrap(), f.exp(f.order() - 1));
        assert_eq!(f.pow(a, 0).unwrap(), FieldElement::ONE);
        assert_eq!(f.pow(w, f.order()).unwrap(), FieldElement::ONE);
        assert_eq!(f.div(a, FieldElement::ZERO), Err(GfError::DivisionByZero));
        assert_eq!(f.pow(FieldElement::ZERO, 0), Err(GfError::ZeroToZeroPower));
        assert_eq!(f.pow(FieldElement::ZERO, 3), Ok(FieldElement::ZERO));
    }

    #[test]
    fn multiplicative_order_is_exact() {
        for v in 2..=20 {
            let f = gf(v);
            let w = f.generator();
            assert_eq!(f.pow(w, f.order()).unwrap(), FieldElement::ONE, "v={v}");
            let l = f.order();
            for d in 1..l {
                if d * d > l {
                    break;
                }
                if l.is_multiple_of(d) {
                    for e in [d, l / d] {
                        if e != l {
                            assert_ne!(f.exp(e), FieldElement::ONE, "v={v} e={e}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dlog_small() {
        let f = gf(5);
        assert_eq!(f.dlog(FieldElement::ONE).unwrap(), 0);
        assert_eq!(f.dlog(f.generator()).unwrap(), 1);
        assert_eq!(f.dlog(f.pow(f.generator(), 17).unwrap()).unwrap(), 17);
        assert_eq!(f.dlog(FieldElement::ZERO), Err(GfError::ZeroElement));
        for e in 0..31 {
            assert_eq!(f.dlog(f.exp(e)).unwrap(), e);
        }
    }

    #[test]
    fn dlog_capped() {
        let f = gf(64);
        assert!(matches!(f.dlog(f.generator()), Err(GfError::FieldTooLarge { .. })));
    }

    #[test]
    fn dlog_with_bounded_table() {
        // sqrt(L) exceeds the baby-step table here, so extra giant steps run
        let f = gf(44);
        for e in [0u128, 1, 3 << 40, f.order() - 1] {
            assert_eq!(f.dlog(f.exp(e)).unwrap(), e);
        }
    }

    #[test]
    fn large_degrees_construct() {
        for v in [48, 64, 100, 127, 128] {
            let f = gf(v);
            assert_eq!(f.pow(f.generator(), f.order()).unwrap(), FieldElement::ONE);
            let a = f.exp(12345678901234567);
            assert_eq!(f.mul(f.div(a, f.generator()).unwrap(), f.generator()), a);
        }
    }

    #[test]
    fn accelerated_backend_agrees() {
        for v in [5, 8, 13] {
            let plain = gf(v);
            let fast = plain.accelerated().unwrap();
            assert!(fast.is_accelerated());
            for a in 0..(1u128 << v) {
                let a = FieldElement(a);
                let b = FieldElement((a.0 * 7 + 3) & plain.inner.mask);
                assert_eq!(plain.mul(a, b), fast.mul(a, b));
                if !b.is_zero() {
                    assert_eq!(plain.div(a, b), fast.div(a, b));
                }
                if !a.is_zero() {
                    assert_eq!(plain.dlog(a), fast.dlog(a));
                }
            }
        }
        assert!(matches!(gf(21).accelerated(), Err(GfError::FieldTooLarge { .. })));
    }

    proptest! {
        #[test]
        fn field_axioms(v in prop::sample::select(vec![5u32, 8, 13, 20, 64, 100]), a: u128, b: u128, c: u128) {
            let f = gf(v);
            let m = f.inner.mask;
            let (a, b, c) = (FieldElement(a & m), FieldElement(b & m), FieldElement(c & m));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
            if !b.is_zero() {
                prop_assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
            }
        }

        #[test]
        fn pow_adds_exponents(v in prop::sample::select(vec![5u32, 8, 13, 20]), a in 1u128.., e1 in 0u128..1_000_000, e2 in 0u128..1_000_000) {
            let f = gf(v);
            let a = FieldElement(a & f.inner.mask);
            prop_assume!(!a.is_zero());
            prop_assert_eq!(
                f.pow(a, e1 + e2).unwrap(),
                f.mul(f.pow(a, e1).unwrap(), f.pow(a, e2).unwrap())
            );
        }

        #[test]
        fn dlog_inverts_exp(v in prop::sample::select(vec![5u32, 8, 13, 20, 32]), e: u128) {
            let f = gf(v);
            let e = e % f.order();
            prop_assert_eq!(f.dlog(f.exp(e)).unwrap(), e);
        }
    }
}
