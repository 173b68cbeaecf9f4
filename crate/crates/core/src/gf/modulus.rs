use std::fmt;
use std::str::FromStr;

use super::{mask_for, mul_mod, GfError, MAX_DEGREE};

/// A monic binary polynomial of degree `v`, stored as the coefficients below
/// the leading term.
///
/// Serialized as lowercase hex of the full coefficient vector, constant term
/// in the least significant bit: `x^5+x^2+1` is `"25"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    degree: u32,
    low: u128,
}

impl Modulus {
    /// `x^degree + low`. Bits of `low` at or above `degree` are rejected.
    pub fn new(degree: u32, low: u128) -> Result<Self, GfError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(GfError::UnsupportedDegree(degree));
        }
        if low & !mask_for(degree) != 0 {
            return Err(GfError::InvalidHex(format!("{low:x}")));
        }
        Ok(Modulus { degree, low })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Coefficients below `x^degree`.
    pub fn low(&self) -> u128 {
        self.low
    }

    pub fn from_hex(s: &str) -> Result<Self, GfError> {
        let s = s.trim();
        let digits = s.strip_prefix("0x").unwrap_or(s);
        let bad = || GfError::InvalidHex(s.to_string());
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(bad());
        }
        let digits = digits.trim_start_matches('0');
        // 129 coefficient bits need 33 hex digits, the first being "1".
        if digits.len() == 33 {
            if !digits.starts_with('1') {
                return Err(bad());
            }
            let low = u128::from_str_radix(&digits[1..], 16).map_err(|_| bad())?;
            return Modulus::new(128, low);
        }
        let full = u128::from_str_radix(digits, 16).map_err(|_| bad())?;
        if full < 2 {
            return Err(bad());
        }
        let degree = 127 - full.leading_zeros();
        Modulus::new(degree, full & mask_for(degree))
    }

    pub fn to_hex(&self) -> String {
        self.to_string()
    }

    /// True if this polynomial is primitive, i.e. `x` has multiplicative
    /// order exactly `2^v - 1` modulo it.
    pub fn is_primitive(&self) -> bool {
        self.is_primitive_with(&order_prime_factors(self.degree))
    }

    /// Primitivity test given the prime factors of `2^v - 1`.
    ///
    /// If `x` has order `2^v - 1` in the unit group of `GF(2)[x]/(f)`, that
    /// group has `2^v - 1` elements and the quotient ring is a field, so
    /// irreducibility needs no separate check.
    pub(crate) fn is_primitive_with(&self, prime_factors: &[u128]) -> bool {
        if self.low & 1 == 0 {
            return false;
        }
        let order = mask_for(self.degree);
        let x = if self.degree == 1 { self.low } else { 2 };
        if pow_mod(x, order, *self) != 1 {
            return false;
        }
        prime_factors.iter().all(|&p| pow_mod(x, order / p, *self) != 1)
    }

    /// Numerically smallest primitive polynomial of the given degree.
    pub fn smallest_primitive(degree: u32) -> Result<Self, GfError> {
        if !(2..=MAX_DEGREE).contains(&degree) {
            return Err(GfError::UnsupportedDegree(degree));
        }
        Ok(Self::smallest_primitive_with(degree, &order_prime_factors(degree)))
    }

    pub(crate) fn smallest_primitive_with(degree: u32, prime_factors: &[u128]) -> Self {
        // Constant term must be 1, and an even number of terms means x+1
        // divides the polynomial.
        let mut low: u128 = 1;
        loop {
            if (low.count_ones() + 1) % 2 == 1 {
                let candidate = Modulus { degree, low };
                if candidate.is_primitive_with(prime_factors) {
                    return candidate;
                }
            }
            low += 2;
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 128 {
            write!(f, "1{:032x}", self.low)
        } else {
            write!(f, "{:x}", (1u128 << self.degree) | self.low)
        }
    }
}

impl FromStr for Modulus {
    type Err = GfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modulus::from_hex(s)
    }
}

fn pow_mod(base: u128, mut e: u128, modulus: Modulus) -> u128 {
    let mut acc = 1u128;
    let mut b = base;
    while e != 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, modulus);
        }
        e >>= 1;
        if e != 0 {
            b = mul_mod(b, b, modulus);
        }
    }
    acc
}

/// Distinct prime factors of `2^degree - 1`, ascending.
pub(crate) fn order_prime_factors(degree: u32) -> Vec<u128> {
    let order = mask_for(degree);
    if order <= 1 {
        return Vec::new();
    }
    num_prime::nt_funcs::factorize128(order).into_keys().collect()
}
