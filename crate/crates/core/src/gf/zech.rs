use super::{FieldElement, FieldSpec, GfError, TABLE_MAX_DEGREE};

/// Log/antilog tables for `GF(2^v)`, `v <= 20`.
///
/// Besides table-driven multiplication this exposes the Zech logarithm
/// `z(n)` defined by `ω^z(n) = 1 + ω^n`, which turns field addition into
/// exponent arithmetic.
#[derive(Debug, Clone)]
pub struct LogTables {
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl LogTables {
    pub fn new(field: &FieldSpec) -> Result<Self, GfError> {
        let degree = field.degree();
        if degree > TABLE_MAX_DEGREE {
            return Err(GfError::FieldTooLarge {
                degree,
                limit: TABLE_MAX_DEGREE,
            });
        }
        let order = field.order() as u32;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; 1 << degree];
        let mut x = FieldElement::ONE;
        for e in 0..order {
            exp.push(x.bits() as u32);
            log[x.bits() as usize] = e;
            x = field.mul_by_generator(x);
        }
        Ok(LogTables { order, exp, log })
    }

    pub fn exp(&self, e: u128) -> FieldElement {
        FieldElement::from_bits(self.exp[(e % self.order as u128) as usize] as u128)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let s = self.log[a.bits() as usize] as u64 + self.log[b.bits() as usize] as u64;
        FieldElement::from_bits(self.exp[(s % self.order as u64) as usize] as u128)
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        if b.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if a.is_zero() {
            return Ok(FieldElement::ZERO);
        }
        let d = self.order as u64 + self.log[a.bits() as usize] as u64 - self.log[b.bits() as usize] as u64;
        Ok(FieldElement::from_bits(
            self.exp[(d % self.order as u64) as usize] as u128,
        ))
    }

    pub fn dlog(&self, a: FieldElement) -> Result<u128, GfError> {
        if a.is_zero() {
            return Err(GfError::ZeroElement);
        }
        Ok(self.log[a.bits() as usize] as u128)
    }

    /// Zech logarithm: `z` with `ω^z = 1 + ω^n`, or `None` when `ω^n = 1`.
    pub fn zech(&self, n: u128) -> Option<u128> {
        let sum = 1 ^ self.exp[(n % self.order as u128) as usize];
        (sum != 0).then(|| self.log[sum as usize] as u128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zech_v5_by_modulus() {
        // z(1) is the third exponent of span{1, ω}; it depends on the modulus.
        let expected = [("25", 18), ("29", 14), ("2f", 12), ("37", 19), ("3b", 13), ("3d", 20)];
        for (hex, z) in expected {
            let f = FieldSpec::from_hex(5, hex).unwrap();
            let t = LogTables::new(&f).unwrap();
            assert_eq!(t.zech(1), Some(z), "modulus {hex}");
            assert_eq!(t.zech(0), None);
        }
    }

    #[test]
    fn zech_definition() {
        let f = FieldSpec::new(10, None).unwrap();
        let t = LogTables::new(&f).unwrap();
        for n in 1..f.order() {
            let z = t.zech(n).unwrap();
            assert_eq!(f.exp(z), FieldElement::ONE + f.exp(n));
        }
    }
}
