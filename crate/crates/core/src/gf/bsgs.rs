use std::collections::HashMap;

use super::{FieldElement, FieldSpec};

/// Largest baby-step table; larger groups take more giant steps instead.
const MAX_BABY_STEPS: u128 = 1 << 21;

/// Baby-step table for discrete logarithms to base `ω`.
pub(super) struct BabySteps {
    step: u128,
    giants: u128,
    table: HashMap<u128, u64>,
    giant: FieldElement,
}

impl BabySteps {
    pub(super) fn new(field: &FieldSpec) -> Self {
        let order = field.order();
        let mut step = (order as f64).sqrt().ceil() as u128;
        while step * step < order {
            step += 1;
        }
        step = step.min(MAX_BABY_STEPS);
        let giants = order.div_ceil(step);
        let mut table = HashMap::with_capacity(step as usize);
        let mut x = FieldElement::ONE;
        for j in 0..step as u64 {
            table.entry(x.bits()).or_insert(j);
            x = field.mul_by_generator(x);
        }
        // x = ω^step here
        let giant = field.inv(x).expect("ω^step is nonzero");
        BabySteps {
            step,
            giants,
            table,
            giant,
        }
    }

    pub(super) fn solve(&self, field: &FieldSpec, a: FieldElement) -> u128 {
        let mut gamma = a;
        for i in 0..self.giants {
            if let Some(&j) = self.table.get(&gamma.bits()) {
                return (i * self.step + j as u128) % field.order();
            }
            gamma = field.mul(gamma, self.giant);
        }
        unreachable!("ω generates the multiplicative group")
    }
}
