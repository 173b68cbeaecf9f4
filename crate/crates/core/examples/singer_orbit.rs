// The Singer orbit of span{1, ω} in GF(2^5): 31 members whose exponent sets
// are shifts of one another.

use singer_codes::{FieldSpec, OrbitRep};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::from_hex(5, "29")?;
    let orbit = OrbitRep::from_generators(&field, &[field.exp(0), field.exp(1)])?;
    println!("representative exponents {:?}", orbit.exponents().expect("v is small"));
    println!("orbit length {}", orbit.orbit_length());
    for a in [1u128, 2, 16, 30] {
        println!("  ω^{a} · U -> {:?}", orbit.shifted_exponents(a).expect("v is small"));
    }
    let members: std::collections::HashSet<_> = orbit.orbit_members().collect();
    assert_eq!(members.len(), 31);

    let labels = orbit.is_good_orbit().expect("k = 2 orbits are always good");
    println!("edge labels {:?}", labels.unordered_diffs().expect("v is small"));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
