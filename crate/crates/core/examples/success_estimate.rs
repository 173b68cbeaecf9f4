// How likely is a random orbit to be good? The analytic estimate next to an
// empirical rate at v = 20.

use singer_codes::search::{combinable_orbits, random_orbit_trial, trial_rng, GeneratorRecipe};
use singer_codes::{estimate_success, FieldSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let e = estimate_success(2, 100, 3, 1)?;
    println!("v=100: m={} s={} exponent={:e}", e.m, e.s, e.exponent);
    let c = combinable_orbits(2, 100, 3)?;
    println!(
        "combinable orbits: {} (exponent <= 1), {} (birthday median)",
        c.unit_exponent, c.birthday_median
    );

    let field = FieldSpec::new(20, None)?;
    let trials = 2000u64;
    let good = (0..trials)
        .filter(|&i| random_orbit_trial(&field, 3, GeneratorRecipe::Anchored, &mut trial_rng(99, i)).is_ok())
        .count();
    let predicted = estimate_success(2, 20, 3, 1)?.exponent.exp();
    println!("v=20: {good}/{trials} good, predicted rate {predicted:.5}");
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
