// The Singer orbit incidence matrix for 2-subspaces versus 3-subspaces of
// GF(2)^7 and a packing found by branch and bound.

use singer_codes::kramer::singer_orbit_count;
use singer_codes::linalg::min_distance;
use singer_codes::{build_instance, solve_packing, FieldSpec, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::new(7, None)?;
    let instance = build_instance(&field, 3, 2)?;
    println!(
        "rows={} cols={} (Burnside: {} / {})",
        instance.rows(),
        instance.cols(),
        singer_orbit_count(7, 2),
        singer_orbit_count(7, 3)
    );
    let solution = solve_packing(&instance, &SolverConfig::default())?;
    println!("{solution}");
    instance.verify_packing(&solution.selected, 1)?;
    let words = instance.codewords(&solution.selected);
    println!("codewords={} min distance={}", words.len(), min_distance(&words)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
