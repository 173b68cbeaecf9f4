// Randomized search for a three-orbit code at v = 13 and a check of its
// minimum distance.

use singer_codes::linalg::min_distance;
use singer_codes::search::find_code_with_stats;
use singer_codes::{Code, FieldSpec, SearchConfig, Subspace};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::new(13, None)?;
    let config = SearchConfig::new(&field, 3, 3, 2024);
    let (code, stats) = find_code_with_stats(&config)?;
    println!("{code}");
    println!(
        "trials={} dependent={} label_collisions={} cross_collisions={}",
        stats.trials, stats.dependent, stats.label_collisions, stats.cross_collisions
    );
    println!("codewords={} labels={}", code.len(), code.table_len());

    // the text form round-trips
    let again = Code::parse(&code.to_string())?;
    assert_eq!(again.to_string(), code.to_string());

    // a slice of the code keeps the check quick; `verify --exhaustive` does all of it
    let words: Vec<Subspace> = code.codewords().step_by(16).collect();
    println!("min distance over {} codewords: {}", words.len(), min_distance(&words)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
