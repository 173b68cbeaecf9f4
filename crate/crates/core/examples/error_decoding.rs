// Single-error decoding for k = 3: the received 4-space holds the codeword
// plus one stray vector, found with at most seven quotient lookups.

use singer_codes::search::find_code;
use singer_codes::{FieldSpec, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::new(13, None)?;
    let code = find_code(&SearchConfig::new(&field, 3, 1, 11))?;
    let word = code.encode(777)?;
    let mut received = word.clone();
    let stray = 0b1_0110_1001_0111u128;
    assert!(received.insert(stray), "stray vector lies outside the codeword");
    let result = code.decode(&received)?;
    println!("{}", result.status_line());
    assert_eq!(result.codeword, word);
    assert!(result.op_count.divisions <= 7 && result.op_count.multiplications <= 7);
    println!("distance received/codeword = {}", result.distance);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
