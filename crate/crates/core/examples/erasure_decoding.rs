// Erasure decoding: any two-dimensional subspace of a codeword identifies
// it with one division and k - 2 multiplications.

use singer_codes::search::find_code;
use singer_codes::{FieldSpec, SearchConfig, Subspace};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::new(13, None)?;
    let code = find_code(&SearchConfig::new(&field, 3, 1, 7))?;
    let message = 4321;
    let word = code.encode(message)?;
    println!("sent\n{word}");

    let rows = word.rows();
    let erased = Subspace::span(13, [rows[0] ^ rows[2], rows[1]])?;
    let result = code.decode(&erased)?;
    println!("received\n{erased}");
    println!("{}", result.status_line());
    assert_eq!(result.codeword, word);
    assert_eq!(code.message_of(&result)?, message);

    // a general k = 4 code: one division and two multiplications
    let field = FieldSpec::new(11, None)?;
    let code4 = find_code(&SearchConfig::new(&field, 4, 1, 3))?;
    let word = code4.encode(99)?;
    let erased = Subspace::span(11, word.rows()[..2].iter().copied())?;
    println!("k=4: {}", code4.decode(&erased)?.status_line());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
