// Arithmetic in GF(2^v): modulus selection, products, inverses, discrete
// logarithms and the Zech logarithm table.

use singer_codes::gf::zech::LogTables;
use singer_codes::FieldSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::new(5, None)?;
    println!(
        "GF(2^5) modulus 0x{} (x^5 + x^2 + 1), L = {}",
        field.modulus(),
        field.order()
    );

    let w = field.generator();
    let a = field.exp(17);
    let b = field.mul(a, w);
    assert_eq!(b, field.exp(18));
    let inv = field.inv(a)?;
    assert_eq!(field.mul(a, inv), singer_codes::FieldElement::ONE);
    println!("ω^17 = {a:x}, ω^18 = {b:x}, (ω^17)^-1 = {inv:x}");
    println!("dlog(ω^17) = {}", field.dlog(a)?);

    // the same field from an explicit modulus, with table-driven products
    let fast = FieldSpec::from_hex(5, "29")?.accelerated()?;
    let zech = LogTables::new(&fast)?;
    println!("modulus 29: 1 + ω = ω^{}", zech.zech(1).expect("ω != 1"));

    let big = FieldSpec::new(100, None)?;
    let x = big.exp(1 << 90);
    assert_eq!(big.div(big.mul(x, x), x)?, x);
    println!(
        "GF(2^100) modulus {}, dlog available: {}",
        big.modulus(),
        big.has_dlog()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
