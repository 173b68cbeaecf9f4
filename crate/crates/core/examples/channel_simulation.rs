// Operator-channel runs: noiseless, one erasure, one error, and the packet
// drop erasure model.

use singer_codes::search::find_code;
use singer_codes::{run_pipeline, ChannelConfig, ErasureMode, FieldSpec, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = FieldSpec::new(13, None)?;
    let code = find_code(&SearchConfig::new(&field, 3, 2, 5))?;
    let channels = [
        ("noiseless", ChannelConfig::noiseless(1)),
        ("one erasure", ChannelConfig::new(1, 0, 1)),
        ("one error", ChannelConfig::new(0, 1, 1)),
        (
            "packet drop",
            ChannelConfig::new(1, 0, 1)
                .with_mode(ErasureMode::PacketDrop)
                .with_packets(5),
        ),
    ];
    for (name, channel) in channels {
        let report = run_pipeline(&code, &channel, 2000, 42);
        println!("{name:12} {}", report.summary_line());
        assert_eq!(report.miscorrect, 0);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
