//! Encode a volume under every decision mode and decode it again.

use lc5w::container::{decode, encode_with_stats, read_header, DecisionMode, EncoderConfig};
use lc5w::volume::{generate_phantom, PhantomSpec};

pub fn run() -> lc5w::Result<()> {
    let v = generate_phantom(&PhantomSpec::blocky(48, 40, 6, 8, 3))?;
    for mode in DecisionMode::ALL {
        let config = EncoderConfig {
            block_size: 8,
            ..EncoderConfig::default().with_mode(mode)
        };
        let (bytes, stats) = encode_with_stats(&v, &config)?;
        let h = read_header(&bytes)?;
        println!(
            "{mode:<4} {:>6} bytes, hp payload {:>5}, signaling {}, {} of {} candidate bands re-sorted",
            bytes.len(),
            stats.hp_payload_bytes,
            stats.signaling_bytes,
            stats.resorted_bands(),
            h.candidates()?.len() * stats.hp_frames.len()
        );
        assert_eq!(decode(&bytes)?, v);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
