//! Code-block coding: block round trip and how moving strong columns next
//! to each other changes the subband rate.

use lc5w::resort::{boundary_set, resort};
use lc5w::tier1::{decode_block, encode_block, encode_subband, subband_rate};
use lc5w::dwt::{Orientation, Subband};
use lc5w::Plane;

pub fn run() -> lc5w::Result<()> {
    // weak texture plus strong lines every 8 columns, as in an HL1 band
    let band = Plane::from_fn(32, 32, |y, x| {
        if x % 8 == 7 {
            60 - (y as i32 % 5) * 20
        } else {
            (y * 3 + x) as i32 % 3 - 1
        }
    });

    let block = band.crop(0, 0, 16, 16);
    let s = encode_block(&block);
    println!("16x16 block: K={} payload {} bytes", s.k, s.payload.len());
    assert_eq!(decode_block(&s, 16, 16)?, block);

    let cols = boundary_set(16, 1, 32)?;
    let sorted = resort(&Subband::new(Orientation::HL, 1, band.clone()), None, Some(&cols))?;
    for cb in [64, 16] {
        println!(
            "cb {cb:>2}: {} blocks, rate {} bytes as is, {} bytes re-sorted",
            encode_subband(&band, cb)?.len(),
            subband_rate(&band, cb)?,
            subband_rate(&sorted.coeffs, cb)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
