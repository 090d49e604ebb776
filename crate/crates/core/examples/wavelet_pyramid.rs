//! Spatial 5/3 pyramid: band shapes, where a block grid lands in the
//! detail bands, and the nested-quadrant layout.

use lc5w::dwt::{forward_2d, from_mallat, inverse_2d, to_mallat, Orientation};
use lc5w::Plane;

pub fn run() -> lc5w::Result<()> {
    // piecewise constant on a 16x16 grid
    let frame = Plane::from_fn(64, 48, |y, x| ((y / 16) * 7 + (x / 16) * 13) as i32 % 11 * 40);
    let p = forward_2d(&frame, 3)?;

    for b in p.bands() {
        println!("{:<4} {:>2}x{:<2}", b.name(), b.coeffs.width(), b.coeffs.height());
    }

    let hl1 = &p.band(Orientation::HL, 1).coeffs;
    let busy: Vec<usize> = (0..hl1.width())
        .filter(|&x| hl1.column(x).iter().any(|&c| c != 0))
        .collect();
    println!("nonzero HL1 columns: {busy:?}");
    assert_eq!(busy, vec![7, 15, 23]);

    let mallat = to_mallat(&p)?;
    assert_eq!(from_mallat(&mallat, 3)?, p);
    assert_eq!(inverse_2d(&p)?, frame);
    println!("inverse transform exact");
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
