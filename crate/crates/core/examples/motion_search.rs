//! Full-search block matching on a translated frame.

use lc5w::motion::{block_sad, compensate, estimate, MotionVector};
use lc5w::volume::{generate_phantom, PhantomSpec};
use lc5w::Plane;

pub fn run() -> lc5w::Result<()> {
    let v = generate_phantom(&PhantomSpec::ellipsoid(64, 64, 1, 0.0, 1.0, 1))?;
    let reference = v.frames()[0].plane();

    // content moves 3 down and 2 left; borders replicate
    let current = Plane::from_fn(64, 64, |y, x| reference.get(y.saturating_sub(3), (x + 2).min(63)));

    let field = estimate(&current, reference, 16, 7)?;
    for by in 0..field.blocks_y() {
        let row: Vec<String> = (0..field.blocks_x())
            .map(|bx| {
                let v = field.vector(by, bx);
                format!("({:>2},{:>2})", v.dy, v.dx)
            })
            .collect();
        println!("{}", row.join(" "));
    }
    // interior blocks see the pure shift
    assert_eq!(field.vector(1, 1), MotionVector::new(-3, 2));

    let pred = compensate(reference, &field)?;
    let residual: i64 = current.data().iter().zip(pred.data()).map(|(a, b)| (a - b).abs() as i64).sum();
    let still = block_sad(&current, reference, field.block_rect(5), MotionVector::ZERO, u64::MAX);
    println!("residual SAD {residual}, block 5 SAD without motion {still}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
