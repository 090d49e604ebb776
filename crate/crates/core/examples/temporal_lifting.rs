//! Motion-compensated temporal lifting: energy of the highpass frames with
//! and without motion, and exact reconstruction.

use lc5w::temporal::{forward, inverse, TemporalParams};
use lc5w::volume::{generate_phantom, PhantomSpec};

fn mean_abs_hp(d: &lc5w::temporal::TemporalDecomposition) -> f64 {
    let (sum, n) = d
        .hp_frames()
        .fold((0u64, 0usize), |(s, n), p| (s + p.sum_abs(), n + p.len()));
    sum as f64 / n as f64
}

pub fn run() -> lc5w::Result<()> {
    let v = generate_phantom(&PhantomSpec::ellipsoid(64, 64, 8, 2.0, 1.02, 2))?;

    let with_motion = forward(&v, &TemporalParams::default())?;
    let without = forward(
        &v,
        &TemporalParams {
            search_range: 0,
            ..TemporalParams::default()
        },
    )?;
    println!(
        "mean |HP|: {:.2} with search range 15, {:.2} without motion",
        mean_abs_hp(&with_motion),
        mean_abs_hp(&without)
    );

    let two_levels = forward(
        &v,
        &TemporalParams {
            levels: 2,
            ..TemporalParams::default()
        },
    )?;
    println!(
        "two levels: {} HP frames, {} LP frames",
        two_levels.hp_count(),
        two_levels.lp.len()
    );

    for d in [&with_motion, &without, &two_levels] {
        assert_eq!(inverse(d)?, v.planes());
    }
    println!("inverse lifting reproduces all {} frames", v.frame_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
