//! Boundary sets, the LC quotient and both decision rules on one highpass
//! frame of the blocky phantom.

use lc5w::container::{temporal_decomposition, EncoderConfig};
use lc5w::dwt::{forward_2d, Orientation};
use lc5w::resort::{
    apply_plan, boundary_set, boundary_sets_for, decide_lc, decide_opt, invert_plan, lc_statistic, ResortParams,
    Thresholds,
};
use lc5w::tier1::subband_rate;
use lc5w::volume::{generate_phantom, PhantomSpec};

pub fn run() -> lc5w::Result<()> {
    let params = ResortParams::new(16, Thresholds::default())?;
    println!("bs 16: candidate levels 1..={}", params.max_level);
    for level in 1..=params.max_level {
        println!("  level {level}: {:?}", boundary_set(16, level, 32)?.indices);
    }

    let v = generate_phantom(&PhantomSpec::blocky(64, 64, 8, 16, 0))?;
    let d = temporal_decomposition(&v, &EncoderConfig::default())?;
    let pyramid = forward_2d(&d.levels[0].hp[0], 6)?;

    let sb = pyramid.band(Orientation::HL, 1);
    let (rows, cols) = boundary_sets_for(sb, 16)?;
    let q = lc_statistic(sb, rows.as_ref(), cols.as_ref())?;
    println!("HL1 quotient {q} vs threshold {}", params.thresholds.value(Orientation::HL, 1));

    let lc = decide_lc(&pyramid, &params)?;
    let opt = decide_opt(&pyramid, &params, |sb| subband_rate(&sb.coeffs, 64))?;
    for (a, b) in lc.decisions.iter().zip(&opt.decisions) {
        println!("{}{}  lc {:<5} opt {}", a.orientation, a.level, a.resort, b.resort);
    }

    let sorted = apply_plan(&pyramid, &opt, &params)?;
    assert_eq!(invert_plan(&sorted, &opt, &params)?, pyramid);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
