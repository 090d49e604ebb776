//! Export HP coefficient planes as 16-bit PGM for an external coder, then
//! map a sorted export back to the original pyramid.

use lc5w::container::export::{export_planes, import_planes};
use lc5w::container::{temporal_decomposition, DecisionMode, EncoderConfig};
use lc5w::dwt::forward_2d;
use lc5w::volume::{generate_phantom, PhantomSpec};

pub fn run() -> lc5w::Result<()> {
    let dir = tempfile::tempdir()?;
    let v = generate_phantom(&PhantomSpec::blocky(64, 64, 4, 16, 1))?;
    let config = EncoderConfig::default().with_mode(DecisionMode::Lc);

    let frames = export_planes(&v, &config, dir.path())?;
    let hp = temporal_decomposition(&v, &config)?;
    for (f, hp) in frames.iter().zip(hp.hp_frames()) {
        let (pyramid, plan) = import_planes(&f.sorted, &f.sidecar)?;
        assert_eq!(pyramid, forward_2d(hp, 6)?);
        println!(
            "{}: {} bands re-sorted, re-import exact",
            f.sorted.file_name().unwrap().to_string_lossy(),
            plan.resorted_count()
        );
    }
    print!("{}", std::fs::read_to_string(&frames[0].sidecar)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
