//! Synthesize both phantom families, write them out and read them back.

use lc5w::volume::{generate_phantom, read_volume, write_volume, PhantomSpec, VolumeFormat};

pub fn run() -> lc5w::Result<()> {
    let dir = tempfile::tempdir()?;

    let blocky = generate_phantom(&"blocky:64x64x8,bs=16,seed=0".parse()?)?;
    let ellipsoid = generate_phantom(&PhantomSpec::ellipsoid(64, 64, 6, 2.0, 1.01, 7))?;

    for (name, v) in [("blocky", &blocky), ("ellipsoid", &ellipsoid)] {
        let f0 = v.frames()[0].plane();
        let mean = f0.data().iter().map(|&s| s as f64).sum::<f64>() / f0.len() as f64;
        println!(
            "{name:<10} {}x{}x{} {}-bit, frame 0 mean {mean:.1}",
            v.width(),
            v.height(),
            v.frame_count(),
            v.bit_depth()
        );

        let raw = dir.path().join(format!("{name}.raw"));
        write_volume(v, &raw, VolumeFormat::Raw16Le)?;
        assert_eq!(&read_volume(&raw, VolumeFormat::Raw16Le)?, v);

        let stem = dir.path().join(name);
        write_volume(v, &stem, VolumeFormat::PgmStack)?;
        assert_eq!(&read_volume(&stem, VolumeFormat::PgmStack)?, v);
    }
    println!("raw and pgm round trips ok");
    Ok(())
}

#[allow(dead_code)]
fn main() -> lc5w::Result<()> {
    run()
}
