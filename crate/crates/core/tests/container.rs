use lc5w::container::export::{export_planes, import_planes, COEFF_OFFSET};
use lc5w::container::{
    decode, encode, encode_with_stats, read_header, temporal_decomposition, DecisionMode, EncoderConfig,
    HEADER_BYTES, MAX_BLOCK_SIZE, MAX_SEARCH_RANGE,
};
use lc5w::dwt::forward_2d;
use lc5w::volume::{generate_phantom, sample_range, PhantomSpec, Volume};
use lc5w::{Error, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn noise(w: usize, h: usize, f: usize, depth: u8, signed: bool, seed: u64) -> Volume {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = sample_range(depth, signed);
    let planes = (0..f).map(|_| Plane::from_fn(w, h, |_, _| rng.gen_range(lo..=hi))).collect();
    Volume::from_planes(planes, depth, signed).unwrap()
}

fn blocky() -> Volume {
    generate_phantom(&PhantomSpec::blocky(64, 64, 8, 16, 0)).unwrap()
}

fn roundtrip(v: &Volume, config: &EncoderConfig) {
    for mode in DecisionMode::ALL {
        let bytes = encode(v, &config.with_mode(mode)).unwrap();
        assert_eq!(&decode(&bytes).unwrap(), v, "mode {mode}");
    }
}

#[test]
fn random_12bit_all_modes() {
    roundtrip(&noise(32, 32, 6, 12, false, 1), &EncoderConfig::default());
}

#[test]
fn single_frame_and_odd_geometry() {
    roundtrip(&noise(17, 9, 1, 8, false, 2), &EncoderConfig::default());
    roundtrip(&noise(1, 1, 3, 8, false, 3), &EncoderConfig::default());
    roundtrip(&noise(33, 7, 5, 12, false, 4), &EncoderConfig { block_size: 4, ..Default::default() });
}

#[test]
fn bit_depths_and_signedness() {
    for (depth, signed) in [(8, false), (8, true), (16, false), (16, true), (12, true)] {
        roundtrip(&noise(20, 24, 4, depth, signed, depth as u64), &EncoderConfig::default());
    }
}

#[test]
fn multi_level_blocky() {
    let config = EncoderConfig { temporal_levels: 3, ..Default::default() };
    roundtrip(&blocky(), &config);
}

#[test]
fn largest_block_size() {
    let v = generate_phantom(&PhantomSpec::blocky(140, 130, 3, 16, 5)).unwrap();
    let config = EncoderConfig { block_size: MAX_BLOCK_SIZE, search_range: 3, ..Default::default() };
    roundtrip(&v, &config);
    assert_eq!(read_header(&encode(&v, &config).unwrap()).unwrap().config.block_size, MAX_BLOCK_SIZE);
}

#[test]
fn largest_search_range() {
    let v = noise(40, 36, 3, 8, false, 5);
    let config = EncoderConfig { block_size: 8, search_range: MAX_SEARCH_RANGE, ..Default::default() };
    roundtrip(&v, &config);
}

#[test]
fn out_of_range_config_is_rejected() {
    let v = noise(16, 16, 2, 8, false, 6);
    for config in [
        EncoderConfig { block_size: 12, ..Default::default() },
        EncoderConfig { block_size: 256, ..Default::default() },
        EncoderConfig { search_range: MAX_SEARCH_RANGE + 1, ..Default::default() },
        EncoderConfig { cb_size: 128, ..Default::default() },
        EncoderConfig { temporal_levels: 0, ..Default::default() },
    ] {
        assert!(matches!(encode(&v, &config), Err(Error::InvalidParam(_))), "{config:?}");
    }
}

#[test]
fn encoding_is_deterministic() {
    let v = blocky();
    let a = encode(&v, &EncoderConfig::default()).unwrap();
    let b = encode(&v, &EncoderConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn header_fields() {
    let v = noise(40, 30, 5, 12, true, 7);
    let config = EncoderConfig { cb_size: 16, mode: DecisionMode::Lc, ..Default::default() };
    let h = read_header(&encode(&v, &config).unwrap()).unwrap();
    assert_eq!((h.width, h.height, h.frames, h.bit_depth, h.signed), (40, 30, 5, 12, true));
    assert_eq!(h.config, config);
}

#[test]
fn none_and_unused_lc_differ_only_in_signaling() {
    let v = Volume::from_planes(vec![Plane::filled(32, 32, 9); 5], 8, false).unwrap();
    let (a, sa) = encode_with_stats(&v, &EncoderConfig::default().with_mode(DecisionMode::None)).unwrap();
    let (b, sb) = encode_with_stats(&v, &EncoderConfig::default().with_mode(DecisionMode::Lc)).unwrap();
    assert_eq!(sb.resorted_bands(), 0);
    assert_eq!(sa.hp_payload_bytes, sb.hp_payload_bytes);
    assert_eq!(sa.lp_payload_bytes, sb.lp_payload_bytes);
    assert_eq!(b.len() - a.len(), sb.signaling_bytes as usize);
    assert_eq!(sb.signaling_bytes, sb.hp_frames.len() as u64);
}

#[test]
fn truncation_and_trailing_bytes_are_corrupt() {
    let bytes = encode(&blocky(), &EncoderConfig::default()).unwrap();
    for cut in [HEADER_BYTES, HEADER_BYTES + 1, bytes.len() / 2, bytes.len() - 1] {
        assert!(matches!(decode(&bytes[..cut]), Err(Error::Corrupt(_))), "cut at {cut}");
    }
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(matches!(decode(&longer), Err(Error::Corrupt(_))));
}

#[test]
fn bad_magic_and_version() {
    let bytes = encode(&noise(8, 8, 2, 8, false, 8), &EncoderConfig::default()).unwrap();
    let mut m = bytes.clone();
    m[0] = b'X';
    assert!(decode(&m).is_err());
    let mut v = bytes.clone();
    v[4] = 99;
    assert!(decode(&v).is_err());
    assert!(decode(&bytes[..3]).is_err());
}

#[test]
fn damaged_streams_never_panic() {
    let bytes = encode(&blocky(), &EncoderConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let positions = (0..HEADER_BYTES + 8).chain((0..150).map(|_| rng.gen_range(0..bytes.len())));
    for i in positions {
        for bit in 0..8 {
            let mut d = bytes.clone();
            d[i] ^= 1 << bit;
            // any outcome but a panic is acceptable; a decoded volume must still be well formed
            if let Ok(v) = decode(&d) {
                assert_eq!((v.width(), v.height()), (64, 64));
            }
        }
    }
}

#[test]
fn absurd_geometry_is_rejected_quickly() {
    let mut bytes = encode(&noise(16, 16, 2, 8, false, 11), &EncoderConfig::default()).unwrap();
    bytes[5..9].copy_from_slice(&u32::MAX.to_le_bytes());
    bytes[9..13].copy_from_slice(&u32::MAX.to_le_bytes());
    let t = std::time::Instant::now();
    assert!(matches!(decode(&bytes), Err(Error::Corrupt(_))));
    assert!(t.elapsed().as_millis() < 100);
}

#[test]
fn export_writes_two_images_and_a_sidecar_per_hp_frame() {
    let v = blocky();
    let dir = tempfile::tempdir().unwrap();
    let config = EncoderConfig { temporal_levels: 2, ..Default::default() };
    let frames = export_planes(&v, &config, dir.path()).unwrap();
    let decomposition = temporal_decomposition(&v, &config).unwrap();
    let hp = decomposition.hp_count();
    assert_eq!(frames.len(), hp);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 3 * hp);
    assert!(frames.iter().all(|f| f.plan.any_resort()));
    for f in &frames {
        let (pyr, plan) = import_planes(&f.sorted, &f.sidecar).unwrap();
        assert_eq!(plan, f.plan);
        assert_ne!(std::fs::read(&f.sorted).unwrap(), std::fs::read(&f.unsorted).unwrap());
        let hp_frame = decomposition.hp_frames().nth(f.index).unwrap();
        assert_eq!(pyr, forward_2d(hp_frame, pyr.levels()).unwrap());
    }
}

#[test]
fn export_without_resort_is_byte_identical() {
    let v = blocky();
    let dir = tempfile::tempdir().unwrap();
    let frames = export_planes(&v, &EncoderConfig::default().with_mode(DecisionMode::None), dir.path()).unwrap();
    for f in &frames {
        assert!(!f.plan.any_resort());
        assert_eq!(std::fs::read(&f.sorted).unwrap(), std::fs::read(&f.unsorted).unwrap());
        let text = std::fs::read_to_string(&f.sidecar).unwrap();
        assert!(text.contains("any_resort=0"));
        assert!(text.contains(&format!("offset={COEFF_OFFSET}")));
    }
}

#[test]
fn export_rejects_coefficients_outside_16_bits() {
    let v = noise(32, 32, 2, 16, false, 10);
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        export_planes(&v, &EncoderConfig::default(), dir.path()),
        Err(Error::Unrepresentable(_))
    ));
}
