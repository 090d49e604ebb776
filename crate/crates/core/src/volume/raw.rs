//! Headerless 16-bit little-endian volumes with a text sidecar.
//!
//! The sidecar lives next to the data file as `<file>.hdr` and holds
//! `key=value` lines for `width`, `height`, `frames`, `bit_depth` and
//! `signed` (0 or 1). Samples are row-major within a frame, frames in order;
//! signed samples are stored in two's complement.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{sample_range, Frame, Volume, MAX_BIT_DEPTH, MIN_BIT_DEPTH};
use crate::error::{Error, Result};
use crate::plane::Plane;

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".hdr");
    PathBuf::from(s)
}

fn parse_sidecar(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(format!("bad sidecar line '{line}'")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn field(map: &HashMap<String, String>, key: &str) -> Result<usize> {
    map.get(key)
        .ok_or_else(|| Error::format(format!("sidecar is missing '{key}'")))?
        .parse()
        .map_err(|_| Error::format(format!("sidecar field '{key}' is not an integer")))
}

pub(super) fn read(path: &Path) -> Result<Volume> {
    let meta = parse_sidecar(&fs::read_to_string(sidecar_path(path))?)?;
    let width = field(&meta, "width")?;
    let height = field(&meta, "height")?;
    let frames = field(&meta, "frames")?;
    let bit_depth = field(&meta, "bit_depth")?;
    let signed = match field(&meta, "signed")? {
        0 => false,
        1 => true,
        _ => return Err(Error::format("sidecar 'signed' must be 0 or 1")),
    };
    if width == 0 || height == 0 || frames == 0 {
        return Err(Error::format("sidecar dimensions must be nonzero"));
    }
    if !(MIN_BIT_DEPTH as usize..=MAX_BIT_DEPTH as usize).contains(&bit_depth) {
        return Err(Error::format(format!("unsupported bit depth {bit_depth}")));
    }
    let bit_depth = bit_depth as u8;

    let bytes = fs::read(path)?;
    let frame_len = width * height;
    let expected = frame_len * frames * 2;
    if bytes.len() != expected {
        return Err(Error::format(format!(
            "payload size mismatch: sidecar implies {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let (lo, hi) = sample_range(bit_depth, signed);
    let samples: Vec<i32> = bytes
        .chunks_exact(2)
        .map(|c| {
            let raw = u16::from_le_bytes([c[0], c[1]]);
            if signed {
                raw as i16 as i32
            } else {
                raw as i32
            }
        })
        .collect();
    if let Some(v) = samples.iter().find(|&&v| v < lo || v > hi) {
        return Err(Error::format(format!(
            "sample {v} outside declared {bit_depth}-bit range"
        )));
    }
    let frames = samples
        .chunks_exact(frame_len)
        .map(|c| Frame::new(Plane::from_vec(width, height, c.to_vec())?, bit_depth, signed))
        .collect::<Result<Vec<_>>>()?;
    Volume::new(frames)
}

pub(super) fn write(v: &Volume, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(v.width() * v.height() * v.frame_count() * 2);
    for f in v.frames() {
        for &s in f.plane().data() {
            bytes.extend_from_slice(&(s as u16).to_le_bytes());
        }
    }
    fs::write(path, bytes)?;
    let sidecar = format!(
        "width={}\nheight={}\nframes={}\nbit_depth={}\nsigned={}\n",
        v.width(),
        v.height(),
        v.frame_count(),
        v.bit_depth(),
        u8::from(v.signed())
    );
    fs::write(sidecar_path(path), sidecar)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn little_endian_single_sample() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.raw");
        fs::write(&path, [0x34, 0x12]).unwrap();
        fs::write(
            sidecar_path(&path),
            "width=1\nheight=1\nframes=1\nbit_depth=16\nsigned=0\n",
        )
        .unwrap();
        let v = read(&path).unwrap();
        assert_eq!(v.frames()[0].get(0, 0), 0x1234);
    }

    #[test]
    fn size_mismatch_and_range_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.raw");
        fs::write(&path, [0, 0, 0]).unwrap();
        fs::write(
            sidecar_path(&path),
            "width=2\nheight=1\nframes=1\nbit_depth=8\nsigned=0\n",
        )
        .unwrap();
        assert!(matches!(read(&path), Err(Error::Format(_))));

        fs::write(&path, [0x00, 0x01, 0, 0]).unwrap();
        assert!(matches!(read(&path), Err(Error::Format(m)) if m.contains("range")));
    }

    #[test]
    fn missing_sidecar_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read(&dir.path().join("nope.raw")), Err(Error::Io(_))));
    }
}
