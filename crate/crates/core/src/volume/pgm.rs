//! Netpbm graymap reader/writer (P5 binary, P2 plain on read) and the
//! one-file-per-frame stack layout.

use std::fs;
use std::path::{Path, PathBuf};

use super::{sample_range, Frame, Volume, MIN_BIT_DEPTH};
use crate::error::{Error, Result};
use crate::plane::Plane;

/// Path of frame `index` in a PGM stack rooted at `stem`.
pub fn pgm_stack_path(stem: &Path, index: usize) -> PathBuf {
    let mut name = stem
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(format!("_{index:04}.pgm"));
    stem.with_file_name(name)
}

pub(super) fn read_stack(stem: &Path) -> Result<Volume> {
    let mut frames = Vec::new();
    loop {
        let path = pgm_stack_path(stem, frames.len());
        if !path.exists() {
            break;
        }
        let bytes = fs::read(&path)?;
        let frame = decode_pgm(&bytes)
            .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
        frames.push(frame);
    }
    if frames.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no PGM stack found at {}", pgm_stack_path(stem, 0).display()),
        )));
    }
    // Frames written at one bit depth may still read back with different
    // inferred depths only if maxval differs; Volume::new rejects that.
    Volume::new(frames)
}

pub(super) fn write_stack(v: &Volume, stem: &Path) -> Result<()> {
    if v.signed() {
        return Err(Error::Unrepresentable(
            "PGM cannot store signed samples".into(),
        ));
    }
    for (i, f) in v.frames().iter().enumerate() {
        fs::write(pgm_stack_path(stem, i), encode_pgm(f)?)?;
    }
    Ok(())
}

/// Serializes an unsigned frame as binary P5 with `maxval = 2^bit_depth - 1`.
pub fn encode_pgm(frame: &Frame) -> Result<Vec<u8>> {
    if frame.signed() {
        return Err(Error::Unrepresentable(
            "PGM cannot store signed samples".into(),
        ));
    }
    let maxval = (1u32 << frame.bit_depth()) - 1;
    let mut out = format!("P5\n{} {}\n{}\n", frame.width(), frame.height(), maxval).into_bytes();
    let wide = maxval > 255;
    out.reserve(frame.plane().len() * if wide { 2 } else { 1 });
    for &v in frame.plane().data() {
        if wide {
            out.extend_from_slice(&(v as u16).to_be_bytes());
        } else {
            out.push(v as u8);
        }
    }
    Ok(out)
}

struct Header {
    plain: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let plain = match bytes.get(..2) {
        Some(b"P5") => false,
        Some(b"P2") => true,
        _ => return Err(Error::format("not a PGM file (expected P5 or P2 magic)")),
    };
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::format("truncated PGM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format("malformed PGM header field"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format("PGM header field out of range"))?;
    }
    // exactly one whitespace byte separates the header from binary data
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ if plain => {}
        _ => return Err(Error::format("missing whitespace after PGM maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::format("PGM dimensions must be nonzero"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(format!("PGM maxval {maxval} outside 1..=65535")));
    }
    Ok(Header {
        plain,
        width: width as usize,
        height: height as usize,
        maxval: maxval as u32,
        data_start: pos,
    })
}

/// Bit depth implied by a maxval, never below 8.
fn depth_for_maxval(maxval: u32) -> u8 {
    ((32 - maxval.leading_zeros()) as u8).max(MIN_BIT_DEPTH)
}

/// Parses a P5 or P2 graymap into an unsigned frame.
pub fn decode_pgm(bytes: &[u8]) -> Result<Frame> {
    let h = parse_header(bytes)?;
    let n = h.width * h.height;
    let payload = &bytes[h.data_start..];
    let samples: Vec<i32> = if h.plain {
        let text = std::str::from_utf8(payload).map_err(|_| Error::format("non-ASCII P2 data"))?;
        let vals = text
            .split_ascii_whitespace()
            .map(|t| t.parse::<i32>().map_err(|_| Error::format("bad P2 sample")))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n {
            return Err(Error::format(format!(
                "payload size mismatch: header declares {n} samples, found {}",
                vals.len()
            )));
        }
        vals
    } else {
        let bps = if h.maxval > 255 { 2 } else { 1 };
        if payload.len() != n * bps {
            return Err(Error::format(format!(
                "payload size mismatch: header declares {} bytes, found {}",
                n * bps,
                payload.len()
            )));
        }
        if bps == 1 {
            payload.iter().map(|&b| b as i32).collect()
        } else {
            payload
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as i32)
                .collect()
        }
    };
    if let Some(v) = samples.iter().find(|&&v| v < 0 || v as u32 > h.maxval) {
        return Err(Error::format(format!(
            "sample {v} exceeds maxval {}",
            h.maxval
        )));
    }
    let bit_depth = depth_for_maxval(h.maxval);
    debug_assert!(sample_range(bit_depth, false).1 as u32 >= h.maxval);
    Frame::new(Plane::from_vec(h.width, h.height, samples)?, bit_depth, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_tiny_p5() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 1, 2, 3]);
        let f = decode_pgm(&bytes).unwrap();
        assert_eq!(f.plane(), &Plane::from_rows(&[[0, 1], [2, 3]]));
        assert_eq!(f.bit_depth(), 8);
    }

    #[test]
    fn short_payload_is_an_error() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 1, 2]);
        assert!(matches!(decode_pgm(&bytes), Err(Error::Format(m)) if m.contains("payload size")));
    }

    #[test]
    fn plain_and_comments() {
        let f = decode_pgm(b"P2\n# a comment\n3 1\n# another\n4095\n0 17 4095\n").unwrap();
        assert_eq!(f.plane().data(), &[0, 17, 4095]);
        assert_eq!(f.bit_depth(), 12);
    }

    #[test]
    fn sixteen_bit_is_big_endian() {
        let frame = Frame::new(Plane::from_rows(&[[0x1234]]), 16, false).unwrap();
        let bytes = encode_pgm(&frame).unwrap();
        assert_eq!(&bytes[bytes.len() - 2..], &[0x12, 0x34]);
        assert_eq!(decode_pgm(&bytes).unwrap(), frame);
    }

    #[test]
    fn twelve_bit_roundtrip() {
        let frame = Frame::new(Plane::from_rows(&[[0, 4095], [2048, 1]]), 12, false).unwrap();
        let bytes = encode_pgm(&frame).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n4095\n"));
        assert_eq!(decode_pgm(&bytes).unwrap(), frame);
    }

    #[test]
    fn sample_above_maxval_rejected() {
        let bytes = b"P2\n1 1\n10\n11\n";
        assert!(decode_pgm(bytes).is_err());
    }

    #[test]
    fn stack_naming() {
        let p = pgm_stack_path(Path::new("out/vol"), 7);
        assert_eq!(p, PathBuf::from("out/vol_0007.pgm"));
    }
}
