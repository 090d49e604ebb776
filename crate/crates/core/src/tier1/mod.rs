//! Code-block entropy coding of subbands.
//!
//! A subband is tiled into `cb_size` square code blocks in raster order
//! (edge blocks truncated), each coded independently by the bitplane coder
//! in [`block`]. On the wire every block is `[K: u8][len: u16 LE][payload]`
//! and the rate of a subband is the total of those records.

mod block;
pub mod rangecoder;

use rayon::prelude::*;

pub use block::{bitplanes, decode_block, encode_block, CodeBlockStream};

use crate::bytes::ByteReader;
use crate::error::{Error, Result};
use crate::motion::BlockRect;
use crate::plane::Plane;

pub const DEFAULT_CB_SIZE: usize = 64;
pub const MIN_CB_SIZE: usize = 4;
pub const MAX_CB_SIZE: usize = 64;
/// K byte plus the 2-byte length field.
pub const BLOCK_HEADER_BYTES: u64 = 3;

pub fn check_cb_size(cb_size: usize) -> Result<()> {
    if !cb_size.is_power_of_two() || !(MIN_CB_SIZE..=MAX_CB_SIZE).contains(&cb_size) {
        return Err(Error::param(format!(
            "code block size {cb_size} must be a power of two in {MIN_CB_SIZE}..={MAX_CB_SIZE}"
        )));
    }
    Ok(())
}

/// Code block rectangles of a `width` x `height` subband in raster order.
/// Number of code blocks `code_blocks` would return, without building them.
pub fn code_block_count(width: usize, height: usize, cb_size: usize) -> u64 {
    (width.div_ceil(cb_size) as u64).saturating_mul(height.div_ceil(cb_size) as u64)
}

pub fn code_blocks(width: usize, height: usize, cb_size: usize) -> Vec<BlockRect> {
    let mut out = Vec::new();
    for y in (0..height).step_by(cb_size) {
        for x in (0..width).step_by(cb_size) {
            out.push(BlockRect {
                y,
                x,
                height: cb_size.min(height - y),
                width: cb_size.min(width - x),
            });
        }
    }
    out
}

pub fn encode_subband(band: &Plane, cb_size: usize) -> Result<Vec<CodeBlockStream>> {
    check_cb_size(cb_size)?;
    let streams: Vec<CodeBlockStream> = code_blocks(band.width(), band.height(), cb_size)
        .par_iter()
        .map(|r| encode_block(&band.crop(r.y, r.x, r.width, r.height)))
        .collect();
    if let Some(s) = streams.iter().find(|s| s.payload.len() > u16::MAX as usize) {
        return Err(Error::Internal(format!(
            "code block payload of {} bytes exceeds the 16-bit length field",
            s.payload.len()
        )));
    }
    Ok(streams)
}

pub fn write_streams(streams: &[CodeBlockStream], out: &mut Vec<u8>) -> Result<()> {
    for s in streams {
        let len = u16::try_from(s.payload.len())
            .map_err(|_| Error::Internal(format!("block payload of {} bytes", s.payload.len())))?;
        out.push(s.k);
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&s.payload);
    }
    Ok(())
}

/// Encodes a subband straight to its serialized block records.
pub fn encode_subband_bytes(band: &Plane, cb_size: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_streams(&encode_subband(band, cb_size)?, &mut out)?;
    Ok(out)
}

/// Reads the block records of one subband and reconstructs it.
pub fn read_subband(r: &mut ByteReader<'_>, width: usize, height: usize, cb_size: usize) -> Result<Plane> {
    check_cb_size(cb_size)?;
    let rects = code_blocks(width, height, cb_size);
    let mut streams = Vec::with_capacity(rects.len());
    for _ in &rects {
        let k = r.u8()?;
        let len = r.u16_le()? as usize;
        streams.push(CodeBlockStream {
            k,
            payload: r.take(len)?.to_vec(),
        });
    }
    let blocks = rects
        .par_iter()
        .zip(&streams)
        .map(|(rect, s)| decode_block(s, rect.width, rect.height))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Plane::new(width, height);
    for (rect, b) in rects.iter().zip(&blocks) {
        out.paste(rect.y, rect.x, b);
    }
    Ok(out)
}

/// Serialized size of the subband in bytes.
pub fn subband_rate(band: &Plane, cb_size: usize) -> Result<u64> {
    Ok(encode_subband(band, cb_size)?
        .iter()
        .map(|s| s.payload.len() as u64 + BLOCK_HEADER_BYTES)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> Plane {
        Plane::from_fn(w, h, |y, x| ((y * 31 + x * 17) % 23) as i32 - 11)
    }

    #[test]
    fn tiling() {
        let r = code_blocks(70, 64, 32);
        assert_eq!(r.len(), 6);
        assert_eq!(r[2], BlockRect { y: 0, x: 64, height: 32, width: 6 });
        assert_eq!(code_blocks(64, 64, 64).len(), 1);
        let area: usize = code_blocks(13, 7, 4).iter().map(|r| r.width * r.height).sum();
        assert_eq!(area, 91);
    }

    #[test]
    fn zero_subband_costs_header_only() {
        for cb in [4, 16, 64] {
            let n = code_blocks(40, 24, cb).len() as u64;
            assert_eq!(subband_rate(&Plane::new(40, 24), cb).unwrap(), 3 * n);
        }
    }

    #[test]
    fn rate_matches_serialized_length_and_is_additive() {
        let p = textured(70, 33);
        let bytes = encode_subband_bytes(&p, 16).unwrap();
        assert_eq!(bytes.len() as u64, subband_rate(&p, 16).unwrap());
        let sum: u64 = code_blocks(70, 33, 16)
            .iter()
            .map(|r| encode_block(&p.crop(r.y, r.x, r.width, r.height)).payload.len() as u64 + 3)
            .sum();
        assert_eq!(sum, bytes.len() as u64);
        assert_eq!(subband_rate(&p, 16).unwrap(), subband_rate(&p, 16).unwrap());
    }

    #[test]
    fn subband_roundtrip_and_truncation() {
        let p = textured(45, 50);
        let bytes = encode_subband_bytes(&p, 32).unwrap();
        let mut r = ByteReader::new(&bytes);
        assert_eq!(read_subband(&mut r, 45, 50, 32).unwrap(), p);
        assert_eq!(r.remaining(), 0);
        let mut r = ByteReader::new(&bytes[..bytes.len() - 1]);
        assert!(read_subband(&mut r, 45, 50, 32).is_err());
    }

    #[test]
    fn cb_size_limits() {
        for bad in [0, 2, 3, 48, 128] {
            assert!(check_cb_size(bad).is_err());
        }
        for good in [4, 8, 16, 32, 64] {
            check_cb_size(good).unwrap();
        }
    }
}
