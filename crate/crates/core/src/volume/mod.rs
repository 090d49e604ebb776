//! Integer image volumes: frame/volume types, file formats and synthetic
//! phantoms.

mod phantom;
mod pgm;
mod raw;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::plane::Plane;

pub use phantom::{generate_phantom, PhantomKind, PhantomSpec, NOISE_AMPLITUDE};
pub use pgm::{decode_pgm, encode_pgm, pgm_stack_path};
pub use raw::sidecar_path;

/// Smallest and largest supported bit depth.
pub const MIN_BIT_DEPTH: u8 = 8;
pub const MAX_BIT_DEPTH: u8 = 16;

/// Inclusive sample range for a bit depth and signedness.
pub fn sample_range(bit_depth: u8, signed: bool) -> (i32, i32) {
    let bd = bit_depth as u32;
    if signed {
        (-(1i32 << (bd - 1)), (1i32 << (bd - 1)) - 1)
    } else {
        (0, (1i32 << bd) - 1)
    }
}

/// One image of a volume: a sample grid plus its declared sample format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    bit_depth: u8,
    signed: bool,
    plane: Plane,
}

impl Frame {
    pub fn new(plane: Plane, bit_depth: u8, signed: bool) -> Result<Self> {
        if !(MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&bit_depth) {
            return Err(Error::param(format!(
                "bit depth {bit_depth} outside {MIN_BIT_DEPTH}..={MAX_BIT_DEPTH}"
            )));
        }
        if plane.width() == 0 || plane.height() == 0 {
            return Err(Error::param("frame dimensions must be at least 1x1"));
        }
        let (lo, hi) = sample_range(bit_depth, signed);
        if let Some(pos) = plane.data().iter().position(|&v| v < lo || v > hi) {
            return Err(Error::format(format!(
                "sample {} at index {pos} outside [{lo}, {hi}]",
                plane.data()[pos]
            )));
        }
        Ok(Frame {
            bit_depth,
            signed,
            plane,
        })
    }

    pub fn width(&self) -> usize {
        self.plane.width()
    }

    pub fn height(&self) -> usize {
        self.plane.height()
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn into_plane(self) -> Plane {
        self.plane
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> i32 {
        self.plane.get(y, x)
    }
}

/// An ordered stack of frames with homogeneous geometry and sample format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Volume {
    frames: Vec<Frame>,
}

impl Volume {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::param("volume needs at least one frame"))?;
        for (i, f) in frames.iter().enumerate().skip(1) {
            if f.width() != first.width()
                || f.height() != first.height()
                || f.bit_depth != first.bit_depth
                || f.signed != first.signed
            {
                return Err(Error::geometry(format!(
                    "frame {i} is {}x{} ({}-bit, signed={}) but frame 0 is {}x{} ({}-bit, signed={})",
                    f.width(),
                    f.height(),
                    f.bit_depth,
                    f.signed,
                    first.width(),
                    first.height(),
                    first.bit_depth,
                    first.signed
                )));
            }
        }
        Ok(Volume { frames })
    }

    /// Wraps raw planes, validating every sample against the declared format.
    pub fn from_planes(planes: Vec<Plane>, bit_depth: u8, signed: bool) -> Result<Self> {
        let frames = planes
            .into_iter()
            .map(|p| Frame::new(p, bit_depth, signed))
            .collect::<Result<Vec<_>>>()?;
        Volume::new(frames)
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn bit_depth(&self) -> u8 {
        self.frames[0].bit_depth
    }

    pub fn signed(&self) -> bool {
        self.frames[0].signed
    }

    pub fn planes(&self) -> Vec<Plane> {
        self.frames.iter().map(|f| f.plane.clone()).collect()
    }
}

/// On-disk volume layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeFormat {
    /// 16-bit little-endian samples, row-major and frame-major, with a
    /// `<file>.hdr` key-value sidecar.
    Raw16Le,
    /// One binary PGM per frame: `<stem>_0000.pgm`, `<stem>_0001.pgm`, ...
    PgmStack,
}

impl FromStr for VolumeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "raw16le" => Ok(VolumeFormat::Raw16Le),
            "pgm" | "pgm-stack" => Ok(VolumeFormat::PgmStack),
            other => Err(Error::param(format!(
                "unknown volume format '{other}' (expected raw16le or pgm-stack)"
            ))),
        }
    }
}

impl fmt::Display for VolumeFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VolumeFormat::Raw16Le => "raw16le",
            VolumeFormat::PgmStack => "pgm-stack",
        })
    }
}

pub fn read_volume(path: impl AsRef<Path>, format: VolumeFormat) -> Result<Volume> {
    match format {
        VolumeFormat::Raw16Le => raw::read(path.as_ref()),
        VolumeFormat::PgmStack => pgm::read_stack(path.as_ref()),
    }
}

pub fn write_volume(v: &Volume, path: impl AsRef<Path>, format: VolumeFormat) -> Result<()> {
    match format {
        VolumeFormat::Raw16Le => raw::write(v, path.as_ref()),
        VolumeFormat::PgmStack => pgm::write_stack(v, path.as_ref()),
    }
}
