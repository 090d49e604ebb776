//! `LC5W` container: encode and decode whole volumes.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! header   "LC5W" version:u8 width:u32 height:u32 frames:u32
//!          bit_depth:u8 signed:u8 bs:u8 search:u8
//!          temporal_levels:u8 spatial_levels:u8 cb_size_log2:u8 mode:u8
//!          thresholds: 9 x u16 (x1000; HL1 LH1 HH1 HL2 ... HH3)
//! records  for each temporal level (finest first): its HP frames,
//!          then the final LP frames
//! HP       kind=0, motion prev, motion next (i8 dy, i8 dx per block),
//!          signaling (only when mode != none), subbands
//! LP       kind=1, subbands
//! ```
//!
//! Signaling is MSB-first: one "any band re-sorted" bit, followed, only when
//! it is set, by one bit per candidate band (HL1, LH1, HH1, HL2, ...), padded
//! to a byte. Subbands are coded LL, then levels coarse to fine as HL, LH,
//! HH, each as a run of code-block records. Spatial level count, candidate
//! set and temporal structure are derived from the header geometry.

pub mod export;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bytes::ByteReader;
use crate::dwt::{band_shapes, effective_levels, forward_2d, inverse_2d, Orientation, SubbandPyramid};
use crate::error::{Error, Result};
use crate::motion::{MotionField, MotionVector};
use crate::plane::Plane;
use crate::resort::{apply_plan, decide_lc, decide_opt, invert_plan, ResortParams, ResortPlan, Thresholds};
use crate::temporal::{self, HpMotion, TemporalDecomposition, TemporalLevel, TemporalParams};
use crate::tier1::{self, code_block_count, encode_subband_bytes, read_subband, subband_rate};
use crate::volume::{Volume, MAX_BIT_DEPTH, MIN_BIT_DEPTH};

pub const MAGIC: &[u8; 4] = b"LC5W";
pub const VERSION: u8 = 1;
pub const HEADER_BYTES: usize = 43;
pub const MAX_SEARCH_RANGE: u32 = 127;
pub const MAX_BLOCK_SIZE: usize = 128;

const KIND_HP: u8 = 0;
const KIND_LP: u8 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DecisionMode {
    /// Never re-sort; no signaling is written.
    None,
    /// Threshold decision on the boundary/neighbor quotient.
    Lc,
    /// Code both orders and keep the smaller.
    #[default]
    Opt,
}

impl DecisionMode {
    pub const ALL: [DecisionMode; 3] = [DecisionMode::None, DecisionMode::Opt, DecisionMode::Lc];

    pub fn code(self) -> u8 {
        match self {
            DecisionMode::None => 0,
            DecisionMode::Lc => 1,
            DecisionMode::Opt => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(DecisionMode::None),
            1 => Ok(DecisionMode::Lc),
            2 => Ok(DecisionMode::Opt),
            _ => Err(Error::corrupt(format!("unknown decision mode {c}"))),
        }
    }
}

impl FromStr for DecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(DecisionMode::None),
            "lc" => Ok(DecisionMode::Lc),
            "opt" => Ok(DecisionMode::Opt),
            _ => Err(Error::param(format!("unknown mode '{s}' (none, lc, opt)"))),
        }
    }
}

impl fmt::Display for DecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionMode::None => "none",
            DecisionMode::Lc => "lc",
            DecisionMode::Opt => "opt",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncoderConfig {
    pub block_size: usize,
    pub search_range: u32,
    pub temporal_levels: usize,
    /// Requested spatial levels; small frames use fewer.
    pub spatial_levels: usize,
    pub cb_size: usize,
    pub mode: DecisionMode,
    pub thresholds: Thresholds,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            block_size: 16,
            search_range: 15,
            temporal_levels: 1,
            spatial_levels: crate::dwt::DEFAULT_LEVELS,
            cb_size: tier1::DEFAULT_CB_SIZE,
            mode: DecisionMode::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl EncoderConfig {
    pub fn with_mode(mut self, mode: DecisionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.block_size.is_power_of_two() || !(2..=MAX_BLOCK_SIZE).contains(&self.block_size) {
            return Err(Error::param(format!(
                "block size {} must be a power of two in 2..={MAX_BLOCK_SIZE}",
                self.block_size
            )));
        }
        if self.search_range > MAX_SEARCH_RANGE {
            return Err(Error::param(format!(
                "search range {} exceeds {MAX_SEARCH_RANGE}",
                self.search_range
            )));
        }
        if !(1..=255).contains(&self.temporal_levels) || !(1..=255).contains(&self.spatial_levels) {
            return Err(Error::param("level counts must lie in 1..=255"));
        }
        tier1::check_cb_size(self.cb_size)
    }

    pub fn resort_params(&self) -> Result<ResortParams> {
        ResortParams::new(self.block_size, self.thresholds)
    }

    pub fn temporal_params(&self) -> TemporalParams {
        TemporalParams {
            block_size: self.block_size,
            search_range: self.search_range,
            levels: self.temporal_levels,
            update: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub bit_depth: u8,
    pub signed: bool,
    pub config: EncoderConfig,
}

impl ContainerHeader {
    /// Spatial levels actually applied.
    pub fn spatial_levels(&self) -> usize {
        effective_levels(self.width, self.height, self.config.spatial_levels)
    }

    pub fn candidates(&self) -> Result<Vec<(Orientation, usize)>> {
        Ok(self.config.resort_params()?.candidates(self.spatial_levels()))
    }

    pub fn write(&self, out: &mut Vec<u8>) -> Result<()> {
        let c = &self.config;
        let u32_of = |v: usize, what: &str| {
            u32::try_from(v).map_err(|_| Error::Unrepresentable(format!("{what} {v} exceeds 32 bits")))
        };
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&u32_of(self.width, "width")?.to_le_bytes());
        out.extend_from_slice(&u32_of(self.height, "height")?.to_le_bytes());
        out.extend_from_slice(&u32_of(self.frames, "frame count")?.to_le_bytes());
        out.extend_from_slice(&[
            self.bit_depth,
            self.signed as u8,
            c.block_size as u8,
            c.search_range as u8,
            c.temporal_levels as u8,
            c.spatial_levels as u8,
            c.cb_size.trailing_zeros() as u8,
            c.mode.code(),
        ]);
        for t in c.thresholds.to_table() {
            out.extend_from_slice(&t.to_le_bytes());
        }
        Ok(())
    }

    pub fn read(r: &mut ByteReader<'_>) -> Result<Self> {
        if r.take(4).map_err(|_| Error::format("file too short for a container"))? != MAGIC {
            return Err(Error::format("bad magic, not an LC5W container"));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::format(format!("unsupported container version {version}")));
        }
        let width = r.u32_le()? as usize;
        let height = r.u32_le()? as usize;
        let frames = r.u32_le()? as usize;
        let f = r.take(8)?;
        let mut table = [0u16; 9];
        for t in &mut table {
            *t = r.u16_le()?;
        }
        let bad = |m: String| Error::corrupt(m);
        if width == 0 || height == 0 || frames == 0 {
            return Err(bad(format!("empty geometry {width}x{height}x{frames}")));
        }
        if !(MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&f[0]) || f[1] > 1 {
            return Err(bad(format!("bad sample format depth={} signed={}", f[0], f[1])));
        }
        if f[6] > 7 {
            return Err(bad(format!("bad code block size exponent {}", f[6])));
        }
        let config = EncoderConfig {
            block_size: f[2] as usize,
            search_range: f[3] as u32,
            temporal_levels: f[4] as usize,
            spatial_levels: f[5] as usize,
            cb_size: 1 << f[6],
            mode: DecisionMode::from_code(f[7])?,
            thresholds: Thresholds::from_table(table).map_err(|e| bad(e.to_string()))?,
        };
        config.validate().map_err(|e| bad(e.to_string()))?;
        Ok(ContainerHeader {
            width,
            height,
            frames,
            bit_depth: f[0],
            signed: f[1] == 1,
            config,
        })
    }
}

/// Per-HP-frame accounting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameStats {
    /// 1-based temporal level and index within it.
    pub temporal_level: usize,
    pub index: usize,
    /// `None` when the mode makes no decision.
    pub plan: Option<ResortPlan>,
    pub payload_bytes: u64,
    pub signaling_bytes: u64,
    pub motion_bytes: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub total_bytes: u64,
    /// Code-block records of HP frames, signaling excluded.
    pub hp_payload_bytes: u64,
    pub lp_payload_bytes: u64,
    pub signaling_bytes: u64,
    pub motion_bytes: u64,
    pub hp_frames: Vec<FrameStats>,
}

impl EncodeStats {
    pub fn resorted_bands(&self) -> usize {
        self.hp_frames
            .iter()
            .filter_map(|f| f.plan.as_ref())
            .map(|p| p.resorted_count())
            .sum()
    }
}

/// Packs the signaling bits of one frame.
pub fn signaling_bytes(plan: &ResortPlan) -> Vec<u8> {
    let mut bits = vec![plan.any_resort()];
    if plan.any_resort() {
        bits.extend(plan.bits());
    }
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |b, (i, &bit)| b | ((bit as u8) << (7 - i))))
        .collect()
}

fn read_signaling(r: &mut ByteReader<'_>, candidates: &[(Orientation, usize)]) -> Result<ResortPlan> {
    let first = r.u8()?;
    if first & 0x80 == 0 {
        if first != 0 {
            return Err(Error::corrupt("nonzero signaling padding"));
        }
        return Ok(ResortPlan::none(candidates));
    }
    let nbits = 1 + candidates.len();
    let mut bytes = vec![first];
    bytes.extend_from_slice(r.take(nbits.div_ceil(8) - 1)?);
    let bit = |i: usize| bytes[i / 8] & (0x80 >> (i % 8)) != 0;
    if (nbits..bytes.len() * 8).any(bit) {
        return Err(Error::corrupt("nonzero signaling padding"));
    }
    let bits: Vec<bool> = (1..nbits).map(bit).collect();
    let plan = ResortPlan::from_bits(candidates, &bits);
    if !plan.any_resort() {
        return Err(Error::corrupt("signaling announces re-sorting but selects no band"));
    }
    Ok(plan)
}

fn write_motion(mf: &MotionField, out: &mut Vec<u8>) {
    for v in mf.vectors() {
        out.push(v.dy as i8 as u8);
        out.push(v.dx as i8 as u8);
    }
}

fn read_motion(r: &mut ByteReader<'_>, h: &ContainerHeader) -> Result<MotionField> {
    let bs = h.config.block_size;
    let n = h.width.div_ceil(bs) * h.height.div_ceil(bs);
    let raw = r.take(2 * n)?;
    let range = h.config.search_range as i32;
    let vectors = raw
        .chunks(2)
        .map(|c| {
            let v = MotionVector::new(c[0] as i8 as i32, c[1] as i8 as i32);
            if v.dy.abs() > range || v.dx.abs() > range {
                Err(Error::corrupt(format!("vector ({}, {}) outside search range", v.dy, v.dx)))
            } else {
                Ok(v)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    MotionField::from_vectors(h.width, h.height, bs, h.config.search_range, vectors)
}

fn write_pyramid(p: &SubbandPyramid, cb_size: usize, out: &mut Vec<u8>) -> Result<u64> {
    let start = out.len();
    let encoded = p
        .bands()
        .par_iter()
        .map(|b| encode_subband_bytes(&b.coeffs, cb_size))
        .collect::<Result<Vec<_>>>()?;
    for e in encoded {
        out.extend_from_slice(&e);
    }
    Ok((out.len() - start) as u64)
}

fn read_pyramid(r: &mut ByteReader<'_>, h: &ContainerHeader) -> Result<SubbandPyramid> {
    let levels = h.spatial_levels();
    let mut p = forward_2d(&Plane::new(h.width, h.height), levels)?;
    for (band, (_, _, w, hh)) in p.bands_mut().into_iter().zip(band_shapes(h.width, h.height, levels)) {
        band.coeffs = read_subband(r, w, hh, h.config.cb_size)?;
    }
    Ok(p)
}

/// Decision for one HP frame under the configured mode.
pub fn decide(pyramid: &SubbandPyramid, config: &EncoderConfig) -> Result<Option<ResortPlan>> {
    let params = config.resort_params()?;
    match config.mode {
        DecisionMode::None => Ok(None),
        DecisionMode::Lc => decide_lc(pyramid, &params).map(Some),
        DecisionMode::Opt => decide_opt(pyramid, &params, |sb| subband_rate(&sb.coeffs, config.cb_size)).map(Some),
    }
}

fn encode_hp(hp: &Plane, motion: &HpMotion, levels: usize, config: &EncoderConfig) -> Result<(Vec<u8>, FrameStats)> {
    let pyramid = forward_2d(hp, levels)?;
    let plan = decide(&pyramid, config)?;
    let mut out = vec![KIND_HP];
    write_motion(&motion.prev, &mut out);
    write_motion(&motion.next, &mut out);
    let motion_bytes = (out.len() - 1) as u64;
    let mut signaling = 0;
    let coded = match &plan {
        Some(plan) => {
            let s = signaling_bytes(plan);
            signaling = s.len() as u64;
            out.extend_from_slice(&s);
            apply_plan(&pyramid, plan, &config.resort_params()?)?
        }
        None => pyramid,
    };
    let payload_bytes = write_pyramid(&coded, config.cb_size, &mut out)?;
    Ok((
        out,
        FrameStats {
            temporal_level: 0,
            index: 0,
            plan,
            payload_bytes,
            signaling_bytes: signaling,
            motion_bytes,
        },
    ))
}

/// Temporal decomposition used by the encoder for `v` under `config`.
pub fn temporal_decomposition(v: &Volume, config: &EncoderConfig) -> Result<TemporalDecomposition> {
    config.validate()?;
    temporal::forward(v, &config.temporal_params())
}

pub fn encode(v: &Volume, config: &EncoderConfig) -> Result<Vec<u8>> {
    encode_with_stats(v, config).map(|(b, _)| b)
}

pub fn encode_with_stats(v: &Volume, config: &EncoderConfig) -> Result<(Vec<u8>, EncodeStats)> {
    let decomposition = temporal_decomposition(v, config)?;
    let header = ContainerHeader {
        width: v.width(),
        height: v.height(),
        frames: v.frame_count(),
        bit_depth: v.bit_depth(),
        signed: v.signed(),
        config: *config,
    };
    let levels = header.spatial_levels();
    let mut out = Vec::new();
    header.write(&mut out)?;

    let jobs: Vec<(usize, usize, &Plane, &HpMotion)> = decomposition
        .levels
        .iter()
        .enumerate()
        .flat_map(|(l, level)| {
            level
                .hp
                .iter()
                .zip(&level.motion)
                .enumerate()
                .map(move |(i, (hp, m))| (l + 1, i, hp, m))
        })
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(l, i, hp, m)| {
            encode_hp(hp, m, levels, config).map(|(bytes, mut s)| {
                s.temporal_level = l;
                s.index = i;
                (bytes, s)
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut stats = EncodeStats::default();
    for (bytes, s) in records {
        out.extend_from_slice(&bytes);
        stats.hp_payload_bytes += s.payload_bytes;
        stats.signaling_bytes += s.signaling_bytes;
        stats.motion_bytes += s.motion_bytes;
        stats.hp_frames.push(s);
    }
    let lp = decomposition
        .lp
        .par_iter()
        .map(|f| {
            let mut rec = vec![KIND_LP];
            write_pyramid(&forward_2d(f, levels)?, config.cb_size, &mut rec)?;
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    for rec in lp {
        stats.lp_payload_bytes += rec.len() as u64 - 1;
        out.extend_from_slice(&rec);
    }
    stats.total_bytes = out.len() as u64;
    Ok((out, stats))
}

pub fn read_header(bytes: &[u8]) -> Result<ContainerHeader> {
    ContainerHeader::read(&mut ByteReader::new(bytes))
}

/// Rejects headers whose geometry needs more bytes than the file holds,
/// before any frame buffers are allocated.
fn check_plausible(h: &ContainerHeader, available: usize) -> Result<()> {
    let levels = h.spatial_levels();
    let blocks: u64 = band_shapes(h.width, h.height, levels)
        .iter()
        .map(|&(_, _, w, hh)| code_block_count(w, hh, h.config.cb_size))
        .fold(0u64, u64::saturating_add);
    let per_frame = blocks.saturating_mul(3).saturating_add(1);
    // every frame yields exactly one record
    if per_frame.saturating_mul(h.frames as u64) > available as u64 {
        return Err(Error::corrupt(format!(
            "header describes {}x{}x{} samples but only {available} bytes follow",
            h.width, h.height, h.frames
        )));
    }
    Ok(())
}

pub fn decode(bytes: &[u8]) -> Result<Volume> {
    let mut r = ByteReader::new(bytes);
    let h = ContainerHeader::read(&mut r)?;
    check_plausible(&h, r.remaining())?;
    let candidates = h.candidates()?;
    let params = h.config.resort_params()?;
    let counts = temporal::level_frame_counts(h.frames, h.config.temporal_levels);

    let mut levels = Vec::with_capacity(counts.len());
    for &count in &counts {
        let mut hp = Vec::new();
        let mut motion = Vec::new();
        for _ in 0..temporal::hp_count(count) {
            if r.u8()? != KIND_HP {
                return Err(Error::corrupt("expected a highpass frame record"));
            }
            let prev = read_motion(&mut r, &h)?;
            let next = read_motion(&mut r, &h)?;
            let plan = if h.config.mode == DecisionMode::None {
                None
            } else {
                Some(read_signaling(&mut r, &candidates)?)
            };
            let mut p = read_pyramid(&mut r, &h)?;
            if let Some(plan) = plan {
                p = invert_plan(&p, &plan, &params)?;
            }
            hp.push(inverse_2d(&p)?);
            motion.push(HpMotion { prev, next });
        }
        levels.push(TemporalLevel {
            frame_count: count,
            hp,
            motion,
        });
    }
    let mut lp = Vec::new();
    for _ in 0..temporal::lp_count(*counts.last().unwrap()) {
        if r.u8()? != KIND_LP {
            return Err(Error::corrupt("expected a lowpass frame record"));
        }
        lp.push(inverse_2d(&read_pyramid(&mut r, &h)?)?);
    }
    if r.remaining() != 0 {
        return Err(Error::corrupt(format!("{} trailing bytes after last record", r.remaining())));
    }
    let planes = temporal::inverse(&TemporalDecomposition {
        levels,
        lp,
        update: true,
        original_frame_count: h.frames,
    })?;
    Volume::from_planes(planes, h.bit_depth, h.signed).map_err(|e| match e {
        Error::Format(m) => Error::corrupt(m),
        e => e,
    })
}
