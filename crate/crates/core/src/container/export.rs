//! Export of HP-frame coefficient planes for external coders.
//!
//! Each HP frame `n` (counted across temporal levels, finest first) yields
//! `hp_NNNN_sorted.pgm` and `hp_NNNN_unsorted.pgm`: the spatial
//! decomposition in nested-quadrant layout, stored as 16-bit PGM with
//! `COEFF_OFFSET` added to every coefficient. `hp_NNNN.txt` records the
//! geometry and the re-sort plan so the sorted image can be mapped back.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{decide, temporal_decomposition, EncoderConfig};
use crate::dwt::{effective_levels, forward_2d, from_mallat, to_mallat, SubbandPyramid};
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::resort::{apply_plan, invert_plan, ResortParams, ResortPlan};
use crate::volume::{decode_pgm, encode_pgm, Frame, Volume};

pub const COEFF_OFFSET: i32 = 32768;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportedFrame {
    pub index: usize,
    pub sorted: PathBuf,
    pub unsorted: PathBuf,
    pub sidecar: PathBuf,
    pub plan: ResortPlan,
}

fn offset_pgm(p: &Plane) -> Result<Vec<u8>> {
    if let Some(v) = p
        .data()
        .iter()
        .find(|&&v| !(-COEFF_OFFSET..=u16::MAX as i32 - COEFF_OFFSET).contains(&v))
    {
        return Err(Error::Unrepresentable(format!(
            "coefficient {v} does not fit a 16-bit offset image"
        )));
    }
    let shifted = Plane::from_vec(p.width(), p.height(), p.data().iter().map(|v| v + COEFF_OFFSET).collect())?;
    encode_pgm(&Frame::new(shifted, 16, false)?)
}

fn sidecar_text(pyr: &SubbandPyramid, config: &EncoderConfig, level: usize, plan: &ResortPlan) -> String {
    let mut s = format!(
        "width={}\nheight={}\nlevels={}\nblock_size={}\ntemporal_level={}\nmode={}\noffset={}\nany_resort={}\n",
        pyr.width,
        pyr.height,
        pyr.levels(),
        config.block_size,
        level,
        config.mode,
        COEFF_OFFSET,
        plan.any_resort() as u8
    );
    for d in &plan.decisions {
        s += &format!("{}{}={}\n", d.orientation, d.level, d.resort as u8);
    }
    s
}

/// Writes sorted and unsorted planes plus a plan sidecar per HP frame.
pub fn export_planes(v: &Volume, config: &EncoderConfig, dir: impl AsRef<Path>) -> Result<Vec<ExportedFrame>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let decomposition = temporal_decomposition(v, config)?;
    let levels = effective_levels(v.width(), v.height(), config.spatial_levels);
    let params = config.resort_params()?;
    let mut out = Vec::new();
    for (l, level) in decomposition.levels.iter().enumerate() {
        for hp in &level.hp {
            let index = out.len();
            let pyramid = forward_2d(hp, levels)?;
            let plan = decide(&pyramid, config)?.unwrap_or_else(|| ResortPlan::none(&params.candidates(levels)));
            let sorted = apply_plan(&pyramid, &plan, &params)?;
            let f = ExportedFrame {
                index,
                sorted: dir.join(format!("hp_{index:04}_sorted.pgm")),
                unsorted: dir.join(format!("hp_{index:04}_unsorted.pgm")),
                sidecar: dir.join(format!("hp_{index:04}.txt")),
                plan,
            };
            fs::write(&f.unsorted, offset_pgm(&to_mallat(&pyramid)?)?)?;
            fs::write(&f.sorted, offset_pgm(&to_mallat(&sorted)?)?)?;
            fs::write(&f.sidecar, sidecar_text(&pyramid, config, l + 1, &f.plan))?;
            out.push(f);
        }
    }
    Ok(out)
}

/// Reads an exported sorted plane and its sidecar back into the original
/// (unsorted) pyramid.
pub fn import_planes(sorted: impl AsRef<Path>, sidecar: impl AsRef<Path>) -> Result<(SubbandPyramid, ResortPlan)> {
    let text = fs::read_to_string(sidecar)?;
    let kv: HashMap<&str, &str> = text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim(), v.trim()))
        .collect();
    let num = |k: &str| -> Result<usize> {
        kv.get(k)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::format(format!("sidecar lacks numeric '{k}'")))
    };
    let (width, height, levels, bs) = (num("width")?, num("height")?, num("levels")?, num("block_size")?);
    let params = ResortParams::new(bs, Default::default())?;
    let candidates = params.candidates(levels);
    let bits = candidates
        .iter()
        .map(|(o, l)| num(&format!("{o}{l}")).map(|b| b == 1))
        .collect::<Result<Vec<_>>>()?;
    let plan = ResortPlan::from_bits(&candidates, &bits);

    let frame = decode_pgm(&fs::read(sorted)?)?;
    if frame.width() != width || frame.height() != height || frame.bit_depth() != 16 {
        return Err(Error::format("exported image does not match its sidecar"));
    }
    let plane = Plane::from_vec(width, height, frame.plane().data().iter().map(|v| v - COEFF_OFFSET).collect())?;
    let pyramid = invert_plan(&from_mallat(&plane, levels)?, &plan, &params)?;
    Ok((pyramid, plan))
}
