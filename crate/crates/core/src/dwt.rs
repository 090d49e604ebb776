//! Reversible integer LeGall 5/3 wavelet, 1-D lifting and dyadic 2-D
//! pyramid.
//!
//! Even samples feed the lowpass, odd samples the highpass, with
//! whole-sample symmetric extension at both ends:
//!
//! ```text
//! d[n] = x[2n+1] - floor((x[2n] + x[2n+2]) / 2)
//! s[n] = x[2n]   + floor((d[n-1] + d[n] + 2) / 4)
//! ```
//!
//! A length-`n` signal yields `ceil(n/2)` lowpass and `floor(n/2)` highpass
//! samples; a single sample passes through as lowpass.

use std::fmt;

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Default number of spatial decompositions.
pub const DEFAULT_LEVELS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    LL,
    /// Horizontal highpass, vertical lowpass: vertical edges, boundary columns.
    HL,
    /// Horizontal lowpass, vertical highpass: horizontal edges, boundary rows.
    LH,
    HH,
}

impl Orientation {
    pub const DETAILS: [Orientation; 3] = [Orientation::HL, Orientation::LH, Orientation::HH];
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::LL => "LL",
            Orientation::HL => "HL",
            Orientation::LH => "LH",
            Orientation::HH => "HH",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subband {
    pub orientation: Orientation,
    /// 1-based decomposition level.
    pub level: usize,
    pub coeffs: Plane,
}

impl Subband {
    pub fn new(orientation: Orientation, level: usize, coeffs: Plane) -> Self {
        Subband {
            orientation,
            level,
            coeffs,
        }
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.orientation, self.level)
    }
}

/// The three detail bands of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetailBands {
    pub hl: Subband,
    pub lh: Subband,
    pub hh: Subband,
}

impl DetailBands {
    pub fn get(&self, o: Orientation) -> &Subband {
        match o {
            Orientation::HL => &self.hl,
            Orientation::LH => &self.lh,
            Orientation::HH => &self.hh,
            Orientation::LL => panic!("LL is not a detail band"),
        }
    }

    pub fn get_mut(&mut self, o: Orientation) -> &mut Subband {
        match o {
            Orientation::HL => &mut self.hl,
            Orientation::LH => &mut self.lh,
            Orientation::HH => &mut self.hh,
            Orientation::LL => panic!("LL is not a detail band"),
        }
    }
}

/// Dyadic decomposition: `LL_d` plus `HL_i`, `LH_i`, `HH_i` for `i = 1..=d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubbandPyramid {
    pub width: usize,
    pub height: usize,
    pub ll: Subband,
    /// `details[i - 1]` holds level `i`.
    pub details: Vec<DetailBands>,
}

impl SubbandPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn band(&self, o: Orientation, level: usize) -> &Subband {
        match o {
            Orientation::LL => &self.ll,
            _ => self.details[level - 1].get(o),
        }
    }

    pub fn band_mut(&mut self, o: Orientation, level: usize) -> &mut Subband {
        match o {
            Orientation::LL => &mut self.ll,
            _ => self.details[level - 1].get_mut(o),
        }
    }

    /// Bands in coding order: `LL_d`, then for `i = d..1`: `HL_i`, `LH_i`, `HH_i`.
    pub fn bands(&self) -> Vec<&Subband> {
        let mut out = vec![&self.ll];
        for d in self.details.iter().rev() {
            out.extend([&d.hl, &d.lh, &d.hh]);
        }
        out
    }

    pub fn bands_mut(&mut self) -> Vec<&mut Subband> {
        let mut out = vec![&mut self.ll];
        for d in self.details.iter_mut().rev() {
            out.extend([&mut d.hl, &mut d.lh, &mut d.hh]);
        }
        out
    }

    pub fn coefficient_count(&self) -> usize {
        self.bands().iter().map(|b| b.coeffs.len()).sum()
    }
}

/// Band dimensions `(width, height)` for every band of a `levels`-deep
/// pyramid over a `width`x`height` frame, in coding order.
pub fn band_shapes(width: usize, height: usize, levels: usize) -> Vec<(Orientation, usize, usize, usize)> {
    let mut dims = Vec::with_capacity(levels);
    let (mut w, mut h) = (width, height);
    for _ in 0..levels {
        dims.push((w, h));
        w = w.div_ceil(2);
        h = h.div_ceil(2);
    }
    let mut out = vec![(Orientation::LL, levels, w, h)];
    for (i, &(pw, ph)) in dims.iter().enumerate().rev() {
        let (lw, hw) = (pw.div_ceil(2), pw / 2);
        let (lh, hh) = (ph.div_ceil(2), ph / 2);
        out.push((Orientation::HL, i + 1, hw, lh));
        out.push((Orientation::LH, i + 1, lw, hh));
        out.push((Orientation::HH, i + 1, hw, hh));
    }
    out
}

/// Largest sensible level count for a frame: `floor(log2(min(w, h)))`,
/// never below 1.
pub fn max_levels(width: usize, height: usize) -> usize {
    let m = width.min(height).max(1);
    (usize::BITS - 1 - m.leading_zeros()).max(1) as usize
}

/// Level count actually used for a frame when `requested` levels are asked for.
pub fn effective_levels(width: usize, height: usize, requested: usize) -> usize {
    requested.clamp(1, max_levels(width, height))
}

/// Forward 1-D lifting.
pub fn forward_1d(x: &[i32]) -> (Vec<i32>, Vec<i32>) {
    let mut buf = x.to_vec();
    let mut tmp = vec![0; x.len()];
    lift_forward(&mut buf, &mut tmp);
    let nl = x.len().div_ceil(2);
    let d = buf.split_off(nl);
    (buf, d)
}

/// Inverse 1-D lifting.
pub fn inverse_1d(s: &[i32], d: &[i32]) -> Vec<i32> {
    assert!(s.len() == d.len() || s.len() == d.len() + 1, "band lengths");
    let mut buf: Vec<i32> = s.iter().chain(d).copied().collect();
    let mut tmp = vec![0; buf.len()];
    lift_inverse(&mut buf, &mut tmp);
    buf
}

/// In-place forward transform: on return `x` holds `[s..., d...]`.
fn lift_forward(x: &mut [i32], tmp: &mut [i32]) {
    let n = x.len();
    if n < 2 {
        return;
    }
    let nl = n.div_ceil(2);
    let nh = n / 2;
    let (s, d) = tmp[..n].split_at_mut(nl);
    for k in 0..nh {
        let left = x[2 * k];
        let right = if 2 * k + 2 < n { x[2 * k + 2] } else { x[2 * k] };
        d[k] = x[2 * k + 1] - ((left + right) >> 1);
    }
    for k in 0..nl {
        let dl = if k > 0 { d[k - 1] } else { d[0] };
        let dr = if k < nh { d[k] } else { d[nh - 1] };
        s[k] = x[2 * k] + ((dl + dr + 2) >> 2);
    }
    x.copy_from_slice(&tmp[..n]);
}

fn lift_inverse(x: &mut [i32], tmp: &mut [i32]) {
    let n = x.len();
    if n < 2 {
        return;
    }
    let nl = n.div_ceil(2);
    let nh = n / 2;
    let (s, d) = x.split_at(nl);
    let out = &mut tmp[..n];
    for k in 0..nl {
        let dl = if k > 0 { d[k - 1] } else { d[0] };
        let dr = if k < nh { d[k] } else { d[nh - 1] };
        out[2 * k] = s[k] - ((dl + dr + 2) >> 2);
    }
    for k in 0..nh {
        let left = out[2 * k];
        let right = if 2 * k + 2 < n { out[2 * k + 2] } else { out[2 * k] };
        out[2 * k + 1] = d[k] + ((left + right) >> 1);
    }
    x.copy_from_slice(out);
}

/// Transforms the top-left `w`x`h` window of `buf` in place: every row, then
/// every column. Afterwards the window holds LL | HL over LH | HH.
fn forward_window(buf: &mut Plane, w: usize, h: usize) {
    let mut line = vec![0; w.max(h)];
    let mut tmp = vec![0; w.max(h)];
    for y in 0..h {
        let row = &mut buf.row_mut(y)[..w];
        lift_forward(row, &mut tmp);
    }
    for x in 0..w {
        for y in 0..h {
            line[y] = buf.get(y, x);
        }
        lift_forward(&mut line[..h], &mut tmp);
        for y in 0..h {
            buf.set(y, x, line[y]);
        }
    }
}

fn inverse_window(buf: &mut Plane, w: usize, h: usize) {
    let mut line = vec![0; w.max(h)];
    let mut tmp = vec![0; w.max(h)];
    for x in 0..w {
        for y in 0..h {
            line[y] = buf.get(y, x);
        }
        lift_inverse(&mut line[..h], &mut tmp);
        for y in 0..h {
            buf.set(y, x, line[y]);
        }
    }
    for y in 0..h {
        let row = &mut buf.row_mut(y)[..w];
        lift_inverse(row, &mut tmp);
    }
}

/// Dyadic forward decomposition with `levels` levels.
pub fn forward_2d(frame: &Plane, levels: usize) -> Result<SubbandPyramid> {
    if levels < 1 {
        return Err(Error::param("at least one decomposition level is required"));
    }
    let mut buf = frame.clone();
    let (mut w, mut h) = (frame.width(), frame.height());
    let mut details = Vec::with_capacity(levels);
    for level in 1..=levels {
        forward_window(&mut buf, w, h);
        let (lw, lh) = (w.div_ceil(2), h.div_ceil(2));
        details.push(DetailBands {
            hl: Subband::new(Orientation::HL, level, buf.crop(0, lw, w - lw, lh)),
            lh: Subband::new(Orientation::LH, level, buf.crop(lh, 0, lw, h - lh)),
            hh: Subband::new(Orientation::HH, level, buf.crop(lh, lw, w - lw, h - lh)),
        });
        w = lw;
        h = lh;
    }
    Ok(SubbandPyramid {
        width: frame.width(),
        height: frame.height(),
        ll: Subband::new(Orientation::LL, levels, buf.crop(0, 0, w, h)),
        details,
    })
}

fn check_shapes(p: &SubbandPyramid) -> Result<()> {
    let shapes = band_shapes(p.width, p.height, p.levels());
    for (band, (o, level, w, h)) in p.bands().into_iter().zip(shapes) {
        if band.orientation != o
            || band.level != level
            || band.coeffs.width() != w
            || band.coeffs.height() != h
        {
            return Err(Error::geometry(format!(
                "band {} is {}x{}, expected {o}{level} {w}x{h}",
                band.name(),
                band.coeffs.width(),
                band.coeffs.height()
            )));
        }
    }
    Ok(())
}

/// Assembles the pyramid into the usual nested quadrant layout.
pub fn to_mallat(p: &SubbandPyramid) -> Result<Plane> {
    check_shapes(p)?;
    let mut buf = Plane::new(p.width, p.height);
    let (mut w, mut h) = (p.width, p.height);
    for d in &p.details {
        let (lw, lh) = (w.div_ceil(2), h.div_ceil(2));
        buf.paste(0, lw, &d.hl.coeffs);
        buf.paste(lh, 0, &d.lh.coeffs);
        buf.paste(lh, lw, &d.hh.coeffs);
        w = lw;
        h = lh;
    }
    buf.paste(0, 0, &p.ll.coeffs);
    Ok(buf)
}

/// Splits a nested quadrant layout back into bands.
pub fn from_mallat(buf: &Plane, levels: usize) -> Result<SubbandPyramid> {
    if levels < 1 {
        return Err(Error::param("at least one decomposition level is required"));
    }
    let (mut w, mut h) = (buf.width(), buf.height());
    let mut details = Vec::with_capacity(levels);
    for level in 1..=levels {
        let (lw, lh) = (w.div_ceil(2), h.div_ceil(2));
        details.push(DetailBands {
            hl: Subband::new(Orientation::HL, level, buf.crop(0, lw, w - lw, lh)),
            lh: Subband::new(Orientation::LH, level, buf.crop(lh, 0, lw, h - lh)),
            hh: Subband::new(Orientation::HH, level, buf.crop(lh, lw, w - lw, h - lh)),
        });
        w = lw;
        h = lh;
    }
    Ok(SubbandPyramid {
        width: buf.width(),
        height: buf.height(),
        ll: Subband::new(Orientation::LL, levels, buf.crop(0, 0, w, h)),
        details,
    })
}

/// Exact inverse of [`forward_2d`].
pub fn inverse_2d(p: &SubbandPyramid) -> Result<Plane> {
    let mut buf = to_mallat(p)?;
    let mut sizes = Vec::with_capacity(p.levels());
    let (mut w, mut h) = (p.width, p.height);
    for _ in 0..p.levels() {
        sizes.push((w, h));
        w = w.div_ceil(2);
        h = h.div_ceil(2);
    }
    for &(w, h) in sizes.iter().rev() {
        inverse_window(&mut buf, w, h);
    }
    Ok(buf)
}
