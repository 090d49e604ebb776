//! Seeded synthetic volumes.
//!
//! Two families are provided. `EllipsoidMotion` renders a smooth elliptical
//! phantom that rotates and zooms from frame to frame, a motion that a
//! translational block model cannot follow exactly. `BlockyResidual` builds
//! frames that are piecewise constant on a `block_size` grid: each block has
//! a static level plus a per-frame DC offset, and every sample carries
//! ±`NOISE_AMPLITUDE` noise. The temporal highpass of such a volume is a
//! blocky residual whose edges sit on the compensation block grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::str::FromStr;

use super::{sample_range, Frame, Volume, MAX_BIT_DEPTH, MIN_BIT_DEPTH};
use crate::error::{Error, Result};
use crate::plane::Plane;

/// Peak noise added to blocky-residual samples, in LSB.
pub const NOISE_AMPLITUDE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhantomKind {
    EllipsoidMotion,
    BlockyResidual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    pub kind: PhantomKind,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    /// Rotation per frame in degrees (ellipsoid only).
    pub rotation_deg: f64,
    /// Isotropic scale factor per frame (ellipsoid only).
    pub zoom: f64,
    /// Grid pitch of the piecewise-constant blocks (blocky only).
    pub block_size: usize,
    /// Unsigned sample depth of the generated volume.
    pub bit_depth: u8,
}

impl PhantomSpec {
    pub fn blocky(width: usize, height: usize, frames: usize, block_size: usize, seed: u64) -> Self {
        PhantomSpec {
            kind: PhantomKind::BlockyResidual,
            width,
            height,
            frames,
            seed,
            rotation_deg: 0.0,
            zoom: 1.0,
            block_size,
            bit_depth: 12,
        }
    }

    pub fn ellipsoid(
        width: usize,
        height: usize,
        frames: usize,
        rotation_deg: f64,
        zoom: f64,
        seed: u64,
    ) -> Self {
        PhantomSpec {
            kind: PhantomKind::EllipsoidMotion,
            width,
            height,
            frames,
            seed,
            rotation_deg,
            zoom,
            block_size: 16,
            bit_depth: 12,
        }
    }
}

/// Parses `kind:WxHxF[,key=value...]`, e.g. `blocky:64x64x8,bs=16,seed=0`
/// or `ellipsoid:96x96x12,rot=2,zoom=1.01`. Keys: `bs`, `seed`, `rot`,
/// `zoom`, `depth`.
impl FromStr for PhantomSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::param(format!("phantom spec '{s}': {m}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected kind:WxHxF".into()))?;
        let mut parts = rest.split(',');
        let dims: Vec<usize> = parts
            .next()
            .unwrap_or("")
            .split('x')
            .map(|d| d.trim().parse().map_err(|_| bad(format!("bad dimension '{d}'"))))
            .collect::<Result<_>>()?;
        let [w, h, f] = dims[..] else {
            return Err(bad("dimensions must be WxHxF".into()));
        };
        let mut spec = match kind.trim() {
            "blocky" | "blocky-residual" => PhantomSpec::blocky(w, h, f, 16, 0),
            "ellipsoid" | "ellipsoid-motion" => PhantomSpec::ellipsoid(w, h, f, 2.0, 1.01, 0),
            k => return Err(bad(format!("unknown kind '{k}'"))),
        };
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{kv}'")))?;
            let v = v.trim();
            let num = |what: &str| bad(format!("bad {what} '{v}'"));
            match k.trim() {
                "bs" => spec.block_size = v.parse().map_err(|_| num("block size"))?,
                "seed" => spec.seed = v.parse().map_err(|_| num("seed"))?,
                "rot" => spec.rotation_deg = v.parse().map_err(|_| num("rotation"))?,
                "zoom" => spec.zoom = v.parse().map_err(|_| num("zoom"))?,
                "depth" => spec.bit_depth = v.parse().map_err(|_| num("bit depth"))?,
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        if !(MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&spec.bit_depth) {
            return Err(bad(format!("bit depth {} unsupported", spec.bit_depth)));
        }
        Ok(spec)
    }
}

pub fn generate_phantom(spec: &PhantomSpec) -> Result<Volume> {
    if spec.width == 0 || spec.height == 0 || spec.frames == 0 {
        return Err(Error::param("phantom dimensions must be nonzero"));
    }
    let planes = match spec.kind {
        PhantomKind::BlockyResidual => blocky(spec)?,
        PhantomKind::EllipsoidMotion => ellipsoid(spec)?,
    };
    let frames = planes
        .into_iter()
        .map(|p| Frame::new(p, spec.bit_depth, false))
        .collect::<Result<Vec<_>>>()?;
    Volume::new(frames)
}

fn blocky(spec: &PhantomSpec) -> Result<Vec<Plane>> {
    if spec.block_size == 0 {
        return Err(Error::param("block size must be nonzero"));
    }
    let (_, maxval) = sample_range(spec.bit_depth, false);
    let mid = (maxval + 1) / 2;
    let level_spread = maxval / 10;
    let dc_spread = (maxval / 32).max(4);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bx = spec.width.div_ceil(spec.block_size);
    let by = spec.height.div_ceil(spec.block_size);
    let levels: Vec<i32> = (0..bx * by)
        .map(|_| rng.gen_range(-level_spread..=level_spread))
        .collect();

    let mut out = Vec::with_capacity(spec.frames);
    for _ in 0..spec.frames {
        let dc: Vec<i32> = levels
            .iter()
            .map(|l| mid + l + rng.gen_range(-dc_spread..=dc_spread))
            .collect();
        let mut plane = Plane::new(spec.width, spec.height);
        for y in 0..spec.height {
            for x in 0..spec.width {
                let b = (y / spec.block_size) * bx + x / spec.block_size;
                let noise = rng.gen_range(-NOISE_AMPLITUDE..=NOISE_AMPLITUDE);
                plane.set(y, x, (dc[b] + noise).clamp(0, maxval));
            }
        }
        out.push(plane);
    }
    Ok(out)
}

fn smoothstep(edge: f64, width: f64, r: f64) -> f64 {
    // 1 inside, 0 outside, cubic transition of the given width around `edge`
    let t = ((edge - r) / width + 0.5).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

struct Blob {
    cx: f64,
    cy: f64,
    ax: f64,
    ay: f64,
    angle: f64,
    amplitude: f64,
}

impl Blob {
    fn eval(&self, u: f64, v: f64, soft: f64) -> f64 {
        let (s, c) = self.angle.sin_cos();
        let du = u - self.cx;
        let dv = v - self.cy;
        let pu = (du * c + dv * s) / self.ax;
        let pv = (-du * s + dv * c) / self.ay;
        let r = (pu * pu + pv * pv).sqrt();
        self.amplitude * smoothstep(1.0, soft / self.ax.min(self.ay), r)
    }
}

fn ellipsoid(spec: &PhantomSpec) -> Result<Vec<Plane>> {
    if !spec.zoom.is_finite() || spec.zoom <= 0.0 || !spec.rotation_deg.is_finite() {
        return Err(Error::param("zoom must be positive and finite"));
    }
    let (_, maxval) = sample_range(spec.bit_depth, false);
    let scale = maxval as f64 / 4095.0;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // phantom coordinates are normalized to [-1, 1] on the shorter axis
    let body = Blob {
        cx: rng.gen_range(-0.05..0.05),
        cy: rng.gen_range(-0.05..0.05),
        ax: rng.gen_range(0.70..0.85),
        ay: rng.gen_range(0.55..0.70),
        angle: rng.gen_range(-0.3..0.3),
        amplitude: 1400.0,
    };
    let mut inner = Vec::new();
    for _ in 0..5 {
        inner.push(Blob {
            cx: rng.gen_range(-0.4..0.4),
            cy: rng.gen_range(-0.3..0.3),
            ax: rng.gen_range(0.08..0.25),
            ay: rng.gen_range(0.08..0.25),
            angle: rng.gen_range(0.0..std::f64::consts::PI),
            amplitude: rng.gen_range(-500.0..900.0),
        });
    }
    let texture_freq = rng.gen_range(9.0..14.0);
    let background = 120.0;

    let half = spec.width.min(spec.height) as f64 / 2.0;
    let cx = (spec.width as f64 - 1.0) / 2.0;
    let cy = (spec.height as f64 - 1.0) / 2.0;
    let soft = 2.0 / half.max(1.0);

    let mut out = Vec::with_capacity(spec.frames);
    for t in 0..spec.frames {
        let theta = (spec.rotation_deg * t as f64).to_radians();
        let zoom = spec.zoom.powi(t as i32);
        let (s, c) = theta.sin_cos();
        let plane = Plane::from_fn(spec.width, spec.height, |y, x| {
            let px = (x as f64 - cx) / half;
            let py = (y as f64 - cy) / half;
            // inverse transform: rotate back and undo the zoom
            let u = (px * c + py * s) / zoom;
            let v = (-px * s + py * c) / zoom;
            let inside = body.eval(u, v, soft) / body.amplitude;
            let mut val = background + body.eval(u, v, soft);
            for b in &inner {
                val += inside * b.eval(u, v, soft);
            }
            val += inside * 120.0 * (texture_freq * u).sin() * (texture_freq * 0.8 * v).cos();
            ((val * scale).round() as i32).clamp(0, maxval)
        });
        out.push(plane);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocky_blocks_are_flat_up_to_noise() {
        let v = generate_phantom(&PhantomSpec::blocky(32, 32, 3, 16, 0)).unwrap();
        for f in v.frames() {
            for by in 0..2 {
                for bx in 0..2 {
                    let vals: Vec<i32> = (0..16)
                        .flat_map(|y| (0..16).map(move |x| (by * 16 + y, bx * 16 + x)))
                        .map(|(y, x)| f.get(y, x))
                        .collect();
                    let lo = *vals.iter().min().unwrap();
                    let hi = *vals.iter().max().unwrap();
                    assert!(hi - lo <= 2 * NOISE_AMPLITUDE, "block spread {}", hi - lo);
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        for spec in [
            PhantomSpec::blocky(40, 24, 4, 16, 9),
            PhantomSpec::ellipsoid(33, 31, 3, 2.5, 1.01, 4),
        ] {
            assert_eq!(generate_phantom(&spec).unwrap(), generate_phantom(&spec).unwrap());
        }
        let a = generate_phantom(&PhantomSpec::blocky(16, 16, 2, 8, 1)).unwrap();
        let b = generate_phantom(&PhantomSpec::blocky(16, 16, 2, 8, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn static_ellipsoid_frames_identical() {
        let v = generate_phantom(&PhantomSpec::ellipsoid(48, 40, 4, 0.0, 1.0, 3)).unwrap();
        for f in &v.frames()[1..] {
            assert_eq!(f, &v.frames()[0]);
        }
    }

    #[test]
    fn moving_ellipsoid_frames_differ() {
        let v = generate_phantom(&PhantomSpec::ellipsoid(48, 48, 2, 3.0, 1.02, 3)).unwrap();
        assert_ne!(v.frames()[0], v.frames()[1]);
    }

    #[test]
    fn spec_strings() {
        let s: PhantomSpec = "blocky:64x32x8,bs=8,seed=3".parse().unwrap();
        assert_eq!(s, PhantomSpec::blocky(64, 32, 8, 8, 3));
        let e: PhantomSpec = "ellipsoid:20x20x4,rot=0,zoom=1,depth=16".parse().unwrap();
        assert_eq!((e.rotation_deg, e.zoom, e.bit_depth), (0.0, 1.0, 16));
        for bad in ["blocky", "cube:4x4x4", "blocky:4x4", "blocky:4x4x4,bs", "blocky:4x4x4,depth=20", "blocky:4x4x4,q=1"] {
            assert!(bad.parse::<PhantomSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(generate_phantom(&PhantomSpec::blocky(0, 8, 1, 4, 0)).is_err());
        assert!(generate_phantom(&PhantomSpec::ellipsoid(8, 8, 0, 0.0, 1.0, 0)).is_err());
    }
}
