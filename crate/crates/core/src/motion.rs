//! Full-search block motion estimation and block-based compensation.
//!
//! The current frame is tiled into `block_size` squares (edge blocks are
//! truncated). Every block gets one integer displacement into the reference
//! frame. Candidates that would move any part of the block outside the
//! reference are never considered, so `compensate` needs no edge extension.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plane::Plane;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MotionVector {
    pub dy: i32,
    pub dx: i32,
}

impl MotionVector {
    pub const ZERO: MotionVector = MotionVector { dy: 0, dx: 0 };

    pub fn new(dy: i32, dx: i32) -> Self {
        MotionVector { dy, dx }
    }

    /// Ordering key used to break SAD ties: shortest L1 length first, then
    /// smallest `dy`, then smallest `dx`.
    fn tie_key(self) -> (u32, i32, i32) {
        (self.dy.unsigned_abs() + self.dx.unsigned_abs(), self.dy, self.dx)
    }
}

/// Rectangle covered by one block of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockRect {
    pub y: usize,
    pub x: usize,
    pub height: usize,
    pub width: usize,
}

/// Per-block displacement vectors for one (current, reference) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotionField {
    block_size: usize,
    search_range: u32,
    width: usize,
    height: usize,
    blocks_x: usize,
    blocks_y: usize,
    vectors: Vec<MotionVector>,
}

impl MotionField {
    /// All-zero field covering a `width`x`height` frame.
    pub fn zero(width: usize, height: usize, block_size: usize, search_range: u32) -> Self {
        let blocks_x = width.div_ceil(block_size);
        let blocks_y = height.div_ceil(block_size);
        MotionField {
            block_size,
            search_range,
            width,
            height,
            blocks_x,
            blocks_y,
            vectors: vec![MotionVector::ZERO; blocks_x * blocks_y],
        }
    }

    /// Builds a field from explicit vectors in block raster order.
    pub fn from_vectors(
        width: usize,
        height: usize,
        block_size: usize,
        search_range: u32,
        vectors: Vec<MotionVector>,
    ) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::param("block size must be nonzero"));
        }
        let mut mf = MotionField::zero(width, height, block_size, search_range);
        if vectors.len() != mf.vectors.len() {
            return Err(Error::geometry(format!(
                "{}x{} frame with block size {block_size} needs {} vectors, got {}",
                width,
                height,
                mf.vectors.len(),
                vectors.len()
            )));
        }
        if let Some(v) = vectors
            .iter()
            .find(|v| v.dy.unsigned_abs() > search_range || v.dx.unsigned_abs() > search_range)
        {
            return Err(Error::param(format!(
                "vector ({}, {}) exceeds search range {search_range}",
                v.dy, v.dx
            )));
        }
        mf.vectors = vectors;
        Ok(mf)
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn search_range(&self) -> u32 {
        self.search_range
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn blocks_x(&self) -> usize {
        self.blocks_x
    }

    pub fn blocks_y(&self) -> usize {
        self.blocks_y
    }

    pub fn vectors(&self) -> &[MotionVector] {
        &self.vectors
    }

    pub fn vector(&self, by: usize, bx: usize) -> MotionVector {
        self.vectors[by * self.blocks_x + bx]
    }

    pub fn block_rect(&self, index: usize) -> BlockRect {
        block_rect(self.width, self.height, self.block_size, index)
    }

    fn check_geometry(&self, plane: &Plane) -> Result<()> {
        if plane.width() != self.width || plane.height() != self.height {
            return Err(Error::geometry(format!(
                "motion field covers {}x{}, frame is {}x{}",
                self.width,
                self.height,
                plane.width(),
                plane.height()
            )));
        }
        Ok(())
    }
}

fn block_rect(width: usize, height: usize, bs: usize, index: usize) -> BlockRect {
    let bx_count = width.div_ceil(bs);
    let (by, bx) = (index / bx_count, index % bx_count);
    let (y, x) = (by * bs, bx * bs);
    BlockRect {
        y,
        x,
        height: bs.min(height - y),
        width: bs.min(width - x),
    }
}

fn in_bounds(r: BlockRect, v: MotionVector, width: usize, height: usize) -> bool {
    let y0 = r.y as i64 + v.dy as i64;
    let x0 = r.x as i64 + v.dx as i64;
    y0 >= 0 && x0 >= 0 && y0 + r.height as i64 <= height as i64 && x0 + r.width as i64 <= width as i64
}

/// Sum of absolute differences between a block of `cur` and the displaced
/// block of `reference`. Stops early once `limit` is exceeded.
pub fn block_sad(cur: &Plane, reference: &Plane, r: BlockRect, v: MotionVector, limit: u64) -> u64 {
    let ry = (r.y as i64 + v.dy as i64) as usize;
    let rx = (r.x as i64 + v.dx as i64) as usize;
    let mut sad = 0u64;
    for row in 0..r.height {
        let a = &cur.row(r.y + row)[r.x..r.x + r.width];
        let b = &reference.row(ry + row)[rx..rx + r.width];
        sad += a
            .iter()
            .zip(b)
            .map(|(&p, &q)| (p as i64 - q as i64).unsigned_abs())
            .sum::<u64>();
        if sad > limit {
            break;
        }
    }
    sad
}

/// Exhaustive block matching: every block gets the in-bounds vector in
/// `[-search_range, search_range]²` with minimal SAD.
pub fn estimate(
    current: &Plane,
    reference: &Plane,
    block_size: usize,
    search_range: u32,
) -> Result<MotionField> {
    if !current.same_shape(reference) {
        return Err(Error::geometry(format!(
            "current {}x{} vs reference {}x{}",
            current.width(),
            current.height(),
            reference.width(),
            reference.height()
        )));
    }
    if block_size < 2 {
        return Err(Error::param("block size must be at least 2"));
    }
    if block_size > current.width() || block_size > current.height() {
        return Err(Error::param(format!(
            "block size {block_size} larger than {}x{} frame",
            current.width(),
            current.height()
        )));
    }
    let (w, h) = (current.width(), current.height());
    let mut mf = MotionField::zero(w, h, block_size, search_range);
    let range = search_range as i32;

    mf.vectors = (0..mf.vectors.len())
        .into_par_iter()
        .map(|i| {
            let r = block_rect(w, h, block_size, i);
            let mut best = MotionVector::ZERO;
            let mut best_sad = block_sad(current, reference, r, best, u64::MAX);
            for dy in -range..=range {
                for dx in -range..=range {
                    let v = MotionVector::new(dy, dx);
                    if v == MotionVector::ZERO || !in_bounds(r, v, w, h) {
                        continue;
                    }
                    let sad = block_sad(current, reference, r, v, best_sad);
                    if sad < best_sad || (sad == best_sad && v.tie_key() < best.tie_key()) {
                        best = v;
                        best_sad = sad;
                    }
                }
            }
            best
        })
        .collect();
    Ok(mf)
}

/// Block-wise warp of `reference`: `p[y][x] = reference[y + dy][x + dx]`
/// with the vector of the block containing `(y, x)`.
pub fn compensate(reference: &Plane, mf: &MotionField) -> Result<Plane> {
    mf.check_geometry(reference)?;
    let (w, h) = (reference.width(), reference.height());
    let mut out = Plane::new(w, h);
    for (i, &v) in mf.vectors.iter().enumerate() {
        let r = mf.block_rect(i);
        if !in_bounds(r, v, w, h) {
            return Err(Error::VectorOutOfBounds(format!(
                "block at ({}, {}) with vector ({}, {})",
                r.y, r.x, v.dy, v.dx
            )));
        }
        let ry = (r.y as i64 + v.dy as i64) as usize;
        let rx = (r.x as i64 + v.dx as i64) as usize;
        for row in 0..r.height {
            out.row_mut(r.y + row)[r.x..r.x + r.width]
                .copy_from_slice(&reference.row(ry + row)[rx..rx + r.width]);
        }
    }
    Ok(out)
}

/// Warp with negated vectors, clamping reads to the nearest in-bounds
/// sample. Used by the temporal update step to carry highpass frames back
/// onto the lowpass frame's sampling grid.
pub fn compensate_inverse(hp: &Plane, mf: &MotionField) -> Result<Plane> {
    mf.check_geometry(hp)?;
    let (w, h) = (hp.width() as i64, hp.height() as i64);
    let mut out = Plane::new(hp.width(), hp.height());
    for (i, &v) in mf.vectors.iter().enumerate() {
        let r = mf.block_rect(i);
        for y in r.y..r.y + r.height {
            let sy = (y as i64 - v.dy as i64).clamp(0, h - 1) as usize;
            let src = hp.row(sy);
            let dst = out.row_mut(y);
            for x in r.x..r.x + r.width {
                let sx = (x as i64 - v.dx as i64).clamp(0, w - 1) as usize;
                dst[x] = src[sx];
            }
        }
    }
    Ok(out)
}
