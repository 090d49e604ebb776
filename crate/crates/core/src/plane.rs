//! Row-major 2-D grid of 32-bit signed samples.
//!
//! `Plane` is the working representation for frame samples, predictors,
//! temporal highpass/lowpass frames and wavelet subbands. Zero-sized planes
//! are allowed so that degenerate subbands (e.g. the HL band of a 1-pixel
//! wide frame) need no special casing.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<i32>,
}

impl std::fmt::Debug for Plane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Plane {}x{} ", self.width, self.height)?;
        if self.data.len() <= 64 {
            f.debug_list()
                .entries(self.data.chunks(self.width.max(1)))
                .finish()
        } else {
            write!(f, "[{} samples]", self.data.len())
        }
    }
}

impl Plane {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: i32) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<i32>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::geometry(format!(
                "{}x{} plane needs {} samples, got {}",
                width,
                height,
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    /// Builds a plane from nested rows. Panics on ragged input; meant for tests
    /// and examples.
    pub fn from_rows<R: AsRef<[i32]>>(rows: &[R]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(width * height);
        for r in rows {
            assert_eq!(r.as_ref().len(), width, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Plane {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> i32) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(y, x));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn same_shape(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> i32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, v: i32) {
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[i32] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    #[inline]
    pub fn row_mut(&mut self, y: usize) -> &mut [i32] {
        &mut self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn column(&self, x: usize) -> Vec<i32> {
        (0..self.height).map(|y| self.get(y, x)).collect()
    }

    pub fn data(&self) -> &[i32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [i32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<i32> {
        self.data
    }

    pub fn transpose(&self) -> Plane {
        Plane::from_fn(self.height, self.width, |y, x| self.get(x, y))
    }

    /// Copies the `w`x`h` window starting at (`y0`, `x0`).
    pub fn crop(&self, y0: usize, x0: usize, w: usize, h: usize) -> Plane {
        Plane::from_fn(w, h, |y, x| self.get(y0 + y, x0 + x))
    }

    /// Writes `src` into this plane with its top-left corner at (`y0`, `x0`).
    pub fn paste(&mut self, y0: usize, x0: usize, src: &Plane) {
        for y in 0..src.height {
            let dst = &mut self.data[(y0 + y) * self.width + x0..][..src.width];
            dst.copy_from_slice(src.row(y));
        }
    }

    pub fn max_abs(&self) -> u32 {
        self.data.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn sum_abs(&self) -> u64 {
        self.data.iter().map(|v| v.unsigned_abs() as u64).sum()
    }
}
