//! Boundary-aligned re-sorting of highpass detail subbands.
//!
//! Block-based compensation leaves edges on the compensation block grid.
//! After `i` spatial decompositions those edges show up as single rows
//! (LH), columns (HL) or both (HH), spaced `bs / 2^i` coefficients apart at
//! indices `k * spacing - 1`. Re-sorting moves these lines to the top/left
//! of the subband with a stable partition so that the entropy coder's local
//! context sees them next to each other. Levels beyond
//! `log2(bs) - 1` are never candidates: there the lines are already
//! adjacent.
//!
//! Two per-subband decision rules are provided. The optimum rule codes the
//! subband both ways and keeps the smaller rate. The low-complexity rule
//! compares the absolute sum of the neighbors of the boundary lines to the
//! (weighted) absolute sum of the lines themselves and re-sorts when the
//! quotient falls below a threshold.

use std::fmt;

use crate::dwt::{Orientation, Subband, SubbandPyramid};
use crate::error::{Error, Result};

/// Levels with their own threshold entries; deeper levels reuse the last.
pub const THRESHOLD_LEVELS: usize = 3;

/// Per-orientation, per-level LC thresholds in thousandths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    /// `milli[o][i - 1]`, `o` indexing HL, LH, HH.
    milli: [[u16; THRESHOLD_LEVELS]; 3],
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            milli: [[500, 600, 600], [500, 600, 600], [300, 300, 600]],
        }
    }
}

fn detail_index(o: Orientation) -> usize {
    match o {
        Orientation::HL => 0,
        Orientation::LH => 1,
        Orientation::HH => 2,
        Orientation::LL => panic!("LL has no threshold"),
    }
}

impl Thresholds {
    pub fn from_milli(milli: [[u16; THRESHOLD_LEVELS]; 3]) -> Result<Self> {
        if milli.iter().flatten().any(|&m| m == 0 || m > 1000) {
            return Err(Error::param("thresholds must lie in (0, 1]"));
        }
        Ok(Thresholds { milli })
    }

    /// Threshold for a band, in thousandths.
    pub fn milli(&self, o: Orientation, level: usize) -> u16 {
        self.milli[detail_index(o)][level.clamp(1, THRESHOLD_LEVELS) - 1]
    }

    pub fn value(&self, o: Orientation, level: usize) -> f64 {
        self.milli(o, level) as f64 / 1000.0
    }

    /// Serialization order: HL1, LH1, HH1, HL2, LH2, HH2, HL3, LH3, HH3.
    pub fn to_table(&self) -> [u16; 9] {
        let mut out = [0; 9];
        for level in 1..=THRESHOLD_LEVELS {
            for (j, o) in Orientation::DETAILS.iter().enumerate() {
                out[(level - 1) * 3 + j] = self.milli(*o, level);
            }
        }
        out
    }

    pub fn from_table(table: [u16; 9]) -> Result<Self> {
        let mut milli = [[0; THRESHOLD_LEVELS]; 3];
        for (k, &v) in table.iter().enumerate() {
            milli[k % 3][k / 3] = v;
        }
        Thresholds::from_milli(milli)
    }

    /// Parses `HL1 = 0.5` style lines (one per entry, `#` comments allowed).
    /// Entries not mentioned keep their default value.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Thresholds::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once(['=', ' ', '\t'])
                .ok_or_else(|| Error::param(format!("bad threshold line '{line}'")))?;
            let key = key.trim().to_ascii_uppercase();
            let o = match key.get(..2) {
                Some("HL") => Orientation::HL,
                Some("LH") => Orientation::LH,
                Some("HH") => Orientation::HH,
                _ => return Err(Error::param(format!("unknown threshold key '{key}'"))),
            };
            let level: usize = key[2..]
                .parse()
                .ok()
                .filter(|l| (1..=THRESHOLD_LEVELS).contains(l))
                .ok_or_else(|| Error::param(format!("bad threshold level in '{key}'")))?;
            let v: f64 = val
                .trim()
                .trim_start_matches(['=', ' '])
                .parse()
                .map_err(|_| Error::param(format!("bad threshold value in '{line}'")))?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::param(format!("threshold {v} outside (0, 1]")));
            }
            t.milli[detail_index(o)][level - 1] = (v * 1000.0).round() as u16;
        }
        Ok(t)
    }
}

/// Deepest level at which re-sorting is evaluated: `log2(bs) - 1`.
pub fn max_resort_level(block_size: usize) -> Result<usize> {
    if block_size < 2 || !block_size.is_power_of_two() {
        return Err(Error::param(format!(
            "block size {block_size} is not a power of two >= 2"
        )));
    }
    Ok(block_size.trailing_zeros() as usize - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResortParams {
    pub block_size: usize,
    pub max_level: usize,
    pub thresholds: Thresholds,
}

impl ResortParams {
    pub fn new(block_size: usize, thresholds: Thresholds) -> Result<Self> {
        Ok(ResortParams {
            block_size,
            max_level: max_resort_level(block_size)?,
            thresholds,
        })
    }

    /// Candidate bands for a pyramid with `levels` levels, in signaling
    /// order: HL1, LH1, HH1, HL2, ...
    pub fn candidates(&self, levels: usize) -> Vec<(Orientation, usize)> {
        (1..=self.max_level.min(levels))
            .flat_map(|l| Orientation::DETAILS.into_iter().map(move |o| (o, l)))
            .collect()
    }
}

/// Row or column indices of one subband axis that coincide with
/// compensation block boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySet {
    pub level: usize,
    pub spacing: usize,
    pub indices: Vec<usize>,
}

impl BoundarySet {
    pub fn empty(level: usize, spacing: usize) -> Self {
        BoundarySet {
            level,
            spacing,
            indices: Vec::new(),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Indices `{k * (bs / 2^level) - 1 : k >= 1}` below `extent`.
pub fn boundary_set(block_size: usize, level: usize, extent: usize) -> Result<BoundarySet> {
    let dm = max_resort_level(block_size)?;
    if level < 1 || level > dm {
        return Err(Error::param(format!(
            "level {level} outside 1..={dm} for block size {block_size}"
        )));
    }
    let spacing = block_size >> level;
    let indices = (1..)
        .map(|k| k * spacing - 1)
        .take_while(|&i| i < extent)
        .collect();
    Ok(BoundarySet {
        level,
        spacing,
        indices,
    })
}

/// Boundary sets appropriate for a subband: rows for LH, columns for HL,
/// both for HH.
pub fn boundary_sets_for(sb: &Subband, block_size: usize) -> Result<(Option<BoundarySet>, Option<BoundarySet>)> {
    let rows = || boundary_set(block_size, sb.level, sb.coeffs.height());
    let cols = || boundary_set(block_size, sb.level, sb.coeffs.width());
    Ok(match sb.orientation {
        Orientation::HL => (None, Some(cols()?)),
        Orientation::LH => (Some(rows()?), None),
        Orientation::HH => (Some(rows()?), Some(cols()?)),
        Orientation::LL => return Err(Error::param("the LL band is never re-sorted")),
    })
}

fn check_sets(sb: &Subband, rows: Option<&BoundarySet>, cols: Option<&BoundarySet>) -> Result<()> {
    let ok = match sb.orientation {
        Orientation::HL => rows.is_none() && cols.is_some(),
        Orientation::LH => rows.is_some() && cols.is_none(),
        Orientation::HH => rows.is_some() && cols.is_some(),
        Orientation::LL => false,
    };
    if !ok {
        return Err(Error::param(format!(
            "{} band cannot be re-sorted with rows={} cols={}",
            sb.name(),
            rows.is_some(),
            cols.is_some()
        )));
    }
    let in_range = |s: Option<&BoundarySet>, n: usize| {
        s.is_none_or(|s| s.indices.windows(2).all(|w| w[0] < w[1]) && s.indices.iter().all(|&i| i < n))
    };
    if !in_range(rows, sb.coeffs.height()) || !in_range(cols, sb.coeffs.width()) {
        return Err(Error::param(format!("boundary set does not fit band {}", sb.name())));
    }
    Ok(())
}

/// Stable partition order of `0..n`: members of `set` first, then the rest,
/// both ascending. Entry `i` is the source index moved to position `i`.
pub fn partition_order(n: usize, set: &BoundarySet) -> Vec<usize> {
    let mut order = set.indices.clone();
    order.extend((0..n).filter(|i| !set.contains(*i)));
    order
}

fn permute(sb: &Subband, rows: Option<&BoundarySet>, cols: Option<&BoundarySet>, inverse: bool) -> Result<Subband> {
    check_sets(sb, rows, cols)?;
    let (w, h) = (sb.coeffs.width(), sb.coeffs.height());
    let identity = |n: usize| (0..n).collect::<Vec<_>>();
    let row_order = rows.map_or_else(|| identity(h), |s| partition_order(h, s));
    let col_order = cols.map_or_else(|| identity(w), |s| partition_order(w, s));
    let mut out = sb.clone();
    for (i, &ri) in row_order.iter().enumerate() {
        for (j, &cj) in col_order.iter().enumerate() {
            if inverse {
                out.coeffs.set(ri, cj, sb.coeffs.get(i, j));
            } else {
                out.coeffs.set(i, j, sb.coeffs.get(ri, cj));
            }
        }
    }
    Ok(out)
}

/// Moves boundary rows to the top and/or boundary columns to the left.
pub fn resort(sb: &Subband, rows: Option<&BoundarySet>, cols: Option<&BoundarySet>) -> Result<Subband> {
    permute(sb, rows, cols, false)
}

/// Inverse of [`resort`] for the same sets.
pub fn unsort(sb: &Subband, rows: Option<&BoundarySet>, cols: Option<&BoundarySet>) -> Result<Subband> {
    permute(sb, rows, cols, true)
}

/// Neighbor-to-boundary quotient `num / den`; `den == 0` means +infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub num: u64,
    pub den: u64,
}

impl Quotient {
    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn as_f64(&self) -> f64 {
        if self.den == 0 {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// Exact test `Q < milli / 1000`.
    pub fn below_milli(&self, milli: u16) -> bool {
        self.den != 0 && (self.num as u128) * 1000 < (milli as u128) * (self.den as u128)
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{:.4}", self.as_f64())
        }
    }
}

/// Low-complexity statistic. HL/LH: boundary line sums against the sum of
/// the lines on either side, boundary weighted by 2. HH: boundary
/// intersections against their four diagonal neighbors, weighted by 4.
/// Neighbors outside the band are skipped; the weights stay fixed.
pub fn lc_statistic(sb: &Subband, rows: Option<&BoundarySet>, cols: Option<&BoundarySet>) -> Result<Quotient> {
    check_sets(sb, rows, cols)?;
    let c = &sb.coeffs;
    let (w, h) = (c.width() as isize, c.height() as isize);
    let at = |y: isize, x: isize| -> u64 {
        if y < 0 || x < 0 || y >= h || x >= w {
            0
        } else {
            c.get(y as usize, x as usize).unsigned_abs() as u64
        }
    };
    let (mut boundary, mut neighbors) = (0u64, 0u64);
    let weight = match sb.orientation {
        Orientation::HL => {
            for &x in &cols.unwrap().indices {
                let x = x as isize;
                for y in 0..h {
                    boundary += at(y, x);
                    neighbors += at(y, x - 1) + at(y, x + 1);
                }
            }
            2
        }
        Orientation::LH => {
            for &y in &rows.unwrap().indices {
                let y = y as isize;
                for x in 0..w {
                    boundary += at(y, x);
                    neighbors += at(y - 1, x) + at(y + 1, x);
                }
            }
            2
        }
        Orientation::HH => {
            for &y in &rows.unwrap().indices {
                for &x in &cols.unwrap().indices {
                    let (y, x) = (y as isize, x as isize);
                    boundary += at(y, x);
                    neighbors += at(y - 1, x - 1) + at(y - 1, x + 1) + at(y + 1, x - 1) + at(y + 1, x + 1);
                }
            }
            4
        }
        Orientation::LL => unreachable!("rejected by check_sets"),
    };
    Ok(Quotient {
        num: neighbors,
        den: weight * boundary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub orientation: Orientation,
    pub level: usize,
    pub resort: bool,
}

/// Per-candidate re-sort decisions for one frame.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResortPlan {
    pub decisions: Vec<Decision>,
}

impl ResortPlan {
    /// Plan over `candidates` with every decision false.
    pub fn none(candidates: &[(Orientation, usize)]) -> Self {
        Self::from_bits(candidates, &vec![false; candidates.len()])
    }

    pub fn from_bits(candidates: &[(Orientation, usize)], bits: &[bool]) -> Self {
        assert_eq!(candidates.len(), bits.len());
        ResortPlan {
            decisions: candidates
                .iter()
                .zip(bits)
                .map(|(&(orientation, level), &resort)| Decision {
                    orientation,
                    level,
                    resort,
                })
                .collect(),
        }
    }

    pub fn any_resort(&self) -> bool {
        self.decisions.iter().any(|d| d.resort)
    }

    pub fn bits(&self) -> Vec<bool> {
        self.decisions.iter().map(|d| d.resort).collect()
    }

    pub fn is_resorted(&self, o: Orientation, level: usize) -> bool {
        self.decisions
            .iter()
            .any(|d| d.orientation == o && d.level == level && d.resort)
    }

    pub fn resorted_count(&self) -> usize {
        self.decisions.iter().filter(|d| d.resort).count()
    }
}

/// Threshold decision, taken before any entropy coding.
pub fn decide_lc(pyramid: &SubbandPyramid, params: &ResortParams) -> Result<ResortPlan> {
    let candidates = params.candidates(pyramid.levels());
    let bits = candidates
        .iter()
        .map(|&(o, l)| {
            let sb = pyramid.band(o, l);
            let (rows, cols) = boundary_sets_for(sb, params.block_size)?;
            let q = lc_statistic(sb, rows.as_ref(), cols.as_ref())?;
            Ok(q.below_milli(params.thresholds.milli(o, l)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResortPlan::from_bits(&candidates, &bits))
}

/// Rate-optimal decision: re-sort exactly when the re-sorted band codes
/// strictly smaller under `rate_fn`.
pub fn decide_opt<F>(pyramid: &SubbandPyramid, params: &ResortParams, mut rate_fn: F) -> Result<ResortPlan>
where
    F: FnMut(&Subband) -> Result<u64>,
{
    let candidates = params.candidates(pyramid.levels());
    let mut bits = Vec::with_capacity(candidates.len());
    for &(o, l) in &candidates {
        let sb = pyramid.band(o, l);
        let (rows, cols) = boundary_sets_for(sb, params.block_size)?;
        let sorted = resort(sb, rows.as_ref(), cols.as_ref())?;
        bits.push(rate_fn(&sorted)? < rate_fn(sb)?);
    }
    Ok(ResortPlan::from_bits(&candidates, &bits))
}

fn transform_plan(pyramid: &SubbandPyramid, plan: &ResortPlan, params: &ResortParams, inverse: bool) -> Result<SubbandPyramid> {
    let mut out = pyramid.clone();
    for d in plan.decisions.iter().filter(|d| d.resort) {
        if d.level > pyramid.levels() || d.level > params.max_level {
            return Err(Error::param(format!(
                "plan re-sorts {}{} which is not a candidate",
                d.orientation, d.level
            )));
        }
        let sb = pyramid.band(d.orientation, d.level);
        let (rows, cols) = boundary_sets_for(sb, params.block_size)?;
        let moved = if inverse {
            unsort(sb, rows.as_ref(), cols.as_ref())?
        } else {
            resort(sb, rows.as_ref(), cols.as_ref())?
        };
        *out.band_mut(d.orientation, d.level) = moved;
    }
    Ok(out)
}

/// Re-sorts every band the plan selects.
pub fn apply_plan(pyramid: &SubbandPyramid, plan: &ResortPlan, params: &ResortParams) -> Result<SubbandPyramid> {
    transform_plan(pyramid, plan, params, false)
}

/// Undoes [`apply_plan`].
pub fn invert_plan(pyramid: &SubbandPyramid, plan: &ResortPlan, params: &ResortParams) -> Result<SubbandPyramid> {
    transform_plan(pyramid, plan, params, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Plane;
    use proptest::prelude::*;

    fn band(o: Orientation, level: usize, p: Plane) -> Subband {
        Subband::new(o, level, p)
    }

    #[test]
    fn max_levels_per_block_size() {
        for (bs, dm) in [(4, 1), (8, 2), (16, 3), (32, 4)] {
            assert_eq!(max_resort_level(bs).unwrap(), dm);
        }
        assert_eq!(max_resort_level(2).unwrap(), 0);
        assert!(max_resort_level(12).is_err());
        assert!(max_resort_level(1).is_err());
    }

    #[test]
    fn boundary_sets() {
        let s = boundary_set(16, 1, 32).unwrap();
        assert_eq!(s.spacing, 8);
        assert_eq!(s.indices, vec![7, 15, 23, 31]);
        let s = boundary_set(16, 3, 8).unwrap();
        assert_eq!(s.spacing, 2);
        assert_eq!(s.indices, vec![1, 3, 5, 7]);
        assert!(matches!(boundary_set(16, 4, 8), Err(Error::InvalidParam(_))));
        assert!(boundary_set(16, 0, 8).is_err());
        assert!(boundary_set(16, 1, 7).unwrap().indices.is_empty());
    }

    #[test]
    fn row_partition() {
        let set = BoundarySet {
            level: 1,
            spacing: 4,
            indices: vec![3],
        };
        assert_eq!(partition_order(8, &set), vec![3, 0, 1, 2, 4, 5, 6, 7]);
        let sb = band(Orientation::LH, 1, Plane::from_fn(1, 8, |y, _| y as i32));
        let r = resort(&sb, Some(&set), None).unwrap();
        assert_eq!(r.coeffs.column(0), vec![3, 0, 1, 2, 4, 5, 6, 7]);
        // inverse permutation [1, 2, 3, 0, 4, ...]
        let u = unsort(&band(Orientation::LH, 1, Plane::from_fn(1, 8, |y, _| y as i32)), Some(&set), None).unwrap();
        assert_eq!(u.coeffs.column(0), vec![1, 2, 3, 0, 4, 5, 6, 7]);
        assert_eq!(unsort(&r, Some(&set), None).unwrap(), sb);
    }

    #[test]
    fn empty_set_is_identity() {
        let sb = band(Orientation::HL, 1, Plane::from_fn(5, 4, |y, x| (y * 5 + x) as i32));
        let e = BoundarySet::empty(1, 8);
        assert_eq!(resort(&sb, None, Some(&e)).unwrap(), sb);
        assert_eq!(unsort(&sb, None, Some(&e)).unwrap(), sb);
    }

    #[test]
    fn hh_corner_moves_to_origin() {
        let sb = band(Orientation::HH, 1, Plane::from_fn(8, 8, |y, x| (y * 8 + x) as i32));
        let set = BoundarySet {
            level: 1,
            spacing: 4,
            indices: vec![3],
        };
        let r = resort(&sb, Some(&set), Some(&set)).unwrap();
        assert_eq!(r.coeffs.get(0, 0), sb.coeffs.get(3, 3));
        assert_eq!(r.coeffs.get(0, 1), sb.coeffs.get(3, 0));
        assert_eq!(r.coeffs.get(1, 0), sb.coeffs.get(0, 3));
    }

    #[test]
    fn orientation_set_mismatch() {
        let set = boundary_set(16, 1, 8).unwrap();
        let hl = band(Orientation::HL, 1, Plane::new(8, 8));
        assert!(resort(&hl, Some(&set), None).is_err());
        assert!(resort(&hl, Some(&set), Some(&set)).is_err());
        let ll = band(Orientation::LL, 1, Plane::new(8, 8));
        assert!(resort(&ll, None, None).is_err());
        assert!(lc_statistic(&ll, None, None).is_err());
    }

    #[test]
    fn lc_quotient_examples() {
        let set = BoundarySet {
            level: 1,
            spacing: 4,
            indices: vec![3],
        };
        let hl = band(
            Orientation::HL,
            1,
            Plane::from_fn(8, 8, |_, x| match x {
                3 => 10,
                2 | 4 => 1,
                _ => 0,
            }),
        );
        let q = lc_statistic(&hl, None, Some(&set)).unwrap();
        assert_eq!(q, Quotient { num: 16, den: 160 });
        assert!((q.as_f64() - 0.1).abs() < 1e-12);
        assert!(q.below_milli(500));

        let only_boundary = band(Orientation::HL, 1, Plane::from_fn(8, 8, |_, x| if x == 3 { -4 } else { 0 }));
        assert_eq!(lc_statistic(&only_boundary, None, Some(&set)).unwrap().as_f64(), 0.0);

        let flat = band(Orientation::HL, 1, Plane::filled(8, 8, -7));
        assert_eq!(lc_statistic(&flat, None, Some(&set)).unwrap().as_f64(), 1.0);

        let zero = band(Orientation::HH, 1, Plane::new(8, 8));
        let q = lc_statistic(&zero, Some(&set), Some(&set)).unwrap();
        assert!(q.is_infinite());
        assert!(!q.below_milli(1000));
    }

    #[test]
    fn hh_quotient_uses_diagonals() {
        let set = BoundarySet {
            level: 1,
            spacing: 4,
            indices: vec![3],
        };
        let mut p = Plane::new(8, 8);
        p.set(3, 3, 5);
        for (y, x) in [(2, 2), (2, 4), (4, 2), (4, 4)] {
            p.set(y, x, 1);
        }
        // direct neighbors don't count
        p.set(3, 2, 100);
        let q = lc_statistic(&band(Orientation::HH, 1, p), Some(&set), Some(&set)).unwrap();
        assert_eq!(q, Quotient { num: 4, den: 20 });
    }

    #[test]
    fn threshold_defaults_and_parse() {
        let t = Thresholds::default();
        assert_eq!(t.to_table(), [500, 500, 300, 600, 600, 300, 600, 600, 600]);
        assert_eq!(Thresholds::from_table(t.to_table()).unwrap(), t);
        assert_eq!(t.milli(Orientation::HH, 5), 600);
        let p = Thresholds::parse("# sensitivity run\nHL1 = 0.25\nhh3=1.0\n").unwrap();
        assert_eq!(p.milli(Orientation::HL, 1), 250);
        assert_eq!(p.milli(Orientation::HH, 3), 1000);
        assert_eq!(p.milli(Orientation::LH, 1), 500);
        assert!(Thresholds::parse("HL4=0.5").is_err());
        assert!(Thresholds::parse("HL1=1.5").is_err());
        assert!(Thresholds::parse("LL1=0.5").is_err());
    }

    #[test]
    fn lc_decisions_against_thresholds() {
        let q = Quotient { num: 1, den: 10 };
        assert!(q.below_milli(Thresholds::default().milli(Orientation::HL, 1)));
        let q = Quotient { num: 6, den: 10 };
        assert!(!q.below_milli(Thresholds::default().milli(Orientation::HH, 1)));
        // strict comparison at equality
        let q = Quotient { num: 3, den: 10 };
        assert!(!q.below_milli(300));
    }

    #[test]
    fn candidate_order() {
        let p = ResortParams::new(16, Thresholds::default()).unwrap();
        let c = p.candidates(7);
        assert_eq!(c.len(), 9);
        assert_eq!(c[0], (Orientation::HL, 1));
        assert_eq!(c[4], (Orientation::LH, 2));
        assert_eq!(p.candidates(2).len(), 6);
        let p8 = ResortParams::new(8, Thresholds::default()).unwrap();
        assert_eq!(p8.candidates(7).len(), 6);
    }

    #[test]
    fn opt_ties_keep_original_order() {
        let f = Plane::new(32, 32);
        let pyr = crate::dwt::forward_2d(&f, 4).unwrap();
        let params = ResortParams::new(16, Thresholds::default()).unwrap();
        let plan = decide_opt(&pyr, &params, |_| Ok(3)).unwrap();
        assert!(!plan.any_resort());
        assert_eq!(plan.decisions.len(), 9);
        let lc = decide_lc(&pyr, &params).unwrap();
        assert!(!lc.any_resort());
    }

    fn subband_strategy() -> impl Strategy<Value = (Subband, usize)> {
        (
            prop::sample::select(vec![4usize, 8, 16, 32]),
            prop::sample::select(Orientation::DETAILS.to_vec()),
            1usize..40,
            1usize..40,
            any::<u64>(),
        )
            .prop_flat_map(|(bs, o, w, h, seed)| {
                let dm = max_resort_level(bs).unwrap();
                (1..=dm).prop_map(move |level| {
                    let mut s = seed;
                    let p = Plane::from_fn(w, h, |_, _| {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        (s >> 50) as i32 - 8192
                    });
                    (Subband::new(o, level, p), bs)
                })
            })
    }

    proptest! {
        #[test]
        fn resort_is_a_permutation((sb, bs) in subband_strategy()) {
            let (rows, cols) = boundary_sets_for(&sb, bs).unwrap();
            let r = resort(&sb, rows.as_ref(), cols.as_ref()).unwrap();
            prop_assert!(r.coeffs.same_shape(&sb.coeffs));
            let mut a = sb.coeffs.data().to_vec();
            let mut b = r.coeffs.data().to_vec();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            prop_assert_eq!(unsort(&r, rows.as_ref(), cols.as_ref()).unwrap(), sb);
        }
    }
}
