//! Motion-compensated LeGall 5/3 lifting along the frame axis.
//!
//! Even frames become highpass frames, odd frames become lowpass frames:
//!
//! ```text
//! HP_t = f_2t   - floor((p_2t-1 + p_2t+1) / 2)
//! LP_t = f_2t+1 + floor((h_t + h_t+1 + 2) / 4)
//! ```
//!
//! where `p` are the odd neighbors compensated onto the even frame's grid and
//! `h` are the adjacent highpass frames warped back with negated vectors. A
//! missing temporal neighbor is replaced by the existing one. Because both
//! steps are lifting steps, reconstruction is exact for any motion field.

use crate::error::{Error, Result};
use crate::motion::{compensate, compensate_inverse, estimate, MotionField};
use crate::plane::Plane;
use crate::volume::Volume;

/// Motion fields of one highpass frame: towards the previous and the next
/// odd frame (after mirroring at the sequence ends).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpMotion {
    pub prev: MotionField,
    pub next: MotionField,
}

/// Result of one lifting level over `frame_count` input frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalLevel {
    pub frame_count: usize,
    pub hp: Vec<Plane>,
    pub motion: Vec<HpMotion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalDecomposition {
    /// Applied levels, finest first. Level `k + 1` decomposes the lowpass
    /// frames of level `k`.
    pub levels: Vec<TemporalLevel>,
    /// Lowpass frames of the last applied level.
    pub lp: Vec<Plane>,
    pub update: bool,
    pub original_frame_count: usize,
}

impl TemporalDecomposition {
    pub fn hp_frames(&self) -> impl Iterator<Item = &Plane> {
        self.levels.iter().flat_map(|l| l.hp.iter())
    }

    pub fn hp_count(&self) -> usize {
        self.levels.iter().map(|l| l.hp.len()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemporalParams {
    pub block_size: usize,
    pub search_range: u32,
    pub levels: usize,
    pub update: bool,
}

impl Default for TemporalParams {
    fn default() -> Self {
        TemporalParams {
            block_size: 16,
            search_range: 15,
            levels: 1,
            update: true,
        }
    }
}

/// Input frame counts of the levels actually applied for `frames` input
/// frames and `levels` requested levels. The first level always runs; later
/// levels only run while at least two lowpass frames remain.
pub fn level_frame_counts(frames: usize, levels: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = frames;
    for l in 0..levels.max(1) {
        if l > 0 && n < 2 {
            break;
        }
        out.push(n);
        n /= 2;
    }
    out
}

pub fn hp_count(frames: usize) -> usize {
    frames.div_ceil(2)
}

pub fn lp_count(frames: usize) -> usize {
    frames / 2
}

fn prev_odd(even: usize, count: usize) -> Option<usize> {
    if count < 2 {
        None
    } else if even >= 1 {
        Some(even - 1)
    } else {
        Some(even + 1)
    }
}

fn next_odd(even: usize, count: usize) -> Option<usize> {
    if count < 2 {
        None
    } else if even + 1 < count {
        Some(even + 1)
    } else {
        Some(even - 1)
    }
}

fn check_same_shape(frames: &[Plane]) -> Result<()> {
    if let Some(first) = frames.first() {
        if let Some(f) = frames.iter().find(|f| !f.same_shape(first)) {
            return Err(Error::geometry(format!(
                "frame {}x{} differs from {}x{}",
                f.width(),
                f.height(),
                first.width(),
                first.height()
            )));
        }
    }
    Ok(())
}

/// `floor((a + b) / 2)` sample-wise.
fn half_sum(a: &Plane, b: &Plane) -> Vec<i32> {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| ((x as i64 + y as i64) >> 1) as i32)
        .collect()
}

/// `floor((a + b + 2) / 4)` sample-wise.
fn quarter_sum(a: &Plane, b: &Plane) -> Vec<i32> {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| ((x as i64 + y as i64 + 2) >> 2) as i32)
        .collect()
}

fn combine(base: &Plane, term: &[i32], sign: i32) -> Plane {
    let data = base.data().iter().zip(term).map(|(&b, &t)| b + sign * t).collect();
    Plane::from_vec(base.width(), base.height(), data).expect("same shape")
}

/// Prediction `floor((p_prev + p_next) / 2)` for the even frame `2t`, where
/// `odd(i)` yields frame `i` of the sequence.
fn even_prediction<'a>(odd: impl Fn(usize) -> &'a Plane, t: usize, count: usize, m: &HpMotion) -> Result<Vec<i32>> {
    let even = 2 * t;
    let (pi, ni) = (prev_odd(even, count).unwrap(), next_odd(even, count).unwrap());
    let pp = compensate(odd(pi), &m.prev)?;
    let pn = compensate(odd(ni), &m.next)?;
    Ok(half_sum(&pp, &pn))
}

/// Update term `floor((h_left + h_right + 2) / 4)` for the odd frame `2t + 1`.
fn odd_update(hp: &[Plane], motion: &[HpMotion], t: usize) -> Result<Vec<i32>> {
    let left = compensate_inverse(&hp[t], &motion[t].next)?;
    let right = match hp.get(t + 1) {
        Some(h) => compensate_inverse(h, &motion[t + 1].prev)?,
        None => left.clone(),
    };
    Ok(quarter_sum(&left, &right))
}

/// One forward lifting level with given motion.
pub fn lift_level(frames: &[Plane], motion: &[HpMotion], update: bool) -> Result<(Vec<Plane>, Vec<Plane>)> {
    let count = frames.len();
    if count == 0 {
        return Err(Error::param("cannot lift an empty frame sequence"));
    }
    check_same_shape(frames)?;
    if motion.len() != hp_count(count) {
        return Err(Error::geometry(format!(
            "{} frames need {} motion pairs, got {}",
            count,
            hp_count(count),
            motion.len()
        )));
    }
    if count == 1 {
        return Ok((vec![frames[0].clone()], Vec::new()));
    }

    let mut hp = Vec::with_capacity(hp_count(count));
    for (t, m) in motion.iter().enumerate() {
        let pred = even_prediction(|i| &frames[i], t, count, m)?;
        hp.push(combine(&frames[2 * t], &pred, -1));
    }

    let mut lp = Vec::with_capacity(lp_count(count));
    for t in 0..lp_count(count) {
        let f = &frames[2 * t + 1];
        if !update {
            lp.push(f.clone());
            continue;
        }
        lp.push(combine(f, &odd_update(&hp, motion, t)?, 1));
    }
    Ok((hp, lp))
}

/// Exact inverse of [`lift_level`].
pub fn unlift_level(hp: &[Plane], lp: &[Plane], motion: &[HpMotion], update: bool) -> Result<Vec<Plane>> {
    let count = hp.len() + lp.len();
    if hp.len() != hp_count(count) || lp.len() != lp_count(count) || count == 0 {
        return Err(Error::geometry(format!(
            "inconsistent temporal level: {} highpass, {} lowpass frames",
            hp.len(),
            lp.len()
        )));
    }
    if motion.len() != hp.len() {
        return Err(Error::geometry("motion pair count differs from highpass count"));
    }
    if let Some(p) = hp.iter().chain(lp).find(|p| !p.same_shape(&hp[0])) {
        return Err(Error::geometry(format!(
            "frame {}x{} differs from {}x{}",
            p.width(),
            p.height(),
            hp[0].width(),
            hp[0].height()
        )));
    }
    if count == 1 {
        return Ok(vec![hp[0].clone()]);
    }

    let mut odd = Vec::with_capacity(lp.len());
    for (t, l) in lp.iter().enumerate() {
        if !update {
            odd.push(l.clone());
            continue;
        }
        odd.push(combine(l, &odd_update(hp, motion, t)?, -1));
    }

    let mut frames = vec![Plane::new(0, 0); count];
    for (t, m) in motion.iter().enumerate() {
        let pred = even_prediction(|i| &odd[(i - 1) / 2], t, count, m)?;
        frames[2 * t] = combine(&hp[t], &pred, 1);
    }
    for (t, f) in odd.into_iter().enumerate() {
        frames[2 * t + 1] = f;
    }
    Ok(frames)
}

/// Runs `levels` lifting levels, asking `estimator(current, reference)` for
/// every motion field.
pub fn forward_with<E>(frames: Vec<Plane>, levels: usize, update: bool, mut estimator: E) -> Result<TemporalDecomposition>
where
    E: FnMut(&Plane, &Plane) -> Result<MotionField>,
{
    let original_frame_count = frames.len();
    if original_frame_count == 0 {
        return Err(Error::param("cannot decompose an empty volume"));
    }
    let mut current = frames;
    let mut out = Vec::new();
    for &count in &level_frame_counts(original_frame_count, levels) {
        debug_assert_eq!(count, current.len());
        let motion = if count == 1 {
            let f = &current[0];
            let z = estimator(f, f)?;
            vec![HpMotion { prev: z.clone(), next: z }]
        } else {
            let mut motion = Vec::with_capacity(hp_count(count));
            for t in 0..hp_count(count) {
                let even = 2 * t;
                let (pi, ni) = (prev_odd(even, count).unwrap(), next_odd(even, count).unwrap());
                let next = estimator(&current[even], &current[ni])?;
                let prev = if pi == ni {
                    next.clone()
                } else {
                    estimator(&current[even], &current[pi])?
                };
                motion.push(HpMotion { prev, next });
            }
            motion
        };
        let (hp, lp) = lift_level(&current, &motion, update)?;
        out.push(TemporalLevel {
            frame_count: count,
            hp,
            motion,
        });
        current = lp;
    }
    Ok(TemporalDecomposition {
        levels: out,
        lp: current,
        update,
        original_frame_count,
    })
}

/// Block-matching estimator that falls back to a zero field when the frame
/// is smaller than one block.
pub fn block_estimator(block_size: usize, search_range: u32) -> impl FnMut(&Plane, &Plane) -> Result<MotionField> {
    move |cur, reference| {
        if cur.width() < block_size || cur.height() < block_size {
            Ok(MotionField::zero(cur.width(), cur.height(), block_size, search_range))
        } else {
            estimate(cur, reference, block_size, search_range)
        }
    }
}

/// Forward decomposition of a volume with full-search motion estimation.
pub fn forward(v: &Volume, params: &TemporalParams) -> Result<TemporalDecomposition> {
    forward_with(
        v.planes(),
        params.levels,
        params.update,
        block_estimator(params.block_size, params.search_range),
    )
}

/// Reconstructs the frame sequence from a decomposition.
pub fn inverse(d: &TemporalDecomposition) -> Result<Vec<Plane>> {
    let counts = level_frame_counts(d.original_frame_count, d.levels.len());
    if counts.len() != d.levels.len() || d.levels.is_empty() {
        return Err(Error::geometry("temporal level count does not match frame count"));
    }
    for (l, &c) in d.levels.iter().zip(&counts) {
        if l.frame_count != c || l.hp.len() != hp_count(c) {
            return Err(Error::geometry(format!(
                "temporal level over {} frames has {} highpass frames",
                c,
                l.hp.len()
            )));
        }
    }
    let mut current = d.lp.clone();
    for level in d.levels.iter().rev() {
        current = unlift_level(&level.hp, &current, &level.motion, d.update)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::MotionVector;
    use proptest::prelude::*;

    fn scalars(vals: &[i32]) -> Vec<Plane> {
        vals.iter().map(|&v| Plane::filled(1, 1, v)).collect()
    }

    fn zero_motion() -> impl FnMut(&Plane, &Plane) -> Result<MotionField> {
        |c, _| Ok(MotionField::zero(c.width(), c.height(), 4, 2))
    }

    #[test]
    fn scalar_example() {
        let d = forward_with(scalars(&[10, 20, 30]), 1, true, zero_motion()).unwrap();
        let hp: Vec<i32> = d.levels[0].hp.iter().map(|p| p.get(0, 0)).collect();
        let lp: Vec<i32> = d.lp.iter().map(|p| p.get(0, 0)).collect();
        assert_eq!(hp, vec![-10, 10]);
        assert_eq!(lp, vec![20]);
        let back: Vec<i32> = inverse(&d).unwrap().iter().map(|p| p.get(0, 0)).collect();
        assert_eq!(back, vec![10, 20, 30]);
    }

    #[test]
    fn constant_volume_has_zero_highpass() {
        let frames = vec![Plane::filled(5, 3, 77); 7];
        let d = forward_with(frames, 2, true, zero_motion()).unwrap();
        for h in d.hp_frames() {
            assert!(h.data().iter().all(|&v| v == 0));
        }
        for l in &d.lp {
            assert!(l.data().iter().all(|&v| v == 77));
        }
    }

    #[test]
    fn single_frame_passes_through_as_highpass() {
        let f = Plane::from_rows(&[[1, 2], [3, 4]]);
        let d = forward_with(vec![f.clone()], 3, true, zero_motion()).unwrap();
        assert_eq!(d.levels.len(), 1);
        assert_eq!(d.levels[0].hp, vec![f.clone()]);
        assert!(d.lp.is_empty());
        assert_eq!(inverse(&d).unwrap(), vec![f]);
    }

    #[test]
    fn counts_follow_parity() {
        for frames in 1..10 {
            let d = forward_with(scalars(&vec![3; frames]), 1, true, zero_motion()).unwrap();
            assert_eq!(d.levels[0].hp.len(), frames.div_ceil(2));
            assert_eq!(d.lp.len(), frames / 2);
        }
        assert_eq!(level_frame_counts(8, 3), vec![8, 4, 2]);
        assert_eq!(level_frame_counts(5, 3), vec![5, 2]);
        assert_eq!(level_frame_counts(1, 3), vec![1]);
        assert_eq!(level_frame_counts(3, 0), vec![3]);
    }

    #[test]
    fn update_can_be_disabled() {
        let frames = scalars(&[10, 20, 30, 50]);
        let d = forward_with(frames.clone(), 1, false, zero_motion()).unwrap();
        assert_eq!(d.lp[0].get(0, 0), 20);
        assert_eq!(d.lp[1].get(0, 0), 50);
        assert_eq!(inverse(&d).unwrap(), frames);
    }

    #[test]
    fn estimated_motion_reduces_highpass_energy() {
        use crate::volume::{generate_phantom, PhantomSpec};
        let v = generate_phantom(&PhantomSpec::ellipsoid(64, 64, 5, 2.0, 1.01, 1)).unwrap();
        let est = forward(&v, &TemporalParams::default()).unwrap();
        let zero = forward_with(v.planes(), 1, true, |c, _| Ok(MotionField::zero(c.width(), c.height(), 16, 15))).unwrap();
        let mean = |d: &TemporalDecomposition| d.hp_frames().map(|p| p.sum_abs()).sum::<u64>();
        assert!(mean(&est) <= mean(&zero), "{} > {}", mean(&est), mean(&zero));
    }

    fn random_field(w: usize, h: usize, bs: usize, range: i32, seed: &mut u64) -> MotionField {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (*seed >> 33) as i32
        };
        let mut mf = MotionField::zero(w, h, bs, range as u32);
        let vs = (0..mf.vectors().len())
            .map(|i| {
                let r = mf.block_rect(i);
                // rejection-sample an in-bounds vector, zero is always legal
                for _ in 0..8 {
                    let v = MotionVector::new(next() % (range + 1) * if next() % 2 == 0 { 1 } else { -1 }, next() % (range + 1) * if next() % 2 == 0 { 1 } else { -1 });
                    let (y0, x0) = (r.y as i32 + v.dy, r.x as i32 + v.dx);
                    if y0 >= 0 && x0 >= 0 && y0 as usize + r.height <= h && x0 as usize + r.width <= w {
                        return v;
                    }
                }
                MotionVector::ZERO
            })
            .collect();
        mf = MotionField::from_vectors(w, h, bs, range as u32, vs).unwrap();
        mf
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn roundtrip_under_random_motion(
            w in 1usize..12, h in 1usize..12, frames in 1usize..9, levels in 1usize..4,
            seed in any::<u64>(), update in any::<bool>(),
        ) {
            let mut s = seed;
            let planes: Vec<Plane> = (0..frames)
                .map(|_| Plane::from_fn(w, h, |_, _| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                    ((s >> 40) as i32 % 4096) - 2048
                }))
                .collect();
            let mut fs = seed ^ 0xdead_beef;
            let d = forward_with(planes.clone(), levels, update, |c, _| {
                Ok(random_field(c.width(), c.height(), 2, 3, &mut fs))
            }).unwrap();
            prop_assert_eq!(inverse(&d).unwrap(), planes);
        }
    }
}
