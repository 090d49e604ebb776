//! Bitplane coding of a single code block.
//!
//! Planes run from the most significant magnitude bit down. Each plane has
//! a significance propagation pass (insignificant samples with a
//! significant 8-neighbor), a magnitude refinement pass (samples already
//! significant before this plane) and a cleanup pass for everything left,
//! where stripe columns of four quiet samples are coded with a single run
//! symbol. Scanning follows 4-row stripes, columns left to right, rows top
//! to bottom inside a stripe column.
//!
//! Encoder and decoder share one pass implementation over [`BinCoder`]:
//! the encoder codes the bit it is given, the decoder ignores it and
//! returns the decoded bit.

use super::rangecoder::{Decoder, Encoder, Prob};
use crate::error::{Error, Result};
use crate::plane::Plane;

const SIG: u8 = 1;
const NEG: u8 = 2;
const VISITED: u8 = 4;
const REFINED: u8 = 8;

/// Entropy-coded code block: `k` magnitude bitplanes and the coder bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeBlockStream {
    pub k: u8,
    pub payload: Vec<u8>,
}

impl CodeBlockStream {
    pub fn empty() -> Self {
        CodeBlockStream {
            k: 0,
            payload: Vec::new(),
        }
    }
}

trait BinCoder {
    fn bit(&mut self, p: &mut Prob, b: bool) -> Result<bool>;
    fn raw(&mut self, b: bool) -> Result<bool>;
}

impl BinCoder for Encoder {
    fn bit(&mut self, p: &mut Prob, b: bool) -> Result<bool> {
        self.encode(p, b);
        Ok(b)
    }

    fn raw(&mut self, b: bool) -> Result<bool> {
        self.encode_direct(b);
        Ok(b)
    }
}

impl BinCoder for Decoder<'_> {
    fn bit(&mut self, p: &mut Prob, _: bool) -> Result<bool> {
        self.decode(p)
    }

    fn raw(&mut self, _: bool) -> Result<bool> {
        self.decode_direct()
    }
}

struct Contexts {
    sig: [Prob; 9],
    sign: [Prob; 5],
    refine: [Prob; 3],
    run: Prob,
}

impl Contexts {
    fn new() -> Self {
        let mut sig = [Prob::EVEN; 9];
        sig[0] = Prob::new(0.9);
        Contexts {
            sig,
            sign: [Prob::EVEN; 5],
            refine: [Prob::EVEN; 3],
            run: Prob::new(0.9),
        }
    }
}

/// Sign context and prediction flip from the left and upper neighbors:
/// each contributes +1 (positive), -1 (negative) or 0 (insignificant).
fn sign_context(h: i8, v: i8) -> (usize, bool) {
    match (h, v) {
        (1, 1) => (4, false),
        (1, 0) => (3, false),
        (1, -1) => (2, false),
        (0, 1) => (1, false),
        (0, 0) => (0, false),
        (0, -1) => (1, true),
        (-1, 1) => (2, true),
        (-1, 0) => (3, true),
        _ => (4, true),
    }
}

struct BlockState {
    width: usize,
    height: usize,
    stride: usize,
    // both padded by one sample on every side
    flags: Vec<u8>,
    mag: Vec<u32>,
    ctx: Contexts,
}

impl BlockState {
    fn new(width: usize, height: usize) -> Self {
        let stride = width + 2;
        let n = stride * (height + 2);
        BlockState {
            width,
            height,
            stride,
            flags: vec![0; n],
            mag: vec![0; n],
            ctx: Contexts::new(),
        }
    }

    fn idx(&self, y: usize, x: usize) -> usize {
        (y + 1) * self.stride + x + 1
    }

    fn sig_count(&self, i: usize) -> usize {
        let s = self.stride;
        [i - s - 1, i - s, i - s + 1, i - 1, i + 1, i + s - 1, i + s, i + s + 1]
            .iter()
            .map(|&j| (self.flags[j] & SIG) as usize)
            .sum()
    }

    fn contribution(&self, j: usize) -> i8 {
        match self.flags[j] & (SIG | NEG) {
            SIG => 1,
            f if f == SIG | NEG => -1,
            _ => 0,
        }
    }

    fn code_sign<C: BinCoder>(&mut self, i: usize, c: &mut C) -> Result<()> {
        let (ctx, flip) = sign_context(self.contribution(i - 1), self.contribution(i - self.stride));
        let neg = self.flags[i] & NEG != 0;
        let neg = c.bit(&mut self.ctx.sign[ctx], neg ^ flip)? ^ flip;
        self.flags[i] = (self.flags[i] & !NEG) | SIG | if neg { NEG } else { 0 };
        Ok(())
    }

    fn code_sig<C: BinCoder>(&mut self, i: usize, p: u32, c: &mut C) -> Result<()> {
        let n = self.sig_count(i);
        if c.bit(&mut self.ctx.sig[n], (self.mag[i] >> p) & 1 == 1)? {
            self.mag[i] |= 1 << p;
            self.code_sign(i, c)?;
        }
        Ok(())
    }

    fn stripe_scan(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.height).step_by(4).flat_map(move |y0| {
            (0..self.width).flat_map(move |x| (y0..(y0 + 4).min(self.height)).map(move |y| self.idx(y, x)))
        })
    }

    fn significance_pass<C: BinCoder>(&mut self, p: u32, c: &mut C) -> Result<()> {
        let order: Vec<usize> = self.stripe_scan().collect();
        for i in order {
            if self.flags[i] & SIG == 0 && self.sig_count(i) > 0 {
                self.code_sig(i, p, c)?;
                self.flags[i] |= VISITED;
            }
        }
        Ok(())
    }

    fn refinement_pass<C: BinCoder>(&mut self, p: u32, c: &mut C) -> Result<()> {
        let order: Vec<usize> = self.stripe_scan().collect();
        for i in order {
            if self.flags[i] & (SIG | VISITED) != SIG {
                continue;
            }
            let ctx = if self.flags[i] & REFINED != 0 {
                2
            } else {
                (self.sig_count(i) > 0) as usize
            };
            if c.bit(&mut self.ctx.refine[ctx], (self.mag[i] >> p) & 1 == 1)? {
                self.mag[i] |= 1 << p;
            }
            self.flags[i] |= REFINED;
        }
        Ok(())
    }

    fn cleanup_pass<C: BinCoder>(&mut self, p: u32, c: &mut C) -> Result<()> {
        for y0 in (0..self.height).step_by(4) {
            let rows = (self.height - y0).min(4);
            for x in 0..self.width {
                let col: Vec<usize> = (0..rows).map(|r| self.idx(y0 + r, x)).collect();
                let mut start = 0;
                let quiet = rows == 4
                    && col
                        .iter()
                        .all(|&i| self.flags[i] & (SIG | VISITED) == 0 && self.sig_count(i) == 0);
                if quiet {
                    let first = col.iter().position(|&i| (self.mag[i] >> p) & 1 == 1);
                    if !c.bit(&mut self.ctx.run, first.is_some())? {
                        continue;
                    }
                    let first = first.unwrap_or(0);
                    let hi = c.raw(first >= 2)? as usize;
                    let lo = c.raw(first & 1 == 1)? as usize;
                    let r = hi * 2 + lo;
                    self.mag[col[r]] |= 1 << p;
                    self.code_sign(col[r], c)?;
                    start = r + 1;
                }
                for &i in &col[start..] {
                    if self.flags[i] & (SIG | VISITED) == 0 {
                        self.code_sig(i, p, c)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn code_planes<C: BinCoder>(&mut self, k: u32, c: &mut C) -> Result<()> {
        for p in (0..k).rev() {
            self.significance_pass(p, c)?;
            self.refinement_pass(p, c)?;
            self.cleanup_pass(p, c)?;
            for f in &mut self.flags {
                *f &= !VISITED;
            }
        }
        Ok(())
    }
}

/// Number of magnitude bitplanes needed for the block (0 when all zero).
pub fn bitplanes(block: &Plane) -> u8 {
    let max = block.data().iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    (32 - max.leading_zeros()) as u8
}

pub fn encode_block(block: &Plane) -> CodeBlockStream {
    let k = bitplanes(block);
    if k == 0 {
        return CodeBlockStream::empty();
    }
    let mut st = BlockState::new(block.width(), block.height());
    for y in 0..block.height() {
        for x in 0..block.width() {
            let v = block.get(y, x);
            let i = st.idx(y, x);
            st.mag[i] = v.unsigned_abs();
            if v < 0 {
                st.flags[i] = NEG;
            }
        }
    }
    let mut enc = Encoder::new();
    st.code_planes(k as u32, &mut enc)
        .expect("encoding into memory cannot fail");
    CodeBlockStream {
        k,
        payload: enc.finish(),
    }
}

pub fn decode_block(stream: &CodeBlockStream, width: usize, height: usize) -> Result<Plane> {
    if width == 0 || height == 0 {
        return Err(Error::param("code block dimensions must be nonzero"));
    }
    match (stream.k, stream.payload.is_empty()) {
        (0, true) => return Ok(Plane::new(width, height)),
        (0, false) => return Err(Error::corrupt("empty block carries a payload")),
        (_, true) => return Err(Error::corrupt("nonzero block has no payload")),
        (k, _) if k > 32 => return Err(Error::corrupt(format!("{k} bitplanes in a block"))),
        _ => {}
    }
    let k = stream.k as u32;
    let mut st = BlockState::new(width, height);
    let mut dec = Decoder::new(&stream.payload)?;
    st.code_planes(k, &mut dec)?;
    dec.finish()?;

    let mut out = Plane::new(width, height);
    let mut top = 0u32;
    for y in 0..height {
        for x in 0..width {
            let i = st.idx(y, x);
            let m = st.mag[i] as i64;
            top |= st.mag[i];
            let v = if st.flags[i] & NEG != 0 { -m } else { m };
            let v = i32::try_from(v).map_err(|_| Error::corrupt("decoded coefficient exceeds 32 bits"))?;
            out.set(y, x, v);
        }
    }
    if top >> (k - 1) != 1 {
        return Err(Error::corrupt("top bitplane decoded empty"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(p: &Plane) -> CodeBlockStream {
        let s = encode_block(p);
        assert_eq!(&decode_block(&s, p.width(), p.height()).unwrap(), p);
        s
    }

    #[test]
    fn zero_block_is_empty() {
        let s = roundtrip(&Plane::new(64, 64));
        assert_eq!(s, CodeBlockStream::empty());
    }

    #[test]
    fn single_unit_coefficient() {
        let mut p = Plane::new(4, 4);
        p.set(0, 0, 1);
        assert_eq!(roundtrip(&p).k, 1);
        p.set(0, 0, -1);
        roundtrip(&p);
    }

    #[test]
    fn extreme_values() {
        let p = Plane::from_rows(&[vec![i32::MIN, i32::MAX, 0], vec![-1, 1, 1 << 20]]);
        assert_eq!(roundtrip(&p).k, 32);
    }

    #[test]
    fn sign_contexts_cover_all_patterns() {
        let mut seen = [false; 5];
        for h in -1..=1 {
            for v in -1..=1 {
                let (c, flip) = sign_context(h, v);
                seen[c] = true;
                // mirrored pattern shares the context with the prediction flipped
                let (c2, flip2) = sign_context(-h, -v);
                assert_eq!(c, c2);
                assert!(c == 0 || flip != flip2);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn truncation_and_bad_headers() {
        let p = Plane::from_fn(16, 16, |y, x| (y as i32 - 8) * (x as i32 % 5));
        let s = encode_block(&p);
        let mut cut = s.clone();
        cut.payload.pop();
        assert!(matches!(decode_block(&cut, 16, 16), Err(Error::Corrupt(_))));
        let bad_k = CodeBlockStream {
            k: 0,
            payload: s.payload.clone(),
        };
        assert!(decode_block(&bad_k, 16, 16).is_err());
        let no_payload = CodeBlockStream { k: 3, payload: vec![] };
        assert!(decode_block(&no_payload, 16, 16).is_err());
    }

    #[test]
    fn clustered_energy_codes_smaller() {
        // two strong columns far apart vs adjacent
        let far = Plane::from_fn(16, 16, |y, x| if x == 3 || x == 11 { 200 + y as i32 } else { (x + y) as i32 % 2 });
        let near = Plane::from_fn(16, 16, |y, x| if x == 0 || x == 1 { 200 + y as i32 } else { (x + y) as i32 % 2 });
        let a = encode_block(&far).payload.len();
        let b = encode_block(&near).payload.len();
        assert!(b < a, "adjacent {b} vs spread {a}");
    }

    fn block_strategy() -> impl Strategy<Value = Plane> {
        (1usize..=64, 1usize..=64, 0u32..=20, any::<u64>(), 0u8..4).prop_map(|(w, h, bits, seed, sparsity)| {
            let mut s = seed | 1;
            Plane::from_fn(w, h, |_, _| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                if (s & 3) < sparsity as u64 {
                    0
                } else {
                    let m = ((s >> 8) & ((1u64 << bits) - 1).max(0)) as i32;
                    if s & 4 != 0 {
                        -m
                    } else {
                        m
                    }
                }
            })
        })
    }

    proptest! {
        #[test]
        fn fuzzed_blocks_roundtrip(p in block_strategy()) {
            let s = encode_block(&p);
            prop_assert_eq!(s.k, bitplanes(&p));
            prop_assert_eq!(s.payload.is_empty(), s.k == 0);
            prop_assert_eq!(decode_block(&s, p.width(), p.height()).unwrap(), p);
        }
    }
}
