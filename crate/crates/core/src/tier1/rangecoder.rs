//! Adaptive binary range coder (carry-propagating, byte-oriented).
//!
//! Probabilities are 12-bit estimates of a zero symbol, adapted by a shift
//! after every coded decision. Termination flushes the full low register,
//! so the decoder consumes exactly the bytes the encoder wrote: running
//! past the end or stopping short of it both indicate a damaged stream.

use crate::error::{Error, Result};

const PROB_BITS: u32 = 12;
const PROB_ONE: u16 = 1 << PROB_BITS;
const ADAPT_SHIFT: u32 = 5;
const TOP: u32 = 1 << 24;

/// Probability that the next symbol is 0, in units of 2^-12.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prob(u16);

impl Prob {
    pub const EVEN: Prob = Prob(PROB_ONE / 2);

    /// Initial estimate `p0` in (0, 1).
    pub fn new(p0: f64) -> Self {
        let v = (p0 * PROB_ONE as f64).round() as u16;
        Prob(v.clamp(31, PROB_ONE - 31))
    }

    fn update(&mut self, bit: bool) {
        if bit {
            self.0 -= self.0 >> ADAPT_SHIFT;
        } else {
            self.0 += (PROB_ONE - self.0) >> ADAPT_SHIFT;
        }
    }
}

pub struct Encoder {
    low: u64,
    range: u32,
    cache: u8,
    pending: u64,
    out: Vec<u8>,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Encoder {
            low: 0,
            range: u32::MAX,
            cache: 0,
            pending: 1,
            out: Vec::new(),
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut b = self.cache;
            while self.pending > 0 {
                self.out.push(b.wrapping_add(carry));
                b = 0xFF;
                self.pending -= 1;
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.pending += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    pub fn encode(&mut self, p: &mut Prob, bit: bool) {
        let bound = (self.range >> PROB_BITS) * p.0 as u32;
        if bit {
            self.low += bound as u64;
            self.range -= bound;
        } else {
            self.range = bound;
        }
        p.update(bit);
        self.normalize();
    }

    /// Equiprobable bit, no context.
    pub fn encode_direct(&mut self, bit: bool) {
        self.range >>= 1;
        if bit {
            self.low += self.range as u64;
        }
        self.normalize();
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        // the first byte is always the initial zero cache
        debug_assert_eq!(self.out[0], 0);
        self.out.remove(0);
        self.out
    }
}

pub struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
    range: u32,
    code: u32,
}

impl<'a> Decoder<'a> {
    pub fn new(buf: &'a [u8]) -> Result<Self> {
        let mut d = Decoder {
            buf,
            pos: 0,
            range: u32::MAX,
            code: 0,
        };
        for _ in 0..4 {
            d.code = (d.code << 8) | d.next_byte()? as u32;
        }
        Ok(d)
    }

    fn next_byte(&mut self) -> Result<u8> {
        let b = *self
            .buf
            .get(self.pos)
            .ok_or_else(|| Error::corrupt("arithmetic decoder ran past end of block payload"))?;
        self.pos += 1;
        Ok(b)
    }

    fn normalize(&mut self) -> Result<()> {
        while self.range < TOP {
            self.range <<= 8;
            self.code = (self.code << 8) | self.next_byte()? as u32;
        }
        Ok(())
    }

    pub fn decode(&mut self, p: &mut Prob) -> Result<bool> {
        let bound = (self.range >> PROB_BITS) * p.0 as u32;
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        p.update(bit);
        self.normalize()?;
        Ok(bit)
    }

    pub fn decode_direct(&mut self) -> Result<bool> {
        self.range >>= 1;
        let bit = self.code >= self.range;
        if bit {
            self.code -= self.range;
        }
        self.normalize()?;
        Ok(bit)
    }

    /// Errors unless every payload byte was consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::corrupt(format!(
                "{} unused bytes after block payload",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(bits: &[(bool, bool)]) -> Vec<u8> {
        let mut ctx = [Prob::EVEN; 3];
        let mut e = Encoder::new();
        for (i, &(direct, b)) in bits.iter().enumerate() {
            if direct {
                e.encode_direct(b);
            } else {
                e.encode(&mut ctx[i % 3], b);
            }
        }
        let bytes = e.finish();
        let mut ctx = [Prob::EVEN; 3];
        let mut d = Decoder::new(&bytes).unwrap();
        for (i, &(direct, b)) in bits.iter().enumerate() {
            let got = if direct {
                d.decode_direct().unwrap()
            } else {
                d.decode(&mut ctx[i % 3]).unwrap()
            };
            assert_eq!(got, b, "symbol {i}");
        }
        d.finish().unwrap();
        bytes
    }

    #[test]
    fn empty_message_is_four_bytes() {
        assert_eq!(roundtrip(&[]).len(), 4);
    }

    #[test]
    fn skewed_source_compresses() {
        let bits: Vec<_> = (0..20000).map(|i| (false, i % 50 == 0)).collect();
        let n = roundtrip(&bits).len();
        assert!(n < 20000 / 8 / 3, "{n} bytes");
    }

    #[test]
    fn carry_heavy_streams() {
        // long runs of ones in a zero-favoring context drive low towards 0xFF..
        let mut bits = vec![(false, false); 3000];
        bits.extend(std::iter::repeat_n((false, true), 3000));
        bits.extend(std::iter::repeat_n((true, true), 500));
        roundtrip(&bits);
    }

    #[test]
    fn truncated_and_padded_streams_fail() {
        let bits: Vec<_> = (0..500).map(|i| (false, i % 7 == 0)).collect();
        let bytes = roundtrip(&bits);
        let run = |buf: &[u8]| -> Result<()> {
            let mut ctx = [Prob::EVEN; 3];
            let mut d = Decoder::new(buf)?;
            for i in 0..bits.len() {
                d.decode(&mut ctx[i % 3])?;
            }
            d.finish()
        };
        assert!(run(&bytes[..bytes.len() - 1]).is_err());
        let mut long = bytes.clone();
        long.push(0);
        assert!(run(&long).is_err());
    }

    proptest! {
        #[test]
        fn random_symbols_roundtrip(bits in prop::collection::vec((any::<bool>(), any::<bool>()), 0..2000)) {
            roundtrip(&bits);
        }
    }
}
