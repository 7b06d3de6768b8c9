use alloc::vec::Vec;

use crate::error::{Error, Result};

/// MSB-first bit writer for entropy-coded segments. Every emitted 0xFF byte
/// is followed by a stuffed 0x00.
#[derive(Debug, Default)]
pub struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `len` bits of `value` (len ≤ 16).
    pub fn write(&mut self, value: u32, len: u32) {
        debug_assert!(len <= 16);
        if len == 0 {
            return;
        }
        self.acc = (self.acc << len) | (value & ((1 << len) - 1));
        self.nbits += len;
        while self.nbits >= 8 {
            self.nbits -= 8;
            let byte = (self.acc >> self.nbits) as u8;
            self.push(byte);
        }
        self.acc &= (1 << self.nbits) - 1;
    }

    fn push(&mut self, byte: u8) {
        self.out.push(byte);
        if byte == 0xFF {
            self.out.push(0x00);
        }
    }

    /// Pads the final partial byte with 1-bits and returns the segment.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.write((1 << pad) - 1, pad);
        }
        self.out
    }
}

/// MSB-first reader over an entropy-coded segment, removing byte stuffing.
/// Reading stops at the first marker; asking for bits beyond it is an error.
#[derive(Debug)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u32,
    nbits: u32,
}

impl<'a> BitReader<'a> {
    /// Starts reading `data` at byte offset `pos`.
    pub fn new(data: &'a [u8], pos: usize) -> Self {
        BitReader { data, pos, acc: 0, nbits: 0 }
    }

    /// Offset of the first byte not yet pulled into the bit buffer.
    pub fn position(&self) -> usize {
        self.pos
    }

    fn fill_byte(&mut self) -> Result<()> {
        let byte = *self.data.get(self.pos).ok_or(Error::parse(self.pos, "entropy-coded data ends prematurely"))?;
        if byte == 0xFF {
            match self.data.get(self.pos + 1) {
                Some(0x00) => self.pos += 2,
                Some(_) => return Err(Error::parse(self.pos, "marker inside entropy-coded data")),
                None => return Err(Error::parse(self.pos, "entropy-coded data ends prematurely")),
            }
        } else {
            self.pos += 1;
        }
        self.acc = (self.acc << 8) | u32::from(byte);
        self.nbits += 8;
        Ok(())
    }

    pub fn read_bit(&mut self) -> Result<u32> {
        self.read_bits(1)
    }

    /// Reads `len` bits (len ≤ 16) as an unsigned integer.
    pub fn read_bits(&mut self, len: u32) -> Result<u32> {
        debug_assert!(len <= 16);
        while self.nbits < len {
            self.fill_byte()?;
        }
        self.nbits -= len;
        let v = (self.acc >> self.nbits) & ((1u32 << len) - 1);
        self.acc &= (1u32 << self.nbits).wrapping_sub(1);
        Ok(v)
    }
}
