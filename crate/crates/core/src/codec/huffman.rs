//! Huffman tables: the Annex-K defaults plus canonical encoder/decoder
//! construction from (code-length counts, symbol values) pairs.

use alloc::vec::Vec;

use super::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

const DC_LUMA_BITS: [u8; 16] = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
const DC_CHROMA_BITS: [u8; 16] = [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
const DC_VALUES: [u8; 12] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

const AC_LUMA_BITS: [u8; 16] = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D];
const AC_LUMA_VALUES: [u8; 162] = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14,
    0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09,
    0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A,
    0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65,
    0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88,
    0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9,
    0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA,
    0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA,
    0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
];

const AC_CHROMA_BITS: [u8; 16] = [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77];
const AC_CHROMA_VALUES: [u8; 162] = [
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32,
    0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16,
    0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64,
    0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86,
    0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8,
    0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9,
    0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
];

/// End-of-block run/size symbol.
pub const EOB: u8 = 0x00;
/// Sixteen-zero run symbol.
pub const ZRL: u8 = 0xF0;

/// A Huffman table as carried in a DHT segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    /// Number of codes of each length 1..=16.
    pub bits: [u8; 16],
    pub values: Vec<u8>,
}

impl HuffmanTable {
    pub fn new(bits: [u8; 16], values: Vec<u8>) -> Result<Self> {
        let total: usize = bits.iter().map(|&b| usize::from(b)).sum();
        if total != values.len() || total > 256 {
            return Err(Error::invalid("Huffman table counts do not match its values"));
        }
        // canonical codes must fit in their lengths
        let mut code = 0u32;
        for (len, &count) in bits.iter().enumerate() {
            code += u32::from(count);
            if code > 1 << (len + 1) {
                return Err(Error::invalid("Huffman code lengths oversubscribe the code space"));
            }
            code <<= 1;
        }
        Ok(HuffmanTable { bits, values })
    }

    pub fn std_dc_luma() -> Self {
        HuffmanTable { bits: DC_LUMA_BITS, values: DC_VALUES.to_vec() }
    }

    pub fn std_dc_chroma() -> Self {
        HuffmanTable { bits: DC_CHROMA_BITS, values: DC_VALUES.to_vec() }
    }

    pub fn std_ac_luma() -> Self {
        HuffmanTable { bits: AC_LUMA_BITS, values: AC_LUMA_VALUES.to_vec() }
    }

    pub fn std_ac_chroma() -> Self {
        HuffmanTable { bits: AC_CHROMA_BITS, values: AC_CHROMA_VALUES.to_vec() }
    }

    /// (code, length) for each value, in value order.
    fn canonical_codes(&self) -> impl Iterator<Item = (u8, u16, u8)> + '_ {
        let mut code = 0u16;
        let mut k = 0usize;
        let mut out = Vec::with_capacity(self.values.len());
        for (len, &count) in self.bits.iter().enumerate() {
            for _ in 0..count {
                out.push((self.values[k], code, len as u8 + 1));
                code = code.wrapping_add(1);
                k += 1;
            }
            code = code.wrapping_shl(1);
        }
        out.into_iter()
    }
}

/// Symbol → (code, length) lookup.
#[derive(Debug, Clone)]
pub struct HuffmanEncoder {
    code: [u16; 256],
    size: [u8; 256],
}

impl HuffmanEncoder {
    pub fn new(table: &HuffmanTable) -> Self {
        let mut enc = HuffmanEncoder { code: [0; 256], size: [0; 256] };
        for (value, code, len) in table.canonical_codes() {
            enc.code[usize::from(value)] = code;
            enc.size[usize::from(value)] = len;
        }
        enc
    }

    pub fn emit(&self, w: &mut BitWriter, symbol: u8) -> Result<()> {
        let size = self.size[usize::from(symbol)];
        if size == 0 {
            return Err(Error::Encode(alloc::format!("symbol {symbol:#04x} has no Huffman code")));
        }
        w.write(u32::from(self.code[usize::from(symbol)]), u32::from(size));
        Ok(())
    }
}

/// Canonical decoder (Annex F.2.2.3 MAXCODE/VALPTR procedure).
#[derive(Debug, Clone)]
pub struct HuffmanDecoder {
    mincode: [i32; 17],
    maxcode: [i32; 17],
    valptr: [usize; 17],
    values: Vec<u8>,
}

impl HuffmanDecoder {
    pub fn new(table: &HuffmanTable) -> Self {
        let mut dec =
            HuffmanDecoder { mincode: [0; 17], maxcode: [-1; 17], valptr: [0; 17], values: table.values.clone() };
        let mut code = 0i32;
        let mut k = 0usize;
        for len in 1..=16 {
            let count = usize::from(table.bits[len - 1]);
            if count > 0 {
                dec.valptr[len] = k;
                dec.mincode[len] = code;
                code += count as i32;
                k += count;
                dec.maxcode[len] = code - 1;
            }
            code <<= 1;
        }
        dec
    }

    pub fn decode(&self, r: &mut BitReader<'_>) -> Result<u8> {
        let mut code = 0i32;
        for len in 1..=16 {
            code = (code << 1) | r.read_bit()? as i32;
            if code <= self.maxcode[len] {
                let idx = self.valptr[len] + (code - self.mincode[len]) as usize;
                return Ok(self.values[idx]);
            }
        }
        Err(Error::parse(r.position(), "invalid Huffman code"))
    }
}

/// Magnitude category (SSSS) of a coefficient or DC difference.
#[inline]
pub fn category(v: i32) -> u8 {
    (32 - v.unsigned_abs().leading_zeros()) as u8
}

/// Appends the `category(v)` low-order magnitude bits of `v`.
#[inline]
pub fn write_magnitude(w: &mut BitWriter, v: i32, cat: u8) {
    if cat == 0 {
        return;
    }
    let bits = if v < 0 { v - 1 } else { v };
    w.write(bits as u32, u32::from(cat));
}

/// Reads `cat` magnitude bits and sign-extends them (Annex F EXTEND).
#[inline]
pub fn read_magnitude(r: &mut BitReader<'_>, cat: u8) -> Result<i32> {
    if cat == 0 {
        return Ok(0);
    }
    let v = r.read_bits(u32::from(cat))? as i32;
    Ok(if v < 1 << (cat - 1) { v - (1 << cat) + 1 } else { v })
}
