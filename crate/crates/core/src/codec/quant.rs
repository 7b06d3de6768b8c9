use super::block::{Block8, BLOCK_LEN};
use crate::error::{Error, Result};

/// Natural (row-major) index of the k-th coefficient in zig-zag order.
pub const ZIGZAG: [usize; BLOCK_LEN] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21,
    28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54,
    47, 55, 62, 63,
];

// Annex K.1 tables, natural order.
const LUMA_BASE: [u16; BLOCK_LEN] = [
    16, 11, 10, 16, 24, 40, 51, 61, 12, 12, 14, 19, 26, 58, 60, 55, 14, 13, 16, 24, 40, 57, 69, 56, 14, 17, 22, 29, 51,
    87, 80, 62, 18, 22, 37, 56, 68, 109, 103, 77, 24, 35, 55, 64, 81, 104, 113, 92, 49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
];

const CHROMA_BASE: [u16; BLOCK_LEN] = [
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99,
];

/// Largest quantized magnitude the baseline Huffman categories can carry
/// for both AC values and (pairwise) DC differences.
pub(crate) const MAX_LEVEL: i16 = 1023;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Luma,
    Chroma,
}

impl ComponentKind {
    pub fn of_component(index: usize) -> Self {
        if index == 0 {
            ComponentKind::Luma
        } else {
            ComponentKind::Chroma
        }
    }
}

/// Encoder settings. Subsampling is always 4:2:0 and the tables are the
/// Annex-K ones scaled by the IJG quality formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodecConfig {
    qf: u8,
}

impl CodecConfig {
    pub fn new(qf: u8) -> Result<Self> {
        if !(1..=100).contains(&qf) {
            return Err(Error::invalid("quality factor must be in 1..=100"));
        }
        Ok(CodecConfig { qf })
    }

    pub fn qf(&self) -> u8 {
        self.qf
    }

    pub fn quant_table(&self, kind: ComponentKind) -> QuantTable {
        let base = match kind {
            ComponentKind::Luma => &LUMA_BASE,
            ComponentKind::Chroma => &CHROMA_BASE,
        };
        let qf = u32::from(self.qf);
        let scale = if qf < 50 { 5000 / qf } else { 200 - 2 * qf };
        let mut q = [0u16; BLOCK_LEN];
        for (dst, &b) in q.iter_mut().zip(base) {
            *dst = ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as u16;
        }
        QuantTable(q)
    }

    /// Recovers the quality factor whose scaled tables equal the given pair.
    pub fn from_tables(luma: &QuantTable, chroma: &QuantTable) -> Option<Self> {
        (1..=100u8).rev().map(|qf| CodecConfig { qf }).find(|cfg| {
            cfg.quant_table(ComponentKind::Luma) == *luma && cfg.quant_table(ComponentKind::Chroma) == *chroma
        })
    }
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig { qf: 75 }
    }
}

/// Quantizer step sizes in natural order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantTable(pub [u16; BLOCK_LEN]);

/// Quantized coefficients in natural order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantBlock(pub [i16; BLOCK_LEN]);

impl QuantBlock {
    pub const ZERO: QuantBlock = QuantBlock([0; BLOCK_LEN]);

    pub fn dc(&self) -> i16 {
        self.0[0]
    }
}

/// `round_half_away_from_zero(coef / q)`, saturated to the baseline range.
///
/// The rounding is odd-symmetric, so negating a coefficient negates its level.
pub fn quantize(b: &Block8, table: &QuantTable) -> QuantBlock {
    let mut out = [0i16; BLOCK_LEN];
    for ((dst, &coef), &q) in out.iter_mut().zip(&b.0).zip(&table.0) {
        let level = libm::round(coef / f64::from(q));
        *dst = level.clamp(-f64::from(MAX_LEVEL), f64::from(MAX_LEVEL)) as i16;
    }
    QuantBlock(out)
}

pub fn dequantize(q: &QuantBlock, table: &QuantTable) -> Block8 {
    let mut out = [0.0; BLOCK_LEN];
    for ((dst, &level), &step) in out.iter_mut().zip(&q.0).zip(&table.0) {
        *dst = f64::from(level) * f64::from(step);
    }
    Block8(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zigzag_is_a_permutation() {
        let mut seen = [false; 64];
        for &i in &ZIGZAG {
            assert!(!seen[i]);
            seen[i] = true;
        }
    }

    #[test]
    fn qf50_is_the_unscaled_table() {
        let cfg = CodecConfig::new(50).unwrap();
        assert_eq!(cfg.quant_table(ComponentKind::Luma).0, LUMA_BASE);
        assert_eq!(cfg.quant_table(ComponentKind::Luma).0[0], 16);
        assert_eq!(cfg.quant_table(ComponentKind::Chroma).0, CHROMA_BASE);
    }

    #[test]
    fn quality_factor_range() {
        assert!(CodecConfig::new(0).is_err());
        assert!(CodecConfig::new(101).is_err());
        assert_eq!(CodecConfig::new(100).unwrap().quant_table(ComponentKind::Luma).0, [1; 64]);
        // 5000/1 = 5000% scaling saturates at 255
        assert!(CodecConfig::new(1).unwrap().quant_table(ComponentKind::Luma).0.iter().all(|&q| q == 255));
    }

    #[test]
    fn tables_identify_their_quality_factor() {
        for qf in [1u8, 10, 37, 50, 75, 90, 99] {
            let cfg = CodecConfig::new(qf).unwrap();
            let found = CodecConfig::from_tables(
                &cfg.quant_table(ComponentKind::Luma),
                &cfg.quant_table(ComponentKind::Chroma),
            )
            .unwrap();
            // several low QFs saturate to identical tables; any match must reproduce them
            assert_eq!(found.quant_table(ComponentKind::Luma), cfg.quant_table(ComponentKind::Luma));
        }
    }

    #[test]
    fn zero_block_quantizes_to_zero() {
        for qf in [1, 50, 100] {
            let t = CodecConfig::new(qf).unwrap().quant_table(ComponentKind::Chroma);
            assert_eq!(quantize(&Block8::ZERO, &t), QuantBlock::ZERO);
        }
    }

    #[test]
    fn half_steps_round_away_from_zero() {
        let t = QuantTable([2; 64]);
        let mut b = Block8::ZERO;
        b.0[0] = 3.0;
        b.0[1] = -3.0;
        b.0[2] = 2.999;
        let q = quantize(&b, &t);
        assert_eq!(&q.0[..3], &[2, -2, 1]);
    }

    #[test]
    fn levels_saturate_to_baseline_range() {
        let t = QuantTable([1; 64]);
        let mut b = Block8::ZERO;
        b.0[0] = 1024.0;
        b.0[5] = -5000.0;
        let q = quantize(&b, &t);
        assert_eq!((q.0[0], q.0[5]), (MAX_LEVEL, -MAX_LEVEL));
    }

    proptest! {
        #[test]
        fn quantization_is_odd_and_error_bounded(coef in -1000.0f64..1000.0, qf in 1u8..=100, pos in 0usize..64) {
            let t = CodecConfig::new(qf).unwrap().quant_table(ComponentKind::Luma);
            let mut b = Block8::ZERO;
            b.0[pos] = coef;
            let mut neg = Block8::ZERO;
            neg.0[pos] = -coef;
            let q = quantize(&b, &t);
            prop_assert_eq!(quantize(&neg, &t).0[pos], -q.0[pos]);
            let back = dequantize(&q, &t).0[pos];
            prop_assert!((coef - back).abs() <= f64::from(t.0[pos]) / 2.0 + 1e-9);
        }
    }
}
