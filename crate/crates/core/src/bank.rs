//! The 128-matrix orthogonal transform bank and keyed selection from it.
//!
//! Matrix `k` is `D_k · C`, where `C` is the 8-point DCT-II and `D_k` is a
//! diagonal ±1 matrix. Rows 1..8 take their signs from the seven bits of `k`
//! (most significant bit → row 1, a set bit flips the row); row 0 takes the
//! product of those seven signs, so every `D_k` has determinant +1. Index 0
//! is the plain DCT. Sign flips leave coefficient magnitudes untouched, which
//! keeps the compression cost of the substituted transform equal to the DCT's.

use alloc::vec::Vec;

use crate::codec::{dct_matrix, OrthoMatrix};
use crate::key::BitSource;

pub const BANK_SIZE: usize = 128;
/// Number of transforms selected per component.
pub const SELECTION_LEN: usize = 9;
const INDEX_BITS: u32 = 7;

/// Row signs of bank matrix `k`.
pub fn row_signs(k: usize) -> [f64; 8] {
    assert!(k < BANK_SIZE, "bank index out of range");
    let mut signs = [1.0; 8];
    for (row, sign) in signs.iter_mut().enumerate().skip(1) {
        if (k >> (7 - row)) & 1 == 1 {
            *sign = -1.0;
        }
    }
    signs[0] = signs[1..].iter().product();
    signs
}

#[derive(Debug, Clone)]
pub struct TransformBank {
    matrices: Vec<OrthoMatrix>,
}

impl TransformBank {
    pub fn new() -> Self {
        let dct = *dct_matrix().rows();
        let matrices = (0..BANK_SIZE)
            .map(|k| {
                let signs = row_signs(k);
                let mut rows = dct;
                for (row, s) in rows.iter_mut().zip(signs) {
                    if s < 0.0 {
                        row.iter_mut().for_each(|v| *v = -*v);
                    }
                }
                OrthoMatrix::from_rows_unchecked(rows)
            })
            .collect();
        TransformBank { matrices }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn get(&self, k: usize) -> &OrthoMatrix {
        &self.matrices[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &OrthoMatrix> {
        self.matrices.iter()
    }
}

impl Default for TransformBank {
    fn default() -> Self {
        Self::new()
    }
}

/// Nine bank indices chosen for one colour component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformSelection {
    pub indices: [u8; SELECTION_LEN],
}

impl TransformSelection {
    /// Nine consecutive 7-bit draws (63 bits); repeats are allowed.
    pub fn select_nine(ks: &mut impl BitSource) -> Self {
        let mut indices = [0u8; SELECTION_LEN];
        for idx in indices.iter_mut() {
            *idx = ks.next_bits(INDEX_BITS) as u8;
        }
        TransformSelection { indices }
    }

    /// Bank indices for one block: a uniform choice among the nine for the
    /// row transform, then another for the column transform.
    pub fn pick_pair_indices(&self, ks: &mut impl BitSource) -> (u8, u8) {
        let row = ks.next_uniform(SELECTION_LEN as u64) as usize;
        let col = ks.next_uniform(SELECTION_LEN as u64) as usize;
        (self.indices[row], self.indices[col])
    }

    pub fn pick_pair<'b>(
        &self,
        bank: &'b TransformBank,
        ks: &mut impl BitSource,
    ) -> (&'b OrthoMatrix, &'b OrthoMatrix) {
        let (r, c) = self.pick_pair_indices(ks);
        (bank.get(usize::from(r)), bank.get(usize::from(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{inverse_transform2d, transform2d, Block8};
    use crate::key::KeyStream;

    /// Replays a fixed bit string, then zeros.
    struct Scripted {
        bits: Vec<u8>,
        pos: usize,
    }

    impl BitSource for Scripted {
        fn next_bits(&mut self, n: u32) -> u64 {
            let mut v = 0;
            for _ in 0..n {
                v = v << 1 | u64::from(*self.bits.get(self.pos).unwrap_or(&0));
                self.pos += 1;
            }
            v
        }
        fn bits_consumed(&self) -> u64 {
            self.pos as u64
        }
    }

    fn scripted(s: &str) -> Scripted {
        Scripted { bits: s.bytes().filter(|b| *b != b'_').map(|b| b - b'0').collect(), pos: 0 }
    }

    #[test]
    fn bank_is_orthogonal_and_distinct() {
        let bank = TransformBank::new();
        assert_eq!(bank.len(), 128);
        for m in bank.iter() {
            assert!(m.deviation() <= 1e-12);
        }
        for i in 0..128 {
            for j in i + 1..128 {
                assert_ne!(bank.get(i), bank.get(j));
            }
        }
    }

    #[test]
    fn index_zero_is_the_dct() {
        let bank = TransformBank::new();
        assert_eq!(bank.get(0), &dct_matrix());
        for x in 0..8 {
            assert!((bank.get(0).rows()[0][x] - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        }
    }

    #[test]
    fn entries_match_dct_in_magnitude() {
        let bank = TransformBank::new();
        let dct = dct_matrix();
        for m in bank.iter() {
            for (r, d) in m.rows().iter().zip(dct.rows()) {
                for (a, b) in r.iter().zip(d) {
                    assert_eq!(a.abs(), b.abs());
                }
            }
        }
    }

    #[test]
    fn row_sign_layout() {
        assert_eq!(row_signs(0), [1.0; 8]);
        // 0b1000000 flips row 1 only, so row 0 flips with it
        assert_eq!(row_signs(64), [-1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        // 0b0000011 flips rows 6 and 7, an even count
        assert_eq!(row_signs(3), [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn selection_slices_seven_bit_indices() {
        let mut ks = scripted("0000001_0000010_0000011_1111111_0000000_1000000_0000000_0000000_0000101");
        let sel = TransformSelection::select_nine(&mut ks);
        assert_eq!(sel.indices, [1, 2, 3, 127, 0, 64, 0, 0, 5]);
        assert_eq!(ks.bits_consumed(), 63);

        let mut zeros = scripted("");
        assert_eq!(TransformSelection::select_nine(&mut zeros).indices, [0; 9]);
    }

    #[test]
    fn select_nine_consumes_63_bits_of_a_real_stream() {
        let mut ks = KeyStream::new([5; 32]);
        TransformSelection::select_nine(&mut ks);
        assert_eq!(ks.bits_consumed(), 63);
    }

    #[test]
    fn all_dct_selection_always_picks_dct() {
        let bank = TransformBank::new();
        let sel = TransformSelection { indices: [0; 9] };
        let mut ks = KeyStream::new([77; 32]);
        for _ in 0..100 {
            let (r, c) = sel.pick_pair(&bank, &mut ks);
            assert_eq!((r, c), (bank.get(0), bank.get(0)));
        }
    }

    #[test]
    fn pair_frequencies_are_uniform() {
        let sel = TransformSelection { indices: [0, 1, 2, 3, 4, 5, 6, 7, 8] };
        let mut ks = KeyStream::new([11; 32]);
        let mut counts = [[0u32; 9]; 9];
        for _ in 0..1_000_000 {
            let (r, c) = sel.pick_pair_indices(&mut ks);
            counts[usize::from(r)][usize::from(c)] += 1;
        }
        // per-pair σ is ~0.9% of the mean, so the bound is 5σ on top of the
        // absolute one-percentage-point window
        let p: f64 = 1.0 / 81.0;
        let sigma = (p * (1.0 - p) / 1e6).sqrt();
        for row in counts {
            for c in row {
                let freq = f64::from(c) / 1e6;
                assert!((freq - p).abs() < 0.01);
                assert!((freq - p).abs() < 5.0 * sigma, "freq {freq}");
            }
        }
    }

    #[test]
    fn sign_flips_preserve_coefficient_magnitudes() {
        let bank = TransformBank::new();
        let mut b = Block8::ZERO;
        for (i, v) in b.0.iter_mut().enumerate() {
            *v = ((i * 37) % 29) as f64 - 14.0;
        }
        let reference = transform2d(&b, bank.get(0), bank.get(0));
        for (i, j) in [(1, 2), (127, 64), (5, 5), (99, 0)] {
            let out = transform2d(&b, bank.get(i), bank.get(j));
            for (x, y) in out.0.iter().zip(&reference.0) {
                assert!((x.abs() - y.abs()).abs() < 1e-9);
            }
            let back = inverse_transform2d(&out, bank.get(i), bank.get(j));
            for (x, y) in back.0.iter().zip(&b.0) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
