use alloc::vec::Vec;
use core::f64::consts::PI;

use super::color::Plane;
use crate::error::{Error, Result};

pub const BLOCK_LEN: usize = 64;

/// Orthogonality tolerance accepted by [`OrthoMatrix::new`].
const ORTHO_TOLERANCE: f64 = 1e-10;

/// An 8×8 block of real samples in row-major order: level-shifted pixels
/// before the forward transform, transform coefficients after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block8(pub [f64; BLOCK_LEN]);

impl Block8 {
    pub const ZERO: Block8 = Block8([0.0; BLOCK_LEN]);

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.0[row * 8 + col]
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|v| v * v).sum())
    }
}

/// An 8×8 matrix known to be orthogonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoMatrix([[f64; 8]; 8]);

impl OrthoMatrix {
    /// Accepts `rows` if `max |T*T^t - I| <= 1e-10`.
    pub fn new(rows: [[f64; 8]; 8]) -> Result<Self> {
        let deviation = orthogonality_deviation(&rows);
        if deviation.is_nan() || deviation > ORTHO_TOLERANCE {
            return Err(Error::InvalidTransform { deviation });
        }
        Ok(OrthoMatrix(rows))
    }

    pub(crate) const fn from_rows_unchecked(rows: [[f64; 8]; 8]) -> Self {
        OrthoMatrix(rows)
    }

    pub fn identity() -> Self {
        let mut rows = [[0.0; 8]; 8];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        OrthoMatrix(rows)
    }

    pub fn rows(&self) -> &[[f64; 8]; 8] {
        &self.0
    }

    /// `max |T*T^t - I|` over all entries.
    pub fn deviation(&self) -> f64 {
        orthogonality_deviation(&self.0)
    }
}

fn orthogonality_deviation(m: &[[f64; 8]; 8]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            let dot: f64 = (0..8).map(|k| m[i][k] * m[j][k]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            let d = libm::fabs(dot - target);
            // NaN must not pass as orthogonal.
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// The orthonormal 8-point DCT-II matrix, `C[u][x] = c(u) cos((2x+1)uπ/16)`.
///
/// Columns 4..8 are filled by mirroring columns 0..4 with sign `(-1)^u`, so
/// `C[u][7-x] == ±C[u][x]` holds exactly in floating point. The cipher's
/// bit-exactness under 180° block rotation depends on that.
pub fn dct_matrix() -> OrthoMatrix {
    let mut m = [[0.0; 8]; 8];
    for (u, row) in m.iter_mut().enumerate() {
        let scale = if u == 0 { libm::sqrt(0.125) } else { 0.5 };
        for x in 0..4 {
            let v = scale * libm::cos((2 * x + 1) as f64 * u as f64 * PI / 16.0);
            row[x] = v;
            row[7 - x] = if u % 2 == 0 { v } else { -v };
        }
    }
    OrthoMatrix(m)
}

/// Dot product of `t` with `f(0..8)` summed as mirrored pairs
/// `(t[x] f(x) + t[7-x] f(7-x))` for x = 0..4. Reversing the input of a
/// mirror-symmetric row then yields exactly the same (or exactly negated) sum.
#[inline]
fn mirrored_dot(t: &[f64; 8], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for x in 0..4 {
        acc += t[x] * f(x) + t[7 - x] * f(7 - x);
    }
    acc
}

/// Forward separable transform `t_row · b · t_colᵀ`.
pub fn transform2d(b: &Block8, t_row: &OrthoMatrix, t_col: &OrthoMatrix) -> Block8 {
    let mut tmp = [0.0; BLOCK_LEN];
    for i in 0..8 {
        for v in 0..8 {
            tmp[i * 8 + v] = mirrored_dot(&t_col.0[v], |j| b.0[i * 8 + j]);
        }
    }
    let mut out = [0.0; BLOCK_LEN];
    for u in 0..8 {
        for v in 0..8 {
            out[u * 8 + v] = mirrored_dot(&t_row.0[u], |i| tmp[i * 8 + v]);
        }
    }
    Block8(out)
}

/// Inverse of [`transform2d`] for the same pair: `t_rowᵀ · c · t_col`.
pub fn inverse_transform2d(c: &Block8, t_row: &OrthoMatrix, t_col: &OrthoMatrix) -> Block8 {
    let mut tmp = [0.0; BLOCK_LEN];
    for u in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += c.0[u * 8 + v] * t_col.0[v][j];
            }
            tmp[u * 8 + j] = acc;
        }
    }
    let mut out = [0.0; BLOCK_LEN];
    for i in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += t_row.0[u][i] * tmp[u * 8 + j];
            }
            out[i * 8 + j] = acc;
        }
    }
    Block8(out)
}

/// Cuts a plane into 8×8 blocks in raster order, level-shifted by −128.
pub fn split_blocks(plane: &Plane) -> Result<Vec<Block8>> {
    if !plane.width.is_multiple_of(8) || !plane.height.is_multiple_of(8) {
        return Err(Error::invalid("plane dimensions must be multiples of 8"));
    }
    let (bw, bh) = (plane.width / 8, plane.height / 8);
    let mut blocks = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            let mut b = [0.0; BLOCK_LEN];
            for r in 0..8 {
                for c in 0..8 {
                    b[r * 8 + c] = f64::from(plane.get(bx * 8 + c, by * 8 + r)) - 128.0;
                }
            }
            blocks.push(Block8(b));
        }
    }
    Ok(blocks)
}

/// Reassembles a `width`×`height` plane from raster-ordered blocks, undoing
/// the level shift and rounding/clamping to 8 bits.
pub fn merge_blocks(blocks: &[Block8], width: usize, height: usize) -> Result<Plane> {
    if !width.is_multiple_of(8) || !height.is_multiple_of(8) {
        return Err(Error::invalid("plane dimensions must be multiples of 8"));
    }
    let bw = width / 8;
    if blocks.len() != bw * (height / 8) {
        return Err(Error::invalid("block count does not match plane dimensions"));
    }
    let mut plane = Plane::filled(width, height, 0);
    for (k, b) in blocks.iter().enumerate() {
        let (bx, by) = (k % bw, k / bw);
        for r in 0..8 {
            for c in 0..8 {
                let v = libm::round(b.0[r * 8 + c] + 128.0).clamp(0.0, 255.0);
                plane.data[(by * 8 + r) * width + bx * 8 + c] = v as u8;
            }
        }
    }
    Ok(plane)
}
