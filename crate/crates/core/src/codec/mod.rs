//! Baseline JPEG building blocks.
//!
//! Everything here is standard sequential-DCT JPEG with two generalisations
//! the cipher needs: the 2-D block transform accepts any pair of orthogonal
//! matrices, and the frame encoder takes already-quantized blocks so that
//! blocks can be reordered between quantization and entropy coding.

mod bitio;
mod block;
mod color;
pub mod huffman;
mod jfif;
mod quant;

pub use self::bitio::{BitReader, BitWriter};
pub use self::block::{
    dct_matrix, inverse_transform2d, merge_blocks, split_blocks, transform2d, Block8, OrthoMatrix, BLOCK_LEN,
};
pub use self::color::{rgb_to_yuv, yuv_to_rgb, PlanarImage, Plane, RasterImage};
pub use self::jfif::{decode_jfif, entropy_encode, ComponentBlocks, DecodedJpeg, JpegStream, QuantFrame, SymbolCounts};
pub use self::quant::{dequantize, quantize, CodecConfig, ComponentKind, QuantBlock, QuantTable, ZIGZAG};

/// Colour components in frame order.
pub const COMPONENTS: usize = 3;
