//! Format-compliant JPEG encryption.
//!
//! Images are encrypted while they are being JPEG-compressed: every 8×8 block
//! is rotated by a keyed multiple of 90°, transformed with a keyed pair of
//! sign-flipped DCT matrices instead of the plain DCT, quantized, and finally
//! the quantized blocks of each colour component are shuffled by a keyed
//! permutation. The output is an ordinary baseline JFIF stream that any
//! decoder can open; only the key holder can undo the keyed stages.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. File formats,
//! the command-line interface and corpus handling live in the `cipherjpeg`
//! companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod bank;
pub mod cipher;
pub mod codec;
mod error;
pub mod key;
pub mod synth;

pub use crate::bank::{TransformBank, TransformSelection};
pub use crate::cipher::{
    decode_image, decrypt_image, decrypt_image_with, encode_plain, encrypt_image, encrypt_image_with, CipherOptions,
    CipherPlan, KeyTrace, RotationMode,
};
pub use crate::codec::{CodecConfig, JpegStream, RasterImage};
pub use crate::error::{Error, Result};
pub use crate::key::{BitSource, ComponentKey, KeyStream, MasterKey, Permutation};
