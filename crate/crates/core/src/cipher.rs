//! Encryption inside the JPEG pipeline, and its inverse.
//!
//! Key material is consumed in a fixed order, independently per component
//! (Y, then U, then V, each from its own stream):
//!
//! 1. 63 bits select nine bank transforms;
//! 2. for every block in raster order: 2 bits of rotation code, then two
//!    uniform draws among the nine for the row and column transforms;
//! 3. the Fisher–Yates draws of the block permutation.
//!
//! Only the image dimensions determine how much key material is needed, so
//! the whole schedule ([`CipherPlan`]) is derived before any pixel is touched.

use alloc::vec::Vec;

use crate::bank::{TransformBank, TransformSelection};
use crate::codec::{
    dequantize, entropy_encode, inverse_transform2d, merge_blocks, quantize, rgb_to_yuv, split_blocks, transform2d,
    yuv_to_rgb, Block8, CodecConfig, ComponentKind, DecodedJpeg, JpegStream, PlanarImage, QuantBlock, QuantFrame,
    RasterImage,
};
use crate::error::{Error, Result};
use crate::key::{BitSource, MasterKey, Permutation};

/// Rotates a block counter-clockwise by `90° × code`.
pub fn rotate_block(b: &Block8, code: u8) -> Block8 {
    let mut out = *b;
    for _ in 0..code % 4 {
        let prev = out;
        for i in 0..8 {
            for j in 0..8 {
                out.0[i * 8 + j] = prev.0[j * 8 + (7 - i)];
            }
        }
    }
    out
}

/// Which rotation codes the key may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationMode {
    /// All four angles.
    #[default]
    Full,
    /// Only 0° and 180°. Both rotation bits are still drawn; the low bit is
    /// discarded. In this mode decryption reproduces plain JPEG bit-exactly.
    HalfTurn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CipherOptions {
    pub rotation: RotationMode,
}

/// How many key bits each stage of one component consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KeyTrace {
    pub selection_bits: u64,
    pub block_bits: u64,
    pub permutation_bits: u64,
}

impl KeyTrace {
    pub fn total(&self) -> u64 {
        self.selection_bits + self.block_bits + self.permutation_bits
    }
}

/// Keyed state of one colour component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPlan {
    pub selection: TransformSelection,
    /// Rotation code per block, raster order.
    pub rotations: Vec<u8>,
    /// (row, column) bank indices per block, raster order.
    pub pairs: Vec<(u8, u8)>,
    /// Scan position `i` carries the block at raster index `permutation[i]`.
    pub permutation: Permutation,
    pub trace: KeyTrace,
}

impl ComponentPlan {
    fn identity(blocks: usize) -> Self {
        ComponentPlan {
            selection: TransformSelection { indices: [0; 9] },
            rotations: alloc::vec![0; blocks],
            pairs: alloc::vec![(0, 0); blocks],
            permutation: Permutation::identity(blocks),
            trace: KeyTrace::default(),
        }
    }

    fn derive(ks: &mut impl BitSource, blocks: usize, opts: CipherOptions) -> Self {
        let start = ks.bits_consumed();
        let selection = TransformSelection::select_nine(ks);
        let after_selection = ks.bits_consumed();
        let mut rotations = Vec::with_capacity(blocks);
        let mut pairs = Vec::with_capacity(blocks);
        for _ in 0..blocks {
            let code = ks.next_bits(2) as u8;
            rotations.push(match opts.rotation {
                RotationMode::Full => code,
                RotationMode::HalfTurn => code & 0b10,
            });
            pairs.push(selection.pick_pair_indices(ks));
        }
        let after_blocks = ks.bits_consumed();
        let permutation = ks.derive_permutation(blocks);
        let trace = KeyTrace {
            selection_bits: after_selection - start,
            block_bits: after_blocks - after_selection,
            permutation_bits: ks.bits_consumed() - after_blocks,
        };
        ComponentPlan { selection, rotations, pairs, permutation, trace }
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }
}

/// The complete keyed schedule for an image of given dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherPlan {
    components: [ComponentPlan; 3],
}

/// Block counts per component for a raster of the given size (4:2:0 with
/// 16-pixel padding).
pub fn block_counts(width: usize, height: usize) -> [usize; 3] {
    let (mx, my) = (width.div_ceil(16), height.div_ceil(16));
    [4 * mx * my, mx * my, mx * my]
}

impl CipherPlan {
    /// The do-nothing plan: no rotation, DCT everywhere, identity permutation.
    pub fn identity(width: usize, height: usize) -> Self {
        CipherPlan { components: block_counts(width, height).map(ComponentPlan::identity) }
    }

    pub fn derive(mk: &MasterKey, width: usize, height: usize, opts: CipherOptions) -> Self {
        Self::from_sources(mk.component_keys().map(|k| k.stream()), width, height, opts)
    }

    /// Derives a plan from three arbitrary bit sources (Y, U, V).
    pub fn from_sources<S: BitSource>(mut sources: [S; 3], width: usize, height: usize, opts: CipherOptions) -> Self {
        let counts = block_counts(width, height);
        let mut components = [0, 1, 2].map(|_| ComponentPlan::identity(0));
        for (i, plan) in components.iter_mut().enumerate() {
            *plan = ComponentPlan::derive(&mut sources[i], counts[i], opts);
        }
        CipherPlan { components }
    }

    pub fn component(&self, index: usize) -> &ComponentPlan {
        &self.components[index]
    }

    pub fn components_mut(&mut self) -> &mut [ComponentPlan; 3] {
        &mut self.components
    }

    pub fn key_traces(&self) -> [KeyTrace; 3] {
        [0, 1, 2].map(|i| self.components[i].trace)
    }
}

fn check_dimensions(img: &RasterImage) -> Result<()> {
    if img.width() > usize::from(u16::MAX) || img.height() > usize::from(u16::MAX) {
        return Err(Error::Unsupported("image dimensions above 65535"));
    }
    Ok(())
}

/// Runs the forward pipeline with an explicit plan.
pub fn encode_with_plan(img: &RasterImage, cfg: &CodecConfig, plan: &CipherPlan) -> Result<JpegStream> {
    check_dimensions(img)?;
    let planar = rgb_to_yuv(img)?;
    let counts = block_counts(img.width(), img.height());
    if (0..3).any(|i| plan.components[i].len() != counts[i]) {
        return Err(Error::invalid("cipher plan was derived for different dimensions"));
    }
    let bank = TransformBank::new();
    let mut quantized: [Vec<QuantBlock>; 3] = Default::default();
    for (ci, plane) in planar.planes().into_iter().enumerate() {
        let cp = &plan.components[ci];
        let table = cfg.quant_table(ComponentKind::of_component(ci));
        let raster: Vec<QuantBlock> = split_blocks(plane)?
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let (r, c) = cp.pairs[i];
                let rotated = rotate_block(b, cp.rotations[i]);
                let coefs = transform2d(&rotated, bank.get(usize::from(r)), bank.get(usize::from(c)));
                quantize(&coefs, &table)
            })
            .collect();
        quantized[ci] = cp.permutation.apply(&raster);
    }
    let frame = QuantFrame::yuv420(img.width(), img.height(), quantized)?;
    entropy_encode(&frame, cfg)
}

/// Reconstructs pixels from a parsed 4:2:0 stream with an explicit plan.
pub fn decode_with_plan(decoded: &DecodedJpeg, plan: &CipherPlan) -> Result<RasterImage> {
    if !decoded.is_yuv420() {
        return Err(Error::Unsupported("pixel reconstruction needs a three-component 4:2:0 frame"));
    }
    let frame = &decoded.frame;
    let counts = block_counts(frame.width, frame.height);
    if (0..3).any(|i| plan.components[i].len() != counts[i]) {
        return Err(Error::invalid("cipher plan was derived for different dimensions"));
    }
    let bank = TransformBank::new();
    let mut planes = Vec::with_capacity(3);
    for (ci, comp) in frame.components.iter().enumerate() {
        let cp = &plan.components[ci];
        let table = decoded.quant_table(ci)?;
        let raster = cp.permutation.inverse().apply(&comp.blocks);
        let blocks: Vec<Block8> = raster
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let (r, c) = cp.pairs[i];
                let coefs = dequantize(q, table);
                let spatial = inverse_transform2d(&coefs, bank.get(usize::from(r)), bank.get(usize::from(c)));
                rotate_block(&spatial, (4 - cp.rotations[i] % 4) % 4)
            })
            .collect();
        planes.push(merge_blocks(&blocks, comp.blocks_wide * 8, comp.blocks_high * 8)?);
    }
    let v = planes.pop().expect("three planes");
    let u = planes.pop().expect("three planes");
    let y = planes.pop().expect("three planes");
    Ok(yuv_to_rgb(&PlanarImage { width: frame.width, height: frame.height, y, u, v }))
}

pub fn encrypt_image(img: &RasterImage, mk: &MasterKey, cfg: &CodecConfig) -> Result<JpegStream> {
    encrypt_image_with(img, mk, cfg, CipherOptions::default())
}

pub fn encrypt_image_with(
    img: &RasterImage,
    mk: &MasterKey,
    cfg: &CodecConfig,
    opts: CipherOptions,
) -> Result<JpegStream> {
    check_dimensions(img)?;
    let plan = CipherPlan::derive(mk, img.width(), img.height(), opts);
    encode_with_plan(img, cfg, &plan)
}

/// Decrypts with the given key. A wrong key is not detectable: the stream
/// still decodes, into scrambled pixels.
pub fn decrypt_image(stream: &JpegStream, mk: &MasterKey) -> Result<RasterImage> {
    decrypt_image_with(stream, mk, CipherOptions::default())
}

pub fn decrypt_image_with(stream: &JpegStream, mk: &MasterKey, opts: CipherOptions) -> Result<RasterImage> {
    let decoded = stream.decode()?;
    let plan = CipherPlan::derive(mk, decoded.frame.width, decoded.frame.height, opts);
    decode_with_plan(&decoded, &plan)
}

/// Standard baseline JPEG compression (the all-identity cipher state).
pub fn encode_plain(img: &RasterImage, cfg: &CodecConfig) -> Result<JpegStream> {
    check_dimensions(img)?;
    encode_with_plan(img, cfg, &CipherPlan::identity(img.width(), img.height()))
}

/// Standard baseline decoding to pixels. Applied to a cipher stream this
/// yields the cipher-image a key-less viewer sees.
pub fn decode_image(stream: &JpegStream) -> Result<RasterImage> {
    let decoded = stream.decode()?;
    let plan = CipherPlan::identity(decoded.frame.width, decoded.frame.height);
    decode_with_plan(&decoded, &plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key::KeyStream;

    fn ramp() -> Block8 {
        let mut b = Block8::ZERO;
        for (i, v) in b.0.iter_mut().enumerate() {
            *v = i as f64;
        }
        b
    }

    fn test_image(w: usize, h: usize) -> RasterImage {
        RasterImage::from_fn(w, h, |x, y| [(x * 7 + y * 3) as u8, (x * y) as u8, ((x ^ y) * 5) as u8]).unwrap()
    }

    #[test]
    fn rotation_group_law() {
        let b = ramp();
        assert_eq!(rotate_block(&b, 0), b);
        assert_eq!(rotate_block(&rotate_block(&b, 1), 1), rotate_block(&b, 2));
        for c1 in 0..4 {
            for c2 in 0..4 {
                assert_eq!(rotate_block(&rotate_block(&b, c1), c2), rotate_block(&b, (c1 + c2) % 4));
            }
        }
        let flat = Block8([5.0; 64]);
        for c in 0..4 {
            assert_eq!(rotate_block(&flat, c), flat);
        }
    }

    #[test]
    fn rotation_is_counter_clockwise() {
        let b = ramp();
        // the top-right sample moves to the top-left corner
        assert_eq!(rotate_block(&b, 1).at(0, 0), b.at(0, 7));
        assert_eq!(rotate_block(&b, 1).at(7, 0), b.at(0, 0));
    }

    #[test]
    fn key_trace_for_192_by_128() {
        let mk = MasterKey::from_bytes([0x5A; 32]);
        let plan = CipherPlan::derive(&mk, 192, 128, CipherOptions::default());
        let traces = plan.key_traces();
        assert_eq!(plan.component(0).len(), 384);
        assert_eq!(plan.component(1).len(), 96);
        assert_eq!(plan.component(2).len(), 96);

        // Replay the canonical order by hand on the Y stream.
        let mut ks = mk.component_keys()[0].stream();
        let mut expected_block_bits = 0;
        let sel = TransformSelection::select_nine(&mut ks);
        assert_eq!(sel, plan.component(0).selection);
        for i in 0..384 {
            let before = ks.bits_consumed();
            assert_eq!(ks.next_bits(2) as u8, plan.component(0).rotations[i]);
            assert_eq!(sel.pick_pair_indices(&mut ks), plan.component(0).pairs[i]);
            expected_block_bits += ks.bits_consumed() - before;
        }
        let before = ks.bits_consumed();
        assert_eq!(ks.derive_permutation(384), plan.component(0).permutation);
        assert_eq!(traces[0].selection_bits, 63);
        assert_eq!(traces[0].block_bits, expected_block_bits);
        assert_eq!(traces[0].permutation_bits, ks.bits_consumed() - before);
        // each block draws at least 2 + 4 + 4 bits
        assert!(traces[0].block_bits >= 384 * 10);
    }

    #[test]
    fn reordering_key_consumption_breaks_decryption() {
        // Mutation: draw the pair before the rotation bits.
        let mk = MasterKey::from_bytes([0x21; 32]);
        let img = test_image(32, 32);
        let cfg = CodecConfig::new(90).unwrap();
        let stream = encrypt_image(&img, &mk, &cfg).unwrap();
        let good = decrypt_image(&stream, &mk).unwrap();

        let mut mutated = CipherPlan::derive(&mk, 32, 32, CipherOptions::default());
        for (ci, key) in mk.component_keys().iter().enumerate() {
            let mut ks = key.stream();
            let cp = &mut mutated.components_mut()[ci];
            let sel = TransformSelection::select_nine(&mut ks);
            for i in 0..cp.len() {
                cp.pairs[i] = sel.pick_pair_indices(&mut ks);
                cp.rotations[i] = ks.next_bits(2) as u8;
            }
        }
        let bad = decode_with_plan(&stream.decode().unwrap(), &mutated).unwrap();
        assert_ne!(bad, good);
    }

    #[test]
    fn encryption_is_deterministic_and_key_dependent() {
        let img = test_image(40, 24);
        let cfg = CodecConfig::new(60).unwrap();
        let a = MasterKey::from_bytes([1; 32]);
        let b = MasterKey::from_bytes([2; 32]);
        assert_eq!(encrypt_image(&img, &a, &cfg).unwrap(), encrypt_image(&img, &a, &cfg).unwrap());
        assert_ne!(encrypt_image(&img, &a, &cfg).unwrap(), encrypt_image(&img, &b, &cfg).unwrap());
    }

    struct Zeros(u64);

    impl BitSource for Zeros {
        fn next_bits(&mut self, n: u32) -> u64 {
            self.0 += u64::from(n);
            0
        }
        fn bits_consumed(&self) -> u64 {
            self.0
        }
    }

    #[test]
    fn plain_path_equals_all_zero_key_with_identity_permutation() {
        let img = test_image(48, 32);
        let cfg = CodecConfig::new(75).unwrap();
        let mut plan = CipherPlan::from_sources([Zeros(0), Zeros(0), Zeros(0)], 48, 32, CipherOptions::default());
        for cp in plan.components_mut().iter_mut() {
            assert!(cp.rotations.iter().all(|&r| r == 0));
            assert!(cp.pairs.iter().all(|&p| p == (0, 0)));
            cp.permutation = Permutation::identity(cp.len());
        }
        assert_eq!(encode_with_plan(&img, &cfg, &plan).unwrap(), encode_plain(&img, &cfg).unwrap());
    }

    #[test]
    fn plan_size_mismatch_is_rejected() {
        let img = test_image(32, 32);
        let plan = CipherPlan::identity(16, 16);
        assert!(encode_with_plan(&img, &CodecConfig::default(), &plan).is_err());
    }

    #[test]
    fn oversized_images_are_unsupported() {
        let img = RasterImage::new(70_000, 1, alloc::vec![0; 70_000 * 3]).unwrap();
        let mk = MasterKey::from_bytes([0; 32]);
        assert_eq!(
            encrypt_image(&img, &mk, &CodecConfig::default()).unwrap_err(),
            Error::Unsupported("image dimensions above 65535")
        );
    }

    #[test]
    fn half_turn_mode_only_yields_0_and_180() {
        let plan = CipherPlan::from_sources(
            [KeyStream::new([1; 32]), KeyStream::new([2; 32]), KeyStream::new([3; 32])],
            64,
            64,
            CipherOptions { rotation: RotationMode::HalfTurn },
        );
        for ci in 0..3 {
            assert!(plan.component(ci).rotations.iter().all(|&r| r == 0 || r == 2));
        }
        assert!(plan.component(0).rotations.contains(&2));
    }
}
