use alloc::vec::Vec;

use crate::cipher::{decode_image, decrypt_image, encode_plain, encrypt_image};
use crate::codec::{CodecConfig, JpegStream, RasterImage};
use crate::error::{Error, Result};
use crate::key::MasterKey;

/// `10·log10(255² / MSE)` over all RGB samples; `+∞` for identical images.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::invalid("PSNR needs images of equal dimensions"));
    }
    let sse: u64 = a
        .as_bytes()
        .iter()
        .zip(b.as_bytes())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.as_bytes().len() as f64;
    Ok(10.0 * libm::log10(255.0 * 255.0 / mse))
}

/// Bits per pixel of a stream for the original (unpadded) raster size.
pub fn bpp(stream: &JpegStream, width: usize, height: usize) -> f64 {
    8.0 * stream.len() as f64 / (width * height) as f64
}

/// One averaged rate-distortion point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub qf: u8,
    pub bpp: f64,
    pub psnr: f64,
}

/// Corpus-averaged BPP and PSNR per quality factor. Without a key the plain
/// JPEG path is measured; with a key, the cipher stream's size and the
/// PSNR of its decryption.
pub fn rd_curve(images: &[RasterImage], qfs: &[u8], key: Option<&MasterKey>) -> Result<Vec<RdPoint>> {
    if images.is_empty() || qfs.is_empty() {
        return Err(Error::invalid("rate-distortion curve needs images and quality factors"));
    }
    let mut points = Vec::with_capacity(qfs.len());
    for &qf in qfs {
        let cfg = CodecConfig::new(qf)?;
        let (mut bpp_sum, mut psnr_sum) = (0.0, 0.0);
        for img in images {
            let (stream, recon) = match key {
                None => {
                    let s = encode_plain(img, &cfg)?;
                    let r = decode_image(&s)?;
                    (s, r)
                }
                Some(mk) => {
                    let s = encrypt_image(img, mk, &cfg)?;
                    let r = decrypt_image(&s, mk)?;
                    (s, r)
                }
            };
            bpp_sum += bpp(&stream, img.width(), img.height());
            psnr_sum += psnr(img, &recon)?;
        }
        let n = images.len() as f64;
        points.push(RdPoint { qf, bpp: bpp_sum / n, psnr: psnr_sum / n });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn flat(w: usize, h: usize, v: u8) -> RasterImage {
        RasterImage::from_fn(w, h, |_, _| [v; 3]).unwrap()
    }

    #[test]
    fn psnr_closed_forms() {
        let a = flat(8, 8, 0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&a, &flat(8, 8, 255)).unwrap(), 0.0);
        let p = psnr(&flat(8, 8, 100), &flat(8, 8, 101)).unwrap();
        assert!((p - 10.0 * 65025f64.log10()).abs() < 1e-12);
        assert!((p - 48.13).abs() < 0.01);
        assert!(psnr(&a, &flat(8, 9, 0)).is_err());
    }

    #[test]
    fn bpp_arithmetic() {
        let s = JpegStream::from_bytes(vec![0; 1000]);
        assert_eq!(bpp(&s, 100, 80), 1.0);
    }

    #[test]
    fn single_image_curve_equals_per_image_values() {
        let img = crate::synth::natural_image(32, 32, 1);
        let pts = rd_curve(core::slice::from_ref(&img), &[60], None).unwrap();
        let cfg = CodecConfig::new(60).unwrap();
        let s = encode_plain(&img, &cfg).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].bpp, bpp(&s, 32, 32));
        assert_eq!(pts[0].psnr, psnr(&img, &decode_image(&s).unwrap()).unwrap());
        assert!(rd_curve(&[], &[50], None).is_err());
    }
}
