use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An 8-bit RGB image stored row-major, three samples per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image has a zero dimension"));
        }
        if data.len() != width * height * 3 {
            return Err(Error::invalid("pixel buffer length does not match width*height*3"));
        }
        Ok(RasterImage { width, height, data })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }
}

/// One 8-bit sample plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Plane {
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Plane { width, height, data: vec![value; width * height] }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }
}

/// YCbCr planes with 4:2:0 chroma. Luma dimensions are padded to multiples
/// of 16; `width`/`height` remember the original raster size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarImage {
    pub width: usize,
    pub height: usize,
    pub y: Plane,
    pub u: Plane,
    pub v: Plane,
}

impl PlanarImage {
    pub fn planes(&self) -> [&Plane; 3] {
        [&self.y, &self.u, &self.v]
    }
}

pub(crate) fn padded(n: usize) -> usize {
    n.div_ceil(16) * 16
}

fn clamp_u8(v: f64) -> u8 {
    libm::round(v).clamp(0.0, 255.0) as u8
}

/// Full-range BT.601 (JFIF) conversion with 2×2 box-filtered chroma.
///
/// The raster is first padded to multiples of 16 by replicating the last
/// row and column.
pub fn rgb_to_yuv(img: &RasterImage) -> Result<PlanarImage> {
    if img.width == 0 || img.height == 0 {
        return Err(Error::invalid("image has a zero dimension"));
    }
    let (pw, ph) = (padded(img.width), padded(img.height));
    let mut y = Plane::filled(pw, ph, 0);
    let mut cb = vec![0.0f64; pw * ph];
    let mut cr = vec![0.0f64; pw * ph];
    for row in 0..ph {
        let sy = row.min(img.height - 1);
        for col in 0..pw {
            let sx = col.min(img.width - 1);
            let [r, g, b] = img.pixel(sx, sy);
            let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
            let i = row * pw + col;
            y.data[i] = clamp_u8(0.299 * r + 0.587 * g + 0.114 * b);
            cb[i] = -0.168_736 * r - 0.331_264 * g + 0.5 * b + 128.0;
            cr[i] = 0.5 * r - 0.418_688 * g - 0.081_312 * b + 128.0;
        }
    }
    let (cw, ch) = (pw / 2, ph / 2);
    let mut u = Plane::filled(cw, ch, 0);
    let mut v = Plane::filled(cw, ch, 0);
    for row in 0..ch {
        for col in 0..cw {
            let i0 = 2 * row * pw + 2 * col;
            let quad = [i0, i0 + 1, i0 + pw, i0 + pw + 1];
            let avg = |p: &[f64]| quad.iter().map(|&i| p[i]).sum::<f64>() / 4.0;
            u.data[row * cw + col] = clamp_u8(avg(&cb));
            v.data[row * cw + col] = clamp_u8(avg(&cr));
        }
    }
    Ok(PlanarImage { width: img.width, height: img.height, y, u, v })
}

/// Inverse of [`rgb_to_yuv`]: nearest-neighbour chroma upsampling, then
/// cropping back to the original raster size.
pub fn yuv_to_rgb(p: &PlanarImage) -> RasterImage {
    let mut data = Vec::with_capacity(p.width * p.height * 3);
    for row in 0..p.height {
        for col in 0..p.width {
            let luma = f64::from(p.y.get(col, row));
            let cb = f64::from(p.u.get(col / 2, row / 2)) - 128.0;
            let cr = f64::from(p.v.get(col / 2, row / 2)) - 128.0;
            data.push(clamp_u8(luma + 1.402 * cr));
            data.push(clamp_u8(luma - 0.344_136 * cb - 0.714_136 * cr));
            data.push(clamp_u8(luma + 1.772 * cb));
        }
    }
    RasterImage { width: p.width, height: p.height, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(w: usize, h: usize, rgb: [u8; 3]) -> RasterImage {
        RasterImage::from_fn(w, h, |_, _| rgb).unwrap()
    }

    #[test]
    fn gray_maps_to_neutral_chroma() {
        let p = rgb_to_yuv(&uniform(32, 32, [128, 128, 128])).unwrap();
        assert!(p.y.data.iter().all(|&s| s == 128));
        assert!(p.u.data.iter().all(|&s| s == 128));
        assert!(p.v.data.iter().all(|&s| s == 128));
    }

    #[test]
    fn plane_sizes_are_4_2_0() {
        let p = rgb_to_yuv(&uniform(192, 128, [10, 20, 30])).unwrap();
        assert_eq!((p.y.width, p.y.height), (192, 128));
        assert_eq!((p.u.width, p.u.height), (96, 64));
        assert_eq!((p.v.width, p.v.height), (96, 64));
    }

    #[test]
    fn red_luma_matches_hand_computed_value() {
        // 0.299 * 255 = 76.245
        let p = rgb_to_yuv(&uniform(16, 16, [255, 0, 0])).unwrap();
        assert_eq!(p.y.get(3, 5), 76);
        // Cr = 0.5 * 255 + 128 = 255.5 saturates
        assert_eq!(p.v.get(0, 0), 255);
    }

    #[test]
    fn odd_sizes_are_padded_by_edge_replication() {
        let img = RasterImage::from_fn(17, 5, |x, _| [x as u8 * 10, 0, 0]).unwrap();
        let p = rgb_to_yuv(&img).unwrap();
        assert_eq!((p.y.width, p.y.height), (32, 16));
        assert_eq!(p.y.get(31, 15), p.y.get(16, 4));
        let back = yuv_to_rgb(&p);
        assert_eq!((back.width(), back.height()), (17, 5));
    }

    #[test]
    fn zero_sized_image_is_rejected() {
        assert!(RasterImage::new(0, 4, Vec::new()).is_err());
    }

    #[test]
    fn round_trip_is_close_on_flat_colour_regions() {
        let img = uniform(16, 16, [200, 40, 90]);
        let back = yuv_to_rgb(&rgb_to_yuv(&img).unwrap());
        for (a, b) in img.as_bytes().iter().zip(back.as_bytes()) {
            assert!((i16::from(*a) - i16::from(*b)).abs() <= 2);
        }
    }
}
