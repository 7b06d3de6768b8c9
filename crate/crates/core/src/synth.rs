//! Deterministic synthetic photographs for tests, demos and toy datasets.
//!
//! The images mix multi-octave value noise (a roughly 1/f spectrum), smooth
//! colour gradients and a handful of soft-edged shapes, which gives JPEG the
//! same kind of work as a natural photograph: smooth regions, textures and
//! edges. A `class` fixes palette, texture scale and shape family so that
//! images of one class resemble each other.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::codec::RasterImage;

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn signed(rng: &mut ChaCha8Rng) -> f64 {
    2.0 * unit(rng) - 1.0
}

/// Smoothly interpolated lattice noise with the given cell size.
struct ValueNoise {
    cell: f64,
    cols: usize,
    values: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, width: usize, height: usize, cell: f64) -> Self {
        let cols = (width as f64 / cell) as usize + 2;
        let rows = (height as f64 / cell) as usize + 2;
        let values = (0..cols * rows).map(|_| signed(rng)).collect();
        ValueNoise { cell, cols, values }
    }

    fn sample(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / self.cell, y / self.cell);
        let (ix, iy) = (gx as usize, gy as usize);
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(gx - ix as f64), smooth(gy - iy as f64));
        let at = |c: usize, r: usize| self.values[r * self.cols + c];
        let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
        let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

struct Fractal {
    octaves: Vec<(ValueNoise, f64)>,
}

impl Fractal {
    fn new(
        rng: &mut ChaCha8Rng,
        width: usize,
        height: usize,
        base_cell: f64,
        octaves: usize,
        persistence: f64,
    ) -> Self {
        let mut amp = 1.0;
        let mut cell = base_cell;
        let mut out = Vec::with_capacity(octaves);
        for _ in 0..octaves {
            out.push((ValueNoise::new(rng, width, height, cell.max(1.5)), amp));
            amp *= persistence;
            cell /= 2.0;
        }
        Fractal { octaves: out }
    }

    fn sample(&self, x: f64, y: f64) -> f64 {
        self.octaves.iter().map(|(n, a)| a * n.sample(x, y)).sum()
    }
}

enum ShapeKind {
    Disc,
    Rect,
    Band,
}

struct Shape {
    kind: ShapeKind,
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    angle: (f64, f64),
    colour: [f64; 3],
    softness: f64,
}

impl Shape {
    /// Coverage in [0, 1] at a pixel.
    fn coverage(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let (c, s) = self.angle;
        let (u, v) = (dx * c + dy * s, -dx * s + dy * c);
        // signed distance-like value, negative inside
        let d = match self.kind {
            ShapeKind::Disc => {
                libm::hypot(u / self.rx, v / self.ry) * self.rx.min(self.ry) - self.rx.min(self.ry)
            }
            ShapeKind::Rect => (libm::fabs(u) - self.rx).max(libm::fabs(v) - self.ry),
            ShapeKind::Band => libm::fabs(v) - self.ry,
        };
        (0.5 - d / self.softness).clamp(0.0, 1.0)
    }
}

/// Class-dependent appearance parameters.
struct Style {
    palette: [[f64; 3]; 2],
    base_cell: f64,
    persistence: f64,
    shape_kind: u32,
    contrast: f64,
}

fn style_for_class(class: u32) -> Style {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0000 ^ u64::from(class));
    let mut colour = || [40.0 + 180.0 * unit(&mut rng), 40.0 + 180.0 * unit(&mut rng), 40.0 + 180.0 * unit(&mut rng)];
    let palette = [colour(), colour()];
    Style {
        palette,
        base_cell: 12.0 + 52.0 * unit(&mut rng),
        persistence: 0.4 + 0.25 * unit(&mut rng),
        shape_kind: class % 3,
        contrast: 45.0 + 40.0 * unit(&mut rng),
    }
}

/// One image of `class`, varied by `instance`.
pub fn class_image(width: usize, height: usize, class: u32, instance: u64) -> RasterImage {
    let style = style_for_class(class);
    let seed = (u64::from(class) << 40) ^ instance.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);

    let luma = Fractal::new(&mut rng, width, height, style.base_cell, 5, style.persistence);
    let tint_a = Fractal::new(&mut rng, width, height, style.base_cell * 2.0, 3, 0.5);
    let tint_b = Fractal::new(&mut rng, width, height, style.base_cell * 2.0, 3, 0.5);
    let gradient_dir = signed(&mut rng) * core::f64::consts::PI;
    let (gc, gs) = (libm::cos(gradient_dir), libm::sin(gradient_dir));

    let shape_count = 2 + (rng.next_u32() % 5) as usize;
    let shapes: Vec<Shape> = (0..shape_count)
        .map(|_| {
            let kind = match (style.shape_kind + rng.next_u32() % 4 / 3) % 3 {
                0 => ShapeKind::Disc,
                1 => ShapeKind::Rect,
                _ => ShapeKind::Band,
            };
            let theta = signed(&mut rng) * core::f64::consts::PI;
            let pick = (rng.next_u32() % 2) as usize;
            let jitter = 50.0 * signed(&mut rng);
            Shape {
                kind,
                cx: w * unit(&mut rng),
                cy: h * unit(&mut rng),
                rx: (0.08 + 0.25 * unit(&mut rng)) * w,
                ry: (0.05 + 0.2 * unit(&mut rng)) * h,
                angle: (libm::cos(theta), libm::sin(theta)),
                colour: style.palette[pick].map(|c| (255.0 - c + jitter).clamp(0.0, 255.0)),
                softness: 0.8 + 3.0 * unit(&mut rng),
            }
        })
        .collect();

    let mut grain = vec![0.0; width * height];
    for g in grain.iter_mut() {
        *g = 3.0 * signed(&mut rng);
    }

    RasterImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let t = ((fx / w - 0.5) * gc + (fy / h - 0.5) * gs + 0.5).clamp(0.0, 1.0);
        let mut rgb = [0.0; 3];
        for (k, v) in rgb.iter_mut().enumerate() {
            *v = style.palette[0][k] * (1.0 - t) + style.palette[1][k] * t;
        }
        let l = style.contrast * luma.sample(fx, fy);
        let (a, b) = (25.0 * tint_a.sample(fx, fy), 25.0 * tint_b.sample(fx, fy));
        rgb[0] += l + a;
        rgb[1] += l - 0.5 * a + 0.5 * b;
        rgb[2] += l - b;
        for s in &shapes {
            let cov = s.coverage(fx, fy);
            if cov > 0.0 {
                for (k, v) in rgb.iter_mut().enumerate() {
                    let textured = s.colour[k] + 0.5 * l;
                    *v = *v * (1.0 - cov) + textured * cov;
                }
            }
        }
        let g = grain[y * width + x];
        rgb.map(|v| libm::round(v + g).clamp(0.0, 255.0) as u8)
    })
    .expect("dimensions are nonzero")
}

/// A natural-looking test image drawn from a mix of classes.
pub fn natural_image(width: usize, height: usize, seed: u64) -> RasterImage {
    class_image(width, height, (seed % 17) as u32, seed)
}
