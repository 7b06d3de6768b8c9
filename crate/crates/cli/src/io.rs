use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cipherjpeg_core::{JpegStream, RasterImage};

const IMAGE_EXTS: [&str; 4] = ["png", "ppm", "pnm", "pgm"];
const JPEG_EXTS: [&str; 2] = ["jpg", "jpeg"];

fn has_ext(path: &Path, exts: &[&str]) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| exts.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

pub fn read_image(path: &Path) -> Result<RasterImage> {
    let img = image::open(path).with_context(|| format!("reading {}", path.display()))?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(RasterImage::new(w, h, img.into_raw())?)
}

pub fn write_png(path: &Path, img: &RasterImage) -> Result<()> {
    ensure_parent(path)?;
    image::save_buffer_with_format(
        path,
        img.as_bytes(),
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::Rgb8,
        image::ImageFormat::Png,
    )
    .with_context(|| format!("writing {}", path.display()))
}

pub fn read_jpeg(path: &Path) -> Result<JpegStream> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(JpegStream::from_bytes(bytes))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
        }
        _ => Ok(()),
    }
}

fn list_files(dir: &Path, exts: &[&str]) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && has_ext(&path, exts) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// PNG/PPM files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    list_files(dir, &IMAGE_EXTS)
}

pub fn list_jpegs(dir: &Path) -> Result<Vec<PathBuf>> {
    list_files(dir, &JPEG_EXTS)
}

/// Subdirectories of `dir`, sorted by name.
pub fn list_subdirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
