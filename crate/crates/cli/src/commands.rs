use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cipherjpeg_core::analysis::{bpp, keyspace, leakage, rd_curve, HistogramKind, LeakageDistances, RdPoint};
use cipherjpeg_core::synth::class_image;
use cipherjpeg_core::{
    decode_image, decrypt_image, encode_plain, encrypt_image, CipherOptions, CipherPlan, CodecConfig, MasterKey,
    RasterImage, TransformBank,
};
use rayon::prelude::*;

use crate::io;
use crate::manifest::{self, DatasetEntry, EncryptManifest, KeyBits};

/// Bad arguments that clap could not catch. Maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Runs `f` on a pool of `jobs` threads (rayon's default when `None`).
fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?.install(f))
}

fn config(qf: u8) -> Result<CodecConfig> {
    CodecConfig::new(qf).map_err(|e| usage(e.to_string()))
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_bytes(path, text.as_bytes()),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

pub fn compress(input: &Path, out: &Path, qf: u8) -> Result<()> {
    let cfg = config(qf)?;
    let img = io::read_image(input)?;
    let stream = encode_plain(&img, &cfg)?;
    io::write_bytes(out, stream.as_bytes())?;
    println!("{}: {} bytes, {:.4} bpp", out.display(), stream.len(), bpp(&stream, img.width(), img.height()));
    Ok(())
}

pub fn encrypt(input: &Path, out: &Path, key: &MasterKey, qf: u8, sidecar: Option<&Path>) -> Result<()> {
    let cfg = config(qf)?;
    let img = io::read_image(input)?;
    let stream = encrypt_image(&img, key, &cfg)?;
    io::write_bytes(out, stream.as_bytes())?;
    let rate = bpp(&stream, img.width(), img.height());
    if let Some(path) = sidecar {
        let plan = CipherPlan::derive(key, img.width(), img.height(), CipherOptions::default());
        let key_bits = ["Y", "U", "V"]
            .into_iter()
            .zip(plan.key_traces())
            .map(|(component, t)| KeyBits {
                component,
                selection: t.selection_bits,
                blocks: t.block_bits,
                permutation: t.permutation_bits,
            })
            .collect();
        let m =
            EncryptManifest { width: img.width(), height: img.height(), qf, bytes: stream.len(), bpp: rate, key_bits };
        manifest::write_json(path, &m)?;
    }
    println!("{}: {} bytes, {rate:.4} bpp", out.display(), stream.len());
    Ok(())
}

pub fn decrypt(input: &Path, out: &Path, key: &MasterKey) -> Result<()> {
    let stream = io::read_jpeg(input)?;
    let img = decrypt_image(&stream, key).with_context(|| format!("decoding {}", input.display()))?;
    io::write_png(out, &img)
}

fn leakage_files(plain: &Path, cipher: &Path) -> Result<LeakageDistances> {
    let (p, c) = (io::read_jpeg(plain)?, io::read_jpeg(cipher)?);
    leakage(&p, &c).with_context(|| format!("comparing {} with {}", plain.display(), cipher.display()))
}

fn csv_row(d: &LeakageDistances) -> String {
    d.as_array().map(|v| v.to_string()).join(",")
}

pub fn analyze(plain: &Path, cipher: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<()> {
    if plain.is_file() && cipher.is_file() {
        let d = leakage_files(plain, cipher)?;
        println!("DCC,DCH,ACC,ACH");
        println!("{}", csv_row(&d));
        if let Some(path) = out {
            let mut text = String::from("image_id,kind,distance\n");
            for kind in HistogramKind::ALL {
                text += &format!("{},{kind},{}\n", io::stem(plain), d.get(kind));
            }
            io::write_bytes(path, text.as_bytes())?;
        }
        return Ok(());
    }
    if !(plain.is_dir() && cipher.is_dir()) {
        for p in [plain, cipher] {
            if !p.exists() {
                bail!("{} does not exist", p.display());
            }
        }
        return Err(usage("PLAIN and CIPHER must both be files or both be directories"));
    }

    let plains: BTreeMap<String, PathBuf> = io::list_jpegs(plain)?.into_iter().map(|p| (io::stem(&p), p)).collect();
    let ciphers: BTreeMap<String, PathBuf> = io::list_jpegs(cipher)?.into_iter().map(|p| (io::stem(&p), p)).collect();
    for id in plains.keys().filter(|k| !ciphers.contains_key(*k)) {
        eprintln!("warning: no cipher file for {id}");
    }
    for id in ciphers.keys().filter(|k| !plains.contains_key(*k)) {
        eprintln!("warning: no plain file for {id}");
    }
    let pairs: Vec<(&String, &PathBuf, &PathBuf)> =
        plains.iter().filter_map(|(id, p)| ciphers.get(id).map(|c| (id, p, c))).collect();
    if pairs.is_empty() {
        bail!("no plain/cipher pairs with matching file names");
    }
    let rows = in_pool(jobs, || pairs.par_iter().map(|(_, p, c)| leakage_files(p, c)).collect::<Result<Vec<_>>>())??;

    let mut table = String::from("image_id,DCC,DCH,ACC,ACH\n");
    let mut long = String::from("image_id,kind,distance\n");
    for ((id, _, _), d) in pairs.iter().zip(&rows) {
        table += &format!("{id},{}\n", csv_row(d));
        for kind in HistogramKind::ALL {
            long += &format!("{id},{kind},{}\n", d.get(kind));
        }
    }
    table += &format!("mean,{}\n", csv_row(&LeakageDistances::mean(&rows)));
    print!("{table}");
    if let Some(path) = out {
        io::write_bytes(path, long.as_bytes())?;
    }
    Ok(())
}

fn load_corpus(dir: &Path, jobs: Option<usize>) -> Result<Vec<RasterImage>> {
    let files = io::list_images(dir)?;
    if files.is_empty() {
        bail!("no PNG/PPM images in {}", dir.display());
    }
    in_pool(jobs, || files.par_iter().map(|f| io::read_image(f)).collect::<Result<Vec<_>>>())?
}

pub fn curve(dir: &Path, qfs: &[u8], key: Option<&MasterKey>, out: Option<&Path>, jobs: Option<usize>) -> Result<()> {
    if qfs.is_empty() {
        return Err(usage("--qf needs at least one value"));
    }
    for &qf in qfs {
        config(qf)?;
    }
    let images = load_corpus(dir, jobs)?;
    let points: Vec<RdPoint> = in_pool(jobs, || {
        qfs.par_iter().map(|&qf| rd_curve(&images, &[qf], key).map(|mut v| v.remove(0))).collect::<Result<Vec<_>, _>>()
    })??;
    let mut text = String::from("qf,bpp,psnr\n");
    for p in &points {
        text += &format!("{},{},{}\n", p.qf, p.bpp, p.psnr);
    }
    emit(out, &text)
}

pub fn keyspace_report(width: usize, height: usize) -> Result<()> {
    let report = keyspace(width, height).map_err(|e| usage(e.to_string()))?;
    println!("{report}");
    Ok(())
}

pub fn dump_bank(out: Option<&Path>) -> Result<()> {
    let mut text = String::from("index,row,c0,c1,c2,c3,c4,c5,c6,c7\n");
    for (k, t) in TransformBank::new().iter().enumerate() {
        for (r, row) in t.rows().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            text += &format!("{k},{r},{}\n", cells.join(","));
        }
    }
    emit(out, &text)
}

pub fn export_dataset(corpus: &Path, key: &MasterKey, qf: u8, out: &Path, jobs: Option<usize>) -> Result<()> {
    let cfg = config(qf)?;
    if !corpus.is_dir() {
        bail!("{} is not a directory", corpus.display());
    }
    let mut jobs_list = Vec::new();
    for class_dir in io::list_subdirs(corpus)? {
        let label = class_dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        for file in io::list_images(&class_dir)? {
            jobs_list.push((label.clone(), file));
        }
    }
    if jobs_list.is_empty() {
        bail!("no class subdirectories with PNG/PPM images in {}", corpus.display());
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let results = in_pool(jobs, || {
        jobs_list
            .par_iter()
            .map(|(label, file)| -> Result<DatasetEntry> {
                let img = io::read_image(file)?;
                let cipher = encrypt_image(&img, key, &cfg)?;
                let view = decode_image(&cipher)?;
                let rel = format!("{label}/{}.png", io::stem(file));
                io::write_png(&out.join(&rel), &view)?;
                Ok(DatasetEntry { path: rel, label: label.clone(), width: img.width(), height: img.height(), qf })
            })
            .collect::<Vec<_>>()
    })?;

    let mut entries = Vec::with_capacity(results.len());
    let mut failures = 0;
    for ((_, file), r) in jobs_list.iter().zip(results) {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => {
                failures += 1;
                eprintln!("skipped {}: {e:#}", file.display());
            }
        }
    }
    manifest::write_dataset(&out.join("manifest.csv"), &entries)?;
    println!("exported {} images to {}", entries.len(), out.display());
    if failures > 0 {
        return Err(anyhow!("{failures} of {} images failed", jobs_list.len()));
    }
    Ok(())
}

pub fn synth_corpus(
    out: &Path,
    classes: u32,
    per_class: u64,
    width: usize,
    height: usize,
    jobs: Option<usize>,
) -> Result<()> {
    if width == 0 || height == 0 || classes == 0 || per_class == 0 {
        return Err(usage("sizes and counts must be positive"));
    }
    let items: Vec<(u32, u64)> = (0..classes).flat_map(|c| (0..per_class).map(move |i| (c, i))).collect();
    in_pool(jobs, || {
        items.par_iter().try_for_each(|&(c, i)| {
            let img = class_image(width, height, c, i);
            io::write_png(&out.join(format!("class_{c:02}")).join(format!("img_{i:04}.png")), &img)
        })
    })??;
    println!("wrote {} images to {}", items.len(), out.display());
    Ok(())
}
