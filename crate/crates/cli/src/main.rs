mod commands;
mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use cipherjpeg_core::MasterKey;
use clap::{Parser, Subcommand};

use commands::UsageError;

#[derive(Debug, Parser)]
#[command(name = "cipherjpeg", version, about = "Format-compliant JPEG encryption and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// Parsed after clap so that a malformed key is never echoed in an error.
fn parse_key(s: &str) -> anyhow::Result<MasterKey> {
    MasterKey::from_hex(s).map_err(|e| UsageError(format!("--key: {e}")).into())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or("expected WIDTHxHEIGHT")?;
    let w = w.parse().map_err(|_| "bad width")?;
    let h = h.parse().map_err(|_| "bad height")?;
    Ok((w, h))
}

#[derive(Debug, clap::Args)]
struct KeyArg {
    /// Master key, 64 hex characters.
    #[arg(long, env = "CIPHERJPEG_KEY", hide_env_values = true)]
    key: String,
}

impl KeyArg {
    fn parse(&self) -> anyhow::Result<MasterKey> {
        parse_key(&self.key)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encrypt a PNG/PPM image into a JPEG file.
    Encrypt {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        #[arg(long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
        qf: u8,
        /// Also write a JSON sidecar with dimensions, QF and key-bit counts.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Decrypt an encrypted JPEG into a PNG image.
    Decrypt {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        key: KeyArg,
    },
    /// Encode a PNG/PPM image as an ordinary (unencrypted) JPEG.
    Compress {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
        qf: u8,
    },
    /// Histogram distances DCC,DCH,ACC,ACH between plain and cipher JPEGs
    /// (two files, or two directories matched by file name).
    Analyze {
        plain: PathBuf,
        cipher: PathBuf,
        /// Long-format CSV (image_id,kind,distance).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Rate-distortion points (qf,bpp,psnr) averaged over a directory of images.
    Curve {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70,80,90",
              value_parser = clap::value_parser!(u8).range(1..=100))]
        qf: Vec<u8>,
        /// Measure the encrypt/decrypt path instead of plain JPEG.
        #[arg(long, env = "CIPHERJPEG_KEY", hide_env_values = true)]
        key: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Exact key-space size for an image of the given dimensions.
    Keyspace { width: usize, height: usize },
    /// Encrypt a class-per-subdirectory corpus and export the decoded cipher
    /// images as PNG plus manifest.csv.
    ExportDataset {
        dir: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        #[arg(long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
        qf: u8,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the 128 transform matrices as CSV.
    DumpBank {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic class-per-subdirectory image corpus.
    SynthCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        classes: u32,
        #[arg(long, default_value_t = 50)]
        per_class: u64,
        #[arg(long, default_value = "128x96", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Encrypt { input, out, key, qf, manifest } => {
            commands::encrypt(&input, &out, &key.parse()?, qf, manifest.as_deref())
        }
        Command::Decrypt { input, out, key } => commands::decrypt(&input, &out, &key.parse()?),
        Command::Compress { input, out, qf } => commands::compress(&input, &out, qf),
        Command::Analyze { plain, cipher, out, jobs } => commands::analyze(&plain, &cipher, out.as_deref(), jobs),
        Command::Curve { dir, qf, key, out, jobs } => {
            let key = key.as_deref().map(parse_key).transpose()?;
            commands::curve(&dir, &qf, key.as_ref(), out.as_deref(), jobs)
        }
        Command::Keyspace { width, height } => commands::keyspace_report(width, height),
        Command::ExportDataset { dir, key, qf, out, jobs } => {
            commands::export_dataset(&dir, &key.parse()?, qf, &out, jobs)
        }
        Command::DumpBank { out } => commands::dump_bank(out.as_deref()),
        Command::SynthCorpus { out, classes, per_class, size: (w, h), jobs } => {
            commands::synth_corpus(&out, classes, per_class, w, h, jobs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
