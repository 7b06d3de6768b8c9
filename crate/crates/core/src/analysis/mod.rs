//! Security and compression evaluation: coefficient/Huffman-symbol histogram
//! distances, PSNR/BPP rate-distortion points and the exact key-space size.

mod histogram;
mod keyspace;
mod metrics;

pub use self::histogram::{
    extract_histogram, hist_distance, histograms, leakage, HistogramKind, LeakageDistances, SymbolHistogram,
};
pub use self::keyspace::{binomial, keyspace, KeySpaceReport};
pub use self::metrics::{bpp, psnr, rd_curve, RdPoint};
