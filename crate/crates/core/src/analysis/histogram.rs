use alloc::collections::BTreeMap;
use core::fmt;

use crate::codec::{DecodedJpeg, JpegStream};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HistogramKind {
    /// Quantized DC values (after undoing DPCM).
    Dcc,
    /// DC Huffman size categories.
    Dch,
    /// Quantized AC values, zeros included.
    Acc,
    /// AC run/size Huffman symbols, EOB and ZRL included.
    Ach,
}

impl HistogramKind {
    pub const ALL: [HistogramKind; 4] =
        [HistogramKind::Dcc, HistogramKind::Dch, HistogramKind::Acc, HistogramKind::Ach];

    pub fn as_str(self) -> &'static str {
        match self {
            HistogramKind::Dcc => "DCC",
            HistogramKind::Dch => "DCH",
            HistogramKind::Acc => "ACC",
            HistogramKind::Ach => "ACH",
        }
    }
}

impl fmt::Display for HistogramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative symbol frequencies, summed over all colour components.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolHistogram {
    pub kind: HistogramKind,
    pub bins: BTreeMap<i32, f64>,
}

impl SymbolHistogram {
    fn from_counts(kind: HistogramKind, counts: BTreeMap<i32, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let bins = counts.into_iter().filter(|&(_, c)| c > 0).map(|(k, c)| (k, c as f64 / total as f64)).collect();
        SymbolHistogram { kind, bins }
    }

    pub fn total(&self) -> f64 {
        self.bins.values().sum()
    }
}

/// All four histograms of a parsed stream, in [`HistogramKind::ALL`] order.
pub fn histograms(decoded: &DecodedJpeg) -> [SymbolHistogram; 4] {
    let mut dcc = BTreeMap::new();
    let mut acc = BTreeMap::new();
    for comp in &decoded.frame.components {
        for b in &comp.blocks {
            *dcc.entry(i32::from(b.0[0])).or_insert(0u64) += 1;
            for &v in &b.0[1..] {
                *acc.entry(i32::from(v)).or_insert(0u64) += 1;
            }
        }
    }
    let mut dch = BTreeMap::new();
    let mut ach = BTreeMap::new();
    for counts in &decoded.symbols {
        for (sym, &c) in counts.dc.iter().enumerate() {
            *dch.entry(sym as i32).or_insert(0u64) += c;
        }
        for (sym, &c) in counts.ac.iter().enumerate() {
            *ach.entry(sym as i32).or_insert(0u64) += c;
        }
    }
    [
        SymbolHistogram::from_counts(HistogramKind::Dcc, dcc),
        SymbolHistogram::from_counts(HistogramKind::Dch, dch),
        SymbolHistogram::from_counts(HistogramKind::Acc, acc),
        SymbolHistogram::from_counts(HistogramKind::Ach, ach),
    ]
}

pub fn extract_histogram(stream: &JpegStream, kind: HistogramKind) -> Result<SymbolHistogram> {
    let decoded = stream.decode()?;
    let [dcc, dch, acc, ach] = histograms(&decoded);
    Ok(match kind {
        HistogramKind::Dcc => dcc,
        HistogramKind::Dch => dch,
        HistogramKind::Acc => acc,
        HistogramKind::Ach => ach,
    })
}

/// Euclidean distance over the union of bins; absent bins count as 0.
pub fn hist_distance(a: &SymbolHistogram, b: &SymbolHistogram) -> Result<f64> {
    if a.kind != b.kind {
        return Err(Error::invalid("cannot compare histograms of different kinds"));
    }
    let mut sum = 0.0;
    for (k, &x) in &a.bins {
        let y = b.bins.get(k).copied().unwrap_or(0.0);
        sum += (x - y) * (x - y);
    }
    for (k, &y) in &b.bins {
        if !a.bins.contains_key(k) {
            sum += y * y;
        }
    }
    Ok(libm::sqrt(sum))
}

/// The four histogram distances between two streams.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LeakageDistances {
    pub dcc: f64,
    pub dch: f64,
    pub acc: f64,
    pub ach: f64,
}

impl LeakageDistances {
    pub fn as_array(&self) -> [f64; 4] {
        [self.dcc, self.dch, self.acc, self.ach]
    }

    pub fn get(&self, kind: HistogramKind) -> f64 {
        match kind {
            HistogramKind::Dcc => self.dcc,
            HistogramKind::Dch => self.dch,
            HistogramKind::Acc => self.acc,
            HistogramKind::Ach => self.ach,
        }
    }

    /// Component-wise mean.
    pub fn mean(rows: &[LeakageDistances]) -> LeakageDistances {
        let n = rows.len().max(1) as f64;
        let mut m = LeakageDistances::default();
        for r in rows {
            m.dcc += r.dcc / n;
            m.dch += r.dch / n;
            m.acc += r.acc / n;
            m.ach += r.ach / n;
        }
        m
    }
}

pub fn leakage(plain: &JpegStream, cipher: &JpegStream) -> Result<LeakageDistances> {
    let a = histograms(&plain.decode()?);
    let b = histograms(&cipher.decode()?);
    Ok(LeakageDistances {
        dcc: hist_distance(&a[0], &b[0])?,
        dch: hist_distance(&a[1], &b[1])?,
        acc: hist_distance(&a[2], &b[2])?,
        ach: hist_distance(&a[3], &b[3])?,
    })
}
