use alloc::vec;
use alloc::vec::Vec;

use super::bitio::{BitReader, BitWriter};
use super::huffman::{
    category, read_magnitude, write_magnitude, HuffmanDecoder, HuffmanEncoder, HuffmanTable, EOB, ZRL,
};
use super::quant::{CodecConfig, ComponentKind, QuantBlock, QuantTable, ZIGZAG};
use crate::error::{Error, Result};

const SOI: u8 = 0xD8;
const EOI: u8 = 0xD9;
const SOF0: u8 = 0xC0;
const DHT: u8 = 0xC4;
const DQT: u8 = 0xDB;
const DRI: u8 = 0xDD;
const SOS: u8 = 0xDA;
const APP0: u8 = 0xE0;

/// A complete JFIF byte stream, plain or encrypted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JpegStream {
    bytes: Vec<u8>,
}

impl JpegStream {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        JpegStream { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn decode(&self) -> Result<DecodedJpeg> {
        decode_jfif(&self.bytes)
    }
}

/// Quantized blocks of one frame component, raster order over its block grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentBlocks {
    pub id: u8,
    pub h_samp: u8,
    pub v_samp: u8,
    pub table: u8,
    pub blocks_wide: usize,
    pub blocks_high: usize,
    pub blocks: Vec<QuantBlock>,
}

/// All quantized blocks of a frame plus its pixel dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantFrame {
    pub width: usize,
    pub height: usize,
    pub components: Vec<ComponentBlocks>,
}

impl QuantFrame {
    /// Wraps three raster-ordered block sequences (Y, Cb, Cr) in the fixed
    /// 4:2:0 layout, checking the counts against `width`×`height`.
    pub fn yuv420(width: usize, height: usize, blocks: [Vec<QuantBlock>; 3]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("frame has a zero dimension"));
        }
        let (mx, my) = (width.div_ceil(16), height.div_ceil(16));
        let mut components = Vec::with_capacity(3);
        for (i, blocks) in blocks.into_iter().enumerate() {
            let (samp, table) = if i == 0 { (2u8, 0u8) } else { (1, 1) };
            let (bw, bh) = (mx * usize::from(samp), my * usize::from(samp));
            if blocks.len() != bw * bh {
                return Err(Error::invalid("block count does not match frame dimensions"));
            }
            components.push(ComponentBlocks {
                id: i as u8 + 1,
                h_samp: samp,
                v_samp: samp,
                table,
                blocks_wide: bw,
                blocks_high: bh,
                blocks,
            });
        }
        Ok(QuantFrame { width, height, components })
    }

    pub fn mcu_count(&self) -> usize {
        let hmax = self.components.iter().map(|c| usize::from(c.h_samp)).max().unwrap_or(1);
        let vmax = self.components.iter().map(|c| usize::from(c.v_samp)).max().unwrap_or(1);
        if self.components.len() == 1 {
            return self.components[0].blocks.len();
        }
        self.width.div_ceil(8 * hmax) * self.height.div_ceil(8 * vmax)
    }

    fn is_yuv420(&self) -> bool {
        let (mx, my) = (self.width.div_ceil(16), self.height.div_ceil(16));
        self.components.len() == 3
            && self.components.iter().enumerate().all(|(i, c)| {
                let s = if i == 0 { 2 } else { 1 };
                c.h_samp == s
                    && c.v_samp == s
                    && c.blocks_wide == mx * usize::from(s)
                    && c.blocks_high == my * usize::from(s)
                    && c.blocks.len() == c.blocks_wide * c.blocks_high
            })
    }
}

/// Per-component tallies of the Huffman symbols met while decoding a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolCounts {
    /// DC magnitude categories (SSSS).
    pub dc: [u64; 16],
    /// AC run/size symbols (RRRRSSSS), including EOB and ZRL.
    pub ac: [u64; 256],
}

impl Default for SymbolCounts {
    fn default() -> Self {
        SymbolCounts { dc: [0; 16], ac: [0; 256] }
    }
}

/// Result of parsing a baseline JFIF stream.
#[derive(Debug, Clone)]
pub struct DecodedJpeg {
    pub frame: QuantFrame,
    pub quant_tables: [Option<QuantTable>; 4],
    /// Indexed like `frame.components`.
    pub symbols: Vec<SymbolCounts>,
}

impl DecodedJpeg {
    pub fn mcu_count(&self) -> usize {
        self.frame.mcu_count()
    }

    pub fn quant_table(&self, component: usize) -> Result<&QuantTable> {
        let c = &self.frame.components[component];
        self.quant_tables[usize::from(c.table)]
            .as_ref()
            .ok_or(Error::parse(0, "component references an undefined quantization table"))
    }

    /// The quality factor, if the tables are IJG-scaled Annex-K tables.
    pub fn codec_config(&self) -> Option<CodecConfig> {
        if self.frame.components.len() != 3 {
            return None;
        }
        let luma = self.quant_table(0).ok()?;
        let chroma = self.quant_table(1).ok()?;
        (self.quant_table(2).ok()? == chroma).then_some(())?;
        CodecConfig::from_tables(luma, chroma)
    }

    pub fn is_yuv420(&self) -> bool {
        self.frame.is_yuv420()
    }
}

fn put_marker(out: &mut Vec<u8>, marker: u8) {
    out.extend_from_slice(&[0xFF, marker]);
}

fn put_segment(out: &mut Vec<u8>, marker: u8, body: &[u8]) {
    put_marker(out, marker);
    out.extend_from_slice(&((body.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(body);
}

fn dqt_body(id: u8, table: &QuantTable) -> Vec<u8> {
    let mut body = Vec::with_capacity(65);
    body.push(id);
    body.extend(ZIGZAG.iter().map(|&n| table.0[n] as u8));
    body
}

fn dht_body(class_id: u8, table: &HuffmanTable) -> Vec<u8> {
    let mut body = Vec::with_capacity(17 + table.values.len());
    body.push(class_id);
    body.extend_from_slice(&table.bits);
    body.extend_from_slice(&table.values);
    body
}

struct ComponentCoder {
    dc: HuffmanEncoder,
    ac: HuffmanEncoder,
}

fn encode_block(w: &mut BitWriter, q: &QuantBlock, pred: &mut i32, coder: &ComponentCoder) -> Result<()> {
    let dc = i32::from(q.0[0]);
    let diff = dc - *pred;
    *pred = dc;
    let cat = category(diff);
    if cat > 11 {
        return Err(Error::Encode(alloc::format!("DC difference {diff} exceeds the baseline range")));
    }
    coder.dc.emit(w, cat)?;
    write_magnitude(w, diff, cat);

    let mut run = 0u8;
    for &n in &ZIGZAG[1..] {
        let v = i32::from(q.0[n]);
        if v == 0 {
            run += 1;
            continue;
        }
        while run > 15 {
            coder.ac.emit(w, ZRL)?;
            run -= 16;
        }
        let cat = category(v);
        if cat > 10 {
            return Err(Error::Encode(alloc::format!("AC level {v} exceeds the baseline range")));
        }
        coder.ac.emit(w, run << 4 | cat)?;
        write_magnitude(w, v, cat);
        run = 0;
    }
    if run > 0 {
        coder.ac.emit(w, EOB)?;
    }
    Ok(())
}

/// Writes a 4:2:0 frame of quantized blocks as a baseline JFIF stream using
/// the Annex-K Huffman tables and the tables of `cfg`.
///
/// Segment layout: SOI, APP0, DQT×2, SOF0, DHT×4, SOS, entropy data, EOI.
pub fn entropy_encode(frame: &QuantFrame, cfg: &CodecConfig) -> Result<JpegStream> {
    if !frame.is_yuv420() {
        return Err(Error::invalid("frame is not in the 4:2:0 three-component layout"));
    }
    let (width, height) = match (u16::try_from(frame.width), u16::try_from(frame.height)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(Error::Unsupported("image dimensions above 65535")),
    };
    let luma_q = cfg.quant_table(ComponentKind::Luma);
    let chroma_q = cfg.quant_table(ComponentKind::Chroma);
    let tables = [
        HuffmanTable::std_dc_luma(),
        HuffmanTable::std_ac_luma(),
        HuffmanTable::std_dc_chroma(),
        HuffmanTable::std_ac_chroma(),
    ];

    let mut out = Vec::with_capacity(1024);
    put_marker(&mut out, SOI);
    put_segment(&mut out, APP0, &[b'J', b'F', b'I', b'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0]);
    put_segment(&mut out, DQT, &dqt_body(0, &luma_q));
    put_segment(&mut out, DQT, &dqt_body(1, &chroma_q));
    let mut sof = Vec::with_capacity(15);
    sof.push(8);
    sof.extend_from_slice(&height.to_be_bytes());
    sof.extend_from_slice(&width.to_be_bytes());
    sof.push(3);
    for c in &frame.components {
        sof.extend_from_slice(&[c.id, c.h_samp << 4 | c.v_samp, c.table]);
    }
    put_segment(&mut out, SOF0, &sof);
    for (class_id, t) in [0x00u8, 0x10, 0x01, 0x11].into_iter().zip(&tables) {
        put_segment(&mut out, DHT, &dht_body(class_id, t));
    }
    put_segment(&mut out, SOS, &[3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0]);

    let luma = ComponentCoder { dc: HuffmanEncoder::new(&tables[0]), ac: HuffmanEncoder::new(&tables[1]) };
    let chroma = ComponentCoder { dc: HuffmanEncoder::new(&tables[2]), ac: HuffmanEncoder::new(&tables[3]) };
    let mut w = BitWriter::new();
    let mut preds = [0i32; 3];
    let (mx, my) = (frame.width.div_ceil(16), frame.height.div_ceil(16));
    for mcu_y in 0..my {
        for mcu_x in 0..mx {
            for (ci, comp) in frame.components.iter().enumerate() {
                let coder = if ci == 0 { &luma } else { &chroma };
                let (h, v) = (usize::from(comp.h_samp), usize::from(comp.v_samp));
                for by in 0..v {
                    for bx in 0..h {
                        let idx = (mcu_y * v + by) * comp.blocks_wide + mcu_x * h + bx;
                        encode_block(&mut w, &comp.blocks[idx], &mut preds[ci], coder)?;
                    }
                }
            }
        }
    }
    out.extend_from_slice(&w.finish());
    put_marker(&mut out, EOI);
    Ok(JpegStream { bytes: out })
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn u8(&mut self) -> Result<u8> {
        let b = *self.data.get(self.pos).ok_or(Error::parse(self.pos, "unexpected end of stream"))?;
        self.pos += 1;
        Ok(b)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from(self.u8()?) << 8 | u16::from(self.u8()?))
    }

    /// Reads a segment length and returns the segment body.
    fn segment(&mut self) -> Result<(usize, &'a [u8])> {
        let start = self.pos;
        let len = usize::from(self.u16()?);
        if len < 2 || start + len > self.data.len() {
            return Err(Error::parse(start, "segment length runs past the end of the stream"));
        }
        self.pos = start + len;
        Ok((start + 2, &self.data[start + 2..start + len]))
    }

    fn marker(&mut self) -> Result<u8> {
        let at = self.pos;
        if self.u8()? != 0xFF {
            return Err(Error::parse(at, "expected a marker"));
        }
        let mut m = self.u8()?;
        while m == 0xFF {
            m = self.u8()?;
        }
        if m == 0x00 {
            return Err(Error::parse(at, "expected a marker"));
        }
        Ok(m)
    }
}

struct FrameHeader {
    width: usize,
    height: usize,
    components: Vec<(u8, u8, u8, u8)>,
}

fn parse_sof(offset: usize, body: &[u8]) -> Result<FrameHeader> {
    if body.len() < 6 {
        return Err(Error::parse(offset, "SOF segment too short"));
    }
    if body[0] != 8 {
        return Err(Error::Unsupported("sample precision other than 8 bits"));
    }
    let height = usize::from(u16::from_be_bytes([body[1], body[2]]));
    let width = usize::from(u16::from_be_bytes([body[3], body[4]]));
    let n = usize::from(body[5]);
    if height == 0 {
        return Err(Error::Unsupported("height defined by DNL marker"));
    }
    if width == 0 || n == 0 || n > 4 || body.len() != 6 + 3 * n {
        return Err(Error::parse(offset, "invalid SOF header"));
    }
    let mut components = Vec::with_capacity(n);
    for c in body[6..].chunks_exact(3) {
        let (h, v) = (c[1] >> 4, c[1] & 15);
        if !(1..=4).contains(&h) || !(1..=4).contains(&v) || c[2] > 3 {
            return Err(Error::parse(offset, "invalid component sampling or table"));
        }
        components.push((c[0], h, v, c[2]));
    }
    Ok(FrameHeader { width, height, components })
}

fn decode_block(
    r: &mut BitReader<'_>,
    dc: &HuffmanDecoder,
    ac: &HuffmanDecoder,
    pred: &mut i32,
    counts: &mut SymbolCounts,
) -> Result<QuantBlock> {
    let mut q = [0i16; 64];
    let cat = dc.decode(r)?;
    if cat > 11 {
        return Err(Error::parse(r.position(), "DC category above 11"));
    }
    counts.dc[usize::from(cat)] += 1;
    *pred += read_magnitude(r, cat)?;
    q[0] = i16::try_from(*pred).map_err(|_| Error::parse(r.position(), "DC value out of range"))?;
    let mut k = 1usize;
    while k < 64 {
        let rs = ac.decode(r)?;
        counts.ac[usize::from(rs)] += 1;
        let (run, size) = (usize::from(rs >> 4), rs & 15);
        if size == 0 {
            match rs {
                EOB => break,
                ZRL if k + 16 <= 64 => {
                    k += 16;
                    continue;
                }
                _ => return Err(Error::parse(r.position(), "invalid AC run/size symbol")),
            }
        }
        if size > 10 {
            return Err(Error::parse(r.position(), "AC category above 10"));
        }
        k += run;
        if k > 63 {
            return Err(Error::parse(r.position(), "AC run past the end of the block"));
        }
        q[ZIGZAG[k]] = read_magnitude(r, size)? as i16;
        k += 1;
    }
    Ok(QuantBlock(q))
}

/// Parses a baseline (SOF0, single scan, no restart intervals) JFIF stream
/// and recovers every quantized block exactly.
pub fn decode_jfif(bytes: &[u8]) -> Result<DecodedJpeg> {
    let mut cur = Cursor { data: bytes, pos: 0 };
    if bytes.len() < 2 || bytes[0] != 0xFF || bytes[1] != SOI {
        return Err(Error::parse(0, "missing SOI marker"));
    }
    cur.pos = 2;
    let mut quant_tables: [Option<QuantTable>; 4] = [None; 4];
    let mut dc_tables: [Option<HuffmanTable>; 4] = Default::default();
    let mut ac_tables: [Option<HuffmanTable>; 4] = Default::default();
    let mut header: Option<FrameHeader> = None;

    loop {
        let at = cur.pos;
        let marker = cur.marker()?;
        match marker {
            SOF0 => {
                if header.is_some() {
                    return Err(Error::parse(at, "more than one frame header"));
                }
                let (off, body) = cur.segment()?;
                header = Some(parse_sof(off, body)?);
            }
            0xC1 => return Err(Error::Unsupported("extended sequential DCT")),
            0xC2 => return Err(Error::Unsupported("progressive DCT")),
            0xC3 | 0xC5..=0xC7 | 0xC9..=0xCB | 0xCD..=0xCF => {
                return Err(Error::Unsupported("lossless, hierarchical or arithmetic-coded JPEG"))
            }
            DQT => {
                let (off, body) = cur.segment()?;
                let mut rest = body;
                while !rest.is_empty() {
                    let (pq, tq) = (rest[0] >> 4, usize::from(rest[0] & 15));
                    if pq != 0 {
                        return Err(Error::Unsupported("16-bit quantization tables"));
                    }
                    if tq > 3 || rest.len() < 65 {
                        return Err(Error::parse(off, "invalid DQT segment"));
                    }
                    let mut t = [0u16; 64];
                    for (k, &v) in rest[1..65].iter().enumerate() {
                        if v == 0 {
                            return Err(Error::parse(off, "zero quantizer step"));
                        }
                        t[ZIGZAG[k]] = u16::from(v);
                    }
                    quant_tables[tq] = Some(QuantTable(t));
                    rest = &rest[65..];
                }
            }
            DHT => {
                let (off, body) = cur.segment()?;
                let mut rest = body;
                while !rest.is_empty() {
                    if rest.len() < 17 {
                        return Err(Error::parse(off, "invalid DHT segment"));
                    }
                    let (class, id) = (rest[0] >> 4, usize::from(rest[0] & 15));
                    let mut bits = [0u8; 16];
                    bits.copy_from_slice(&rest[1..17]);
                    let n: usize = bits.iter().map(|&b| usize::from(b)).sum();
                    if class > 1 || id > 3 || rest.len() < 17 + n {
                        return Err(Error::parse(off, "invalid DHT segment"));
                    }
                    let table = HuffmanTable::new(bits, rest[17..17 + n].to_vec())
                        .map_err(|_| Error::parse(off, "invalid Huffman table"))?;
                    if class == 0 {
                        dc_tables[id] = Some(table);
                    } else {
                        ac_tables[id] = Some(table);
                    }
                    rest = &rest[17 + n..];
                }
            }
            DRI => {
                let (off, body) = cur.segment()?;
                if body.len() != 2 {
                    return Err(Error::parse(off, "invalid DRI segment"));
                }
                if body != [0, 0] {
                    return Err(Error::Unsupported("restart intervals"));
                }
            }
            SOS => {
                let (off, body) = cur.segment()?;
                let hdr = header.as_ref().ok_or(Error::parse(at, "scan before frame header"))?;
                let (frame, symbols, end) = decode_scan(bytes, off, body, cur.pos, hdr, &dc_tables, &ac_tables)?;
                cur.pos = end;
                let trailer = cur.pos;
                match cur.marker() {
                    Ok(EOI) => {}
                    Ok(SOS) | Ok(DHT) => return Err(Error::Unsupported("multiple scans")),
                    _ => return Err(Error::parse(trailer, "missing EOI marker after scan")),
                }
                for c in &frame.components {
                    if quant_tables[usize::from(c.table)].is_none() {
                        return Err(Error::parse(off, "component references an undefined quantization table"));
                    }
                }
                return Ok(DecodedJpeg { frame, quant_tables, symbols });
            }
            EOI => return Err(Error::parse(at, "end of image before any scan")),
            SOI => return Err(Error::parse(at, "unexpected SOI marker")),
            0xD0..=0xD7 | 0x01 => return Err(Error::parse(at, "unexpected standalone marker")),
            _ => {
                // APPn, COM and anything else with a length field
                cur.segment()?;
            }
        }
    }
}

type ScanOutput = (QuantFrame, Vec<SymbolCounts>, usize);

fn decode_scan(
    bytes: &[u8],
    off: usize,
    body: &[u8],
    data_start: usize,
    hdr: &FrameHeader,
    dc_tables: &[Option<HuffmanTable>; 4],
    ac_tables: &[Option<HuffmanTable>; 4],
) -> Result<ScanOutput> {
    let ns = usize::from(*body.first().ok_or(Error::parse(off, "empty SOS segment"))?);
    if body.len() != 4 + 2 * ns {
        return Err(Error::parse(off, "invalid SOS segment"));
    }
    if ns != hdr.components.len() {
        return Err(Error::Unsupported("multiple scans"));
    }
    let tail = &body[1 + 2 * ns..];
    if tail != [0, 63, 0] {
        return Err(Error::Unsupported("spectral selection or successive approximation"));
    }
    let mut decoders = Vec::with_capacity(ns);
    for (k, sel) in body[1..1 + 2 * ns].chunks_exact(2).enumerate() {
        if sel[0] != hdr.components[k].0 {
            return Err(Error::parse(off, "scan components out of frame order"));
        }
        let (td, ta) = (usize::from(sel[1] >> 4), usize::from(sel[1] & 15));
        let dc = dc_tables.get(td).and_then(Option::as_ref);
        let ac = ac_tables.get(ta).and_then(Option::as_ref);
        match (dc, ac) {
            (Some(dc), Some(ac)) => decoders.push((HuffmanDecoder::new(dc), HuffmanDecoder::new(ac))),
            _ => return Err(Error::parse(off, "scan references an undefined Huffman table")),
        }
    }

    let hmax = hdr.components.iter().map(|c| usize::from(c.1)).max().unwrap_or(1);
    let vmax = hdr.components.iter().map(|c| usize::from(c.2)).max().unwrap_or(1);
    let interleaved = ns > 1;
    let (mx, my) = (hdr.width.div_ceil(8 * hmax), hdr.height.div_ceil(8 * vmax));
    let mut components: Vec<ComponentBlocks> = hdr
        .components
        .iter()
        .map(|&(id, h, v, table)| {
            let (bw, bh) = if interleaved {
                (mx * usize::from(h), my * usize::from(v))
            } else {
                (
                    (hdr.width * usize::from(h)).div_ceil(hmax).div_ceil(8),
                    (hdr.height * usize::from(v)).div_ceil(vmax).div_ceil(8),
                )
            };
            ComponentBlocks {
                id,
                h_samp: h,
                v_samp: v,
                table,
                blocks_wide: bw,
                blocks_high: bh,
                blocks: vec![QuantBlock::ZERO; bw * bh],
            }
        })
        .collect();
    let mut symbols = vec![SymbolCounts::default(); ns];
    let mut preds = vec![0i32; ns];
    let mut r = BitReader::new(bytes, data_start);

    if interleaved {
        for mcu_y in 0..my {
            for mcu_x in 0..mx {
                for (ci, comp) in components.iter_mut().enumerate() {
                    let (h, v) = (usize::from(comp.h_samp), usize::from(comp.v_samp));
                    for by in 0..v {
                        for bx in 0..h {
                            let idx = (mcu_y * v + by) * comp.blocks_wide + mcu_x * h + bx;
                            let (dc, ac) = &decoders[ci];
                            comp.blocks[idx] = decode_block(&mut r, dc, ac, &mut preds[ci], &mut symbols[ci])?;
                        }
                    }
                }
            }
        }
    } else {
        let comp = &mut components[0];
        let (dc, ac) = &decoders[0];
        for block in comp.blocks.iter_mut() {
            *block = decode_block(&mut r, dc, ac, &mut preds[0], &mut symbols[0])?;
        }
    }
    let frame = QuantFrame { width: hdr.width, height: hdr.height, components };
    Ok((frame, symbols, r.position()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zero_frame(w: usize, h: usize) -> QuantFrame {
        let (mx, my) = (w.div_ceil(16), h.div_ceil(16));
        QuantFrame::yuv420(
            w,
            h,
            [vec![QuantBlock::ZERO; 4 * mx * my], vec![QuantBlock::ZERO; mx * my], vec![QuantBlock::ZERO; mx * my]],
        )
        .unwrap()
    }

    fn markers(bytes: &[u8]) -> Vec<u8> {
        // walk the header segments up to SOS
        let mut out = vec![bytes[1]];
        let mut pos = 2;
        loop {
            let m = bytes[pos + 1];
            out.push(m);
            let len = usize::from(u16::from_be_bytes([bytes[pos + 2], bytes[pos + 3]]));
            pos += 2 + len;
            if m == SOS {
                break;
            }
        }
        out.push(*bytes.last().unwrap());
        out
    }

    #[test]
    fn marker_layout_is_fixed() {
        let s = entropy_encode(&zero_frame(16, 16), &CodecConfig::new(50).unwrap()).unwrap();
        assert_eq!(markers(s.as_bytes()), [SOI, APP0, DQT, DQT, SOF0, DHT, DHT, DHT, DHT, SOS, EOI]);
    }

    #[test]
    fn zero_blocks_code_as_dc_zero_plus_eob() {
        let s = entropy_encode(&zero_frame(16, 16), &CodecConfig::new(50).unwrap()).unwrap();
        let d = s.decode().unwrap();
        assert_eq!(d.symbols[0].dc[0], 4);
        assert_eq!(d.symbols[0].ac[usize::from(EOB)], 4);
        assert_eq!(d.symbols[1].dc.iter().sum::<u64>(), 1);
        assert_eq!(d.mcu_count(), 1);
        assert_eq!(d.codec_config(), Some(CodecConfig::new(50).unwrap()));
    }

    #[test]
    fn truncated_stream_is_a_parse_error() {
        let s = entropy_encode(&zero_frame(32, 32), &CodecConfig::default()).unwrap();
        let bytes = s.as_bytes();
        assert!(matches!(decode_jfif(&bytes[..bytes.len() - 2]), Err(Error::Parse { .. })));
        assert!(matches!(decode_jfif(&bytes[..40]), Err(Error::Parse { .. })));
        assert!(matches!(decode_jfif(&bytes[2..]), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn progressive_frames_are_unsupported() {
        let s = entropy_encode(&zero_frame(16, 16), &CodecConfig::default()).unwrap();
        let mut bytes = s.into_bytes();
        let sof = bytes.windows(2).position(|w| w == [0xFF, SOF0]).unwrap();
        bytes[sof + 1] = 0xC2;
        assert_eq!(decode_jfif(&bytes).unwrap_err(), Error::Unsupported("progressive DCT"));
    }

    #[test]
    fn out_of_range_levels_fail_to_encode() {
        let mut f = zero_frame(16, 16);
        f.components[0].blocks[0].0[1] = 1024;
        assert!(matches!(entropy_encode(&f, &CodecConfig::default()), Err(Error::Encode(_))));
        let mut f = zero_frame(16, 16);
        f.components[0].blocks[0].0[0] = -1200;
        f.components[0].blocks[1].0[0] = 1200;
        assert!(matches!(entropy_encode(&f, &CodecConfig::default()), Err(Error::Encode(_))));
    }

    #[test]
    fn oversized_frames_are_unsupported() {
        let mut f = zero_frame(16, 16);
        f.width = 70_000;
        // layout check fails first for inconsistent frames
        assert!(entropy_encode(&f, &CodecConfig::default()).is_err());
    }

    fn block_strategy() -> impl Strategy<Value = QuantBlock> {
        // sparse, mostly small levels like real coefficient data
        proptest::collection::vec((0usize..64, -1023i16..=1023), 0..24).prop_map(|entries| {
            let mut q = [0i16; 64];
            for (pos, v) in entries {
                q[pos] = if pos == 0 { v / 2 } else { v };
            }
            QuantBlock(q)
        })
    }

    proptest! {
        #[test]
        fn entropy_coding_is_lossless(mx in 1usize..3, my in 1usize..3, seed in proptest::collection::vec(block_strategy(), 24)) {
            let n = mx * my;
            let take = |k: usize, off: usize| (0..k).map(|i| seed[(i + off) % seed.len()]).collect::<Vec<_>>();
            let frame = QuantFrame::yuv420(mx * 16 - 3, my * 16, [take(4 * n, 0), take(n, 5), take(n, 11)]).unwrap();
            let stream = entropy_encode(&frame, &CodecConfig::new(80).unwrap()).unwrap();
            let bytes = stream.as_bytes();
            // every 0xFF inside the entropy data is stuffed
            let sos = bytes.windows(2).position(|w| w == [0xFF, SOS]).unwrap();
            let data = &bytes[sos + 14..bytes.len() - 2];
            for (i, &b) in data.iter().enumerate() {
                if b == 0xFF {
                    prop_assert_eq!(data[i + 1], 0);
                }
            }
            let decoded = stream.decode().unwrap();
            prop_assert_eq!(decoded.frame, frame);
        }
    }
}
