//! Binary-classification datasets: IDX digit images pooled and binarized,
//! or synthetic bit strings labelled by a fixed rule.

use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;
/// Largest bit-string length handled here (one qubit per bit plus a readout).
pub const MAX_BITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub bits: Vec<u8>,
    /// `+1` or `-1`.
    pub label: i8,
}

impl Sample {
    pub fn bits_f64(&self) -> impl Iterator<Item = f64> + '_ {
        self.bits.iter().map(|&b| f64::from(b))
    }
}

/// Labelling rule for [`synth_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `+1` iff the first bit is set.
    SingleBit,
    /// `+1` iff the number of set bits is even.
    Parity,
    /// `+1` iff at least half of the bits are set.
    Threshold,
}

impl Rule {
    pub fn label(self, bits: &[u8]) -> i8 {
        let ones = bits.iter().filter(|&&b| b == 1).count();
        let positive = match self {
            Rule::SingleBit => bits.first() == Some(&1),
            Rule::Parity => ones % 2 == 0,
            Rule::Threshold => 2 * ones >= bits.len(),
        };
        if positive {
            1
        } else {
            -1
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-bit" => Ok(Rule::SingleBit),
            "parity" => Ok(Rule::Parity),
            "threshold" => Ok(Rule::Threshold),
            other => Err(Error::Data(format!(
                "unknown rule `{other}` (expected single-bit, parity or threshold)"
            ))),
        }
    }
}

/// `n` uniformly random `k`-bit strings labelled by `rule`.
pub fn synth_dataset(k: usize, rule: Rule, n: usize, seed: u64) -> Result<Vec<Sample>> {
    if k == 0 || k > MAX_BITS {
        return Err(Error::Data(format!("bit count {k} outside 1..={MAX_BITS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let bits: Vec<u8> = (0..k).map(|_| rng.gen_range(0..=1)).collect();
            let label = rule.label(&bits);
            Sample { bits, label }
        })
        .collect())
}

/// One line per sample: the bits, then the label.
pub fn samples_to_csv(samples: &[Sample]) -> String {
    let mut out = String::new();
    for s in samples {
        for b in &s.bits {
            out.push_str(&b.to_string());
            out.push(',');
        }
        out.push_str(&s.label.to_string());
        out.push('\n');
    }
    out
}

/// Options for [`ingest_idx`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdxOptions {
    /// The first class is labelled `+1`, the second `-1`.
    pub classes: (u8, u8),
    /// Pixel mean, scaled to `[0, 1]`, at or above which a cell is 1.
    pub threshold: f64,
    /// Output images are `side x side`.
    pub side: usize,
}

impl Default for IdxOptions {
    fn default() -> Self {
        Self { classes: (3, 6), threshold: 0.5, side: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<Vec<u8>>,
}

fn be_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Data(format!("{what}: truncated header")))
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let magic = be_u32(bytes, 0, "images")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Data(format!("images: bad magic {magic:#010x}")));
    }
    let n = be_u32(bytes, 4, "images")? as usize;
    let rows = be_u32(bytes, 8, "images")? as usize;
    let cols = be_u32(bytes, 12, "images")? as usize;
    let size = rows * cols;
    let body = &bytes[16..];
    if body.len() < n * size {
        return Err(Error::Data(format!("images: truncated ({} of {} pixel bytes)", body.len(), n * size)));
    }
    let pixels = (0..n).map(|i| body[i * size..(i + 1) * size].to_vec()).collect();
    Ok(IdxImages { rows, cols, pixels })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = be_u32(bytes, 0, "labels")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::Data(format!("labels: bad magic {magic:#010x}")));
    }
    let n = be_u32(bytes, 4, "labels")? as usize;
    let body = &bytes[8..];
    if body.len() < n {
        return Err(Error::Data(format!("labels: truncated ({} of {n} labels)", body.len())));
    }
    Ok(body[..n].to_vec())
}

pub fn encode_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len() * images.rows * images.cols);
    for x in [IDX_IMAGES_MAGIC, images.pixels.len() as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&x.to_be_bytes());
    }
    for p in &images.pixels {
        out.extend_from_slice(p);
    }
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// Block-average pooling to `side x side` then thresholding. Cell `(i, j)`
/// covers rows `floor(i R / side)..floor((i+1) R / side)` and likewise for
/// columns.
pub fn downsample(pixels: &[u8], rows: usize, cols: usize, side: usize, threshold: f64) -> Vec<u8> {
    let mut bits = Vec::with_capacity(side * side);
    for i in 0..side {
        let (r0, r1) = (i * rows / side, (i + 1) * rows / side);
        for j in 0..side {
            let (c0, c1) = (j * cols / side, (j + 1) * cols / side);
            let mut sum = 0u64;
            for r in r0..r1 {
                for c in c0..c1 {
                    sum += u64::from(pixels[r * cols + c]);
                }
            }
            let count = ((r1 - r0) * (c1 - c0)).max(1) as f64;
            bits.push(u8::from(sum as f64 / count / 255.0 >= threshold));
        }
    }
    bits
}

pub fn ingest_idx_bytes(images: &[u8], labels: &[u8], opts: &IdxOptions) -> Result<Vec<Sample>> {
    let imgs = parse_idx_images(images)?;
    let labs = parse_idx_labels(labels)?;
    if imgs.pixels.len() != labs.len() {
        return Err(Error::Data(format!("{} images but {} labels", imgs.pixels.len(), labs.len())));
    }
    if opts.side == 0 || opts.side > imgs.rows.min(imgs.cols) {
        return Err(Error::Data(format!("side {} does not fit {}x{} images", opts.side, imgs.rows, imgs.cols)));
    }
    let (pos, neg) = opts.classes;
    for class in [pos, neg] {
        if !labs.contains(&class) {
            return Err(Error::Data(format!("class {class} does not occur in the labels")));
        }
    }
    Ok(imgs
        .pixels
        .iter()
        .zip(&labs)
        .filter(|(_, &l)| l == pos || l == neg)
        .map(|(p, &l)| Sample {
            bits: downsample(p, imgs.rows, imgs.cols, opts.side, opts.threshold),
            label: if l == pos { 1 } else { -1 },
        })
        .collect())
}

pub fn ingest_idx(images: &Path, labels: &Path, opts: &IdxOptions) -> Result<Vec<Sample>> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| Error::Data(format!("{}: {e}", p.display())));
    ingest_idx_bytes(&read(images)?, &read(labels)?, opts)
}
