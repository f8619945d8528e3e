//! Byte- and bit-level views over file contents.
//!
//! Files are opaque byte streams: no format sniffing and no header skipping.
//! Bits are always extracted most-significant bit first within each byte.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// An in-memory byte sequence and the path it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteSample {
    source: PathBuf,
    bytes: Vec<u8>,
}

impl ByteSample {
    /// Wraps bytes that did not come from disk. Zero-length samples are
    /// representable; every test operation rejects them.
    pub fn from_bytes(source: impl Into<PathBuf>, bytes: Vec<u8>) -> Self {
        Self {
            source: source.into(),
            bytes,
        }
    }

    pub fn source(&self) -> &Path {
        &self.source
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn length_bytes(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.bytes.is_empty() {
            Err(Error::EmptySample)
        } else {
            Ok(())
        }
    }
}

/// Reads the first `min(file size, max_bytes)` bytes of `path`.
pub fn load_sample(path: impl AsRef<Path>, max_bytes: Option<u64>) -> Result<ByteSample> {
    let path = path.as_ref();
    if let Some(0) = max_bytes {
        return Err(Error::Parameter("max_bytes must be positive".into()));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let meta = file.metadata().map_err(|e| Error::io(path, e))?;
    if !meta.is_file() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a regular file"),
        ));
    }
    let mut bytes = Vec::new();
    match max_bytes {
        Some(cap) => file.take(cap).read_to_end(&mut bytes),
        None => {
            let mut file = file;
            file.read_to_end(&mut bytes)
        }
    }
    .map_err(|e| Error::io(path, e))?;
    if bytes.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(ByteSample::from_bytes(path, bytes))
}

/// Occurrence count of every byte value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
    total: u64,
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn count(&self, value: u8) -> u64 {
        self.counts[value as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.total == 0 {
            Err(Error::EmptySample)
        } else {
            Ok(())
        }
    }
}

pub fn byte_histogram(sample: &ByteSample) -> Result<Histogram256> {
    sample.require_non_empty()?;
    Ok(histogram_of(sample.bytes()))
}

pub(crate) fn histogram_of(bytes: &[u8]) -> Histogram256 {
    let mut counts = [0u64; 256];
    for &b in bytes {
        counts[b as usize] += 1;
    }
    Histogram256 {
        counts,
        total: bytes.len() as u64,
    }
}

/// A packed bit string, MSB-first within each byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    packed: Vec<u8>,
    len_bits: usize,
}

impl BitSequence {
    /// Builds a sequence from one 0/1 value per element. Any non-zero value
    /// counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut packed = vec![0u8; bits.len().div_ceil(8)];
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                packed[i / 8] |= 0x80 >> (i % 8);
            }
        }
        Self {
            packed,
            len_bits: bits.len(),
        }
    }

    /// Parses a string of `'0'`/`'1'` characters, ignoring whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parameter(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    pub fn len(&self) -> usize {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> u8 {
        debug_assert!(index < self.len_bits);
        (self.packed[index / 8] >> (7 - index % 8)) & 1
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len_bits).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        let full = self.len_bits / 8;
        let mut ones: usize = self.packed[..full]
            .iter()
            .map(|b| b.count_ones() as usize)
            .sum();
        for i in full * 8..self.len_bits {
            ones += self.get(i) as usize;
        }
        ones
    }

    /// Every bit flipped.
    pub fn complement(&self) -> Self {
        let mut packed: Vec<u8> = self.packed.iter().map(|b| !b).collect();
        let tail = self.len_bits % 8;
        if tail != 0 {
            if let Some(last) = packed.last_mut() {
                *last &= 0xFFu8 << (8 - tail);
            }
        }
        Self {
            packed,
            len_bits: self.len_bits,
        }
    }
}

pub fn bits_msb_first(sample: &ByteSample) -> Result<BitSequence> {
    sample.require_non_empty()?;
    Ok(BitSequence {
        packed: sample.bytes().to_vec(),
        len_bits: sample.length_bytes() * 8,
    })
}
