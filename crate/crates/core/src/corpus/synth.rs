//! Deterministic synthetic corpora.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::huffman;
use super::manifest::{CorpusEntry, CorpusManifest};
use crate::classifier::Verdict;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "TEXT")]
    Text,
    #[serde(rename = "STRUCTURED")]
    Structured,
    #[serde(rename = "ENTROPY-CODED")]
    EntropyCoded,
    #[serde(rename = "PSEUDO-ENCRYPTED")]
    PseudoEncrypted,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Text,
        Category::Structured,
        Category::EntropyCoded,
        Category::PseudoEncrypted,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Category::Text => "TEXT",
            Category::Structured => "STRUCTURED",
            Category::EntropyCoded => "ENTROPY-CODED",
            Category::PseudoEncrypted => "PSEUDO-ENCRYPTED",
        }
    }

    pub fn label(self) -> Verdict {
        Verdict::from_bool(self == Category::PseudoEncrypted)
    }

    fn extension(self) -> &'static str {
        match self {
            Category::Text => "txt",
            Category::Structured => "xml",
            Category::EntropyCoded => "huf",
            Category::PseudoEncrypted => "enc",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown category {s:?}")))
    }
}

/// `category -> (file count, file size in bytes)`.
pub type SynthSpec = BTreeMap<Category, (usize, usize)>;

/// Seed for file `index` of `category`, independent of every other file.
pub fn file_seed(seed: u64, category: Category, index: usize) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"filerand-synth");
    h.update(seed.to_le_bytes());
    h.update(category.tag().as_bytes());
    h.update((index as u64).to_le_bytes());
    h.finalize().into()
}

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "a", "in", "is", "it", "that", "was", "for", "on", "are", "with", "as",
    "be", "at", "this", "by", "from", "have", "or", "had", "not", "but", "what", "all", "were", "when",
    "we", "there", "can", "an", "your", "which", "their", "said", "if", "do", "will", "each", "about",
    "how", "up", "out", "them", "then", "she", "many", "some", "so", "these", "would", "other",
    "into", "has", "more", "her", "two", "like", "him", "see", "time", "could", "no", "make", "than",
    "first", "been", "its", "who", "now", "people", "my", "made", "over", "did", "down", "only",
    "way", "find", "use", "may", "water", "long", "little", "very", "after", "words", "called",
    "just", "where", "most", "know", "file", "system", "record", "network", "storage", "report",
    "between", "through", "because", "during", "important", "different", "following", "number",
    "general", "process", "result", "evidence", "research", "analysis", "encryption", "random",
];

/// Word-like ASCII prose with Zipf-distributed vocabulary.
pub fn text_bytes(rng: &mut impl Rng, size: usize) -> Vec<u8> {
    let weights: Vec<f64> = (1..=WORDS.len()).map(|r| 1.0 / r as f64).collect();
    let pick = WeightedIndex::new(&weights).expect("static weights");
    let mut out = Vec::with_capacity(size + 16);
    let mut sentence_start = true;
    let mut words_in_sentence = 0;
    while out.len() < size {
        let word = WORDS[pick.sample(rng)].as_bytes();
        if sentence_start {
            out.push(word[0].to_ascii_uppercase());
            out.extend_from_slice(&word[1..]);
            sentence_start = false;
        } else {
            out.extend_from_slice(word);
        }
        words_in_sentence += 1;
        let end = words_in_sentence >= 4 && rng.gen_ratio(1, 9);
        if end {
            out.push(if rng.gen_ratio(1, 10) { b'?' } else { b'.' });
            out.push(if rng.gen_ratio(1, 6) { b'\n' } else { b' ' });
            sentence_start = true;
            words_in_sentence = 0;
        } else if rng.gen_ratio(1, 14) {
            out.extend_from_slice(b", ");
        } else {
            out.push(b' ');
        }
    }
    out.truncate(size);
    out
}

const NAMES: &[&str] = &["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"];
const STATUSES: &[&str] = &["active", "archived", "pending", "deleted"];

/// Repetitive tagged records.
pub fn structured_bytes(rng: &mut impl Rng, size: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(size + 160);
    out.extend_from_slice(b"<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<records>\n");
    let mut id: u32 = rng.gen_range(1..1000);
    while out.len() < size {
        id += rng.gen_range(1..4);
        let rec = format!(
            "  <record id=\"{id:06}\">\n    <name>{}</name>\n    <status>{}</status>\n    <value>{}</value>\n  </record>\n",
            NAMES[rng.gen_range(0..NAMES.len())],
            STATUSES[rng.gen_range(0..STATUSES.len())],
            rng.gen_range(0..100_000),
        );
        out.extend_from_slice(rec.as_bytes());
    }
    out.truncate(size);
    out
}

/// Text after two passes of the order-0 Huffman coder, truncated to `size`.
///
/// One pass leaves word-level structure visible (about 7.6 bits/byte);
/// the second lands where real compressed data sits: above 7.95 bits/byte
/// but far from uniform under chi-square.
pub fn entropy_coded_bytes(rng: &mut impl Rng, size: usize) -> Vec<u8> {
    let mut source_len = size * 9 / 4 + 256;
    loop {
        let text = text_bytes(rng, source_len);
        let (_, once, _) = huffman::encode(&text);
        let (_, mut payload, _) = huffman::encode(&once);
        if payload.len() >= size {
            payload.truncate(size);
            return payload;
        }
        source_len *= 2;
    }
}

/// Output of a cryptographic-quality keystream.
pub fn pseudo_encrypted_bytes(rng: &mut impl RngCore, size: usize) -> Vec<u8> {
    let mut out = vec![0u8; size];
    rng.fill_bytes(&mut out);
    out
}

pub fn generate(category: Category, size: usize, seed: [u8; 32]) -> Vec<u8> {
    let mut rng = ChaCha20Rng::from_seed(seed);
    match category {
        Category::Text => text_bytes(&mut rng, size),
        Category::Structured => structured_bytes(&mut rng, size),
        Category::EntropyCoded => entropy_coded_bytes(&mut rng, size),
        Category::PseudoEncrypted => pseudo_encrypted_bytes(&mut rng, size),
    }
}

/// Writes the files and `manifest.txt` into `out_dir`, returning the
/// manifest. Entries are ordered by category, then index.
pub fn synthesize_corpus(spec: &SynthSpec, seed: u64, out_dir: impl AsRef<Path>) -> Result<CorpusManifest> {
    let out_dir = out_dir.as_ref();
    for (category, &(count, size)) in spec {
        if count == 0 || size == 0 {
            return Err(Error::Parameter(format!(
                "{category}: count and size must be positive, got ({count}, {size})"
            )));
        }
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut entries = Vec::new();
    for (&category, &(count, size)) in spec {
        let width = count.to_string().len().max(4);
        for index in 0..count {
            let name = format!(
                "{}-{index:0width$}.{}",
                category.tag().to_ascii_lowercase(),
                category.extension()
            );
            let bytes = generate(category, size, file_seed(seed, category, index));
            let path = out_dir.join(&name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            entries.push(CorpusEntry {
                path: name.into(),
                type_tag: category.tag().to_owned(),
                label: category.label(),
            });
        }
    }
    let manifest = CorpusManifest::new(entries, Some(out_dir.to_path_buf()))?;
    manifest.write(out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

pub const MANIFEST_FILE: &str = "manifest.txt";
