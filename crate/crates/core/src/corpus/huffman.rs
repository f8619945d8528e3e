//! Order-0 canonical Huffman coding of byte streams.
//!
//! Only the payload is emitted; the code table is returned separately.
//! The last byte is zero-padded.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Code length per byte value (0 = symbol absent).
pub type CodeLengths = [u8; 256];

pub fn code_lengths(data: &[u8]) -> CodeLengths {
    let mut freq = [0u64; 256];
    for &b in data {
        freq[b as usize] += 1;
    }
    let mut lengths = [0u8; 256];
    let present: Vec<usize> = (0..256).filter(|&s| freq[s] > 0).collect();
    match present.len() {
        0 => return lengths,
        1 => {
            lengths[present[0]] = 1;
            return lengths;
        }
        _ => {}
    }

    // Node ids 0..256 are leaves; internal nodes follow. Ties break on id so
    // the tree is a pure function of the frequencies.
    let mut parent: Vec<usize> = vec![usize::MAX; 256];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        present.iter().map(|&s| Reverse((freq[s], s))).collect();
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        let id = parent.len();
        parent.push(usize::MAX);
        parent[a] = id;
        parent[b] = id;
        heap.push(Reverse((wa + wb, id)));
    }
    for &s in &present {
        let mut depth = 0u32;
        let mut node = s;
        while parent[node] != usize::MAX {
            node = parent[node];
            depth += 1;
        }
        // An order-0 tree over 256 symbols with u64 weights cannot get
        // deep enough to matter here, but cap defensively.
        lengths[s] = depth.min(u8::MAX as u32) as u8;
    }
    lengths
}

/// Canonical codes: shorter codes first, ties by symbol value.
pub fn canonical_codes(lengths: &CodeLengths) -> [u64; 256] {
    let mut order: Vec<usize> = (0..256).filter(|&s| lengths[s] > 0).collect();
    order.sort_by_key(|&s| (lengths[s], s));
    let mut codes = [0u64; 256];
    let mut code = 0u64;
    let mut prev_len = 0u8;
    for (i, &s) in order.iter().enumerate() {
        let len = lengths[s];
        if i > 0 {
            code = (code + 1) << (len - prev_len);
        } else {
            code = 0;
        }
        codes[s] = code;
        prev_len = len;
    }
    codes
}

/// Encodes `data`, returning the code lengths and the packed payload
/// together with its exact bit length.
pub fn encode(data: &[u8]) -> (CodeLengths, Vec<u8>, u64) {
    let lengths = code_lengths(data);
    let codes = canonical_codes(&lengths);
    let mut out = Vec::with_capacity(data.len() / 2);
    let mut acc: u64 = 0;
    let mut filled: u32 = 0;
    let mut bits: u64 = 0;
    for &b in data {
        let len = lengths[b as usize] as u32;
        let code = codes[b as usize];
        bits += len as u64;
        for i in (0..len).rev() {
            acc = (acc << 1) | ((code >> i) & 1);
            filled += 1;
            if filled == 8 {
                out.push(acc as u8);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (8 - filled)) as u8);
    }
    (lengths, out, bits)
}

/// Inverse of [`encode`].
pub fn decode(lengths: &CodeLengths, payload: &[u8], bit_len: u64) -> Vec<u8> {
    let codes = canonical_codes(lengths);
    let mut table: Vec<((u8, u64), u8)> = (0..256)
        .filter(|&s| lengths[s] > 0)
        .map(|s| ((lengths[s], codes[s]), s as u8))
        .collect();
    table.sort();
    let mut out = Vec::new();
    let (mut len, mut code) = (0u8, 0u64);
    for i in 0..bit_len {
        let bit = (payload[(i / 8) as usize] >> (7 - i % 8)) & 1;
        code = (code << 1) | bit as u64;
        len += 1;
        if let Ok(idx) = table.binary_search_by(|probe| probe.0.cmp(&(len, code))) {
            out.push(table[idx].1);
            len = 0;
            code = 0;
        }
    }
    out
}
