//! Binary input records and the compressed output stream.
//!
//! Record, 128 bytes, little-endian `f32` throughout:
//!
//! | bytes    | contents                                             |
//! |----------|------------------------------------------------------|
//! | 0..48    | centers of a, b, c, d as `x, y, z` (bohr)             |
//! | 48..64   | exponents of a, b, c, d (bohr⁻²)                      |
//! | 64..120  | up to 7 `(root, weight)` pairs, unused pairs zero     |
//! | 120..128 | zero                                                 |
//!
//! An all-zero second word means the nodes are computed on read.
//!
//! Stream: for each quartet in input order, `ε` as `f32` then `n_CS` 64-byte chunks.

use std::io::{self, Write};

use crate::compress::{BitWidth, CompressedQuartet, CHUNK_BYTES};
use crate::error::{EriError, Result};
use crate::rys::{prepare_quartet_rys, quartet_argument, RysNodeSet, MAX_RYS};
use crate::shell::{PrimitiveShell, QuartetClass, QuartetInput};

pub const RECORD_BYTES: usize = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuartetRecord {
    pub centers: [[f32; 3]; 4],
    pub exponents: [f32; 4],
    /// `(root, weight)` pairs; all zero when absent.
    pub nodes: [(f32, f32); MAX_RYS],
}

impl QuartetRecord {
    /// Geometry only; nodes are left for the reader to compute.
    pub fn from_input(q: &QuartetInput) -> Self {
        QuartetRecord {
            centers: q.shells.map(|s| s.center.map(|x| x as f32)),
            exponents: q.shells.map(|s| s.exponent as f32),
            nodes: [(0.0, 0.0); MAX_RYS],
        }
    }

    /// Geometry plus the node set, narrowed to single precision.
    pub fn with_nodes(q: &QuartetInput, r: &RysNodeSet) -> Self {
        let mut rec = Self::from_input(q);
        for (slot, (&t, &w)) in rec.nodes.iter_mut().zip(r.roots().iter().zip(r.weights())) {
            *slot = (t as f32, w as f32);
        }
        rec
    }

    pub fn has_nodes(&self) -> bool {
        self.nodes.iter().any(|&(t, w)| t != 0.0 || w != 0.0)
    }

    pub fn encode(&self) -> [u8; RECORD_BYTES] {
        let mut out = [0u8; RECORD_BYTES];
        let words = self
            .centers
            .iter()
            .flatten()
            .chain(&self.exponents)
            .copied()
            .chain(self.nodes.iter().flat_map(|&(t, w)| [t, w]));
        for (i, v) in words.enumerate() {
            out[i * 4..i * 4 + 4].copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != RECORD_BYTES {
            return Err(EriError::Record(format!(
                "expected {RECORD_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        let f = |i: usize| f32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap());
        if bytes[120..].iter().any(|&b| b != 0) {
            return Err(EriError::Record("trailing padding is not zero".into()));
        }
        Ok(QuartetRecord {
            centers: std::array::from_fn(|s| std::array::from_fn(|x| f(s * 3 + x))),
            exponents: std::array::from_fn(|s| f(12 + s)),
            nodes: std::array::from_fn(|m| (f(16 + 2 * m), f(17 + 2 * m))),
        })
    }

    /// Shells of `class` at the recorded geometry.
    pub fn input(&self, class: &QuartetClass) -> Result<QuartetInput> {
        let ls = class.ls();
        let mut shells = [PrimitiveShell::new([0.0; 3], 1.0, 0)?; 4];
        for (i, s) in shells.iter_mut().enumerate() {
            *s = PrimitiveShell::new(self.centers[i].map(f64::from), self.exponents[i] as f64, ls[i])?;
        }
        Ok(QuartetInput::new(shells))
    }

    /// Nodes from the record, or computed from the geometry if absent.
    pub fn node_set(&self, q: &QuartetInput) -> Result<RysNodeSet> {
        if !self.has_nodes() {
            return prepare_quartet_rys(q);
        }
        let n = q.class().n_rys();
        if self.nodes[n..].iter().any(|&(t, w)| t != 0.0 || w != 0.0) {
            return Err(EriError::Record(format!(
                "more than {n} node pairs for class {}",
                q.class()
            )));
        }
        let roots: Vec<f64> = self.nodes[..n].iter().map(|p| p.0 as f64).collect();
        let weights: Vec<f64> = self.nodes[..n].iter().map(|p| p.1 as f64).collect();
        if roots.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(EriError::Record("non-finite root or weight".into()));
        }
        RysNodeSet::from_parts(quartet_argument(q), &roots, &weights)
    }
}

const _: () = assert!((16 + 2 * MAX_RYS) * 4 <= RECORD_BYTES);

pub fn write_records<W: Write>(w: &mut W, records: &[QuartetRecord]) -> io::Result<()> {
    for r in records {
        w.write_all(&r.encode())?;
    }
    Ok(())
}

/// Every record of a byte buffer; the length must be a multiple of 128.
pub fn parse_records(bytes: &[u8]) -> Result<Vec<QuartetRecord>> {
    if !bytes.len().is_multiple_of(RECORD_BYTES) {
        return Err(EriError::Record(format!(
            "file length {} is not a multiple of {RECORD_BYTES}",
            bytes.len()
        )));
    }
    bytes.chunks(RECORD_BYTES).map(QuartetRecord::decode).collect()
}

/// Bytes one quartet occupies in the stream.
pub fn stream_entry_len(class: &QuartetClass, n: BitWidth) -> usize {
    4 + CHUNK_BYTES * n.num_chunks(class.num_eriq())
}

/// Append one quartet to a stream.
pub fn append_compressed(out: &mut Vec<u8>, c: &CompressedQuartet) {
    out.extend_from_slice(&c.epsilon.to_le_bytes());
    out.extend_from_slice(&c.chunks);
}

/// Split a stream of `class` quartets at `n` bits.
pub fn parse_stream(bytes: &[u8], class: &QuartetClass, n: BitWidth) -> Result<Vec<CompressedQuartet>> {
    let entry = stream_entry_len(class, n);
    if !bytes.len().is_multiple_of(entry) {
        return Err(EriError::Stream(format!(
            "length {} is not a multiple of {entry} bytes ({class} at {n} bits)",
            bytes.len()
        )));
    }
    let count = class.num_eriq();
    bytes
        .chunks(entry)
        .map(|e| {
            let epsilon = f32::from_le_bytes(e[..4].try_into().unwrap());
            if !(epsilon.is_finite() && epsilon >= 0.0) {
                return Err(EriError::Stream(format!("invalid quantum value {epsilon}")));
            }
            Ok(CompressedQuartet {
                epsilon,
                bits: n,
                count,
                chunks: e[4..].to_vec(),
            })
        })
        .collect()
}
