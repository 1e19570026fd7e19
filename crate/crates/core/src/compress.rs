//! Per-quartet quantization to `n`-bit signed codes packed into 512-bit chunks.
//!
//! Chunk format: `⌊512/n⌋` codes per 64-byte chunk, code 0 in the lowest
//! bits, two's complement, chunk bytes little-endian, unused tail bits zero.

use crate::error::{EriError, Result};
use crate::kernel::{QuartetERIs, Real};

pub const CHUNK_BITS: usize = 512;
pub const CHUNK_BYTES: usize = CHUNK_BITS / 8;

/// Bits per code, `2..=32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitWidth(u32);

impl BitWidth {
    pub const N12: BitWidth = BitWidth(12);
    pub const N16: BitWidth = BitWidth(16);

    pub fn new(n: u32) -> Result<Self> {
        if (2..=32).contains(&n) {
            Ok(BitWidth(n))
        } else {
            Err(EriError::BitWidth(n))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `2^{n-1} - 1`.
    pub fn max_code(self) -> i64 {
        (1i64 << (self.0 - 1)) - 1
    }

    pub fn codes_per_chunk(self) -> usize {
        CHUNK_BITS / self.0 as usize
    }

    /// `n_CS = ⌈count / ⌊512/n⌋⌉`.
    pub fn num_chunks(self, count: usize) -> usize {
        count.div_ceil(self.codes_per_chunk())
    }
}

impl std::fmt::Display for BitWidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for BitWidth {
    type Err = EriError;

    fn from_str(s: &str) -> Result<Self> {
        let n: u32 = s.trim().parse().map_err(|_| EriError::BitWidth(0))?;
        BitWidth::new(n)
    }
}

/// `b_max / (2^{n-1} - 1)` in the working precision (one multiplication).
#[inline]
pub fn epsilon_raw<T: Real>(b_max: T, n: BitWidth) -> T {
    b_max * T::from_f64(1.0 / n.max_code() as f64)
}

/// Quantum value as stored: the double-precision value narrowed to single.
///
/// The nearest single is taken, except when that would push the code of
/// `b_max` past `2^{n-1} - 1` (possible for `n ≥ 25`); then the next single
/// up is used so no code ever needs clamping.
pub fn quantum_value(b_max: f64, n: BitWidth) -> f32 {
    let eps = epsilon_raw(b_max, n) as f32;
    if eps > 0.0 && (b_max * (1.0 / eps as f64)).round() > n.max_code() as f64 {
        eps.next_up()
    } else {
        eps
    }
}

/// `ANINT(value · ε⁻¹)` for each value, clamped to `±(2^{n-1} - 1)`.
pub fn quantize_with<T: Real>(values: impl IntoIterator<Item = T>, eps: T, n: BitWidth, out: &mut Vec<i32>) {
    let m = n.max_code() as f64;
    if eps == T::zero() {
        out.extend(values.into_iter().map(|_| 0));
        return;
    }
    let inv = T::one() / eps;
    out.extend(
        values
            .into_iter()
            .map(|v| (v * inv).round().to_f64().clamp(-m, m) as i32),
    );
}

/// Codes of a quartet at its stored quantum value.
pub fn quantize(values: &QuartetERIs, n: BitWidth) -> (f32, Vec<i32>) {
    let eps = quantum_value(values.b_max, n);
    let mut codes = Vec::with_capacity(values.len());
    quantize_with(values.iter(), eps as f64, n, &mut codes);
    (eps, codes)
}

/// Pack codes into whole chunks.
pub fn pack(codes: &[i32], n: BitWidth) -> Vec<u8> {
    let mut out = Vec::with_capacity(n.num_chunks(codes.len()) * CHUNK_BYTES);
    pack_into(codes, n, &mut out);
    out
}

/// Append the packed chunks of `codes` to `out`.
pub fn pack_into(codes: &[i32], n: BitWidth, out: &mut Vec<u8>) {
    let bits = n.bits() as usize;
    let mask = (1u64 << bits) - 1;
    for group in codes.chunks(n.codes_per_chunk()) {
        let mut words = [0u64; CHUNK_BITS / 64];
        for (i, &c) in group.iter().enumerate() {
            let u = (c as i64 as u64) & mask;
            let pos = i * bits;
            let (w, off) = (pos / 64, pos % 64);
            words[w] |= u << off;
            if off + bits > 64 {
                words[w + 1] |= u >> (64 - off);
            }
        }
        for w in words {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
}

/// Inverse of [`pack`] for `count` codes.
pub fn unpack(chunks: &[u8], n: BitWidth, count: usize) -> Result<Vec<i32>> {
    let expected = n.num_chunks(count);
    if chunks.len() != expected * CHUNK_BYTES {
        return Err(EriError::ChunkCount {
            expected,
            found: chunks.len() / CHUNK_BYTES,
            count,
            bits: n.bits(),
        });
    }
    let bits = n.bits() as usize;
    let mask = (1u64 << bits) - 1;
    let mut out = Vec::with_capacity(count);
    for chunk in chunks.chunks(CHUNK_BYTES) {
        let words: [u64; CHUNK_BITS / 64] =
            std::array::from_fn(|w| u64::from_le_bytes(chunk[w * 8..w * 8 + 8].try_into().unwrap()));
        for i in 0..n.codes_per_chunk().min(count - out.len()) {
            let pos = i * bits;
            let (w, off) = (pos / 64, pos % 64);
            let mut u = words[w] >> off;
            if off + bits > 64 {
                u |= words[w + 1] << (64 - off);
            }
            u &= mask;
            // sign-extend from n bits
            let v = ((u << (64 - bits)) as i64) >> (64 - bits);
            out.push(v as i32);
        }
    }
    Ok(out)
}

/// One compressed quartet: quantum value plus packed codes.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedQuartet {
    pub epsilon: f32,
    pub bits: BitWidth,
    pub count: usize,
    pub chunks: Vec<u8>,
}

impl CompressedQuartet {
    pub fn num_chunks(&self) -> usize {
        self.chunks.len() / CHUNK_BYTES
    }

    pub fn codes(&self) -> Result<Vec<i32>> {
        unpack(&self.chunks, self.bits, self.count)
    }
}

pub fn compress(values: &QuartetERIs, n: BitWidth) -> Result<CompressedQuartet> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(EriError::NonFinite(i));
    }
    let (epsilon, codes) = quantize(values, n);
    Ok(CompressedQuartet {
        epsilon,
        bits: n,
        count: codes.len(),
        chunks: pack(&codes, n),
    })
}

/// `code · ε` for every code, in logical order.
pub fn decompress(c: &CompressedQuartet) -> Result<Vec<f64>> {
    let eps = c.epsilon as f64;
    Ok(c.codes()?.into_iter().map(|k| k as f64 * eps).collect())
}
