mod common;

use proptest::prelude::*;
use rys_eri::compress::{compress, decompress, BitWidth, CHUNK_BYTES};
use rys_eri::kernel::{compute_quartet, PrecisionMode};
use rys_eri::sample::random_quartet;
use rys_eri::shell::{permute_eris, permute_input, QuartetClass, QuartetPermutation};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn translation_invariant(idx in 0usize..256, seed: u64, shift in prop::array::uniform3(-5.0f64..5.0)) {
        let class = QuartetClass::from_index(idx);
        let q = random_quartet(&mut common::rng(seed), &class);
        let a = compute_quartet(&q, PrecisionMode::Double).unwrap();
        let b = compute_quartet(&q.translated(shift), PrecisionMode::Double).unwrap();
        prop_assert!(max_abs_diff(&a.to_logical(), &b.to_logical()) <= 1e-10 * a.b_max.max(1e-300));
    }

    #[test]
    fn permutations_agree(idx in 0usize..256, seed: u64, bits in 0u8..8) {
        let class = QuartetClass::from_index(idx);
        let p = QuartetPermutation::from_bits(bits);
        let q = random_quartet(&mut common::rng(seed), &class);
        let base = compute_quartet(&q, PrecisionMode::Double).unwrap();
        let moved = compute_quartet(&permute_input(&q, p), PrecisionMode::Double).unwrap();
        let back = permute_eris(&class, &base.to_logical(), p);
        prop_assert!(max_abs_diff(&back, &moved.to_logical()) <= 1e-10 * base.b_max);
    }

    #[test]
    fn compression_bound_every_width(idx in 0usize..256, seed: u64, n in 2u32..=32, single: bool) {
        let class = QuartetClass::from_index(idx);
        let mode = if single { PrecisionMode::Single } else { PrecisionMode::Double };
        let e = compute_quartet(&random_quartet(&mut common::rng(seed), &class), mode).unwrap();
        let w = BitWidth::new(n).unwrap();
        let c = compress(&e, w).unwrap();
        prop_assert_eq!(c.chunks.len(), w.num_chunks(class.num_eriq()) * CHUNK_BYTES);
        let half = c.epsilon as f64 / 2.0;
        for (v, d) in e.iter().zip(decompress(&c).unwrap()) {
            prop_assert!((v - d).abs() <= half * (1.0 + 1e-6), "{} vs {}", v, d);
        }
    }
}
