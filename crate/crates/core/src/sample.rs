//! Random quartet generation for tests, validation and benchmarks.

use rand::Rng;

use crate::shell::{PrimitiveShell, QuartetClass, QuartetInput, ANGSTROM_TO_BOHR};

/// Edge of the cube (Å) random centers are drawn from.
pub const CUBE_EDGE_ANGSTROM: f64 = 2.0;
pub const EXPONENT_RANGE: (f64, f64) = (0.5, 2.5);

/// Quartet of `class` with uniform centers in the cube and uniform exponents.
pub fn random_quartet<R: Rng + ?Sized>(rng: &mut R, class: &QuartetClass) -> QuartetInput {
    let edge = CUBE_EDGE_ANGSTROM * ANGSTROM_TO_BOHR;
    let ls = class.ls();
    QuartetInput::new(std::array::from_fn(|i| {
        let center = [0; 3].map(|_| rng.gen_range(0.0..edge));
        let alpha = rng.gen_range(EXPONENT_RANGE.0..EXPONENT_RANGE.1);
        PrimitiveShell::new(center, alpha, ls[i]).expect("valid sample")
    }))
}
